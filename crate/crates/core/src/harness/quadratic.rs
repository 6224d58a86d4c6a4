//! Defect measures of quadratic expressions in two oscillating functions,
//! bounded cell by cell by `C λ^{1/r} λ′^{1/r′}`.

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::extrapolate::richardson;
use crate::form::Form;
use crate::harness::bilinear::conjugate;
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::{Check, ConvergenceTable, ExperimentReport, TableRow};
use crate::sequence::cell_masses;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadratic {
    /// `q(u, v) = u v`.
    Product,
    /// `q(u, v) = u² + v²`.
    SquareSum,
}

impl Quadratic {
    pub const ALL: [Quadratic; 2] = [Quadratic::Product, Quadratic::SquareSum];

    pub fn eval(self, u: f64, v: f64) -> f64 {
        match self {
            Quadratic::Product => u * v,
            Quadratic::SquareSum => u * u + v * v,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Quadratic::Product => "product",
            Quadratic::SquareSum => "square_sum",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticRecord {
    pub quadratic: Quadratic,
    /// Extrapolated defect mass per cell.
    pub cells: Vec<f64>,
    /// Largest `|ϖ| / (λ^{1/r} λ′^{1/r′})` over cells with positive measures.
    pub constant: Option<f64>,
    /// Largest `|ϖ|` over cells where `λ λ′` vanishes.
    pub null_cell_mass: f64,
}

fn scalar(form: &Form) -> Result<&[f64]> {
    if form.degree() != 0 {
        return Err(HodgeError::Degree("quadratic experiments take functions".into()));
    }
    Ok(&form.components()[0])
}

fn power_density(a: &[f64], b: &[f64], r: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(r)).collect()
}

/// Extrapolates each cell of a per-`n` list of cell masses.
fn extrapolate_cells(ns: &[usize], per_n: &[Vec<f64>]) -> Vec<f64> {
    let cells = per_n[0].len();
    (0..cells)
        .map(|c| {
            let v: Vec<f64> = per_n.iter().map(|m| m[c]).collect();
            richardson(ns, &v).value
        })
        .collect()
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let grid = s.grid()?;
    let dim = grid.dim();
    let r = s.f64("exponents.r")?;
    if !(r > 1.0 && r.is_finite()) {
        return Err(HodgeError::Exponent(format!("r = {r} outside (1, ∞)")));
    }
    let r_conj = conjugate(r);
    let schedule = s.usize_list("run.schedule")?;
    if schedule.len() < 2 {
        return Err(HodgeError::Config("the n schedule needs at least two entries".into()));
    }
    let cells = s.usize("run.cells")?;
    if cells == 0 || grid.resolutions().iter().any(|&k| k % cells != 0) {
        return Err(HodgeError::Config(format!("{cells} cells per axis do not divide the grid")));
    }
    let zero_tol = s.f64("tolerances.zero")?;
    let u_spec = FactorSpec::from_settings(s, "u", dim)?;
    let v_spec = FactorSpec::from_settings(s, "v", dim)?;
    let u_lim = u_spec.limit(&grid)?;
    let v_lim = v_spec.limit(&grid)?;
    let (ub, vb) = (scalar(&u_lim)?.to_vec(), scalar(&v_lim)?.to_vec());

    let mut defects: Vec<Vec<Vec<f64>>> = vec![Vec::new(); Quadratic::ALL.len()];
    let mut lambda = Vec::new();
    let mut lambda_conj = Vec::new();
    for &n in &schedule {
        let un = u_spec.member(&grid, n)?;
        let vn = v_spec.member(&grid, n)?;
        let (un, vn) = (scalar(&un)?, scalar(&vn)?);
        for (k, q) in Quadratic::ALL.iter().enumerate() {
            let density: Vec<f64> = (0..grid.len())
                .map(|i| q.eval(un[i], vn[i]) - q.eval(ub[i], vb[i]))
                .collect();
            defects[k].push(cell_masses(&grid, &density, cells));
        }
        lambda.push(cell_masses(&grid, &power_density(un, &ub, r), cells));
        lambda_conj.push(cell_masses(&grid, &power_density(vn, &vb, r_conj), cells));
    }
    let lam = extrapolate_cells(&schedule, &lambda);
    let lam_conj = extrapolate_cells(&schedule, &lambda_conj);
    // Cell measures at round-off relative to the largest cell count as zero.
    let floor = 1e-12 * lam.iter().fold(0.0f64, |a, &x| a.max(x));
    let floor_conj = 1e-12 * lam_conj.iter().fold(0.0f64, |a, &x| a.max(x));

    let mut report = ExperimentReport::new("quadratic", s);
    let mut records = Vec::new();
    for (k, q) in Quadratic::ALL.iter().enumerate() {
        let varpi = extrapolate_cells(&schedule, &defects[k]);
        let total_mass = varpi.iter().map(|x| x.abs()).sum::<f64>();
        let null = |c: usize| lam[c] <= floor || lam_conj[c] <= floor_conj;
        let mut constant: Option<f64> = None;
        let mut null_mass = 0.0f64;
        for c in 0..varpi.len() {
            if null(c) {
                null_mass = null_mass.max(varpi[c].abs());
            } else {
                let bound = lam[c].powf(1.0 / r) * lam_conj[c].powf(1.0 / r_conj);
                let ratio = varpi[c].abs() / bound;
                constant = Some(constant.map_or(ratio, |m: f64| m.max(ratio)));
            }
        }
        let c = constant.unwrap_or(0.0);
        let excess = (0..varpi.len())
            .map(|i| {
                let bound = if null(i) { 0.0 } else { c * lam[i].powf(1.0 / r) * lam_conj[i].powf(1.0 / r_conj) };
                varpi[i].abs() - bound
            })
            .fold(f64::NEG_INFINITY, f64::max);
        report.verdicts.push(Check::at_most(
            format!("cell_bound[{}]", q.name()),
            excess,
            zero_tol,
            format!("largest |ϖ| − C λ^1/r λ'^1/r' over cells with C = {c:.6}"),
        ));
        report.verdicts.push(Check::info(format!("constant[{}]", q.name()), c, "one constant per run"));
        report.verdicts.push(Check::info(format!("total_mass[{}]", q.name()), total_mass, "Σ|ϖ| over cells"));
        let rows = schedule
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| {
                let defects = &defects[k];
                let varpi = &varpi;
                (0..varpi.len()).map(move |c| TableRow {
                    n,
                    test_id: c,
                    value: defects[i][c],
                    residual: (defects[i][c] - varpi[c]).abs(),
                })
            })
            .collect();
        report.tables.push(ConvergenceTable { name: q.name().into(), rows, slopes: Vec::new() });
        records.push(QuadraticRecord {
            quadratic: *q,
            cells: varpi,
            constant,
            null_cell_mass: null_mass,
        });
    }
    report.extra("quadratic", records);
    report.extra("lambda", lam);
    report.extra("lambda_conjugate", lam_conj);
    report.extra("exponents", serde_json::json!({ "r": r, "r_conjugate": r_conj }));
    Ok(report)
}
