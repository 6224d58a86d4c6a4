//! Structural equations `dΩ + Ω ∧ Ω = 0` of surfaces in `ℝ⁴`, and their
//! weak continuity along oscillating families of second fundamental forms.
//!
//! The baseline is the Clifford torus `x ↦ (cos 2πx₁, sin 2πx₁, cos 2πx₂, sin 2πx₂)/2π`,
//! which is flat with `II¹₁₁ = II²₂₂ = −2π` and all other entries zero. Families
//! add Hessians of oscillating potentials, which only move the exact parts.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use crate::error::{HodgeError, Result};
use crate::extrapolate::{loglog_slope, richardson};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::weak_weak::WeakWedge;
use crate::harness::{Check, ConvergenceTable, ExperimentReport, Settings, TableRow};
use crate::hodge::coexact_projection;

/// Codimension of the Clifford torus in `ℝ⁴`.
pub const CODIMENSION: usize = 2;

/// `2N/(N + 1)`, below which the structural equation is not weakly continuous.
pub fn critical_exponent(dim: usize) -> f64 {
    2.0 * dim as f64 / (dim as f64 + 1.0)
}

/// Refuses `p ≤ 2N/(N + 1)` unless overridden.
pub fn gate(p: f64, dim: usize, override_gate: bool) -> Result<()> {
    let critical = critical_exponent(dim);
    if p <= critical && !override_gate {
        return Err(HodgeError::Gate { p, critical });
    }
    Ok(())
}

/// Symmetric `II^a_{ij}` stored as `(11, 12, 22)` per normal direction.
#[derive(Clone, Debug)]
pub struct SecondFundamentalForm {
    grid: TorusGrid,
    entries: Vec<[Vec<f64>; 3]>,
}

fn slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (0, 1) => 1,
        (1, 1) => 2,
        _ => panic!("surface indices are 0 or 1"),
    }
}

impl SecondFundamentalForm {
    pub fn new(grid: &TorusGrid, entries: Vec<[Vec<f64>; 3]>) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(HodgeError::Shape("second fundamental forms live on T²".into()));
        }
        if entries.iter().flatten().any(|e| e.len() != grid.len()) {
            return Err(HodgeError::Shape("entry length does not match the grid".into()));
        }
        Ok(SecondFundamentalForm { grid: grid.clone(), entries })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn codimension(&self) -> usize {
        self.entries.len()
    }

    /// `II^a_{ij}`; symmetric by construction.
    pub fn component(&self, a: usize, i: usize, j: usize) -> &[f64] {
        &self.entries[a][slot(i, j)]
    }

    /// The 1-form `Σ_k II^a_{jk} dx^k`.
    pub fn row_form(&self, a: usize, j: usize) -> Result<Form> {
        Form::from_components(
            &self.grid,
            1,
            vec![self.component(a, j, 0).to_vec(), self.component(a, j, 1).to_vec()],
        )
    }

    /// Adds `Hess φ` to direction `a`.
    pub fn add_hessian(&self, a: usize, hessian: [Vec<f64>; 3]) -> Result<Self> {
        let mut out = self.clone();
        for (e, h) in out.entries[a].iter_mut().zip(hessian) {
            if h.len() != e.len() {
                return Err(HodgeError::Shape("Hessian entry length does not match the grid".into()));
            }
            e.iter_mut().zip(h).for_each(|(x, y)| *x += y);
        }
        Ok(out)
    }
}

/// Antisymmetric matrix of 1-forms.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    entries: Vec<Vec<Form>>,
}

impl ConnectionForm {
    pub fn new(entries: Vec<Vec<Form>>) -> Result<Self> {
        let size = entries.len();
        if size == 0 || entries.iter().any(|r| r.len() != size) {
            return Err(HodgeError::Shape("connection form must be a square matrix".into()));
        }
        let grid = entries[0][0].grid().clone();
        for i in 0..size {
            for j in 0..size {
                let e = &entries[i][j];
                if e.degree() != 1 || !e.grid().same_as(&grid) {
                    return Err(HodgeError::Shape("connection entries must be 1-forms on one grid".into()));
                }
                let sum = e.add(&entries[j][i])?.max_abs();
                if sum != 0.0 {
                    return Err(HodgeError::Shape(format!("entries ({i},{j}) and ({j},{i}) are not opposite")));
                }
            }
        }
        Ok(ConnectionForm { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Form {
        &self.entries[i][j]
    }

    pub fn scale(&self, t: f64) -> Self {
        ConnectionForm {
            entries: self.entries.iter().map(|r| r.iter().map(|e| e.scale(t)).collect()).collect(),
        }
    }

    /// `(Ω ∧ Ω)_{ij} = Σ_k Ω_{ik} ∧ Ω_{kj}`, each product through the weak-weak record.
    pub fn wedge_square(&self) -> Result<Vec<Vec<Form>>> {
        let size = self.size();
        let grid = self.entries[0][0].grid().clone();
        let mut out = Vec::with_capacity(size);
        for i in 0..size {
            let mut row = Vec::with_capacity(size);
            for j in 0..size {
                let mut acc = Form::zeros(&grid, 2)?;
                for k in 0..size {
                    let (a, b) = (&self.entries[i][k], &self.entries[k][j]);
                    if a.max_abs() == 0.0 || b.max_abs() == 0.0 {
                        continue;
                    }
                    acc = acc.add(&WeakWedge::new(a, b)?.to_form()?)?;
                }
                row.push(acc);
            }
            out.push(row);
        }
        Ok(out)
    }

    /// `dΩ + Ω ∧ Ω` entrywise.
    pub fn structural_form(&self) -> Result<Vec<Vec<Form>>> {
        let square = self.wedge_square()?;
        self.entries
            .iter()
            .zip(square)
            .map(|(row, sq)| {
                row.iter()
                    .zip(sq)
                    .map(|(e, s)| e.exterior_derivative()?.add(&s))
                    .collect()
            })
            .collect()
    }
}

/// `Σ_{ij} ‖(dΩ + Ω ∧ Ω)_{ij}‖_{W^{-1,p}}`.
pub fn structural_residual(omega: &ConnectionForm, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for row in omega.structural_form()? {
        for e in row {
            total += e.neg_sobolev_norm(p)?;
        }
    }
    Ok(total)
}

/// Cartan connection of an immersion with flat tangential block:
/// `Ω_{2+a, j} = Σ_k II^a_{jk} dx^k`, `Ω_{j, 2+a} = −Ω_{2+a, j}`, and the
/// normal block given by `normal_connection`.
pub fn assemble_connection(ii: &SecondFundamentalForm, normal_connection: &[Vec<Form>]) -> Result<ConnectionForm> {
    let k = ii.codimension();
    if normal_connection.len() != k || normal_connection.iter().any(|r| r.len() != k) {
        return Err(HodgeError::Shape(format!("normal connection must be {k}×{k}")));
    }
    let grid = ii.grid();
    let size = 2 + k;
    let zero = Form::zeros(grid, 1)?;
    let mut entries = vec![vec![zero; size]; size];
    for a in 0..k {
        for j in 0..2 {
            let row = ii.row_form(a, j)?;
            entries[j][2 + a] = row.scale(-1.0);
            entries[2 + a][j] = row;
        }
        for b in 0..k {
            let e = &normal_connection[a][b];
            if e.degree() != 1 || !e.grid().same_as(grid) {
                return Err(HodgeError::Shape("normal connection entries must be 1-forms on the grid".into()));
            }
            entries[2 + a][2 + b] = e.clone();
        }
    }
    ConnectionForm::new(entries)
}

/// Constant antisymmetric normal connection `Ω_{34} = c₁dx₁ + c₂dx₂`.
pub fn constant_normal_connection(grid: &TorusGrid, coefficients: &[f64; 2]) -> Result<Vec<Vec<Form>>> {
    let w = Form::constant(grid, 1, coefficients)?;
    let zero = Form::zeros(grid, 1)?;
    Ok(vec![vec![zero.clone(), w.scale(-1.0)], vec![w, zero]])
}

pub fn clifford_second_fundamental_form(grid: &TorusGrid) -> Result<SecondFundamentalForm> {
    let c = vec![-2.0 * PI; grid.len()];
    let z = vec![0.0; grid.len()];
    SecondFundamentalForm::new(grid, vec![[c.clone(), z.clone(), z.clone()], [z.clone(), z, c]])
}

pub fn clifford_baseline(grid: &TorusGrid) -> Result<(SecondFundamentalForm, ConnectionForm)> {
    let ii = clifford_second_fundamental_form(grid)?;
    let omega = assemble_connection(&ii, &constant_normal_connection(grid, &[0.0, 0.0])?)?;
    Ok((ii, omega))
}

/// `Hess φ` for `φ = A/(2πn)² sin(2πn ξ·x)`, i.e. `−A sin(2πn ξ·x) ξ ξᵀ`.
pub fn oscillating_hessian(grid: &TorusGrid, amplitude: f64, xi: [f64; 2], n: usize) -> [Vec<f64>; 3] {
    let nf = n as f64;
    let s: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            -amplitude * (2.0 * PI * nf * (xi[0] * x[0] + xi[1] * x[1])).sin()
        })
        .collect();
    let scaled = |c: f64| s.iter().map(|v| c * v).collect::<Vec<f64>>();
    [scaled(xi[0] * xi[0]), scaled(xi[0] * xi[1]), scaled(xi[1] * xi[1])]
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub amplitudes: Vec<f64>,
    pub directions: Vec<[f64; 2]>,
    pub normal_connection: [f64; 2],
}

/// Clifford second fundamental form plus one oscillating Hessian per normal direction.
pub fn family_member(grid: &TorusGrid, spec: &FamilySpec, n: usize) -> Result<ConnectionForm> {
    let mut ii = clifford_second_fundamental_form(grid)?;
    for (a, (&amp, &xi)) in spec.amplitudes.iter().zip(&spec.directions).enumerate() {
        ii = ii.add_hessian(a, oscillating_hessian(grid, amp, xi, n))?;
    }
    assemble_connection(&ii, &constant_normal_connection(grid, &spec.normal_connection)?)
}

pub fn family_limit(grid: &TorusGrid, spec: &FamilySpec) -> Result<ConnectionForm> {
    let ii = clifford_second_fundamental_form(grid)?;
    assemble_connection(&ii, &constant_normal_connection(grid, &spec.normal_connection)?)
}

/// Largest `L^{p′}` distance between the coexact parts of the second
/// fundamental form rows of `omega` and of `reference`.
pub fn coexact_drift(omega: &ConnectionForm, reference: &ConnectionForm, p_conj: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in 0..CODIMENSION {
        for j in 0..2 {
            let x = coexact_projection(omega.entry(2 + a, j))?;
            let y = coexact_projection(reference.entry(2 + a, j))?;
            worst = worst.max(x.sub(&y)?.lp_norm(p_conj)?);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualSeries {
    pub resolution: Vec<usize>,
    pub ns: Vec<usize>,
    pub member: Vec<f64>,
    pub slope: Option<f64>,
    pub limit: f64,
    pub limit_error: f64,
    pub baseline: f64,
    pub coexact_drift: f64,
}

fn residual_series(grid: &TorusGrid, spec: &FamilySpec, schedule: &[usize], p: f64) -> Result<ResidualSeries> {
    let reference = family_limit(grid, spec)?;
    let p_conj = p / (p - 1.0);
    let mut member = Vec::new();
    let mut drift = 0.0f64;
    for &n in schedule {
        crate::sequence::check_resolution(grid, n)?;
        let omega = family_member(grid, spec, n)?;
        member.push(structural_residual(&omega, p)?);
        drift = drift.max(coexact_drift(&omega, &reference, p_conj)?);
    }
    let (_, baseline) = clifford_baseline(grid)?;
    let extrapolation = richardson(schedule, &member);
    Ok(ResidualSeries {
        resolution: grid.resolutions().to_vec(),
        ns: schedule.to_vec(),
        slope: loglog_slope(schedule, &member, 1e-12),
        limit: extrapolation.value.abs(),
        limit_error: extrapolation.error,
        baseline: structural_residual(&baseline, p)?,
        coexact_drift: drift,
        member,
    })
}

fn parse_directions(s: &Settings) -> Result<Vec<[f64; 2]>> {
    s.points("immersion.directions")?
        .into_iter()
        .map(|d| {
            <[f64; 2]>::try_from(d).map_err(|_| HodgeError::Config("directions are 2-vectors".into()))
        })
        .collect()
}

pub fn family_from_settings(s: &Settings) -> Result<FamilySpec> {
    let amplitudes = s.f64_list("immersion.amplitudes")?;
    let directions = parse_directions(s)?;
    if amplitudes.len() != CODIMENSION || directions.len() != CODIMENSION {
        return Err(HodgeError::Config(format!(
            "immersion needs {CODIMENSION} amplitudes and directions"
        )));
    }
    let nc = s.f64_list("immersion.normal_connection")?;
    let normal_connection = match nc.as_slice() {
        [c] => [*c, *c],
        [a, b] => [*a, *b],
        _ => return Err(HodgeError::Config("normal_connection takes one or two values".into())),
    };
    Ok(FamilySpec { amplitudes, directions, normal_connection })
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let grid = s.grid()?;
    if grid.dim() != 2 {
        return Err(HodgeError::Config("the immersion lab runs on T²".into()));
    }
    let p = s.f64("exponents.p")?;
    crate::form::check_exponent(p, false)?;
    let override_gate = s.bool("immersion.override_gate")?;
    gate(p, grid.dim(), override_gate)?;
    let spec = family_from_settings(s)?;
    let schedule = s.usize_list("run.schedule")?;
    let refinement = s.usize("immersion.oracle_refinement")?;

    let base = residual_series(&grid, &spec, &schedule, p)?;
    let oracle = residual_series(&grid.refined(refinement)?, &spec, &schedule, p)?;

    let mut report = ExperimentReport::new("immersion", s);
    let critical = critical_exponent(grid.dim());
    let probe = 1.2;
    report.extra(
        "gate",
        json!({
            "p": p,
            "critical": critical,
            "status": if p <= critical { "EXPONENT_OUT_OF_RANGE" } else { "OK" },
            "overridden": override_gate && p <= critical,
            "probe": { "p": probe, "refused": gate(probe, grid.dim(), false).is_err() },
        }),
    );
    if p <= critical {
        report
            .warnings
            .push(format!("EXPONENT_OUT_OF_RANGE: p = {p} ≤ {critical}, gate overridden"));
    }
    let tol_base = s.f64("tolerances.baseline")?;
    let tol_limit = s.f64("tolerances.limit")?;
    let tol_drift = s.f64("tolerances.drift")?;
    let baseline = base.baseline.max(oracle.baseline);
    report.verdicts.push(Check::at_most("baseline", baseline, tol_base, "Clifford residual at both resolutions"));
    report.verdicts.push(Check::at_most(
        "coexact_drift",
        base.coexact_drift.max(oracle.coexact_drift),
        tol_drift,
        "L^p' distance of coexact parts from the limit",
    ));
    report.verdicts.push(Check::at_most(
        "member_decay",
        base.slope.unwrap_or(f64::NEG_INFINITY),
        -0.5,
        "log-log slope of member residuals",
    ));
    report.verdicts.push(Check::at_most("limit_residual", base.limit, tol_limit, "extrapolated residual"));
    report.verdicts.push(Check::at_most(
        "oracle_agreement",
        (base.limit - oracle.limit).abs(),
        tol_limit,
        format!("against the {refinement}× refined grid"),
    ));
    report.tables.push(ConvergenceTable {
        name: "member_residuals".into(),
        rows: base
            .ns
            .iter()
            .zip(&base.member)
            .map(|(&n, &r)| TableRow { n, test_id: 0, value: r, residual: (r - base.limit).abs() })
            .collect(),
        slopes: vec![base.slope],
    });
    report.extra("coexact_drift", base.coexact_drift.max(oracle.coexact_drift));
    report.extra("residuals", json!({ "base": base, "oracle": oracle }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(size: usize, i: usize, j: usize, angle: f64) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; size]; size];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        let (s, c) = angle.sin_cos();
        m[i][i] = c;
        m[j][j] = c;
        m[i][j] = -s;
        m[j][i] = s;
        m
    }

    fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
            .collect()
    }

    /// `Ω = g⁻¹dg` for a periodic rotation field `g`, a Maurer–Cartan solution.
    fn maurer_cartan(grid: &TorusGrid) -> ConnectionForm {
        let size = 4;
        let fields: Vec<Vec<f64>> = (0..grid.len())
            .map(|i| {
                let x = grid.point(i);
                let g = matmul(
                    &matmul(&rotation(size, 0, 1, 2.0 * PI * x[0]), &rotation(size, 2, 3, 2.0 * PI * x[1])),
                    &rotation(size, 0, 2, 0.7 * (2.0 * PI * x[1]).sin()),
                );
                g.into_iter().flatten().collect()
            })
            .collect();
        let entry = |a: usize, b: usize| -> Form {
            Form::from_components(grid, 0, vec![fields.iter().map(|g| g[a * size + b]).collect()]).unwrap()
        };
        let g: Vec<Vec<Form>> = (0..size).map(|a| (0..size).map(|b| entry(a, b)).collect()).collect();
        let dg: Vec<Vec<Form>> = g.iter().map(|r| r.iter().map(|e| e.exterior_derivative().unwrap()).collect()).collect();
        // g⁻¹ = gᵀ for rotations.
        let mut entries = vec![vec![Form::zeros(grid, 1).unwrap(); size]; size];
        for i in 0..size {
            for j in 0..size {
                let mut acc = Form::zeros(grid, 1).unwrap();
                for k in 0..size {
                    acc = acc.add(&dg[k][j].multiply_field(g[k][i].components()[0].as_slice()).unwrap()).unwrap();
                }
                entries[i][j] = acc;
            }
        }
        // Antisymmetrise the round-off so the matrix passes the exact check.
        for i in 0..size {
            for j in 0..size {
                if i < j {
                    let avg = entries[i][j].sub(&entries[j][i]).unwrap().scale(0.5);
                    entries[j][i] = avg.scale(-1.0);
                    entries[i][j] = avg;
                } else if i == j {
                    entries[i][i] = Form::zeros(grid, 1).unwrap();
                }
            }
        }
        ConnectionForm::new(entries).unwrap()
    }

    #[test]
    fn clifford_torus_is_an_exact_solution() {
        for res in [64, 128] {
            let grid = TorusGrid::unit(&[res, res]).unwrap();
            let (ii, omega) = clifford_baseline(&grid).unwrap();
            assert!(structural_residual(&omega, 2.0).unwrap() <= 1e-10);
            assert_eq!(ii.component(0, 0, 1), ii.component(0, 1, 0));
            // Gauss block vanishes identically.
            let s = omega.structural_form().unwrap();
            assert_eq!(s[0][1].max_abs(), 0.0);
            assert_eq!(omega.entry(2, 0).components()[0][0], -2.0 * PI);
            assert_eq!(omega.entry(0, 2).components()[0][0], 2.0 * PI);
        }
    }

    #[test]
    fn zero_data_gives_zero_connection() {
        let grid = TorusGrid::unit(&[16, 16]).unwrap();
        let z = vec![0.0; grid.len()];
        let ii = SecondFundamentalForm::new(&grid, vec![[z.clone(), z.clone(), z.clone()], [z.clone(), z.clone(), z]]).unwrap();
        let omega = assemble_connection(&ii, &constant_normal_connection(&grid, &[0.0, 0.0]).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(omega.entry(i, j).max_abs(), 0.0);
            }
        }
        assert!(assemble_connection(&ii, &[]).is_err());
    }

    #[test]
    fn scaled_exact_solution_residual() {
        let grid = TorusGrid::unit(&[64, 64]).unwrap();
        let omega = maurer_cartan(&grid);
        let exact = structural_residual(&omega, 2.0).unwrap();
        assert!(exact < 1e-9, "Maurer–Cartan residual {exact}");
        let square: f64 = omega
            .wedge_square()
            .unwrap()
            .iter()
            .flatten()
            .map(|e| e.neg_sobolev_norm(2.0).unwrap())
            .sum();
        assert!(square > 1.0);
        for t in [0.5, 2.0, -1.0] {
            let r = structural_residual(&omega.scale(t), 2.0).unwrap();
            let want = (t * t - t).abs() * square;
            assert!((r - want).abs() <= 1e-9 * want.max(1.0), "t = {t}: {r} vs {want}");
        }
    }

    #[test]
    fn random_smooth_connection_has_positive_residual() {
        let grid = TorusGrid::unit(&[32, 32]).unwrap();
        let mut rng = crate::random::seeded_rng(4);
        let mut entries = vec![vec![Form::zeros(&grid, 1).unwrap(); 4]; 4];
        for i in 0..4 {
            for j in i + 1..4 {
                let f = crate::random::random_form(&grid, 1, 3, &mut rng).unwrap();
                entries[j][i] = f.scale(-1.0);
                entries[i][j] = f;
            }
        }
        let omega = ConnectionForm::new(entries).unwrap();
        assert!(structural_residual(&omega, 2.0).unwrap() > 1e-3);
    }

    #[test]
    fn gate_logic() {
        assert!((critical_exponent(2) - 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(gate(1.2, 2, false), Err(HodgeError::Gate { .. })));
        assert!(gate(1.2, 2, true).is_ok());
        assert!(gate(1.5, 2, false).is_ok());
        assert!(gate(4.0 / 3.0, 2, false).is_err());
    }

    #[test]
    fn family_coexact_parts_do_not_move() {
        let grid = TorusGrid::unit(&[64, 64]).unwrap();
        let spec = FamilySpec {
            amplitudes: vec![0.5, 0.25],
            directions: vec![[1.0, 0.0], [1.0, 1.0]],
            normal_connection: [0.0, 0.0],
        };
        let limit = family_limit(&grid, &spec).unwrap();
        for n in [1, 2, 4] {
            let m = family_member(&grid, &spec, n).unwrap();
            assert!(coexact_drift(&m, &limit, 2.0).unwrap() < 1e-10);
        }
    }
}
