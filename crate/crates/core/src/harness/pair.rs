//! Shared pipeline of the wedge-type experiments.
//!
//! For two factor sequences it measures the hypothesis residuals, estimates
//! the limit measures `μ`, `ν` and their common atoms, pairs `α^n ∧ β^n`
//! against a basis of test forms centred at the atoms and at fixed points,
//! extrapolates to `n → ∞`, and fits the defect `Σ d(v^k δ_{x^k})` to the gap
//! between the limit and the classical product.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::extrapolate::{loglog_slope, richardson, Extrapolation};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::defect::{bound_constant, euclidean_norm, fit_atoms, spread};
use crate::harness::tests_basis::{build_basis, TestForm};
use crate::harness::weak_weak::WeakWedge;
use crate::harness::{AtomRecord, AtomSample, Check, ConvergenceTable, ExperimentReport, TableRow};
use crate::multi_index::{binomial, index_position, merge_indices, multi_indices};
use crate::sequence::{defect_density, estimate_measure, local_mass, DetectedAtom, RadonMeasureEstimate};

/// Strong convergence required of `dω^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hypothesis {
    /// `dω^n → dω̄` in `W^{-1,r}`.
    NegSobolev(f64),
    /// `dω^n → dω̄` in `L^r`.
    Lebesgue(f64),
    /// No condition on `dω^n` (weak-⋆ measure convergence only).
    Unchecked,
}

impl Hypothesis {
    fn label(&self) -> String {
        match self {
            Hypothesis::NegSobolev(r) => format!("W^-1,{r:.6}"),
            Hypothesis::Lebesgue(r) => format!("L^{r:.6}"),
            Hypothesis::Unchecked => "none".into(),
        }
    }
}

pub type MemberFn<'a> = Box<dyn Fn(usize) -> Result<Form> + Send + Sync + 'a>;

pub struct Factor<'a> {
    pub label: String,
    pub member: MemberFn<'a>,
    /// Absolutely continuous part of the weak limit.
    pub limit: Form,
    /// Atoms `(coefficients, location)` of the weak limit.
    pub singular: Vec<(Vec<f64>, Vec<f64>)>,
    /// Exponent of the defect density `|ω^n − ω̄|^e`.
    pub measure_exponent: f64,
    pub hypothesis: Hypothesis,
}

impl<'a> Factor<'a> {
    pub fn from_spec(
        label: &str,
        spec: &'a FactorSpec,
        grid: &'a TorusGrid,
        measure_exponent: f64,
        hypothesis: Hypothesis,
    ) -> Result<Self> {
        Ok(Factor {
            label: label.to_string(),
            member: Box::new(move |n| spec.member(grid, n)),
            limit: spec.limit(grid)?,
            singular: spec.singular(),
            measure_exponent,
            hypothesis,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PairSettings {
    pub schedule: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub radii: (f64, f64),
    pub cells: usize,
    /// Powers `(a, b)` of `μ^a ν^b` in the atom bound.
    pub bound_powers: (f64, f64),
    pub tolerance: f64,
    pub relative_tolerance: f64,
    pub certify_slope: f64,
    pub stability: f64,
}

impl PairSettings {
    pub fn from_settings(s: &Settings, bound_powers: (f64, f64)) -> Result<Self> {
        Ok(PairSettings {
            schedule: s.usize_list("run.schedule")?,
            centers: s.points("tests.centers")?,
            radii: (s.f64("tests.plateau")?, s.f64("tests.support")?),
            cells: s.usize("run.cells")?,
            bound_powers,
            tolerance: s.f64("tolerances.conclusion")?,
            relative_tolerance: s.f64("tolerances.relative")?,
            certify_slope: s.f64("tolerances.certify_slope")?,
            stability: s.f64("tolerances.stability")?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisRecord {
    pub factor: String,
    pub norm: String,
    pub ns: Vec<usize>,
    pub residuals: Vec<f64>,
    pub slope: Option<f64>,
    pub at_floor: bool,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleRecord {
    pub values: Vec<f64>,
    pub limit: Extrapolation,
    pub classical: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureSummary {
    pub total_mass: f64,
    pub diffuse_mass: f64,
    pub atoms: Vec<DetectedAtom>,
}

impl From<&RadonMeasureEstimate> for MeasureSummary {
    fn from(m: &RadonMeasureEstimate) -> Self {
        MeasureSummary {
            total_mass: m.total_mass,
            diffuse_mass: m.diffuse_mass,
            atoms: m.atoms.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PairOutcome {
    pub degree: usize,
    pub tests: Vec<TestForm>,
    pub table: ConvergenceTable,
    pub classical: Vec<f64>,
    pub limits: Vec<Extrapolation>,
    pub gaps: Vec<f64>,
    pub model: Vec<f64>,
    pub conclusion_residual: f64,
    pub peak_response: f64,
    pub atoms: Vec<AtomRecord>,
    pub hypotheses: Vec<HypothesisRecord>,
    pub mu: MeasureSummary,
    pub nu: MeasureSummary,
    pub cycle: Option<CycleRecord>,
}

impl PairOutcome {
    pub fn certified(&self) -> bool {
        self.hypotheses.iter().all(|h| h.certified)
    }
}

/// Coefficients of `a ∧ b` for constant forms given by their components.
pub fn wedge_coefficients(dim: usize, d1: usize, a: &[f64], d2: usize, b: &[f64]) -> Result<Vec<f64>> {
    if d1 + d2 > dim {
        return Err(HodgeError::Degree(format!("wedge of degrees {d1} and {d2} exceeds dimension {dim}")));
    }
    let left = multi_indices(dim, d1)?;
    let right = multi_indices(dim, d2)?;
    let mut out = vec![0.0; binomial(dim, d1 + d2)];
    for (i, li) in left.iter().enumerate() {
        for (j, rj) in right.iter().enumerate() {
            if let (s, Some(k)) = merge_indices(li, rj) {
                out[index_position(dim, &k)] += s as f64 * a[i] * b[j];
            }
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual of `dω^n − dω̄` in the norm named by the hypothesis.
pub fn hypothesis_residual(member: &Form, limit: &Form, hypothesis: Hypothesis) -> Result<Option<f64>> {
    if hypothesis == Hypothesis::Unchecked {
        return Ok(None);
    }
    if member.degree() == member.dim() {
        return Ok(Some(0.0));
    }
    let d = member.sub(limit)?.exterior_derivative()?;
    Ok(Some(match hypothesis {
        Hypothesis::NegSobolev(r) => d.neg_sobolev_norm(r)?,
        Hypothesis::Lebesgue(r) => d.lp_norm(r)?,
        Hypothesis::Unchecked => unreachable!(),
    }))
}

/// Relative level below which a residual counts as round-off.
const RESIDUAL_FLOOR: f64 = 1e-9;

/// Certifies decay: every residual at the floor, or a log-log slope at most `max_slope`.
pub fn certify(
    factor: &str,
    hypothesis: Hypothesis,
    ns: &[usize],
    residuals: &[f64],
    scales: &[f64],
    max_slope: f64,
) -> HypothesisRecord {
    let floor = scales.iter().fold(1.0f64, |a, &s| a.max(s)) * RESIDUAL_FLOOR;
    let at_floor = residuals.iter().all(|&r| r <= floor);
    let slope = loglog_slope(ns, residuals, floor);
    let certified = match hypothesis {
        Hypothesis::Unchecked => true,
        _ => at_floor || slope.is_none_or(|s| s <= max_slope),
    };
    HypothesisRecord {
        factor: factor.to_string(),
        norm: hypothesis.label(),
        ns: ns.to_vec(),
        residuals: residuals.to_vec(),
        slope,
        at_floor,
        certified,
    }
}

/// Ball radius `1.5/n` for per-`n` atom masses, so critically scaled profiles
/// keep the same fraction of their mass at every `n`.
fn atom_radius(grid: &TorusGrid, n: usize) -> f64 {
    let period = grid.periods().iter().cloned().fold(f64::INFINITY, f64::min);
    let spacing = (0..grid.dim()).map(|a| grid.spacing(a)).fold(0.0, f64::max);
    (1.5 / n as f64).min(0.45 * period).max(3.0 * spacing)
}

/// Atoms of `μ` that have a partner atom of `ν` within one coarse cell.
fn common_atoms(grid: &TorusGrid, mu: &RadonMeasureEstimate, nu: &RadonMeasureEstimate, width: f64) -> Vec<Vec<f64>> {
    mu.atoms
        .iter()
        .filter(|a| {
            nu.atoms.iter().any(|b| {
                (0..grid.dim()).all(|i| grid.periodic_delta(i, a.location[i], b.location[i]).abs() < width)
            })
        })
        .map(|a| a.location.clone())
        .collect()
}

pub fn run_pair(grid: &TorusGrid, alpha: &Factor, beta: &Factor, ps: &PairSettings) -> Result<PairOutcome> {
    let dim = grid.dim();
    let (d1, d2) = (alpha.limit.degree(), beta.limit.degree());
    let degree = d1 + d2;
    if degree > dim {
        return Err(HodgeError::Degree(format!("wedge of degrees {d1} and {d2} exceeds dimension {dim}")));
    }
    let schedule = &ps.schedule;
    if schedule.len() < 2 {
        return Err(HodgeError::Config("the n schedule needs at least two entries".into()));
    }
    if ps.cells == 0 || grid.resolutions().iter().any(|&r| r % ps.cells != 0) {
        return Err(HodgeError::Config(format!("{} cells per axis do not divide the grid", ps.cells)));
    }
    for &n in schedule {
        crate::sequence::check_resolution(grid, n)?;
    }

    // Hypothesis residuals and defect densities. Residuals are compared with
    // the largest derivative the grid can represent to separate round-off.
    let max_wavenumber = (0..dim)
        .map(|a| std::f64::consts::PI * grid.resolutions()[a] as f64 / grid.periods()[a])
        .fold(0.0, f64::max);
    let mut dens = (Vec::new(), Vec::new());
    let mut res = (Vec::new(), Vec::new());
    let mut scales = (Vec::new(), Vec::new());
    for &n in schedule {
        let a = (alpha.member)(n)?;
        let b = (beta.member)(n)?;
        for (f, m, den, r, sc) in [
            (alpha, &a, &mut dens.0, &mut res.0, &mut scales.0),
            (beta, &b, &mut dens.1, &mut res.1, &mut scales.1),
        ] {
            if m.degree() != f.limit.degree() || !m.grid().same_as(grid) {
                return Err(HodgeError::Shape(format!("member n = {n} of {} has the wrong shape", f.label)));
            }
            if let Some(v) = hypothesis_residual(m, &f.limit, f.hypothesis)? {
                r.push(v);
            }
            sc.push(m.sub(&f.limit)?.l2_norm() * max_wavenumber);
            den.push(defect_density(m, &f.limit, f.measure_exponent)?);
        }
    }
    let mut hypotheses = Vec::new();
    for (f, r, sc) in [(alpha, &res.0, &scales.0), (beta, &res.1, &scales.1)] {
        if f.hypothesis != Hypothesis::Unchecked {
            hypotheses.push(certify(&f.label, f.hypothesis, schedule, r, sc, ps.certify_slope));
        }
    }

    // Limit measures and their common atoms.
    let m = schedule.len();
    let (n_prev, n_last) = (schedule[m - 2], schedule[m - 1]);
    let mu = estimate_measure(grid, &dens.0[m - 2], n_prev, &dens.0[m - 1], n_last, ps.cells);
    let nu = estimate_measure(grid, &dens.1[m - 2], n_prev, &dens.1[m - 1], n_last, ps.cells);
    let width = grid.periods().iter().cloned().fold(f64::INFINITY, f64::min) / ps.cells as f64;
    let locations = if degree > 0 { common_atoms(grid, &mu, &nu, width) } else { Vec::new() };

    let centers: Vec<Vec<f64>> = locations.iter().chain(&ps.centers).cloned().collect();
    let tests = build_basis(dim, degree, &centers, ps.radii)?;

    // Classical value of every test: ∫⟨ᾱ ∧ β̄, Ξ⟩ plus the atoms of the limits.
    let classical_form = alpha.limit.wedge(&beta.limit)?;
    let mut point_terms: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (v, x) in &alpha.singular {
        let b = beta.limit.evaluate_at(x)?;
        point_terms.push((wedge_coefficients(dim, d1, v, d2, &b)?, x.clone()));
    }
    for (v, x) in &beta.singular {
        let a = alpha.limit.evaluate_at(x)?;
        point_terms.push((wedge_coefficients(dim, d1, &a, d2, v)?, x.clone()));
    }
    let classical: Vec<f64> = tests
        .par_iter()
        .map(|t| {
            let smooth = classical_form.l2_inner(&t.form(grid)?)?;
            let points: f64 = point_terms.iter().map(|(c, x)| dot(c, &t.value_at(grid, x))).sum();
            Ok(smooth + points)
        })
        .collect::<Result<_>>()?;

    // Pairings of the weak-weak record over the schedule.
    let mut values = vec![Vec::with_capacity(m); tests.len()];
    let mut cycle_values = Vec::new();
    for &n in schedule {
        let record = WeakWedge::new(&(alpha.member)(n)?, &(beta.member)(n)?)?;
        let row: Vec<f64> = tests
            .par_iter()
            .map(|t| {
                let xi = t.form(grid)?;
                let ds = match record.potential() {
                    Some(_) => Some(t.codifferential_form(grid)?),
                    None => None,
                };
                record.pair(&xi, ds.as_ref())
            })
            .collect::<Result<_>>()?;
        for (col, v) in values.iter_mut().zip(row) {
            col.push(v);
        }
        if degree == dim {
            // The exact term integrates to zero against the fundamental cycle.
            cycle_values.push(record.regular().component_integrals()[0]);
        }
    }
    let limits: Vec<Extrapolation> = values.iter().map(|v| richardson(schedule, v)).collect();
    let gaps: Vec<f64> = limits.iter().zip(&classical).map(|(l, c)| l.value - c).collect();

    let fit = if locations.is_empty() {
        None
    } else {
        Some(fit_atoms(grid, &tests, &gaps, &locations)?)
    };
    let model = fit.as_ref().map_or(vec![0.0; tests.len()], |f| f.model.clone());
    let conclusion_residual = gaps.iter().zip(&model).fold(0.0f64, |a, (g, m)| a.max((g - m).abs()));
    let peak_response = model.iter().fold(0.0f64, |a, m| a.max(m.abs()));

    // Per-n coefficients and masses around every atom.
    let mut atoms = Vec::new();
    if let Some(fit) = &fit {
        let mut samples: Vec<Vec<AtomSample>> = vec![Vec::new(); locations.len()];
        for (i, &n) in schedule.iter().enumerate() {
            let gaps_n: Vec<f64> = values.iter().zip(&classical).map(|(v, c)| v[i] - c).collect();
            let fit_n = fit_atoms(grid, &tests, &gaps_n, &locations)?;
            let radius = atom_radius(grid, n);
            for (k, x) in locations.iter().enumerate() {
                let mu_mass = local_mass(grid, &dens.0[i], x, radius, true);
                let nu_mass = local_mass(grid, &dens.1[i], x, radius, true);
                let v = fit_n.coefficients[k].clone();
                samples[k].push(AtomSample {
                    n,
                    bound_constant: bound_constant(&v, mu_mass, nu_mass, ps.bound_powers),
                    v,
                    mu_mass,
                    nu_mass,
                });
            }
        }
        for (k, x) in locations.iter().enumerate() {
            let last = samples[k].last().expect("non-empty schedule");
            let v = fit.coefficients[k].clone();
            let constants: Vec<f64> = samples[k].iter().filter_map(|s| s.bound_constant).collect();
            atoms.push(AtomRecord {
                location: x.clone(),
                magnitude: euclidean_norm(&v),
                bound_constant: bound_constant(&v, last.mu_mass, last.nu_mass, ps.bound_powers),
                bound_spread: spread(&constants),
                mu_mass: last.mu_mass,
                nu_mass: last.nu_mass,
                v,
                per_n: std::mem::take(&mut samples[k]),
            });
        }
    }

    let mut rows = Vec::new();
    for (i, &n) in schedule.iter().enumerate() {
        for (j, v) in values.iter().enumerate() {
            rows.push(TableRow {
                n,
                test_id: j,
                value: v[i],
                residual: (v[i] - limits[j].value).abs(),
            });
        }
    }
    let slopes = values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let dist: Vec<f64> = v.iter().map(|x| x - classical[j] - model[j]).collect();
            let scale = v.iter().fold(1.0f64, |a, x| a.max(x.abs()));
            loglog_slope(schedule, &dist, 1e-12 * scale)
        })
        .collect();

    let cycle = (degree == dim).then(|| CycleRecord {
        limit: richardson(schedule, &cycle_values),
        classical: classical_form.component_integrals()[0]
            + point_terms.iter().map(|(c, _)| c[0]).sum::<f64>(),
        values: cycle_values,
    });

    Ok(PairOutcome {
        degree,
        tests,
        table: ConvergenceTable {
            name: "pairings".into(),
            rows,
            slopes,
        },
        classical,
        limits,
        gaps,
        model,
        conclusion_residual,
        peak_response,
        atoms,
        hypotheses,
        mu: (&mu).into(),
        nu: (&nu).into(),
        cycle,
    })
}

/// Checks shared by the wedge-type experiments, added to `report` with the outcome.
pub fn record_outcome(report: &mut ExperimentReport, outcome: &PairOutcome, ps: &PairSettings) {
    for h in &outcome.hypotheses {
        if !h.certified {
            report.warnings.push(format!(
                "HypothesisWarning: d{} residuals in {} do not decay (slope {})",
                h.factor,
                h.norm,
                h.slope.map_or("n/a".into(), |s| format!("{s:.3}"))
            ));
        }
    }
    let threshold = ps.tolerance + ps.relative_tolerance * outcome.peak_response;
    let detail = format!(
        "max over tests of |limit − classical − Σ⟨v, d*Ξ(x)⟩| with {} atom(s)",
        outcome.atoms.len()
    );
    report.verdicts.push(if outcome.certified() {
        Check::at_most("conclusion", outcome.conclusion_residual, threshold, detail)
    } else {
        Check::info("conclusion", outcome.conclusion_residual, format!("{detail}; not asserted, hypotheses uncertified"))
    });
    for (k, a) in outcome.atoms.iter().enumerate() {
        let name = format!("bound_stability[{k}]");
        report.verdicts.push(match a.bound_spread {
            Some(s) => Check::at_most(name, s, ps.stability, "max/min of per-n bound constants"),
            None => Check::info(name, f64::NAN, "no finite bound constants"),
        });
    }
    report.tables.push(outcome.table.clone());
    report.atoms.extend(outcome.atoms.iter().cloned());
    report.extra("tests", &outcome.tests);
    report.extra("classical", &outcome.classical);
    report.extra("limits", &outcome.limits);
    report.extra("gaps", &outcome.gaps);
    report.extra("hypotheses", &outcome.hypotheses);
    report.extra("mu", &outcome.mu);
    report.extra("nu", &outcome.nu);
    if let Some(c) = &outcome.cycle {
        report.extra("cycle", c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_wedge_coefficients() {
        let w = wedge_coefficients(2, 1, &[0.5, 0.0], 1, &[0.0, 1.0]).unwrap();
        assert_eq!(w, vec![0.5]);
        let w = wedge_coefficients(3, 1, &[1.0, 0.0, 0.0], 1, &[0.0, 2.0, 3.0]).unwrap();
        assert_eq!(w, vec![2.0, 3.0, 0.0]);
        assert!(wedge_coefficients(2, 2, &[1.0], 1, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn certification_rules() {
        let ns = [4, 8, 16];
        let decaying = certify("a", Hypothesis::NegSobolev(2.0), &ns, &[1.0, 0.5, 0.25], &[1.0; 3], -0.5);
        assert!(decaying.certified && !decaying.at_floor);
        let flat = certify("a", Hypothesis::NegSobolev(2.0), &ns, &[1.0, 1.0, 1.0], &[1.0; 3], -0.5);
        assert!(!flat.certified);
        let floor = certify("a", Hypothesis::Lebesgue(2.0), &ns, &[1e-14, 2e-14, 1e-14], &[1.0; 3], -0.5);
        assert!(floor.certified && floor.at_floor);
    }
}
