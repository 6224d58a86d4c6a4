//! Products of `L ≥ 2` factors, paired off as `(α₁ ∧ … ∧ α_{L−1}) ∧ α_L`.

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::extrapolate::{loglog_slope, richardson};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::bilinear::conjugate;
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::pair::{
    certify, hypothesis_residual, record_outcome, run_pair, Factor, Hypothesis, PairOutcome, PairSettings,
};
use crate::harness::{Check, ConvergenceTable, ExperimentReport, TableRow};
use crate::hodge::exact_projection;

const RANGE_SLACK: f64 = 1e-12;

/// Exponents `q_i = 1/Σ_{j≠i} 1/p_j`, after checking `1 ≤ Σ 1/p_j ≤ 1 + 1/N`.
pub fn complementary_exponents(ps: &[f64], dim: usize) -> Result<Vec<f64>> {
    if ps.len() < 2 {
        return Err(HodgeError::Config("a product needs at least two factors".into()));
    }
    for (i, &p) in ps.iter().enumerate() {
        if !(p > 1.0 && p.is_finite()) {
            return Err(HodgeError::Exponent(format!("p_{} = {p} outside (1, ∞)", i + 1)));
        }
    }
    let sum: f64 = ps.iter().map(|p| 1.0 / p).sum();
    let top = 1.0 + 1.0 / dim as f64;
    if sum < 1.0 - RANGE_SLACK || sum > top + RANGE_SLACK {
        return Err(HodgeError::Exponent(format!("Σ 1/p_i = {sum} outside the critical range [1, {top}]")));
    }
    ps.iter()
        .enumerate()
        .map(|(i, _)| {
            let others: Vec<f64> = ps.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p).collect();
            // A single complementary factor keeps its exponent exactly.
            let q = if others.len() == 1 { others[0] } else { 1.0 / others.iter().map(|p| 1.0 / p).sum::<f64>() };
            if q <= 1.0 {
                return Err(HodgeError::Exponent(format!("complementary exponent q_{} = {q} ≤ 1", i + 1)));
            }
            Ok(q)
        })
        .collect()
}

fn wedge_all<'a>(forms: impl IntoIterator<Item = &'a Form>) -> Result<Form> {
    let mut it = forms.into_iter();
    let mut acc = it.next().expect("at least one factor").clone();
    for f in it {
        acc = acc.wedge(f)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct NoLossRecord {
    pub omitted: usize,
    pub exponent: f64,
    pub values: Vec<f64>,
    pub extrapolated: f64,
    pub limit_value: f64,
    pub converges: bool,
}

/// `‖∧_{j≠k} α_j − ∧_{j≠k} Π^d α_j‖_{L^{p_k′}}` per `n`, against the same quantity for the limits.
fn no_loss(
    grid: &TorusGrid,
    specs: &[FactorSpec],
    ps: &[f64],
    schedule: &[usize],
    tolerance: f64,
) -> Result<Vec<NoLossRecord>> {
    let limits: Vec<Form> = specs.iter().map(|f| f.limit(grid)).collect::<Result<_>>()?;
    let limit_proj: Vec<Form> = limits.iter().map(exact_projection).collect::<Result<_>>()?;
    let mut values = vec![Vec::new(); specs.len()];
    for &n in schedule {
        let members: Vec<Form> = specs.iter().map(|f| f.member(grid, n)).collect::<Result<_>>()?;
        let proj: Vec<Form> = members.iter().map(exact_projection).collect::<Result<_>>()?;
        for (k, col) in values.iter_mut().enumerate() {
            let keep = |v: &[Form]| -> Vec<Form> {
                v.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f.clone()).collect()
            };
            let diff = wedge_all(&keep(&members))?.sub(&wedge_all(&keep(&proj))?)?;
            col.push(diff.lp_norm(conjugate(ps[k]))?);
        }
    }
    let mut out = Vec::new();
    for (k, v) in values.into_iter().enumerate() {
        let keep = |v: &[Form]| -> Vec<Form> {
            v.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f.clone()).collect()
        };
        let limit_value = wedge_all(&keep(&limits))?.sub(&wedge_all(&keep(&limit_proj))?)?.lp_norm(conjugate(ps[k]))?;
        let extrapolated = richardson(schedule, &v).value;
        out.push(NoLossRecord {
            omitted: k + 1,
            exponent: conjugate(ps[k]),
            converges: (extrapolated - limit_value).abs() <= tolerance * limit_value.max(1.0),
            extrapolated,
            limit_value,
            values: v,
        });
    }
    Ok(out)
}

/// Reads the factors and runs the pair pipeline on the paired-off product.
pub fn multilinear_outcome(s: &Settings) -> Result<(PairOutcome, PairSettings, Vec<FactorSpec>, Vec<f64>)> {
    let grid = s.grid()?;
    let dim = grid.dim();
    let ps = s.f64_list("exponents.p")?;
    let qs = complementary_exponents(&ps, dim)?;
    let count = ps.len();
    let specs: Vec<FactorSpec> = (1..=count)
        .map(|i| FactorSpec::from_settings(s, &format!("factor{i}"), dim))
        .collect::<Result<_>>()?;
    let total: usize = specs.iter().map(|f| f.degree).sum();
    if total > dim {
        return Err(HodgeError::Degree(format!("factor degrees sum to {total} > {dim}")));
    }
    let last = count - 1;
    let g = &grid;
    let head = &specs[..last];
    let alpha = if count == 2 {
        Factor::from_spec("factor1", &specs[0], &grid, ps[0], Hypothesis::NegSobolev(conjugate(qs[0])))?
    } else {
        let limits: Vec<Form> = head.iter().map(|f| f.limit(&grid)).collect::<Result<_>>()?;
        Factor {
            label: format!("factor1..{last}"),
            member: Box::new(move |n| {
                let m: Vec<Form> = head.iter().map(|f| f.member(g, n)).collect::<Result<_>>()?;
                wedge_all(&m)
            }),
            limit: wedge_all(&limits)?,
            singular: Vec::new(),
            measure_exponent: qs[last],
            hypothesis: Hypothesis::Unchecked,
        }
    };
    let label = format!("factor{count}");
    let beta = Factor::from_spec(&label, &specs[last], &grid, ps[last], Hypothesis::NegSobolev(conjugate(qs[last])))?;
    let pset = PairSettings::from_settings(s, (1.0 / alpha.measure_exponent, 1.0 / ps[last]))?;
    let mut outcome = run_pair(&grid, &alpha, &beta, &pset)?;

    if count > 2 {
        // Hypotheses of the factors inside the product, each in W^{-1,q_i′}.
        let scale_wavenumber = (0..dim)
            .map(|a| std::f64::consts::PI * grid.resolutions()[a] as f64 / grid.periods()[a])
            .fold(0.0, f64::max);
        let mut extra = Vec::new();
        for (i, spec) in head.iter().enumerate() {
            let hyp = Hypothesis::NegSobolev(conjugate(qs[i]));
            let limit = spec.limit(&grid)?;
            let mut res = Vec::new();
            let mut scales = Vec::new();
            for &n in &pset.schedule {
                let m = spec.member(&grid, n)?;
                res.push(hypothesis_residual(&m, &limit, hyp)?.unwrap_or(0.0));
                scales.push(m.sub(&limit)?.l2_norm() * scale_wavenumber);
            }
            extra.push(certify(&format!("factor{}", i + 1), hyp, &pset.schedule, &res, &scales, pset.certify_slope));
        }
        extra.append(&mut outcome.hypotheses);
        outcome.hypotheses = extra;
    }
    drop(alpha);
    drop(beta);
    Ok((outcome, pset, specs, ps))
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let (outcome, pset, specs, ps) = multilinear_outcome(s)?;
    let grid = s.grid()?;
    let tolerance = s.f64("tolerances.no_loss")?;
    let mut report = ExperimentReport::new("multilinear", s);
    record_outcome(&mut report, &outcome, &pset);

    let records = no_loss(&grid, &specs, &ps, &pset.schedule, tolerance)?;
    let mut rows = Vec::new();
    for (i, &n) in pset.schedule.iter().enumerate() {
        for r in &records {
            rows.push(TableRow { n, test_id: r.omitted, value: r.values[i], residual: (r.values[i] - r.limit_value).abs() });
        }
    }
    let slopes = records
        .iter()
        .map(|r| {
            let d: Vec<f64> = r.values.iter().map(|v| v - r.limit_value).collect();
            loglog_slope(&pset.schedule, &d, 1e-12)
        })
        .collect();
    report.tables.push(ConvergenceTable { name: "no_loss".into(), rows, slopes });
    for r in &records {
        report.verdicts.push(Check::info(
            format!("no_loss[{}]", r.omitted),
            (r.extrapolated - r.limit_value).abs(),
            format!("converges: {}", r.converges),
        ));
    }
    report.extra("no_loss", &records);
    report.extra("complementary_exponents", complementary_exponents(&ps, grid.dim())?);
    Ok(report)
}
