//! Gaffney ratio `‖∇ω‖_q / (‖dω‖_q + ‖d*ω‖_q + ‖ω‖_q)` over random forms.

use serde::Serialize;

use crate::error::Result;
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::config::parse_grid_spec;
use crate::harness::{Check, ExperimentReport, Settings};
use crate::random::{random_form, seeded_rng};

pub fn gaffney_ratio(omega: &Form, q: f64) -> Result<f64> {
    let d = if omega.degree() < omega.dim() { omega.exterior_derivative()?.lp_norm(q)? } else { 0.0 };
    let ds = if omega.degree() > 0 { omega.codifferential()?.lp_norm(q)? } else { 0.0 };
    Ok(omega.gradient_lp_norm(q)? / (d + ds + omega.lp_norm(q)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct GaffneyRecord {
    pub resolution: Vec<usize>,
    pub degree: usize,
    pub q: f64,
    pub samples: usize,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let mut grids = vec![s.grid()?];
    for spec in s.str("gaffney.extra_grids")?.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        grids.push(TorusGrid::unit(&parse_grid_spec(spec)?)?);
    }
    let exponents = s.f64_list("gaffney.exponents")?;
    let samples = s.usize("gaffney.samples")?;
    let bandwidth = s.usize("gaffney.bandwidth")?;
    let identity = s.f64("tolerances.identity")?;
    let stability = s.f64("tolerances.stability")?;
    let mut rng = seeded_rng(s.u64("run.seed")?);

    let mut records = Vec::new();
    for grid in &grids {
        for degree in 0..=grid.dim() {
            let mut ratios = vec![Vec::with_capacity(samples); exponents.len()];
            for _ in 0..samples {
                let omega = random_form(grid, degree, bandwidth, &mut rng)?;
                for (k, &q) in exponents.iter().enumerate() {
                    ratios[k].push(gaffney_ratio(&omega, q)?);
                }
            }
            for (k, &q) in exponents.iter().enumerate() {
                let min = ratios[k].iter().cloned().fold(f64::INFINITY, f64::min);
                let max = ratios[k].iter().cloned().fold(0.0f64, f64::max);
                records.push(GaffneyRecord {
                    resolution: grid.resolutions().to_vec(),
                    degree,
                    q,
                    samples,
                    min,
                    max,
                    spread: max / min,
                });
            }
        }
    }

    let mut report = ExperimentReport::new("gaffney", s);
    for r in &records {
        let tag = format!(
            "{}|deg{}|q{:.4}",
            r.resolution.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x"),
            r.degree,
            r.q
        );
        if r.q == 2.0 {
            report.verdicts.push(Check::at_most(format!("identity[{tag}]"), r.max, 1.0 + identity, "ratio ≤ 1 at q = 2"));
        } else {
            report.verdicts.push(Check::at_most(format!("stability[{tag}]"), r.spread, stability, "max/min over samples"));
        }
    }
    report.extra("ratios", &records);
    Ok(report)
}
