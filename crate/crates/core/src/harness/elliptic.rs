//! Endpoint elliptic estimate `‖dG ξ‖_{L^{N′}} ≲ ‖ξ‖_{L¹}` for coexact `ξ`,
//! probed with concentrating and random coexact families.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::harness::{Check, ConvergenceTable, ExperimentReport, Settings, TableRow};
use crate::hodge::{coexact_projection, green_operator};
use crate::random::{random_form, seeded_rng};
use crate::sequence::mollified_atom;

/// `‖d G ξ‖_{L^{N′}} / ‖ξ‖_{L¹}` with `N′ = N/(N − 1)`.
pub fn elliptic_ratio(xi: &Form) -> Result<f64> {
    let dim = xi.dim() as f64;
    let l1 = xi.lp_norm(1.0)?;
    if l1 == 0.0 {
        return Err(HodgeError::Shape("the ratio needs ξ ≠ 0".into()));
    }
    let top = green_operator(xi).exterior_derivative()?.lp_norm(dim / (dim - 1.0))?;
    Ok(top / l1)
}

/// The coexact mode `sin(2π x_N / L_N) dx₁`.
pub fn single_mode(grid: &TorusGrid) -> Result<Form> {
    let dim = grid.dim();
    let period = grid.periods()[dim - 1];
    let mut c = vec![vec![0.0; grid.len()]; dim];
    for (i, v) in c[0].iter_mut().enumerate() {
        *v = (2.0 * PI * grid.point(i)[dim - 1] / period).sin();
    }
    Form::from_components(grid, 1, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticSample {
    pub n: usize,
    pub ratio: f64,
    pub l1: f64,
    /// `‖d*ξ‖_{L²}`, zero up to round-off for the projected family.
    pub codifferential: f64,
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let grid = s.grid()?;
    let dim = grid.dim();
    if dim < 2 {
        return Err(HodgeError::Grid("the elliptic estimate needs N ≥ 2".into()));
    }
    let schedule = s.usize_list("run.schedule")?;
    let v = s.f64_list("family.v")?;
    let center = s.f64_list("family.center")?;
    if v.len() != dim || center.len() != dim {
        return Err(HodgeError::Config(format!("family.v and family.center need {dim} entries")));
    }
    let growth = s.f64("tolerances.growth")?;

    let mut samples = Vec::new();
    for &n in &schedule {
        let xi = coexact_projection(&mollified_atom(&grid, 1, &v, &center, n)?)?;
        samples.push(EllipticSample {
            n,
            ratio: elliptic_ratio(&xi)?,
            l1: xi.lp_norm(1.0)?,
            codifferential: xi.codifferential()?.l2_norm(),
        });
    }
    let mode = elliptic_ratio(&single_mode(&grid)?)?;

    let mut rng = seeded_rng(s.u64("run.seed")?);
    let bandwidth = s.usize("family.bandwidth")?;
    let mut random = Vec::new();
    for _ in 0..s.usize("family.random_samples")? {
        let xi = coexact_projection(&random_form(&grid, 1, bandwidth, &mut rng)?)?;
        if xi.max_abs() > 0.0 {
            random.push(elliptic_ratio(&xi)?);
        }
    }

    let mut report = ExperimentReport::new("elliptic", s);
    let first = samples.first().map_or(f64::NAN, |x| x.ratio);
    let largest = samples.iter().fold(0.0f64, |a, x| a.max(x.ratio));
    report.verdicts.push(Check::at_most(
        "no_blowup",
        largest,
        growth * first,
        format!("largest ratio along the family against {growth} × the first"),
    ));
    let random_max = random.iter().cloned().fold(0.0f64, f64::max);
    report.verdicts.push(Check::info("random_max", random_max, format!("{} random coexact samples", random.len())));
    report.verdicts.push(Check::info("single_mode", mode, "sin(2πx_N) dx₁"));
    report.tables.push(ConvergenceTable {
        name: "ratios".into(),
        rows: samples
            .iter()
            .map(|x| TableRow { n: x.n, test_id: 0, value: x.ratio, residual: (x.ratio - largest).abs() })
            .collect(),
        slopes: Vec::new(),
    });
    report.extra("family", &samples);
    report.extra("random_ratios", &random);
    report.extra("single_mode_ratio", mode);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_ratio_is_closed_form() {
        // G ξ = ξ/(4π²), |dGξ| = |cos|/(2π) and ‖cos‖_{L²} = 1/√2 exactly on the grid.
        // The grid mean of |sin(2πj/M)| is 2 cot(π/M)/M, tending to 2/π.
        for m in [64usize, 512] {
            let grid = TorusGrid::unit(&[m, m]).unwrap();
            let r = elliptic_ratio(&single_mode(&grid).unwrap()).unwrap();
            let l1 = 2.0 / ((PI / m as f64).tan() * m as f64);
            let want = 1.0 / (2.0 * PI * 2f64.sqrt()) / l1;
            assert!((r - want).abs() < 1e-12, "{r} vs {want}");
        }
        let grid = TorusGrid::unit(&[512, 512]).unwrap();
        let r = elliptic_ratio(&single_mode(&grid).unwrap()).unwrap();
        assert!((r - 1.0 / (4.0 * 2f64.sqrt())).abs() < 1e-5, "{r}");
    }

    #[test]
    fn zero_form_is_rejected() {
        let grid = TorusGrid::unit(&[16, 16]).unwrap();
        assert!(elliptic_ratio(&Form::zeros(&grid, 1).unwrap()).is_err());
    }
}
