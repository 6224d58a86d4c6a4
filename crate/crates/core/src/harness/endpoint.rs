//! Endpoint pairing: a sequence converging weakly-⋆ as measures against one
//! whose exterior derivative converges strongly in `L^N`.

use serde_json::json;

use crate::error::Result;
use crate::extrapolate::Method;
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::pair::{record_outcome, run_pair, Factor, Hypothesis, PairSettings};
use crate::harness::{Check, ExperimentReport};

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let grid = s.grid()?;
    let dim = grid.dim() as f64;
    let alpha = FactorSpec::from_settings(s, "alpha", grid.dim())?;
    let beta = FactorSpec::from_settings(s, "beta", grid.dim())?;
    let a = Factor::from_spec("alpha", &alpha, &grid, 1.0, Hypothesis::Unchecked)?;
    let b = Factor::from_spec("beta", &beta, &grid, dim, Hypothesis::Lebesgue(dim))?;
    let ps = PairSettings::from_settings(s, (1.0, 1.0 / dim))?;
    let outcome = run_pair(&grid, &a, &b, &ps)?;

    let mut report = ExperimentReport::new("endpoint", s);
    record_outcome(&mut report, &outcome, &ps);
    let orders: Vec<Option<f64>> = outcome
        .limits
        .iter()
        .map(|l| if l.method == Method::ObservedOrder { l.order } else { None })
        .collect();
    let min_order = orders.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let required = s.f64("tolerances.min_order")?;
    if required > 0.0 {
        let counted = orders.iter().flatten().count();
        report.verdicts.push(Check::at_least(
            "observed_order",
            if counted > 0 { min_order } else { f64::NAN },
            required,
            format!("smallest Richardson order over {counted} test(s)"),
        ));
    }
    report.extra("observed_orders", json!(orders));
    Ok(report)
}
