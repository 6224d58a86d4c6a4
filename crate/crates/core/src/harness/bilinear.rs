//! Bilinear wedge products at critical exponents, the subcritical vanishing
//! of atoms, and the pairing with the fundamental cycle.

use serde_json::json;

use crate::error::{HodgeError, Result};
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::pair::{record_outcome, run_pair, Factor, Hypothesis, PairOutcome, PairSettings};
use crate::harness::{Check, ExperimentReport};

/// Slack in the exponent range checks, for exponents given as decimals.
const RANGE_SLACK: f64 = 1e-12;

/// `1 < p, q < ∞` and `1 ≤ 1/p + 1/q ≤ 1 + 1/N`.
pub fn check_bilinear_exponents(p: f64, q: f64, dim: usize) -> Result<()> {
    for (name, e) in [("p", p), ("q", q)] {
        if !(e > 1.0 && e.is_finite()) {
            return Err(HodgeError::Exponent(format!("{name} = {e} outside (1, ∞)")));
        }
    }
    let s = 1.0 / p + 1.0 / q;
    let top = 1.0 + 1.0 / dim as f64;
    if s < 1.0 - RANGE_SLACK || s > top + RANGE_SLACK {
        return Err(HodgeError::Exponent(format!(
            "1/p + 1/q = {s} outside the critical range [1, {top}]"
        )));
    }
    Ok(())
}

pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Runs the pair pipeline on `[alpha] ∧ [beta]` with exponents `(p, q)`.
pub fn wedge_outcome(s: &Settings) -> Result<(PairOutcome, PairSettings)> {
    let grid = s.grid()?;
    let (p, q) = (s.f64("exponents.p")?, s.f64("exponents.q")?);
    check_bilinear_exponents(p, q, grid.dim())?;
    let alpha = FactorSpec::from_settings(s, "alpha", grid.dim())?;
    let beta = FactorSpec::from_settings(s, "beta", grid.dim())?;
    let a = Factor::from_spec("alpha", &alpha, &grid, p, Hypothesis::NegSobolev(conjugate(q)))?;
    let b = Factor::from_spec("beta", &beta, &grid, q, Hypothesis::NegSobolev(conjugate(p)))?;
    let ps = PairSettings::from_settings(s, (1.0 / p, 1.0 / q))?;
    let outcome = run_pair(&grid, &a, &b, &ps)?;
    Ok((outcome, ps))
}

fn exponent_echo(s: &Settings) -> Result<serde_json::Value> {
    let (p, q) = (s.f64("exponents.p")?, s.f64("exponents.q")?);
    Ok(json!({ "p": p, "q": q, "sum": 1.0 / p + 1.0 / q }))
}

pub fn run_wedge(s: &Settings) -> Result<ExperimentReport> {
    let (outcome, ps) = wedge_outcome(s)?;
    let mut report = ExperimentReport::new("wedge", s);
    report.extra("exponents", exponent_echo(s)?);
    record_outcome(&mut report, &outcome, &ps);
    Ok(report)
}

/// Atoms of a strictly subcritical run compared with a critical magnitude.
pub fn subcritical_vanishing(s: &Settings, critical_magnitude: f64) -> Result<(Check, PairOutcome)> {
    let grid = s.grid()?;
    let (p, q) = (s.f64("exponents.p")?, s.f64("exponents.q")?);
    let top = 1.0 + 1.0 / grid.dim() as f64;
    if 1.0 / p + 1.0 / q >= top {
        return Err(HodgeError::Exponent(format!(
            "1/p + 1/q = {} is not subcritical",
            1.0 / p + 1.0 / q
        )));
    }
    let (outcome, _) = wedge_outcome(s)?;
    let largest = outcome.atoms.iter().fold(0.0f64, |a, at| a.max(at.magnitude));
    let check = Check::at_most(
        "subcritical_vanishing",
        largest,
        1e-3 * critical_magnitude,
        format!("largest |v| among {} atom(s) against 1e-3 of the critical |v|", outcome.atoms.len()),
    );
    Ok((check, outcome))
}

/// Pairing with the fundamental cycle; atoms must be invisible to it.
pub fn run_cycles(s: &Settings) -> Result<ExperimentReport> {
    let (outcome, ps) = wedge_outcome(s)?;
    let tol = s.f64("tolerances.cycle")?;
    let mut report = ExperimentReport::new("cycles", s);
    report.extra("exponents", exponent_echo(s)?);
    let cycle = outcome
        .cycle
        .clone()
        .ok_or_else(|| HodgeError::Degree("cycle pairings need ℓ₁ + ℓ₂ = N".into()))?;
    let err = (cycle.limit.value - cycle.classical).abs();
    let scale = cycle.classical.abs();
    let threshold = if scale > 0.0 { tol * scale } else { tol };
    record_outcome(&mut report, &outcome, &ps);
    report.verdicts.push(Check::at_most(
        "cycle",
        err,
        threshold,
        format!("|∫ α^n∧β^n → {:.12}| against ∫ᾱ∧β̄ = {:.12}", cycle.limit.value, cycle.classical),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_range() {
        assert!(check_bilinear_exponents(4.0 / 3.0, 4.0 / 3.0, 2).is_ok());
        assert!(check_bilinear_exponents(2.0, 2.0, 2).is_ok());
        assert!(check_bilinear_exponents(1.2, 1.2, 2).is_err());
        assert!(check_bilinear_exponents(3.0, 3.0, 2).is_err());
        assert!(check_bilinear_exponents(1.0, 2.0, 2).is_err());
        assert!((conjugate(4.0 / 3.0) - 4.0).abs() < 1e-12);
    }
}
