//! Hodge decomposition of a stored or random form, with the identities that
//! every decomposition must satisfy.

use std::path::Path;

use serde_json::json;

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::harness::{Check, ExperimentReport, Settings};
use crate::hodge::{coexact_projection, exact_projection, hodge_decompose, HodgeParts};
use crate::io::read_hfrm;
use crate::random::{random_form, seeded_rng};

/// The input form: `form.input` when set, otherwise a seeded random form.
pub fn input_form(s: &Settings) -> Result<Form> {
    let path = s.str("form.input")?;
    if !path.is_empty() {
        return read_hfrm(Path::new(path));
    }
    let grid = s.grid()?;
    let degree = s.usize("form.degree")?;
    if degree > grid.dim() {
        return Err(HodgeError::Degree(format!("degree {degree} exceeds dimension {}", grid.dim())));
    }
    let mut rng = seeded_rng(s.u64("run.seed")?);
    random_form(&grid, degree, s.usize("form.bandwidth")?, &mut rng)
}

pub fn decompose(s: &Settings) -> Result<(Form, HodgeParts)> {
    let omega = input_form(s)?;
    let parts = hodge_decompose(&omega)?;
    Ok((omega, parts))
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let (omega, parts) = decompose(s)?;
    let tol = s.f64("tolerances.identity")?;
    let norm = omega.l2_norm().max(f64::MIN_POSITIVE);
    let mut report = ExperimentReport::new("decompose", s);

    let sum = parts.exact.add(&parts.coexact)?.add(&parts.harmonic)?;
    let reconstruction = omega.sub(&sum)?.l2_norm() / norm;
    report.verdicts.push(Check::at_most("reconstruction", reconstruction, tol, "relative L² error of the sum"));

    let pairs = [
        ("exact", "coexact", &parts.exact, &parts.coexact),
        ("exact", "harmonic", &parts.exact, &parts.harmonic),
        ("coexact", "harmonic", &parts.coexact, &parts.harmonic),
    ];
    let mut orthogonality = 0.0f64;
    for (_, _, a, b) in pairs {
        orthogonality = orthogonality.max(a.l2_inner(b)?.abs() / (norm * norm));
    }
    report.verdicts.push(Check::at_most("orthogonality", orthogonality, tol, "largest relative L² inner product"));

    let pe = exact_projection(&omega)?;
    let idem_exact = exact_projection(&pe)?.sub(&pe)?.l2_norm() / norm;
    let pc = coexact_projection(&omega)?;
    let idem_coexact = coexact_projection(&pc)?.sub(&pc)?.l2_norm() / norm;
    report.verdicts.push(Check::at_most(
        "idempotence",
        idem_exact.max(idem_coexact),
        tol,
        "relative L² error of Π∘Π − Π for both projections",
    ));

    let mut gauge = 0.0f64;
    if let Some(g) = &parts.gamma {
        if g.degree() > 0 {
            gauge = gauge.max(g.codifferential()?.l2_norm());
        }
        gauge = gauge.max(g.means().iter().fold(0.0f64, |a, m| a.max(m.abs())));
    }
    if let Some(k) = &parts.k {
        if k.degree() < k.dim() {
            gauge = gauge.max(k.exterior_derivative()?.l2_norm());
        }
        gauge = gauge.max(k.means().iter().fold(0.0f64, |a, m| a.max(m.abs())));
    }
    report.verdicts.push(Check::at_most("gauge", gauge / norm, tol, "d*γ, dk and potential means"));

    report.extra(
        "parts",
        json!({
            "degree": omega.degree(),
            "resolution": omega.grid().resolutions(),
            "norm": omega.l2_norm(),
            "exact_norm": parts.exact.l2_norm(),
            "coexact_norm": parts.coexact.l2_norm(),
            "harmonic_norm": parts.harmonic.l2_norm(),
            "harmonic_coefficients": parts.harmonic.means(),
        }),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{settings_for, Verdict};

    #[test]
    fn random_input_passes_every_identity() {
        let over = Settings::from_pairs(&[("run.seed", "5"), ("form.degree", "1")]);
        let s = settings_for("decompose", &over).unwrap();
        let r = crate::harness::run("decompose", &s).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.verdicts);
    }

    #[test]
    fn stored_input_is_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.hfrm");
        let grid = crate::grid::TorusGrid::unit(&[16, 16]).unwrap();
        let w = Form::constant(&grid, 2, &[1.5]).unwrap();
        crate::io::write_hfrm(&path, &w).unwrap();
        let over = Settings::from_pairs(&[("form.input", path.to_str().unwrap())]);
        let s = settings_for("decompose", &over).unwrap();
        let (omega, parts) = decompose(&s).unwrap();
        assert_eq!(omega.degree(), 2);
        assert_eq!(parts.harmonic.means(), vec![1.5]);
    }
}
