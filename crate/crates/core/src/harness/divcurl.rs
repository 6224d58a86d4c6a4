//! Div-curl form of the bilinear statement: `⟨α^n, θ^n⟩ = ⋆(α^n ∧ ⋆θ^n)`,
//! with atoms carried by the divergence of a measure-valued vector field.

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::harness::bilinear::{check_bilinear_exponents, conjugate};
use crate::harness::config::{FactorSpec, Settings};
use crate::harness::pair::{record_outcome, run_pair, Factor, Hypothesis, PairSettings};
use crate::harness::ExperimentReport;
use crate::multi_index::{index_position, multi_indices, star_complement};

/// Components of `⋆c` for a constant form `c` of the given degree.
pub fn star_coefficients(dim: usize, degree: usize, c: &[f64]) -> Result<Vec<f64>> {
    let indices = multi_indices(dim, degree)?;
    if c.len() != indices.len() {
        return Err(HodgeError::Shape(format!("{} coefficients for degree {degree}", c.len())));
    }
    let mut out = vec![0.0; multi_indices(dim, dim - degree)?.len()];
    for (pos, idx) in indices.iter().enumerate() {
        let (sign, comp) = star_complement(idx, dim);
        out[index_position(dim, &comp)] = sign as f64 * c[pos];
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceAtom {
    pub location: Vec<f64>,
    /// Vector field `r` with `⋆v = r` up to the sign of `⋆⋆`.
    pub r: Vec<f64>,
}

pub fn run(s: &Settings) -> Result<ExperimentReport> {
    let grid = s.grid()?;
    let dim = grid.dim();
    let (p, q) = (s.f64("exponents.p")?, s.f64("exponents.q")?);
    check_bilinear_exponents(p, q, dim)?;
    let alpha = FactorSpec::from_settings(s, "alpha", dim)?;
    let theta = FactorSpec::from_settings(s, "theta", dim)?;
    if alpha.degree != theta.degree {
        return Err(HodgeError::Degree(format!(
            "alpha has degree {} but theta has degree {}",
            alpha.degree, theta.degree
        )));
    }
    let a = Factor::from_spec("alpha", &alpha, &grid, p, Hypothesis::NegSobolev(conjugate(q)))?;
    let g = &grid;
    let th = &theta;
    let star_theta = Factor {
        label: "*theta".into(),
        member: Box::new(move |n| Ok(th.member(g, n)?.hodge_star())),
        limit: theta.limit(&grid)?.hodge_star(),
        singular: theta
            .singular()
            .into_iter()
            .map(|(v, x)| Ok((star_coefficients(dim, theta.degree, &v)?, x)))
            .collect::<Result<_>>()?,
        measure_exponent: q,
        hypothesis: Hypothesis::NegSobolev(conjugate(p)),
    };
    let ps = PairSettings::from_settings(s, (1.0 / p, 1.0 / q))?;
    let outcome = run_pair(&grid, &a, &star_theta, &ps)?;

    let mut report = ExperimentReport::new("divcurl", s);
    record_outcome(&mut report, &outcome, &ps);
    // Each v has degree N − 1; its star is the vector field carrying the divergence.
    let divergence: Vec<DivergenceAtom> = outcome
        .atoms
        .iter()
        .map(|at| {
            Ok(DivergenceAtom {
                location: at.location.clone(),
                r: star_coefficients(dim, dim - 1, &at.v)?,
            })
        })
        .collect::<Result<_>>()?;
    report.extra("divergence_atoms", divergence);
    Ok(report)
}
