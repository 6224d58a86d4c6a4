//! Recovery of atom coefficients `v^k` from the limit gaps of test pairings.
//!
//! A defect `Σ_k d(v^k δ_{x^k})` acts on a test form as `Σ_k ⟨v^k, d*Ξ(x^k)⟩`;
//! the coefficients are the least-squares solution over the whole basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{HodgeError, Result};
use crate::grid::TorusGrid;
use crate::harness::tests_basis::TestForm;

#[derive(Clone, Debug)]
pub struct DefectFit {
    /// One coefficient vector (degree `ℓ − 1` components) per location.
    pub coefficients: Vec<Vec<f64>>,
    /// `Σ_k ⟨v^k, d*Ξ_j(x^k)⟩` for every test.
    pub model: Vec<f64>,
    pub rank: usize,
}

/// Least-squares fit of `gaps[j] ≈ Σ_k ⟨v^k, d*Ξ_j(x^k)⟩`.
pub fn fit_atoms(grid: &TorusGrid, tests: &[TestForm], gaps: &[f64], locations: &[Vec<f64>]) -> Result<DefectFit> {
    if tests.len() != gaps.len() {
        return Err(HodgeError::Shape("one gap per test form is required".into()));
    }
    if locations.is_empty() || tests.is_empty() {
        return Ok(DefectFit {
            coefficients: vec![Vec::new(); locations.len()],
            model: vec![0.0; tests.len()],
            rank: 0,
        });
    }
    let degree = tests[0].degree();
    if degree == 0 || tests.iter().any(|t| t.degree() != degree) {
        return Err(HodgeError::Degree("defect fits need test forms of one positive degree".into()));
    }
    let rows: Vec<Vec<f64>> = tests
        .iter()
        .map(|t| locations.iter().flat_map(|x| t.codifferential_at(grid, x)).collect())
        .collect();
    let m = rows[0].len() / locations.len();
    let a = DMatrix::from_fn(tests.len(), rows[0].len(), |i, j| rows[i][j]);
    let b = DVector::from_column_slice(gaps);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let rank = svd.rank(eps);
    let x = svd
        .solve(&b, eps)
        .map_err(|e| HodgeError::Shape(format!("defect least squares failed: {e}")))?;
    let model = &a * &x;
    Ok(DefectFit {
        coefficients: (0..locations.len()).map(|k| x.as_slice()[k * m..(k + 1) * m].to_vec()).collect(),
        model: model.iter().copied().collect(),
        rank,
    })
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|v| / (μ^a ν^b)`, or `None` when a mass vanishes.
pub fn bound_constant(v: &[f64], mu: f64, nu: f64, powers: (f64, f64)) -> Option<f64> {
    let denom = mu.powf(powers.0) * nu.powf(powers.1);
    (denom > 0.0 && denom.is_finite()).then(|| euclidean_norm(v) / denom)
}

/// `max / min` over the finite positive entries; `None` if there are none.
pub fn spread(values: &[f64]) -> Option<f64> {
    let good: Vec<f64> = values.iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    if good.is_empty() {
        return None;
    }
    let max = good.iter().cloned().fold(f64::MIN, f64::max);
    let min = good.iter().cloned().fold(f64::MAX, f64::min);
    Some(max / min)
}
