//! Compactly supported smooth test forms `f · B(|x − c|) dx_K`.
//!
//! `B` equals 1 on a plateau of radius `r₁`, falls to 0 at `r₂` through a
//! `C^∞` transition, and `f` is either 1 or a periodic coordinate displacement
//! `x_a − c_a`. On the plateau the tilted tests have constant `d*Ξ`, which
//! is what makes defect coefficients recoverable from their pairings.

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::multi_index::{index_position, multi_indices, MultiIndex};

/// Smooth monotone transition from 0 at `t ≤ 0` to 1 at `t ≥ 1`, and its derivative.
fn transition(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let g = 1.0 / t - 1.0 / (1.0 - t);
    if g > 700.0 {
        return (0.0, 0.0);
    }
    let psi = 1.0 / (1.0 + g.exp());
    let dpsi = psi * (1.0 - psi) * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t)));
    (psi, dpsi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestForm {
    pub id: usize,
    pub center: Vec<f64>,
    /// Axis of the linear factor `x_a − c_a`; `None` for the flat bump.
    pub tilt: Option<usize>,
    pub component: MultiIndex,
    /// `None` for the constant test `dx_K` on the whole torus.
    pub radii: Option<(f64, f64)>,
}

impl TestForm {
    pub fn constant(id: usize, dim: usize, component: MultiIndex) -> Self {
        TestForm {
            id,
            center: vec![0.0; dim],
            tilt: None,
            component,
            radii: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.component.degree()
    }

    fn displacement(&self, grid: &TorusGrid, x: &[f64]) -> Vec<f64> {
        (0..grid.dim())
            .map(|a| grid.periodic_delta(a, self.center[a], x[a]))
            .collect()
    }

    /// `φ` and `∇φ` at a displacement `y` from the center.
    fn profile(&self, y: &[f64]) -> (f64, Vec<f64>) {
        let dim = y.len();
        let Some((r1, r2)) = self.radii else {
            return (1.0, vec![0.0; dim]);
        };
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (psi, dpsi) = transition((r - r1) / (r2 - r1));
        let bump = 1.0 - psi;
        let dbump = -dpsi / (r2 - r1);
        let f = self.tilt.map_or(1.0, |a| y[a]);
        let grad = (0..dim)
            .map(|j| {
                let own = if self.tilt == Some(j) { bump } else { 0.0 };
                let radial = if r > 0.0 { f * dbump * y[j] / r } else { 0.0 };
                own + radial
            })
            .collect();
        (f * bump, grad)
    }

    /// Components of `Ξ(x)`.
    pub fn value_at(&self, grid: &TorusGrid, x: &[f64]) -> Vec<f64> {
        let dim = grid.dim();
        let mut out = vec![0.0; crate::multi_index::binomial(dim, self.degree())];
        let (phi, _) = self.profile(&self.displacement(grid, x));
        out[index_position(dim, &self.component)] = phi;
        out
    }

    /// Components of `d*Ξ(x)`: `(d*Ξ)_{K∖j} = −(−1)^m ∂_j φ` with `m` the slot of `j` in `K`.
    pub fn codifferential_at(&self, grid: &TorusGrid, x: &[f64]) -> Vec<f64> {
        let dim = grid.dim();
        let degree = self.degree();
        assert!(degree >= 1, "functions have no codifferential");
        let mut out = vec![0.0; crate::multi_index::binomial(dim, degree - 1)];
        let (_, grad) = self.profile(&self.displacement(grid, x));
        let axes = self.component.axes();
        for (m, &j) in axes.iter().enumerate() {
            let rest: Vec<usize> = axes.iter().copied().filter(|&a| a != j).collect();
            let idx = MultiIndex::new(rest).expect("subset of an increasing index");
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            out[index_position(dim, &idx)] += sign * grad[j];
        }
        out
    }

    pub fn form(&self, grid: &TorusGrid) -> Result<Form> {
        Form::from_fn(grid, self.degree(), |x| self.value_at(grid, x))
    }

    pub fn codifferential_form(&self, grid: &TorusGrid) -> Result<Form> {
        if self.degree() == 0 {
            return Err(HodgeError::Degree("functions have no codifferential".into()));
        }
        Form::from_fn(grid, self.degree() - 1, |x| self.codifferential_at(grid, x))
    }
}

/// Flat and tilted bumps of every component of the given degree, per center.
/// That is `(N + 1) · binomial(N, degree)` tests per center.
pub fn build_basis(
    dim: usize,
    degree: usize,
    centers: &[Vec<f64>],
    radii: (f64, f64),
) -> Result<Vec<TestForm>> {
    let (r1, r2) = radii;
    if !(r1 >= 0.0 && r2 > r1 && r2 < 0.5) {
        return Err(HodgeError::Config(format!(
            "test radii ({r1}, {r2}) must satisfy 0 ≤ plateau < support < 1/2 period"
        )));
    }
    let components = multi_indices(dim, degree)?;
    let mut out = Vec::new();
    for c in centers {
        if c.len() != dim {
            return Err(HodgeError::Shape("test center has the wrong dimension".into()));
        }
        for tilt in std::iter::once(None).chain((0..dim).map(Some)) {
            for k in &components {
                out.push(TestForm {
                    id: out.len(),
                    center: c.clone(),
                    tilt,
                    component: k.clone(),
                    radii: Some(radii),
                });
            }
        }
    }
    Ok(out)
}
