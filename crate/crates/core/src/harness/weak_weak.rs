//! The wedge of two weakly converging forms as a distribution.
//!
//! With `α = dγ + ξ` and `β = dζ + η` (exact parts split off), the product is
//! `d(γ ∧ dζ) + ξ ∧ dζ + dγ ∧ η + ξ ∧ η`. The first term is stored through its
//! potential and paired against `d*Ξ`; the rest is an ordinary form.

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::hodge::decompose_spectral;

#[derive(Clone, Debug)]
pub struct WeakWedge {
    degree: usize,
    /// `γ ∧ dζ`; absent when either factor is a function.
    potential: Option<Form>,
    /// `ξ ∧ dζ + dγ ∧ η + ξ ∧ η`.
    regular: Form,
}

/// Exact part and its zero-mean potential, with the remainder `ω − dγ`.
fn split_exact(omega: &Form) -> Result<(Option<Form>, Option<Form>, Form)> {
    if omega.degree() == 0 {
        return Ok((None, None, omega.clone()));
    }
    let parts = decompose_spectral(&omega.to_spectral())?;
    let gamma = parts.gamma.expect("positive degree has a potential").to_physical();
    let exact = parts.exact.to_physical();
    let rest = omega.sub(&exact)?;
    Ok((Some(gamma), Some(exact), rest))
}

impl WeakWedge {
    /// Decomposes both factors in the minimal gauge.
    pub fn new(alpha: &Form, beta: &Form) -> Result<Self> {
        check_degrees(alpha, beta)?;
        let (gamma, dgamma, xi) = split_exact(alpha)?;
        let (_, dzeta, eta) = split_exact(beta)?;
        Self::assemble(gamma.as_ref(), dgamma.as_ref(), &xi, dzeta.as_ref(), &eta)
    }

    /// Builds the record from given potentials: `α = dγ + ξ`, `β = dζ + η`.
    /// Any potentials may be used; the pairings do not depend on the choice.
    pub fn from_potentials(gamma: Option<&Form>, xi: &Form, zeta: Option<&Form>, eta: &Form) -> Result<Self> {
        check_degrees(xi, eta)?;
        let dgamma = gamma.map(|g| g.exterior_derivative()).transpose()?;
        let dzeta = zeta.map(|z| z.exterior_derivative()).transpose()?;
        for (d, rest) in [(&dgamma, xi), (&dzeta, eta)] {
            if d.as_ref().is_some_and(|d| d.degree() != rest.degree()) {
                return Err(HodgeError::Degree("potential has the wrong degree".into()));
            }
        }
        Self::assemble(gamma, dgamma.as_ref(), xi, dzeta.as_ref(), eta)
    }

    fn assemble(
        gamma: Option<&Form>,
        dgamma: Option<&Form>,
        xi: &Form,
        dzeta: Option<&Form>,
        eta: &Form,
    ) -> Result<Self> {
        let degree = xi.degree() + eta.degree();
        let mut regular = xi.wedge(eta)?;
        if let Some(dz) = dzeta {
            regular = regular.add(&xi.wedge(dz)?)?;
        }
        if let Some(dg) = dgamma {
            regular = regular.add(&dg.wedge(eta)?)?;
        }
        let potential = match (gamma, dzeta) {
            (Some(g), Some(dz)) => Some(g.wedge(dz)?),
            _ => None,
        };
        Ok(WeakWedge { degree, potential, regular })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn potential(&self) -> Option<&Form> {
        self.potential.as_ref()
    }

    pub fn regular(&self) -> &Form {
        &self.regular
    }

    /// `⟨α ∧ β, Ξ⟩ = ∫⟨γ ∧ dζ, d*Ξ⟩ + ∫⟨regular, Ξ⟩`. `codifferential` is `d*Ξ`
    /// and is only read when the record has a potential.
    pub fn pair(&self, test: &Form, codifferential: Option<&Form>) -> Result<f64> {
        let mut value = self.regular.l2_inner(test)?;
        if let Some(pot) = &self.potential {
            let ds = codifferential
                .ok_or_else(|| HodgeError::Degree("pairing the potential needs d*Ξ".into()))?;
            value += pot.l2_inner(ds)?;
        }
        Ok(value)
    }

    /// Pairing against a test form whose `d*` is taken spectrally.
    pub fn pair_spectral(&self, test: &Form) -> Result<f64> {
        let ds = match &self.potential {
            Some(_) => Some(test.codifferential()?),
            None => None,
        };
        self.pair(test, ds.as_ref())
    }

    /// The represented form `d(γ ∧ dζ) + regular` on the grid.
    pub fn to_form(&self) -> Result<Form> {
        match &self.potential {
            Some(p) => self.regular.add(&p.exterior_derivative()?),
            None => Ok(self.regular.clone()),
        }
    }
}

fn check_degrees(alpha: &Form, beta: &Form) -> Result<()> {
    let n = alpha.dim();
    if alpha.degree() + beta.degree() > n {
        return Err(HodgeError::Degree(format!(
            "wedge of degrees {} and {} exceeds dimension {n}",
            alpha.degree(),
            beta.degree()
        )));
    }
    if !alpha.grid().same_as(beta.grid()) {
        return Err(HodgeError::Grid("factors live on different grids".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use crate::random::{random_form, seeded_rng};

    #[test]
    fn smooth_factors_match_the_direct_product() {
        let g = TorusGrid::unit(&[32, 32, 32]).unwrap();
        let mut rng = seeded_rng(11);
        for (d1, d2) in [(1, 1), (1, 2), (0, 2), (2, 1), (0, 0)] {
            let a = random_form(&g, d1, 3, &mut rng).unwrap();
            let b = random_form(&g, d2, 3, &mut rng).unwrap();
            let w = WeakWedge::new(&a, &b).unwrap();
            let direct = a.wedge(&b).unwrap();
            let test = random_form(&g, d1 + d2, 3, &mut rng).unwrap();
            let lhs = w.pair_spectral(&test).unwrap();
            let rhs = direct.l2_inner(&test).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0), "({d1},{d2}): {lhs} vs {rhs}");
            let back = w.to_form().unwrap().sub(&direct).unwrap().max_abs();
            assert!(back < 1e-10 * direct.max_abs().max(1.0));
        }
    }

    #[test]
    fn harmonic_gauge_shift_leaves_pairings_unchanged() {
        let g = TorusGrid::unit(&[32, 32]).unwrap();
        let mut rng = seeded_rng(5);
        let a = random_form(&g, 1, 4, &mut rng).unwrap();
        let b = random_form(&g, 1, 4, &mut rng).unwrap();
        let test = random_form(&g, 2, 4, &mut rng).unwrap();
        let (gamma, dgamma, xi) = split_exact(&a).unwrap();
        let (zeta, dzeta, eta) = split_exact(&b).unwrap();
        assert!(dgamma.is_some() && dzeta.is_some());
        let base = WeakWedge::from_potentials(gamma.as_ref(), &xi, zeta.as_ref(), &eta).unwrap();
        let shifted_gamma = gamma.unwrap().add(&Form::constant(&g, 0, &[2.5]).unwrap()).unwrap();
        let shifted_zeta = zeta.unwrap().add(&Form::constant(&g, 0, &[-1.25]).unwrap()).unwrap();
        let shifted = WeakWedge::from_potentials(Some(&shifted_gamma), &xi, Some(&shifted_zeta), &eta).unwrap();
        let x = base.pair_spectral(&test).unwrap();
        let y = shifted.pair_spectral(&test).unwrap();
        assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        assert!(base.potential().unwrap().sub(shifted.potential().unwrap()).unwrap().max_abs() > 0.1);
    }

    #[test]
    fn closed_constants_pair_to_the_constant_wedge() {
        let g = TorusGrid::unit(&[16, 16]).unwrap();
        let a = Form::constant(&g, 1, &[0.5, 0.0]).unwrap();
        let b = Form::constant(&g, 1, &[0.0, 1.0]).unwrap();
        let w = WeakWedge::new(&a, &b).unwrap();
        let dvol = Form::constant(&g, 2, &[1.0]).unwrap();
        assert!((w.pair_spectral(&dvol).unwrap() - 0.5).abs() < 1e-15);
        assert!(WeakWedge::new(&dvol, &a).is_err());
    }
}
