//! Hodge decomposition `ω = dγ + d*k + h` in the minimal, zero-mean gauge.
//!
//! On the flat torus the harmonic forms are the constant-coefficient forms, and
//! `γ = Δ⁻¹d*ω`, `k = Δ⁻¹dω` are computed mode by mode.

use crate::error::Result;
use crate::form::Form;
use crate::spectral::SpectralForm;

/// The three parts and their potentials, in Fourier space.
#[derive(Clone, Debug)]
pub struct SpectralHodgeParts {
    pub exact: SpectralForm,
    pub coexact: SpectralForm,
    pub harmonic: SpectralForm,
    /// Absent for functions.
    pub gamma: Option<SpectralForm>,
    /// Absent for top-degree forms.
    pub k: Option<SpectralForm>,
}

#[derive(Clone, Debug)]
pub struct HodgeParts {
    pub exact: Form,
    pub coexact: Form,
    pub harmonic: Form,
    pub gamma: Option<Form>,
    pub k: Option<Form>,
}

pub fn decompose_spectral(omega: &SpectralForm) -> Result<SpectralHodgeParts> {
    let n = omega.grid().dim();
    let degree = omega.degree();
    let harmonic = omega.kernel_part();
    let (gamma, exact) = if degree > 0 {
        let gamma = omega.codifferential()?.inverse_laplacian();
        let exact = gamma.exterior_derivative()?;
        (Some(gamma), exact)
    } else {
        (None, SpectralForm::zeros(omega.grid(), degree)?)
    };
    let (k, coexact) = if degree < n {
        let k = omega.exterior_derivative()?.inverse_laplacian();
        let coexact = k.codifferential()?;
        (Some(k), coexact)
    } else {
        (None, SpectralForm::zeros(omega.grid(), degree)?)
    };
    Ok(SpectralHodgeParts {
        exact,
        coexact,
        harmonic,
        gamma,
        k,
    })
}

pub fn hodge_decompose(omega: &Form) -> Result<HodgeParts> {
    let parts = decompose_spectral(&omega.to_spectral())?;
    Ok(HodgeParts {
        exact: parts.exact.to_physical(),
        coexact: parts.coexact.to_physical(),
        harmonic: parts.harmonic.to_physical(),
        gamma: parts.gamma.map(|g| g.to_physical()),
        k: parts.k.map(|k| k.to_physical()),
    })
}

/// Zero-mean solution `σ` of `Δσ = ω − harmonic(ω)`.
pub fn green_operator(omega: &Form) -> Form {
    omega.to_spectral().inverse_laplacian().to_physical()
}

/// `Π^d ω = d Δ⁻¹ d* ω`. Functions have no exact part.
pub fn exact_projection_spectral(omega: &SpectralForm) -> Result<SpectralForm> {
    if omega.degree() == 0 {
        return SpectralForm::zeros(omega.grid(), 0);
    }
    omega.codifferential()?.inverse_laplacian().exterior_derivative()
}

pub fn exact_projection(omega: &Form) -> Result<Form> {
    Ok(exact_projection_spectral(&omega.to_spectral())?.to_physical())
}

/// Leray projection `ω − d Δ⁻¹ d* ω`: coexact plus harmonic parts.
pub fn coexact_projection_spectral(omega: &SpectralForm) -> Result<SpectralForm> {
    omega.sub(&exact_projection_spectral(omega)?)
}

pub fn coexact_projection(omega: &Form) -> Result<Form> {
    Ok(coexact_projection_spectral(&omega.to_spectral())?.to_physical())
}

/// Componentwise mean.
pub fn harmonic_projection(omega: &Form) -> Form {
    Form::constant(omega.grid(), omega.degree(), &omega.means()).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusGrid;
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::unit(&[32, 32]).unwrap()
    }

    #[test]
    fn constant_form_is_harmonic() {
        let c = Form::constant(&grid(), 1, &[1.5, -0.5]).unwrap();
        let parts = hodge_decompose(&c).unwrap();
        assert!(parts.harmonic.sub(&c).unwrap().max_abs() < 1e-14);
        assert!(parts.exact.max_abs() < 1e-14);
        assert!(parts.coexact.max_abs() < 1e-14);
    }

    #[test]
    fn exact_form_is_exact() {
        let f = Form::scalar_from_fn(&grid(), |x| (2.0 * PI * x[0]).sin());
        let w = f.exterior_derivative().unwrap();
        let parts = hodge_decompose(&w).unwrap();
        assert!(parts.exact.sub(&w).unwrap().max_abs() < 1e-12);
        assert!(parts.coexact.max_abs() < 1e-12);
        assert!(parts.harmonic.max_abs() < 1e-12);
        assert!(exact_projection(&w).unwrap().sub(&w).unwrap().max_abs() < 1e-12);
        assert!(coexact_projection(&w).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn degenerate_degrees_have_empty_potentials() {
        let f = Form::scalar_from_fn(&grid(), |x| (2.0 * PI * x[1]).cos() + 1.0);
        let parts = hodge_decompose(&f).unwrap();
        assert!(parts.gamma.is_none() && parts.k.is_some());
        let top = Form::from_fn(&grid(), 2, |x| vec![(2.0 * PI * x[1]).cos()]).unwrap();
        let parts = hodge_decompose(&top).unwrap();
        assert!(parts.gamma.is_some() && parts.k.is_none());
        assert!(parts.exact.sub(&top).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn green_of_eigenfunction() {
        let f = Form::scalar_from_fn(&grid(), |x| (2.0 * PI * x[0]).sin());
        let s = green_operator(&f);
        assert!(s.sub(&f.scale(1.0 / (4.0 * PI * PI))).unwrap().max_abs() < 1e-14);
        assert!(green_operator(&Form::constant(&grid(), 0, &[2.0]).unwrap()).max_abs() < 1e-14);
    }

    #[test]
    fn harmonic_projection_takes_means() {
        let g = grid();
        let w = Form::from_fn(&g, 1, |x| vec![0.25 + (2.0 * PI * x[0]).sin(), -1.0]).unwrap();
        let h = harmonic_projection(&w);
        assert!((h.components()[0][9] - 0.25).abs() < 1e-14);
        assert!((h.components()[1][0] + 1.0).abs() < 1e-14);
    }
}
