//! Differential forms sampled on a [`TorusGrid`].
//!
//! A degree-`ℓ` form stores one real field per multi-index of
//! [`multi_indices`]`(N, ℓ)`. Derivatives go through [`SpectralForm`]; products,
//! moduli and quadratures are pointwise.

use num_complex::Complex64;

use crate::error::{HodgeError, Result};
use crate::fft;
use crate::grid::TorusGrid;
use crate::multi_index::{index_position, merge_indices, multi_indices, star_complement, MultiIndex};
use crate::quadrature::{integrate, pairwise_sum_by};
use crate::spectral::{ModeTable, SpectralForm};

/// Default zero-padding factor for de-aliased products.
pub const DEFAULT_PADDING: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct Form {
    grid: TorusGrid,
    degree: usize,
    components: Vec<Vec<f64>>,
}

pub(crate) fn check_exponent(p: f64, allow_one: bool) -> Result<()> {
    let ok = if allow_one { p >= 1.0 } else { p > 1.0 };
    if !ok || p.is_nan() {
        let range = if allow_one { "[1, ∞]" } else { "(1, ∞)" };
        return Err(HodgeError::Exponent(format!("exponent {p} outside {range}")));
    }
    Ok(())
}

impl Form {
    pub fn zeros(grid: &TorusGrid, degree: usize) -> Result<Self> {
        let count = multi_indices(grid.dim(), degree)?.len();
        Ok(Form {
            grid: grid.clone(),
            degree,
            components: vec![vec![0.0; grid.len()]; count],
        })
    }

    pub fn from_components(grid: &TorusGrid, degree: usize, components: Vec<Vec<f64>>) -> Result<Self> {
        let count = multi_indices(grid.dim(), degree)?.len();
        if components.len() != count {
            return Err(HodgeError::Shape(format!(
                "{} components given for a degree-{degree} form in dimension {}",
                components.len(),
                grid.dim()
            )));
        }
        if let Some(c) = components.iter().find(|c| c.len() != grid.len()) {
            return Err(HodgeError::Shape(format!(
                "component of length {} on a grid of {} points",
                c.len(),
                grid.len()
            )));
        }
        if components.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HodgeError::Shape("non-finite component value".into()));
        }
        Ok(Form {
            grid: grid.clone(),
            degree,
            components,
        })
    }

    /// Samples `f(x)`, which returns all component values at the point `x`.
    pub fn from_fn(grid: &TorusGrid, degree: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut form = Form::zeros(grid, degree)?;
        let count = form.components.len();
        for flat in 0..grid.len() {
            let values = f(&grid.point(flat));
            if values.len() != count {
                return Err(HodgeError::Shape(format!(
                    "generator returned {} values, expected {count}",
                    values.len()
                )));
            }
            for (c, v) in form.components.iter_mut().zip(values) {
                c[flat] = v;
            }
        }
        if form.components.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HodgeError::Shape("non-finite component value".into()));
        }
        Ok(form)
    }

    pub fn scalar_from_fn(grid: &TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        Form::from_fn(grid, 0, |x| vec![f(x)]).expect("degree 0 is always valid")
    }

    /// Constant-coefficient form.
    pub fn constant(grid: &TorusGrid, degree: usize, coefficients: &[f64]) -> Result<Self> {
        let count = multi_indices(grid.dim(), degree)?.len();
        if coefficients.len() != count {
            return Err(HodgeError::Shape(format!(
                "{} coefficients for {count} components",
                coefficients.len()
            )));
        }
        Form::from_components(
            grid,
            degree,
            coefficients.iter().map(|&c| vec![c; grid.len()]).collect(),
        )
    }

    /// `f · dx_I` for a single multi-index.
    pub fn monomial(grid: &TorusGrid, index: &MultiIndex, field: Vec<f64>) -> Result<Self> {
        let mut form = Form::zeros(grid, index.degree())?;
        if field.len() != grid.len() {
            return Err(HodgeError::Shape("field length mismatch".into()));
        }
        form.components[index_position(grid.dim(), index)] = field;
        Ok(form)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn component(&self, index: &MultiIndex) -> &[f64] {
        &self.components[index_position(self.dim(), index)]
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        multi_indices(self.dim(), self.degree).expect("valid degree")
    }

    pub fn to_spectral(&self) -> SpectralForm {
        let engine = fft::engine(&self.grid);
        let comps = self.components.iter().map(|c| engine.forward(c)).collect();
        SpectralForm::from_components(&self.grid, self.degree, comps).expect("consistent shape")
    }

    pub fn exterior_derivative(&self) -> Result<Form> {
        Ok(self.to_spectral().exterior_derivative()?.to_physical())
    }

    pub fn codifferential(&self) -> Result<Form> {
        Ok(self.to_spectral().codifferential()?.to_physical())
    }

    pub fn hodge_star(&self) -> Form {
        let n = self.dim();
        let mut components = vec![Vec::new(); self.components.len()];
        for (pos, idx) in self.indices().iter().enumerate() {
            let (sign, comp) = star_complement(idx, n);
            let s = sign as f64;
            components[index_position(n, &comp)] = self.components[pos].iter().map(|v| s * v).collect();
        }
        Form {
            grid: self.grid.clone(),
            degree: n - self.degree,
            components,
        }
    }

    pub fn laplacian(&self) -> Form {
        self.to_spectral().laplacian().to_physical()
    }

    fn check_same_grid(&self, other: &Form) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(HodgeError::Grid(format!(
                "grids {:?} and {:?} differ",
                self.grid.resolutions(),
                other.grid.resolutions()
            )));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Form) -> Result<()> {
        self.check_same_grid(other)?;
        if self.degree != other.degree {
            return Err(HodgeError::Degree(format!(
                "degrees {} and {} differ",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// Pointwise wedge product on the sampling grid.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_same_grid(other)?;
        let n = self.dim();
        let degree = self.degree + other.degree;
        if degree > n {
            return Err(HodgeError::Degree(format!(
                "wedge of degrees {} and {} exceeds dimension {n}",
                self.degree, other.degree
            )));
        }
        let mut out = Form::zeros(&self.grid, degree)?;
        let right = other.indices();
        for (i, a) in self.indices().iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                let (sign, merged) = merge_indices(a, b);
                let Some(k) = merged else { continue };
                let s = sign as f64;
                let target = &mut out.components[index_position(n, &k)];
                for ((t, x), y) in target
                    .iter_mut()
                    .zip(&self.components[i])
                    .zip(&other.components[j])
                {
                    *t += s * x * y;
                }
            }
        }
        Ok(out)
    }

    /// Wedge product computed on a grid refined by `padding` and truncated back.
    /// With `padding ≥ 1.5` the product of two resolved fields is alias-free.
    pub fn wedge_dealiased(&self, other: &Form, padding: f64) -> Result<Form> {
        self.check_same_grid(other)?;
        if !(padding >= 1.0 && padding.is_finite()) {
            return Err(HodgeError::Grid(format!("padding factor {padding} must be ≥ 1")));
        }
        let fine_res = self
            .grid
            .resolutions()
            .iter()
            .map(|&r| {
                let target = (r as f64 * padding).ceil() as usize;
                target + target % 2
            })
            .collect();
        let fine = TorusGrid::new(fine_res, self.grid.periods().to_vec())?;
        let a = self.to_spectral().padded(&fine)?.to_physical();
        let b = other.to_spectral().padded(&fine)?.to_physical();
        let product = a.wedge(&b)?;
        Ok(product.to_spectral().truncated(&self.grid)?.to_physical())
    }

    /// Pointwise `⟨α, θ⟩`, the dot product of the component vectors.
    pub fn inner_product_field(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        let mut out = vec![0.0; self.grid.len()];
        for (a, b) in self.components.iter().zip(&other.components) {
            for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                *o += x * y;
            }
        }
        Form::from_components(&self.grid, 0, vec![out])
    }

    /// `|ω|²` at every grid point.
    pub fn modulus_squared(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c) {
                *o += v * v;
            }
        }
        out
    }

    pub fn modulus(&self) -> Vec<f64> {
        self.modulus_squared().into_iter().map(f64::sqrt).collect()
    }

    /// `∫ |ω|^p dvol` (no root taken). Accepts any `p > 0`.
    pub fn lp_integral(&self, p: f64) -> f64 {
        let m2 = self.modulus_squared();
        let half = 0.5 * p;
        let f = |i: usize| if half == 1.0 { m2[i] } else { m2[i].powf(half) };
        self.grid.cell_volume() * pairwise_sum_by(m2.len(), &f)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p, true)?;
        if p.is_infinite() {
            return Ok(self.modulus_squared().into_iter().fold(0.0, f64::max).sqrt());
        }
        Ok(self.lp_integral(p).powf(1.0 / p))
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_integral(2.0).sqrt()
    }

    /// Bessel-potential surrogate of the `W^{-1,p}` norm.
    pub fn neg_sobolev_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p, false)?;
        if p.is_infinite() {
            return Err(HodgeError::Exponent("exponent ∞ outside (1, ∞)".into()));
        }
        self.to_spectral().bessel_potential(1.0).to_physical().lp_norm(p)
    }

    /// `∫ ⟨α, θ⟩ dvol`.
    pub fn l2_inner(&self, other: &Form) -> Result<f64> {
        self.check_compatible(other)?;
        let n = self.grid.len();
        let f = |i: usize| {
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a[i] * b[i])
                .sum::<f64>()
        };
        Ok(self.grid.cell_volume() * pairwise_sum_by(n, &f))
    }

    /// The distributional pairing `∫ ω ∧ Ξ` with `deg ω + deg Ξ = N`.
    pub fn pair_with_test(&self, test: &Form) -> Result<f64> {
        self.check_same_grid(test)?;
        let n = self.dim();
        if self.degree + test.degree != n {
            return Err(HodgeError::Degree(format!(
                "pairing needs complementary degrees, got {} and {} in dimension {n}",
                self.degree, test.degree
            )));
        }
        let terms: Vec<(f64, usize, usize)> = self
            .indices()
            .iter()
            .enumerate()
            .map(|(i, idx)| {
                let (sign, comp) = star_complement(idx, n);
                (sign as f64, i, index_position(n, &comp))
            })
            .collect();
        let f = |x: usize| {
            terms
                .iter()
                .map(|&(s, i, j)| s * self.components[i][x] * test.components[j][x])
                .sum::<f64>()
        };
        Ok(self.grid.cell_volume() * pairwise_sum_by(self.grid.len(), &f))
    }

    /// `∫ ω_I dvol` for every component.
    pub fn component_integrals(&self) -> Vec<f64> {
        self.components.iter().map(|c| integrate(&self.grid, c)).collect()
    }

    /// Component means, i.e. the harmonic coefficients.
    pub fn means(&self) -> Vec<f64> {
        let v = self.grid.volume();
        self.component_integrals().into_iter().map(|i| i / v).collect()
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: f64) -> Form {
        Form {
            grid: self.grid.clone(),
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }

    /// Multiplies every component by a scalar field.
    pub fn multiply_field(&self, field: &[f64]) -> Result<Form> {
        if field.len() != self.grid.len() {
            return Err(HodgeError::Shape("field length mismatch".into()));
        }
        Ok(Form {
            grid: self.grid.clone(),
            degree: self.degree,
            components: self
                .components
                .iter()
                .map(|c| c.iter().zip(field).map(|(a, b)| a * b).collect())
                .collect(),
        })
    }

    fn zip_with(&self, other: &Form, f: impl Fn(f64, f64) -> f64) -> Form {
        Form {
            grid: self.grid.clone(),
            degree: self.degree,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖∇ω‖_{L^q}` with `|∇ω|² = Σ_I Σ_j (∂_j ω_I)²`.
    pub fn gradient_lp_norm(&self, q: f64) -> Result<f64> {
        check_exponent(q, true)?;
        let spec = self.to_spectral();
        let table = ModeTable::new(&self.grid);
        let engine = fft::engine(&self.grid);
        let mut sq = vec![0.0; self.grid.len()];
        for axis in 0..self.dim() {
            let kappa = table.kappa_axis(axis);
            for comp in spec.components() {
                let deriv: Vec<Complex64> = comp
                    .iter()
                    .zip(&kappa)
                    .map(|(&c, &k)| c * Complex64::new(0.0, k))
                    .collect();
                for (s, v) in sq.iter_mut().zip(engine.inverse(&deriv)) {
                    *s += v * v;
                }
            }
        }
        let grad = Form::from_components(&self.grid, 0, vec![sq.into_iter().map(f64::sqrt).collect()])?;
        grad.lp_norm(q)
    }

    /// Trigonometric interpolant evaluated at an arbitrary point.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(HodgeError::Shape(format!(
                "point of dimension {} on a {}-dimensional grid",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.to_spectral().evaluate_at(x))
    }

    /// Spectral resampling onto a grid with the same periods.
    pub fn resample(&self, target: &TorusGrid) -> Result<Form> {
        Ok(self.to_spectral().padded(target)?.to_physical())
    }
}

impl SpectralForm {
    /// Sum of the Fourier series at `x`, one value per component.
    pub fn evaluate_at(&self, x: &[f64]) -> Vec<f64> {
        let table = ModeTable::new(self.grid());
        let n = self.grid().dim();
        let weights = table.weights();
        // Per-axis phase factors e^{i ω_a x_a}.
        let phases: Vec<Vec<Complex64>> = (0..n)
            .map(|a| {
                table.omega[a]
                    .iter()
                    .map(|&w| Complex64::from_polar(1.0, w * x[a]))
                    .collect()
            })
            .collect();
        let mut factor = vec![Complex64::new(0.0, 0.0); table.len()];
        table.for_each(|flat, idx| {
            let mut e = Complex64::new(weights[flat], 0.0);
            for a in 0..n {
                e *= phases[a][idx[a]];
            }
            factor[flat] = e;
        });
        self.components()
            .iter()
            .map(|c| c.iter().zip(&factor).map(|(a, b)| (a * b).re).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid2() -> TorusGrid {
        TorusGrid::unit(&[32, 32]).unwrap()
    }

    fn mi(a: &[usize]) -> MultiIndex {
        MultiIndex::new(a.to_vec()).unwrap()
    }

    #[test]
    fn spectral_roundtrip_of_constant_and_zero() {
        let g = grid2();
        let c = Form::constant(&g, 1, &[2.5, 0.0]).unwrap();
        let s = c.to_spectral();
        assert!((s.components()[0][0] - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        let others: f64 = s.components()[0][1..].iter().map(|v| v.norm()).sum();
        assert!(others < 1e-12);
        let z = Form::zeros(&g, 2).unwrap();
        assert_eq!(z.to_spectral().max_abs(), 0.0);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid2();
        let f = Form::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        let df = f.exterior_derivative().unwrap();
        let expected = Form::from_fn(&g, 1, |x| vec![2.0 * PI * (2.0 * PI * x[0]).cos(), 0.0]).unwrap();
        assert!(df.sub(&expected).unwrap().max_abs() < 1e-12);
        let c = Form::constant(&g, 1, &[1.0, 0.0]).unwrap();
        assert!(c.exterior_derivative().unwrap().max_abs() < 1e-14);
        assert!(matches!(
            Form::zeros(&g, 2).unwrap().exterior_derivative(),
            Err(HodgeError::Degree(_))
        ));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // d(sin(2πx₂) dx₁) against a fourth-order central difference of ∂₂.
        let g = TorusGrid::unit(&[64, 64]).unwrap();
        let w = Form::from_fn(&g, 1, |x| vec![(2.0 * PI * x[1]).sin(), 0.0]).unwrap();
        let dw = w.exterior_derivative().unwrap();
        let h = g.spacing(1);
        let r = g.resolutions()[1];
        let c = &w.components()[0];
        let mut max_err: f64 = 0.0;
        for i in 0..g.len() {
            let idx = g.unravel(i);
            let at = |s: isize| {
                let j = (idx[1] as isize + s).rem_euclid(r as isize) as usize;
                c[g.ravel(&[idx[0], j])]
            };
            let d2 = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
            // dx₂ ∧ dx₁ = −dx₁ ∧ dx₂.
            max_err = max_err.max((dw.components()[0][i] + d2).abs());
        }
        assert!(max_err < 1e-4, "finite-difference mismatch {max_err}");
    }

    #[test]
    fn star_examples() {
        let g = grid2();
        let dx1 = Form::constant(&g, 1, &[1.0, 0.0]).unwrap();
        let dx2 = Form::constant(&g, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(dx1.hodge_star().components()[1][0], 1.0);
        assert_eq!(dx2.hodge_star().components()[0][0], -1.0);
        let g3 = TorusGrid::unit(&[8, 8, 8]).unwrap();
        let e1 = Form::constant(&g3, 1, &[1.0, 0.0, 0.0]).unwrap().hodge_star();
        assert_eq!(e1.component(&mi(&[1, 2]))[0], 1.0);
    }

    #[test]
    fn codifferential_of_cosine() {
        let g = grid2();
        let w = Form::from_fn(&g, 1, |x| vec![(2.0 * PI * x[0]).cos(), 0.0]).unwrap();
        let dw = w.codifferential().unwrap();
        let expected = Form::scalar_from_fn(&g, |x| 2.0 * PI * (2.0 * PI * x[0]).sin());
        assert!(dw.sub(&expected).unwrap().max_abs() < 1e-12);
        assert!(matches!(
            Form::zeros(&g, 0).unwrap().codifferential(),
            Err(HodgeError::Degree(_))
        ));
    }

    #[test]
    fn wedge_examples_and_errors() {
        let g = grid2();
        let dx1 = Form::constant(&g, 1, &[1.0, 0.0]).unwrap();
        let dx2 = Form::constant(&g, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(dx1.wedge(&dx2).unwrap().components()[0][5], 1.0);
        assert_eq!(dx1.wedge(&dx1).unwrap().max_abs(), 0.0);
        let f = Form::scalar_from_fn(&g, |x| x[0]);
        let h = Form::scalar_from_fn(&g, |x| x[1] + 1.0);
        let fh = f.wedge(&h).unwrap();
        assert!((fh.components()[0][40] - g.point(40)[0] * (g.point(40)[1] + 1.0)).abs() < 1e-15);
        let top = dx1.wedge(&dx2).unwrap();
        assert!(matches!(top.wedge(&dx1), Err(HodgeError::Degree(_))));
        let other = Form::zeros(&TorusGrid::unit(&[16, 16]).unwrap(), 1).unwrap();
        assert!(matches!(dx1.wedge(&other), Err(HodgeError::Grid(_))));
    }

    #[test]
    fn laplacian_eigenfunction() {
        let g = grid2();
        let f = Form::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        let lf = f.laplacian();
        assert!(lf.sub(&f.scale(4.0 * PI * PI)).unwrap().max_abs() < 1e-10);
        assert!(Form::constant(&g, 0, &[3.0]).unwrap().laplacian().max_abs() < 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let g = grid2();
        let c = Form::constant(&g, 1, &[-3.0, 0.0]).unwrap();
        assert!((c.lp_norm(2.0).unwrap() - 3.0).abs() < 1e-13);
        let s = Form::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        assert!((s.lp_norm(2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((s.lp_norm(4.0).unwrap() - 0.375f64.powf(0.25)).abs() < 1e-14);
        assert!((s.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(s.lp_norm(0.5), Err(HodgeError::Exponent(_))));
    }

    #[test]
    fn neg_sobolev_examples() {
        let g = grid2();
        let c = Form::constant(&g, 0, &[2.0]).unwrap();
        assert!((c.neg_sobolev_norm(3.0).unwrap() - 2.0).abs() < 1e-13);
        let s = Form::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        let expected = (1.0 + 4.0 * PI * PI).powf(-0.5) * 0.5f64.sqrt();
        assert!((s.neg_sobolev_norm(2.0).unwrap() - expected).abs() < 1e-14);
        assert!(matches!(s.neg_sobolev_norm(1.0), Err(HodgeError::Exponent(_))));
        assert!(matches!(s.neg_sobolev_norm(f64::INFINITY), Err(HodgeError::Exponent(_))));
    }

    #[test]
    fn inner_product_and_pairing_examples() {
        let g = grid2();
        let dx1 = Form::constant(&g, 1, &[1.0, 0.0]).unwrap();
        let dx2 = Form::constant(&g, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(dx1.inner_product_field(&dx1).unwrap().components()[0][3], 1.0);
        assert_eq!(dx1.inner_product_field(&dx2).unwrap().components()[0][3], 0.0);
        assert!((dx1.pair_with_test(&dx2).unwrap() - 1.0).abs() < 1e-14);
        assert!((dx2.pair_with_test(&dx1).unwrap() + 1.0).abs() < 1e-14);
        let a = Form::from_fn(&g, 1, |x| vec![(2.0 * PI * x[0]).sin(), 0.0]).unwrap();
        let t = Form::from_fn(&g, 1, |x| vec![0.0, (2.0 * PI * x[0]).sin()]).unwrap();
        assert!((a.pair_with_test(&t).unwrap() - 0.5).abs() < 1e-14);
        assert!(matches!(a.pair_with_test(&a.wedge(&t).unwrap()), Err(HodgeError::Degree(_))));
    }

    #[test]
    fn evaluation_reproduces_grid_values_and_interpolates() {
        let g = grid2();
        let f = Form::scalar_from_fn(&g, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).cos() + 0.3);
        let at = f.evaluate_at(&[0.123, 0.456]).unwrap()[0];
        let exact = (2.0 * PI * (0.123 + 0.912)).cos() + 0.3;
        assert!((at - exact).abs() < 1e-12);
        let p = g.point(77);
        assert!((f.evaluate_at(&p).unwrap()[0] - f.components()[0][77]).abs() < 1e-12);
    }

    #[test]
    fn dealiased_wedge_removes_unresolved_products() {
        // sin(2π·10x) squared on a 32-grid aliases the k = 20 mode onto k = -12.
        let g = grid2();
        let s = Form::scalar_from_fn(&g, |x| (2.0 * PI * 10.0 * x[0]).sin());
        let plain = s.wedge(&s).unwrap();
        let clean = s.wedge_dealiased(&s, DEFAULT_PADDING).unwrap();
        let half = Form::constant(&g, 0, &[0.5]).unwrap();
        assert!(clean.sub(&half).unwrap().max_abs() < 1e-12);
        assert!(plain.sub(&half).unwrap().max_abs() > 0.1);
    }

    #[test]
    fn gradient_norm_of_single_mode() {
        let g = grid2();
        let s = Form::scalar_from_fn(&g, |x| (2.0 * PI * x[0]).sin());
        let expected = 2.0 * PI * 0.5f64.sqrt();
        assert!((s.gradient_lp_norm(2.0).unwrap() - expected).abs() < 1e-12);
    }
}
