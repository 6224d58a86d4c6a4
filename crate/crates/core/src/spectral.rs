//! Forms in Fourier space. Every differential operator of the library is a
//! multiplier here; the physical-space [`Form`](crate::form::Form) methods are thin
//! wrappers that transform, apply, and transform back.
//!
//! First derivatives use the symbol `i κ_j` with `κ_j = 2π k_j / L_j`, and the
//! Nyquist frequency of each axis is annihilated so that odd derivatives of real
//! fields stay real. The Laplacian symbol is `|κ|²` with the same convention,
//! which makes `Δ = dd* + d*d` hold exactly, mode by mode.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{HodgeError, Result};
use crate::fft;
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::multi_index::{index_position, merge_indices, multi_indices, star_complement, MultiIndex};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Half-spectrum Fourier coefficients of a real form, one array per component.
#[derive(Clone, Debug)]
pub struct SpectralForm {
    grid: TorusGrid,
    degree: usize,
    components: Vec<Vec<Complex64>>,
}

/// Per-mode wavenumber tables of a grid.
pub(crate) struct ModeTable {
    pub shape: Vec<usize>,
    /// Derivative wavenumbers (Nyquist zeroed), one vector per axis.
    pub kappa: Vec<Vec<f64>>,
    /// True angular wavenumbers `2π k / L`.
    pub omega: Vec<Vec<f64>>,
    /// Parseval multiplicity of each last-axis position (1 or 2).
    pub weight_last: Vec<f64>,
}

impl ModeTable {
    pub fn new(grid: &TorusGrid) -> Self {
        let shape = grid.spectral_shape();
        let n = grid.dim();
        let r_last = grid.resolutions()[n - 1];
        let weight_last = (0..shape[n - 1])
            .map(|i| if i == 0 || i == r_last / 2 { 1.0 } else { 2.0 })
            .collect();
        ModeTable {
            kappa: (0..n).map(|a| grid.derivative_wavenumbers(a)).collect(),
            omega: (0..n).map(|a| grid.wavenumbers(a)).collect(),
            shape,
            weight_last,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    /// Calls `f(flat, idx)` for every stored mode, in storage order.
    pub fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let n = self.shape.len();
        let mut idx = vec![0usize; n];
        for flat in 0..self.len() {
            f(flat, &idx);
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < self.shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
    }

    /// Real multiplier evaluated on each mode from its derivative wavenumbers.
    pub fn multiplier_from_kappa(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut k = vec![0.0; self.shape.len()];
        self.for_each(|flat, idx| {
            for (a, &i) in idx.iter().enumerate() {
                k[a] = self.kappa[a][i];
            }
            out[flat] = f(&k);
        });
        out
    }

    /// Real multiplier evaluated on each mode from its true wavenumbers.
    pub fn multiplier_from_omega(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut k = vec![0.0; self.shape.len()];
        self.for_each(|flat, idx| {
            for (a, &i) in idx.iter().enumerate() {
                k[a] = self.omega[a][i];
            }
            out[flat] = f(&k);
        });
        out
    }

    /// Parseval weight of every stored mode.
    pub fn weights(&self) -> Vec<f64> {
        let last = self.shape.len() - 1;
        let mut out = vec![0.0; self.len()];
        self.for_each(|flat, idx| out[flat] = self.weight_last[idx[last]]);
        out
    }

    /// Derivative wavenumber of axis `a` on every stored mode.
    pub fn kappa_axis(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each(|flat, idx| out[flat] = self.kappa[axis][idx[axis]]);
        out
    }

    /// `|κ|²`, the Laplacian symbol.
    pub fn laplacian_symbol(&self) -> Vec<f64> {
        self.multiplier_from_kappa(|k| k.iter().map(|v| v * v).sum())
    }
}

/// Mode tables that every operator on a grid reuses.
pub(crate) struct Symbols {
    /// Derivative wavenumber of each axis on every stored mode.
    pub kappa: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub laplacian: Vec<f64>,
    /// `1/|κ|²` off the kernel, zero on it.
    pub inverse_laplacian: Vec<f64>,
    /// Indicator of the kernel of `|κ|²`.
    pub kernel: Vec<f64>,
}

const SYMBOL_CACHE_LIMIT: usize = 8;

/// Shared symbols of `grid`, built on first use.
pub(crate) fn symbols(grid: &TorusGrid) -> Arc<Symbols> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u64>, Arc<Symbols>>>> = OnceLock::new();
    let key: Vec<u64> = grid
        .resolutions()
        .iter()
        .map(|&r| r as u64)
        .chain(grid.periods().iter().map(|p| p.to_bits()))
        .collect();
    let mut map = CACHE.get_or_init(Default::default).lock().expect("symbol cache poisoned");
    if let Some(s) = map.get(&key) {
        return s.clone();
    }
    if map.len() >= SYMBOL_CACHE_LIMIT {
        map.clear();
    }
    let table = ModeTable::new(grid);
    let laplacian = table.laplacian_symbol();
    let s = Arc::new(Symbols {
        kappa: (0..grid.dim()).map(|a| table.kappa_axis(a)).collect(),
        weights: table.weights(),
        inverse_laplacian: laplacian.iter().map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 }).collect(),
        kernel: laplacian.iter().map(|&s| if s > 0.0 { 0.0 } else { 1.0 }).collect(),
        laplacian,
    });
    map.insert(key, s.clone());
    s
}

impl SpectralForm {
    pub fn zeros(grid: &TorusGrid, degree: usize) -> Result<Self> {
        let count = multi_indices(grid.dim(), degree)?.len();
        Ok(SpectralForm {
            grid: grid.clone(),
            degree,
            components: vec![vec![ZERO; grid.spectral_len()]; count],
        })
    }

    pub fn from_components(
        grid: &TorusGrid,
        degree: usize,
        components: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let count = multi_indices(grid.dim(), degree)?.len();
        if components.len() != count {
            return Err(HodgeError::Shape(format!(
                "{} components given for a degree-{degree} form in dimension {}",
                components.len(),
                grid.dim()
            )));
        }
        if components.iter().any(|c| c.len() != grid.spectral_len()) {
            return Err(HodgeError::Shape("spectral component length mismatch".into()));
        }
        Ok(SpectralForm {
            grid: grid.clone(),
            degree,
            components,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.components
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        multi_indices(self.grid.dim(), self.degree).expect("valid degree")
    }

    /// Coefficient of component `component` at signed frequency `k`, using
    /// Hermitian symmetry for frequencies outside the stored half spectrum.
    pub fn coefficient(&self, component: usize, k: &[i64]) -> Complex64 {
        let res = self.grid.resolutions();
        let n = res.len();
        let wrap = |k: i64, r: usize| k.rem_euclid(r as i64) as usize;
        let last = wrap(k[n - 1], res[n - 1]);
        let h = res[n - 1] / 2 + 1;
        let (pos, conj): (Vec<usize>, bool) = if last < h {
            ((0..n).map(|a| wrap(k[a], res[a])).collect(), false)
        } else {
            ((0..n).map(|a| wrap(-k[a], res[a])).collect(), true)
        };
        let shape = self.grid.spectral_shape();
        let flat = pos.iter().zip(&shape).fold(0, |acc, (&i, &s)| acc * s + i);
        let c = self.components[component][flat];
        if conj {
            c.conj()
        } else {
            c
        }
    }

    pub fn to_physical(&self) -> Form {
        let engine = fft::engine(&self.grid);
        let components = self.components.iter().map(|c| engine.inverse(c)).collect();
        Form::from_components(&self.grid, self.degree, components).expect("consistent shape")
    }

    fn map_components(&self, degree: usize, f: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Self {
        SpectralForm {
            grid: self.grid.clone(),
            degree,
            components: self.components.iter().map(|c| f(c)).collect(),
        }
    }

    /// Pointwise multiplication of every component by a real symbol.
    pub fn apply_multiplier(&self, symbol: &[f64]) -> Self {
        self.map_components(self.degree, |c| {
            c.iter().zip(symbol).map(|(&v, &s)| v * s).collect()
        })
    }

    pub fn exterior_derivative(&self) -> Result<Self> {
        let n = self.grid.dim();
        if self.degree >= n {
            return Err(HodgeError::Degree(format!(
                "cannot differentiate a top-degree ({}) form",
                self.degree
            )));
        }
        let symbols = symbols(&self.grid);
        let kappas = &symbols.kappa;
        let mut out = SpectralForm::zeros(&self.grid, self.degree + 1)?;
        for (pos, idx) in self.indices().iter().enumerate() {
            for (axis, kappa) in kappas.iter().enumerate() {
                let (sign, target) = merge_indices(&MultiIndex::single(axis), idx);
                let Some(target) = target else { continue };
                let t = index_position(n, &target);
                let s = sign as f64;
                for ((o, &v), &k) in out.components[t]
                    .iter_mut()
                    .zip(&self.components[pos])
                    .zip(kappa)
                {
                    *o += v * Complex64::new(0.0, s * k);
                }
            }
        }
        Ok(out)
    }

    /// `d* = -Σ_j ι_{∂_j} ∂_j` on the flat torus.
    pub fn codifferential(&self) -> Result<Self> {
        let n = self.grid.dim();
        if self.degree == 0 {
            return Err(HodgeError::Degree(
                "the codifferential of a function is undefined".into(),
            ));
        }
        let symbols = symbols(&self.grid);
        let kappas = &symbols.kappa;
        let mut out = SpectralForm::zeros(&self.grid, self.degree - 1)?;
        for (t, target) in out.indices().iter().enumerate() {
            for (axis, kappa) in kappas.iter().enumerate() {
                let (sign, source) = merge_indices(&MultiIndex::single(axis), target);
                let Some(source) = source else { continue };
                let s = index_position(n, &source);
                let factor = -(sign as f64);
                for ((o, &v), &k) in out.components[t]
                    .iter_mut()
                    .zip(&self.components[s])
                    .zip(kappa)
                {
                    *o += v * Complex64::new(0.0, factor * k);
                }
            }
        }
        Ok(out)
    }

    pub fn hodge_star(&self) -> Self {
        let n = self.grid.dim();
        let mut components = vec![Vec::new(); self.components.len()];
        for (pos, idx) in self.indices().iter().enumerate() {
            let (sign, comp) = star_complement(idx, n);
            let t = index_position(n, &comp);
            let s = sign as f64;
            components[t] = self.components[pos].iter().map(|&v| v * s).collect();
        }
        SpectralForm {
            grid: self.grid.clone(),
            degree: n - self.degree,
            components,
        }
    }

    pub fn laplacian(&self) -> Self {
        self.apply_multiplier(&symbols(&self.grid).laplacian)
    }

    /// Applies `Δ⁻¹` on modes with non-zero symbol and drops the kernel.
    pub fn inverse_laplacian(&self) -> Self {
        self.apply_multiplier(&symbols(&self.grid).inverse_laplacian)
    }

    /// Keeps only the kernel of the Laplacian symbol (the harmonic modes).
    pub fn kernel_part(&self) -> Self {
        self.apply_multiplier(&symbols(&self.grid).kernel)
    }

    /// Bessel potential `(1 + |2πk/L|²)^{-s/2}`.
    pub fn bessel_potential(&self, order: f64) -> Self {
        let symbol = ModeTable::new(&self.grid)
            .multiplier_from_omega(|k| (1.0 + k.iter().map(|v| v * v).sum::<f64>()).powf(-order / 2.0));
        self.apply_multiplier(&symbol)
    }

    /// Component means (the `k = 0` coefficients).
    pub fn means(&self) -> Vec<f64> {
        self.components.iter().map(|c| c[0].re).collect()
    }

    /// `∫ ⟨a, b⟩ dvol` computed by Parseval.
    pub fn l2_inner(&self, other: &SpectralForm) -> Result<f64> {
        self.check_compatible(other)?;
        let symbols = symbols(&self.grid);
        let mut total = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            let terms: Vec<f64> = a
                .iter()
                .zip(b)
                .zip(&symbols.weights)
                .map(|((x, y), w)| w * (x * y.conj()).re)
                .collect();
            total += crate::quadrature::pairwise_sum(&terms);
        }
        Ok(total * self.grid.volume())
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_inner(self).expect("self-compatible").max(0.0).sqrt()
    }

    fn check_compatible(&self, other: &SpectralForm) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(HodgeError::Grid("forms live on different grids".into()));
        }
        if self.degree != other.degree {
            return Err(HodgeError::Degree(format!(
                "degrees {} and {} differ",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralForm) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &SpectralForm) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_components(self.degree, |c| c.iter().map(|&v| v * factor).collect())
    }

    fn zip_with(&self, other: &SpectralForm, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        SpectralForm {
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

    /// Zero-padded copy on a finer grid (same periods). Used for de-aliased products.
    pub fn padded(&self, fine: &TorusGrid) -> Result<Self> {
        resample(self, fine)
    }

    /// Restriction to a coarser grid, discarding unresolved frequencies.
    pub fn truncated(&self, coarse: &TorusGrid) -> Result<Self> {
        resample(self, coarse)
    }

    /// Largest coefficient modulus over all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }
}

/// Copies every frequency representable on both grids; Nyquist content of the
/// coarser grid is dropped to keep the result Hermitian.
fn resample(src: &SpectralForm, target: &TorusGrid) -> Result<SpectralForm> {
    if target.dim() != src.grid.dim() || target.periods() != src.grid.periods() {
        return Err(HodgeError::Grid("resampling needs matching periods".into()));
    }
    let n = target.dim();
    let mut out = SpectralForm::zeros(target, src.degree)?;
    let src_res = src.grid.resolutions();
    let dst_res = target.resolutions();
    let limit: Vec<i64> = (0..n)
        .map(|a| (src_res[a].min(dst_res[a]) / 2) as i64)
        .collect();
    let table = ModeTable::new(target);
    let mut k = vec![0i64; n];
    table.for_each(|flat, idx| {
        let mut inside = true;
        for a in 0..n {
            k[a] = target.frequency(a, idx[a]);
            if a == n - 1 {
                k[a] = idx[a] as i64;
            }
            if k[a].abs() >= limit[a] {
                inside = false;
            }
        }
        if inside {
            for (c, comp) in out.components.iter_mut().enumerate() {
                comp[flat] = src.coefficient(c, &k);
            }
        }
    });
    Ok(out)
}
