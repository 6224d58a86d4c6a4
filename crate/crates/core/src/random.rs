//! Seeded random band-limited forms, generated directly in Fourier space.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::spectral::SpectralForm;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real form whose Fourier support is `max_i |k_i| ≤ bandwidth`.
/// Coefficients are uniform in the unit square, damped by `1/(1+|k|)`.
pub fn random_spectral_form(
    grid: &TorusGrid,
    degree: usize,
    bandwidth: usize,
    rng: &mut impl Rng,
) -> Result<SpectralForm> {
    let n = grid.dim();
    if 2 * bandwidth >= grid.min_resolution() {
        return Err(HodgeError::Resolution(format!(
            "bandwidth {bandwidth} not below the Nyquist frequency of {:?}",
            grid.resolutions()
        )));
    }
    let mut out = SpectralForm::zeros(grid, degree)?;
    let shape = grid.spectral_shape();
    let res = grid.resolutions().to_vec();
    let b = bandwidth as i64;
    let position = |k: &[i64]| -> usize {
        (0..n).fold(0, |acc, a| acc * shape[a] + k[a].rem_euclid(res[a] as i64) as usize)
    };
    let mut k = vec![0i64; n];
    for comp in out.components_mut() {
        // Odometer over [-b, b]^{n-1} × [0, b].
        k.iter_mut().for_each(|v| *v = -b);
        k[n - 1] = 0;
        loop {
            let norm = k.iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
            let damp = 1.0 / (1.0 + norm);
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp;
            comp[position(&k)] = c;
            let mut a = n - 1;
            loop {
                k[a] += 1;
                if k[a] <= b {
                    break;
                }
                k[a] = if a == n - 1 { 0 } else { -b };
                if a == 0 {
                    break;
                }
                a -= 1;
            }
            if k.iter().take(n - 1).all(|&v| v == -b) && k[n - 1] == 0 {
                break;
            }
        }
        hermitian_symmetrize(comp, grid, bandwidth);
    }
    Ok(out)
}

/// Makes the last-axis-zero plane Hermitian so that the field is real.
fn hermitian_symmetrize(comp: &mut [Complex64], grid: &TorusGrid, bandwidth: usize) {
    let n = grid.dim();
    let shape = grid.spectral_shape();
    let res = grid.resolutions();
    let b = bandwidth as i64;
    let position = |k: &[i64]| -> usize {
        (0..n).fold(0, |acc, a| acc * shape[a] + k[a].rem_euclid(res[a] as i64) as usize)
    };
    let count = (2 * bandwidth + 1).pow((n - 1) as u32);
    let mut k = vec![0i64; n];
    for m in 0..count {
        let mut rest = m;
        for a in (0..n - 1).rev() {
            k[a] = (rest % (2 * bandwidth + 1)) as i64 - b;
            rest /= 2 * bandwidth + 1;
        }
        k[n - 1] = 0;
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        // Keep the lexicographically positive representative.
        if k <= neg {
            continue;
        }
        let c = comp[position(&k)];
        comp[position(&neg)] = c.conj();
    }
    comp[0].im = 0.0;
}

pub fn random_form(grid: &TorusGrid, degree: usize, bandwidth: usize, rng: &mut impl Rng) -> Result<Form> {
    Ok(random_spectral_form(grid, degree, bandwidth, rng)?.to_physical())
}
