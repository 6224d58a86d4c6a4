//! Multi-dimensional real FFTs on the torus grid.
//!
//! The forward transform is normalised by `1/M` (`M` = number of grid points) so
//! that coefficients are Fourier-series coefficients `f(x) = Σ_k c_k e^{2πi k·x/L}`.
//! Only the half spectrum along the last axis is stored.
//!
//! Lines that are identically zero are skipped, which makes inverse transforms of
//! band-limited spectra considerably cheaper.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::grid::TorusGrid;

const BATCH_ELEMENTS: usize = 8192;

pub struct FftEngine {
    shape: Vec<usize>,
    spec_shape: Vec<usize>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

fn cache() -> &'static Mutex<HashMap<Vec<usize>, Arc<FftEngine>>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<FftEngine>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared engine for the grid's resolution vector.
pub fn engine(grid: &TorusGrid) -> Arc<FftEngine> {
    let key = grid.resolutions().to_vec();
    let mut map = cache().lock().expect("fft cache poisoned");
    map.entry(key.clone())
        .or_insert_with(|| Arc::new(FftEngine::new(&key)))
        .clone()
}

impl FftEngine {
    fn new(shape: &[usize]) -> Self {
        let n = shape.len();
        let last = shape[n - 1];
        let mut real_planner = RealFftPlanner::<f64>::new();
        let mut planner = FftPlanner::<f64>::new();
        let mut spec_shape = shape.to_vec();
        spec_shape[n - 1] = last / 2 + 1;
        FftEngine {
            shape: shape.to_vec(),
            spec_shape,
            r2c: real_planner.plan_fft_forward(last),
            c2r: real_planner.plan_fft_inverse(last),
            forward: shape[..n - 1]
                .iter()
                .map(|&r| planner.plan_fft_forward(r))
                .collect(),
            inverse: shape[..n - 1]
                .iter()
                .map(|&r| planner.plan_fft_inverse(r))
                .collect(),
        }
    }

    pub fn physical_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn spectral_len(&self) -> usize {
        self.spec_shape.iter().product()
    }

    /// Physical samples to normalised half-spectrum coefficients.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        assert_eq!(data.len(), self.physical_len(), "physical length mismatch");
        let n = self.shape.len();
        let r = self.shape[n - 1];
        let h = self.spec_shape[n - 1];
        let lines = data.len() / r;
        let mut out = vec![Complex64::new(0.0, 0.0); lines * h];
        let mut input = vec![0.0; r];
        let mut scratch = self.r2c.make_scratch_vec();
        for l in 0..lines {
            let src = &data[l * r..(l + 1) * r];
            if src.iter().all(|&v| v == 0.0) {
                continue;
            }
            input.copy_from_slice(src);
            self.r2c
                .process_with_scratch(&mut input, &mut out[l * h..(l + 1) * h], &mut scratch)
                .expect("r2c length mismatch");
        }
        for axis in (0..n - 1).rev() {
            self.transform_axis(&mut out, axis, &self.forward[axis]);
        }
        let scale = 1.0 / self.physical_len() as f64;
        for c in &mut out {
            *c *= scale;
        }
        out
    }

    /// Half-spectrum coefficients back to physical samples.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        assert_eq!(spectrum.len(), self.spectral_len(), "spectral length mismatch");
        let n = self.shape.len();
        let r = self.shape[n - 1];
        let h = self.spec_shape[n - 1];
        let mut buf = spectrum.to_vec();
        for axis in 0..n - 1 {
            self.transform_axis(&mut buf, axis, &self.inverse[axis]);
        }
        let lines = buf.len() / h;
        let mut out = vec![0.0; lines * r];
        let mut scratch = self.c2r.make_scratch_vec();
        for l in 0..lines {
            let line = &mut buf[l * h..(l + 1) * h];
            if line.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                continue;
            }
            // The DC and Nyquist bins of a real line are real; drop round-off.
            line[0].im = 0.0;
            line[h - 1].im = 0.0;
            self.c2r
                .process_with_scratch(line, &mut out[l * r..(l + 1) * r], &mut scratch)
                .expect("c2r length mismatch");
        }
        out
    }

    fn transform_axis(&self, buf: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let len = self.spec_shape[axis];
        let stride: usize = self.spec_shape[axis + 1..].iter().product();
        let outer: usize = self.spec_shape[..axis].iter().product();
        let batch = (BATCH_ELEMENTS / len).clamp(1, stride);
        let zero = Complex64::new(0.0, 0.0);
        let mut work = vec![zero; batch * len];
        let mut scratch = vec![zero; plan.get_inplace_scratch_len()];
        let mut active: Vec<usize> = Vec::with_capacity(batch);
        for o in 0..outer {
            let base = o * len * stride;
            let mut j0 = 0;
            while j0 < stride {
                let nb = batch.min(stride - j0);
                active.clear();
                for b in 0..nb {
                    let j = j0 + b;
                    let slot = active.len();
                    let dst = &mut work[slot * len..(slot + 1) * len];
                    let mut nonzero = false;
                    for (t, d) in dst.iter_mut().enumerate() {
                        let v = buf[base + j + t * stride];
                        nonzero |= v.re != 0.0 || v.im != 0.0;
                        *d = v;
                    }
                    if nonzero {
                        active.push(j);
                    }
                }
                if !active.is_empty() {
                    let used = active.len() * len;
                    plan.process_with_scratch(&mut work[..used], &mut scratch);
                    for (slot, &j) in active.iter().enumerate() {
                        let src = &work[slot * len..(slot + 1) * len];
                        for (t, &v) in src.iter().enumerate() {
                            buf[base + j + t * stride] = v;
                        }
                    }
                }
                j0 += nb;
            }
        }
    }
}
