//! Flat periodic grids. Points are stored row-major with axis 0 slowest.

use serde::{Deserialize, Serialize};

use crate::error::{HodgeError, Result};

pub const MIN_RESOLUTION: usize = 8;

/// A flat torus `∏ [0, L_i)` sampled at `R_i` equispaced points per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    resolutions: Vec<usize>,
    periods: Vec<f64>,
}

impl TorusGrid {
    pub fn new(resolutions: Vec<usize>, periods: Vec<f64>) -> Result<Self> {
        let dim = resolutions.len();
        if !(2..=3).contains(&dim) {
            return Err(HodgeError::Grid(format!(
                "dimension must be 2 or 3, got {dim}"
            )));
        }
        if periods.len() != dim {
            return Err(HodgeError::Grid(format!(
                "{} periods given for a {dim}-dimensional grid",
                periods.len()
            )));
        }
        for &r in &resolutions {
            if r < MIN_RESOLUTION || r % 2 != 0 {
                return Err(HodgeError::Grid(format!(
                    "resolution {r} must be even and at least {MIN_RESOLUTION}"
                )));
            }
        }
        for &l in &periods {
            if !(l.is_finite() && l > 0.0) {
                return Err(HodgeError::Grid(format!("period {l} must be positive")));
            }
        }
        Ok(TorusGrid {
            resolutions,
            periods,
        })
    }

    /// Unit periods in every direction.
    pub fn unit(resolutions: &[usize]) -> Result<Self> {
        Self::new(resolutions.to_vec(), vec![1.0; resolutions.len()])
    }

    pub fn dim(&self) -> usize {
        self.resolutions.len()
    }

    pub fn resolutions(&self) -> &[usize] {
        &self.resolutions
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.resolutions.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn min_resolution(&self) -> usize {
        *self.resolutions.iter().min().expect("non-empty grid")
    }

    pub fn cell_volume(&self) -> f64 {
        self.resolutions
            .iter()
            .zip(&self.periods)
            .map(|(&r, &l)| l / r as f64)
            .product()
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.resolutions[axis] as f64
    }

    /// Row-major strides of the physical layout.
    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.resolutions)
    }

    /// Multi-index of a flat point index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.resolutions[a];
            flat /= self.resolutions[a];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.resolutions)
            .fold(0, |acc, (&i, &r)| acc * r + i)
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    /// Physical coordinates of every grid point along one axis.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.resolutions[axis])
            .map(|i| self.coordinate(axis, i))
            .collect()
    }

    /// Coordinates of a flat point index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coordinate(a, i))
            .collect()
    }

    /// Shortest signed displacement from `from` to `to` on the circle of period `L_axis`.
    pub fn periodic_delta(&self, axis: usize, from: f64, to: f64) -> f64 {
        let l = self.periods[axis];
        let mut d = (to - from) % l;
        if d >= 0.5 * l {
            d -= l;
        } else if d < -0.5 * l {
            d += l;
        }
        d
    }

    /// Shape of the half spectrum: the last axis keeps `R/2 + 1` non-negative frequencies.
    pub fn spectral_shape(&self) -> Vec<usize> {
        let mut shape = self.resolutions.clone();
        let last = shape.len() - 1;
        shape[last] = shape[last] / 2 + 1;
        shape
    }

    pub fn spectral_len(&self) -> usize {
        self.spectral_shape().iter().product()
    }

    /// Signed integer frequency stored at position `i` of `axis` in the half spectrum.
    /// Nyquist entries report `-R/2`.
    pub fn frequency(&self, axis: usize, i: usize) -> i64 {
        let r = self.resolutions[axis] as i64;
        let i = i as i64;
        if i < r / 2 {
            i
        } else {
            i - r
        }
    }

    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.resolutions[axis] / 2
    }

    /// Angular wavenumbers `2π k / L` per axis, with Nyquist entries reported separately.
    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        let n = self.spectral_shape()[axis];
        (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * self.frequency(axis, i) as f64 / self.periods[axis])
            .collect()
    }

    /// Wavenumbers used by first-order derivatives: Nyquist modes are annihilated.
    pub fn derivative_wavenumbers(&self, axis: usize) -> Vec<f64> {
        let mut k = self.wavenumbers(axis);
        let ny = self.resolutions[axis] / 2;
        if ny < k.len() {
            k[ny] = 0.0;
        }
        k
    }

    pub fn same_as(&self, other: &TorusGrid) -> bool {
        self == other
    }

    /// Same periods, every resolution multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<TorusGrid> {
        TorusGrid::new(
            self.resolutions.iter().map(|r| r * factor).collect(),
            self.periods.clone(),
        )
    }
}

pub(crate) fn strides_of(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    strides
}
