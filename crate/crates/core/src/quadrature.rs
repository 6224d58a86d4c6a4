//! Trapezoidal quadrature on the periodic grid with a fixed pairwise summation
//! order, so results do not depend on thread count.

use crate::grid::TorusGrid;

const BLOCK: usize = 64;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..len` without materialising the terms.
pub fn pairwise_sum_by(len: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= BLOCK {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, len, f)
}

/// `∫ f dvol` for a scalar field sampled on the grid.
pub fn integrate(grid: &TorusGrid, field: &[f64]) -> f64 {
    grid.cell_volume() * pairwise_sum(field)
}
