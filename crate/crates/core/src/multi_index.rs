//! Increasing multi-indices labelling the coframe basis `dx_I`, together with
//! the sign bookkeeping needed by the wedge product and the Hodge star.
//!
//! Axes are numbered from zero: `(0, 2)` stands for `dx_1 ∧ dx_3`.

use std::fmt;

use crate::error::{HodgeError, Result};

/// A strictly increasing tuple of axes, i.e. one basis element of `⋀^ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    axes: Vec<usize>,
}

impl MultiIndex {
    /// Builds an index from axes that must be strictly increasing.
    pub fn new(axes: Vec<usize>) -> Result<Self> {
        if axes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HodgeError::Degree(format!(
                "multi-index {axes:?} is not strictly increasing"
            )));
        }
        Ok(MultiIndex { axes })
    }

    pub fn empty() -> Self {
        MultiIndex { axes: Vec::new() }
    }

    pub fn single(axis: usize) -> Self {
        MultiIndex { axes: vec![axis] }
    }

    pub fn degree(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.axes.binary_search(&axis).is_ok()
    }

    /// Bitmask with bit `a` set for every axis `a` in the index.
    pub fn mask(&self) -> u32 {
        self.axes.iter().fold(0, |m, &a| m | (1 << a))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.axes.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.axes.iter().map(|a| format!("dx{}", a + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

impl serde::Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All degree-`degree` multi-indices in dimension `dim`, lexicographically ordered.
pub fn multi_indices(dim: usize, degree: usize) -> Result<Vec<MultiIndex>> {
    if degree > dim {
        return Err(HodgeError::Degree(format!(
            "degree {degree} out of range for dimension {dim}"
        )));
    }
    let mut out = Vec::with_capacity(binomial(dim, degree));
    let mut current = Vec::with_capacity(degree);
    fn recurse(
        start: usize,
        dim: usize,
        remaining: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<MultiIndex>,
    ) {
        if remaining == 0 {
            out.push(MultiIndex {
                axes: current.clone(),
            });
            return;
        }
        for a in start..=dim - remaining {
            current.push(a);
            recurse(a + 1, dim, remaining - 1, current, out);
            current.pop();
        }
    }
    recurse(0, dim, degree, &mut current, &mut out);
    Ok(out)
}

/// Position of `index` inside `multi_indices(dim, index.degree())`.
pub fn index_position(dim: usize, index: &MultiIndex) -> usize {
    // Lexicographic rank of a combination.
    let k = index.degree();
    let mut rank = 0;
    let mut prev: isize = -1;
    for (i, &a) in index.axes.iter().enumerate() {
        for skipped in (prev + 1) as usize..a {
            rank += binomial(dim - 1 - skipped, k - 1 - i);
        }
        prev = a as isize;
    }
    rank
}

/// `dx_I ∧ dx_J = sign · dx_K`. The sign is zero when the indices overlap.
pub fn merge_indices(i: &MultiIndex, j: &MultiIndex) -> (i8, Option<MultiIndex>) {
    if i.mask() & j.mask() != 0 {
        return (0, None);
    }
    // Parity of the shuffle equals the number of pairs (a in I, b in J) with a > b.
    let inversions: usize = i
        .axes
        .iter()
        .map(|&a| j.axes.iter().filter(|&&b| a > b).count())
        .sum();
    let mut merged: Vec<usize> = i.axes.iter().chain(j.axes.iter()).copied().collect();
    merged.sort_unstable();
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    (sign, Some(MultiIndex { axes: merged }))
}

/// Complement index with the sign making `dx_I ∧ (sign · dx_{I^c}) = dvol`.
pub fn star_complement(i: &MultiIndex, dim: usize) -> (i8, MultiIndex) {
    let complement = MultiIndex {
        axes: (0..dim).filter(|a| !i.contains(*a)).collect(),
    };
    let (sign, _) = merge_indices(i, &complement);
    (sign, complement)
}
