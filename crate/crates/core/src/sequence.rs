//! Families `{ω^n}` of forms with known weak limits: oscillations, concentrating
//! bubbles and mollified atoms, plus estimators for their pairing limits and
//! their defect measures `|ω^n − ω̄|^p dvol`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::extrapolate::{richardson, Extrapolation};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::multi_index::multi_indices;

/// Oscillations and bubbles must span at least this many grid points per unit of `1/n`.
pub const POINTS_PER_SCALE: usize = 16;

/// Coarse partition used by the measure estimates.
pub const DEFAULT_CELLS: usize = 8;

/// Cells holding less than this fraction of the total mass are never atom candidates.
pub const CANDIDATE_FRACTION: f64 = 1e-3;

/// Minimum mass retention under one halving of the scale for a concentration.
pub const RETENTION_THRESHOLD: f64 = 0.9;

pub fn check_resolution(grid: &TorusGrid, n: usize) -> Result<()> {
    if n == 0 || n * POINTS_PER_SCALE > grid.min_resolution() {
        return Err(HodgeError::Resolution(format!(
            "n = {n} needs at least {} points per axis, grid has {}",
            n * POINTS_PER_SCALE,
            grid.min_resolution()
        )));
    }
    Ok(())
}

/// A 1-periodic profile `h(t) = mean + Σ_m cos_m cos(2πmt) + sin_m sin(2πmt)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicProfile {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl PeriodicProfile {
    pub fn sine() -> Self {
        PeriodicProfile {
            mean: 0.0,
            cos: vec![],
            sin: vec![1.0],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.mean;
        for (m, c) in self.cos.iter().enumerate() {
            v += c * (2.0 * PI * (m + 1) as f64 * t).cos();
        }
        for (m, s) in self.sin.iter().enumerate() {
            v += s * (2.0 * PI * (m + 1) as f64 * t).sin();
        }
        v
    }

    pub fn harmonics(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// `(∫_0^1 h²)^{1/2}` from Parseval.
    pub fn l2_norm(&self) -> f64 {
        let oscill: f64 = self.cos.iter().chain(&self.sin).map(|c| c * c).sum();
        (self.mean * self.mean + 0.5 * oscill).sqrt()
    }
}

/// `h(n ξ·x/L) λ` for a constant-coefficient `λ`.
pub fn oscillator(
    grid: &TorusGrid,
    profile: &PeriodicProfile,
    xi: &[i64],
    degree: usize,
    lambda: &[f64],
    n: usize,
) -> Result<Form> {
    check_resolution(grid, n)?;
    if xi.len() != grid.dim() {
        return Err(HodgeError::Shape("frequency covector has the wrong length".into()));
    }
    let top = n as i64 * xi.iter().map(|v| v.abs()).max().unwrap_or(0) * profile.harmonics() as i64;
    if 2 * top >= grid.min_resolution() as i64 {
        return Err(HodgeError::Resolution(format!(
            "oscillation frequency {top} is not resolved on {:?}",
            grid.resolutions()
        )));
    }
    let periods = grid.periods().to_vec();
    let field = (0..grid.len())
        .map(|i| {
            let x = grid.point(i);
            let t: f64 = x.iter().zip(xi).zip(&periods).map(|((x, &k), l)| k as f64 * x / l).sum();
            profile.eval(n as f64 * t)
        })
        .collect::<Vec<_>>();
    let count = multi_indices(grid.dim(), degree)?.len();
    if lambda.len() != count {
        return Err(HodgeError::Shape(format!("{} coefficients for {count} components", lambda.len())));
    }
    Form::from_components(
        grid,
        degree,
        lambda.iter().map(|&c| field.iter().map(|f| c * f).collect()).collect(),
    )
}

/// Compactly supported bubble profiles on the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BubbleProfile {
    /// `(1 − |y|²)³`
    Radial,
    /// `y_axis (1 − |y|²)³`
    Dipole { axis: usize },
}

impl BubbleProfile {
    pub fn eval(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return 0.0;
        }
        let base = (1.0 - r2).powi(3);
        match *self {
            BubbleProfile::Radial => base,
            BubbleProfile::Dipole { axis } => y[axis] * base,
        }
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return vec![0.0; y.len()];
        }
        let s = 1.0 - r2;
        match *self {
            BubbleProfile::Radial => y.iter().map(|v| -6.0 * v * s * s).collect(),
            BubbleProfile::Dipole { axis } => y
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let own = if j == axis { s.powi(3) } else { 0.0 };
                    own - 6.0 * y[axis] * v * s * s
                })
                .collect(),
        }
    }
}

impl fmt::Display for BubbleProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BubbleProfile::Radial => write!(f, "radial"),
            BubbleProfile::Dipole { axis } => write!(f, "dipole{}", axis + 1),
        }
    }
}

/// Periodic displacement of every grid point from `center`, scaled by `n`.
fn scaled_offsets(grid: &TorusGrid, center: &[f64], n: f64, i: usize) -> Vec<f64> {
    grid.point(i)
        .iter()
        .enumerate()
        .map(|(a, &x)| n * grid.periodic_delta(a, center[a], x))
        .collect()
}

fn check_center(grid: &TorusGrid, center: &[f64]) -> Result<()> {
    if center.len() != grid.dim() {
        return Err(HodgeError::Shape("center has the wrong dimension".into()));
    }
    Ok(())
}

/// `amplitude · n^{(N−p)/p} Γ(n(x − x₀))`, periodised.
pub fn bubble(
    grid: &TorusGrid,
    profile: BubbleProfile,
    center: &[f64],
    p: f64,
    n: usize,
    amplitude: f64,
) -> Result<Form> {
    check_resolution(grid, n)?;
    check_center(grid, center)?;
    let dim = grid.dim() as f64;
    if !(p > 1.0 && p <= dim) {
        return Err(HodgeError::Exponent(format!("bubble exponent {p} outside (1, {dim}]")));
    }
    let nf = n as f64;
    let scale = amplitude * nf.powf((dim - p) / p);
    let field = (0..grid.len())
        .map(|i| scale * profile.eval(&scaled_offsets(grid, center, nf, i)))
        .collect();
    Form::from_components(grid, 0, vec![field])
}

/// Unnormalised mollifier `exp(−1/(1 − |y|²))`.
fn mollifier_shape(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// `∫_{ℝ^N} exp(−1/(1−|y|²)) dy` by composite Simpson in the radius.
pub fn mollifier_mass(dim: usize) -> f64 {
    let steps = 20_000;
    let h = 1.0 / steps as f64;
    let f = |r: f64| r.powi(dim as i32 - 1) * mollifier_shape(r * r);
    let mut s = f(0.0) + f(1.0);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    let sphere = match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("unsupported dimension {dim}"),
    };
    sphere * s * h / 3.0
}

/// `n^N ρ(n(x − x₀)) v` with `ρ` of unit mass.
pub fn mollified_atom(grid: &TorusGrid, degree: usize, v: &[f64], center: &[f64], n: usize) -> Result<Form> {
    mollified_family(grid, degree, &[(v.to_vec(), center.to_vec())], n)
}

/// Sum of mollified atoms `Σ n^N ρ(n(x − x_k)) v_k`.
pub fn mollified_family(
    grid: &TorusGrid,
    degree: usize,
    atoms: &[(Vec<f64>, Vec<f64>)],
    n: usize,
) -> Result<Form> {
    check_resolution(grid, n)?;
    let count = multi_indices(grid.dim(), degree)?.len();
    let nf = n as f64;
    let norm = nf.powi(grid.dim() as i32) / mollifier_mass(grid.dim());
    let mut out = Form::zeros(grid, degree)?;
    for (v, center) in atoms {
        check_center(grid, center)?;
        if v.len() != count {
            return Err(HodgeError::Shape(format!("{} coefficients for {count} components", v.len())));
        }
        let weights: Vec<f64> = (0..grid.len())
            .map(|i| {
                let y = scaled_offsets(grid, center, nf, i);
                norm * mollifier_shape(y.iter().map(|t| t * t).sum())
            })
            .collect();
        for (comp, &c) in out.components_mut().iter_mut().zip(v) {
            for (o, w) in comp.iter_mut().zip(&weights) {
                *o += c * w;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Oscillator,
    Bubble,
    MollifiedAtom,
    MollifiedFamily,
    Custom,
}

pub type Generator = Arc<dyn Fn(usize) -> Result<Form> + Send + Sync>;

/// A lazily generated family with its claimed weak limit.
#[derive(Clone)]
pub struct FormSequence {
    grid: TorusGrid,
    degree: usize,
    kind: SequenceKind,
    generator: Generator,
    claimed_limit: Form,
    schedule: Vec<usize>,
}

impl fmt::Debug for FormSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormSequence")
            .field("grid", &self.grid)
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

impl FormSequence {
    pub fn new(
        grid: &TorusGrid,
        degree: usize,
        kind: SequenceKind,
        generator: Generator,
        claimed_limit: Form,
        schedule: Vec<usize>,
    ) -> Result<Self> {
        if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HodgeError::Config(format!(
                "n schedule {schedule:?} must be non-empty and increasing"
            )));
        }
        for &n in &schedule {
            check_resolution(grid, n)?;
        }
        if claimed_limit.degree() != degree || !claimed_limit.grid().same_as(grid) {
            return Err(HodgeError::Shape("claimed limit does not match the sequence".into()));
        }
        Ok(FormSequence {
            grid: grid.clone(),
            degree,
            kind,
            generator,
            claimed_limit,
            schedule,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    pub fn claimed_limit(&self) -> &Form {
        &self.claimed_limit
    }

    pub fn member(&self, n: usize) -> Result<Form> {
        check_resolution(&self.grid, n)?;
        let form = (self.generator)(n)?;
        if form.degree() != self.degree || !form.grid().same_as(&self.grid) {
            return Err(HodgeError::Shape(format!("member n = {n} has the wrong shape")));
        }
        Ok(form)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakLimitRow {
    pub n: usize,
    pub test: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakLimitTable {
    pub rows: Vec<WeakLimitRow>,
    /// One entry per test form.
    pub limits: Vec<Extrapolation>,
}

/// Pairings `∫ ω^n ∧ Ξ_j` over the schedule and their extrapolated limits.
pub fn weak_limit_estimate(seq: &FormSequence, tests: &[Form]) -> Result<WeakLimitTable> {
    let n_dim = seq.grid.dim();
    if let Some(t) = tests.iter().find(|t| t.degree() + seq.degree != n_dim) {
        return Err(HodgeError::Degree(format!(
            "test of degree {} cannot pair with degree {}",
            t.degree(),
            seq.degree
        )));
    }
    let mut rows = Vec::new();
    let mut per_test = vec![Vec::new(); tests.len()];
    for &n in &seq.schedule {
        let member = seq.member(n)?;
        for (j, t) in tests.iter().enumerate() {
            let value = member.pair_with_test(t)?;
            per_test[j].push(value);
            rows.push(WeakLimitRow { n, test: j, value });
        }
    }
    let limits = per_test.iter().map(|v| richardson(&seq.schedule, v)).collect();
    Ok(WeakLimitTable { rows, limits })
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectedAtom {
    pub location: Vec<f64>,
    pub mass: f64,
    /// Mass of the `3^N` block of coarse cells around the atom.
    pub cell_mass: f64,
    pub retention: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadonMeasureEstimate {
    pub cells_per_axis: usize,
    pub cell_masses: Vec<f64>,
    pub total_mass: f64,
    pub atoms: Vec<DetectedAtom>,
    pub diffuse_mass: f64,
}

/// Mass of `density dvol` in each cell of a `cells^N` partition.
pub fn cell_masses(grid: &TorusGrid, density: &[f64], cells: usize) -> Vec<f64> {
    let n = grid.dim();
    let res = grid.resolutions();
    let mut out = vec![0.0; cells.pow(n as u32)];
    let vol = grid.cell_volume();
    for (i, d) in density.iter().enumerate() {
        let idx = grid.unravel(i);
        let cell = (0..n).fold(0, |acc, a| acc * cells + idx[a] * cells / res[a]);
        out[cell] += d * vol;
    }
    out
}

/// Visits the grid points of the periodic box `|x_a − c_a| ≤ half_width`,
/// passing the flat index and the displacement from `center`.
pub(crate) fn for_each_in_box(
    grid: &TorusGrid,
    center: &[f64],
    half_width: f64,
    mut f: impl FnMut(usize, &[f64]),
) {
    let n = grid.dim();
    let res = grid.resolutions();
    let ranges: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|a| {
            let h = grid.spacing(a);
            let lo = ((center[a] - half_width) / h).ceil() as i64;
            let hi = ((center[a] + half_width) / h).floor() as i64;
            let hi = hi.min(lo + res[a] as i64 - 1);
            (lo..=hi)
                .map(|i| (i.rem_euclid(res[a] as i64) as usize, i as f64 * h - center[a]))
                .collect()
        })
        .collect();
    if ranges.iter().any(|r| r.is_empty()) {
        return;
    }
    let mut pos = vec![0usize; n];
    let mut idx = vec![0usize; n];
    let mut delta = vec![0.0; n];
    loop {
        for a in 0..n {
            let (i, d) = ranges[a][pos[a]];
            idx[a] = i;
            delta[a] = d;
        }
        f(grid.ravel(&idx), &delta);
        let mut a = n;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            pos[a] += 1;
            if pos[a] < ranges[a].len() {
                break;
            }
            pos[a] = 0;
        }
    }
}

/// Mass of `density dvol` in a periodic box or ball around `center`.
pub(crate) fn local_mass(grid: &TorusGrid, density: &[f64], center: &[f64], half_width: f64, ball: bool) -> f64 {
    let mut total = 0.0;
    let r2max = half_width * half_width;
    for_each_in_box(grid, center, half_width, |i, d| {
        if !ball || d.iter().map(|v| v * v).sum::<f64>() <= r2max {
            total += density[i];
        }
    });
    total * grid.cell_volume()
}

fn cell_center(cell: &[usize], cells: usize, grid: &TorusGrid) -> Vec<f64> {
    cell.iter()
        .enumerate()
        .map(|(a, &c)| (c as f64 + 0.5) * grid.periods()[a] / cells as f64)
        .collect()
}

/// Estimates the limit measure from densities at two consecutive `n`.
///
/// A candidate cell hosts an atom when the mass in a box shrinking like `1/n`
/// around its centroid is retained between the two levels; equidistributed
/// mass keeps only the volume fraction `(n_prev/n_last)^N`.
pub fn estimate_measure(
    grid: &TorusGrid,
    density_prev: &[f64],
    n_prev: usize,
    density_last: &[f64],
    n_last: usize,
    cells: usize,
) -> RadonMeasureEstimate {
    let n = grid.dim();
    let masses = cell_masses(grid, density_last, cells);
    let total: f64 = masses.iter().sum();
    let width = grid.periods().iter().cloned().fold(f64::INFINITY, f64::min) / cells as f64;
    let mut order: Vec<usize> = (0..masses.len()).collect();
    order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]).then(a.cmp(&b)));
    let mut atoms: Vec<DetectedAtom> = Vec::new();
    for &c in &order {
        if total <= 0.0 || masses[c] < CANDIDATE_FRACTION * total {
            break;
        }
        let mut cell = vec![0usize; n];
        let mut rest = c;
        for a in (0..n).rev() {
            cell[a] = rest % cells;
            rest /= cells;
        }
        let center = cell_center(&cell, cells, grid);
        // Centroid over the 3^N block.
        let mut weight = 0.0;
        let mut moment = vec![0.0; n];
        for_each_in_box(grid, &center, 1.5 * width, |i, d| {
            weight += density_last[i];
            for a in 0..n {
                moment[a] += density_last[i] * d[a];
            }
        });
        if weight <= 0.0 {
            continue;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|a| (center[a] + moment[a] / weight).rem_euclid(grid.periods()[a]))
            .collect();
        if atoms.iter().any(|at| {
            (0..n).all(|a| grid.periodic_delta(a, at.location[a], centroid[a]).abs() < width)
        }) {
            continue;
        }
        let before = local_mass(grid, density_prev, &centroid, 0.5 * width, false);
        let after = local_mass(
            grid,
            density_last,
            &centroid,
            0.5 * width * n_prev as f64 / n_last as f64,
            false,
        );
        let retention = if before > 0.0 { after / before } else { 0.0 };
        if retention < RETENTION_THRESHOLD {
            continue;
        }
        let radius = (1.5 / n_last as f64).clamp(0.5 * width, width);
        atoms.push(DetectedAtom {
            mass: local_mass(grid, density_last, &centroid, radius, true),
            cell_mass: local_mass(grid, density_last, &centroid, 1.5 * width, false),
            location: centroid,
            retention,
        });
    }
    let atom_mass: f64 = atoms.iter().map(|a| a.mass).sum();
    RadonMeasureEstimate {
        cells_per_axis: cells,
        cell_masses: masses,
        total_mass: total,
        diffuse_mass: total - atom_mass,
        atoms,
    }
}

/// `|ω − ω̄|^p` at every grid point.
pub fn defect_density(member: &Form, limit: &Form, p: f64) -> Result<Vec<f64>> {
    let diff = member.sub(limit)?;
    Ok(diff
        .modulus_squared()
        .into_iter()
        .map(|m| m.powf(0.5 * p))
        .collect())
}

/// Measure estimate for `|ω^n − ω̄|^p dvol` from the last two members of the schedule.
pub fn measure_limit_estimate(seq: &FormSequence, limit: &Form, p: f64) -> Result<RadonMeasureEstimate> {
    if p.is_nan() || p < 1.0 {
        return Err(HodgeError::Exponent(format!("exponent {p} below 1")));
    }
    let s = seq.schedule();
    if s.len() < 2 {
        return Err(HodgeError::Config("measure estimates need at least two values of n".into()));
    }
    let (n_prev, n_last) = (s[s.len() - 2], s[s.len() - 1]);
    let prev = defect_density(&seq.member(n_prev)?, limit, p)?;
    let last = defect_density(&seq.member(n_last)?, limit, p)?;
    Ok(estimate_measure(seq.grid(), &prev, n_prev, &last, n_last, DEFAULT_CELLS))
}
