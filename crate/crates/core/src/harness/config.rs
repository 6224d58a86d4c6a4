//! Flat key-value experiment configuration.
//!
//! Files are INI; every entry is addressed as `section.key`. Each experiment
//! ships a complete default table, user files may only override known keys,
//! and the canonical form (sorted `key=value` lines) is what gets hashed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use ini::Ini;
use sha2::{Digest, Sha256};

use crate::error::{HodgeError, Result};
use crate::form::Form;
use crate::grid::TorusGrid;
use crate::multi_index::multi_indices;
use crate::sequence::{self, BubbleProfile, FormSequence, Generator, PeriodicProfile, SequenceKind};

/// Keys accepted in any factor section, whatever the defaults contain.
pub const FACTOR_KEYS: &[&str] = &[
    "kind",
    "degree",
    "profile",
    "xi",
    "lambda",
    "center",
    "exponent",
    "amplitude",
    "v",
    "modes",
    "background",
    "decay_modes",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<String, String>,
}

fn config_err(msg: impl Into<String>) -> HodgeError {
    HodgeError::Config(msg.into())
}

impl Settings {
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Settings {
            entries: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn parse_ini(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| config_err(format!("malformed config: {e}")))?;
        let mut entries = BTreeMap::new();
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let key = match section {
                    Some(s) => format!("{}.{}", s.trim(), k.trim()),
                    None => k.trim().to_string(),
                };
                entries.insert(key, v.trim().to_string());
            }
        }
        Ok(Settings { entries })
    }

    /// Overrides entries with `other`, rejecting keys the defaults do not know.
    pub fn merge_strict(&mut self, other: &Settings, factor_sections: &[&str]) -> Result<()> {
        for (k, v) in &other.entries {
            let known = self.entries.contains_key(k)
                || k.split_once('.').is_some_and(|(s, key)| {
                    factor_sections.contains(&s) && FACTOR_KEYS.contains(&key)
                });
            if !known {
                return Err(config_err(format!("unknown config key '{k}'")));
            }
            self.entries.insert(k.clone(), v.clone());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| config_err(format!("missing config key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(self.str(key)?).map_err(|e| config_err(format!("{key}: {e}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.str(key)?
            .parse()
            .map_err(|_| config_err(format!("{key}: expected a non-negative integer")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.str(key)?
            .parse()
            .map_err(|_| config_err(format!("{key}: expected an unsigned integer")))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.str(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(config_err(format!("{key}: expected a boolean, got '{other}'"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        parse_list(self.str(key)?, parse_f64).map_err(|e| config_err(format!("{key}: {e}")))
    }

    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        parse_list(self.str(key)?, |s| s.parse::<usize>().map_err(|e| e.to_string()))
            .map_err(|e| config_err(format!("{key}: {e}")))
    }

    pub fn i64_list(&self, key: &str) -> Result<Vec<i64>> {
        parse_list(self.str(key)?, |s| s.parse::<i64>().map_err(|e| e.to_string()))
            .map_err(|e| config_err(format!("{key}: {e}")))
    }

    /// Semicolon-separated points, each a comma-separated coordinate list.
    pub fn points(&self, key: &str) -> Result<Vec<Vec<f64>>> {
        let text = self.str(key)?;
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        text.split(';')
            .map(|p| parse_list(p, parse_f64).map_err(|e| config_err(format!("{key}: {e}"))))
            .collect()
    }

    /// `key=value` lines sorted by key.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        let res = parse_grid_spec(self.str("grid.resolution")?)?;
        let periods = if self.contains("grid.periods") {
            self.f64_list("grid.periods")?
        } else {
            vec![1.0; res.len()]
        };
        TorusGrid::new(res, periods)
    }
}

/// Accepts plain numbers and the fraction form `a/b`.
pub fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
        return Ok(a / b);
    }
    s.parse().map_err(|_| format!("bad number '{s}'"))
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| f(t.trim())).collect()
}

/// `256x256` or `64x64x64`.
pub fn parse_grid_spec(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| config_err(format!("bad grid specification '{s}'")))
        })
        .collect()
}

/// How the members of one factor sequence are produced.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorKind {
    /// `h(n ξ·x) λ`.
    Oscillator { profile: PeriodicProfile, xi: Vec<i64>, lambda: Vec<f64> },
    /// Scalar bubble `n^{(N−p)/p} Γ(n(x − x₀))`.
    Bubble { profile: BubbleProfile, center: Vec<f64>, exponent: f64, amplitude: f64 },
    /// Spectral `d` of the scalar bubble; exactly closed.
    BubbleGradient { profile: BubbleProfile, center: Vec<f64>, exponent: f64, amplitude: f64 },
    /// `n^N ρ(n(x − x₀)) v`.
    MollifiedAtom { v: Vec<f64>, center: Vec<f64> },
    /// Fixed trigonometric form `Σ amp cos(2π k·x/L + phase) dx_I`.
    Smooth { modes: Vec<SmoothMode> },
    /// Only the background.
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMode {
    pub component: usize,
    pub k: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

/// One factor of a product experiment: a sequence plus a constant background
/// and optional smooth modes whose amplitude decays like `1/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec {
    pub degree: usize,
    pub kind: FactorKind,
    pub background: Vec<f64>,
    pub decaying: Vec<SmoothMode>,
}

fn parse_profile(s: &str) -> Result<BubbleProfile> {
    match s {
        "radial" => Ok(BubbleProfile::Radial),
        _ => s
            .strip_prefix("dipole")
            .and_then(|a| a.parse::<usize>().ok())
            .filter(|&a| a >= 1)
            .map(|a| BubbleProfile::Dipole { axis: a - 1 })
            .ok_or_else(|| config_err(format!("unknown bubble profile '{s}'"))),
    }
}

fn parse_periodic_profile(s: &str) -> Result<PeriodicProfile> {
    match s {
        "sine" | "sin" => Ok(PeriodicProfile::sine()),
        "cosine" | "cos" => Ok(PeriodicProfile {
            mean: 0.0,
            cos: vec![1.0],
            sin: vec![],
        }),
        other => Err(config_err(format!("unknown periodic profile '{other}'"))),
    }
}

/// Adds `scale · Σ amp cos(2π k·x/L + phase)` to the named components.
fn add_modes(form: &mut Form, modes: &[SmoothMode], scale: f64) {
    let grid = form.grid().clone();
    let periods = grid.periods().to_vec();
    for m in modes {
        let comp = &mut form.components_mut()[m.component];
        for (i, v) in comp.iter_mut().enumerate() {
            let x = grid.point(i);
            let t: f64 = x.iter().zip(&m.k).zip(&periods).map(|((x, &k), l)| k as f64 * x / l).sum();
            *v += scale * m.amplitude * (2.0 * PI * t + m.phase).cos();
        }
    }
}

/// `component:k1,k2:amplitude:phase|...`
fn parse_modes(s: &str) -> Result<Vec<SmoothMode>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split('|')
        .map(|m| {
            let parts: Vec<&str> = m.split(':').collect();
            if parts.len() != 4 {
                return Err(config_err(format!("bad mode '{m}'")));
            }
            Ok(SmoothMode {
                component: parts[0].trim().parse().map_err(|_| config_err(format!("bad mode '{m}'")))?,
                k: parse_list(parts[1], |t| t.parse::<i64>().map_err(|e| e.to_string()))
                    .map_err(config_err)?,
                amplitude: parse_f64(parts[2]).map_err(config_err)?,
                phase: parse_f64(parts[3]).map_err(config_err)?,
            })
        })
        .collect()
}

impl FactorSpec {
    pub fn from_settings(s: &Settings, section: &str, dim: usize) -> Result<Self> {
        let key = |k: &str| format!("{section}.{k}");
        let degree = s.usize(&key("degree"))?;
        let count = multi_indices(dim, degree)?.len();
        let background = if s.contains(&key("background")) {
            s.f64_list(&key("background"))?
        } else {
            vec![0.0; count]
        };
        if background.len() != count {
            return Err(config_err(format!(
                "{section}.background needs {count} coefficients for degree {degree}"
            )));
        }
        let center = || -> Result<Vec<f64>> {
            let c = s.f64_list(&key("center"))?;
            if c.len() != dim {
                return Err(config_err(format!("{section}.center needs {dim} coordinates")));
            }
            Ok(c)
        };
        let decaying = if s.contains(&key("decay_modes")) {
            parse_modes(s.str(&key("decay_modes"))?)?
        } else {
            Vec::new()
        };
        if decaying.iter().any(|m| m.component >= count || m.k.len() != dim) {
            return Err(config_err(format!("{section}.decay_modes do not fit degree {degree}")));
        }
        let kind = match s.str(&key("kind"))? {
            "oscillator" => {
                let lambda = s.f64_list(&key("lambda"))?;
                if lambda.len() != count {
                    return Err(config_err(format!("{section}.lambda needs {count} coefficients")));
                }
                FactorKind::Oscillator {
                    profile: parse_periodic_profile(s.str(&key("profile"))?)?,
                    xi: s.i64_list(&key("xi"))?,
                    lambda,
                }
            }
            kind @ ("bubble" | "bubble_gradient") => {
                let profile = parse_profile(s.str(&key("profile"))?)?;
                if let BubbleProfile::Dipole { axis } = profile {
                    if axis >= dim {
                        return Err(config_err(format!("{section}.profile axis out of range")));
                    }
                }
                let (exponent, amplitude) = (s.f64(&key("exponent"))?, s.f64(&key("amplitude"))?);
                let expected = if kind == "bubble" { 0 } else { 1 };
                if degree != expected {
                    return Err(config_err(format!("{section}: {kind} has degree {expected}")));
                }
                let center = center()?;
                if kind == "bubble" {
                    FactorKind::Bubble { profile, center, exponent, amplitude }
                } else {
                    FactorKind::BubbleGradient { profile, center, exponent, amplitude }
                }
            }
            "mollified_atom" => {
                let v = s.f64_list(&key("v"))?;
                if v.len() != count {
                    return Err(config_err(format!("{section}.v needs {count} coefficients")));
                }
                FactorKind::MollifiedAtom { v, center: center()? }
            }
            "smooth" => {
                let modes = parse_modes(s.str(&key("modes"))?)?;
                if modes.iter().any(|m| m.component >= count || m.k.len() != dim) {
                    return Err(config_err(format!("{section}.modes do not fit degree {degree}")));
                }
                FactorKind::Smooth { modes }
            }
            "constant" => FactorKind::Constant,
            other => return Err(config_err(format!("unknown sequence kind '{other}' in [{section}]"))),
        };
        Ok(FactorSpec { degree, kind, background, decaying })
    }

    pub fn sequence_kind(&self) -> SequenceKind {
        match self.kind {
            FactorKind::Oscillator { .. } => SequenceKind::Oscillator,
            FactorKind::Bubble { .. } | FactorKind::BubbleGradient { .. } => SequenceKind::Bubble,
            FactorKind::MollifiedAtom { .. } => SequenceKind::MollifiedAtom,
            FactorKind::Smooth { .. } | FactorKind::Constant => SequenceKind::Custom,
        }
    }

    /// Exponent used for the defect density `|ω^n − ω̄|^p` when the factor fixes one.
    pub fn native_exponent(&self) -> Option<f64> {
        match self.kind {
            FactorKind::Bubble { exponent, .. } | FactorKind::BubbleGradient { exponent, .. } => Some(exponent),
            _ => None,
        }
    }

    fn smooth_part(&self, grid: &TorusGrid) -> Result<Form> {
        let mut form = Form::constant(grid, self.degree, &self.background)?;
        if let FactorKind::Smooth { modes } = &self.kind {
            add_modes(&mut form, modes, 1.0);
        }
        Ok(form)
    }

    /// Atoms `(coefficients, location)` of the weak-⋆ limit.
    pub fn singular(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        match &self.kind {
            FactorKind::MollifiedAtom { v, center } => vec![(v.clone(), center.clone())],
            _ => Vec::new(),
        }
    }

    /// The weak limit of the absolutely continuous part.
    pub fn limit(&self, grid: &TorusGrid) -> Result<Form> {
        let base = self.smooth_part(grid)?;
        match &self.kind {
            FactorKind::Oscillator { profile, lambda, .. } if profile.mean != 0.0 => {
                let shift: Vec<f64> = lambda.iter().map(|l| l * profile.mean).collect();
                base.add(&Form::constant(grid, self.degree, &shift)?)
            }
            _ => Ok(base),
        }
    }

    pub fn member(&self, grid: &TorusGrid, n: usize) -> Result<Form> {
        let mut base = self.smooth_part(grid)?;
        add_modes(&mut base, &self.decaying, 1.0 / n as f64);
        let extra = match &self.kind {
            FactorKind::Oscillator { profile, xi, lambda } => {
                sequence::oscillator(grid, profile, xi, self.degree, lambda, n)?
            }
            FactorKind::Bubble { profile, center, exponent, amplitude } => {
                sequence::bubble(grid, *profile, center, *exponent, n, *amplitude)?
            }
            FactorKind::BubbleGradient { profile, center, exponent, amplitude } => {
                sequence::bubble(grid, *profile, center, *exponent, n, *amplitude)?.exterior_derivative()?
            }
            FactorKind::MollifiedAtom { v, center } => {
                sequence::mollified_atom(grid, self.degree, v, center, n)?
            }
            FactorKind::Smooth { .. } | FactorKind::Constant => {
                sequence::check_resolution(grid, n)?;
                return Ok(base);
            }
        };
        base.add(&extra)
    }

    pub fn sequence(&self, grid: &TorusGrid, schedule: &[usize]) -> Result<FormSequence> {
        let spec = self.clone();
        let g = grid.clone();
        let generator: Generator = Arc::new(move |n| spec.member(&g, n));
        FormSequence::new(
            grid,
            self.degree,
            self.sequence_kind(),
            generator,
            self.limit(grid)?,
            schedule.to_vec(),
        )
    }
}
