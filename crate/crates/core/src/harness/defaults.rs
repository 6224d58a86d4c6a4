//! Complete default configuration of every experiment.
//!
//! User files override these entries; keys absent here are rejected, except
//! the factor keys of the sections returned by [`factor_sections`].

use crate::harness::config::Settings;

const COMMON: &[(&str, &str)] = &[
    ("run.seed", "0"),
    ("run.cells", "8"),
    ("output.format", "both"),
];

const PAIR_COMMON: &[(&str, &str)] = &[
    ("tests.plateau", "0.3"),
    ("tests.support", "0.45"),
    ("tolerances.conclusion", "1e-3"),
    ("tolerances.relative", "1e-3"),
    ("tolerances.certify_slope", "-0.5"),
    ("tolerances.stability", "2"),
];

/// Radial and dipole bubbles at a common point, `1/p + 1/q = 3/2` on T².
const CRITICAL_BUBBLES: &[(&str, &str)] = &[
    ("grid.resolution", "512x512"),
    ("run.schedule", "4,8,16"),
    ("exponents.p", "4/3"),
    ("exponents.q", "4/3"),
    ("alpha.kind", "bubble_gradient"),
    ("alpha.degree", "1"),
    ("alpha.profile", "radial"),
    ("alpha.center", "0.4375,0.5625"),
    ("alpha.exponent", "4/3"),
    ("alpha.amplitude", "1"),
    ("alpha.background", "0.5,0"),
    ("beta.kind", "bubble_gradient"),
    ("beta.degree", "1"),
    ("beta.profile", "dipole1"),
    ("beta.center", "0.4375,0.5625"),
    ("beta.exponent", "4/3"),
    ("beta.amplitude", "1"),
    ("beta.background", "0,1"),
    ("tests.centers", "0.5,0.5"),
];

const DIVCURL: &[(&str, &str)] = &[
    ("grid.resolution", "512x512"),
    ("run.schedule", "4,8,16,32"),
    ("exponents.p", "2"),
    ("exponents.q", "2"),
    ("alpha.kind", "oscillator"),
    ("alpha.degree", "1"),
    ("alpha.profile", "sine"),
    ("alpha.xi", "1,0"),
    ("alpha.lambda", "1,0"),
    ("alpha.decay_modes", "0:1,0:1:0"),
    ("theta.kind", "oscillator"),
    ("theta.degree", "1"),
    ("theta.profile", "sine"),
    ("theta.xi", "0,1"),
    ("theta.lambda", "1,0"),
    ("theta.decay_modes", "0:0,1:1:0"),
    ("tests.centers", "0.5,0.5"),
];

const MULTILINEAR: &[(&str, &str)] = &[
    ("grid.resolution", "128x128x128"),
    ("run.schedule", "2,4,8"),
    ("exponents.p", "3,3,3"),
    ("factor1.kind", "oscillator"),
    ("factor1.degree", "1"),
    ("factor1.profile", "sine"),
    ("factor1.xi", "1,0,0"),
    ("factor1.lambda", "1,0,0"),
    ("factor2.kind", "oscillator"),
    ("factor2.degree", "1"),
    ("factor2.profile", "sine"),
    ("factor2.xi", "0,1,0"),
    ("factor2.lambda", "0,1,0"),
    ("factor3.kind", "oscillator"),
    ("factor3.degree", "1"),
    ("factor3.profile", "sine"),
    ("factor3.xi", "0,0,1"),
    ("factor3.lambda", "0,0,1"),
    ("tests.centers", "0.5,0.5,0.5"),
    ("tolerances.no_loss", "1e-2"),
];

/// Mollified atom against a fixed closed smooth 1-form.
const ENDPOINT: &[(&str, &str)] = &[
    ("grid.resolution", "512x512"),
    ("run.schedule", "8,16,32"),
    ("alpha.kind", "mollified_atom"),
    ("alpha.degree", "1"),
    ("alpha.v", "1,0.5"),
    ("alpha.center", "0.4375,0.5625"),
    ("beta.kind", "smooth"),
    ("beta.degree", "1"),
    ("beta.modes", "0:1,0:0.2:0|1:0,1:0.3:-1.5707963267948966"),
    ("beta.background", "0.3,1"),
    ("tests.centers", "0.4375,0.5625;0.6875,0.5625"),
    ("tolerances.min_order", "1.8"),
];

const QUADRATIC: &[(&str, &str)] = &[
    ("grid.resolution", "512x512"),
    ("run.schedule", "4,8,16,32"),
    ("exponents.r", "2"),
    ("u.kind", "oscillator"),
    ("u.degree", "0"),
    ("u.profile", "sine"),
    ("u.xi", "1,0"),
    ("u.lambda", "1"),
    ("v.kind", "oscillator"),
    ("v.degree", "0"),
    ("v.profile", "sine"),
    ("v.xi", "1,0"),
    ("v.lambda", "1"),
    ("tolerances.zero", "1e-3"),
];

const ELLIPTIC: &[(&str, &str)] = &[
    ("grid.resolution", "512x512"),
    ("run.schedule", "4,8,16"),
    ("family.v", "1,0"),
    ("family.center", "0.4375,0.5625"),
    ("family.random_samples", "20"),
    ("family.bandwidth", "8"),
    ("tolerances.growth", "2"),
];

const GAFFNEY: &[(&str, &str)] = &[
    ("grid.resolution", "32x32"),
    ("gaffney.extra_grids", "16x16x16"),
    ("gaffney.samples", "100"),
    ("gaffney.bandwidth", "4"),
    ("gaffney.exponents", "4/3,2,3"),
    ("tolerances.identity", "1e-9"),
    ("tolerances.stability", "2"),
];

const IMMERSION: &[(&str, &str)] = &[
    ("grid.resolution", "128x128"),
    ("run.schedule", "2,4,8"),
    ("exponents.p", "2"),
    ("immersion.amplitudes", "0.5,0.25"),
    ("immersion.directions", "1,0;1,1"),
    ("immersion.normal_connection", "0"),
    ("immersion.oracle_refinement", "2"),
    ("immersion.override_gate", "false"),
    ("tolerances.baseline", "1e-10"),
    ("tolerances.limit", "1e-3"),
    ("tolerances.drift", "1e-10"),
];

const DECOMPOSE: &[(&str, &str)] = &[
    ("grid.resolution", "64x64"),
    ("form.input", ""),
    ("form.degree", "1"),
    ("form.bandwidth", "8"),
    ("tolerances.identity", "1e-10"),
];

fn build(parts: &[&[(&str, &str)]]) -> Settings {
    let pairs: Vec<(&str, &str)> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    Settings::from_pairs(&pairs)
}

pub fn defaults(experiment: &str) -> Option<Settings> {
    Some(match experiment {
        "wedge" => build(&[COMMON, PAIR_COMMON, CRITICAL_BUBBLES]),
        "cycles" => build(&[COMMON, PAIR_COMMON, CRITICAL_BUBBLES, &[("tolerances.cycle", "0.01")]]),
        "divcurl" => build(&[COMMON, PAIR_COMMON, DIVCURL]),
        "multilinear" => build(&[COMMON, PAIR_COMMON, MULTILINEAR]),
        "endpoint" => build(&[COMMON, PAIR_COMMON, ENDPOINT]),
        "quadratic" => build(&[COMMON, QUADRATIC]),
        "elliptic" => build(&[COMMON, ELLIPTIC]),
        "gaffney" => build(&[COMMON, GAFFNEY]),
        "immersion" => build(&[COMMON, IMMERSION]),
        "decompose" => build(&[COMMON, DECOMPOSE]),
        _ => return None,
    })
}

/// Sections whose factor keys may be set even when the defaults omit them.
pub fn factor_sections(experiment: &str) -> &'static [&'static str] {
    match experiment {
        "wedge" | "cycles" | "endpoint" => &["alpha", "beta"],
        "divcurl" => &["alpha", "theta"],
        "quadratic" => &["u", "v"],
        "multilinear" => &["factor1", "factor2", "factor3", "factor4", "factor5", "factor6"],
        _ => &[],
    }
}
