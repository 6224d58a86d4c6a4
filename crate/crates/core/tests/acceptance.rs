//! Acceptance suite. Each test prints one `criterion NN ...: PASS|FAIL` line.
//!
//! Run with `cargo test -p hodgelab --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use hodgelab::form::Form;
use hodgelab::grid::TorusGrid;
use hodgelab::harness::bilinear::subcritical_vanishing;
use hodgelab::harness::{self, ExperimentReport, Settings, Verdict};
use hodgelab::hodge::{coexact_projection_spectral, decompose_spectral, exact_projection_spectral};
use hodgelab::immersion::gate;
use hodgelab::random::{random_spectral_form, seeded_rng};
use hodgelab::spectral::SpectralForm;
use rayon::prelude::*;

/// The timed criteria run one at a time.
static SERIAL: Mutex<()> = Mutex::new(());

const CORPUS: usize = 1000;
const BANDWIDTH: usize = 8;
const X0: [f64; 2] = [0.4375, 0.5625];

struct Criterion {
    number: usize,
    name: &'static str,
    start: Instant,
    limit: Option<Duration>,
    items: Vec<(bool, String)>,
}

impl Criterion {
    fn new(number: usize, name: &'static str, limit_seconds: Option<u64>) -> Self {
        Criterion { number, name, start: Instant::now(), limit: limit_seconds.map(Duration::from_secs), items: Vec::new() }
    }

    fn at_most(&mut self, label: &str, value: f64, bound: f64) {
        self.items.push((value <= bound, format!("{label}={value:.3e}≤{bound:.3e}")));
    }

    fn at_least(&mut self, label: &str, value: f64, bound: f64) {
        self.items.push((value >= bound, format!("{label}={value:.3e}≥{bound:.3e}")));
    }

    fn holds(&mut self, label: &str, ok: bool) {
        self.items.push((ok, label.to_string()));
    }

    fn info(&mut self, label: &str, value: impl std::fmt::Display) {
        self.items.push((true, format!("{label}={value}")));
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if let Some(limit) = self.limit {
            let label = format!("runtime {:.1}s≤{}s", elapsed.as_secs_f64(), limit.as_secs());
            self.items.push((elapsed <= limit, label));
        }
        let ok = self.items.iter().all(|(ok, _)| *ok);
        let detail: Vec<String> = self
            .items
            .iter()
            .map(|(ok, s)| if *ok { s.clone() } else { format!("[FAIL] {s}") })
            .collect();
        println!(
            "criterion {:02} {}: {} ({:.1}s) {}",
            self.number,
            self.name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            detail.join("; ")
        );
        assert!(ok, "criterion {} failed", self.number);
    }
}

fn lock() -> std::sync::MutexGuard<'static, ()> {
    hodgelab::memory::retain_freed_buffers();
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn settings(experiment: &str, ini: &str) -> Settings {
    harness::settings_for(experiment, &Settings::parse_ini(ini).unwrap()).unwrap()
}

fn run(experiment: &str, ini: &str) -> ExperimentReport {
    harness::run(experiment, &settings(experiment, ini)).unwrap()
}

fn check_value(report: &ExperimentReport, name: &str) -> f64 {
    report.check(name).unwrap_or_else(|| panic!("no check {name}")).value
}

fn check_passed(report: &ExperimentReport, name: &str) -> bool {
    report.check(name).and_then(|c| c.passed) == Some(true)
}

fn periodic_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(1.0);
            d.min(1.0 - d).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn magnitude(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn corpus_grids() -> Vec<TorusGrid> {
    vec![TorusGrid::unit(&[256, 256]).unwrap(), TorusGrid::unit(&[64, 64, 64]).unwrap()]
}

/// Largest wavenumber of the corpus, the norm of d on band-limited forms.
fn band_wavenumber() -> f64 {
    2.0 * PI * BANDWIDTH as f64 * 3f64.sqrt()
}

fn tag(grid: &TorusGrid) -> String {
    grid.resolutions().iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x")
}

/// `max |a − s·b|` over the coefficients of two spectral forms of equal shape.
fn spectral_gap(a: &SpectralForm, b: &SpectralForm, s: f64) -> f64 {
    let mut m = 0.0f64;
    for (x, y) in a.components().iter().zip(b.components()) {
        for (u, v) in x.iter().zip(y) {
            m = m.max((u - v * s).norm());
        }
    }
    m
}

/// `max |a − b − s·c|` over the samples of three forms of equal shape.
fn physical_gap(a: &Form, b: &Form, c: &Form, s: f64) -> f64 {
    let mut m = 0.0f64;
    for ((x, y), z) in a.components().iter().zip(b.components()).zip(c.components()) {
        for ((u, v), w) in x.iter().zip(y).zip(z) {
            m = m.max((u - v - s * w).abs());
        }
    }
    m
}

fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Independent generator per corpus sample, so the reduction order does not matter.
fn sample_rng(seed: u64, degree: usize, i: usize) -> rand_chacha::ChaCha8Rng {
    seeded_rng(seed ^ ((degree as u64) << 32) ^ i as u64)
}

/// Elementwise maxima of per-sample errors over the corpus of one degree.
fn corpus_max<const M: usize>(f: impl Fn(usize) -> [f64; M] + Sync + Send) -> [f64; M] {
    (0..CORPUS)
        .into_par_iter()
        .map(f)
        .reduce(|| [0.0; M], |a, b| std::array::from_fn(|j| a[j].max(b[j])))
}

/// Errors of d∘d, d*∘d*, ⋆⋆, adjointness and the Leibniz rule on one sample.
fn identity_errors(grid: &TorusGrid, degree: usize, i: usize) -> [f64; 5] {
    let dim = grid.dim();
    let k = band_wavenumber();
    let mut rng = sample_rng(1, degree, i);
    let mut out = [0.0f64; 5];
    let w = random_spectral_form(grid, degree, BANDWIDTH, &mut rng).unwrap();
    let top = w.max_abs();
    if degree + 2 <= dim {
        out[0] = w.exterior_derivative().unwrap().exterior_derivative().unwrap().max_abs() / (k * k * top);
    }
    if degree >= 2 {
        out[1] = w.codifferential().unwrap().codifferential().unwrap().max_abs() / (k * k * top);
    }
    let twice = w.hodge_star().hodge_star();
    out[2] = spectral_gap(&twice, &w, parity(degree * (dim - degree))) / top;
    if degree == dim {
        return out;
    }
    let b = random_spectral_form(grid, degree + 1, BANDWIDTH, &mut rng).unwrap();
    let lhs = w.exterior_derivative().unwrap().l2_inner(&b).unwrap();
    let rhs = w.l2_inner(&b.codifferential().unwrap()).unwrap();
    out[3] = (lhs - rhs).abs() / (k * w.l2_norm() * b.l2_norm());

    // d(ω∧η) = dω∧η + (−1)^ℓ ω∧dη with ℓ + m < N, evaluated in physical space.
    let m = i % (dim - degree);
    let eta = random_spectral_form(grid, m, BANDWIDTH, &mut rng).unwrap();
    let (wp, ep) = (w.to_physical(), eta.to_physical());
    let lhs = wp.wedge(&ep).unwrap().exterior_derivative().unwrap();
    let first = w.exterior_derivative().unwrap().to_physical().wedge(&ep).unwrap();
    let second = wp.wedge(&eta.exterior_derivative().unwrap().to_physical()).unwrap();
    let scale = k * wp.max_abs() * ep.max_abs();
    out[4] = physical_gap(&lhs, &first, &second, parity(degree)) / scale;
    out
}

#[test]
fn criterion_01_calculus_identities() {
    let _g = lock();
    let mut c = Criterion::new(1, "calculus identities", Some(120));
    for grid in corpus_grids() {
        let mut worst = [0.0f64; 5];
        for degree in 0..=grid.dim() {
            let e = corpus_max(|i| identity_errors(&grid, degree, i));
            worst = std::array::from_fn(|j| worst[j].max(e[j]));
        }
        let t = tag(&grid);
        for (name, value) in ["d∘d", "d*∘d*", "⋆⋆", "adjoint", "leibniz"].iter().zip(worst) {
            c.at_most(&format!("{name}[{t}]"), value, 1e-9);
        }
    }
    c.finish();
}

fn relative_inner(a: &SpectralForm, b: &SpectralForm, scale: f64) -> f64 {
    a.l2_inner(b).unwrap().abs() / scale
}

/// Reconstruction, orthogonality, gauge and idempotence errors on one sample.
fn decomposition_errors(grid: &TorusGrid, degree: usize, i: usize) -> [f64; 5] {
    let dim = grid.dim();
    let k = band_wavenumber();
    let w = random_spectral_form(grid, degree, BANDWIDTH, &mut sample_rng(2, degree, i)).unwrap();
    let top = w.max_abs();
    let p = decompose_spectral(&w).unwrap();
    let mut out = [0.0f64; 5];
    for (((x, e), co), h) in w
        .components()
        .iter()
        .zip(p.exact.components())
        .zip(p.coexact.components())
        .zip(p.harmonic.components())
    {
        for i in 0..x.len() {
            out[0] = out[0].max((e[i] + co[i] + h[i] - x[i]).norm() / top);
        }
    }
    let sq = w.l2_norm().powi(2);
    out[1] = relative_inner(&p.exact, &p.coexact, sq)
        .max(relative_inner(&p.exact, &p.harmonic, sq))
        .max(relative_inner(&p.coexact, &p.harmonic, sq));
    // d*γ = 0 and dk = 0 with zero-mean potentials.
    if let Some(gamma) = p.gamma.as_ref().filter(|_| degree >= 2) {
        out[2] = gamma.codifferential().unwrap().max_abs() / (k * gamma.max_abs().max(f64::MIN_POSITIVE));
    }
    if let Some(kk) = p.k.as_ref().filter(|_| degree + 2 <= dim) {
        out[2] = out[2].max(kk.exterior_derivative().unwrap().max_abs() / (k * kk.max_abs().max(f64::MIN_POSITIVE)));
    }
    for pot in p.gamma.iter().chain(&p.k) {
        out[2] = out[2].max(magnitude(&pot.means()) / top);
    }
    let pd = exact_projection_spectral(&w).unwrap();
    out[3] = spectral_gap(&exact_projection_spectral(&pd).unwrap(), &pd, 1.0) / top;
    let pl = coexact_projection_spectral(&w).unwrap();
    out[4] = spectral_gap(&coexact_projection_spectral(&pl).unwrap(), &pl, 1.0) / top;
    out
}

#[test]
fn criterion_02_hodge_decomposition() {
    let _g = lock();
    let mut c = Criterion::new(2, "Hodge decomposition", Some(120));
    for grid in corpus_grids() {
        let mut worst = [0.0f64; 5];
        for degree in 0..=grid.dim() {
            let e = corpus_max(|i| decomposition_errors(&grid, degree, i));
            worst = std::array::from_fn(|j| worst[j].max(e[j]));
        }
        let t = tag(&grid);
        let names = ["reconstruction", "orthogonality", "gauge", "Π^d idempotent", "Leray idempotent"];
        for (name, value) in names.iter().zip(worst) {
            c.at_most(&format!("{name}[{t}]"), value, 1e-10);
        }
    }
    c.finish();
}

#[test]
fn criterion_03_divcurl_positive_control() {
    let _g = lock();
    let mut c = Criterion::new(3, "div-curl positive control", Some(60));
    let r = run("divcurl", "");
    let table = r.main_table().unwrap();
    // A slope is absent only when the differences sit at round-off.
    let steepest = table.slopes.iter().map(|s| s.unwrap_or(f64::NEG_INFINITY)).fold(f64::NEG_INFINITY, f64::max);
    c.at_most("worst slope", steepest, -0.9);
    let gaps: Vec<f64> = serde_json::from_value(r.extras["gaps"].clone()).unwrap();
    let gap = gaps.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    c.at_most("final gap", gap, 1e-3);
    c.holds("verdict PASS", r.verdict == Verdict::Pass);
    c.finish();
}

/// `∫ B(|x − c|) dx` for the flat bump with plateau `a` and support `b`,
/// by composite Simpson on the radial integral `2π ∫ B(r) r dr`.
fn bump_integral(a: f64, b: f64) -> f64 {
    let psi = |t: f64| -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            let e0 = (-1.0 / t).exp();
            let e1 = (-1.0 / (1.0 - t)).exp();
            e0 / (e0 + e1)
        }
    };
    let m = 20_000;
    let h = (b - a) / m as f64;
    let mut s = 0.0;
    for i in 0..=m {
        let r = a + i as f64 * h;
        let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * (1.0 - psi((r - a) / (b - a))) * r;
    }
    PI * a * a + 2.0 * PI * s * h / 3.0
}

const NEGATIVE_CONTROL: &str = "
[run]
schedule = 4,8,16,32
[exponents]
p = 2
q = 2
[alpha]
kind = oscillator
degree = 1
profile = sine
xi = 0,1
lambda = 1,0
background = 0,0
[beta]
kind = oscillator
degree = 1
profile = sine
xi = 0,1
lambda = 0,1
background = 0,0
";

#[test]
fn criterion_04_negative_control() {
    let _g = lock();
    let mut c = Criterion::new(4, "negative control", None);
    let s = settings("wedge", NEGATIVE_CONTROL);
    let r = harness::run("wedge", &s).unwrap();
    let gaps: Vec<f64> = serde_json::from_value(r.extras["gaps"].clone()).unwrap();
    // Test 0 is the flat bump of dx₁∧dx₂ and sin² averages to 1/2.
    let want = 0.5 * bump_integral(s.f64("tests.plateau").unwrap(), s.f64("tests.support").unwrap());
    c.at_most("gap rel. error", (gaps[0] - want).abs() / want, 0.02);
    c.info("gap", format!("{:.6}", gaps[0]));
    c.info("½∫Ξ", format!("{want:.6}"));
    c.holds("HypothesisWarning raised", r.warnings.iter().any(|w| w.starts_with("HypothesisWarning")));
    c.holds("exit code 3", r.verdict.exit_code() == 3);
    c.finish();
}

/// Largest atom magnitude of a critical bubble run.
fn single_atom(r: &ExperimentReport) -> Option<&harness::AtomRecord> {
    if r.atoms.len() == 1 {
        r.atoms.first()
    } else {
        None
    }
}

#[test]
fn criterion_05_critical_concentration() {
    let _g = lock();
    let mut c = Criterion::new(5, "critical concentration", Some(300));
    let r = run("wedge", "");
    c.at_most("atoms detected", r.atoms.len() as f64, 1.0);
    c.at_least("atoms detected", r.atoms.len() as f64, 1.0);
    let oracle = run("wedge", "[grid]\nresolution = 1024x1024\n[run]\nschedule = 8,16,32\n");
    if let (Some(a), Some(o)) = (single_atom(&r), single_atom(&oracle)) {
        c.at_most("distance to x₀", periodic_distance(&a.location, &X0), 0.125);
        c.at_most("|v| vs 1024² oracle", (a.magnitude - o.magnitude).abs() / o.magnitude, 0.05);
        // v = ∫ φ ∇ψ for the radial and dipole profiles is (π/14, 0).
        c.at_most("|v| vs π/14", (a.magnitude - PI / 14.0).abs() / (PI / 14.0), 0.05);
        c.at_most("bound spread", a.bound_spread.unwrap_or(f64::INFINITY), 2.0);
        c.info("|v|", format!("{:.6}", a.magnitude));
        c.info("oracle |v|", format!("{:.6}", o.magnitude));
    } else {
        c.holds("oracle has one atom", false);
    }
    c.finish();
}

#[test]
fn criterion_06_subcritical_vanishing() {
    let _g = lock();
    let mut c = Criterion::new(6, "subcritical vanishing", None);
    let critical = run("wedge", "");
    let reference = single_atom(&critical).map_or(f64::NAN, |a| a.magnitude);
    let p = 1.1 * 4.0 / 3.0;
    let s = settings("wedge", &format!("[exponents]\np = {p}\n[alpha]\nexponent = {p}\n"));
    let (check, outcome) = subcritical_vanishing(&s, reference).unwrap();
    let largest = outcome.atoms.iter().fold(0.0f64, |a, at| a.max(at.magnitude));
    c.at_most("largest |v|", largest, 1e-3 * reference);
    c.holds("check passes", check.passed == Some(true));
    c.info("atoms", outcome.atoms.len());
    c.finish();
}

#[test]
fn criterion_07_cycle_invisibility() {
    let _g = lock();
    let mut c = Criterion::new(7, "cycle invisibility", None);
    let r = run("cycles", "");
    let cycle = &r.extras["cycle"];
    let limit = cycle["limit"]["value"].as_f64().unwrap();
    let classical = cycle["classical"].as_f64().unwrap();
    c.at_most("relative cycle error", (limit - classical).abs() / classical.abs(), 0.01);
    c.at_least("atoms detected", r.atoms.len() as f64, 1.0);
    c.holds("cycle check passes", check_passed(&r, "cycle"));
    c.finish();
}

#[test]
fn criterion_08_multilinear() {
    let _g = lock();
    let mut c = Criterion::new(8, "multilinear", Some(600));
    let r = run("multilinear", "");
    let limits = r.extras["limits"].as_array().unwrap();
    let largest = limits.iter().map(|l| l["value"].as_f64().unwrap().abs()).fold(0.0f64, f64::max);
    c.at_most("triple pairings", largest, 1e-2);
    c.holds("verdict PASS", r.verdict == Verdict::Pass);
    let schedule = r.config_echo["run.schedule"].split(',').count();
    let no_loss = r.extras["no_loss"].as_array().unwrap();
    c.holds(
        "no-loss values per n",
        no_loss.len() == 3 && no_loss.iter().all(|x| x["values"].as_array().map(Vec::len) == Some(schedule)),
    );

    // The same bubble pair through the two-factor path.
    let wedge = settings("wedge", "");
    let mut ini = String::from("[exponents]\np = 4/3,4/3\n[grid]\nresolution = 512x512\n[run]\nschedule = 4,8,16\n[tests]\n");
    ini.push_str(&format!("centers = {}\n", wedge.str("tests.centers").unwrap()));
    for (from, to) in [("alpha", "factor1"), ("beta", "factor2")] {
        ini.push_str(&format!("[{to}]\n"));
        for (key, value) in wedge.entries() {
            if let Some(field) = key.strip_prefix(&format!("{from}.")) {
                ini.push_str(&format!("{field} = {value}\n"));
            }
        }
    }
    let mut two = settings("multilinear", &ini);
    let stale: Vec<String> = two
        .entries()
        .keys()
        .filter(|k| k.starts_with("factor3.") || k.ends_with(".xi") || k.ends_with(".lambda"))
        .cloned()
        .collect();
    for key in stale {
        two.remove(&key);
    }
    let ml = harness::run("multilinear", &two).unwrap();
    let w = harness::run("wedge", &wedge).unwrap();
    c.holds("L=2 tables bit-identical", to_json(&ml.tables[0]) == to_json(&w.tables[0]));
    c.holds("L=2 atoms bit-identical", to_json(&ml.atoms) == to_json(&w.atoms));
    c.holds("L=2 limits bit-identical", ml.extras["limits"] == w.extras["limits"]);
    c.finish();
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap()
}

const ENDPOINT_CONCENTRATING: &str = "
[run]
schedule = 4,8,16
[beta]
kind = bubble_gradient
degree = 1
profile = radial
center = 0.4375,0.5625
exponent = 2
amplitude = 1
background = 0,1
[tolerances]
min_order = 0
";

#[test]
fn criterion_09_endpoint() {
    let _g = lock();
    let mut c = Criterion::new(9, "endpoint", None);
    let r = run("endpoint", "");
    let orders: Vec<Option<f64>> = serde_json::from_value(r.extras["observed_orders"].clone()).unwrap();
    let smallest = orders.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    c.at_least("observed order", smallest, 1.8);
    c.holds("point-evaluation conclusion", check_passed(&r, "conclusion"));

    // A critical bubble at the atom concentrates; its bound uses powers (1, 1/N).
    let r = run("endpoint", ENDPOINT_CONCENTRATING);
    c.at_least("atoms detected", r.atoms.len() as f64, 1.0);
    let spread = r.atoms.iter().map(|a| a.bound_spread.unwrap_or(f64::INFINITY)).fold(0.0f64, f64::max);
    c.at_most("bound spread", spread, 2.0);
    c.holds("concentrating verdict PASS", r.verdict == Verdict::Pass);
    c.finish();
}

#[test]
fn criterion_10_quadratic_defects() {
    let _g = lock();
    let mut c = Criterion::new(10, "quadratic defects", None);
    let r = run("quadratic", "");
    let cells = r.config_echo["run.cells"].parse::<f64>().unwrap();
    let half_cell = 0.5 / (cells * cells);
    let product = |r: &ExperimentReport| -> Vec<f64> {
        let records = r.extras["quadratic"].as_array().unwrap();
        let rec = records.iter().find(|x| x["quadratic"] == "product").unwrap();
        serde_json::from_value(rec["cells"].clone()).unwrap()
    };
    let worst = product(&r).iter().map(|v| (v - half_cell).abs() / half_cell).fold(0.0f64, f64::max);
    c.at_most("identical cells vs ½·vol", worst, 0.02);
    c.holds("Hölder cell bound", check_passed(&r, "cell_bound[product]") && check_passed(&r, "cell_bound[square_sum]"));
    let r = run("quadratic", "[v]\nxi = 0,1\n");
    let largest = product(&r).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    c.at_most("independent cells", largest, 1e-3);
    c.holds("independent cell bound", check_passed(&r, "cell_bound[product]"));
    c.finish();
}

#[test]
fn criterion_11_elliptic_endpoint() {
    let _g = lock();
    let mut c = Criterion::new(11, "elliptic endpoint", None);
    let r = run("elliptic", "");
    let family = r.extras["family"].as_array().unwrap();
    let ratios: Vec<f64> = family.iter().map(|x| x["ratio"].as_f64().unwrap()).collect();
    let largest = ratios.iter().cloned().fold(0.0f64, f64::max);
    c.at_most("max ratio", largest, 2.0 * ratios[0]);
    c.holds("no_blowup check passes", check_passed(&r, "no_blowup"));
    c.holds("schedule 4,8,16", r.config_echo["run.schedule"] == "4,8,16");
    c.finish();
}

#[test]
fn criterion_12_gaffney() {
    let _g = lock();
    let mut c = Criterion::new(12, "Gaffney ratios", None);
    let r = run("gaffney", "");
    let mut seen = 0;
    for check in &r.verdicts {
        if check.name.starts_with("identity[") || check.name.starts_with("stability[") {
            seen += 1;
            c.items.push((check.passed == Some(true), format!("{}={:.4e}≤{:.4e}", check.name, check.value, check.threshold)));
        }
    }
    c.holds("identity and stability checks present", seen >= 3);
    let ratios = r.extras["ratios"].as_array().unwrap();
    let finite = ratios.iter().all(|x| x["max"].as_f64().is_some_and(f64::is_finite));
    c.holds("ratios finite", finite);
    c.finish();
}

#[test]
fn criterion_13_immersion() {
    let _g = lock();
    let mut c = Criterion::new(13, "immersion lab", None);
    let r = run("immersion", "");
    c.at_most("Clifford baseline", check_value(&r, "baseline"), 1e-10);
    c.at_most("limit residual", check_value(&r, "limit_residual"), 1e-3);
    c.holds("oracle agreement", check_passed(&r, "oracle_agreement"));
    c.holds("gate refuses p = 1.2", gate(1.2, 2, false).is_err());
    c.holds("override admits p = 1.2", gate(1.2, 2, true).is_ok());
    let refused = harness::run("immersion", &settings("immersion", "[exponents]\np = 1.2\n"));
    c.holds("run refused at p = 1.2", refused.is_err());
    c.finish();
}

#[test]
fn corpus_forms_are_band_limited() {
    let grid = TorusGrid::unit(&[32, 32]).unwrap();
    let w = random_spectral_form(&grid, 1, BANDWIDTH, &mut seeded_rng(3)).unwrap();
    let back: Form = w.to_physical();
    assert!(back.to_spectral().sub(&w).unwrap().max_abs() < 1e-12);
}
