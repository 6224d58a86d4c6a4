//! Command-line front end: settings assembly, thread pool, report output and
//! exit codes.

mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{HodgeError, Result};
use crate::harness::report::{manifest, write_manifest, write_report, OutputFormat};
use crate::harness::{self, Settings};
use crate::io::write_hfrm;

/// Exit code for usage and configuration errors.
pub const EXIT_USAGE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "hodgelab", version, about = "Compensated-compactness experiments on flat tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hodge decomposition of a stored or random form.
    Decompose(RunArgs),
    /// Wedge products of critical sequences.
    Wedge(RunArgs),
    /// Div-curl pairings ⟨α, θ⟩.
    Divcurl(RunArgs),
    /// Products of several factors.
    Multilinear(RunArgs),
    /// Measure-valued factor against a strongly converging one.
    Endpoint(RunArgs),
    /// Pairing with the fundamental cycle.
    Cycles(RunArgs),
    /// Defect measures of quadratic expressions.
    Quadratic(RunArgs),
    /// Endpoint elliptic estimate.
    Elliptic(RunArgs),
    /// Gaffney ratios over random forms.
    Gaffney(RunArgs),
    /// Structural equations of surfaces in ℝ⁴.
    Immersion(RunArgs),
    /// Quick internal checks.
    Selftest,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunArgs {
    /// INI file overriding the experiment defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid resolution such as 512x512.
    #[arg(long)]
    pub grid: Option<String>,
    /// Drops schedule entries above this n.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, env = "HODGELAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Runs the immersion lab below the critical exponent.
    #[arg(long)]
    pub override_gate: bool,
}

impl Command {
    fn parts(&self) -> Option<(&'static str, &RunArgs)> {
        Some(match self {
            Command::Decompose(a) => ("decompose", a),
            Command::Wedge(a) => ("wedge", a),
            Command::Divcurl(a) => ("divcurl", a),
            Command::Multilinear(a) => ("multilinear", a),
            Command::Endpoint(a) => ("endpoint", a),
            Command::Cycles(a) => ("cycles", a),
            Command::Quadratic(a) => ("quadratic", a),
            Command::Elliptic(a) => ("elliptic", a),
            Command::Gaffney(a) => ("gaffney", a),
            Command::Immersion(a) => ("immersion", a),
            Command::Selftest => return None,
        })
    }
}

/// Defaults, then the config file, then the command-line flags.
pub fn assemble_settings(experiment: &str, args: &RunArgs) -> Result<Settings> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| HodgeError::io(path, e))?;
            Settings::parse_ini(&text)?
        }
        None => Settings::default(),
    };
    let mut s = harness::settings_for(experiment, &file)?;
    if let Some(seed) = args.seed {
        s.set("run.seed", seed.to_string());
    }
    if let Some(grid) = &args.grid {
        harness::config::parse_grid_spec(grid)?;
        s.set("grid.resolution", grid.clone());
    }
    if let Some(nmax) = args.nmax {
        if s.contains("run.schedule") {
            let kept: Vec<String> = s
                .usize_list("run.schedule")?
                .into_iter()
                .filter(|&n| n <= nmax)
                .map(|n| n.to_string())
                .collect();
            if kept.is_empty() {
                return Err(HodgeError::Config(format!("--nmax {nmax} leaves no schedule entries")));
            }
            s.set("run.schedule", kept.join(","));
        }
    }
    if let Some(f) = args.format {
        let name = match f {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
            FormatArg::Both => "both",
        };
        s.set("output.format", name);
    }
    if args.override_gate {
        if !s.contains("immersion.override_gate") {
            return Err(HodgeError::Config("--override-gate applies to the immersion lab only".into()));
        }
        s.set("immersion.override_gate", "true");
    }
    Ok(s)
}

fn init_threads(threads: Option<usize>) -> usize {
    if let Some(t) = threads.filter(|&t| t > 0) {
        // A pool already built by an earlier call in this process is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    rayon::current_num_threads()
}

/// Runs one experiment and writes its outputs; returns the verdict exit code.
pub fn run_experiment(experiment: &str, args: &RunArgs) -> Result<i32> {
    let settings = assemble_settings(experiment, args)?;
    let threads = init_threads(args.threads);
    let format: OutputFormat = settings.str("output.format")?.parse()?;
    let start = Instant::now();
    let report = harness::run(experiment, &settings)?;
    let mut outputs = write_report(&report, &args.out, format)?;
    if experiment == "decompose" {
        outputs.extend(write_parts(&settings, &args.out)?);
    }
    let m = manifest(&report, &settings, threads, start.elapsed().as_secs_f64(), outputs)?;
    write_manifest(&args.out, &m)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}: {:?}", experiment, report.verdict);
    for c in &report.verdicts {
        let status = match c.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("  [{status}] {} = {:.6e} (threshold {:.6e}) {}", c.name, c.value, c.threshold, c.detail);
    }
    Ok(report.verdict.exit_code())
}

fn write_parts(settings: &Settings, dir: &Path) -> Result<Vec<String>> {
    let (_, parts) = harness::decompose::decompose(settings)?;
    let mut names = Vec::new();
    for (name, form) in [("exact", &parts.exact), ("coexact", &parts.coexact), ("harmonic", &parts.harmonic)] {
        let file = format!("{name}.hfrm");
        write_hfrm(&dir.join(&file), form)?;
        names.push(file);
    }
    Ok(names)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command.parts() {
        None => selftest::run(),
        Some((experiment, args)) => match run_experiment(experiment, args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
    }
}
