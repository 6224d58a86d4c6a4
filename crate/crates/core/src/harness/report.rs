//! Report serialization: JSON, CSV tables, SVG plots and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{HodgeError, Result};
use crate::harness::{ConvergenceTable, ExperimentReport, Settings};
use crate::io::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = HodgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            other => Err(HodgeError::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Written beside the report so the report itself stays byte-reproducible.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}

pub fn to_json(report: &ExperimentReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("reports serialize");
    out.push(b'\n');
    out
}

pub fn table_csv(table: &ConvergenceTable) -> String {
    let mut s = String::from("n,test_id,value,residual\n");
    for r in &table.rows {
        let _ = writeln!(s, "{},{},{:e},{:e}", r.n, r.test_id, r.value, r.residual);
    }
    s
}

/// Values against `1/n`, one polyline per test.
pub fn table_svg(table: &ConvergenceTable) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let xs: Vec<f64> = table.rows.iter().map(|r| 1.0 / r.n as f64).collect();
    let ys: Vec<f64> = table.rows.iter().map(|r| r.value).collect();
    let bounds = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-300 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = bounds(&xs);
    let (x0, x1) = (x0.min(0.0), x1);
    let (y0, y1) = bounds(&ys);
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, table.name);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{M} {m} H{r} M{M} {m} V{M}" stroke="black" fill="none"/>"#,
        m = H - M,
        r = W - M
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12">1/n</text>"#, W - M, H - M + 20.0);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">{:.4e}</text>"#, M, y1);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">{:.4e}</text>"#, H - M, y0);
    let mut ids: Vec<usize> = table.rows.iter().map(|r| r.test_id).collect();
    ids.sort_unstable();
    ids.dedup();
    for (c, id) in ids.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r.test_id == *id)
            .map(|r| (px(1.0 / r.n as f64), py(r.value)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let hue = (c * 47) % 360;
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="hsl({hue},70%,40%)"/>"#,
            path.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}

fn file_stem(table: &ConvergenceTable) -> String {
    table
        .name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect()
}

/// Writes the report files into `dir` and returns their names.
pub fn write_report(report: &ExperimentReport, dir: &Path, format: OutputFormat) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| HodgeError::io(dir, e))?;
    let mut names = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        write_atomic(&dir.join(&name), bytes)?;
        names.push(name);
        Ok(())
    };
    if format != OutputFormat::Csv {
        put("report.json".into(), &to_json(report))?;
    }
    if format != OutputFormat::Json {
        for t in &report.tables {
            let stem = file_stem(t);
            put(format!("{stem}.csv"), table_csv(t).as_bytes())?;
            put(format!("{stem}.svg"), table_svg(t).as_bytes())?;
        }
    }
    Ok(names)
}

pub fn manifest(
    report: &ExperimentReport,
    settings: &Settings,
    threads: usize,
    wall_time_seconds: f64,
    outputs: Vec<String>,
) -> Result<RunManifest> {
    Ok(RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: report.experiment.clone(),
        config_hash: settings.hash_hex(),
        seed: settings.u64("run.seed")?,
        threads,
        wall_time_seconds,
        outputs,
    })
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = dir.join("manifest.json");
    let mut bytes = serde_json::to_vec_pretty(manifest).expect("manifests serialize");
    bytes.push(b'\n');
    write_atomic(&path, &bytes)?;
    Ok(path)
}
