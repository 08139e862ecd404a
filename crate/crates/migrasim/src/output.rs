//! Result files: `series.csv`, `summary.json` and `workers.csv`.
//!
//! Floats are written in shortest round-trip form and every file ends lines
//! with `\n`, so identical runs produce identical bytes.

use std::path::Path;

use migrasim_core::engine::{lattice_position, Summary, SCHEMA_VERSION};
use migrasim_core::{ConsensusVerdict, RunStatus, ScenarioConfig, SimResult, Spectrum};
use serde::Serialize;

use crate::error::{Error, Result};

pub const SERIES_FILE: &str = "series.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const WORKERS_FILE: &str = "workers.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

fn float(v: f64) -> String {
    format!("{v}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn finish(w: csv::Writer<&mut Vec<u8>>) {
    w.into_inner().expect("writing to memory cannot fail");
}

/// One row per month. `v` and `bv` are empty once a sector has emptied.
pub fn series_csv(result: &SimResult) -> String {
    let mut buf = Vec::new();
    let mut w = csv_writer(&mut buf);
    w.write_record(["t_days", "N_u", "v", "bv", "spread", "inflow", "outflow"])
        .expect("in-memory write");
    for r in &result.series {
        w.write_record([
            float(r.t_days),
            r.n_u.to_string(),
            opt_float(r.v),
            opt_float(r.bv),
            float(r.spread),
            r.inflow.to_string(),
            r.outflow.to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w);
    String::from_utf8(buf).expect("ascii")
}

/// Per-worker placement and outcome. `row`/`col` are plotting coordinates
/// on a square lattice and mean nothing to the model.
pub fn workers_csv(result: &SimResult) -> String {
    let n = result.initial_roster.len();
    let mut buf = Vec::new();
    let mut w = csv_writer(&mut buf);
    w.write_record(["index", "row", "col", "hukou", "initial_sector", "final_sector", "final_x"])
        .expect("in-memory write");
    for i in 0..n {
        let (row, col) = lattice_position(i, n);
        w.write_record([
            i.to_string(),
            row.to_string(),
            col.to_string(),
            result.initial_roster.hukou(i).to_string(),
            result.initial_roster.sector(i).as_str().to_string(),
            result.final_roster.sector(i).as_str().to_string(),
            float(result.final_state.x[i]),
        ])
        .expect("in-memory write");
    }
    finish(w);
    String::from_utf8(buf).expect("ascii")
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema_version: u32,
    config: &'a ScenarioConfig,
    verdict: &'a ConsensusVerdict,
    status: &'a RunStatus,
    diverged: bool,
    summary: &'a Summary,
    months_recorded: usize,
}

pub fn summary_json(config: &ScenarioConfig, result: &SimResult) -> String {
    let doc = SummaryDoc {
        schema_version: SCHEMA_VERSION,
        config,
        verdict: &result.verdict,
        status: &result.status,
        diverged: result.diverged,
        summary: &result.summary,
        months_recorded: result.series.len().saturating_sub(1),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the selected files into `dir`, creating it if needed.
pub fn write_results(dir: &Path, config: &ScenarioConfig, result: &SimResult, format: Format) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if format.csv() {
        write(dir, SERIES_FILE, &series_csv(result))?;
        write(dir, WORKERS_FILE, &workers_csv(result))?;
    }
    if format.json() {
        write(dir, SUMMARY_FILE, &summary_json(config, result))?;
    }
    Ok(())
}

/// Human-readable spectral report printed by `analyze-graph`.
pub fn spectrum_report(
    n: usize,
    arcs: usize,
    spectrum: &Spectrum,
    verdict: &ConsensusVerdict,
    a: f64,
    f: f64,
) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "vertices: {n}");
    let _ = writeln!(s, "arcs: {arcs}");
    let _ = writeln!(s, "spanning_tree: {}", verdict.has_spanning_tree);
    let _ = writeln!(s, "zero_eigenvalues: {}", spectrum.zero_count);
    let _ = writeln!(s, "zero_threshold: {}", spectrum.zero_threshold);
    match verdict.lambda2_re {
        Some(l2) => {
            let _ = writeln!(s, "lambda2_re: {l2}");
            let _ = writeln!(s, "f_lambda2_re: {}", f * l2);
        }
        None => {
            let _ = writeln!(s, "lambda2_re: none");
        }
    }
    let _ = writeln!(s, "a: {a}");
    let _ = writeln!(s, "f: {f}");
    let _ = writeln!(s, "consensus_predicted: {}", verdict.consensus_predicted);
    let _ = writeln!(s, "eigenvalues:");
    for &(re, im) in &spectrum.eigenvalues {
        let _ = writeln!(s, "  {re} {im}");
    }
    s
}
