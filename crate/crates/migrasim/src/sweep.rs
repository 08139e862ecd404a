//! Parameter sweeps.
//!
//! ```json
//! "sweep": {
//!   "grid": { "dynamics.a": [0.0008, 0.002], "migration.beta": [2, 3] },
//!   "replicates": 5
//! }
//! ```
//!
//! Grid keys are dotted paths into the scenario object. Cells enumerate the
//! cross product with keys in sorted order and the last key varying fastest;
//! each combination is repeated `replicates` times, so cell `k` holds
//! combination `k / replicates`. Unless the grid sets `seed` itself, cell `k`
//! runs with `cell_seed(base_seed, k)`. Results never depend on which thread
//! ran which cell.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use migrasim_core::engine::{run, Summary, SCHEMA_VERSION};
use migrasim_core::rng::cell_seed;
use migrasim_core::{ConsensusVerdict, RunStatus, ScenarioConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{config_from_object, ConfigDoc};
use crate::error::{Error, Result};
use crate::output::{write_results, Format};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const THREADS_ENV: &str = "MIGRASIM_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: BTreeMap<String, Vec<Value>>,
    #[serde(default = "one")]
    pub replicates: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub index: usize,
    pub replicate: usize,
    pub seed: u64,
    pub overrides: BTreeMap<String, Value>,
    /// The cell's scenario, or why it could not be built.
    pub config: std::result::Result<ScenarioConfig, String>,
}

impl Cell {
    pub fn dir_name(&self) -> String {
        format!("cell-{:04}", self.index)
    }
}

fn set_path(object: &mut Map<String, Value>, path: &str, value: Value) -> std::result::Result<(), String> {
    let mut parts = path.split('.').peekable();
    let mut current = object;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(format!("empty segment in `{path}`"));
        }
        if parts.peek().is_none() {
            current.insert(part.to_string(), value);
            return Ok(());
        }
        let slot = current
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        current = slot
            .as_object_mut()
            .ok_or_else(|| format!("`{part}` in `{path}` is not an object"))?;
    }
    unreachable!("split yields at least one segment")
}

/// Expands the sweep section into cells. `base_seed` replaces the file's seed
/// when given.
pub fn expand(doc: &ConfigDoc, base_seed: Option<u64>) -> Result<Vec<Cell>> {
    let spec = doc
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Sweep("config has no `sweep` section".into()))?;
    if spec.replicates == 0 {
        return Err(Error::Sweep("`sweep.replicates` must be at least 1".into()));
    }
    if let Some((key, _)) = spec.grid.iter().find(|(_, values)| values.is_empty()) {
        return Err(Error::Sweep(format!("grid key `{key}` has no values")));
    }
    let base_seed = base_seed.unwrap_or(doc.config.seed);
    let keys: Vec<&String> = spec.grid.keys().collect();
    let combos: usize = spec.grid.values().map(Vec::len).product();
    let total = combos
        .checked_mul(spec.replicates)
        .ok_or_else(|| Error::Sweep("sweep is too large".into()))?;

    let mut cells = Vec::with_capacity(total);
    for index in 0..total {
        let (mut combo, replicate) = (index / spec.replicates, index % spec.replicates);
        let mut overrides = BTreeMap::new();
        for key in keys.iter().rev() {
            let values = &spec.grid[*key];
            overrides.insert((*key).clone(), values[combo % values.len()].clone());
            combo /= values.len();
        }
        let seed = cell_seed(base_seed, index as u64);
        let mut object = doc.base.clone();
        object.insert("seed".into(), Value::from(seed));
        let built = overrides
            .iter()
            .try_for_each(|(k, v)| set_path(&mut object, k, v.clone()))
            .and_then(|()| config_from_object(object).map_err(|e| e.to_string()));
        let seed = built.as_ref().map(|c| c.seed).unwrap_or(seed);
        cells.push(Cell {
            index,
            replicate,
            seed,
            overrides,
            config: built,
        });
    }
    Ok(cells)
}

#[derive(Debug, Clone, Serialize)]
pub struct CellRecord {
    pub index: usize,
    pub dir: String,
    pub seed: u64,
    pub replicate: usize,
    pub overrides: BTreeMap<String, Value>,
    pub status: &'static str,
    pub error: Option<String>,
    pub run_status: Option<RunStatus>,
    pub verdict: Option<ConsensusVerdict>,
    pub summary: Option<Summary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub base_seed: u64,
    pub replicates: usize,
    pub keys: Vec<String>,
    pub cells: Vec<CellRecord>,
}

impl Manifest {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.status != "ok").count()
    }
}

fn run_cell(cell: &Cell, out: &Path, format: Format) -> CellRecord {
    let dir = cell.dir_name();
    let mut record = CellRecord {
        index: cell.index,
        dir: dir.clone(),
        seed: cell.seed,
        replicate: cell.replicate,
        overrides: cell.overrides.clone(),
        status: "failed",
        error: None,
        run_status: None,
        verdict: None,
        summary: None,
    };
    let outcome = cell
        .config
        .clone()
        .map_err(|e| format!("invalid cell config: {e}"))
        .and_then(|config| {
            let result = run(&config).map_err(|e| Error::from(e).diagnostic())?;
            write_results(&out.join(&dir), &config, &result, format).map_err(|e| e.diagnostic())?;
            Ok(result)
        });
    match outcome {
        Ok(result) => {
            record.status = "ok";
            record.run_status = Some(result.status);
            record.verdict = Some(result.verdict);
            record.summary = Some(result.summary);
        }
        Err(e) => record.error = Some(e),
    }
    record
}

/// Worker count from `MIGRASIM_THREADS`; `None` means rayon's default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(Error::Usage(format!("{THREADS_ENV}={s:?} is not a thread count"))),
        },
    }
}

/// Runs every cell on a pool of `threads` workers and writes the manifest
/// last. Failed cells are recorded, not fatal.
pub fn run_sweep(
    doc: &ConfigDoc,
    base_seed: Option<u64>,
    out: &Path,
    format: Format,
    threads: Option<usize>,
) -> Result<Manifest> {
    let cells = expand(doc, base_seed)?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    let records: Vec<CellRecord> = pool.install(|| cells.par_iter().map(|c| run_cell(c, out, format)).collect());

    let spec = doc.sweep.as_ref().expect("expand checked the sweep section");
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        base_seed: base_seed.unwrap_or(doc.config.seed),
        replicates: spec.replicates,
        keys: spec.grid.keys().cloned().collect(),
        cells: records,
    };
    let path: PathBuf = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))?;
    Ok(manifest)
}
