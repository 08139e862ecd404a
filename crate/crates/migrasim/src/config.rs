//! JSON scenario files.
//!
//! A scenario file is a [`ScenarioConfig`] object, optionally carrying a
//! top-level `"sweep"` section that only the sweep runner reads. Unknown keys
//! are rejected at every level.

use std::path::Path;

use migrasim_core::ScenarioConfig;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::sweep::SweepSpec;

pub const SWEEP_KEY: &str = "sweep";

#[derive(Debug, Clone)]
pub struct ConfigDoc {
    pub config: ScenarioConfig,
    pub sweep: Option<SweepSpec>,
    /// The scenario object as written, without the sweep section. Sweep cells
    /// are built by editing this and re-parsing.
    pub base: Map<String, Value>,
}

pub fn parse_config(text: &str) -> Result<ConfigDoc> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(format!("invalid JSON: {e}")))?;
    let Value::Object(mut base) = value else {
        return Err(Error::ConfigParse("top level must be a JSON object".into()));
    };
    let sweep = match base.remove(SWEEP_KEY) {
        None => None,
        Some(raw) => Some(
            serde_path_to_error::deserialize::<_, SweepSpec>(raw)
                .map_err(|e| Error::Sweep(format!("at `sweep.{}`: {}", e.path(), e.inner())))?,
        ),
    };
    let config = config_from_object(base.clone())?;
    Ok(ConfigDoc {
        config,
        sweep,
        base,
    })
}

/// Deserializes and validates one scenario object.
pub fn config_from_object(object: Map<String, Value>) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = serde_path_to_error::deserialize(Value::Object(object))
        .map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                Error::ConfigParse(e.inner().to_string())
            } else {
                Error::ConfigParse(format!("at `{path}`: {}", e.inner()))
            }
        })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ConfigDoc> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::ConfigParse(m) => Error::ConfigParse(format!("{}: {m}", path.display())),
        Error::Sweep(m) => Error::Sweep(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Pretty JSON with every field spelled out, defaults included.
pub fn config_to_json(config: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}
