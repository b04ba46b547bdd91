//! Library side of the `photomech` command: parameter loading, sweeps,
//! figure recipes and table output.

pub mod error;
pub mod figures;
pub mod sweep;
pub mod table;

use std::path::Path;

use photomech_core::SystemParams;

pub use error::{CliError, Result};
pub use table::Table;

/// Baseline (or `config` file) with `key=value` overrides applied.
pub fn load_params(config: Option<&Path>, overrides: &[String]) -> Result<SystemParams> {
    let base = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            SystemParams::from_json(&text)?
        }
        None => SystemParams::baseline_fig2(),
    };
    let mut pairs = Vec::with_capacity(overrides.len());
    for s in overrides {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{s}`")))?;
        let k = k.trim();
        sweep::check_name(k)?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--set {k}: `{v}` is not a number")))?;
        pairs.push((k, v));
    }
    // Applied one at a time so later keys see earlier ones.
    let mut sys = base;
    for p in &pairs {
        sys = sweep::apply_point(&sys, &[*p])?;
    }
    sys.validate()?;
    Ok(sys)
}

/// Single-row table from named values.
pub fn record(fields: &[(&str, Option<f64>)]) -> Table {
    Table {
        comments: Vec::new(),
        columns: fields.iter().map(|(k, _)| k.to_string()).collect(),
        rows: vec![fields.iter().map(|(_, v)| *v).collect()],
    }
}
