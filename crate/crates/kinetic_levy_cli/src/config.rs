//! Config ingestion: a TOML file with one table per subcommand, overlaid by
//! command-line overrides.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::CliError;

/// Command-line overrides shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Config file; the table named after the subcommand is used.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Field intensity B.
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// Noise intensity γ.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Field scaling exponent δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Scale parameter(s) N, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<f64>,
    /// Any other key, as `key=<TOML value>`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

fn read_section(path: &Path, section: &str) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Table = toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match doc.remove(section) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => Err(CliError::Config(format!("[{section}] must be a table"))),
        None => Ok(Table::new()),
    }
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Merges file and flags into the table for `section`.
pub fn resolve_table(section: &str, ov: &Overrides, seed: Option<u64>) -> Result<Table, CliError> {
    let mut t = match &ov.config {
        Some(p) => read_section(p, section)?,
        None => Table::new(),
    };
    if let Some(b) = ov.b {
        t.insert("B".into(), Value::Float(b));
    }
    if let Some(g) = ov.gamma {
        t.insert("gamma".into(), Value::Float(g));
    }
    if let Some(d) = ov.delta {
        t.insert("delta".into(), Value::Float(d));
    }
    if !ov.n.is_empty() {
        t.insert("N".into(), Value::Array(ov.n.iter().map(|&x| Value::Float(x)).collect()));
    }
    for kv in &ov.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        t.insert(k.trim().to_string(), parse_value(v.trim()));
    }
    if let Some(s) = seed {
        t.insert("seed".into(), Value::Integer(s as i64));
    }
    Ok(t)
}

pub fn deserialize<T: DeserializeOwned>(section: &str, t: Table) -> Result<T, CliError> {
    T::deserialize(Value::Table(t)).map_err(|e| CliError::Config(format!("[{section}]: {e}")))
}

/// SHA-256 of the canonical JSON form of a resolved config.
pub fn digest<T: Serialize>(subcommand: &str, cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("config serialises");
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update([0]);
    h.update(json.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
