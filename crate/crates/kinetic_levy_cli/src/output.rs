//! Output emission: CSV with shortest round-trip floats, JSON reports and
//! the run manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KINETIC_LEVY_OUT";

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<PathBuf>,
    pub exit_code: i32,
}

pub fn now_unix() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("kinetic_levy_out"))
}

pub struct Writer {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl Writer {
    pub fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self { dir, written: Vec::new() })
    }

    /// Writes `rows` as CSV with a header from the field names.
    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| io_err(&path, e))?;
        std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn manifest(&self, m: &RunManifest) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{}.manifest.json", m.subcommand));
        let text = serde_json::to_string_pretty(m).map_err(|e| io_err(&path, e))?;
        std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: f64,
        y: f64,
    }

    #[test]
    fn csv_floats_round_trip() {
        let dir = std::env::temp_dir().join(format!("kl-out-{}", std::process::id()));
        let mut w = Writer::new(dir.clone()).unwrap();
        let rows = [Row { x: 0.1, y: 1.0 / 3.0 }, Row { x: 1e-300, y: 2.5e17 }];
        w.csv("t.csv", &rows).unwrap();
        let text = std::fs::read_to_string(dir.join("t.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y"));
        for (line, r) in lines.zip(&rows) {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(v, [r.x, r.y]);
        }
        std::fs::remove_dir_all(dir).unwrap();
    }
}
