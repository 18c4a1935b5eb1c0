//! Report envelopes, hashing and artifact writers.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use vaclab::field::io::{write_field, FieldSidecar};
use vaclab::VectorField64;

use crate::config::ExperimentConfig;

/// Hex SHA-256 of the canonical config text.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Every JSON report is wrapped in this envelope.
#[derive(Serialize)]
pub struct Envelope<'a, R> {
    pub command: &'a str,
    pub config_hash: &'a str,
    pub seed: u64,
    /// All quantities are in the nondimensional units of the energy.
    pub units: &'static str,
    /// The relation the report measures.
    pub relation: &'static str,
    pub report: R,
}

/// Writes artifacts into one output directory and remembers their paths.
pub struct Sink {
    dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        let p = self.path(name);
        fs::write(p, text)
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> std::io::Result<()> {
        let p = self.path(name);
        fs::write(p, table.render())
    }

    pub fn field(&mut self, stem: &str, u: &VectorField64) -> std::io::Result<()> {
        let p = self.path(&format!("{stem}.bin"));
        let mut w = BufWriter::new(fs::File::create(p)?);
        write_field(u, &mut w).map_err(|e| match e {
            vaclab::Error::Io(e) => e,
            other => std::io::Error::other(other.to_string()),
        })?;
        drop(w);
        self.json(&format!("{stem}.json"), &FieldSidecar::of(u))
    }
}

/// A CSV table; numbers are written with 17 significant digits.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Format a number for CSV.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let s = num(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(num(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn table_renders() {
        let mut t = Table::new(&["a", "b"]);
        t.row(vec![num(1.0), "x".into()]);
        assert_eq!(t.render(), "a,b\n1.0000000000000000e0,x\n");
    }
}
