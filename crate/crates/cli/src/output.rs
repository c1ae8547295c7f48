//! Result tables, manifests, and the content-addressed results store.
//!
//! CSV cells never contain commas: list-valued fields (shifts, matrix
//! entries, character terms) join with ';'. Floats print in Rust's
//! round-trip form, so parsing a row back reproduces the exact values.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// A rectangular result table with a fixed header.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultTable {
    pub kind: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new(kind: &str, header: &[&str]) -> Self {
        ResultTable {
            kind: kind.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(kind: &str, text: &str) -> Option<Self> {
        let mut lines = text.lines();
        let header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
        let rows = lines
            .filter(|l| !l.is_empty())
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Some(ResultTable {
            kind: kind.to_string(),
            header,
            rows,
        })
    }

    /// Column index by name.
    pub fn col(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Everything needed to rerun and audit one invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub table_cache_keys: Vec<String>,
    pub output_paths: Vec<String>,
    pub wall_time_seconds: f64,
    pub code_version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            parameters: BTreeMap::new(),
            table_cache_keys: Vec::new(),
            output_paths: Vec::new(),
            wall_time_seconds: 0.0,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    /// Hash of the parameter map; the provenance key of the run.
    pub fn provenance(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.subcommand.as_bytes());
        for (k, v) in &self.parameters {
            hasher.update(b"\x1f");
            hasher.update(k.as_bytes());
            hasher.update(b"\x1e");
            hasher.update(v.as_bytes());
        }
        hex(&hasher.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

/// Provenance hash of a prime list (little-endian u64 stream).
pub fn prime_list_hash(primes: &[u64]) -> String {
    let mut hasher = Sha256::new();
    for &p in primes {
        hasher.update(p.to_le_bytes());
    }
    hex(&hasher.finalize())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)
}

/// Write the primary result file plus its manifest; returns the paths.
pub fn emit(
    table: &ResultTable,
    out_base: &Path,
    json: bool,
    manifest: &mut RunManifest,
    started: std::time::Instant,
) -> std::io::Result<Vec<PathBuf>> {
    let primary = if json {
        let path = out_base.with_extension("json");
        let record = serde_json::json!({
            "kind": table.kind,
            "provenance": manifest.provenance(),
            "header": table.header,
            "rows": table.rows,
        });
        write_atomic(&path, serde_json::to_string_pretty(&record)?.as_bytes())?;
        path
    } else {
        let path = out_base.with_extension("csv");
        write_atomic(&path, table.to_csv().as_bytes())?;
        path
    };
    manifest.output_paths = vec![primary.display().to_string()];
    manifest.wall_time_seconds = started.elapsed().as_secs_f64();
    let manifest_path = out_base.with_extension("manifest.json");
    write_atomic(
        &manifest_path,
        serde_json::to_string_pretty(manifest)?.as_bytes(),
    )?;
    print!("{}", table.to_csv());
    Ok(vec![primary, manifest_path])
}

/// Content-addressed store for computed rows, keyed by parameter hash.
pub struct ResultsStore {
    dir: PathBuf,
}

impl ResultsStore {
    pub fn new(cache_dir: &Path) -> Self {
        ResultsStore {
            dir: cache_dir.join("results"),
        }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<serde_json::Value> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, value: &serde_json::Value) {
        // cache writes are best-effort; a failure only costs a recompute
        if let Ok(text) = serde_json::to_string(value) {
            let _ = write_atomic(&self.path(key), text.as_bytes());
        }
    }
}
