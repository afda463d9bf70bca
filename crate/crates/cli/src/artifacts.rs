//! Stage directories, upstream-artifact lookup and the run manifest.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use skillforge_core::corpus::{load_dataset, Dataset, ImportanceScale, InputPaths, LoadOptions};
use skillforge_core::output::{canonical_json, file_sha256, sha256_hex, write_atomic};

use crate::config::Config;
use crate::error::{malformed, CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.jsonl";
pub const TOOL_VERSION: &str = concat!("skillforge ", env!("CARGO_PKG_VERSION"));

/// Bookkeeping for one stage run: what it read and what it wrote.
pub struct StageRun<'a> {
    pub stage: &'static str,
    pub config: &'a Config,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

impl<'a> StageRun<'a> {
    pub fn new(stage: &'static str, config: &'a Config) -> Self {
        StageRun {
            stage,
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn out(&self) -> &Path {
        &self.config.out
    }

    /// Path of an upstream artifact, or a missing-artifact error naming the
    /// stage that produces it.
    pub fn require(&self, stage: &'static str, file: &str) -> CliResult<PathBuf> {
        let p = self.config.out.join(stage).join(file);
        if p.is_file() {
            Ok(p)
        } else {
            Err(CliError::MissingArtifact { stage, path: p })
        }
    }

    /// Records an input under `key` with its content hash.
    pub fn track(&mut self, key: impl Into<String>, path: &Path) -> CliResult<()> {
        let h = file_sha256(path)?;
        self.inputs.insert(key.into(), h);
        Ok(())
    }

    /// Reads an upstream artifact, recording it as an input.
    pub fn read(&mut self, stage: &'static str, file: &str) -> CliResult<(PathBuf, Vec<u8>)> {
        let p = self.require(stage, file)?;
        let bytes = std::fs::read(&p).map_err(|e| CliError::Internal(format!("reading {}: {e}", p.display())))?;
        self.inputs.insert(format!("{stage}/{file}"), sha256_hex(&bytes));
        Ok((p, bytes))
    }

    pub fn read_json(&mut self, stage: &'static str, file: &str) -> CliResult<Value> {
        let (p, bytes) = self.read(stage, file)?;
        serde_json::from_slice(&bytes).map_err(|e| malformed(&p, e))
    }

    /// The canonical dataset written by `ingest`.
    pub fn dataset(&mut self) -> CliResult<Dataset> {
        let dir = self.config.out.join("ingest");
        for f in [
            skillforge_core::corpus::CATEGORIES_FILE,
            skillforge_core::corpus::SKILLS_FILE,
        ] {
            self.require("ingest", f)?;
        }
        let paths = InputPaths::in_dir(&dir);
        for p in paths.existing() {
            let name = p.file_name().unwrap().to_string_lossy();
            self.track(format!("ingest/{name}"), p)?;
        }
        let data = load_dataset(
            &paths,
            &LoadOptions {
                importance_scale: ImportanceScale::Normalized,
            },
        )
        .map_err(|e| match e {
            skillforge_core::Error::MissingFile(path) => CliError::MissingArtifact { stage: "ingest", path },
            e => e.into(),
        })?;
        Ok(data)
    }

    /// Writes `bytes` to `<out>/<stage>/<file>` atomically.
    pub fn write(&mut self, file: &str, bytes: &[u8]) -> CliResult<()> {
        let p = self.config.out.join(self.stage).join(file);
        write_atomic(&p, bytes)?;
        self.outputs.insert(format!("{}/{file}", self.stage), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json(&mut self, file: &str, value: &Value) -> CliResult<()> {
        self.write(file, canonical_json(value).as_bytes())
    }

    /// Records an output written by other means.
    pub fn record_output(&mut self, key: String, path: &Path) -> CliResult<()> {
        let h = file_sha256(path)?;
        self.outputs.insert(key, h);
        Ok(())
    }

    /// Appends this run's provenance record to the manifest.
    pub fn finish(self) -> CliResult<usize> {
        let record = json!({
            "stage": self.stage,
            "tool_version": TOOL_VERSION,
            "config": self.config.record,
            "inputs": self.inputs,
            "outputs": self.outputs,
        });
        let path = self.config.out.join(MANIFEST_FILE);
        std::fs::create_dir_all(&self.config.out)
            .map_err(|e| CliError::Internal(format!("creating {}: {e}", self.config.out.display())))?;
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| CliError::Internal(format!("opening {}: {e}", path.display())))?;
        // serde_json maps keep keys sorted; all values are strings.
        writeln!(f, "{record}").map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?;
        Ok(self.outputs.len())
    }
}

/// Every record in a manifest, in append order.
pub fn read_manifest(out: &Path) -> CliResult<Vec<Value>> {
    let path = out.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Internal(format!("reading {}: {e}", path.display())))?;
    text.lines()
        .map(|l| serde_json::from_str(l).map_err(|e| malformed(&path, e)))
        .collect()
}

/// Parsed CSV artifact with header check.
pub struct Table {
    pub path: PathBuf,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn parse(path: PathBuf, bytes: &[u8], header: &[&str]) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
        let got = rdr.headers().map_err(|e| malformed(&path, e))?.clone();
        if got.iter().ne(header.iter().copied()) {
            return Err(malformed(&path, format!("expected header {}", header.join(","))));
        }
        let rows = rdr
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| malformed(&path, e))?;
        Ok(Table { path, rows })
    }

    pub fn float(&self, row: usize, col: usize) -> CliResult<f64> {
        let s = &self.rows[row][col];
        skillforge_core::output::parse_float(s)
            .ok_or_else(|| malformed(&self.path, format!("row {}: bad number `{s}`", row + 2)))
    }

    pub fn int(&self, row: usize, col: usize) -> CliResult<u64> {
        let s = &self.rows[row][col];
        s.parse()
            .map_err(|_| malformed(&self.path, format!("row {}: bad integer `{s}`", row + 2)))
    }

    pub fn flag(&self, row: usize, col: usize) -> CliResult<bool> {
        match &self.rows[row][col] {
            "1" => Ok(true),
            "0" => Ok(false),
            s => Err(malformed(&self.path, format!("row {}: bad flag `{s}`", row + 2))),
        }
    }
}
