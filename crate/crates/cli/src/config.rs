//! Flat `key = value` configuration merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use skillforge_core::corpus::{self, ImportanceScale, InputPaths};
use skillforge_core::mobility::{MassLabel, Variant};
use skillforge_core::pipeline::SkilledMode;
use skillforge_core::synthetic::WorldSpec;

use crate::error::{CliError, CliResult};

/// Input-file keys and their conventional file names.
pub const INPUT_KEYS: [(&str, &str); 11] = [
    ("skills", corpus::SKILLS_FILE),
    ("source_importance", corpus::SOURCE_IMPORTANCE_FILE),
    ("source_tasks", corpus::SOURCE_TASKS_FILE),
    ("source_occupations", corpus::SOURCE_OCCUPATIONS_FILE),
    ("target_occupations", corpus::TARGET_OCCUPATIONS_FILE),
    ("target_tasks", corpus::TARGET_TASKS_FILE),
    ("cities", corpus::CITIES_FILE),
    ("census", corpus::CENSUS_FILE),
    ("migration_observed", corpus::MIGRATION_FILE),
    ("city_covariates", corpus::COVARIATES_FILE),
    ("categories", corpus::CATEGORIES_FILE),
];

const PATH_KEYS: [&str; 2] = ["input_dir", "out"];

const SCALAR_KEYS: [&str; 22] = [
    "seed",
    "alpha",
    "threshold",
    "cognitive_threshold",
    "variant",
    "mass",
    "k",
    "threads",
    "importance_scale",
    "skillspace_source",
    "skilled_mode",
    "skilled_percentile",
    "regress_response",
    "regress_models",
    "synth_n_skills",
    "synth_n_source_occupations",
    "synth_n_target_occupations",
    "synth_n_tasks",
    "synth_n_cities",
    "synth_task_flip",
    "synth_skill_leak",
    "synth_seed",
];

fn is_path_key(key: &str) -> bool {
    PATH_KEYS.contains(&key) || INPUT_KEYS.iter().any(|(k, _)| *k == key)
}

fn known(key: &str) -> bool {
    is_path_key(key) || SCALAR_KEYS.contains(&key)
}

/// Raw key/value settings before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parses a config file. Blank lines and `#` comments are skipped;
    /// relative paths resolve against the file's directory.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut s = Settings::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    n + 1
                )));
            };
            let (k, v) = (k.trim(), v.trim());
            let v = if is_path_key(k) && Path::new(v).is_relative() {
                base.join(v).display().to_string()
            } else {
                v.to_string()
            };
            s.set(k, v)
                .map_err(|e| CliError::Validation(format!("{}:{}: {e}", path.display(), n + 1)))?;
        }
        Ok(s)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> CliResult<()> {
        if !known(key) {
            return Err(CliError::Validation(format!("unknown config key `{key}`")));
        }
        self.0.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| CliError::Validation(format!("config `{key}` = `{v}`: {e}"))),
        }
    }
}

/// Which effective-use matrix the skill network is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkSource {
    Target,
    Source,
}

/// Mass fields evaluated by the mobility stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassSelection {
    /// Every field whose inputs are present.
    All,
    Only(MassLabel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub out: PathBuf,
    pub input_dir: Option<PathBuf>,
    /// Per-file overrides keyed as in [`INPUT_KEYS`].
    pub input_files: BTreeMap<String, PathBuf>,
    pub importance_scale: ImportanceScale,
    pub seed: u64,
    pub alpha: f64,
    pub threshold: f64,
    pub cognitive_threshold: f64,
    pub variant: Variant,
    pub mass: MassSelection,
    pub k: usize,
    pub threads: Option<usize>,
    pub network_source: NetworkSource,
    pub skilled: SkilledMode,
    pub regress_response: String,
    /// `None` selects the default model set.
    pub regress_models: Option<Vec<Vec<String>>>,
    pub world: WorldSpec,
    /// Effective settings recorded in the manifest (excludes `out` and
    /// `threads`, which never change artifact contents).
    pub record: BTreeMap<String, String>,
}

fn unit_open(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(CliError::Validation(format!("config `{key}` must lie in (0, 1), got {v}")))
    }
}

impl Config {
    pub fn from_settings(s: &Settings) -> CliResult<Self> {
        let out = PathBuf::from(s.get("out").unwrap_or("out"));
        let input_dir = s.get("input_dir").map(PathBuf::from);
        let input_files = INPUT_KEYS
            .iter()
            .filter_map(|(k, _)| s.get(k).map(|v| (k.to_string(), PathBuf::from(v))))
            .collect();
        let importance_scale = match s.get("importance_scale").unwrap_or("raw") {
            "raw" => ImportanceScale::Raw,
            "normalized" => ImportanceScale::Normalized,
            v => return Err(CliError::Validation(format!("config `importance_scale` must be raw|normalized, got `{v}`"))),
        };
        let seed = s.parse("seed", 42u64)?;
        let alpha = s.parse("alpha", 1.0f64)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CliError::Validation(format!("config `alpha` must be positive, got {alpha}")));
        }
        let threshold = unit_open("threshold", s.parse("threshold", 0.5)?)?;
        let cognitive_threshold = unit_open("cognitive_threshold", s.parse("cognitive_threshold", 0.6)?)?;
        let variant = s.parse("variant", Variant::Paper)?;
        let mass = match s.get("mass").unwrap_or("all") {
            "all" => MassSelection::All,
            v => match v.parse::<MassLabel>()? {
                MassLabel::Custom => {
                    return Err(CliError::Validation("mass field `custom` is only available through the library".into()))
                }
                l => MassSelection::Only(l),
            },
        };
        let k = s.parse("k", 10usize)?;
        if k == 0 {
            return Err(CliError::Validation("config `k` must be at least 1".into()));
        }
        let threads = match s.get("threads") {
            None => None,
            Some(_) => Some(s.parse("threads", 0usize)?).filter(|&t| t > 0),
        };
        let network_source = match s.get("skillspace_source").unwrap_or("target") {
            "target" => NetworkSource::Target,
            "source" => NetworkSource::Source,
            v => return Err(CliError::Validation(format!("config `skillspace_source` must be target|source, got `{v}`"))),
        };
        let skilled = match s.get("skilled_mode").unwrap_or("weighted") {
            "weighted" => SkilledMode::Weighted,
            "percentile" => {
                let p = s.parse("skilled_percentile", 50.0f64)?;
                if !(0.0..=100.0).contains(&p) {
                    return Err(CliError::Validation(format!("config `skilled_percentile` must lie in [0, 100], got {p}")));
                }
                SkilledMode::Percentile(p)
            }
            v => return Err(CliError::Validation(format!("config `skilled_mode` must be weighted|percentile, got `{v}`"))),
        };
        let regress_response = s.get("regress_response").unwrap_or("gdp_per_capita").to_string();
        let regress_models = s.get("regress_models").map(parse_models).transpose()?;
        let defaults = WorldSpec::default();
        let world = WorldSpec {
            seed: s.parse("synth_seed", seed)?,
            n_skills: s.parse("synth_n_skills", defaults.n_skills)?,
            n_source_occupations: s.parse("synth_n_source_occupations", defaults.n_source_occupations)?,
            n_target_occupations: s.parse("synth_n_target_occupations", defaults.n_target_occupations)?,
            n_tasks: s.parse("synth_n_tasks", defaults.n_tasks)?,
            n_cities: s.parse("synth_n_cities", defaults.n_cities)?,
            task_flip: s.parse("synth_task_flip", defaults.task_flip)?,
            skill_leak: s.parse("synth_skill_leak", defaults.skill_leak)?,
        };
        world.validate()?;

        let mut record: BTreeMap<String, String> = s
            .0
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out" | "threads"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        for (k, v) in [
            ("seed", seed.to_string()),
            ("alpha", alpha.to_string()),
            ("threshold", threshold.to_string()),
            ("cognitive_threshold", cognitive_threshold.to_string()),
            ("variant", variant.as_str().to_string()),
            ("k", k.to_string()),
        ] {
            record.insert(k.to_string(), v);
        }
        record.entry("mass".into()).or_insert_with(|| "all".into());
        record.entry("importance_scale".into()).or_insert_with(|| "raw".into());
        record.entry("skillspace_source".into()).or_insert_with(|| "target".into());
        record.entry("skilled_mode".into()).or_insert_with(|| "weighted".into());
        record.insert("regress_response".into(), regress_response.clone());

        Ok(Config {
            out,
            input_dir,
            input_files,
            importance_scale,
            seed,
            alpha,
            threshold,
            cognitive_threshold,
            variant,
            mass,
            k,
            threads,
            network_source,
            skilled,
            regress_response,
            regress_models,
            world,
            record,
        })
    }

    /// Input tables for `ingest`: the conventional names under `input_dir`,
    /// then per-file overrides.
    pub fn input_paths(&self) -> CliResult<InputPaths> {
        let mut p = match &self.input_dir {
            Some(dir) => {
                if !dir.is_dir() {
                    return Err(CliError::Validation(format!("input_dir {} is not a directory", dir.display())));
                }
                InputPaths::in_dir(dir)
            }
            None => {
                let required = ["skills", "source_importance", "source_tasks", "target_occupations", "target_tasks", "cities", "census"];
                if let Some(k) = required.iter().find(|k| !self.input_files.contains_key(**k)) {
                    return Err(CliError::Validation(format!("no `input_dir` configured and no path given for `{k}`")));
                }
                InputPaths::in_dir(Path::new("/nonexistent"))
            }
        };
        for (key, path) in &self.input_files {
            let path = path.clone();
            match key.as_str() {
                "skills" => p.skills = path,
                "source_importance" => p.source_importance = path,
                "source_tasks" => p.source_tasks = path,
                "source_occupations" => p.source_occupations = Some(path),
                "target_occupations" => p.target_occupations = path,
                "target_tasks" => p.target_tasks = path,
                "cities" => p.cities = path,
                "census" => p.census = path,
                "migration_observed" => p.migration_observed = Some(path),
                "city_covariates" => p.covariates = Some(path),
                "categories" => p.categories = Some(path),
                _ => unreachable!("input keys are validated"),
            }
        }
        Ok(p)
    }
}

/// `a,b;c` -> `[[a, b], [c]]`.
fn parse_models(s: &str) -> CliResult<Vec<Vec<String>>> {
    s.split(';')
        .map(|m| {
            let vars: Vec<String> = m.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if vars.is_empty() {
                Err(CliError::Validation(format!("empty model in `regress_models` = `{s}`")))
            } else {
                Ok(vars)
            }
        })
        .collect()
}
