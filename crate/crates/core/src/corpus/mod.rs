//! Input tables and their canonical id spaces.
//!
//! Every axis (skills, occupations, task tokens, cities) is sorted by id at
//! load time, so all downstream matrices have a fixed row/column order.

mod load;
mod write;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use ndarray::Array2;

use crate::error::{Error, Result};

pub use load::load_dataset;
pub use write::write_canonical;

/// The fifteen skill-set labels used to group skills.
pub const DEFAULT_CATEGORIES: [&str; 15] = [
    "Basic Skills",
    "Cognitive Abilities",
    "Complex Problem Solving Skills",
    "Information Input",
    "Interacting With Others",
    "Knowledge",
    "Mental Processes",
    "Physical Abilities",
    "Psychomotor Abilities",
    "Resource Management Skills",
    "Sensory Abilities",
    "Social Skills",
    "Systems Skills",
    "Technical Skills",
    "Work Output",
];

/// Categories whose skills anchor the socio-cognitive side of the skill space.
pub const SOCIO_COGNITIVE_CATEGORIES: [&str; 3] = ["Knowledge", "Social Skills", "Cognitive Abilities"];

/// Case-insensitive membership in [`SOCIO_COGNITIVE_CATEGORIES`].
pub fn is_socio_cognitive_category(category: &str) -> bool {
    SOCIO_COGNITIVE_CATEGORIES
        .iter()
        .any(|c| c.eq_ignore_ascii_case(category.trim()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkillDef {
    pub id: String,
    pub name: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupation {
    pub id: String,
    pub title: String,
    pub major_group: String,
}

/// Sorted list of ids with a reverse lookup table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdIndex {
    ids: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl IdIndex {
    pub fn from_sorted(ids: Vec<String>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let lookup = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        IdIndex { ids, lookup }
    }

    pub fn from_iter<I: IntoIterator<Item = String>>(ids: I) -> Self {
        let set: BTreeSet<String> = ids.into_iter().collect();
        Self::from_sorted(set.into_iter().collect())
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// How raw importance scores are encoded in `source_importance.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImportanceScale {
    /// 1 (not important) to 5 (extremely important).
    #[default]
    Raw,
    /// Already mapped to `[0, 1]`.
    Normalized,
}

/// Maps a 1..=5 importance rating to `[0, 1]` with `(raw - 1) / 4`.
pub fn normalize_importance(raw: f64) -> Option<f64> {
    if (1.0..=5.0).contains(&raw) {
        Some((raw - 1.0) / 4.0)
    } else {
        None
    }
}

#[derive(Debug, Clone)]
pub struct SkillCatalog {
    pub skills: Vec<SkillDef>,
    pub index: IdIndex,
    /// Closed set of admissible category labels.
    pub categories: Vec<String>,
}

impl SkillCatalog {
    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }
}

/// Occupations with skill importance and task tokens.
#[derive(Debug, Clone)]
pub struct SourceCorpus {
    pub occupations: Vec<Occupation>,
    pub occupation_index: IdIndex,
    /// occupations x skills, values in `[0, 1]`.
    pub importance: Array2<f64>,
    /// Task-token vocabulary (sorted).
    pub vocabulary: IdIndex,
    /// Per occupation: sorted vocabulary indices.
    pub tasks: Vec<Vec<usize>>,
}

impl SourceCorpus {
    /// occupations x vocabulary presence matrix.
    pub fn task_presence(&self) -> Array2<bool> {
        let mut m = Array2::from_elem((self.occupations.len(), self.vocabulary.len()), false);
        for (o, toks) in self.tasks.iter().enumerate() {
            for &k in toks {
                m[[o, k]] = true;
            }
        }
        m
    }
}

/// Occupations described only by task tokens.
#[derive(Debug, Clone)]
pub struct TargetCorpus {
    pub occupations: Vec<Occupation>,
    pub occupation_index: IdIndex,
    /// Per occupation: sorted, de-duplicated tokens.
    pub tasks: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct City {
    pub id: String,
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub admin_tier: String,
}

#[derive(Debug, Clone)]
pub struct CityTable {
    pub cities: Vec<City>,
    pub index: IdIndex,
    /// cities x target occupations, worker counts.
    pub census: Array2<u64>,
}

impl CityTable {
    pub fn total_employment(&self, city: usize) -> u64 {
        self.census.row(city).sum()
    }
}

/// Observed top-k destinations per origin city (city indices, rank order).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MigrationObservations {
    pub by_origin: BTreeMap<usize, Vec<usize>>,
}

/// Generic numeric city-level covariates (one row per city, may be sparse).
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    pub columns: Vec<String>,
    /// Keyed by city index, one value per column (`NaN` = missing).
    pub rows: BTreeMap<usize, Vec<f64>>,
}

impl Covariates {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Every loaded and cross-validated input table.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub skills: SkillCatalog,
    pub source: SourceCorpus,
    pub target: TargetCorpus,
    pub cities: CityTable,
    pub migration: Option<MigrationObservations>,
    pub covariates: Option<Covariates>,
}

/// Locations of the input tables.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPaths {
    pub skills: PathBuf,
    pub source_importance: PathBuf,
    pub source_tasks: PathBuf,
    pub source_occupations: Option<PathBuf>,
    pub target_occupations: PathBuf,
    pub target_tasks: PathBuf,
    pub cities: PathBuf,
    pub census: PathBuf,
    pub migration_observed: Option<PathBuf>,
    pub covariates: Option<PathBuf>,
    /// One category label per line; defaults to [`DEFAULT_CATEGORIES`].
    pub categories: Option<PathBuf>,
}

pub const SKILLS_FILE: &str = "skills.csv";
pub const SOURCE_IMPORTANCE_FILE: &str = "source_importance.csv";
pub const SOURCE_TASKS_FILE: &str = "source_tasks.csv";
pub const SOURCE_OCCUPATIONS_FILE: &str = "source_occupations.csv";
pub const TARGET_OCCUPATIONS_FILE: &str = "target_occupations.csv";
pub const TARGET_TASKS_FILE: &str = "target_tasks.csv";
pub const CITIES_FILE: &str = "cities.csv";
pub const CENSUS_FILE: &str = "census.csv";
pub const MIGRATION_FILE: &str = "migration_observed.csv";
pub const COVARIATES_FILE: &str = "city_covariates.csv";
pub const CATEGORIES_FILE: &str = "categories.txt";

impl InputPaths {
    /// Conventional file names inside `dir`. Optional tables are picked up
    /// only when present.
    pub fn in_dir(dir: &Path) -> Self {
        let opt = |name: &str| {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        InputPaths {
            skills: dir.join(SKILLS_FILE),
            source_importance: dir.join(SOURCE_IMPORTANCE_FILE),
            source_tasks: dir.join(SOURCE_TASKS_FILE),
            source_occupations: opt(SOURCE_OCCUPATIONS_FILE),
            target_occupations: dir.join(TARGET_OCCUPATIONS_FILE),
            target_tasks: dir.join(TARGET_TASKS_FILE),
            cities: dir.join(CITIES_FILE),
            census: dir.join(CENSUS_FILE),
            migration_observed: opt(MIGRATION_FILE),
            covariates: opt(COVARIATES_FILE),
            categories: opt(CATEGORIES_FILE),
        }
    }

    /// Every path that exists, in a fixed order.
    pub fn existing(&self) -> Vec<&Path> {
        let mut all: Vec<&Path> = vec![
            &self.skills,
            &self.source_importance,
            &self.source_tasks,
            &self.target_occupations,
            &self.target_tasks,
            &self.cities,
            &self.census,
        ];
        for p in [
            &self.source_occupations,
            &self.migration_observed,
            &self.covariates,
            &self.categories,
        ]
        .into_iter()
        .flatten()
        {
            all.push(p);
        }
        all.retain(|p| p.exists());
        all
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub importance_scale: ImportanceScale,
}

/// Tokens of `vocabulary` mentioned in `description`.
///
/// Text is lowercased and split on anything that is not alphanumeric. A word
/// missing from the vocabulary matches with one trailing `s` removed, if that
/// stripped form is in the vocabulary. No other stemming is attempted.
pub fn extract_tasks(description: &str, vocabulary: &BTreeSet<String>) -> BTreeSet<String> {
    let lowered = description.to_lowercase();
    let mut found = BTreeSet::new();
    for word in lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
    {
        if vocabulary.contains(word) {
            found.insert(word.to_string());
        } else if let Some(stem) = word.strip_suffix('s') {
            if vocabulary.contains(stem) {
                found.insert(stem.to_string());
            }
        }
    }
    found
}

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
