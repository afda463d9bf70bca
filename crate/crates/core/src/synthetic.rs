//! Seeded synthetic worlds with planted two-cluster structure.
//!
//! Skills split into a socio-cognitive and a sensory-physical cluster. Each
//! occupation belongs to one cluster and mostly uses that cluster's skills;
//! each skill owns a dedicated set of task tokens whose presence follows the
//! skill's use. Cities mix occupations according to a planted bias toward
//! the socio-cognitive cluster. Observed migration rankings are produced by
//! the default radiation model over city employment, so they test the
//! ranking and evaluation plumbing rather than the model's realism.
//!
//! Generation uses integer arithmetic on a [`SeededRng`] stream; the only
//! floating point step is the radiation ranking of migration destinations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::corpus::*;
use crate::error::{Error, Result};
use crate::mobility::{predict_destinations, MassField, MassLabel, RingIndex, Variant};
use crate::output::{canonical_json, csv_bytes, write_atomic};
use crate::rng::SeededRng;
use crate::skillspace::Pole;

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";

/// Probability (ppm) that an occupation uses a skill of its own cluster.
const OWN_CLUSTER_USE_PPM: u32 = 800_000;
/// Observed destinations per origin.
const OBSERVED_TOP_K: usize = 10;

const COGNITIVE_CATEGORIES: [&str; 3] = ["Knowledge", "Social Skills", "Cognitive Abilities"];
const PHYSICAL_CATEGORIES: [&str; 5] = [
    "Physical Abilities",
    "Psychomotor Abilities",
    "Sensory Abilities",
    "Technical Skills",
    "Work Output",
];
const COGNITIVE_GROUPS: [&str; 3] = ["Professionals", "Managers", "Clerks"];
const PHYSICAL_GROUPS: [&str; 3] = ["Manufacturing Workers", "Agricultural Workers", "Service Workers"];

#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec {
    pub seed: u64,
    pub n_skills: usize,
    pub n_source_occupations: usize,
    pub n_target_occupations: usize,
    pub n_tasks: usize,
    pub n_cities: usize,
    /// Probability of flipping a task token's presence.
    pub task_flip: f64,
    /// Probability of using a skill from the other cluster.
    pub skill_leak: f64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            seed: 42,
            n_skills: 40,
            n_source_occupations: 80,
            n_target_occupations: 60,
            n_tasks: 80,
            n_cities: 30,
            task_flip: 0.05,
            skill_leak: 0.05,
        }
    }
}

impl WorldSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_skills", self.n_skills),
            ("n_source_occupations", self.n_source_occupations),
            ("n_target_occupations", self.n_target_occupations),
            ("n_tasks", self.n_tasks),
            ("n_cities", self.n_cities),
        ];
        for (name, v) in counts {
            if v < 2 {
                return Err(Error::Validation(format!("{name} must be at least 2")));
            }
        }
        if self.n_tasks < self.n_skills {
            return Err(Error::Validation("n_tasks must be at least n_skills".into()));
        }
        for (name, p) in [("task_flip", self.task_flip), ("skill_leak", self.skill_leak)] {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::Validation(format!("{name} must lie in [0, 1)")));
            }
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "n_skills": self.n_skills,
            "n_source_occupations": self.n_source_occupations,
            "n_target_occupations": self.n_target_occupations,
            "n_tasks": self.n_tasks,
            "n_cities": self.n_cities,
            "task_flip": self.task_flip,
            "skill_leak": self.skill_leak,
        })
    }
}

/// Planted labels, indexed in canonical (id-sorted) order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub skill_pole: Vec<Pole>,
    pub source_pole: Vec<Pole>,
    pub target_pole: Vec<Pole>,
    /// Planted share of socio-cognitive hiring per city, in `[0.1, 0.9]`.
    pub city_bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticWorld {
    pub spec: WorldSpec,
    /// File name -> contents, in the corpus input formats.
    pub files: BTreeMap<String, Vec<u8>>,
    pub truth: GroundTruth,
}

fn ppm(p: f64) -> u32 {
    (p * 1_000_000.0).round() as u32
}

fn decimal(value: u64, places: u32) -> String {
    let scale = 10u64.pow(places);
    format!("{}.{:0width$}", value / scale, value % scale, width = places as usize)
}

fn skill_id(i: usize) -> String {
    format!("S{:03}", i + 1)
}

fn task_id(k: usize) -> String {
    format!("task{:04}", k + 1)
}

fn pole_of(is_cognitive: bool) -> Pole {
    if is_cognitive {
        Pole::SocioCognitive
    } else {
        Pole::SensoryPhysical
    }
}

struct Occ {
    cognitive: bool,
    used: Vec<bool>,
    tasks: Vec<usize>,
}

fn draw_occupation(rng: &mut SeededRng, spec: &WorldSpec, skill_cognitive: &[bool], cognitive: bool) -> Occ {
    let leak = ppm(spec.skill_leak);
    let flip = ppm(spec.task_flip);
    let used: Vec<bool> = skill_cognitive
        .iter()
        .map(|&sc| {
            if sc == cognitive {
                rng.chance_ppm(OWN_CLUSTER_USE_PPM)
            } else {
                rng.chance_ppm(leak)
            }
        })
        .collect();
    let mut tasks: Vec<usize> = (0..spec.n_tasks)
        .filter(|&k| used[k % spec.n_skills] ^ rng.chance_ppm(flip))
        .collect();
    if tasks.is_empty() {
        let s = used.iter().position(|&u| u).unwrap_or(0);
        tasks.push(s);
    }
    Occ { cognitive, used, tasks }
}

/// Generates a world. The same spec always yields byte-identical files.
pub fn generate(spec: &WorldSpec) -> Result<SyntheticWorld> {
    spec.validate()?;
    let mut rng = SeededRng::new(spec.seed);
    let mut files = BTreeMap::new();

    let n_cognitive = spec.n_skills.div_ceil(2);
    let skill_cognitive: Vec<bool> = (0..spec.n_skills).map(|i| i < n_cognitive).collect();
    files.insert(
        SKILLS_FILE.to_string(),
        csv_bytes(
            &["skill_id", "name", "category"],
            (0..spec.n_skills).map(|i| {
                let cat = if skill_cognitive[i] {
                    COGNITIVE_CATEGORIES[i % COGNITIVE_CATEGORIES.len()]
                } else {
                    PHYSICAL_CATEGORIES[(i - n_cognitive) % PHYSICAL_CATEGORIES.len()]
                };
                [skill_id(i), format!("Skill {}", i + 1), cat.to_string()]
            }),
        ),
    );

    let group = |o: usize, cognitive: bool| {
        let g = if cognitive { COGNITIVE_GROUPS } else { PHYSICAL_GROUPS };
        g[(o / 2) % g.len()].to_string()
    };

    // Source corpus: importance in hundredths on the 1..5 scale.
    let source: Vec<Occ> = (0..spec.n_source_occupations)
        .map(|o| draw_occupation(&mut rng, spec, &skill_cognitive, o % 2 == 0))
        .collect();
    let src_id = |o: usize| format!("SRC{:03}", o + 1);
    let mut importance = Vec::new();
    for (o, occ) in source.iter().enumerate() {
        for s in 0..spec.n_skills {
            let hundredths = if occ.used[s] {
                rng.range_inclusive(350, 500)
            } else {
                rng.range_inclusive(100, 250)
            };
            importance.push([src_id(o), skill_id(s), decimal(hundredths, 2)]);
        }
    }
    files.insert(
        SOURCE_IMPORTANCE_FILE.to_string(),
        csv_bytes(&["occupation_id", "skill_id", "importance"], importance),
    );
    files.insert(
        SOURCE_OCCUPATIONS_FILE.to_string(),
        csv_bytes(
            &["occupation_id", "title", "major_group"],
            source.iter().enumerate().map(|(o, occ)| {
                [src_id(o), format!("Source occupation {}", o + 1), group(o, occ.cognitive)]
            }),
        ),
    );
    files.insert(
        SOURCE_TASKS_FILE.to_string(),
        csv_bytes(
            &["occupation_id", "task_token"],
            source
                .iter()
                .enumerate()
                .flat_map(|(o, occ)| occ.tasks.iter().map(move |&k| [src_id(o), task_id(k)])),
        ),
    );

    // Target corpus: tasks only.
    let target: Vec<Occ> = (0..spec.n_target_occupations)
        .map(|o| draw_occupation(&mut rng, spec, &skill_cognitive, o % 2 == 0))
        .collect();
    let tgt_id = |o: usize| format!("TGT{:03}", o + 1);
    files.insert(
        TARGET_OCCUPATIONS_FILE.to_string(),
        csv_bytes(
            &["occupation_id", "title", "major_group"],
            target.iter().enumerate().map(|(o, occ)| {
                [tgt_id(o), format!("Target occupation {}", o + 1), group(o, occ.cognitive)]
            }),
        ),
    );
    files.insert(
        TARGET_TASKS_FILE.to_string(),
        csv_bytes(
            &["occupation_id", "task_token"],
            target
                .iter()
                .enumerate()
                .flat_map(|(o, occ)| occ.tasks.iter().map(move |&k| [tgt_id(o), task_id(k)])),
        ),
    );

    // Cities on a jittered grid.
    let side = (1..).find(|s| s * s >= spec.n_cities).unwrap();
    let city_id = |c: usize| format!("C{:03}", c + 1);
    let mut city_rows = Vec::new();
    let mut coords = Vec::new();
    let mut bias_permille = Vec::new();
    let mut census_rows = Vec::new();
    let mut employment = vec![0u64; spec.n_cities];
    for c in 0..spec.n_cities {
        let lat_e3 = 25_000 + (c / side) as u64 * 1_500 + rng.below(400);
        let lon_e3 = 105_000 + (c % side) as u64 * 1_500 + rng.below(400);
        let (lat_s, lon_s) = (decimal(lat_e3, 3), decimal(lon_e3, 3));
        coords.push((lat_s.parse::<f64>().unwrap(), lon_s.parse::<f64>().unwrap()));
        let tier = if c % 5 == 0 { "prefecture-capital" } else { "prefecture" };
        city_rows.push([city_id(c), format!("City {}", c + 1), lat_s, lon_s, tier.to_string()]);

        let bias = rng.range_inclusive(100, 900);
        let size = rng.range_inclusive(1, 10);
        bias_permille.push(bias);
        for (o, occ) in target.iter().enumerate() {
            let base = rng.range_inclusive(20, 200);
            let share = if occ.cognitive { bias } else { 1000 - bias };
            let workers = base * size * share / 1000;
            if workers > 0 {
                employment[c] += workers;
                census_rows.push([city_id(c), tgt_id(o), workers.to_string()]);
            }
        }
    }
    files.insert(
        CITIES_FILE.to_string(),
        csv_bytes(&["city_id", "name", "lat", "lon", "admin_tier"], city_rows),
    );
    files.insert(
        CENSUS_FILE.to_string(),
        csv_bytes(&["city_id", "occupation_id", "workers"], census_rows),
    );

    let mut cov_rows = Vec::new();
    for c in 0..spec.n_cities {
        let b = bias_permille[c];
        let gdp_e4 = 40_000 + 6 * b + rng.below(1_001) - 500;
        let degree_e4 = 500 + 5 * b / 2 + rng.below(201) - 100;
        let holders = employment[c] * degree_e4 / 10_000;
        cov_rows.push([city_id(c), decimal(gdp_e4, 4), decimal(degree_e4, 4), holders.to_string()]);
    }
    files.insert(
        COVARIATES_FILE.to_string(),
        csv_bytes(&["city_id", "gdp_per_capita", "degree_share", "degree_holders"], cov_rows),
    );

    let field = MassField::new(MassLabel::Employment, employment.iter().map(|&e| e as f64).collect())?;
    let index = RingIndex::new(&coords);
    let mut mig_rows = Vec::new();
    for origin in 0..spec.n_cities {
        if employment[origin] == 0 {
            continue;
        }
        let pred = predict_destinations(origin, &field, &index, OBSERVED_TOP_K, Variant::Paper)?;
        for (rank, &(d, _)) in pred.ranked.iter().enumerate() {
            mig_rows.push([city_id(origin), (rank + 1).to_string(), city_id(d)]);
        }
    }
    files.insert(
        MIGRATION_FILE.to_string(),
        csv_bytes(&["origin_id", "rank", "destination_id"], mig_rows),
    );

    let truth = GroundTruth {
        skill_pole: skill_cognitive.iter().map(|&c| pole_of(c)).collect(),
        source_pole: source.iter().map(|o| pole_of(o.cognitive)).collect(),
        target_pole: target.iter().map(|o| pole_of(o.cognitive)).collect(),
        city_bias: bias_permille.iter().map(|&b| b as f64 / 1000.0).collect(),
    };
    let truth_json = json!({
        "spec": spec.to_json(),
        "migration": {"mass_field": "employment", "variant": "paper", "top_k": OBSERVED_TOP_K},
        "skills": labels(&truth.skill_pole, skill_id),
        "source_occupations": labels(&truth.source_pole, src_id),
        "target_occupations": labels(&truth.target_pole, tgt_id),
        "city_bias": truth.city_bias.iter().enumerate()
            .map(|(c, &b)| (city_id(c), crate::output::json_float(b)))
            .collect::<serde_json::Map<_, _>>(),
    });
    files.insert(GROUND_TRUTH_FILE.to_string(), canonical_json(&truth_json).into_bytes());

    Ok(SyntheticWorld {
        spec: spec.clone(),
        files,
        truth,
    })
}

fn labels(poles: &[Pole], id: impl Fn(usize) -> String) -> Value {
    Value::Object(
        poles
            .iter()
            .enumerate()
            .map(|(i, p)| (id(i), Value::String(p.as_str().into())))
            .collect(),
    )
}

impl SyntheticWorld {
    /// Writes every file into `dir`; returns the paths in name order.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for (name, bytes) in &self.files {
            let p = dir.join(name);
            write_atomic(&p, bytes)?;
            out.push(p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&WorldSpec::default()).unwrap();
        let b = generate(&WorldSpec::default()).unwrap();
        assert_eq!(a.files, b.files);
        let c = generate(&WorldSpec { seed: 7, ..WorldSpec::default() }).unwrap();
        assert_ne!(a.files, c.files);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&WorldSpec { n_cities: 1, ..WorldSpec::default() }).is_err());
        assert!(generate(&WorldSpec { task_flip: 1.0, ..WorldSpec::default() }).is_err());
        assert!(generate(&WorldSpec { n_tasks: 10, ..WorldSpec::default() }).is_err());
    }

    #[test]
    fn files_load_cleanly() {
        let world = generate(&WorldSpec::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        world.write_to(dir.path()).unwrap();
        let data = load_dataset(&InputPaths::in_dir(dir.path()), &LoadOptions::default()).unwrap();
        assert_eq!(data.skills.len(), 40);
        assert_eq!(data.target.occupations.len(), 60);
        assert_eq!(data.cities.cities.len(), 30);
        assert_eq!(data.migration.unwrap().by_origin.len(), 30);
        assert_eq!(world.truth.skill_pole.iter().filter(|p| **p == Pole::SocioCognitive).count(), 20);
    }
}
