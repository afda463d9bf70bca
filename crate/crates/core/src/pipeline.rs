//! Stage computations over a loaded [`Dataset`], free of file I/O.
//!
//! Each function takes the outputs of the stages it depends on, so callers
//! can persist intermediate results between stages or chain them in memory.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::cityprofile::{city_cognitive_score, city_effective_skills, city_skill_workers, CitySkills};
use crate::corpus::{is_socio_cognitive_category, Covariates, Dataset, MigrationObservations, SkillCatalog};
use crate::effective_use::{rca, threshold_binary, RcaMatrix, Threshold};
use crate::error::{Error, Result};
use crate::inference::{binarize, build_mi_matrix, infer_taxonomy, train_nb, MiMatrix, NbModel, SkillTaxonomy, SkillTraining};
use crate::mobility::{
    ndcg, predict_destinations, MassField, MassLabel, RingIndex, Variant,
};
use crate::skillspace::{
    betweenness, cognitive_score, louvain, proximity, reduce_to_two, skill_count, LouvainResult, Polarization,
    SkillSpace,
};
use crate::stats::{ols, welch_ttest, OlsFit, TTestResult};

/// Occupation x skill RCA of the source importance and its strict `> 1`
/// effective-use matrix.
pub fn source_effective_use(data: &Dataset) -> Result<(RcaMatrix<f64>, Array2<bool>)> {
    let r = rca(data.source.importance.view())?;
    let e = threshold_binary(&r, Threshold::Strict);
    Ok((r, e))
}

/// Everything produced by task-to-skill transfer.
#[derive(Debug, Clone)]
pub struct InferenceOutput {
    pub mi: MiMatrix<f64>,
    pub model: NbModel<f64>,
    pub training: Vec<SkillTraining<f64>>,
    /// target occupations x skills.
    pub log_odds: Array2<f64>,
    pub taxonomy: SkillTaxonomy<f64>,
    /// Target tokens missing from the source vocabulary, per occupation.
    pub unknown_tokens: Vec<usize>,
}

pub fn run_inference(data: &Dataset, source_effective: ArrayView2<'_, bool>, alpha: f64, threshold: f64) -> Result<InferenceOutput> {
    let presence = data.source.task_presence();
    let mi = build_mi_matrix(presence.view(), source_effective)?;
    let (model, training) = train_nb(presence.view(), source_effective, data.source.vocabulary.clone(), alpha)?;
    let (log_odds, posterior, unknown_tokens) = infer_taxonomy(&model, &data.target.tasks);
    let taxonomy = binarize(posterior, threshold)?;
    Ok(InferenceOutput {
        mi,
        model,
        training,
        log_odds,
        taxonomy,
        unknown_tokens,
    })
}

/// Skill network with communities, poles and per-occupation scores.
#[derive(Debug, Clone)]
pub struct SkillSpaceOutput {
    pub space: SkillSpace<f64>,
    pub communities: LouvainResult<f64>,
    pub betweenness: Vec<f64>,
    pub polarization: Polarization,
    /// Target occupations' share of the socio-cognitive skill set.
    pub occupation_scores: Vec<f64>,
}

/// Builds the skill space from `network_effective` (occupations x skills)
/// and scores the target occupations in `target_effective`.
pub fn run_skillspace(
    skills: &SkillCatalog,
    network_effective: ArrayView2<'_, bool>,
    target_effective: ArrayView2<'_, bool>,
    seed: u64,
) -> Result<SkillSpaceOutput> {
    let space: SkillSpace<f64> = proximity(network_effective);
    if space.edges.is_empty() {
        return Err(Error::Degenerate("skill space has no edges; no two skills co-occur".into()));
    }
    let communities = louvain(&space, seed)?;
    let cognitive: Vec<bool> = skills
        .skills
        .iter()
        .map(|s| is_socio_cognitive_category(&s.category))
        .collect();
    let polarization = reduce_to_two(&communities.labels, &space, &cognitive)?;
    let set = polarization.socio_cognitive_set();
    let occupation_scores = target_effective
        .rows()
        .into_iter()
        .map(|r| cognitive_score(&r.to_vec(), &set))
        .collect::<Result<Vec<f64>>>()?;
    let betweenness = betweenness(&space);
    Ok(SkillSpaceOutput {
        space,
        communities,
        betweenness,
        polarization,
        occupation_scores,
    })
}

/// Per-city skill profile.
#[derive(Debug, Clone)]
pub struct CityProfileOutput {
    /// cities x skills worker counts.
    pub workers: Array2<u64>,
    pub skills: CitySkills<f64>,
    /// `None` for cities with zero employment.
    pub cognitive: Vec<Option<f64>>,
    pub employment: Vec<u64>,
}

pub fn run_cityprofile(
    census: ArrayView2<'_, u64>,
    target_effective: ArrayView2<'_, bool>,
    occupation_scores: &[f64],
    cognitive_threshold: f64,
) -> Result<CityProfileOutput> {
    let workers = city_skill_workers(census, target_effective)?;
    let skills = city_effective_skills(workers.view())?;
    let employment: Vec<u64> = census.rows().into_iter().map(|r| r.sum()).collect();
    let cognitive = census
        .rows()
        .into_iter()
        .zip(&employment)
        .map(|(row, &total)| {
            if total == 0 {
                Ok(None)
            } else {
                city_cognitive_score(row, occupation_scores, cognitive_threshold).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CityProfileOutput {
        workers,
        skills,
        cognitive,
        employment,
    })
}

/// How the "skilled" mass field counts workers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkilledMode {
    /// `sum over o of census(c,o) * skill_count(o)`.
    Weighted,
    /// Workers in occupations whose skill count is strictly above the given
    /// percentile (nearest-rank) of occupation skill counts.
    Percentile(f64),
}

/// Mass for the requested field; `None` when the inputs needed for it are
/// absent (no degree-holder covariate).
pub fn mass_field(
    label: MassLabel,
    census: ArrayView2<'_, u64>,
    target_effective: ArrayView2<'_, bool>,
    covariates: Option<&Covariates>,
    skilled: SkilledMode,
) -> Result<Option<MassField<f64>>> {
    let n_city = census.nrows();
    let counts: Vec<u64> = target_effective
        .rows()
        .into_iter()
        .map(|r| skill_count(&r.to_vec()) as u64)
        .collect();
    let weighted = |w: &dyn Fn(usize) -> u64| -> Vec<f64> {
        census
            .rows()
            .into_iter()
            .map(|row| row.iter().enumerate().map(|(o, &c)| c * w(o)).sum::<u64>() as f64)
            .collect()
    };
    let masses = match label {
        MassLabel::Employment => weighted(&|_| 1),
        MassLabel::SkilledWorkers => match skilled {
            SkilledMode::Weighted => weighted(&|o| counts[o]),
            SkilledMode::Percentile(p) => {
                if !(0.0..=100.0).contains(&p) {
                    return Err(Error::Validation(format!("skilled percentile must lie in [0, 100], got {p}")));
                }
                let mut sorted = counts.clone();
                sorted.sort_unstable();
                let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
                let cut = sorted[rank.min(sorted.len()) - 1];
                weighted(&|o| u64::from(counts[o] > cut))
            }
        },
        MassLabel::DegreeHolders => {
            let Some(cov) = covariates else { return Ok(None) };
            let Some(col) = cov.column("degree_holders") else { return Ok(None) };
            (0..n_city)
                .map(|c| {
                    let v = cov.rows.get(&c).map_or(f64::NAN, |r| r[col]);
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::Validation(format!("city #{c} has no degree_holders value")))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
        MassLabel::Custom => return Ok(None),
    };
    MassField::new(label, masses).map(Some)
}

/// Ranked predictions and NDCG for one mass field.
#[derive(Debug, Clone)]
pub struct FieldEvaluation {
    pub label: MassLabel,
    /// origin -> `(destination, T)` in rank order.
    pub predictions: BTreeMap<usize, Vec<(usize, f64)>>,
    /// origin -> NDCG, for origins with observations.
    pub ndcg: BTreeMap<usize, f64>,
    /// Origins with zero mass in this field.
    pub skipped: Vec<usize>,
}

/// Predicts top-`k` destinations from every origin with positive mass and
/// scores them against the observations.
pub fn evaluate_field(
    field: &MassField<f64>,
    ring: &RingIndex<f64>,
    observed: Option<&MigrationObservations>,
    k: usize,
    variant: Variant,
) -> Result<FieldEvaluation> {
    let mut predictions = BTreeMap::new();
    let mut scores = BTreeMap::new();
    let mut skipped = Vec::new();
    for origin in 0..ring.len() {
        if !(field.masses[origin] > 0.0) {
            skipped.push(origin);
            continue;
        }
        let p = predict_destinations(origin, field, ring, k, variant)?;
        if let Some(obs) = observed.and_then(|o| o.by_origin.get(&origin)) {
            scores.insert(origin, ndcg(&p.destinations(), obs)?);
        }
        predictions.insert(origin, p.ranked);
    }
    Ok(FieldEvaluation {
        label: field.label,
        predictions,
        ndcg: scores,
        skipped,
    })
}

/// Welch test between two fields' per-origin NDCG; `test` is `None` when
/// it is undefined (fewer than two samples or zero variance in both), with
/// the reason in `note`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub a: MassLabel,
    pub b: MassLabel,
    pub test: Option<TTestResult<f64>>,
    pub note: Option<String>,
}

/// Every unordered pair of evaluated fields, in input order.
pub fn compare_fields(evals: &[FieldEvaluation]) -> Vec<FieldPair> {
    let mut out = Vec::new();
    for (i, x) in evals.iter().enumerate() {
        for y in &evals[i + 1..] {
            let a: Vec<f64> = x.ndcg.values().copied().collect();
            let b: Vec<f64> = y.ndcg.values().copied().collect();
            let (test, note) = match welch_ttest(&a, &b) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            };
            out.push(FieldPair {
                a: x.label,
                b: y.label,
                test,
                note,
            });
        }
    }
    out
}

/// City-level table for regressions: covariate columns plus the derived
/// `cognitive_score`, `skills_count` and `total_employment`.
#[derive(Debug, Clone)]
pub struct CityTable {
    pub columns: Vec<String>,
    /// Keyed by city index; `NaN` marks missing values.
    pub rows: BTreeMap<usize, Vec<f64>>,
}

/// Per-city values derived by the profiling stage.
#[derive(Debug, Clone, Copy)]
pub struct CityDerived<'a> {
    pub cognitive: &'a [Option<f64>],
    pub skills_count: &'a [usize],
    pub employment: &'a [u64],
}

impl<'a> From<&'a CityProfileOutput> for CityDerived<'a> {
    fn from(p: &'a CityProfileOutput) -> Self {
        CityDerived {
            cognitive: &p.cognitive,
            skills_count: &p.skills.counts,
            employment: &p.employment,
        }
    }
}

pub fn regression_table(derived: CityDerived<'_>, covariates: Option<&Covariates>) -> CityTable {
    let mut columns: Vec<String> = covariates.map_or_else(Vec::new, |c| c.columns.clone());
    let n_cov = columns.len();
    columns.extend(["cognitive_score", "skills_count", "total_employment"].map(String::from));
    let rows = (0..derived.cognitive.len())
        .map(|c| {
            let mut row = covariates
                .and_then(|cov| cov.rows.get(&c).cloned())
                .unwrap_or_else(|| vec![f64::NAN; n_cov]);
            row.push(derived.cognitive[c].unwrap_or(f64::NAN));
            row.push(derived.skills_count[c] as f64);
            row.push(derived.employment[c] as f64);
            (c, row)
        })
        .collect();
    CityTable { columns, rows }
}

/// One fitted model: regressors in order (intercept first) and the fit.
#[derive(Debug, Clone)]
pub struct Regression {
    pub response: String,
    pub variables: Vec<String>,
    /// Cities used (complete cases), ascending.
    pub cities: Vec<usize>,
    pub fit: OlsFit<f64>,
}

/// OLS of `response` on `variables` plus an intercept over complete cases.
pub fn regress(table: &CityTable, response: &str, variables: &[String]) -> Result<Regression> {
    let col = |name: &str| {
        table
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Validation(format!("unknown regression variable `{name}`")))
    };
    let y_col = col(response)?;
    let x_cols = variables.iter().map(|v| col(v)).collect::<Result<Vec<_>>>()?;
    let cities: Vec<usize> = table
        .rows
        .iter()
        .filter(|(_, r)| r[y_col].is_finite() && x_cols.iter().all(|&c| r[c].is_finite()))
        .map(|(&c, _)| c)
        .collect();
    let p = x_cols.len() + 1;
    let design = Array2::from_shape_fn((cities.len(), p), |(i, j)| {
        if j == 0 {
            1.0
        } else {
            table.rows[&cities[i]][x_cols[j - 1]]
        }
    });
    let response_v = cities.iter().map(|c| table.rows[c][y_col]).collect();
    let fit = ols(design.view(), ndarray::Array1::from_vec(response_v).view())?;
    let mut names = vec!["intercept".to_string()];
    names.extend(variables.iter().cloned());
    Ok(Regression {
        response: response.to_string(),
        variables: names,
        cities,
        fit,
    })
}
