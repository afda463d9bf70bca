//! One function per subcommand. Each reads upstream artifacts from the
//! output directory, writes its own under `<out>/<stage>/` and appends a
//! manifest record.

use std::collections::BTreeMap;
use std::str::FromStr;

use ndarray::Array2;
use serde_json::{json, Map, Value};
use skillforge_core::corpus::{load_dataset, write_canonical, Dataset, InputPaths, LoadOptions};
use skillforge_core::mobility::{MassLabel, RingIndex};
use skillforge_core::output::{csv_bytes, fmt_float, json_float};
use skillforge_core::pipeline::{
    compare_fields, evaluate_field, mass_field, regress, regression_table, run_cityprofile, run_inference,
    run_skillspace, source_effective_use, CityDerived, FieldEvaluation,
};
use skillforge_core::skillspace::{group_skillset_aggregate, skill_count, Pole};
use skillforge_core::synthetic::generate;

use crate::artifacts::{StageRun, Table};
use crate::config::{Config, MassSelection, NetworkSource, INPUT_KEYS};
use crate::error::{malformed, CliError, CliResult};

/// Pipeline subcommands, in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Synth,
    Ingest,
    Infer,
    Rca,
    Skillspace,
    Cityprofile,
    Mobility,
    Regress,
    Report,
}

impl Stage {
    pub const CHAIN: [Stage; 8] = [
        Stage::Ingest,
        Stage::Infer,
        Stage::Rca,
        Stage::Skillspace,
        Stage::Cityprofile,
        Stage::Mobility,
        Stage::Regress,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Infer => "infer",
            Stage::Rca => "rca",
            Stage::Skillspace => "skillspace",
            Stage::Cityprofile => "cityprofile",
            Stage::Mobility => "mobility",
            Stage::Regress => "regress",
            Stage::Report => "report",
        }
    }
}

impl FromStr for Stage {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        [Stage::Synth]
            .into_iter()
            .chain(Stage::CHAIN)
            .find(|st| st.name() == s)
            .ok_or_else(|| CliError::Validation(format!("unknown subcommand `{s}`")))
    }
}

/// Runs one stage; returns the number of artifacts written.
pub fn execute(stage: Stage, cfg: &Config) -> CliResult<usize> {
    let mut run = StageRun::new(stage.name(), cfg);
    match stage {
        Stage::Synth => synth(&mut run)?,
        Stage::Ingest => ingest(&mut run)?,
        Stage::Infer => infer(&mut run)?,
        Stage::Rca => rca(&mut run)?,
        Stage::Skillspace => skillspace(&mut run)?,
        Stage::Cityprofile => cityprofile(&mut run)?,
        Stage::Mobility => mobility(&mut run)?,
        Stage::Regress => regression(&mut run)?,
        Stage::Report => report(&mut run)?,
    }
    run.finish()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn synth(run: &mut StageRun<'_>) -> CliResult<()> {
    let world = generate(&run.config.world)?;
    for (name, bytes) in &world.files {
        run.write(name, bytes)?;
    }
    Ok(())
}

fn ingest(run: &mut StageRun<'_>) -> CliResult<()> {
    let paths = run.config.input_paths()?;
    let data = load_dataset(
        &paths,
        &LoadOptions {
            importance_scale: run.config.importance_scale,
        },
    )?;
    for (key, path) in input_roles(&paths) {
        run.track(key, path)?;
    }
    let dir = run.out().join("ingest");
    for p in write_canonical(&data, &dir)? {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        run.record_output(format!("ingest/{name}"), &p)?;
    }
    Ok(())
}

fn input_roles(p: &InputPaths) -> Vec<(&'static str, &std::path::Path)> {
    let all: [Option<&std::path::Path>; 11] = [
        Some(&p.skills),
        Some(&p.source_importance),
        Some(&p.source_tasks),
        p.source_occupations.as_deref(),
        Some(&p.target_occupations),
        Some(&p.target_tasks),
        Some(&p.cities),
        Some(&p.census),
        p.migration_observed.as_deref(),
        p.covariates.as_deref(),
        p.categories.as_deref(),
    ];
    INPUT_KEYS
        .iter()
        .zip(all)
        .filter_map(|((k, _), path)| path.filter(|p| p.exists()).map(|p| (*k, p)))
        .collect()
}

fn infer(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (_, src_eff) = source_effective_use(&data)?;
    let out = run_inference(&data, src_eff.view(), run.config.alpha, run.config.threshold)?;
    let skills = data.skills.index.ids();
    let vocab = data.source.vocabulary.ids();
    let occs = data.target.occupation_index.ids();

    let mut rows = Vec::with_capacity(vocab.len() * skills.len());
    for (k, t) in vocab.iter().enumerate() {
        for (i, s) in skills.iter().enumerate() {
            rows.push([t.clone(), s.clone(), fmt_float(out.mi.values[[k, i]])]);
        }
    }
    run.write("mi_matrix.csv", &csv_bytes(&["task_token", "skill_id", "mi"], rows))?;

    let tax = &out.taxonomy;
    let mut rows = Vec::new();
    let mut lo_rows = Vec::new();
    for (o, oid) in occs.iter().enumerate() {
        for (i, s) in skills.iter().enumerate() {
            rows.push([
                oid.clone(),
                s.clone(),
                fmt_float(tax.posterior[[o, i]]),
                flag(tax.effective[[o, i]]).to_string(),
            ]);
            lo_rows.push([oid.clone(), s.clone(), fmt_float(out.log_odds[[o, i]])]);
        }
    }
    run.write(
        "taxonomy.csv",
        &csv_bytes(&["occupation_id", "skill_id", "posterior", "effective"], rows),
    )?;
    run.write("log_odds.csv", &csv_bytes(&["occupation_id", "skill_id", "log_odds"], lo_rows))?;

    let skill_report: Map<String, Value> = skills
        .iter()
        .zip(&out.training)
        .map(|(s, t)| {
            (
                s.clone(),
                json!({"prior": json_float(t.prior), "positives": t.positives, "degenerate": t.degenerate}),
            )
        })
        .collect();
    let occ_report: Map<String, Value> = occs
        .iter()
        .enumerate()
        .map(|(o, id)| {
            (
                id.clone(),
                json!({
                    "unknown_tokens": out.unknown_tokens[o],
                    "effective_skills": skill_count(&tax.effective.row(o).to_vec()),
                    "degenerate": tax.degenerate[o],
                }),
            )
        })
        .collect();
    let report = json!({
        "alpha": json_float(run.config.alpha),
        "threshold": json_float(run.config.threshold),
        "n_source_occupations": data.source.occupations.len(),
        "n_target_occupations": occs.len(),
        "vocabulary_size": vocab.len(),
        "skills": skill_report,
        "degenerate_skills": skills.iter().zip(&out.training).filter(|(_, t)| t.degenerate).map(|(s, _)| s.clone()).collect::<Vec<_>>(),
        "occupations": occ_report,
        "degenerate_occupations": occs.iter().zip(&tax.degenerate).filter(|(_, d)| **d).map(|(o, _)| o.clone()).collect::<Vec<_>>(),
        "unknown_tokens_total": out.unknown_tokens.iter().sum::<usize>(),
    });
    run.write_json("training_report.json", &report)
}

fn rca(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (r, e) = source_effective_use(&data)?;
    let mut rows = Vec::new();
    for (o, oid) in data.source.occupation_index.ids().iter().enumerate() {
        for (s, sid) in data.skills.index.ids().iter().enumerate() {
            rows.push([oid.clone(), sid.clone(), fmt_float(r.values[[o, s]]), flag(e[[o, s]]).to_string()]);
        }
    }
    run.write("rca.csv", &csv_bytes(&["row_id", "col_id", "rca", "effective"], rows))
}

/// Target posterior and effective matrices from `infer/taxonomy.csv`.
fn read_taxonomy(run: &mut StageRun<'_>, data: &Dataset) -> CliResult<(Array2<f64>, Array2<bool>)> {
    let (path, bytes) = run.read("infer", "taxonomy.csv")?;
    let t = Table::parse(path, &bytes, &["occupation_id", "skill_id", "posterior", "effective"])?;
    let shape = (data.target.occupations.len(), data.skills.len());
    if t.rows.len() != shape.0 * shape.1 {
        return Err(malformed(&t.path, "does not cover every occupation and skill; rerun `infer`"));
    }
    let mut post = Array2::zeros(shape);
    let mut eff = Array2::from_elem(shape, false);
    for (n, row) in t.rows.iter().enumerate() {
        let (o, s) = (n / shape.1, n % shape.1);
        if row[0] != *data.target.occupation_index.id(o) || row[1] != *data.skills.index.id(s) {
            return Err(malformed(&t.path, format!("row {} out of canonical order; rerun `infer`", n + 2)));
        }
        post[[o, s]] = t.float(n, 2)?;
        eff[[o, s]] = t.flag(n, 3)?;
    }
    Ok((post, eff))
}

fn skillspace(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (posterior, target_eff) = read_taxonomy(run, &data)?;
    let network = match run.config.network_source {
        NetworkSource::Target => target_eff.clone(),
        NetworkSource::Source => source_effective_use(&data)?.1,
    };
    let ss = run_skillspace(&data.skills, network.view(), target_eff.view(), run.config.seed)?;
    let ids = data.skills.index.ids();

    let nodes: Vec<Value> = data
        .skills
        .skills
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "id": s.id,
                "name": s.name,
                "category": s.category,
                "community": ss.communities.labels[i],
                "pole": ss.polarization.pole[i].map(Pole::as_str),
                "betweenness": json_float(ss.betweenness[i]),
                "use_count": ss.space.use_count[i],
            })
        })
        .collect();
    let edges: Vec<Value> = ss
        .space
        .edges
        .iter()
        .map(|e| json!({"a": ids[e.a], "b": ids[e.b], "theta": json_float(e.theta)}))
        .collect();
    let pole_ids = |p: Pole| -> Vec<String> { ss.polarization.members(p).into_iter().map(|i| ids[i].clone()).collect() };
    let doc = json!({
        "seed": run.config.seed,
        "network_source": match run.config.network_source { NetworkSource::Target => "target", NetworkSource::Source => "source" },
        "modularity": json_float(ss.communities.modularity),
        "level_modularity": ss.communities.level_modularity.iter().map(|&q| json_float(q)).collect::<Vec<_>>(),
        "n_communities": ss.communities.n_communities,
        "nodes": nodes,
        "edges": edges,
        "poles": {
            "socio-cognitive": {
                "communities": ss.polarization.socio_cognitive_communities,
                "skills": pole_ids(Pole::SocioCognitive),
            },
            "sensory-physical": {
                "communities": ss.polarization.sensory_physical_communities,
                "skills": pole_ids(Pole::SensoryPhysical),
            },
        },
    });
    run.write_json("skillspace.json", &doc)?;

    run.write(
        "edges.csv",
        &csv_bytes(
            &["a", "b", "theta"],
            ss.space
                .edges
                .iter()
                .map(|e| [ids[e.a].clone(), ids[e.b].clone(), fmt_float(e.theta)]),
        ),
    )?;

    run.write(
        "occupation_scores.csv",
        &csv_bytes(
            &["occupation_id", "skill_count", "cognitive_score"],
            data.target.occupations.iter().enumerate().map(|(o, occ)| {
                [
                    occ.id.clone(),
                    skill_count(&target_eff.row(o).to_vec()).to_string(),
                    fmt_float(ss.occupation_scores[o]),
                ]
            }),
        ),
    )?;

    let groups: Vec<String> = data.target.occupations.iter().map(|o| o.major_group.clone()).collect();
    let cats: Vec<String> = data.skills.skills.iter().map(|s| s.category.clone()).collect();
    let agg = group_skillset_aggregate(posterior.view(), &groups, &cats)?;
    let mut rows = Vec::new();
    for (g, gname) in agg.groups.iter().enumerate() {
        for (k, kname) in agg.categories.iter().enumerate() {
            rows.push([gname.clone(), kname.clone(), fmt_float(agg.values[[g, k]])]);
        }
    }
    run.write("group_skillset.csv", &csv_bytes(&["major_group", "category", "value"], rows))
}

fn read_occupation_scores(run: &mut StageRun<'_>, data: &Dataset) -> CliResult<Vec<f64>> {
    let (path, bytes) = run.read("skillspace", "occupation_scores.csv")?;
    let t = Table::parse(path, &bytes, &["occupation_id", "skill_count", "cognitive_score"])?;
    if t.rows.len() != data.target.occupations.len() {
        return Err(malformed(&t.path, "occupation count differs from the ingested corpus; rerun `skillspace`"));
    }
    (0..t.rows.len())
        .map(|o| {
            if t.rows[o][0] != *data.target.occupation_index.id(o) {
                return Err(malformed(&t.path, format!("row {} out of canonical order", o + 2)));
            }
            t.float(o, 2)
        })
        .collect()
}

fn cityprofile(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (_, eff) = read_taxonomy(run, &data)?;
    let scores = read_occupation_scores(run, &data)?;
    let cp = run_cityprofile(data.cities.census.view(), eff.view(), &scores, run.config.cognitive_threshold)?;
    let cities = data.cities.index.ids();
    run.write(
        "cityprofile.csv",
        &csv_bytes(
            &["city_id", "skills_count", "cognitive_score", "total_employment"],
            cities.iter().enumerate().map(|(c, id)| {
                [
                    id.clone(),
                    cp.skills.counts[c].to_string(),
                    fmt_float(cp.cognitive[c].unwrap_or(f64::NAN)),
                    cp.employment[c].to_string(),
                ]
            }),
        ),
    )?;
    let mut rows = Vec::new();
    for (c, cid) in cities.iter().enumerate() {
        for (s, sid) in data.skills.index.ids().iter().enumerate() {
            rows.push([
                cid.clone(),
                sid.clone(),
                cp.workers[[c, s]].to_string(),
                fmt_float(cp.skills.rca.values[[c, s]]),
                flag(cp.skills.effective[[c, s]]).to_string(),
            ]);
        }
    }
    run.write("city_skills.csv", &csv_bytes(&["city_id", "skill_id", "cs", "rca", "effective"], rows))
}

fn mobility(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (_, eff) = read_taxonomy(run, &data)?;
    let cfg = run.config;
    let coords: Vec<(f64, f64)> = data.cities.cities.iter().map(|c| (c.lat, c.lon)).collect();
    let ring = RingIndex::new(&coords);
    let labels = match cfg.mass {
        MassSelection::All => vec![MassLabel::Employment, MassLabel::SkilledWorkers, MassLabel::DegreeHolders],
        MassSelection::Only(l) => vec![l],
    };
    let mut evals: Vec<FieldEvaluation> = Vec::new();
    let mut unavailable = Map::new();
    for label in labels {
        let field = mass_field(
            label,
            data.cities.census.view(),
            eff.view(),
            data.covariates.as_ref(),
            cfg.skilled,
        )
        .map_err(CliError::from)
        .and_then(|f| {
            f.ok_or_else(|| {
                CliError::Validation(format!(
                    "mass field `{}` needs a `degree_holders` column in the city covariates",
                    label.as_str()
                ))
            })
        });
        match field {
            Ok(f) => evals.push(evaluate_field(&f, &ring, data.migration.as_ref(), cfg.k, cfg.variant)?),
            // Under `all`, fields that cannot be built are reported, not fatal.
            Err(CliError::Validation(reason)) if cfg.mass == MassSelection::All => {
                unavailable.insert(label.as_str().to_string(), Value::String(reason));
            }
            Err(e) => return Err(e),
        }
    }
    let cities = data.cities.index.ids();

    let mut rows = Vec::new();
    for ev in &evals {
        for (&origin, ranked) in &ev.predictions {
            for (r, &(d, t)) in ranked.iter().enumerate() {
                rows.push([
                    cities[origin].clone(),
                    (r + 1).to_string(),
                    cities[d].clone(),
                    fmt_float(t),
                    cfg.variant.as_str().to_string(),
                    ev.label.as_str().to_string(),
                ]);
            }
        }
    }
    run.write(
        "predictions.csv",
        &csv_bytes(
            &["origin_id", "rank", "destination_id", "t_value", "variant", "mass_field"],
            rows,
        ),
    )?;

    let fields: Map<String, Value> = evals
        .iter()
        .map(|ev| {
            let scores: Map<String, Value> = ev
                .ndcg
                .iter()
                .map(|(&o, &v)| (cities[o].clone(), json_float(v)))
                .collect();
            let mean = if ev.ndcg.is_empty() {
                Value::Null
            } else {
                json_float(ev.ndcg.values().sum::<f64>() / ev.ndcg.len() as f64)
            };
            (
                ev.label.as_str().to_string(),
                json!({
                    "mean_ndcg": mean,
                    "n_scored": ev.ndcg.len(),
                    "ndcg": scores,
                    "skipped_origins": ev.skipped.iter().map(|&o| cities[o].clone()).collect::<Vec<_>>(),
                }),
            )
        })
        .collect();
    let pairs: Vec<Value> = compare_fields(&evals)
        .iter()
        .map(|p| match &p.test {
            Some(t) => json!({
                "a": p.a.as_str(), "b": p.b.as_str(),
                "t": json_float(t.t), "df": json_float(t.welch_df), "p": json_float(t.p_two_sided),
            }),
            None => json!({"a": p.a.as_str(), "b": p.b.as_str(), "t": null, "df": null, "p": null, "note": p.note}),
        })
        .collect();
    let doc = json!({
        "variant": cfg.variant.as_str(),
        "k": cfg.k,
        "observations": data.migration.is_some(),
        "fields": fields,
        "unavailable_fields": unavailable.keys().collect::<Vec<_>>(),
        "unavailable_reasons": unavailable,
        "pairwise_welch": pairs,
    });
    run.write_json("evaluation.json", &doc)
}

struct CityProfileTable {
    skills_count: Vec<usize>,
    cognitive: Vec<Option<f64>>,
    employment: Vec<u64>,
}

fn read_cityprofile(run: &mut StageRun<'_>, data: &Dataset) -> CliResult<CityProfileTable> {
    let (path, bytes) = run.read("cityprofile", "cityprofile.csv")?;
    let t = Table::parse(path, &bytes, &["city_id", "skills_count", "cognitive_score", "total_employment"])?;
    if t.rows.len() != data.cities.cities.len() {
        return Err(malformed(&t.path, "city count differs from the ingested corpus; rerun `cityprofile`"));
    }
    let mut out = CityProfileTable {
        skills_count: Vec::new(),
        cognitive: Vec::new(),
        employment: Vec::new(),
    };
    for c in 0..t.rows.len() {
        if t.rows[c][0] != *data.cities.index.id(c) {
            return Err(malformed(&t.path, format!("row {} out of canonical order", c + 2)));
        }
        out.skills_count.push(t.int(c, 1)? as usize);
        let v = t.float(c, 2)?;
        out.cognitive.push(v.is_finite().then_some(v));
        out.employment.push(t.int(c, 3)?);
    }
    Ok(out)
}

const DEFAULT_MODELS: [&[&str]; 5] = [
    &["cognitive_score"],
    &["degree_share"],
    &["cognitive_score", "degree_share"],
    &["skills_count"],
    &["skills_count", "degree_share"],
];

fn regression(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let cp = read_cityprofile(run, &data)?;
    let table = regression_table(
        CityDerived {
            cognitive: &cp.cognitive,
            skills_count: &cp.skills_count,
            employment: &cp.employment,
        },
        data.covariates.as_ref(),
    );
    let cfg = run.config;
    let response = cfg.regress_response.as_str();
    let mut models = Vec::new();
    let mut skipped = Vec::new();
    if !table.columns.iter().any(|c| c == response) {
        if data.covariates.is_some() || cfg.regress_models.is_some() {
            return Err(CliError::Validation(format!(
                "regression response `{response}` is not a city covariate column"
            )));
        }
        skipped.push(json!({"reason": "no city covariates supplied"}));
    } else {
        let explicit = cfg.regress_models.is_some();
        let specs: Vec<Vec<String>> = cfg.regress_models.clone().unwrap_or_else(|| {
            DEFAULT_MODELS
                .iter()
                .map(|m| m.iter().map(|v| v.to_string()).collect())
                .collect()
        });
        for vars in specs {
            let missing: Vec<&String> = vars.iter().filter(|v| !table.columns.contains(v)).collect();
            if !missing.is_empty() && !explicit {
                skipped.push(json!({"variables": vars, "reason": format!("missing column {}", missing[0])}));
                continue;
            }
            match regress(&table, response, &vars) {
                Ok(r) => models.push(regression_json(&r)),
                Err(e) if !explicit => skipped.push(json!({"variables": vars, "reason": e.to_string()})),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let doc = json!({
        "response": response,
        "models": models,
        "skipped": skipped,
    });
    run.write_json("regression.json", &doc)
}

fn regression_json(r: &skillforge_core::pipeline::Regression) -> Value {
    let by_name = |v: &[f64]| -> Map<String, Value> {
        r.variables
            .iter()
            .zip(v)
            .map(|(n, &x)| (n.clone(), json_float(x)))
            .collect()
    };
    json!({
        "variables": r.variables,
        "coefficients": by_name(&r.fit.coefficients),
        "std_errors": by_name(&r.fit.std_errors),
        "t": by_name(&r.fit.t_statistics),
        "r_squared": json_float(r.fit.r_squared),
        "n": r.fit.n,
        "dof": r.fit.dof,
        "exact_fit": r.fit.exact_fit,
    })
}

/// Distribution summary of integer counts.
fn count_summary(counts: &[usize]) -> Value {
    if counts.is_empty() {
        return json!({"n": 0});
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mean = sorted.iter().sum::<usize>() as f64 / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    };
    let var = sorted.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n as f64;
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &sorted {
        *hist.entry(c).or_default() += 1;
    }
    json!({
        "n": n,
        "min": sorted[0],
        "max": sorted[n - 1],
        "mean": json_float(mean),
        "median": json_float(median),
        "std": json_float(var.sqrt()),
        "histogram": hist.iter().map(|(c, k)| json!({"skills": c, "occupations": k})).collect::<Vec<_>>(),
    })
}

fn report(run: &mut StageRun<'_>) -> CliResult<()> {
    let data = run.dataset()?;
    let (_, eff) = read_taxonomy(run, &data)?;
    let target_counts: Vec<usize> = eff.rows().into_iter().map(|r| skill_count(&r.to_vec())).collect();

    let (path, bytes) = run.read("rca", "rca.csv")?;
    let rca_t = Table::parse(path, &bytes, &["row_id", "col_id", "rca", "effective"])?;
    let n_skills = data.skills.len();
    if rca_t.rows.len() != data.source.occupations.len() * n_skills {
        return Err(malformed(&rca_t.path, "does not cover every occupation and skill; rerun `rca`"));
    }
    let mut source_counts = vec![0usize; data.source.occupations.len()];
    for n in 0..rca_t.rows.len() {
        if rca_t.flag(n, 3)? {
            source_counts[n / n_skills] += 1;
        }
    }

    let mut by_group: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (o, occ) in data.target.occupations.iter().enumerate() {
        by_group.entry(&occ.major_group).or_default().push(target_counts[o]);
    }

    let ss = run.read_json("skillspace", "skillspace.json")?;
    let pole_size = |p: &str| ss["poles"][p]["skills"].as_array().map_or(0, |a| a.len());
    let (sc, sp) = (pole_size("socio-cognitive"), pole_size("sensory-physical"));

    let cp = read_cityprofile(run, &data)?;
    let profiles: Vec<Value> = data
        .cities
        .cities
        .iter()
        .enumerate()
        .map(|(c, city)| {
            json!({
                "city_id": city.id,
                "name": city.name,
                "admin_tier": city.admin_tier,
                "cognitive_score": json_float(cp.cognitive[c].unwrap_or(f64::NAN)),
                "skills_count": cp.skills_count[c],
                "total_employment": cp.employment[c],
            })
        })
        .collect();
    let ids = data.cities.index.ids();
    let extreme = |pick_max: bool| -> Value {
        let mut best: Option<(usize, f64)> = None;
        for (c, v) in cp.cognitive.iter().enumerate() {
            let Some(v) = *v else { continue };
            let better = match best {
                None => true,
                Some((_, b)) => (pick_max && v > b) || (!pick_max && v < b),
            };
            if better {
                best = Some((c, v));
            }
        }
        best.map_or(Value::Null, |(c, v)| json!({"city_id": ids[c], "value": json_float(v)}))
    };
    let scored: Vec<f64> = cp.cognitive.iter().flatten().copied().collect();
    let count_extreme = |pick_max: bool| -> Value {
        let it = cp.skills_count.iter().enumerate();
        let found = if pick_max {
            it.max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        } else {
            it.min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        };
        found.map_or(Value::Null, |(c, &v)| json!({"city_id": ids[c], "value": v}))
    };

    let ev = run.read_json("mobility", "evaluation.json")?;
    let means: Map<String, Value> = ev["fields"]
        .as_object()
        .map(|m| m.iter().map(|(k, v)| (k.clone(), v["mean_ndcg"].clone())).collect())
        .unwrap_or_default();
    let reg = run.read_json("regress", "regression.json")?;

    let doc = json!({
        "tool_version": crate::artifacts::TOOL_VERSION,
        "skill_counts": {
            "target_occupations": count_summary(&target_counts),
            "source_occupations": count_summary(&source_counts),
            "target_by_major_group": by_group.iter().map(|(g, v)| (g.to_string(), count_summary(v))).collect::<Map<_, _>>(),
        },
        "clusters": {
            "socio-cognitive": sc,
            "sensory-physical": sp,
            "unassigned": n_skills - sc - sp,
            "n_skills": n_skills,
            "n_communities": ss["n_communities"].clone(),
            "modularity": ss["modularity"].clone(),
        },
        "cities": {
            "profiles": profiles,
            "cognitive_score": {
                "max": extreme(true),
                "min": extreme(false),
                "mean": if scored.is_empty() { Value::Null } else { json_float(scored.iter().sum::<f64>() / scored.len() as f64) },
                "threshold": json_float(run.config.cognitive_threshold),
            },
            "skills_count": {
                "max": count_extreme(true),
                "min": count_extreme(false),
            },
        },
        "mobility": {
            "variant": ev["variant"].clone(),
            "k": ev["k"].clone(),
            "mean_ndcg": means,
            "pairwise_welch": ev["pairwise_welch"].clone(),
        },
        "regression": reg,
    });
    run.write_json("report.json", &doc)
}
