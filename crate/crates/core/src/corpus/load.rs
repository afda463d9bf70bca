use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::*;

struct Row {
    line: u64,
    fields: Vec<String>,
}

fn file_label(path: &Path) -> String {
    path.display().to_string()
}

/// Reads a headered CSV and checks the header matches `expected` exactly (or
/// starts with it when `prefix_only`).
fn read_table(path: &Path, expected: &[&str], prefix_only: bool) -> Result<(Vec<String>, Vec<Row>)> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let label = file_label(path);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| Error::Csv { file: label.clone(), source })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|source| Error::Csv { file: label.clone(), source })?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_string())
        .collect();
    let ok = if prefix_only {
        header.len() >= expected.len() && header.iter().zip(expected).all(|(a, b)| a == b)
    } else {
        header.len() == expected.len() && header.iter().zip(expected).all(|(a, b)| a == b)
    };
    if !ok {
        return Err(Error::Malformed {
            file: label,
            line: 1,
            reason: format!("expected header `{}`, found `{}`", expected.join(","), header.join(",")),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| match source.position() {
            Some(pos) => Error::Malformed {
                file: label.clone(),
                line: pos.line(),
                reason: source.to_string(),
            },
            None => Error::Csv { file: label.clone(), source },
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::Malformed {
                file: label,
                line,
                reason: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        rows.push(Row {
            line,
            fields: record.iter().map(str::to_string).collect(),
        });
    }
    Ok((header, rows))
}

fn malformed(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Malformed {
        file: file_label(path),
        line,
        reason: reason.into(),
    }
}

fn non_empty(path: &Path, row: &Row, col: usize, what: &str) -> Result<String> {
    let v = row.fields[col].clone();
    if v.is_empty() {
        Err(malformed(path, row.line, format!("empty {what}")))
    } else {
        Ok(v)
    }
}

fn parse_f64(path: &Path, row: &Row, col: usize, what: &str) -> Result<f64> {
    let s = &row.fields[col];
    crate::output::parse_float(s)
        .filter(|v| v.is_finite())
        .ok_or_else(|| malformed(path, row.line, format!("{what} `{s}` is not a finite number")))
}

fn lookup(index: &IdIndex, path: &Path, line: u64, kind: &'static str, id: &str) -> Result<usize> {
    index.get(id).ok_or_else(|| Error::DanglingReference {
        file: file_label(path),
        line,
        kind,
        id: id.to_string(),
    })
}

fn duplicate(path: &Path, kind: &'static str, id: impl Into<String>) -> Error {
    Error::DuplicateId {
        file: file_label(path),
        kind,
        id: id.into(),
    }
}

fn load_categories(path: Option<&Path>) -> Result<Vec<String>> {
    match path {
        None => Ok(DEFAULT_CATEGORIES.iter().map(|s| s.to_string()).collect()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            let cats: Vec<String> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            if cats.is_empty() {
                return Err(validation(format!("{}: no categories declared", p.display())));
            }
            Ok(cats)
        }
    }
}

fn load_skills(path: &Path, categories: Vec<String>) -> Result<SkillCatalog> {
    let (_, rows) = read_table(path, &["skill_id", "name", "category"], false)?;
    let mut by_id: BTreeMap<String, SkillDef> = BTreeMap::new();
    for row in &rows {
        let id = non_empty(path, row, 0, "skill_id")?;
        let category_raw = non_empty(path, row, 2, "category")?;
        let category = categories
            .iter()
            .find(|c| c.eq_ignore_ascii_case(&category_raw))
            .cloned()
            .ok_or_else(|| malformed(path, row.line, format!("unknown category `{category_raw}`")))?;
        let def = SkillDef {
            id: id.clone(),
            name: row.fields[1].clone(),
            category,
        };
        if by_id.insert(id.clone(), def).is_some() {
            return Err(duplicate(path, "skill", id));
        }
    }
    if by_id.is_empty() {
        return Err(validation(format!("{}: no skills", path.display())));
    }
    let index = IdIndex::from_sorted(by_id.keys().cloned().collect());
    Ok(SkillCatalog {
        skills: by_id.into_values().collect(),
        index,
        categories,
    })
}

fn load_occupation_table(path: &Path) -> Result<BTreeMap<String, Occupation>> {
    let (_, rows) = read_table(path, &["occupation_id", "title", "major_group"], false)?;
    let mut out = BTreeMap::new();
    for row in &rows {
        let id = non_empty(path, row, 0, "occupation_id")?;
        let occ = Occupation {
            id: id.clone(),
            title: row.fields[1].clone(),
            major_group: row.fields[2].clone(),
        };
        if out.insert(id.clone(), occ).is_some() {
            return Err(duplicate(path, "occupation", id));
        }
    }
    Ok(out)
}

fn load_task_pairs(path: &Path) -> Result<Vec<(u64, String, String)>> {
    let (_, rows) = read_table(path, &["occupation_id", "task_token"], false)?;
    rows.iter()
        .map(|row| {
            Ok((
                row.line,
                non_empty(path, row, 0, "occupation_id")?,
                non_empty(path, row, 1, "task_token")?,
            ))
        })
        .collect()
}

fn load_source(paths: &InputPaths, skills: &SkillCatalog, opts: &LoadOptions) -> Result<SourceCorpus> {
    let imp_path = &paths.source_importance;
    let (_, imp_rows) = read_table(imp_path, &["occupation_id", "skill_id", "importance"], false)?;
    let task_pairs = load_task_pairs(&paths.source_tasks)?;

    let declared = match &paths.source_occupations {
        Some(p) => Some(load_occupation_table(p)?),
        None => None,
    };
    let occupation_index = match &declared {
        Some(map) => IdIndex::from_sorted(map.keys().cloned().collect()),
        None => IdIndex::from_iter(
            imp_rows
                .iter()
                .map(|r| r.fields[0].clone())
                .chain(task_pairs.iter().map(|t| t.1.clone()))
                .filter(|s| !s.is_empty()),
        ),
    };
    let occ_file = paths.source_occupations.as_deref().unwrap_or(imp_path);

    let mut importance = Array2::zeros((occupation_index.len(), skills.len()));
    let mut seen = vec![false; occupation_index.len() * skills.len()];
    for row in &imp_rows {
        let occ_id = non_empty(imp_path, row, 0, "occupation_id")?;
        let skill_id = non_empty(imp_path, row, 1, "skill_id")?;
        let o = lookup(&occupation_index, occ_file, row.line, "occupation", &occ_id)?;
        let s = lookup(&skills.index, imp_path, row.line, "skill", &skill_id)?;
        let value = parse_f64(imp_path, row, 2, "importance")?;
        let value = match opts.importance_scale {
            ImportanceScale::Raw => normalize_importance(value).ok_or_else(|| {
                malformed(imp_path, row.line, format!("raw importance {value} outside [1, 5]"))
            })?,
            ImportanceScale::Normalized => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(malformed(
                        imp_path,
                        row.line,
                        format!("normalized importance {value} outside [0, 1]"),
                    ));
                }
                value
            }
        };
        let slot = o * skills.len() + s;
        if seen[slot] {
            return Err(duplicate(imp_path, "occupation-skill pair", format!("{occ_id}/{skill_id}")));
        }
        seen[slot] = true;
        importance[[o, s]] = value;
    }

    let vocabulary = IdIndex::from_iter(task_pairs.iter().map(|t| t.2.clone()));
    let mut task_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); occupation_index.len()];
    for (line, occ, tok) in &task_pairs {
        let o = lookup(&occupation_index, &paths.source_tasks, *line, "occupation", occ)?;
        task_sets[o].insert(vocabulary.get(tok).expect("vocabulary built from these tokens"));
    }
    if let Some(o) = task_sets.iter().position(|t| t.is_empty()) {
        return Err(validation(format!(
            "{}: source occupation `{}` has no task tokens",
            paths.source_tasks.display(),
            occupation_index.id(o)
        )));
    }

    let occupations = occupation_index
        .ids()
        .iter()
        .map(|id| match &declared {
            Some(map) => map[id].clone(),
            None => Occupation {
                id: id.clone(),
                title: String::new(),
                major_group: String::new(),
            },
        })
        .collect();

    Ok(SourceCorpus {
        occupations,
        occupation_index,
        importance,
        vocabulary,
        tasks: task_sets.into_iter().map(|s| s.into_iter().collect()).collect(),
    })
}

fn load_target(paths: &InputPaths) -> Result<TargetCorpus> {
    let occs = load_occupation_table(&paths.target_occupations)?;
    let occupation_index = IdIndex::from_sorted(occs.keys().cloned().collect());
    let mut tasks: Vec<BTreeSet<String>> = vec![BTreeSet::new(); occupation_index.len()];
    for (line, occ, tok) in load_task_pairs(&paths.target_tasks)? {
        let o = lookup(&occupation_index, &paths.target_tasks, line, "occupation", &occ)?;
        tasks[o].insert(tok);
    }
    if let Some(o) = tasks.iter().position(|t| t.is_empty()) {
        return Err(validation(format!(
            "{}: target occupation `{}` has no task tokens",
            paths.target_tasks.display(),
            occupation_index.id(o)
        )));
    }
    Ok(TargetCorpus {
        occupations: occs.into_values().collect(),
        occupation_index,
        tasks: tasks.into_iter().map(|s| s.into_iter().collect()).collect(),
    })
}

fn load_cities(paths: &InputPaths, target: &TargetCorpus) -> Result<CityTable> {
    let path = &paths.cities;
    let (_, rows) = read_table(path, &["city_id", "name", "lat", "lon", "admin_tier"], false)?;
    let mut by_id: BTreeMap<String, City> = BTreeMap::new();
    for row in &rows {
        let id = non_empty(path, row, 0, "city_id")?;
        let lat = parse_f64(path, row, 2, "lat")?;
        let lon = parse_f64(path, row, 3, "lon")?;
        if lat.abs() > 90.0 || lon.abs() > 180.0 {
            return Err(malformed(path, row.line, format!("invalid coordinates ({lat}, {lon})")));
        }
        let city = City {
            id: id.clone(),
            name: row.fields[1].clone(),
            lat,
            lon,
            admin_tier: row.fields[4].clone(),
        };
        if by_id.insert(id.clone(), city).is_some() {
            return Err(duplicate(path, "city", id));
        }
    }
    let index = IdIndex::from_sorted(by_id.keys().cloned().collect());

    let cpath = &paths.census;
    let (_, crow) = read_table(cpath, &["city_id", "occupation_id", "workers"], false)?;
    let mut census = Array2::zeros((index.len(), target.occupations.len()));
    let mut seen = HashMap::new();
    for row in &crow {
        let c = lookup(&index, cpath, row.line, "city", &row.fields[0])?;
        let o = lookup(&target.occupation_index, cpath, row.line, "occupation", &row.fields[1])?;
        let workers: u64 = row.fields[2].parse().map_err(|_| {
            malformed(cpath, row.line, format!("workers `{}` is not a non-negative integer", row.fields[2]))
        })?;
        if seen.insert((c, o), row.line).is_some() {
            return Err(duplicate(cpath, "city-occupation pair", format!("{}/{}", row.fields[0], row.fields[1])));
        }
        census[[c, o]] = workers;
    }
    Ok(CityTable {
        cities: by_id.into_values().collect(),
        index,
        census,
    })
}

fn load_migration(path: &Path, cities: &CityTable) -> Result<MigrationObservations> {
    let (_, rows) = read_table(path, &["origin_id", "rank", "destination_id"], false)?;
    let mut ranked: BTreeMap<usize, BTreeMap<u32, (usize, u64)>> = BTreeMap::new();
    for row in &rows {
        let o = lookup(&cities.index, path, row.line, "city", &row.fields[0])?;
        let d = lookup(&cities.index, path, row.line, "city", &row.fields[2])?;
        let rank: u32 = row.fields[1]
            .parse()
            .ok()
            .filter(|r| *r >= 1)
            .ok_or_else(|| malformed(path, row.line, format!("rank `{}` is not a positive integer", row.fields[1])))?;
        if o == d {
            return Err(malformed(path, row.line, "self-loop migration entry"));
        }
        let entry = ranked.entry(o).or_default();
        if entry.insert(rank, (d, row.line)).is_some() {
            return Err(malformed(path, row.line, format!("duplicate rank {rank} for origin `{}`", row.fields[0])));
        }
    }
    let mut by_origin = BTreeMap::new();
    for (o, ranks) in ranked {
        let mut dests = Vec::with_capacity(ranks.len());
        let mut seen = BTreeSet::new();
        for (expected, (rank, (d, line))) in (1u32..).zip(ranks) {
            if rank != expected {
                return Err(malformed(path, line, format!("ranks for `{}` are not contiguous from 1", cities.index.id(o))));
            }
            if !seen.insert(d) {
                return Err(malformed(path, line, format!("destination `{}` repeated", cities.index.id(d))));
            }
            dests.push(d);
        }
        by_origin.insert(o, dests);
    }
    Ok(MigrationObservations { by_origin })
}

fn load_covariates(path: &Path, cities: &CityTable) -> Result<Covariates> {
    let (header, rows) = read_table(path, &["city_id"], true)?;
    let columns: Vec<String> = header[1..].to_vec();
    let mut uniq = BTreeSet::new();
    for c in &columns {
        if c.is_empty() || !uniq.insert(c) {
            return Err(malformed(path, 1, format!("bad or repeated column `{c}`")));
        }
    }
    let mut out = BTreeMap::new();
    for row in &rows {
        let c = lookup(&cities.index, path, row.line, "city", &row.fields[0])?;
        let vals = (1..row.fields.len())
            .map(|i| {
                if row.fields[i].is_empty() {
                    Ok(f64::NAN)
                } else {
                    parse_f64(path, row, i, &header[i])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if out.insert(c, vals).is_some() {
            return Err(duplicate(path, "city", row.fields[0].clone()));
        }
    }
    Ok(Covariates { columns, rows: out })
}

/// Loads and cross-validates every input table.
pub fn load_dataset(paths: &InputPaths, opts: &LoadOptions) -> Result<Dataset> {
    let categories = load_categories(paths.categories.as_deref())?;
    let skills = load_skills(&paths.skills, categories)?;
    let source = load_source(paths, &skills, opts)?;
    let target = load_target(paths)?;
    let cities = load_cities(paths, &target)?;
    let migration = paths
        .migration_observed
        .as_deref()
        .map(|p| load_migration(p, &cities))
        .transpose()?;
    let covariates = paths
        .covariates
        .as_deref()
        .map(|p| load_covariates(p, &cities))
        .transpose()?;
    Ok(Dataset {
        skills,
        source,
        target,
        cities,
        migration,
        covariates,
    })
}
