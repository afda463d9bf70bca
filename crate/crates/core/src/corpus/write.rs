use std::path::{Path, PathBuf};

use super::*;
use crate::output::{csv_bytes, fmt_float, write_atomic};

/// Writes every table of `data` into `dir` in canonical form: sorted axes,
/// normalized importance, floats at fixed precision. Loading the result with
/// [`ImportanceScale::Normalized`] and writing it again is byte-identical.
///
/// Returns the written paths in a fixed order.
pub fn write_canonical(data: &Dataset, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, &bytes)?;
        written.push(p);
        Ok(())
    };

    let mut cats = data.skills.categories.join("\n");
    cats.push('\n');
    put(CATEGORIES_FILE, cats.into_bytes())?;

    put(
        SKILLS_FILE,
        csv_bytes(
            &["skill_id", "name", "category"],
            data.skills
                .skills
                .iter()
                .map(|s| [s.id.clone(), s.name.clone(), s.category.clone()]),
        ),
    )?;

    let occ_rows = |occs: &[Occupation]| -> Vec<[String; 3]> {
        occs.iter()
            .map(|o| [o.id.clone(), o.title.clone(), o.major_group.clone()])
            .collect()
    };
    put(
        SOURCE_OCCUPATIONS_FILE,
        csv_bytes(&["occupation_id", "title", "major_group"], occ_rows(&data.source.occupations)),
    )?;

    let src = &data.source;
    let mut imp = Vec::with_capacity(src.importance.len());
    for (o, occ) in src.occupations.iter().enumerate() {
        for (s, skill) in data.skills.skills.iter().enumerate() {
            imp.push([occ.id.clone(), skill.id.clone(), fmt_float(src.importance[[o, s]])]);
        }
    }
    put(SOURCE_IMPORTANCE_FILE, csv_bytes(&["occupation_id", "skill_id", "importance"], imp))?;

    let src_tasks = src.occupations.iter().zip(&src.tasks).flat_map(|(occ, toks)| {
        toks.iter()
            .map(move |&k| [occ.id.clone(), src.vocabulary.id(k).to_string()])
    });
    put(SOURCE_TASKS_FILE, csv_bytes(&["occupation_id", "task_token"], src_tasks))?;

    let tgt = &data.target;
    put(
        TARGET_OCCUPATIONS_FILE,
        csv_bytes(&["occupation_id", "title", "major_group"], occ_rows(&tgt.occupations)),
    )?;
    let tgt_tasks = tgt
        .occupations
        .iter()
        .zip(&tgt.tasks)
        .flat_map(|(occ, toks)| toks.iter().map(move |t| [occ.id.clone(), t.clone()]));
    put(TARGET_TASKS_FILE, csv_bytes(&["occupation_id", "task_token"], tgt_tasks))?;

    let ct = &data.cities;
    put(
        CITIES_FILE,
        csv_bytes(
            &["city_id", "name", "lat", "lon", "admin_tier"],
            ct.cities.iter().map(|c| {
                [c.id.clone(), c.name.clone(), fmt_float(c.lat), fmt_float(c.lon), c.admin_tier.clone()]
            }),
        ),
    )?;
    let mut census = Vec::new();
    for (c, city) in ct.cities.iter().enumerate() {
        for (o, occ) in tgt.occupations.iter().enumerate() {
            let w = ct.census[[c, o]];
            if w > 0 {
                census.push([city.id.clone(), occ.id.clone(), w.to_string()]);
            }
        }
    }
    put(CENSUS_FILE, csv_bytes(&["city_id", "occupation_id", "workers"], census))?;

    if let Some(mig) = &data.migration {
        let rows = mig.by_origin.iter().flat_map(|(&o, dests)| {
            dests.iter().enumerate().map(move |(r, &d)| {
                [ct.index.id(o).to_string(), (r + 1).to_string(), ct.index.id(d).to_string()]
            })
        });
        put(MIGRATION_FILE, csv_bytes(&["origin_id", "rank", "destination_id"], rows))?;
    }

    if let Some(cov) = &data.covariates {
        let mut header = vec!["city_id"];
        header.extend(cov.columns.iter().map(String::as_str));
        let rows = cov.rows.iter().map(|(&c, vals)| {
            let mut r = vec![ct.index.id(c).to_string()];
            r.extend(vals.iter().map(|v| if v.is_nan() { String::new() } else { fmt_float(*v) }));
            r
        });
        put(COVARIATES_FILE, csv_bytes(&header, rows))?;
    }

    Ok(written)
}
