use skillforge_core::corpus::{load_dataset, InputPaths, LoadOptions};
use skillforge_core::pipeline::{run_cityprofile, run_inference, run_skillspace, source_effective_use};
use skillforge_core::skillspace::Pole;
use skillforge_core::stats::pearson;
use skillforge_core::synthetic::{generate, WorldSpec};

#[test]
fn pipeline_recovers_planted_structure() {
    let world = generate(&WorldSpec::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    world.write_to(dir.path()).unwrap();
    let data = load_dataset(&InputPaths::in_dir(dir.path()), &LoadOptions::default()).unwrap();

    let (_, src_eff) = source_effective_use(&data).unwrap();
    let inf = run_inference(&data, src_eff.view(), 1.0, 0.5).unwrap();
    let tgt = inf.taxonomy.effective.view();
    let ss = run_skillspace(&data.skills, tgt, tgt, 42).unwrap();

    let agree = ss
        .polarization
        .pole
        .iter()
        .zip(&world.truth.skill_pole)
        .filter(|(got, want)| **got == Some(**want))
        .count();
    let share = agree as f64 / world.truth.skill_pole.len() as f64;
    eprintln!("skill agreement {share}, modularity {}", ss.communities.modularity);
    assert!(share >= 0.95);

    let cp = run_cityprofile(data.cities.census.view(), tgt, &ss.occupation_scores, 0.6).unwrap();
    let scores: Vec<f64> = cp.cognitive.iter().map(|c| c.unwrap()).collect();
    let r = pearson(&scores, &world.truth.city_bias).unwrap();
    eprintln!("city cognitive vs bias r = {r}");
    assert!(r >= 0.9);

    // Occupation scores separate the planted occupation clusters.
    for (o, &s) in ss.occupation_scores.iter().enumerate() {
        let cognitive = world.truth.target_pole[o] == Pole::SocioCognitive;
        assert_eq!(s > 0.6, cognitive, "occupation {o} score {s}");
    }
}

#[test]
fn noiseless_world_top_posteriors_stay_in_cluster() {
    let spec = WorldSpec { task_flip: 0.0, skill_leak: 0.0, ..WorldSpec::default() };
    let world = generate(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    world.write_to(dir.path()).unwrap();
    let data = load_dataset(&InputPaths::in_dir(dir.path()), &LoadOptions::default()).unwrap();
    let (_, src_eff) = source_effective_use(&data).unwrap();
    let inf = run_inference(&data, src_eff.view(), 1.0, 0.5).unwrap();
    for (o, row) in inf.taxonomy.posterior.rows().into_iter().enumerate() {
        let want = world.truth.target_pole[o];
        let top = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (s, &p) in row.iter().enumerate() {
            if p == top {
                assert_eq!(world.truth.skill_pole[s], want, "occupation {o} skill {s}");
            }
        }
    }
}
