use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn skillforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skillforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().expect("stderr has an error line");
    serde_json::from_str(line).unwrap()
}

/// Synthetic world under `<root>/world/synth`.
fn world(root: &Path) -> PathBuf {
    let out = root.join("world");
    let o = skillforge(&["synth", "--out", s(&out), "--seed", "42"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.join("synth")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn infer_without_ingest_names_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let o = skillforge(&["infer", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["required_stage"], "ingest");
    assert_eq!(e["error"]["kind"], "missing_artifact");
}

#[test]
fn later_stages_name_their_prerequisites() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let out = dir.path().join("run");
    assert!(skillforge(&["ingest", "--out", s(&out), "--input-dir", s(&input)]).status.success());
    for (stage, needs) in [("skillspace", "infer"), ("regress", "cityprofile")] {
        let o = skillforge(&[stage, "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(3), "{stage}");
        assert_eq!(stderr_json(&o)["error"]["required_stage"], needs);
    }
}

#[test]
fn config_violations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["ingest", "--cognitive-threshold", "1.5"],
        vec!["ingest", "--variant", "gravity"],
        vec!["ingest", "--set", "no_such_key=1"],
        vec!["ingest", "--k", "0"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", s(dir.path())]);
        let o = skillforge(&a);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&o)["error"]["kind"], "validation");
    }
    // No inputs configured.
    assert_eq!(skillforge(&["ingest", "--out", s(dir.path())]).status.code(), Some(2));
}

#[test]
fn invalid_input_data_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let skills = fs::read_to_string(input.join("skills.csv")).unwrap();
    let first = skills.lines().nth(1).unwrap().to_string();
    fs::write(input.join("skills.csv"), format!("{skills}{first}\n")).unwrap();
    let o = skillforge(&["ingest", "--out", s(&dir.path().join("run")), "--input-dir", s(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"].as_str().unwrap().contains("duplicate"));
}

#[test]
fn full_chain_manifest_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let out = dir.path().join("run");
    let o = skillforge(&["all", "--out", s(&out), "--input-dir", s(&input)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let manifest = fs::read_to_string(out.join("manifest.jsonl")).unwrap();
    let records: Vec<Value> = manifest.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let stages: Vec<&str> = records.iter().map(|r| r["stage"].as_str().unwrap()).collect();
    assert_eq!(
        stages,
        ["ingest", "infer", "rca", "skillspace", "cityprofile", "mobility", "regress", "report"]
    );
    for r in &records {
        assert!(r["tool_version"].as_str().unwrap().starts_with("skillforge "));
        assert!(!r["outputs"].as_object().unwrap().is_empty());
        assert_eq!(r["config"]["seed"], "42");
    }
    // Every recorded output hash matches the file on disk.
    for r in &records {
        for (rel, hash) in r["outputs"].as_object().unwrap() {
            let bytes = fs::read(out.join(rel)).unwrap();
            assert_eq!(skillforge_core::output::sha256_hex(&bytes), hash.as_str().unwrap(), "{rel}");
        }
    }
    assert!(records[1]["inputs"].as_object().unwrap().contains_key("ingest/skills.csv"));

    let report = read_json(&out.join("report/report.json"));
    let truth = read_json(&input.join("ground_truth.json"));
    let n_skills = truth["skills"].as_object().unwrap().len() as u64;
    let c = &report["clusters"];
    assert_eq!(c["socio-cognitive"].as_u64().unwrap() + c["sensory-physical"].as_u64().unwrap(), n_skills);
    let planted_sc = truth["skills"].as_object().unwrap().values().filter(|v| *v == "socio-cognitive").count();
    assert_eq!(c["socio-cognitive"].as_u64().unwrap(), planted_sc as u64);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let conf = dir.path().join("run.conf");
    fs::write(&conf, format!("input_dir = {}\nalpha = 2.0\nk = 5\nout = run\n", s(&input))).unwrap();
    let o = skillforge(&["ingest", "--config", s(&conf), "--alpha", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: Value = serde_json::from_str(fs::read_to_string(dir.path().join("run/manifest.jsonl")).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(rec["config"]["alpha"], "0.5");
    assert_eq!(rec["config"]["k"], "5");
}

#[test]
fn mobility_options() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let out = dir.path().join("run");
    for st in ["ingest", "infer"] {
        assert!(skillforge(&[st, "--out", s(&out), "--input-dir", s(&input)]).status.success());
    }
    let o = skillforge(&["mobility", "--out", s(&out), "--mass", "employment", "--variant", "classical", "--k", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let preds = fs::read_to_string(out.join("mobility/predictions.csv")).unwrap();
    let rows: Vec<&str> = preds.lines().skip(1).collect();
    assert_eq!(rows.len(), 30 * 3);
    assert!(rows.iter().all(|r| r.ends_with(",classical,employment")));
    let ev = read_json(&out.join("mobility/evaluation.json"));
    assert_eq!(ev["fields"].as_object().unwrap().len(), 1);

    // Without covariates the degree-holder field cannot be built.
    let bare = dir.path().join("bare");
    fs::create_dir_all(&bare).unwrap();
    for f in fs::read_dir(&input).unwrap() {
        let p = f.unwrap().path();
        if p.file_name().unwrap() != "city_covariates.csv" {
            fs::copy(&p, bare.join(p.file_name().unwrap())).unwrap();
        }
    }
    let out2 = dir.path().join("run2");
    for st in ["ingest", "infer"] {
        assert!(skillforge(&[st, "--out", s(&out2), "--input-dir", s(&bare)]).status.success());
    }
    assert_eq!(skillforge(&["mobility", "--out", s(&out2), "--mass", "degree"]).status.code(), Some(2));
    assert!(skillforge(&["mobility", "--out", s(&out2)]).status.success());
    let ev = read_json(&out2.join("mobility/evaluation.json"));
    assert_eq!(ev["unavailable_fields"], serde_json::json!(["degree"]));
}

#[test]
fn source_network_and_percentile_skilled_mode() {
    let dir = tempfile::tempdir().unwrap();
    let input = world(dir.path());
    let out = dir.path().join("run");
    let o = skillforge(&[
        "all",
        "--out",
        s(&out),
        "--input-dir",
        s(&input),
        "--set",
        "skillspace_source=source",
        "--set",
        "skilled_mode=percentile",
        "--set",
        "skilled_percentile=75",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ss = read_json(&out.join("skillspace/skillspace.json"));
    assert_eq!(ss["network_source"], "source");
}
