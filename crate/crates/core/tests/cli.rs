use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sbc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_instance(dir: &Path, name: &str, sizes: &[u64], b: u64) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::json!({"bin_volume": b, "sizes": sizes}).to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_families() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbc(&["generate", "--family", "thm3", "--n", "3", "--out", s(dir.path())]);
    assert!(out.status.success());
    let inst: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("instance.json")).unwrap()).unwrap();
    assert_eq!(inst["sizes"].as_array().unwrap().len(), 18);
    assert_eq!(inst["bin_volume"], 6);
    assert!(dir.path().join("equilibrium.json").exists() && dir.path().join("optimum.json").exists());

    let doc = json(&sbc(&["generate", "--family", "thm6", "--e", "1,1,1,1"]));
    assert_eq!(doc["instance"]["bin_volume"], 2);
    assert_eq!(doc["instance"]["sizes"].as_array().unwrap().len(), 4);

    // an entry of half the total would equal the bin volume
    let out = sbc(&["generate", "--family", "thm6", "--e", "1,1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let a = sbc(&["generate", "--family", "random", "--n", "8", "--seed", "7"]);
    let b = sbc(&["generate", "--family", "random", "--n", "8", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(sbc(&["generate", "--family", "thm3"]).status.code(), Some(2));
    assert_eq!(sbc(&["generate", "--family", "thm3", "--n", "1"]).status.code(), Some(2));
    assert_eq!(sbc(&["generate", "--family", "bogus", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn solve_methods() {
    let dir = tempfile::tempdir().unwrap();
    let thm6 = write_instance(dir.path(), "thm6.json", &[1, 1, 1, 1], 2);
    let doc = json(&sbc(&["solve", "--method", "sne", "--instance", s(&thm6)]));
    assert_eq!(doc["partition"]["bins"], serde_json::json!([[0, 1], [2, 3]]));
    assert_eq!(doc["verdicts"]["sne"]["holds"], true);
    assert_eq!(doc["welfare"], 2);

    let inst = write_instance(dir.path(), "i.json", &[5, 4, 3, 2, 1, 5, 3], 6);
    let doc = json(&sbc(&["solve", "--method", "ffd-lpt", "--instance", s(&inst)]));
    assert_eq!(doc["verdicts"]["ne"]["holds"], true);

    let out_dir = dir.path().join("run");
    let doc = json(&sbc(&["solve", "--method", "br-fne1", "--instance", s(&inst), "--out", s(&out_dir)]));
    assert_eq!(doc["metadata"]["within_step_bound"], true);
    assert_eq!(doc["verdicts"]["fne1"]["holds"], true);
    assert!(out_dir.join("trace.json").exists());

    // every written partition reloads with the same verdicts
    for kind in ["ne", "fne1", "fne2", "fne3", "msne", "sne"] {
        let v = sbc(&["verify", "--kind", kind, "--instance", s(&inst), "--partition", s(&out_dir.join("partition.json"))]);
        let holds = doc["verdicts"][kind]["holds"].as_bool().unwrap();
        assert_eq!(v.status.code(), Some(if holds { 0 } else { 1 }), "{kind}");
    }

    for method in ["ffd", "improve-fne3", "improve-msne"] {
        let out = sbc(&["solve", "--method", method, "--instance", s(&inst)]);
        assert!(out.status.success(), "{method}");
    }

    let start = dir.path().join("bad_start.json");
    std::fs::write(&start, r#"{"bins": [[0, 1, 2], [3, 4, 5, 6]]}"#).unwrap();
    let out = sbc(&["solve", "--method", "br-fne1", "--instance", s(&inst), "--partition", s(&start)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("contract violation"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("thm7");
    assert!(sbc(&["generate", "--family", "thm7", "--n", "3", "--out", s(&fam)]).status.success());
    let inst = fam.join("instance.json");
    let out = sbc(&["verify", "--kind", "sne", "--instance", s(&inst), "--partition", s(&fam.join("equilibrium.json"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);

    let grand = dir.path().join("grand.json");
    std::fs::write(&grand, format!("{{\"bins\": [{:?}]}}", (0..12).collect::<Vec<_>>())).unwrap();
    assert_eq!(sbc(&["verify", "--kind", "ne", "--instance", s(&inst), "--partition", s(&grand)]).status.code(), Some(0));
    let out = sbc(&["verify", "--kind", "sne", "--instance", s(&inst), "--partition", s(&grand)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["witness"]["reason"], "deviation");

    let dup = dir.path().join("dup.json");
    std::fs::write(&dup, r#"{"bins": [[0, 0]]}"#).unwrap();
    let out = sbc(&["verify", "--kind", "ne", "--instance", s(&inst), "--partition", s(&dup)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("more than once"));
    let out = sbc(&["verify", "--kind", "xx", "--instance", s(&inst), "--partition", s(&dup)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_reports() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("thm7");
    assert!(sbc(&["generate", "--family", "thm7", "--n", "2", "--out", s(&fam)]).status.success());
    let doc = json(&sbc(&["oracle", "--instance", s(&fam.join("instance.json")), "--kinds", "sne"]));
    assert_eq!(doc["opt_welfare"], 4);
    assert_eq!(doc["kinds"][0]["min_welfare"], 4);
    assert_eq!(doc["kinds"][0]["max_welfare"], 4);
    assert_eq!(doc["kinds"][0]["poa"], "4/4");

    let zero = write_instance(dir.path(), "zero.json", &[1, 2], 6);
    let out = sbc(&["oracle", "--instance", s(&zero), "--format", "csv"]);
    let text = stdout(&out);
    assert!(text.lines().skip(1).all(|l| l.ends_with("undefined,undefined,undefined,undefined")), "{text}");

    let gen = sbc(&["generate", "--family", "random", "--n", "6", "--seed", "1"]);
    let inst: Value = json(&gen)["instance"].clone();
    let random = dir.path().join("random.json");
    std::fs::write(&random, inst.to_string()).unwrap();
    let a = sbc(&["oracle", "--instance", s(&random), "--format", "csv"]);
    assert_eq!(a.stdout, sbc(&["oracle", "--instance", s(&random), "--format", "csv"]).stdout);
    let doc = json(&sbc(&["oracle", "--instance", s(&random)]));
    for k in doc["kinds"].as_array().unwrap() {
        if let (Some(lo), Some(hi)) = (k["min_welfare"].as_u64(), k["max_welfare"].as_u64()) {
            assert!(lo <= hi);
        }
    }

    let big = write_instance(dir.path(), "big.json", &[1; 13], 5);
    let out = sbc(&["oracle", "--instance", s(&big)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("desk-scale"));
    let out = Command::new(env!("CARGO_BIN_EXE_sbc"))
        .args(["oracle", "--instance", s(&random)])
        .env("SBC_ORACLE_CAP", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_tables() {
    let out = sbc(&["experiment", "--family", "thm3", "--n-range", "2:10"]);
    let text = stdout(&out);
    let ratios: Vec<&str> = text.lines().skip(1).take(9).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(ratios, ["4/4", "5/6", "6/8", "7/10", "8/12", "9/14", "10/16", "11/18", "12/20"]);
    assert!(text.lines().skip(1).take(9).all(|l| l.ends_with(",true")));
    assert_eq!(text.lines().last(), Some("limit,,,1/2,0.500000,"));
    let thm7 = stdout(&sbc(&["experiment", "--family", "thm7", "--n-range", "2:10"]));
    assert_eq!(thm7, text);
    assert_eq!(text, stdout(&sbc(&["experiment", "--family", "thm3", "--n-range", "2:10"])));

    let out = sbc(&["experiment", "--family", "thm3", "--n-range", "5:3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty range"));
}
