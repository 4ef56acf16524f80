use std::path::Path;
use std::process::{Command, Output};

fn teamdecomp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamdecomp")).args(args).current_dir(dir).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen(dir: &Path, args: &[&str], file: &str) {
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", file]);
    let out = teamdecomp(&all, dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_writes_kuhn_with_78_terminals() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--family", "kuhn", "--m", "2", "--n", "1", "--ranks", "3"], "k3.json");
    let text = std::fs::read_to_string(dir.path().join("k3.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let terminals = v["nodes"].as_array().unwrap().iter().filter(|n| n["kind"] == "terminal").count();
    assert_eq!(terminals, 78);
}

#[test]
fn gen_rejects_bad_parameters_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = teamdecomp(&["gen", "--family", "kuhn", "--m", "2", "--n", "1", "--ranks", "2", "--out", "x.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = teamdecomp(&["gen", "--family", "poker"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_width_gap_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--family", "widthgap", "--k", "3"], "wg.json");
    let v = json(&teamdecomp(&["stats", "--in", "wg.json"], dir.path()));
    assert_eq!(v["treewidth"], 17);
}

#[test]
fn stats_report_table_counts() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    let plus = json(&teamdecomp(&["stats", "--in", "k3.json", "--team", "plus"], dir.path()));
    assert_eq!((plus["seq_count"].as_u64(), plus["sum_xc"].as_u64()), (Some(91), Some(351)));
    assert_eq!(format!("{:.1}", plus["ratio"].as_f64().unwrap()), "3.9");
    assert!(plus["decomposition"]["per_bag"].is_array());
    assert!(plus["feasible_sets"]["reachable_width"].is_u64());
    let minus = json(&teamdecomp(&["stats", "--in", "k3.json", "--team", "minus"], dir.path()));
    assert_eq!((minus["seq_count"].as_u64(), minus["sum_xc"].as_u64()), (Some(25), Some(25)));
}

#[test]
fn cap_from_environment_gives_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    let out = Command::new(env!("CARGO_BIN_EXE_teamdecomp"))
        .args(["stats", "--in", "k3.json"])
        .env("TEAMDECOMP_CAP", "100")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solve_reports_are_deterministic_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    let args = ["solve", "--in", "k3.json", "--mode", "exact", "--no-timing", "--report", "r.json"];
    let a = teamdecomp(&args, dir.path());
    let b = teamdecomp(&args, dir.path());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["value"], "0/1");
    assert_eq!(v["gap"], "0/1");
    assert_eq!(v["mode"], "exact");
    assert!(v.get("wall_ms").is_none());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report, v);

    let timed = json(&teamdecomp(&["solve", "--in", "k3.json"], dir.path()));
    assert!(timed["wall_ms"]["solve"].is_u64());
}

#[test]
fn invalid_game_gives_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"nodes":[{"parent":null,"action":"","kind":"chance","probs":["1/2","1/3"]},
{"parent":0,"action":"a","kind":"terminal","payoff":"1"},
{"parent":0,"action":"b","kind":"terminal","payoff":"0"}]}"#;
    std::fs::write(dir.path().join("bad.json"), bad).unwrap();
    assert_eq!(teamdecomp(&["solve", "--in", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(teamdecomp(&["solve", "--in", "missing.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn export_formats_and_bad_flag() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    let out = teamdecomp(&["export", "--in", "k3.json", "--format", "bogus", "--out", "x.lp"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let v = json(&teamdecomp(&["export", "--in", "k3.json", "--format", "lp-text", "--out", "k3.lp"], dir.path()));
    assert_eq!(v["nnz"], 2130);
    let text = std::fs::read_to_string(dir.path().join("k3.lp")).unwrap();
    for section in ["Maximize", "Subject To", "Bounds", "End"] {
        assert!(text.contains(section), "missing {section}");
    }

    json(&teamdecomp(&["export", "--in", "k3.json", "--format", "mps", "--out", "k3.mps"], dir.path()));
    let mps = std::fs::read_to_string(dir.path().join("k3.mps")).unwrap();
    assert!(mps.contains("ROWS") && mps.contains("COLUMNS") && mps.contains("ENDATA"));
    assert!(dir.path().join("k3.mps.names.json").exists());
}

#[test]
fn oracle_agrees_with_solve_and_respects_its_cap() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    let v = json(&teamdecomp(&["oracle", "--in", "k3.json"], dir.path()));
    assert_eq!(v["value"], "0/1");
    let out = teamdecomp(&["oracle", "--in", "k3.json", "--cap", "100"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn several_inputs_in_parallel_give_one_line_each() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--name", "21K3"], "k3.json");
    gen(dir.path(), &["--family", "kuhn", "--m", "1", "--n", "1"], "k11.json");
    let out = teamdecomp(&["solve", "--in", "k3.json", "k11.json", "--jobs", "2", "--no-timing"], dir.path());
    assert!(out.status.success());
    let lines: Vec<serde_json::Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["value"], "-1/18");
}
