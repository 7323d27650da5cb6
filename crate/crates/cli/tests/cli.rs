//! End-to-end checks of the binary: each test spawns the real executable.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mas-attribution"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn play_reports_the_fixed_noop_random_outcome() {
    let out = stdout(&run(&["play", "--team-a", "noop", "--team-b", "random", "--seed", "5"]));
    assert!(out.contains("r=-1 T=30 S=96.66666666666667"), "got: {out}");
}

#[test]
fn play_accepts_a_json_config_and_writes_events() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("match.json");
    fs::write(
        &config,
        r#"{
            "team_a": {
                "warrior": {"policy": "smart"},
                "mage": {"policy": "smart"},
                "priest": {"policy": "smart"}
            },
            "team_b": {
                "warrior": {"policy": "noop"},
                "mage": {"policy": "noop"},
                "priest": {"policy": "noop"}
            },
            "seed": 9
        }"#,
    )
    .unwrap();
    let events = dir.path().join("events.csv");
    let out = stdout(&run(&[
        "play",
        "--config",
        config.to_str().unwrap(),
        "--events",
        events.to_str().unwrap(),
    ]));
    // a smart team wipes an idle one in 100/10 hits per agent
    assert!(out.contains("r=1 T=30"), "got: {out}");
    let body = fs::read_to_string(&events).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("round,team,role,action,target,value"));
    assert!(lines.next().unwrap().starts_with("1,"));
}

#[test]
fn play_rejects_out_of_range_stats() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("match.json");
    fs::write(
        &config,
        r#"{
            "team_a": {
                "warrior": {"policy": "smart", "stats": {"attack_power": 50.0}},
                "mage": {"policy": "smart"},
                "priest": {"policy": "smart"}
            },
            "team_b": {
                "warrior": {"policy": "noop"},
                "mage": {"policy": "noop"},
                "priest": {"policy": "noop"}
            }
        }"#,
    )
    .unwrap();
    let out = run(&["play", "--config", config.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("attack_power"), "stderr: {err}");
}

#[test]
fn unknown_policy_is_a_clean_error() {
    let out = run(&["play", "--team-a", "alpha", "--team-b", "noop"]);
    assert!(!out.status.success());
}

#[test]
fn hkg_prints_the_builtin_edge_list() {
    let out = stdout(&run(&["hkg"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("15"));
    assert_eq!(lines.count(), 24);
}

#[test]
fn hkg_builds_from_a_roster_file() {
    let dir = tempfile::tempdir().unwrap();
    let roster = dir.path().join("roster.json");
    fs::write(
        &roster,
        r#"{
            "agents": [
                {
                    "id": 0,
                    "name": "Scout",
                    "features": [
                        {"label": "Vitality", "class": "necessary"},
                        {"label": "Policy", "class": "policy"},
                        {"label": "Speed", "class": "active"}
                    ]
                }
            ]
        }"#,
    )
    .unwrap();
    let table = dir.path().join("players.json");
    let out = stdout(&run(&[
        "hkg",
        "--roster",
        roster.to_str().unwrap(),
        "--json",
        "--table",
        table.to_str().unwrap(),
    ]));
    assert!(out.contains("\"n\": 3"));
    let players = fs::read_to_string(&table).unwrap();
    assert!(players.contains("Scout.Vitality"));
}

fn run_args(dir: &Path, csv: &Path, json: &Path) -> Vec<String> {
    let trace = dir.join("trace.log");
    vec![
        "run".into(),
        "--matchups".into(),
        "noop:random".into(),
        "--n".into(),
        "4".into(),
        "--seed".into(),
        "3".into(),
        "--method".into(),
        "myerson".into(),
        "--out-csv".into(),
        csv.display().to_string(),
        "--out-json".into(),
        json.display().to_string(),
        "--trace".into(),
        trace.display().to_string(),
        "--threads".into(),
        "2".into(),
    ]
}

#[test]
fn run_emits_csv_json_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let json = dir.path().join("report.json");
    let args = run_args(dir.path(), &csv, &json);
    let out = stdout(&bin().args(&args).output().expect("binary runs"));
    assert!(out.contains("=== NoOp vs Random ==="));
    assert!(out.contains("1045 distinct evals/sim"));

    let body = fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next(),
        Some("team_a,team_b,method,player,mean,stars,cross_stars,total_score")
    );
    assert_eq!(lines.count(), 15);

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["matchups"][0]["methods"][0]["method"], "myerson");
    assert_eq!(
        report["matchups"][0]["methods"][0]["samples"]
            .as_array()
            .unwrap()
            .len(),
        4
    );

    let trace = fs::read_to_string(dir.path().join("trace.log")).unwrap();
    assert_eq!(trace.lines().count(), 4 * 1045);
    assert!(trace.starts_with("matchup=NoOp-vs-Random method=myerson sim=0 coalition=0x0000"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let out = bin()
            .args([
                "run",
                "--matchups",
                "noop:noop",
                "--n",
                "6",
                "--seed",
                "12",
                "--method",
                "both",
                "--out-json",
                json.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        outputs.push(fs::read(&json).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn run_accepts_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let csv = dir.path().join("report.csv");
    fs::write(
        &config,
        format!(
            r#"{{
                "matchups": [{{"team_a": "noop", "team_b": "noop"}}],
                "simulations": 3,
                "master_seed": 4,
                "methods": "myerson",
                "out_csv": {:?}
            }}"#,
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = stdout(&run(&["run", "--config", config.to_str().unwrap()]));
    assert!(out.contains("=== NoOp vs NoOp ==="));
    assert!(csv.exists());
}
