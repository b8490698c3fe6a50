use std::process::{Command, Output};

use serde_json::Value;

use ramsey_forge::brute::{AvoidanceReport, ExerciseReport, Outcome};
use ramsey_forge::sumprod::{Extraction, Trace, TowerWitness};
use ramsey_forge::{parse_coloring, Coloring, PolyOracle};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn parity_lift_gives_t_2t_t_squared() {
    let out = run(&["find-witness", "--coloring", "lift:2:mod:2", "--pattern", "sumprod"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["mode"], "tower");
    assert_eq!(strings(&v["extraction"]["witness"]["elements"]), ["t", "2t", "t^2"]);

    let tower: TowerWitness = serde_json::from_value(v["tower"].clone()).unwrap();
    let Coloring::Poly(c) = parse_coloring("lift:2:mod:2").unwrap() else {
        panic!()
    };
    tower.verify(&c).unwrap();
    let ex: Extraction = serde_json::from_value(v["extraction"].clone()).unwrap();
    ex.witness.recheck(&c).unwrap();
}

#[test]
fn three_color_trace_replays() {
    let out = run(&["find-witness", "--coloring", "lift:2:mod:3", "--trace3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "trace");
    let trace: Trace = serde_json::from_value(v["trace"].clone()).unwrap();
    let Coloring::Poly(c) = parse_coloring("lift:2:mod:3").unwrap() else {
        panic!()
    };
    trace.replay(&c).unwrap();
    let colors: Vec<_> = trace.witness.elements.iter().map(|p| c.color(p).unwrap()).collect();
    assert!(colors.iter().all(|&k| k == colors[0]));
}

#[test]
fn trace_needs_three_colors() {
    let out = run(&["find-witness", "--coloring", "lift:2:mod:2", "--trace3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_coloring_is_a_usage_error() {
    for spec in ["mod:", "mod:1", "lift:2:", "nonsense"] {
        let out = run(&["find-witness", "--coloring", spec]);
        assert_eq!(out.status.code(), Some(2), "{spec}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn integer_coloring_needs_a_lift() {
    let out = run(&["find-witness", "--coloring", "mod:2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lift:2:mod:2"));
}

#[test]
fn unsupported_pattern_for_towers() {
    let out = run(&["find-witness", "--coloring", "lift:2:mod:2", "--pattern", "schur"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn short_tower_is_reported() {
    // {x, x + y^3, xy} needs level elements of size 3 rather than 2.
    let out = run(&[
        "find-witness",
        "--coloring",
        "lift:2:mod:2",
        "--pattern",
        "x; x+y^3; x*y",
        "--size",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn schur_two_colors() {
    let out = run(&["avoidance", "--pattern", "schur", "--colors", "2", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r: AvoidanceReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.min_n, 5);
    assert_eq!(r.avoiding.len(), 4);
}

#[test]
fn custom_template_pattern() {
    let out = run(&["avoidance", "--pattern", "x; x+y", "--colors", "2", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["min_n"], 3);
}

#[test]
fn sumprod_cap_reached() {
    let out = run(&["avoidance", "--pattern", "sumprod", "--colors", "2", "--cap", "2"]);
    assert_eq!(out.status.code(), Some(5));
    let v = json(&out);
    assert_eq!(v["cap_reached"], true);
    assert_eq!(v["avoiding"].as_array().unwrap().len(), 2);
}

#[test]
fn unit_y_changes_the_answer() {
    let out = run(&["avoidance", "--pattern", "sumprod", "--colors", "2", "--allow-unit-y"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["min_n"], 4);
}

#[test]
fn bad_bounds_rejected() {
    for args in [
        &["avoidance", "--pattern", "schur", "--colors", "0"][..],
        &["avoidance", "--pattern", "schur", "--cap", "-3"],
        &["avoidance", "--pattern", "x; x+"],
        &["check-exercise", "--size", "4"],
        &["check-exercise", "--vars", "5"],
        &["find-witness", "--coloring", "lift:2:mod:2", "--budget", "0"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exercise_small_region() {
    let out = run(&["check-exercise", "--size", "1", "--vars", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r: ExerciseReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.region_size, 3);
    assert!(matches!(r.outcome, Outcome::NoInstance { .. }));
}

#[test]
fn exercise_defaults() {
    let out = run(&["check-exercise"]);
    assert_eq!(out.status.code(), Some(0));
    let r: ExerciseReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((r.size_bound, r.var_bound, r.region_size), (2, 3, 728));
    assert!(matches!(r.outcome, Outcome::NoInstance { .. }));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let args = ["avoidance", "--pattern", "ap3", "--colors", "2"];
    let direct = run(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let written = run(&with_out);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn repeat_runs_are_identical() {
    for args in [
        &["find-witness", "--coloring", "lift:2:mod:3", "--trace3"][..],
        &["find-witness", "--coloring", "lift:2:mod:3", "--jobs", "2"],
        &["avoidance", "--pattern", "ap3", "--colors", "2", "--jobs", "3"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn text_output() {
    let out = run(&["avoidance", "--pattern", "schur", "--text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("{x, y, x+y} with 2 colors: N = 5"), "{s}");
}

#[test]
fn self_check_reads_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_ramsey-forge"))
        .args(["self-check", "--samples", "200"])
        .env("RAMSEY_FORGE_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["seed"], 42);
    let bad = Command::new(env!("CARGO_BIN_EXE_ramsey-forge"))
        .arg("self-check")
        .env("RAMSEY_FORGE_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
