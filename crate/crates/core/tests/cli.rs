//! End-to-end runs of the `ebfdr` binary. JSON reports are compared with
//! files in `tests/golden` after dropping the timing field; set
//! `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn ebfdr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ebfdr"))
        .current_dir(corpus())
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_report(o: &Output) -> Json {
    let mut j: Json = serde_json::from_slice(&o.stdout).unwrap();
    let timing = j.as_object_mut().unwrap().remove("elapsed_ms");
    assert!(timing.is_some_and(|t| t.is_u64()), "missing elapsed_ms");
    j
}

fn golden(name: &str, args: &[&str], code: i32) {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let o = ebfdr(&all);
    assert_eq!(o.status.code(), Some(code), "{}", stderr(&o));
    let got = json_report(&o);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
    }
    let want: Json = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(got, want, "{name}");
}

#[test]
fn golden_reports() {
    golden("explore_m0", &["explore", "vending_m0.ebm"], 0);
    golden("fd_refines", &["check-fd", "vending_m0.ebm", "vending_m1.ebm"], 0);
    golden("trace_refines", &["check-trace", "vending_m0.ebm", "vending_m1.ebm"], 0);
    golden("fd_skiploop", &["check-fd", "vending_m0.ebm", "vending_m1_skiploop.ebm"], 1);
    golden("fd_no_vend_water", &["check-fd", "vending_m0.ebm", "vending_m1_no_vend_water.ebm"], 1);
    golden("trace_weak_guard", &["check-trace", "vending_m0.ebm", "vending_m1_weak_guard.ebm"], 1);
    golden("fd_listing_nondeterministic", &["check-fd", "listing_a.ebm", "listing_c.ebm"], 0);
    golden("determinism_a", &["check-determinism", "listing_a.ebm"], 1);
    golden("divergence_skiploop", &["check-divergence", "vending_m1_skiploop.ebm"], 1);
    golden("model_check_m1", &["model-check", "vending_m1.ebm"], 0);
}

#[test]
fn refines_report_is_minimal() {
    let o = ebfdr(&["check-fd", "vending_m0.ebm", "vending_m1.ebm", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_report(&o), serde_json::json!({"result": "refines"}));
}

#[test]
fn failing_report_follows_the_schema() {
    let o = ebfdr(&["check-fd", "vending_m0.ebm", "vending_m1_skiploop.ebm", "--output", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json_report(&o);
    assert_eq!(j["result"], "fails");
    assert_eq!(j["reason"], "divergence");
    for key in ["concrete_trace", "abstract_trace"] {
        assert!(j[key]["initial"].is_object());
        for step in j[key]["steps"].as_array().unwrap() {
            assert!(step["event"].is_string() && step["params"].is_object() && step["state"].is_object());
        }
    }
    assert_eq!(j["detail"]["cycle"], serde_json::json!(["idle"]));
}

#[test]
fn text_reports() {
    let o = ebfdr(&["explore", "vending_m0.ebm"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("10 states, 13 transitions"), "{out}");
    assert!(out.lines().last().unwrap().starts_with("elapsed: "), "{out}");

    let out = stdout(&ebfdr(&["check-fd", "vending_m0.ebm", "vending_m1_skiploop.ebm"]));
    assert!(out.starts_with("result: fails (divergence)"), "{out}");

    let o = ebfdr(&["check-fd", "listing_a.ebm", "listing_c.ebm"]);
    assert!(stdout(&o).starts_with("warning: abstract machine A is not event deterministic"));
}

#[test]
fn reports_are_reproducible_modulo_timing() {
    let args = ["check-fd", "vending_m0.ebm", "vending_m1_no_vend_water.ebm", "--output", "json"];
    assert_eq!(json_report(&ebfdr(&args)), json_report(&ebfdr(&args)));
}

#[test]
fn errors_exit_with_two() {
    let o = ebfdr(&["explore", "missing.ebm"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: missing.ebm"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ebm");
    std::fs::write(&bad, "machine m variables end").unwrap();
    let o = ebfdr(&["explore", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.ebm:1:"), "{}", stderr(&o));

    let o = ebfdr(&["explore", "vending_m1.ebm", "--max-states", "5"]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(ebfdr(&["check-fd", "vending_m0.ebm"]).status.code(), Some(2));
    assert_eq!(ebfdr(&["explore", "vending_m0.ebm", "--max-states", "0"]).status.code(), Some(2));
    assert_eq!(ebfdr(&["check-trace", "vending_m1.ebm", "vending_m0.ebm"]).status.code(), Some(2));
}

#[test]
fn model_check_finds_a_closest_violation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("leaky.ebm");
    std::fs::write(
        &path,
        "machine leaky variables x : int 0..5; invariant x < 3 init x := 0; events
           up == when x < 5 then x := x + 1 end
           jump == when x = 0 then x := 4 end
         end",
    )
    .unwrap();
    let o = ebfdr(&["model-check", path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json_report(&o);
    assert_eq!(j["invariant"], "violated");
    assert_eq!(j["trace"], serde_json::json!(["jump"]));
    assert_eq!(j["state"], "{x=4}");
}

#[test]
fn saved_spaces_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let space = dir.path().join("m0.json");
    let dot = dir.path().join("m0.dot");
    let o = ebfdr(&["explore", "vending_m0.ebm", "--save-space", space.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    let load = ["--load-space", space.to_str().unwrap()];
    for (mutant, code) in [("vending_m1.ebm", 0), ("vending_m1_no_vend_water.ebm", 1)] {
        let mut args = vec!["check-fd", "vending_m0.ebm", mutant, "--output", "json"];
        let fresh = json_report(&ebfdr(&args));
        args.extend(load);
        let o = ebfdr(&args);
        assert_eq!(o.status.code(), Some(code));
        assert_eq!(json_report(&o), fresh);
    }

    // A space of another machine is rejected.
    let other = dir.path().join("a.json");
    ebfdr(&["explore", "listing_a.ebm", "--save-space", other.to_str().unwrap()]);
    let o = ebfdr(&["check-fd", "vending_m0.ebm", "vending_m1.ebm", "--load-space", other.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hidden_seed_replay() {
    let o = ebfdr(&["oracle-seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l == "agree"));
    let help = stdout(&ebfdr(&["--help"]));
    assert!(!help.contains("oracle-seed"));
    for cmd in ["explore", "model-check", "check-trace", "check-fd", "check-divergence", "check-determinism"] {
        assert!(help.contains(cmd), "{cmd}");
    }
}
