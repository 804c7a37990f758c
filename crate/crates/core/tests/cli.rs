//! The command-line front end, driven in-process.

use std::path::Path;

use cheaptalk::cli::{run_cli, EXIT_INTERNAL, EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_VALIDATION};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("cheaptalk").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    assert_eq!(r.code, EXIT_OK, "stderr: {}", r.err);
    serde_json::from_str(&r.out).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn emitted_fixtures_reproduce_regression_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (name, payoffs, envelope, robust) in [
        ("ex1", "[0, 1]", "1", "{0} ∪ {1}"),
        ("ex2", "[0, 2]", "2", "{0} ∪ [1, 2]"),
    ] {
        let emitted = run(&["examples", name, "--emit", d]);
        assert_eq!(emitted.code, EXIT_OK, "{}", emitted.err);
        let file = path(dir.path(), &format!("{name}.json"));
        let analysis = json(&run(&["analyze", &file]));
        assert_eq!(analysis["payoff_set_text"], payoffs);
        assert_eq!(analysis["envelope"].to_string(), envelope);
        assert_eq!(json(&run(&["robust-set", &file]))["text"], robust);
        // The emitted equilibrium attains the envelope and is robust.
        let eq = path(dir.path(), &format!("{name}_envelope_eq.json"));
        let verdict = json(&run(&["classify", &file, "--eq", &eq]));
        assert_eq!(verdict["status"], "robust");
    }
    let emitted = run(&["examples", "ex3", "--emit", d]);
    assert_eq!(emitted.code, EXIT_OK);
    let set = json(&run(&["robust-set", &path(dir.path(), "ex3.json")]));
    assert_eq!(set["text"], "{1} ∪ [2, 4]");
    assert!(!dir.path().join("ex3_envelope_eq.json").exists());
}

#[test]
fn fixture_names_stand_in_for_files() {
    assert_eq!(json(&run(&["robust-set", "ex1"]))["text"], "{0} ∪ {1}");
    let printed = json(&run(&["examples", "ex2"]));
    assert_eq!(printed["actions"].as_array().unwrap().len(), 4);
}

#[test]
fn witness_and_verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    run(&["examples", "ex1", "--emit", dir.path().to_str().unwrap()]);
    let eq = path(dir.path(), "ex1_envelope_eq.json");
    let witness = json(&run(&["witness", "ex1", "--eq", &eq, "--radius", "1/100"]));
    assert_eq!(witness["case"], "cond2-Prop6");

    let robust = run(&["verify", "ex1", "--eq", &eq, "--samples", "20", "--seed", "3"]);
    assert_eq!(robust.code, EXIT_OK, "{}", robust.err);
    let report: Value = serde_json::from_str(&robust.out).unwrap();
    assert_eq!(report["verdict"], "consistent");
    assert_eq!(report["seed"], 3);

    let full = run(&["verify", "ex1", "--eq", &eq, "--mode", "full", "--samples", "20"]);
    assert_eq!(full.code, EXIT_REFUTED);
    let report: Value = serde_json::from_str(&full.out).unwrap();
    assert_eq!(report["verdict"], "refuted");

    let budget = run(&["verify", "ex1", "--eq", &eq, "--max-solves", "3"]);
    assert_eq!(budget.code, EXIT_INTERNAL);
    assert!(budget.err.contains("budget"));

    let babbling = dir.path().join("babbling.json");
    std::fs::write(&babbling, r#"{"support":[{"mu":"1/2","weight":1,"mix":[1,0,0]}],"interim":[0,0]}"#).unwrap();
    let no_witness = run(&["witness", "ex1", "--eq", babbling.to_str().unwrap(), "--radius", "1/100"]);
    assert_eq!(no_witness.code, EXIT_VALIDATION);
}

#[test]
fn verify_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    run(&["examples", "ex2", "--emit", dir.path().to_str().unwrap()]);
    let eq = path(dir.path(), "ex2_envelope_eq.json");
    let args = ["verify", "ex2", "--eq", eq.as_str(), "--samples", "10", "--seed", "9"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.code, EXIT_OK, "{}", a.err);
    assert_eq!(a.out, b.out);
}

#[test]
fn plots_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let svg = path(dir.path(), &format!("ex3_{k}.svg"));
        let csv = path(dir.path(), &format!("ex3_{k}.csv"));
        let r = run(&["plot", "ex3", "--out", &svg, "--csv", &csv]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        outputs.push((std::fs::read(&svg).unwrap(), std::fs::read_to_string(&csv).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let svg = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(outputs[0].1.starts_with("cell_lo,cell_hi,v_lo,v_hi,envelope,robust_lo,robust_hi\n"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["verify", "ex1"]).code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).code, EXIT_OK);
    assert_eq!(run(&["analyze", "/nonexistent/game.json"]).code, EXIT_VALIDATION);
    assert_eq!(run(&["examples", "ex9"]).code, EXIT_VALIDATION);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let r = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("syntax"));

    let degenerate = dir.path().join("degenerate.json");
    std::fs::write(
        &degenerate,
        r#"{"states":["a","b"],"prior":1,"actions":["x","y"],"sender_utility":[[0,0],[1,1]],"receiver_utility":[[1,0],[0,1]]}"#,
    )
    .unwrap();
    let r = run(&["analyze", degenerate.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_VALIDATION);
    assert!(r.err.contains("prior"));

    // Profiles have no game to classify against.
    let eq = dir.path().join("eq.json");
    std::fs::write(&eq, r#"{"support":[{"mu":"1/2","weight":1,"mix":[1]}],"interim":[1,1]}"#).unwrap();
    assert_eq!(run(&["classify", "ex3", "--eq", eq.to_str().unwrap()]).code, EXIT_VALIDATION);
}
