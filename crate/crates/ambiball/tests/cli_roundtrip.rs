//! End-to-end checks of the `ambiball` binary: the documented happy paths,
//! byte-determinism of reports, file round-trips, and the exit-code
//! contract (0 success, 2 rejected input with a machine-readable
//! diagnostic, 3 verification failure).

use std::path::{Path, PathBuf};
use std::process::Command;

use ambiball::io;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let output = Command::new(env!("CARGO_BIN_EXE_ambiball"))
        .args(args)
        .output()
        .expect("binary launches");
    Run {
        code: output.status.code().expect("no signal"),
        stdout: String::from_utf8(output.stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(output.stderr).expect("utf8 stderr"),
    }
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).expect("fixture writes");
    path
}

const TWO_POINT_SPACE: &str = r#"{"labels":["a","b"],"dist":[[0.0,0.4],[0.4,0.0]]}"#;

fn dirac_a(dir: &TempDir, name: &str) -> PathBuf {
    write(
        dir,
        name,
        &format!(r#"{{"space":{TWO_POINT_SPACE},"atoms":[["a",1.0]]}}"#),
    )
}

fn parse(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("output exists"))
        .expect("output is JSON")
}

#[test]
fn distance_between_identical_measures_prints_zero() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");
    let out = dir.path().join("report.json");
    for metric in ["prokhorov", "kantorovich"] {
        let r = run(&[
            "distance",
            "--metric",
            metric,
            "--mu1",
            mu.to_str().unwrap(),
            "--mu2",
            mu.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0, "stderr: {}", r.stderr);
        assert_eq!(r.stdout.trim(), "0.0");
        let report = parse(&out);
        assert_eq!(report["value"].as_f64().unwrap(), 0.0);
        assert_eq!(report["metric"].as_str().unwrap(), metric);
        assert!(report["config_hash"].as_str().unwrap().len() == 16);
        assert!(!report["version"].as_str().unwrap().is_empty());
    }
}

#[test]
fn maximize_both_methods_on_two_point_instance() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");
    let obj = write(&dir, "f.json", r#"{"values":{"a":0.0,"b":1.0}}"#);
    let out = dir.path().join("result.json");
    let r = run(&[
        "maximize",
        "--mu",
        mu.to_str().unwrap(),
        "--eps",
        "0.3",
        "--metric",
        "prokhorov",
        "--objective",
        obj.to_str().unwrap(),
        "--method",
        "both",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(r.stdout.trim(), "0.3");
    let report = parse(&out);
    assert!((report["value"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert!(!report["heuristic"].as_bool().unwrap());
    let atoms = report["argmax"]["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    assert_eq!(atoms[0][0], "a");
    assert!((atoms[0][1].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert_eq!(atoms[1][0], "b");
    assert!((atoms[1][1].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");
    let obj = write(&dir, "f.json", r#"{"values":[0.0,1.0]}"#);
    let argv = |out: &Path| {
        vec![
            "maximize".to_string(),
            "--mu".into(),
            mu.display().to_string(),
            "--eps".into(),
            "0.3".into(),
            "--metric".into(),
            "prokhorov".into(),
            "--objective".into(),
            obj.display().to_string(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    for (out, stdout_expected) in [(&out1, "0.3"), (&out2, "0.3")] {
        let args: Vec<String> = argv(out);
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&arg_refs);
        assert_eq!(r.code, 0, "stderr: {}", r.stderr);
        assert_eq!(r.stdout.trim(), stdout_expected);
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "repeated runs must emit identical bytes");
}

#[test]
fn witness_and_candidates_round_trip() {
    let dir = TempDir::new().unwrap();
    let space_file = write(&dir, "space.json", TWO_POINT_SPACE);
    let m1 = write(&dir, "m1.json", r#"{"atoms":[["a",0.6],["b",0.4]]}"#);
    let m2 = write(&dir, "m2.json", r#"{"atoms":[["b",1.0]]}"#);
    let witness = dir.path().join("witness.json");
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        m1.to_str().unwrap(),
        "--mu2",
        m2.to_str().unwrap(),
        "--space",
        space_file.to_str().unwrap(),
        "--witness",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let value: f64 = r.stdout.trim().parse().expect("stdout is a number");

    // The emitted transport plan re-parses and couples exactly the two
    // input measures.
    let space = io::load_space(&space_file).expect("space re-parses");
    let plan = io::load_coupling(&witness, &space).expect("witness re-parses");
    let first = plan.marginal_first();
    let second = plan.marginal_second();
    let doc1 = io::load_measure_doc(&m1).unwrap();
    let doc2 = io::load_measure_doc(&m2).unwrap();
    let want1 = io::resolve_measure(&doc1, &space, "m1").unwrap();
    let want2 = io::resolve_measure(&doc2, &space, "m2").unwrap();
    assert!(first.is_close(&want1, 1e-9));
    assert!(second.is_close(&want2, 1e-9));
    assert!(plan.mass_above(value) <= value + 1e-9);

    // Every ball-superset candidate re-parses into a measure that the
    // distance command confirms is inside the ball.
    let mu = dirac_a(&dir, "center.json");
    let cands = dir.path().join("candidates.json");
    let r = run(&[
        "ball-superset",
        "--mu",
        mu.to_str().unwrap(),
        "--eps",
        "0.3",
        "--out",
        cands.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&cands);
    let records = report["records"].as_array().unwrap();
    assert!(!records.is_empty());
    for record in records {
        let atoms: Vec<String> = record["measure"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| format!(r#"[{},{}]"#, a[0], a[1]))
            .collect();
        let candidate = write(
            &dir,
            "candidate.json",
            &format!(
                r#"{{"space":{TWO_POINT_SPACE},"atoms":[{}]}}"#,
                atoms.join(",")
            ),
        );
        let r = run(&[
            "distance",
            "--metric",
            "prokhorov",
            "--mu1",
            candidate.to_str().unwrap(),
            "--mu2",
            mu.to_str().unwrap(),
        ]);
        assert_eq!(r.code, 0, "stderr: {}", r.stderr);
        let d: f64 = r.stdout.trim().parse().unwrap();
        assert!(d <= 0.3 + 1e-9, "candidate at distance {d} left the ball");
    }
}

#[test]
fn empirical_output_feeds_other_commands() {
    let dir = TempDir::new().unwrap();
    let space = write(
        &dir,
        "space.json",
        r#"{"labels":["a","b","c"],"dist":[[0.0,0.3,0.5],[0.3,0.0,0.4],[0.5,0.4,0.0]]}"#,
    );
    let samples = write(
        &dir,
        "samples.json",
        r#"{"samples":["a","a","b","c","a","b","b","a"]}"#,
    );
    let emp = dir.path().join("empirical.json");
    let r = run(&[
        "empirical",
        "--samples",
        samples.to_str().unwrap(),
        "--space",
        space.to_str().unwrap(),
        "--out",
        emp.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let measure = parse(&emp);
    let atoms = measure["atoms"].as_array().unwrap();
    let weights: Vec<(String, f64)> = atoms
        .iter()
        .map(|a| (a[0].as_str().unwrap().to_string(), a[1].as_f64().unwrap()))
        .collect();
    assert_eq!(
        weights,
        vec![("a".into(), 0.5), ("b".into(), 0.375), ("c".into(), 0.125)]
    );

    let obj = write(&dir, "f.json", r#"{"values":{"a":0.0,"b":0.5,"c":1.0}}"#);
    let r = run(&[
        "maximize",
        "--mu",
        emp.to_str().unwrap(),
        "--eps",
        "0.25",
        "--metric",
        "prokhorov",
        "--objective",
        obj.to_str().unwrap(),
        "--method",
        "both",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);

    let r = run(&["verify", "--mu", emp.to_str().unwrap(), "--eps", "0.25"]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert!(
        r.stdout.contains(r#""violations":0"#),
        "stdout: {}",
        r.stdout
    );
}

#[test]
fn randomized_verification_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("verify.json");
    let r = run(&[
        "verify",
        "--trials",
        "100",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let report = parse(&out);
    assert_eq!(report["instances"].as_u64().unwrap(), 100);
    assert_eq!(report["violations"].as_u64().unwrap(), 0);
    assert!(report["runtime_ms"].is_u64());
}

#[test]
fn csv_format_renders_tables() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");
    let out = dir.path().join("report.csv");
    let r = run(&[
        "--format",
        "csv",
        "distance",
        "--metric",
        "kantorovich",
        "--mu1",
        mu.to_str().unwrap(),
        "--mu2",
        mu.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "metric,value,version,config_hash");
    assert!(lines.next().unwrap().starts_with("kantorovich,"));
}

fn diagnostic_code(stderr: &str) -> String {
    let line = stderr.lines().next().expect("one diagnostic line");
    let v: Value = serde_json::from_str(line).expect("diagnostic is JSON");
    v["error"]
        .as_str()
        .expect("diagnostic carries a code")
        .to_string()
}

#[test]
fn rejected_inputs_exit_two_with_machine_readable_diagnostics() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");

    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        "no-such.json",
        "--mu2",
        "no-such.json",
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "io_error");

    let broken = write(&dir, "broken.json", "{not json");
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        broken.to_str().unwrap(),
        "--mu2",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "parse_error");

    let other_space = r#"{"labels":["a","b"],"dist":[[0.0,0.5],[0.5,0.0]]}"#;
    let mismatched = write(
        &dir,
        "other.json",
        &format!(r#"{{"space":{other_space},"atoms":[["b",1.0]]}}"#),
    );
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        mu.to_str().unwrap(),
        "--mu2",
        mismatched.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "space_mismatch");

    let bare = write(&dir, "bare.json", r#"{"atoms":[["a",1.0]]}"#);
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        bare.to_str().unwrap(),
        "--mu2",
        bare.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "missing_space");

    let r = run(&[
        "--lp-tol",
        "0.5",
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        mu.to_str().unwrap(),
        "--mu2",
        mu.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "invalid_tolerance");

    let r = run(&["verify", "--mu", mu.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "usage_error");

    let obj = write(&dir, "f.json", r#"{"values":[0.0,1.0]}"#);
    let r = run(&[
        "maximize",
        "--mu",
        mu.to_str().unwrap(),
        "--eps",
        "-0.1",
        "--metric",
        "prokhorov",
        "--objective",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "invalid_epsilon");

    let r = run(&["frobnicate"]);
    assert_eq!(r.code, 2);
}

#[test]
fn embedded_and_flag_spaces_must_agree() {
    let dir = TempDir::new().unwrap();
    let mu = dirac_a(&dir, "mu.json");
    let conflicting = write(
        &dir,
        "conflicting.json",
        r#"{"labels":["a","b"],"dist":[[0.0,0.9],[0.9,0.0]]}"#,
    );
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        mu.to_str().unwrap(),
        "--mu2",
        mu.to_str().unwrap(),
        "--space",
        conflicting.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 2);
    assert_eq!(diagnostic_code(&r.stderr), "space_mismatch");

    let matching = write(&dir, "matching.json", TWO_POINT_SPACE);
    let r = run(&[
        "distance",
        "--metric",
        "prokhorov",
        "--mu1",
        mu.to_str().unwrap(),
        "--mu2",
        mu.to_str().unwrap(),
        "--space",
        matching.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    assert_eq!(r.stdout.trim(), "0.0");
}

#[test]
fn help_and_version_exit_zero() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("distance"));
    assert!(r.stdout.contains("ball-superset"));
    let r = run(&["--version"]);
    assert_eq!(r.code, 0);

    // Each subcommand's help names its own flags.
    for sub in [
        "distance",
        "ball-superset",
        "maximize",
        "verify",
        "empirical",
    ] {
        let r = run(&[sub, "--help"]);
        assert_eq!(r.code, 0, "{sub} --help failed");
    }
}

#[test]
fn thread_override_keeps_results_identical() {
    let dir = TempDir::new().unwrap();
    let out1 = dir.path().join("v1.json");
    let out2 = dir.path().join("v2.json");
    let mut base = Command::new(env!("CARGO_BIN_EXE_ambiball"));
    base.args([
        "verify",
        "--trials",
        "20",
        "--seed",
        "11",
        "--out",
        out1.to_str().unwrap(),
    ])
    .env("AMBIBALL_THREADS", "1");
    assert!(base.output().unwrap().status.success());
    let mut wide = Command::new(env!("CARGO_BIN_EXE_ambiball"));
    wide.args([
        "verify",
        "--trials",
        "20",
        "--seed",
        "11",
        "--out",
        out2.to_str().unwrap(),
    ])
    .env("AMBIBALL_THREADS", "4");
    assert!(wide.output().unwrap().status.success());
    let a = parse(&out1);
    let b = parse(&out2);
    // Identical up to the wall-clock field.
    for key in ["instances", "violations", "max_support", "support_bound"] {
        assert_eq!(a[key], b[key], "field {key} depends on thread count");
    }
}
