use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purity-limits"))
        .args(args)
        .env("PURITY_LIMITS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().next().unwrap()).unwrap()
}

const VERIFY: &[&str] = &[
    "verify",
    "--theory",
    "coherence:2",
    "--state",
    "noisy-plus:0.2",
    "--target",
    "bloch:1.4137166941154069:0",
    "-N",
    "300",
    "--seed",
    "4",
];

#[test]
fn deterministic_bound_json() {
    let o = run(&["bound", "deterministic", "--state", "mixed:2", "--free", "stabilizer:1", "--target", "t"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["eps_lower"].as_f64().unwrap() - 0.0732233).abs() < 1e-7);
}

#[test]
fn region_csv_has_one_row_per_grid_point() {
    let o = run(&[
        "bound",
        "region",
        "--state",
        "noisy-plus:0.2",
        "--free",
        "coherence:2",
        "--target",
        "bloch:1.4137166941154069:0",
        "--grid",
        "0.1:1.0:10",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,eps_star"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn verify_is_reproducible_and_writes_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let (a, b, f) = (path("a.json"), path("b.json"), path("front.csv"));
    let first = run(&[VERIFY, &["--out", &a, "--frontier", &f]].concat());
    let second = run(&[VERIFY, &["--out", &b]].concat());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let front = std::fs::read_to_string(&f).unwrap();
    assert!(front.starts_with("p,eps\n") && front.lines().count() > 1);
}

#[test]
fn inflated_bound_exits_two_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[VERIFY, &["--bound-scale", "20", "--out", out.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "ViolationFound");
    assert!(err["sample"]["row"]["violation"].as_bool().unwrap());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["violation_count"].as_u64().unwrap() > 0);
}

#[test]
fn domain_errors_exit_one() {
    let o = run(&["bound", "deterministic", "--state", "plus", "--free", "coherence:2", "--target", "t"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "NotFullRank");

    let o = run(&["bound", "tradeoff", "--state", "mixed:2", "--free", "coherence:2", "--target", "basis:2:0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "FreeTarget");

    let o = run(&["monotone", "dh", "--state", "plus", "--sigma", "mixed:2", "--eps", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "BadEpsilon");

    let o = run(&["monotone", "overlap", "--state", "no-such-state", "--free", "coherence:2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "ParseError");
}

#[test]
fn state_files_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":2,"data":[[1.2,0],[0,0],[0,0],[-0.2,0]]}"#).unwrap();
    let bad = bad.to_str().unwrap();
    let o = run(&["monotone", "dmin", "--state", bad, "--sigma", "mixed:2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "NotPSD");
    let o = run(&["monotone", "dmin", "--state", bad, "--sigma", "mixed:2", "--no-validate"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["bound", "deterministic", "--state", "t"]).status.code(), Some(64));
    assert_eq!(run(&["verify", "--theory", "coherence:2", "--state", "t", "--target", "t", "-N", "x"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn monotone_outputs_carry_intervals() {
    let o = run(&["monotone", "robustness", "--state", "t", "--free", "stabilizer:1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (v["interval"][0].as_f64().unwrap(), v["interval"][1].as_f64().unwrap());
    let want = 3.0 - 2.0 * 2f64.sqrt();
    assert!(lo <= want + 1e-9 && hi >= want - 1e-9 && hi - lo <= 1e-6);
    assert!(v["certificate"]["witness"].is_object());

    let o = run(&["monotone", "dmin", "--state", "basis:2:0", "--sigma", "basis:2:1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], "inf");
}

#[test]
fn polytope_gen_counts() {
    let o = run(&["polytope", "gen", "--theory", "stabilizer", "--n", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 60);
}

#[test]
fn figdata_headers() {
    let o = run(&["figdata", "fig2", "--format", "csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("theta,f_psi,eps_lower\n"));
    assert_eq!(text.lines().count(), 34);
    let o = run(&["figdata", "fig1", "--format", "csv"]);
    assert!(stdout(&o).starts_with("p,eps_star\n"));
}

#[test]
fn channel_commands() {
    let o = run(&["channel", "freefrac", "--channel", "depol:0.1:2", "--against", "replacer:2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["value"].as_f64().unwrap() >= 0.1 - 1e-12);
    let o = run(&["channel", "nogo", "--channel", "depol:0.1:2", "--unitary", "hadamard", "--theory", "coherence:2", "-N", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["margin"].as_f64().unwrap() > 0.0);
    let o = run(&["channel", "nogo", "--channel", "unitary:hadamard", "--unitary", "hadamard", "--theory", "coherence:2"]);
    assert_eq!(o.status.code(), Some(1));
}
