use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lmo-hardbench"));
    c.env_remove("LMO_HARDBENCH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lmo-hardbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn ball_instance_document() {
    let o = run(&["instance", "--kind", "ball", "--d", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&stdout(&o));
    assert!(close(v["C"].as_f64().unwrap(), 0.35355339, 1e-8));
    assert_eq!(v["kind"], "ball");
    assert_eq!(v["w"].as_array().unwrap().len(), 2);
}

#[test]
fn permuted_instance_needs_three_coordinates() {
    let o = run(&["instance", "--kind", "permuted", "--d", "2"]);
    assert!(!o.status.success());
    assert!(stdout(&o).is_empty());
    assert!(stderr(&o).contains("error"));
}

#[test]
fn smoothed_instance_diameter_adds_two_radii() {
    let o = run(&["instance", "--kind", "smoothed", "--d", "4", "--beta", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&stdout(&o));
    // base: 2C(2−√2) with C = 1/√22
    let base = 2.0 * (2.0 - 2f64.sqrt()) / 22f64.sqrt();
    assert!(close(v["diameter"].as_f64().unwrap(), base + 0.2, 1e-12));
}

#[test]
fn lmo_queries_on_a_stored_instance() {
    let path = scratch("ball2.json");
    let o = run(&["instance", "--kind", "ball", "--d", "2", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let inst = path.to_str().unwrap();

    let o = run(&["lmo", "--instance", inst, "--p", "0,-1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&stdout(&o));
    let z: Vec<f64> = serde_json::from_value(v["z"].clone()).unwrap();
    assert_eq!(z[0], 0.0);
    assert!(close(z[1], 0.15891862, 1e-8));
    assert!(v["lambda"].as_f64().unwrap() > 0.0);
    assert!(v["constraintResidual"].as_f64().unwrap() <= 1e-14);

    let o = run(&["lmo", "--instance", inst, "--p", "-1,-1"]);
    let z: Vec<f64> = serde_json::from_value(json(&stdout(&o))["z"].clone()).unwrap();
    assert!(close(z[0], 0.20710678, 1e-8));
    assert_eq!(z[1], 0.0);

    let o = run(&["lmo", "--instance", inst, "--p", "0,0"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("ambiguous"));

    let o = run(&["lmo", "--instance", inst, "--p", "1,x"]);
    assert!(!o.status.success());
}

#[test]
fn line_search_run_stays_above_the_final_bound() {
    let o = run(&["run", "--method", "line-search", "--d", "10", "--T", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,gap,step,support,conv_resid,span_resid");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let last_gap: f64 = rows[4].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last_gap >= 1.70e-5, "{last_gap}");
}

#[test]
fn zero_budget_is_a_usage_error() {
    let o = run(&["run", "--method", "line-search", "--d", "10", "--T", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn resisting_run_reports_the_certified_floor() {
    let report = scratch("resisting.json");
    let o = run(&[
        "run", "--method", "open-loop", "--resisting", "--d", "8", "--T", "3", "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("certifiedFloor"));
    let v = json(&std::fs::read_to_string(&report).unwrap());
    // L·diam²/(528·16) with diam = 2C(2−√2), C = 1/√74
    let diam = 2.0 * (2.0 - 2f64.sqrt()) / 74f64.sqrt();
    let floor = diam * diam / (528.0 * 16.0);
    let got = v["completion"]["certifiedFloor"].as_f64().unwrap();
    assert!(close(got, floor, 1e-15), "{got} vs {floor}");
    assert_eq!(v["completion"]["unassigned"], 5);
    assert!(v["completion"]["gap"].as_f64().unwrap() >= floor);
}

#[test]
fn verify_exit_codes() {
    let o = run(&["verify", "--suite", "structure"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("seed: 42"));
    assert!(!text.contains("FAIL"));

    let o = run(&["verify", "--suite", "structure", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));

    let o = run(&["verify", "--suite", "bounds", "--json"]);
    assert!(o.status.success());
    let v = json(&stdout(&o));
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for label in ["T1", "T2_final", "T2_perIter", "T4_final", "T5_final"] {
        assert!(names.iter().any(|n| n.starts_with(label)), "{label}");
    }
}

#[test]
fn seed_environment_overrides_the_flag() {
    let o = bin().args(["verify", "--suite", "structure", "--seed", "3"]).env("LMO_HARDBENCH_SEED", "11").output().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("seed: 11"));
    let o = bin().args(["verify", "--suite", "structure"]).env("LMO_HARDBENCH_SEED", "eleven").output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn repeated_verification_is_byte_identical() {
    let a = run(&["verify", "--suite", "all"]);
    let b = run(&["verify", "--suite", "all"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_tables() {
    let o = run(&["sweep", "--methods="]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim_end(), "method,d,T,beta,gap,bound,margin,ratio_gap_over_bound,feasible");

    let o = run(&["sweep", "--methods", "line-search", "--budgets", "4,8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let ratio: f64 = r.split(',').nth(7).unwrap().parse().unwrap();
        assert!(ratio.is_finite() && ratio >= 1.0);
    }
}

#[test]
fn dumped_config_reparses() {
    let o = run(&["--dump-config", "run", "--method", "pairwise", "--d", "6", "--T", "2", "--beta", "10"]);
    assert!(o.status.success());
    let v = json(&stdout(&o));
    assert_eq!(v["command"]["command"], "run");
    assert_eq!(v["command"]["method"]["variant"], "pairwise");
    assert_eq!(v["command"]["t"], 2);
}
