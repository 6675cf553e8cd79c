//! Binary-level tests: exit-code conventions, output determinism, and the
//! file formats the tool emits.

use std::path::Path;
use std::process::{Command, Output};

fn passinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_passinet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn passinet_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_passinet"));
    cmd.current_dir(dir).args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analyze_preset_exit_zero() {
    let out = passinet(&["analyze", "--preset", "three_node"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("kappa0 = 1.000000000"));
    assert!(text.contains("sufficient identical gain: k > 1.000000000"));
}

#[test]
fn analyze_json_is_machine_readable() {
    let out = passinet(&["analyze", "--preset", "cycle", "--n", "10", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let exact = report["thresholds"]["exact_bisection"].as_f64().unwrap();
    assert!((exact - 4.7361).abs() < 1e-3);
    assert_eq!(report["assumptions"]["a2_spanning_tree"], true);
}

#[test]
fn analyze_without_spanning_tree_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no_tree.json");
    std::fs::write(
        &path,
        r#"{
            "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [1]},
            "graph": {"n": 2, "arcs": []}
        }"#,
    )
    .unwrap();
    let out = passinet(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("A2 violated"));
}

#[test]
fn analyze_non_hmp_agent_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("non_hmp.json");
    std::fs::write(
        &path,
        r#"{
            "agent": {"A": [[0,0],[1,0]], "B": [[2],[0]], "C": [[0.5],[0.5]], "g": [-1]},
            "graph": {"n": 3, "arcs": [[2,1,1.0],[3,2,1.0],[3,1,1.0]]}
        }"#,
    )
    .unwrap();
    let out = passinet(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("A1 violated"));
}

#[test]
fn parse_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"agent\": }").unwrap();
    let out = passinet(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn usage_error_exits_one() {
    let out = passinet(&["analyze", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_three_node_cases_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = passinet_in(
        dir.path(),
        &[
            "simulate",
            "--preset",
            "three_node",
            "--out",
            "trace.csv",
            "--svg",
            "e.svg",
            "--phase-svg",
            "phase.svg",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("case1: converged=true"));
    assert!(text.contains("case2: converged=true"));
    for name in ["trace_case1.csv", "trace_case2.csv", "e.svg", "phase_case1.svg"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("trace_case2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x_1_1,x_1_2,x_2_1,x_2_2,x_3_1,x_3_2,e,c_1,c_2"
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,2,-2,-7,3,1,-3,"));
}

#[test]
fn simulate_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = passinet_in(
            dir.path(),
            &[
                "simulate", "--preset", "cycle", "--n", "5", "--k", "2.0", "--t-end", "3",
                "--out", name,
            ],
            &[],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "repeated runs must emit byte-identical CSV");
}

#[test]
fn seed_env_changes_default_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let out = passinet_in(
            dir.path(),
            &[
                "simulate", "--preset", "cycle", "--n", "4", "--k", "1.5", "--t-end", "1",
                "--out", name,
            ],
            &[("PASSINET_SEED", seed)],
        );
        assert_eq!(out.status.code(), Some(0));
    };
    run("s42.csv", "42");
    run("s42_again.csv", "42");
    run("s7.csv", "7");
    let a = std::fs::read(dir.path().join("s42.csv")).unwrap();
    let b = std::fs::read(dir.path().join("s42_again.csv")).unwrap();
    let c = std::fs::read(dir.path().join("s7.csv")).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn simulate_below_threshold_reports_no_convergence() {
    let out = passinet(&[
        "simulate", "--preset", "dodeca", "--nu", "4.0", "--mu", "4.0", "--t-end", "20",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("converged=false"));
}

#[test]
fn simulate_divergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unstable.json");
    // open-loop unstable scalar agent, single vertex
    std::fs::write(
        &path,
        r#"{
            "agent": {"A": [[1.0]], "B": [[1.0]], "C": [[1.0]], "g": [1]},
            "graph": {"n": 1, "arcs": []},
            "gains": [1.0],
            "x0": [1.0],
            "sim": {"t_end": 40.0, "dt": 0.01}
        }"#,
    )
    .unwrap();
    let out = passinet(&["simulate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divergence"));
}

#[test]
fn region_emits_boundary_csv_with_polar_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = passinet_in(
        dir.path(),
        &["region", "--preset", "three_node", "--out", "boundary.csv"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("leader vertex 1"));
    assert!(text.contains("min h_rho = 1.118"));
    let csv = std::fs::read_to_string(dir.path().join("boundary.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k_prime_1,k_prime_2,k_prime_3,radius,point_1,point_2,point_3,gamma,rho"
    );
    assert!(csv.lines().count() > 300);

    // determinism
    let out2 = passinet_in(
        dir.path(),
        &["region", "--preset", "three_node", "--out", "boundary2.csv"],
        &[],
    );
    assert_eq!(out2.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("boundary.csv")).unwrap();
    let b = std::fs::read(dir.path().join("boundary2.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scaling_table_rows() {
    let out = passinet(&["scaling", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("0.50000000"), "N = 4 threshold row missing: {text}");
    // ratios increase monotonically toward 1
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split_whitespace().last())
        .filter_map(|s| s.parse().ok())
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    assert!(ratios.iter().all(|r| *r < 1.0));
}

#[test]
fn passify_reports_transfer_function() {
    let out = passinet(&["passify", "--preset", "three_node"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("hyper-minimum-phase: yes"));
    assert!(text.contains("kappa0 = 1.000000000"));
}
