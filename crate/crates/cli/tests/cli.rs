//! End-to-end tests of the command-line interface: dataset schemas,
//! determinism, tolerance gating, configuration precedence and exit
//! codes.

use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cvteleport");

const ENV_VARS: &[&str] = &[
    "CVTELEPORT_ALPHA",
    "CVTELEPORT_LAMBDA",
    "CVTELEPORT_R",
    "CVTELEPORT_CUTOFF",
    "CVTELEPORT_TAIL_TOL",
    "CVTELEPORT_GRID_POINTS",
    "CVTELEPORT_GRID_EXTENT",
    "CVTELEPORT_SEED",
    "CVTELEPORT_TRIALS",
    "CVTELEPORT_FORMAT",
];

fn cmd(args: &[&str]) -> Command {
    let mut c = Command::new(BIN);
    for var in ENV_VARS {
        c.env_remove(var);
    }
    c.args(args);
    c
}

fn run(args: &[&str]) -> Output {
    cmd(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

/// Parse a CSV body into (header, rows of f64 cells).
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

#[test]
fn figure1_columns_agree_and_cover_the_distribution() {
    let out = run(&["figure1"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["m", "P_numeric", "P_closed_form"]);
    let mut total = 0.0;
    for row in &rows {
        assert!((row[1] - row[2]).abs() <= 1e-10);
        assert!(row[1] >= 0.0);
        total += row[1];
    }
    // rows below the 1e-8 floor are omitted, so the sum is just shy of one
    assert!((total - 1.0).abs() < 1e-4, "total {total}");
    // asymmetry: more mass below zero than beyond the mean photon number
    let below: f64 = rows.iter().filter(|r| r[0] < 0.0).map(|r| r[1]).sum();
    let above: f64 = rows.iter().filter(|r| r[0] > 36.0).map(|r| r[1]).sum();
    assert!(below > above);
}

#[test]
fn figure_datasets_are_deterministic() {
    let a = run(&["figure1"]);
    let b = run(&["figure1"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.status.success());
}

#[test]
fn figure2_negative_outcomes_share_the_closed_form_value() {
    let out = run(&["figure2", "--lambda", "0.9"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["m", "F_numeric", "F_closed_form"]);
    for row in rows.iter().filter(|r| r[0] < 0.0) {
        assert!((row[1] - 0.69768).abs() <= 1e-5, "m={}: {}", row[0], row[1]);
    }

    let strong = run(&["figure2", "--lambda", "0.99"]);
    let (_, strong_rows) = parse_csv(&stdout(&strong));
    let at_zero = |rows: &[Vec<f64>]| {
        rows.iter().find(|r| r[0] == 0.0).map(|r| r[1]).expect("m=0 row")
    };
    assert!(at_zero(&strong_rows) >= at_zero(&rows));
}

#[test]
fn figure3_peaks_at_zero_and_falls_off() {
    let out = run(&["figure3"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["m", "F_undisplaced_numeric"]);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 0.69768).abs() <= 1e-5);
    for pair in rows.windows(2).take(10) {
        assert!(pair[1][1] < pair[0][1], "no falloff at m={}", pair[1][0]);
    }
}

#[test]
fn resource_check_reports_the_squeezed_variance() {
    let out = run(&["resource-check", "--r", "1.0"]);
    assert!(out.status.success());
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(
        header,
        ["r", "epr_variance", "epr_closed_form", "schmidt_evolution_fidelity"]
    );
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 0.27067).abs() <= 1e-5);
    assert!(rows[0][3] >= 1.0 - 1e-8);
}

#[test]
fn quad_sweep_fidelity_is_monotone_in_r() {
    let out = run(&["quad-sweep"]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout(&out));
    let base: Vec<f64> = rows
        .iter()
        .filter(|r| r[1] == 0.0 && r[2] == 0.0)
        .map(|r| r[3])
        .collect();
    assert_eq!(base.len(), 4);
    for pair in base.windows(2) {
        assert!(pair[1] >= pair[0]);
    }
    assert!(base[3] >= 0.98);
}

#[test]
fn mc_run_emits_deterministic_json_lines() {
    let a = run(&["mc-run", "--trials", "25", "--seed", "7"]);
    let b = run(&["mc-run", "--trials", "25", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 25);
    for (i, line) in lines.iter().enumerate() {
        let v: serde_json::Value = serde_json::from_str(line).expect("json line");
        assert_eq!(v["trial"], i as u64);
        assert_eq!(v["seed"], 7 + i as u64);
        assert!(v["m"].is_i64());
        assert!(v["phi_plus"].is_f64());
        assert!(v["fidelity_undisplaced"].is_f64());
    }

    let other_seed = run(&["mc-run", "--trials", "25", "--seed", "8"]);
    assert_ne!(a.stdout, other_seed.stdout);
}

#[test]
fn json_format_mirrors_the_csv_fields() {
    let out = run(&["resource-check", "--r", "0.5", "--format", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json body");
    let row = &rows.as_array().expect("array")[0];
    assert_eq!(row["r"], 0.5);
    assert!(row["epr_variance"].is_f64());
    assert!(row["schmidt_evolution_fidelity"].is_f64());
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let to_file = run(&["figure3", "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let through_stdout = run(&["figure3"]);
    assert_eq!(std::fs::read(&path).unwrap(), through_stdout.stdout);
}

#[test]
fn bad_parameters_exit_with_the_config_code() {
    let out = run(&["figure1", "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));

    let out = run(&["mc-run", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["figure1", "--grid-points", "8"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compute_errors_exit_with_the_compute_code() {
    // a grid too small for the coherent target
    let out = run(&["quad-sweep", "--grid-extent", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn config_file_env_and_flags_layer_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "lambda = 0.5\nalpha = 2.0\n").unwrap();
    let cfg = path.to_str().unwrap();

    // file over defaults
    let via_file = run(&["figure1", "--config", cfg]);
    let via_flags = run(&["figure1", "--alpha", "2.0", "--lambda", "0.5"]);
    assert!(via_file.status.success());
    assert_eq!(via_file.stdout, via_flags.stdout);

    // environment over file
    let mut with_env = cmd(&["figure1", "--config", cfg]);
    with_env.env("CVTELEPORT_LAMBDA", "0.6");
    let with_env = with_env.output().unwrap();
    let via_flags = run(&["figure1", "--alpha", "2.0", "--lambda", "0.6"]);
    assert_eq!(with_env.stdout, via_flags.stdout);

    // flags over environment
    let mut with_flag = cmd(&["figure1", "--config", cfg, "--lambda", "0.7"]);
    with_flag.env("CVTELEPORT_LAMBDA", "0.6");
    let with_flag = with_flag.output().unwrap();
    let via_flags = run(&["figure1", "--alpha", "2.0", "--lambda", "0.7"]);
    assert_eq!(with_flag.stdout, via_flags.stdout);

    // unknown keys are rejected
    std::fs::write(&path, "lambdas = 0.5\n").unwrap();
    let bad = run(&["figure1", "--config", cfg]);
    assert_eq!(bad.status.code(), Some(2));
}
