//! End-to-end tests for the command-line front end: record schemas, exit
//! codes, deterministic output, and agreement with the library routes.

use gl3k::bilinear::{bilinear_form, Generator, SeqPair};
use gl3k::gl3::{s_long_bruteforce, s_tilde};
use gl3k::kernels::{j_double, DoubleBesselKind, KernelQuery, SpectralPoint};
use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl3k"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Parse JSON-lines stdout: a schema header followed by records.
fn json_lines(output: &Output) -> Vec<Value> {
    let text = String::from_utf8(output.stdout.clone()).expect("utf8 output");
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).expect("well-formed JSON line"))
        .collect();
    assert!(!lines.is_empty(), "output must not be empty");
    assert_eq!(lines[0], serde_json::json!({"schema": 1}), "header record");
    lines[1..].to_vec()
}

#[test]
fn sum_of_the_trivial_modulus_is_one() {
    let out = run(&["sum", "--m", "1", "--n", "1", "--d1", "1", "--d2", "1"]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["kind"], "sum");
    assert_eq!(records[0]["value_re"], 1.0);
    assert_eq!(records[0]["value_im"], 0.0);
    assert_eq!(records[0]["mode"], "exact");
    assert!(records[0]["exact"].is_string());
}

#[test]
fn sum_record_embeds_the_library_value() {
    let out = run(&["sum", "--m", "3", "--n", "2", "--d1", "6", "--d2", "4"]);
    assert!(out.status.success());
    let records = json_lines(&out);
    let want = s_long_bruteforce(1, 3, 2, 1, 6, 4).to_complex();
    let re = records[0]["value_re"].as_f64().unwrap();
    let im = records[0]["value_im"].as_f64().unwrap();
    assert!((re - want.re).abs() <= 1e-12 && (im - want.im).abs() <= 1e-12);
}

#[test]
fn float_mode_drops_the_exact_field() {
    let out = run(&[
        "sum", "--m", "2", "--n", "2", "--d1", "4", "--d2", "4", "--mode", "float",
    ]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records[0]["mode"], "float");
    assert!(records[0].get("exact").is_none());
}

#[test]
fn tilde_record_matches_the_library_value() {
    let out = run(&[
        "tilde", "--n1", "1", "--n2", "2", "--m1", "3", "--d1", "2", "--d2", "4",
    ]);
    assert!(out.status.success());
    let records = json_lines(&out);
    let want = s_tilde(1, 2, 3, 2, 4).unwrap().to_complex();
    let re = records[0]["value_re"].as_f64().unwrap();
    let im = records[0]["value_im"].as_f64().unwrap();
    assert!((re - want.re).abs() <= 1e-12 && (im - want.im).abs() <= 1e-12);
}

#[test]
fn decompose_reports_work_accounting() {
    let out = run(&["decompose", "--m", "2", "--n", "3", "--d1", "6", "--d2", "6"]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records[0]["kind"], "decompose");
    assert_eq!(records[0]["value_re"], 1.0);
    assert!(records[0]["n_tuples"].as_u64().unwrap() > 0);
    assert!(records[0]["classical_work"].as_u64().unwrap() > 0);
}

#[test]
fn verify_sweep_summarizes_with_zero_mismatches() {
    let out = run(&["verify", "--dmax", "6", "--mn", "1,2,3"]);
    assert!(out.status.success(), "verification sweep must exit 0");
    let records = json_lines(&out);
    let summary = records.last().unwrap();
    assert_eq!(summary["kind"], "verify_summary");
    assert_eq!(summary["mismatches"], 0);
    assert_eq!(summary["pairs"], 36);
    assert_eq!(summary["cells"], 36 * 9);
    let body = &records[..records.len() - 1];
    assert_eq!(body.len(), 36 * 9);
    assert!(body.iter().all(|r| r["kind"] == "verify" && r["match"] == true));
}

#[test]
fn bilinear_csv_table_has_fixed_columns_and_full_cartesian_size() {
    let out = run(&[
        "bilinear", "--x", "4,8", "--n", "4", "--trials", "3", "--seed", "9", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x1,x2,n,s_value,envelope,ratio,seed",
        "fixed header row"
    );
    assert_eq!(lines.count(), 2 * 1 * 3, "one row per (X, N, trial)");
}

#[test]
fn bilinear_json_rows_match_the_library_form() {
    let out = run(&["bilinear", "--x", "6", "--n", "5", "--trials", "1", "--seed", "4"]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records.len(), 1);
    let seqs = SeqPair::generate(Generator::RandomPm1, 5, 4);
    let want = bilinear_form(&seqs, 6, 6);
    let got = records[0]["s_value"].as_f64().unwrap();
    assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
    assert_eq!(records[0]["kind"], "bilinear");
    assert_eq!(records[0]["seed"], 4);
}

#[test]
fn hybrid_record_reports_a_positive_ratio() {
    let out = run(&[
        "hybrid", "--x", "4", "--n", "4", "--t", "4", "--nodes", "5", "--seed", "3",
    ]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records[0]["kind"], "hybrid");
    let value = records[0]["value"].as_f64().unwrap();
    let envelope = records[0]["envelope"].as_f64().unwrap();
    let ratio = records[0]["ratio"].as_f64().unwrap();
    assert!(value > 0.0 && envelope > 0.0 && ratio > 0.0);
    assert!((ratio - value / envelope).abs() <= 1e-12 * ratio.abs());
}

#[test]
fn kernel_record_carries_exactly_the_contracted_fields() {
    let out = run(&[
        "kernel", "--which", "j5", "--y1", "0.5", "--y2", "2", "--mu", "1,0,-1",
    ]);
    assert!(out.status.success());
    let records = json_lines(&out);
    let record = records[0].as_object().unwrap();
    let mut keys: Vec<&str> = record.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        vec!["converged", "est_error", "mu", "value_im", "value_re", "which", "y1", "y2"]
    );
    assert_eq!(record["which"], "j5");
    assert_eq!(record["converged"], true);

    let mu = SpectralPoint::from_axis([1.0, 0.0, -1.0]).unwrap();
    let q = KernelQuery::new(0.5, 2.0, mu).unwrap();
    let want = j_double(DoubleBesselKind::J5, &q).unwrap().value;
    let got = record["value_re"].as_f64().unwrap();
    assert!((got - want.re).abs() <= 1e-15 + 1e-9 * want.re.abs());
}

#[test]
fn volume_sweep_reports_its_slope() {
    let out = run(&["volume", "--t", "4,8", "--a", "0", "--eps", "0.05"]);
    assert!(out.status.success());
    let records = json_lines(&out);
    assert_eq!(records.len(), 3, "two rows and a summary");
    let v4 = records[0]["value"].as_f64().unwrap();
    assert!(
        (v4 - 1.1211e6).abs() <= 1e-3 * 1.1211e6,
        "volume at the smallest height: {v4}"
    );
    let summary = &records[2];
    assert_eq!(summary["kind"], "volume_summary");
    let slope = summary["slope"].as_f64().unwrap();
    assert!((3.0..7.0).contains(&slope), "two-point slope {slope}");
}

#[test]
fn invalid_inputs_exit_with_status_two() {
    let cases: Vec<Vec<&str>> = vec![
        // Non-divisor modulus pair for the auxiliary sum.
        vec!["tilde", "--n1", "1", "--n2", "1", "--m1", "1", "--d1", "3", "--d2", "4"],
        // Kernel argument outside the admissible window.
        vec!["kernel", "--which", "j5", "--y1", "0.001", "--y2", "1", "--mu", "1,0,-1"],
        // Spectral parameter with the wrong number of coordinates.
        vec!["kernel", "--which", "j5", "--y1", "1", "--y2", "1", "--mu", "1,0"],
        // Spectral parameter off the zero-sum constraint.
        vec!["kernel", "--which", "j5", "--y1", "1", "--y2", "1", "--mu", "1,1,1"],
        // CSV is reserved for the bilinear table.
        vec!["sum", "--m", "1", "--n", "1", "--d1", "4", "--d2", "4", "--format", "csv"],
        // The decomposition needs positive twists.
        vec!["decompose", "--m", "0", "--n", "1", "--d1", "4", "--d2", "4"],
        // Localization center on a chamber wall.
        vec!["volume", "--t", "4", "--mu0", "0,0,0"],
        // Zero workers.
        vec!["sum", "--m", "1", "--n", "1", "--d1", "1", "--d2", "1", "--workers", "0"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn malformed_invocations_leave_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.jsonl");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "sum", "--m", "1", "--n", "1", "--d1", "4", "--d2", "4", "--format", "csv", "--output",
        path_str,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists(), "failed run must not create the output file");
}

#[test]
fn identical_configurations_produce_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for (path, workers) in [(&a, "1"), (&b, "3")] {
        let out = run(&[
            "verify", "--dmax", "5", "--mn", "1,2", "--workers", workers, "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "sweep output must not depend on worker count");
    assert!(!bytes_a.is_empty());
}

#[test]
fn thread_count_environment_variable_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_gl3k"))
        .env("GL3K_THREADS", "2")
        .args(["verify", "--dmax", "4", "--mn", "1,2"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_gl3k"))
        .env("GL3K_THREADS", "many")
        .args(["verify", "--dmax", "4", "--mn", "1,2"])
        .output()
        .expect("binary runs");
    assert_eq!(bad.status.code(), Some(2), "unparseable thread count");
}
