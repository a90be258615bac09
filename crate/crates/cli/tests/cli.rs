use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use milambda::analysis::{residual_bds, ResidualTest};
use milambda::datagen::{gen_anscombe_like, gen_polynomial, ANSCOMBE_RHO, ANSCOMBE_TOLERANCE};
use milambda::{compute_lambda, stats, LambdaConfig};
use serde_json::Value;

fn milambda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_milambda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn milambda_stdin(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_milambda"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut full = vec!["generate", "-o", &path];
    full.extend_from_slice(args);
    let out = milambda(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path
}

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/report-schema.json"
    ))
    .unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--family",
        "bivariate-normal",
        "--rho",
        "0.6",
        "--n",
        "100",
        "--seed",
        "7",
    ];
    let a = std::fs::read_to_string(generate(dir.path(), "a.csv", &args)).unwrap();
    let b = std::fs::read_to_string(generate(dir.path(), "b.csv", &args)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 101);
    assert_eq!(a.lines().next(), Some("x,y"));

    let stdout = milambda(&[
        "generate",
        "--family",
        "bivariate-normal",
        "--rho",
        "0.6",
        "--n",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), a);
}

#[test]
fn binary_sequences_have_one_column() {
    let out = milambda(&[
        "generate",
        "--family",
        "binary-markov",
        "--flip-prob",
        "0.3",
        "--n",
        "50",
        "--seed",
        "2",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s"));
    assert!(lines.all(|l| l == "0" || l == "1"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn round_trip_matches_in_process_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "poly.csv",
        &[
            "--family",
            "polynomial",
            "--power",
            "2",
            "--a",
            "0.5",
            "--n",
            "10000",
            "--seed",
            "11",
        ],
    );
    let out = milambda(&["analyze", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);

    let sample = gen_polynomial(0.5, 2, 10_000, 11).unwrap();
    let cfg = LambdaConfig::default();
    let expected = compute_lambda(&sample, &cfg).unwrap();
    let lambda = &report["lambda"];
    assert_eq!(num(&lambda["i_xy"]).to_bits(), expected.i_xy.to_bits());
    assert_eq!(
        num(&lambda["i_xyprime"]).to_bits(),
        expected.i_xyprime.to_bits()
    );
    assert_eq!(
        num(&lambda["lambda"]).to_bits(),
        expected.lambda.unwrap().to_bits()
    );
    assert_eq!(num(&lambda["rho"]).to_bits(), expected.rho.to_bits());
    assert_eq!(lambda["bins"].as_u64(), Some(expected.bins as u64));

    let bds = residual_bds(&sample, 1, &ResidualTest::default()).unwrap();
    assert_eq!(
        num(&report["bds"]["statistic"]).to_bits(),
        bds.statistic.to_bits()
    );
    assert_eq!(
        num(&report["bds"]["p_value"]).to_bits(),
        bds.p_value.to_bits()
    );

    // generating in-process hashes the same bytes the file holds
    let direct = json(&milambda(&[
        "analyze",
        "--family",
        "polynomial",
        "--power",
        "2",
        "--a",
        "0.5",
        "--n",
        "10000",
        "--seed",
        "11",
        "--format",
        "json",
    ]));
    assert_eq!(
        direct["provenance"]["input_digest"],
        report["provenance"]["input_digest"]
    );
    assert_eq!(direct["lambda"], report["lambda"]);
    assert_eq!(direct["provenance"]["seed"], 11);
}

#[test]
fn digest_is_stable_across_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "g.csv",
        &["--family", "exponential", "--n", "300", "--seed", "4"],
    );
    let from_file = json(&milambda(&[
        "analyze", &path, "--format", "json", "--no-bds",
    ]));
    let again = json(&milambda(&[
        "analyze", &path, "--format", "json", "--no-bds",
    ]));
    let bytes = std::fs::read(&path).unwrap();
    let from_stdin = json(&milambda_stdin(
        &["analyze", "-", "--format", "json", "--no-bds"],
        &bytes,
    ));
    let digest = &from_file["provenance"]["input_digest"];
    assert!(digest.as_str().unwrap().starts_with("sha256:"));
    assert_eq!(digest, &again["provenance"]["input_digest"]);
    assert_eq!(digest, &from_stdin["provenance"]["input_digest"]);
    assert_eq!(from_file["lambda"], from_stdin["lambda"]);
}

#[test]
fn anscombe_panel_one_file_has_target_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "a1.csv",
        &[
            "--family", "anscombe", "--panel", "1", "--n", "10000", "--seed", "1",
        ],
    );
    let out = json(&milambda(&[
        "analyze", &path, "--format", "json", "--no-bds",
    ]));
    let rho = num(&out["lambda"]["rho"]);
    assert!(
        (rho - ANSCOMBE_RHO).abs() <= ANSCOMBE_TOLERANCE,
        "rho = {rho}"
    );
    let sample = gen_anscombe_like(1, 10_000, 1).unwrap();
    assert_eq!(
        rho.to_bits(),
        stats::pearson(sample.x(), sample.y()).unwrap().to_bits()
    );
}

#[test]
fn anscombe_panel_two_is_mostly_nonlinear() {
    let out = milambda(&[
        "analyze", "--family", "anscombe", "--panel", "2", "--n", "10000", "--seed", "1",
        "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lambda = num(&json(&out)["lambda"]["lambda"]);
    assert!(lambda <= 0.2, "lambda = {lambda}");
}

#[test]
fn gaussian_pair_is_linear_and_passes_bds() {
    let out = milambda(&[
        "analyze",
        "--family",
        "bivariate-normal",
        "--rho",
        "0.9",
        "--n",
        "10000",
        "--seed",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let lambda = num(&r["lambda"]["lambda"]);
    let p = num(&r["bds"]["p_value"]);
    assert!(lambda >= 0.9, "lambda = {lambda}");
    assert!(p > 0.05, "p = {p}");
}

#[test]
fn two_row_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    std::fs::write(&path, "x,y\n1,2\n3,4\n").unwrap();
    let out = milambda(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate input"));
    assert!(out.stdout.is_empty());
}

#[test]
fn independent_pair_exits_with_degenerate_code() {
    let out = milambda(&[
        "analyze",
        "--family",
        "bivariate-normal",
        "--rho",
        "0",
        "--n",
        "2000",
        "--seed",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["lambda"]["lambda"], Value::Null);
    assert_eq!(r["lambda"]["degenerate"], true);
}

#[test]
fn error_exit_codes() {
    assert_eq!(
        milambda(&["analyze", "/nonexistent/input.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        milambda(&["analyze", "--no-such-flag"]).status.code(),
        Some(1)
    );
    assert_eq!(milambda(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        milambda(&["analyze", "--family", "polynomial"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        milambda(&["analyze", "--family", "exponential", "--bins", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        milambda(&["analyze", "--family", "exponential", "--bds-m", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        milambda(&["crossover", "--power", "4"]).status.code(),
        Some(1)
    );
    assert_eq!(milambda(&["--help"]).status.code(), Some(0));
    assert_eq!(milambda(&["--version"]).status.code(), Some(0));
}

#[test]
fn dropped_rows_are_counted_and_missing_fields_cited() {
    let mut csv = String::from("id,x,y\n");
    for i in 0..40 {
        let x = i as f64;
        csv.push_str(&format!("{i},{x},{}\n", 2.0 * x + (i % 7) as f64));
    }
    csv.push_str("40,NA,3\n41,4,\n");
    let out = milambda_stdin(
        &[
            "analyze",
            "-",
            "--columns",
            "x,y",
            "--format",
            "json",
            "--no-bds",
        ],
        csv.as_bytes(),
    );
    let r = json(&out);
    assert_eq!(r["input"]["rows_read"], 42);
    assert_eq!(r["input"]["rows_dropped"], 2);
    assert_eq!(r["lambda"]["n"], 40);
    assert_eq!(r["input"]["columns"], serde_json::json!(["x", "y"]));

    let out = milambda_stdin(
        &["analyze", "-", "--columns", "0,2"],
        b"1,2,3\n4,5,6\n7,8\n",
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 3") && err.contains("column 2"), "{err}");
}

#[test]
fn reports_validate_against_published_schema() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "p.csv",
        &["--family", "exponential", "--n", "500", "--seed", "9"],
    );
    let runs: [&[&str]; 5] = [
        &["analyze", &path],
        &[
            "analyze",
            &path,
            "--no-bds",
            "--bins",
            "7",
            "--no-correction",
            "--symmetric",
        ],
        &[
            "analyze",
            "--family",
            "anscombe",
            "--panel",
            "3",
            "--n",
            "400",
            "--bds-eta-absolute",
            "0.2",
        ],
        &["profile", &path, "--max-order", "3"],
        &[
            "crossover",
            "--steps",
            "2",
            "--seeds",
            "1,2",
            "--n",
            "300",
            "--power",
            "3",
        ],
    ];
    for args in runs {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let out = milambda(&full);
        assert!(matches!(out.status.code(), Some(0 | 2)), "{args:?}");
        let doc = json(&out);
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }

    // closed field set: an extra key anywhere is rejected
    let mut doc = json(&milambda(&["analyze", &path, "--format", "json"]));
    doc["lambda"]["extra"] = Value::from(1);
    assert!(!validator.is_valid(&doc));
    let mut doc = json(&milambda(&["analyze", &path, "--format", "json"]));
    doc["schema_version"] = Value::from(2);
    assert!(!validator.is_valid(&doc));
}

#[test]
fn text_output_summarises_the_analysis() {
    let out = milambda(&[
        "analyze",
        "--family",
        "polynomial",
        "--a",
        "0.3",
        "--n",
        "1000",
        "--seed",
        "5",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["digest", "I(x,y)", "I(x,y')", "lambda", "bds"] {
        assert!(text.contains(key), "missing {key}:\n{text}");
    }
}

#[test]
fn crossover_table_lists_every_grid_point() {
    let out = milambda(&[
        "crossover",
        "--steps",
        "3",
        "--a-step",
        "0.5",
        "--seeds",
        "1,2,3",
        "--n",
        "1000",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let rows = r["table"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(num(&rows[2]["a"]), 1.0);
    // a strong quadratic at n = 1000 is rejected on every seed
    assert_eq!(num(&rows[2]["rejection_fraction"]), 1.0);
    assert!(r["table"]["crossover"]["a"].as_f64().unwrap() <= 1.0);
}
