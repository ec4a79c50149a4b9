//! End-to-end tests of the `algent` binary: exit codes, output formats,
//! and byte-reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn fixture(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path
}

// ---------------------------------------------------------------- formats

#[test]
fn mahler_text_reports_the_log_of_an_integer() {
    let out = stdout(&["mahler", "--poly", "6", "--dim", "1"]);
    assert!(
        out.contains("m(6) = 1.79175946923e0 = log 6 [nat]"),
        "got: {out}"
    );
    assert!(out.contains("method = roots"));
}

#[test]
fn mahler_bits_flag_switches_units() {
    let out = stdout(&[
        "mahler", "--poly", "4", "--dim", "1", "--format", "csv", "--bits",
    ]);
    assert!(out.contains("value,2.00000000000e0"), "got: {out}");
    assert!(out.contains("log_units,bits"));
}

#[test]
fn entropy_json_decomposes_six() {
    let out = stdout(&["entropy", "--poly", "6", "--dim", "1", "--format", "json"]);
    assert!(out.starts_with("{\"input\":\"6\""), "got: {out}");
    assert!(out.contains("\"rho_total\":1.79175946923e0"));
    assert!(out.contains("\"components\":{\"2\":6.93147180560e-1,\"3\":1.09861228867e0}"));
    assert!(out.contains("\"log_units\":\"nat\""));
    assert!(out.ends_with("}\n"));
}

#[test]
fn entropy_explicit_primes_lists_zero_components() {
    let out = stdout(&[
        "entropy", "--poly", "6", "--dim", "1", "--primes", "2,5", "--format", "json",
    ]);
    assert!(
        out.contains("\"components\":{\"2\":6.93147180560e-1,\"5\":0.00000000000e0}"),
        "got: {out}"
    );
}

#[test]
fn solenoid_text_matches_log_three() {
    let out = stdout(&["solenoid", "--poly", "x - 3/2", "--dim", "1"]);
    assert!(out.contains("1.09861228867e0 = log 3"), "got: {out}");
}

#[test]
fn lindward_reports_negative_local_entropy() {
    let path = fixture("half.mat", "1\n1/2\n");
    let out = stdout(&[
        "lindward",
        "--matrix",
        path.to_str().unwrap(),
        "--prime",
        "2",
    ]);
    assert!(out.contains("-6.93147180560e-1"), "got: {out}");
    let csv = stdout(&[
        "lindward",
        "--matrix",
        path.to_str().unwrap(),
        "--prime",
        "2",
        "--format",
        "csv",
    ]);
    assert!(csv.contains("multiplicity,-1"), "got: {csv}");
}

#[test]
fn rank_of_torsion_module_is_zero() {
    let path = fixture("pres.txt", "2 1 2\nx - 1\ny - 1\n");
    let out = stdout(&["rank", "--relations", path.to_str().unwrap()]);
    assert!(out.contains("rk(M) = 0"), "got: {out}");
    let json = stdout(&[
        "rank",
        "--relations",
        path.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "3",
    ]);
    assert!(json.contains("\"rank\":0"), "got: {json}");
    assert!(json.contains("\"seed\":3"));
}

#[test]
fn approx_csv_has_pinned_columns_and_verdict_footer() {
    let out = stdout(&[
        "approx",
        "--kind",
        "padic_det",
        "--poly",
        "2 + x",
        "--prime",
        "2",
        "--sides",
        "1..12",
    ]);
    assert!(
        out.starts_with("n,volume,raw_statistic,normalized_value,reference,gap_flag\n"),
        "got: {out}"
    );
    assert!(out.contains("# verdict = diverging-from-reference"));
}

#[test]
fn approx_peters_complement_is_zero_series() {
    let out = stdout(&[
        "approx",
        "--kind",
        "peters_complement",
        "--poly",
        "1 + x",
        "--prime",
        "2",
        "--sides",
        "1..6",
        "--format",
        "json",
    ]);
    assert!(out.contains("\"kind\":\"peters_complement\""), "got: {out}");
    assert!(out.contains("\"limit_estimate\":0.00000000000e0"));
}

#[test]
fn approx_posent_runs_at_the_largest_side() {
    let out = stdout(&[
        "approx", "--kind", "posent", "--poly", "1 + x", "--prime", "2", "--sides", "1..10",
        "--format", "csv",
    ]);
    assert!(out.contains("side,10"), "got: {out}");
    assert!(out.contains("holds,true"));
}

#[test]
fn approx_sides_accept_comma_lists() {
    let out = stdout(&[
        "approx",
        "--kind",
        "elek_rank",
        "--poly",
        "1 + x + y",
        "--dim",
        "2",
        "--prime",
        "2",
        "--sides",
        "2,4,8",
    ]);
    assert!(out.contains("\n2,4,"), "got: {out}");
    assert!(out.contains("\n8,64,"));
}

// ------------------------------------------------------------- exit codes

#[test]
fn parse_errors_exit_two() {
    assert_eq!(code(&["mahler", "--poly", "1 +* x", "--dim", "1"]), 2);
    assert_eq!(code(&["mahler", "--poly", "0", "--dim", "1"]), 2);
    assert_eq!(code(&["mahler", "--poly", "1 + q", "--dim", "1"]), 2);
    assert_eq!(code(&["entropy", "--poly", "x - 1/2", "--dim", "1"]), 2);
    assert_eq!(
        code(&["lindward", "--matrix", "/nonexistent.mat", "--prime", "2"]),
        2
    );
    assert_eq!(
        code(&[
            "approx",
            "--kind",
            "padic_det",
            "--poly",
            "x",
            "--prime",
            "4",
            "--sides",
            "1..4"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "approx",
            "--kind",
            "padic_det",
            "--poly",
            "x",
            "--prime",
            "2",
            "--sides",
            "9..1"
        ]),
        2
    );
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["mahler"]), 2);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["approx", "--help"]), 0);
}

#[test]
fn guard_violations_exit_three() {
    // Volume 70^2 exceeds the window cap.
    assert_eq!(
        code(&[
            "approx",
            "--kind",
            "padic_det",
            "--poly",
            "1 + x + y",
            "--dim",
            "2",
            "--prime",
            "2",
            "--sides",
            "70",
        ]),
        3
    );
}

#[test]
fn singular_lindward_matrix_exits_two() {
    let path = fixture("sing.mat", "2\n1 1\n1 1\n");
    assert_eq!(
        code(&[
            "lindward",
            "--matrix",
            path.to_str().unwrap(),
            "--prime",
            "2"
        ]),
        2
    );
}

// -------------------------------------------------------- reproducibility

#[test]
fn identical_runs_are_byte_identical() {
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "entropy",
            "--poly",
            "5 + 2*x + 2*x^-1",
            "--dim",
            "1",
            "--format",
            "json",
        ],
        vec![
            "mahler",
            "--poly",
            "1 + x + y",
            "--dim",
            "2",
            "--grid",
            "128",
            "--format",
            "json",
        ],
        vec![
            "approx",
            "--kind",
            "peters",
            "--poly",
            "1 + x + x^2",
            "--prime",
            "3",
            "--sides",
            "1..8",
            "--format",
            "csv",
        ],
    ];
    for args in &cases {
        let a = stdout(args);
        let b = stdout(args);
        assert_eq!(a, b, "outputs differ for {args:?}");
    }

    let path = fixture("repro.txt", "1 2 2\nx - 1; 2*y\n");
    let args = vec![
        "rank",
        "--relations",
        path.to_str().unwrap(),
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
}
