//! End-to-end tests of the binary: spawn it on the fixture files, parse the
//! emitted JSON, and check values, exit codes, and determinism.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyvol"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn pentagon_volume_all_methods_agree() {
    let hrep = fixture("example1.json");
    let out = run(&["volume", "--hrep", hrep.to_str().unwrap(), "--method", "all"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["agreement"], Value::Bool(true));
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    let methods: Vec<&str> = entries
        .iter()
        .map(|e| e["method"].as_str().unwrap())
        .collect();
    assert_eq!(
        methods,
        ["explicit", "recurrence", "lasserre", "brion", "oracle"]
    );
    for e in &entries[..4] {
        assert_eq!(e["value"]["coeff"], "17/48");
        assert_eq!(e["value"]["radicand"], 1);
    }
    assert!(entries[4]["value"].is_null());
}

#[test]
fn pinned_generic_vector_certifies_and_the_degenerate_one_fails() {
    let hrep = fixture("example1.json");
    let good = run(&[
        "volume",
        "--hrep",
        hrep.to_str().unwrap(),
        "--method",
        "explicit",
        "--c-override",
        "1,1,1,1,1/2",
    ]);
    let doc = stdout_json(&good);
    assert_eq!(doc["value"]["coeff"], "17/48");

    let bad = run(&[
        "volume",
        "--hrep",
        hrep.to_str().unwrap(),
        "--method",
        "explicit",
        "--c-override",
        "1,1,1,1,1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.contains("certificate"), "stderr: {err}");
}

#[test]
fn malformed_rational_is_reported_by_json_path() {
    let out = run(&[
        "volume",
        "--hrep",
        fixture("malformed.json").to_str().unwrap(),
        "--method",
        "lasserre",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("$.b[0]"), "stderr: {err}");
    assert!(err.contains("zero denominator"), "stderr: {err}");
}

#[test]
fn slice_reproduces_the_hexagon_section() {
    let out = run(&["slice", "--directions", "1 1 1", "--point", "3/2"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"]["coeff"], "3/4");
    assert_eq!(doc["value"]["radicand"], 3);
    let f = doc["float"].as_f64().unwrap();
    assert!((f - 1.29904).abs() < 1e-5, "float {f}");
}

#[test]
fn good_check_single_weight_is_the_equality_case() {
    let out = run(&["good-check", "--weights", "1"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["holds"], Value::Bool(true));
    assert_eq!(doc["equality"], Value::Bool(true));
    let out = run(&["good-check", "--weights", "1,2,3/2"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["holds"], Value::Bool(true));
    assert_eq!(doc["equality"], Value::Bool(false));
}

#[test]
fn tpower_routes_agree_on_the_diagonal_system() {
    let out = run(&[
        "tpower",
        "--file",
        fixture("diagonal.json").to_str().unwrap(),
        "--method",
        "all",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["agreement"], Value::Bool(true));
    for e in doc["entries"].as_array().unwrap() {
        assert_eq!(e["value"], "2");
    }
}

#[test]
fn integrate_monomial_matches_the_closed_form() {
    let out = run(&[
        "integrate",
        "--hrep",
        fixture("omega2.json").to_str().unwrap(),
        "--exponents",
        "1 1",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "1/24");

    let out = run(&[
        "integrate",
        "--hrep",
        fixture("unitsquare.json").to_str().unwrap(),
        "--poly",
        fixture("poly_xy.json").to_str().unwrap(),
    ]);
    // ∫ xy − y²/2 over the unit square = 1/4 − 1/6.
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], "1/12");
}

#[test]
fn moments_deviation_is_small_on_a_modest_grid() {
    let out = run(&["moments", "--weights", "1,2", "--grid", "2000"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["grid"], 2000);
    assert_eq!(doc["second_moment_target"], "5/24");
    let dev = doc["max_relative_deviation"].as_f64().unwrap();
    assert!(dev < 1e-4, "deviation {dev}");
}

#[test]
fn starved_oracle_flags_disagreement_with_exit_code_two() {
    // A single Monte Carlo sample has zero estimated standard error, so the
    // 3σ band collapses and the comparison must fail.
    let out = run(&[
        "volume",
        "--hrep",
        fixture("example1.json").to_str().unwrap(),
        "--method",
        "all",
        "--samples",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(doc["agreement"], Value::Bool(false));
}

#[test]
fn seed_flag_and_environment_variable_are_interchangeable() {
    let hrep = fixture("example1.json");
    let flagged = run(&[
        "volume",
        "--hrep",
        hrep.to_str().unwrap(),
        "--method",
        "oracle",
        "--samples",
        "10000",
        "--seed",
        "123",
    ]);
    let from_env = bin()
        .args([
            "volume",
            "--hrep",
            hrep.to_str().unwrap(),
            "--method",
            "oracle",
            "--samples",
            "10000",
        ])
        .env("POLYVOL_SEED", "123")
        .output()
        .expect("binary runs");
    assert_eq!(flagged.stdout, from_env.stdout);

    let reseeded = run(&[
        "volume",
        "--hrep",
        hrep.to_str().unwrap(),
        "--method",
        "oracle",
        "--samples",
        "10000",
        "--seed",
        "124",
    ]);
    assert_ne!(flagged.stdout, reseeded.stdout, "seed must matter");
}

#[test]
fn invalid_method_for_command_is_rejected() {
    let out = run(&[
        "integrate",
        "--hrep",
        fixture("omega2.json").to_str().unwrap(),
        "--exponents",
        "1",
        "--method",
        "brion",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "tpower",
        "--file",
        fixture("diagonal.json").to_str().unwrap(),
        "--method",
        "lasserre",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn canonical_fixtures_round_trip_byte_for_byte() {
    use polyvol_cli::input;

    for name in ["example1.json", "omega2.json", "unitsquare.json"] {
        let path = fixture(name);
        let raw = std::fs::read_to_string(&path).unwrap();
        let h = input::parse_hrep(&input::load_json(&path).unwrap()).unwrap();
        let once = input::serialize_hrep(&h);
        assert_eq!(once, raw, "{name} is not in canonical form");
        let again =
            input::serialize_hrep(&input::parse_hrep(&serde_json::from_str(&once).unwrap()).unwrap());
        assert_eq!(once, again, "{name} round trip is not idempotent");
    }

    let path = fixture("diagonal.json");
    let raw = std::fs::read_to_string(&path).unwrap();
    let (dm, x) = input::parse_direction_system(&input::load_json(&path).unwrap()).unwrap();
    assert_eq!(
        input::serialize_direction_system(&dm, x.as_deref()),
        raw,
        "diagonal.json is not in canonical form"
    );

    let path = fixture("weights.json");
    let raw = std::fs::read_to_string(&path).unwrap();
    let a = input::parse_weights(&input::load_json(&path).unwrap()).unwrap();
    assert_eq!(
        input::serialize_weights(&a),
        raw,
        "weights.json is not in canonical form"
    );
}

#[test]
fn monomial_file_format_parses() {
    use polyvol_cli::input;
    let v: Value = serde_json::from_str(r#"{"exponents": [2, 0, 1]}"#).unwrap();
    let k = input::parse_monomial(&v).unwrap();
    assert_eq!(k.exponents(), &[2, 0, 1]);
    let bad: Value = serde_json::from_str(r#"{"exponents": [2, -1]}"#).unwrap();
    let err = input::parse_monomial(&bad).unwrap_err();
    assert!(err.contains("$.exponents[1]"), "{err}");
}
