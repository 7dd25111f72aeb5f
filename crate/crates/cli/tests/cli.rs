//! End-to-end tests of the binary: golden outputs, schema conformance,
//! seeding, and the exit-code contract. Every invocation strips
//! EUCLID_ORBITS_SEED from the environment first, so an outer shell cannot
//! leak a seed into the assertions.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing golden {path}: {e}"))
}

fn base_command() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_euclid-orbits"));
    cmd.env_remove("EUCLID_ORBITS_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    base_command().args(args).output().expect("binary runs")
}

fn run_with_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = base_command();
    cmd.args(args);
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = base_command()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .expect("stdin piped")
        .write_all(input.as_bytes())
        .expect("stdin accepts input");
    child.wait_with_output().expect("binary runs")
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("stdout is utf-8")
}

fn document(output: &Output) -> Value {
    serde_json::from_str(stdout_of(output)).expect("stdout is one JSON document")
}

fn assert_matches_schema(schema_name: &str, instance: &Value) {
    let path = format!("{}/schemas/{schema_name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing {path}: {e}"));
    let schema: Value = serde_json::from_str(&text).expect("schema parses");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator
        .iter_errors(instance)
        .map(|e| format!("{}: {e}", e.instance_path))
        .collect();
    assert!(
        errors.is_empty(),
        "instance violates {schema_name}: {errors:#?}"
    );
}

/// The golden runs: fully exact outputs whose bytes must never drift.
fn golden_runs() -> Vec<(Vec<String>, &'static str, &'static str)> {
    vec![
        (
            vec![
                "classify".into(),
                "--group".into(),
                "En".into(),
                "--kind".into(),
                "coadjoint".into(),
                "--input".into(),
                fixture("momentum_e1.json"),
            ],
            "classify_momentum_e1.json",
            "orbit_class.json",
        ),
        (
            vec![
                "line".into(),
                "--group".into(),
                "En".into(),
                "--input".into(),
                fixture("momentum_e1.json"),
            ],
            "line_momentum_e1.json",
            "line.json",
        ),
        (
            vec![
                "spectrum".into(),
                "--input".into(),
                fixture("zero_matrix.json"),
            ],
            "spectrum_zero.json",
            "spectrum.json",
        ),
        (
            vec![
                "normal-form".into(),
                "--group".into(),
                "En".into(),
                "--kind".into(),
                "adjoint".into(),
                "--input".into(),
                fixture("rotation_b12.json"),
            ],
            "normal_form_rotation_b12.json",
            "normal_form_adjoint.json",
        ),
        (
            vec![
                "kks".into(),
                "--group".into(),
                "En".into(),
                "--input".into(),
                fixture("kks_generators.json"),
            ],
            "kks_generators.json",
            "kks.json",
        ),
        (
            vec![
                "pair".into(),
                "--group".into(),
                "En".into(),
                "--input".into(),
                fixture("zero_adjoint.json"),
            ],
            "pair_zero.json",
            "bijection_report.json",
        ),
    ]
}

#[test]
fn golden_outputs_are_stable() {
    for (args, golden_name, _) in golden_runs() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let output = run(&args);
        assert!(output.status.success(), "{args:?} failed");
        assert_eq!(
            stdout_of(&output),
            golden(golden_name),
            "stdout drifted from {golden_name}"
        );
        assert!(output.stderr.is_empty());
    }
}

#[test]
fn payloads_validate_against_shipped_schemas() {
    for (args, _, schema) in golden_runs() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let doc = document(&run(&args));
        assert_matches_schema("command_result.json", &doc);
        assert_matches_schema(schema, &doc["payload"]);
        assert_matches_schema(schema, &doc["rounded"]);
    }

    // Commands without a golden: a moved normal form, a suite report and a
    // reflection-family classification.
    let doc = document(&run(&[
        "normal-form",
        "--kind",
        "coadjoint",
        "--input",
        &fixture("dual_off_slice.json"),
    ]));
    assert_matches_schema("command_result.json", &doc);
    assert_matches_schema("normal_form_coadjoint.json", &doc["payload"]);

    let doc = document(&run(&[
        "check", "--suite", "spectral", "--n", "4", "--trials", "6", "--seed", "3",
    ]));
    assert_matches_schema("command_result.json", &doc);
    assert_matches_schema("suite_report.json", &doc["payload"]);

    let doc = document(&run(&[
        "classify",
        "--group",
        "On",
        "--kind",
        "adjoint",
        "--input",
        &fixture("o4_two_rates.json"),
    ]));
    assert_matches_schema("command_result.json", &doc);
    assert_matches_schema("orbit_class.json", &doc["payload"]);
}

#[test]
fn classify_reads_the_tables() {
    let doc = document(&run(&[
        "classify",
        "--kind",
        "adjoint",
        "--input",
        &fixture("translation_3e3.json"),
    ]));
    assert_eq!(doc["payload"]["rendered"], "Aff([~1;2])");
    assert_eq!(doc["payload"]["orbit_dim"], 2);
    assert_eq!(doc["payload"]["translation_norm"], 3.0);

    let doc = document(&run(&[
        "classify",
        "--kind",
        "coadjoint",
        "--input",
        &fixture("dual_screw.json"),
    ]));
    assert_eq!(doc["payload"]["rendered"], "Aff(~1;2C)");
    assert_eq!(doc["payload"]["orbit_dim"], 4);
    assert_eq!(doc["payload"]["components"], 2);

    let doc = document(&run(&[
        "classify",
        "--group",
        "On",
        "--kind",
        "adjoint",
        "--input",
        &fixture("o4_two_rates.json"),
    ]));
    assert_eq!(doc["payload"]["rendered"], "F(2C,2C)");
    assert_eq!(doc["payload"]["orbit_dim"], 4);
    let lambdas: Vec<f64> = doc["rounded"]["lambda_multiset"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["lambda"].as_f64().unwrap())
        .collect();
    assert_eq!(lambdas, vec![1.0, 2.0]);
}

#[test]
fn pair_reports_the_bundle_in_both_directions() {
    let doc = document(&run(&["pair", "--input", &fixture("rotation_b12.json")]));
    let payload = &doc["payload"];
    assert_eq!(payload["coadjoint_class"]["rendered"], "F(1,2C)");
    assert_eq!(payload["bundle"]["direction"], "adjoint_over_coadjoint");
    assert_eq!(payload["bundle"]["fibre_dim"], 2);
    assert_eq!(payload["adjoint_dim"], 4);
    assert_eq!(payload["coadjoint_dim"], 2);

    let doc = document(&run(&["pair", "--input", &fixture("translation_3e3.json")]));
    let payload = &doc["payload"];
    assert_eq!(payload["coadjoint_class"]["rendered"], "Aff(~1;2)");
    assert_eq!(payload["bundle"]["direction"], "coadjoint_over_adjoint");
    assert_eq!(payload["bundle"]["fibre_dim"], 2);
    assert_eq!(payload["adjoint_dim"], 2);
    assert_eq!(payload["coadjoint_dim"], 4);
}

#[test]
fn normal_form_and_line_agree_on_an_off_slice_point() {
    // The fixture is (μ(e2, -e1), e2): the translation by e1 clears the
    // angular part exactly, leaving the momentum ray through e2.
    let doc = document(&run(&[
        "normal-form",
        "--kind",
        "coadjoint",
        "--input",
        &fixture("dual_off_slice.json"),
    ]));
    let payload = &doc["payload"];
    for row in payload["point"]["L"].as_array().unwrap() {
        for entry in row.as_array().unwrap() {
            assert_eq!(entry.as_f64().unwrap(), 0.0);
        }
    }
    assert_eq!(payload["point"]["p"], serde_json::json!([0.0, 1.0, 0.0]));
    let d: Vec<f64> = payload["mover"]["d"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((d[0] - 1.0).abs() < 1e-9 && d[1].abs() < 1e-9 && d[2].abs() < 1e-9);

    let doc = document(&run(&["line", "--input", &fixture("dual_off_slice.json")]));
    let payload = &doc["payload"];
    let direction: Vec<f64> = payload["direction"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let base: Vec<f64> = payload["base"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (got, want) in direction.iter().zip([0.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    for (got, want) in base.iter().zip([-1.0, 0.0, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn check_runs_are_deterministic_and_seeded() {
    let args = [
        "check",
        "--suite",
        "symplectic",
        "--n",
        "3",
        "--trials",
        "8",
        "--seed",
        "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "same seed must give same bytes"
    );

    // The environment variable beats the flag.
    let overridden = run_with_env(
        &[
            "check",
            "--suite",
            "symplectic",
            "--n",
            "3",
            "--trials",
            "8",
            "--seed",
            "99",
        ],
        &[("EUCLID_ORBITS_SEED", "7")],
    );
    assert_eq!(first.stdout, overridden.stdout);

    let doc = document(&first);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["payload"]["seed"], 7);
    assert!(doc["diagnostics"][0]
        .as_str()
        .unwrap()
        .ends_with("properties passed"));
}

#[test]
fn exit_codes_follow_the_contract() {
    // Unreadable input: 2.
    let output = run(&[
        "classify",
        "--kind",
        "adjoint",
        "--input",
        &fixture("not_json.json"),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let doc = document(&output);
    assert_eq!(doc["status"], "input_error");
    assert_eq!(doc["payload"], Value::Null);

    // A tolerance so coarse that the flag formula and the rank oracle
    // disagree: the internal cross-check trips, which is exit 1.
    let output = run(&[
        "classify",
        "--kind",
        "coadjoint",
        "--tol",
        "0.5",
        "--input",
        &fixture("dual_screw.json"),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let doc = document(&output);
    assert_eq!(doc["status"], "invariant_violation");
    assert!(doc["diagnostics"][0]
        .as_str()
        .unwrap()
        .contains("disagrees"));

    // Lines need translations: 2 for a rotation-only family.
    let output = run(&[
        "line",
        "--group",
        "SOn",
        "--input",
        &fixture("momentum_e1.json"),
    ]);
    assert_eq!(output.status.code(), Some(2));

    // An explicit --n that contradicts the input: 2.
    let output = run(&[
        "classify",
        "--kind",
        "adjoint",
        "--n",
        "4",
        "--input",
        &fixture("rotation_b12.json"),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(document(&output)["diagnostics"][0]
        .as_str()
        .unwrap()
        .contains("disagrees with the input"));

    // A symmetric matrix fed to spectrum over stdin: 2.
    let output = run_with_stdin(
        &["spectrum", "--input", "-"],
        r#"{"omega": [[0.0, 1.0], [1.0, 0.0]]}"#,
    );
    assert_eq!(output.status.code(), Some(2));

    // A malformed seed in the environment: 2.
    let output = run_with_env(
        &["check", "--suite", "core", "--trials", "2"],
        &[("EUCLID_ORBITS_SEED", "frog")],
    );
    assert_eq!(output.status.code(), Some(2));
    assert!(document(&output)["diagnostics"][0]
        .as_str()
        .unwrap()
        .contains("EUCLID_ORBITS_SEED"));

    // Missing subcommand is a usage error: clap exits 2.
    let output = run(&[]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn pretty_output_carries_the_same_document() {
    let compact = document(&run(&[
        "classify",
        "--kind",
        "coadjoint",
        "--input",
        &fixture("momentum_e1.json"),
    ]));
    let pretty_run = run(&[
        "classify",
        "--kind",
        "coadjoint",
        "--input",
        &fixture("momentum_e1.json"),
        "--output",
        "pretty",
    ]);
    let pretty_text = stdout_of(&pretty_run);
    assert!(pretty_text.contains("\n  \"status\""));
    let pretty: Value = serde_json::from_str(pretty_text).unwrap();
    assert_eq!(compact, pretty);
}

#[test]
fn stdin_input_works_for_points() {
    let output = run_with_stdin(
        &["classify", "--kind", "adjoint", "--input", "-"],
        r#"{"omega": [[0.0, -2.5], [2.5, 0.0]], "v": [0.0, 0.0]}"#,
    );
    assert!(output.status.success());
    let doc = document(&output);
    assert_eq!(doc["payload"]["d0"], 0);
    assert_eq!(doc["rounded"]["lambda_multiset"][0]["lambda"], 2.5);
}
