//! End-to-end checks of the command-line binary: exit codes, payload
//! fields, output determinism, seed/env precedence, and the flat CSV
//! tables. Every invocation runs the real executable on fixture files.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const PLUS: &str = r#"{"dim":2,"re":[0.5,0.5,0.5,0.5],"im":[0,0,0,0]}"#;
const DIAG3: &str =
    r#"{"dim":3,"re":[0.5,0,0,0,0.3,0,0,0,0.2],"im":[0,0,0,0,0,0,0,0,0]}"#;
const QUARTER_WITNESS: &str = r#"{"dim":3,"re":[0.25,0.25,0.5,0.25,0.25,0,0.5,0,0.5],"im":[0,0,0,0,0,0,0,0,0]}"#;
const SIGMA_X: &str = r#"{"dim":2,"re":[0,1,1,0],"im":[0,0,0,0]}"#;
const QUTRIT: &str = r#"{"dim":3,"re":[0.5,0.1,0.05,0.1,0.3,0,0.05,0,0.2],"im":[0,0.05,0,-0.05,0,0.02,0,-0.02,0]}"#;
const BROKEN: &str = r#"{"dim":2,"re":[0.5"#;

fn cohlab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cohlab"));
    cmd.env_remove("COHLAB_SEED").env_remove("COHLAB_TOL");
    cmd
}

fn fixture(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let out = cmd.output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json_ok(cmd: &mut Command) -> Value {
    let (code, stdout, stderr) = run(cmd);
    assert_eq!(code, 0, "expected success, stderr: {stderr}");
    serde_json::from_str(stdout.trim_end()).unwrap()
}

fn near(v: &Value, key: &str, want: f64, tol: f64) {
    let got = v[key].as_f64().unwrap_or_else(|| panic!("{key} missing"));
    assert!(
        (got - want).abs() <= tol,
        "{key}: got {got}, wanted {want} within {tol}"
    );
}

// ---- measure --------------------------------------------------------------

#[test]
fn measure_pins_the_plus_state() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "plus.json", PLUS);
    let v = json_ok(cohlab().arg("measure").arg(&state));
    assert_eq!(v["kind"], "measure");
    assert_eq!(v["dim"], 2);
    near(&v, "c_h", 1.0, 1e-12);
    near(&v, "c_l1", 1.0, 1e-12);
    near(&v, "roc", 1.0, 1e-9);
    assert_eq!(v["chain_upper_ok"], true);
    assert_eq!(v["chain_lower_ok"], true);
    near(&v, "residual_coherence", 1.0, 1e-9);
    assert_eq!(v["unit_bound_ok"], true);
}

#[test]
fn measure_reports_zero_for_a_diagonal_state() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "diag3.json", DIAG3);
    let v = json_ok(cohlab().arg("measure").arg(&state));
    near(&v, "c_h", 0.0, 1e-15);
    near(&v, "c_l1", 0.0, 1e-15);
    near(&v, "roc", 0.0, 1e-9);
    // No rescaled state exists at zero robustness, so those fields are null.
    assert!(v["rescaling_residual"].is_null());
    assert!(v["residual_coherence"].is_null());
    assert!(v["unit_bound_ok"].is_null());
}

#[test]
fn malformed_and_missing_inputs_exit_with_the_parse_code() {
    let dir = TempDir::new().unwrap();
    let broken = fixture(&dir, "broken.json", BROKEN);
    let (code, _, stderr) = run(cohlab().arg("measure").arg(&broken));
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(!stderr.is_empty());

    let missing = dir.path().join("nope.json");
    let (code, _, _) = run(cohlab().arg("measure").arg(&missing));
    assert_eq!(code, 2);
}

// ---- witness --------------------------------------------------------------

#[test]
fn witness_check_separates_valid_from_optimal() {
    let dir = TempDir::new().unwrap();
    let quarter = fixture(&dir, "quarter.json", QUARTER_WITNESS);
    let v = json_ok(cohlab().args(["witness", "check"]).arg(&quarter));
    assert_eq!(v["kind"], "witness_check");
    assert_eq!(v["witness"], true);
    assert_eq!(v["optimal"], false);
    near(&v, "min_diag", 0.25, 1e-15);
    assert!(v["lambda_min"].as_f64().unwrap() < 0.0);

    let sx = fixture(&dir, "sigma_x.json", SIGMA_X);
    let v = json_ok(cohlab().args(["witness", "check"]).arg(&sx));
    assert_eq!(v["witness"], true);
    assert_eq!(v["optimal"], true);
    near(&v, "lambda_min", -1.0, 1e-12);
}

#[test]
fn every_witness_is_as_fine_as_itself() {
    let dir = TempDir::new().unwrap();
    let quarter = fixture(&dir, "quarter.json", QUARTER_WITNESS);
    let v = json_ok(
        cohlab()
            .args(["witness", "finer"])
            .arg(&quarter)
            .arg(&quarter),
    );
    assert_eq!(v["kind"], "finer");
    assert_eq!(v["finer"], true);
    near(&v, "epsilon", 0.0, 1e-12);
}

#[test]
fn witness_make_rejects_an_incoherent_state() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "diag3.json", DIAG3);
    let (code, _, stderr) = run(cohlab().args(["witness", "make"]).arg(&state));
    assert_eq!(code, 4, "stderr: {stderr}");
}

#[test]
fn witness_make_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "qutrit.json", QUTRIT);
    let (code, stdout, _) = run(cohlab().args(["witness", "make"]).arg(&state));
    assert_eq!(code, 0);
    assert!(stdout.starts_with(r#"{"kind":"witness""#));

    let wfile = fixture(&dir, "made.json", stdout.trim_end());
    let v = json_ok(cohlab().args(["witness", "check"]).arg(&wfile));
    assert_eq!(v["witness"], true);
    assert_eq!(v["optimal"], true);

    // The file format is the output format: --format does not change it.
    let (_, csv_stdout, _) = run(cohlab()
        .args(["witness", "make", "--format", "csv"])
        .arg(&state));
    assert_eq!(stdout, csv_stdout);
}

// ---- tomography -----------------------------------------------------------

#[test]
fn qubit_protocol_rejects_larger_states() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "qutrit.json", QUTRIT);
    let (code, _, _) = run(cohlab().args(["tomo", "stokes"]).arg(&state));
    assert_eq!(code, 5);
}

#[test]
fn expectation_mode_reconstructs_exactly() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "qutrit.json", QUTRIT);
    let v = json_ok(
        cohlab()
            .args(["tomo", "qudit", "--shots", "0"])
            .arg(&state),
    );
    assert_eq!(v["kind"], "tomography");
    assert_eq!(v["mode"], "qudit");
    assert_eq!(v["shots"], 0);
    near(&v, "trace_distance", 0.0, 1e-10);
    assert_eq!(v["coherent"], true);
    assert!(v["intensities"].is_null());
    for rec in v["records"].as_array().unwrap() {
        assert_eq!(rec["stderr"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn qubit_intensity_protocol_reconstructs_exactly() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "plus.json", PLUS);
    let v = json_ok(
        cohlab()
            .args(["tomo", "stokes", "--shots", "0"])
            .arg(&state),
    );
    assert_eq!(v["mode"], "stokes");
    near(&v, "trace_distance", 0.0, 1e-12);
    assert_eq!(v["coherent"], true);
    assert_eq!(v["intensities"].as_array().unwrap().len(), 4);
}

// ---- detection walk -------------------------------------------------------

#[test]
fn detection_on_a_diagonal_state_exhausts_the_off_diagonal_probes() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "diag3.json", DIAG3);
    let v = json_ok(cohlab().args(["detect", "--shots", "0"]).arg(&state));
    assert_eq!(v["kind"], "detect");
    assert_eq!(v["verdict"], "incoherent");
    assert_eq!(v["measurements_used"], 6);
    assert!(v["witness_index"].is_null());
}

#[test]
fn detection_flags_a_coherent_state() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "plus.json", PLUS);
    let v = json_ok(cohlab().args(["detect", "--shots", "0"]).arg(&state));
    assert_eq!(v["verdict"], "coherent");
    assert!(v["witness_index"].as_u64().is_some());
}

// ---- expected measurement counts ------------------------------------------

#[test]
fn expected_counts_quote_the_reference_configuration_only() {
    let dir = TempDir::new().unwrap();
    drop(dir);
    let v = json_ok(cohlab().args(["expected", "56", "28", "--trials", "2000"]));
    near(&v, "quoted_reference", 1.982, 1e-12);
    assert!(v["quoted_discrepancy"].as_f64().unwrap() > 0.016);

    let v = json_ok(cohlab().args(["expected", "6", "3", "--trials", "2000"]));
    near(&v, "e_formula", 1.75, 1e-12);
    near(&v, "e_closed", 1.75, 1e-12);
    assert!(v["quoted_reference"].is_null());
    assert!(v["quoted_discrepancy"].is_null());
}

// ---- verification suites --------------------------------------------------

#[test]
fn a_selected_suite_runs_and_passes() {
    let v = json_ok(cohlab().args(["verify", "norm", "--trials", "25"]));
    assert_eq!(v["kind"], "verify");
    assert_eq!(v["passed"], true);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "norm");
    assert!(!suites[0]["checks"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_suite_tokens_are_usage_errors() {
    let (code, _, _) = run(cohlab().args(["verify", "nonsense"]));
    assert_eq!(code, 5);
}

// ---- determinism and plumbing ---------------------------------------------

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "qutrit.json", QUTRIT);
    let args = ["tomo", "qudit", "--shots", "2000", "--seed", "31"];
    let (_, first, _) = run(cohlab().args(args).arg(&state));
    let (_, second, _) = run(cohlab().args(args).arg(&state));
    assert_eq!(first, second);

    let (_, a, _) = run(cohlab().arg("measure").arg(&state));
    let (_, b, _) = run(cohlab().arg("measure").arg(&state));
    assert_eq!(a, b);
}

#[test]
fn seed_comes_from_the_environment_and_yields_to_the_flag() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "qutrit.json", QUTRIT);
    let sampled = ["tomo", "qudit", "--shots", "500"];

    let (_, via_env, _) = run(cohlab().args(sampled).env("COHLAB_SEED", "31").arg(&state));
    let (_, via_flag, _) = run(cohlab().args(sampled).args(["--seed", "31"]).arg(&state));
    assert_eq!(via_env, via_flag);

    let (_, flag_wins, _) = run(cohlab()
        .args(sampled)
        .env("COHLAB_SEED", "31")
        .args(["--seed", "9"])
        .arg(&state));
    let (_, plain_nine, _) = run(cohlab().args(sampled).args(["--seed", "9"]).arg(&state));
    assert_eq!(flag_wins, plain_nine);
    assert_ne!(via_env, plain_nine, "different seeds should sample differently");
}

#[test]
fn out_flag_redirects_the_payload_to_a_file() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "plus.json", PLUS);
    let target = dir.path().join("report.json");

    let (code, stdout, _) = run(cohlab()
        .arg("measure")
        .arg(&state)
        .arg("--out")
        .arg(&target));
    assert_eq!(code, 0);
    assert!(stdout.is_empty());

    let (_, direct, _) = run(cohlab().arg("measure").arg(&state));
    assert_eq!(fs::read_to_string(&target).unwrap(), direct);
}

#[test]
fn csv_format_emits_flat_tables() {
    let dir = TempDir::new().unwrap();
    let state = fixture(&dir, "diag3.json", DIAG3);

    let (_, measure, _) = run(cohlab()
        .args(["measure", "--format", "csv"])
        .arg(&state));
    assert_eq!(measure.lines().next(), Some("key,value"));

    let (_, detect, _) = run(cohlab()
        .args(["detect", "--shots", "0", "--format", "csv"])
        .arg(&state));
    assert_eq!(detect.lines().next(), Some("step,generator,z"));
    assert_eq!(detect.lines().count(), 7);

    let (_, tomo, _) = run(cohlab()
        .args(["tomo", "qudit", "--shots", "0", "--format", "csv"])
        .arg(&state));
    assert_eq!(tomo.lines().next(), Some("index,estimate,stderr"));

    let (_, expected, _) = run(cohlab().args([
        "expected", "6", "3", "--trials", "200", "--format", "csv",
    ]));
    assert_eq!(
        expected.lines().next(),
        Some("n,i,e_formula,e_closed,e_mc,mc_stderr")
    );
    assert_eq!(expected.lines().count(), 2);

    let (_, verify, _) = run(cohlab().args([
        "verify", "norm", "--trials", "10", "--format", "csv",
    ]));
    assert_eq!(verify.lines().next(), Some("suite,check,passed,detail"));
}

#[test]
fn help_exits_cleanly() {
    let (code, stdout, _) = run(cohlab().arg("--help"));
    assert_eq!(code, 0);
    assert!(stdout.contains("measure"));
    assert!(stdout.contains("verify"));
}
