//! End-to-end command tests against the built binary.

mod common;

use common::{assert_valid, medimux, repo_root, run_ok};
use serde_json::Value;

fn model(name: &str) -> std::path::PathBuf {
    repo_root().join("models").join(name)
}

#[test]
fn simulate_then_mediate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("observed.csv");
    run_ok(medimux()
        .args(["simulate", "--n", "2000", "--seed", "5"])
        .arg("--model")
        .arg(model("continuous.toml"))
        .arg("--output")
        .arg(&data));

    let header = std::fs::read_to_string(&data).unwrap();
    assert!(header.starts_with("t,m1,m2,y\n"), "unexpected header: {}", &header[..20]);

    let report_path = dir.path().join("report.json");
    let draws_path = dir.path().join("draws.csv");
    run_ok(medimux()
        .args([
            "mediate",
            "--treatment",
            "t",
            "--mediators",
            "m1,m2",
            "--outcome",
            "y",
            "--family",
            "linear",
            "--draws",
            "300",
            "--sims",
            "300",
            "--seed",
            "11",
        ])
        .arg("--input")
        .arg(&data)
        .arg("--output")
        .arg(&report_path)
        .arg("--draws-csv")
        .arg(&draws_path));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_valid(&report, "report.v1.json");
    let delta_z = report["effects"]["delta_z"]["avg"]["point"].as_f64().unwrap();
    assert!(delta_z > 40.0 && delta_z < 47.0, "delta_z {delta_z}");
    assert!(report["provenance"]["input_digest"].as_str().unwrap().starts_with("sha256:"));

    let draws = std::fs::read_to_string(&draws_path).unwrap();
    let lines: Vec<&str> = draws.lines().collect();
    assert_eq!(lines.len(), 301);
    assert!(lines[0].starts_with("draw,delta_1_t0,delta_1_t1,"));
}

#[test]
fn mediate_simple_mode_restricts_to_one_mediator() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("observed.csv");
    run_ok(medimux()
        .args(["simulate", "--n", "1500", "--seed", "7"])
        .arg("--model")
        .arg(model("latent_confounder.toml"))
        .arg("--output")
        .arg(&data));

    let out = run_ok(medimux()
        .args([
            "mediate",
            "--treatment",
            "t",
            "--mediators",
            "m1,m2",
            "--outcome",
            "y",
            "--simple",
            "1",
            "--draws",
            "300",
            "--sims",
            "300",
            "--seed",
            "3",
        ])
        .arg("--input")
        .arg(&data));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&report, "report.v1.json");
    assert_eq!(report["analysis"], "simple");
    assert_eq!(report["simple_mediator"], "m1");
    assert_eq!(report["effects"]["per_mediator"].as_array().unwrap().len(), 1);
    // The biased baseline: indirect effect inflated far above 20.
    let d1 = report["effects"]["per_mediator"][0]["delta"]["avg"]["point"].as_f64().unwrap();
    assert!(d1 > 30.0, "simple delta_1 {d1}");
}

#[test]
fn mediate_reads_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("observed.csv");
    run_ok(medimux()
        .args(["simulate", "--n", "1200", "--seed", "9"])
        .arg("--model")
        .arg(model("continuous.toml"))
        .arg("--output")
        .arg(&data));

    let config_path = dir.path().join("analysis.toml");
    std::fs::write(
        &config_path,
        format!(
            "input = {:?}\nfamily = \"linear\"\ndraws = 200\nsims = 150\nseed = 21\n\n[columns]\ntreatment = \"t\"\nmediators = [\"m1\", \"m2\"]\noutcome = \"y\"\n",
            data.to_str().unwrap()
        ),
    )
    .unwrap();

    // Flag overrides the file's draw count.
    let out = run_ok(medimux()
        .args(["mediate", "--draws", "250"])
        .arg("--config")
        .arg(&config_path));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["effects"]["n_draws"], 250);
    assert_eq!(report["effects"]["n_sims"], 150);
    assert_eq!(report["provenance"]["seed"], 21);
}

#[test]
fn truth_and_closed_form_agree_on_continuous_model() {
    let out = run_ok(medimux()
        .args(["truth", "--rows", "20000", "--seed", "3"])
        .arg("--model")
        .arg(model("continuous.toml")));
    let truth: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&truth, "truth.v1.json");
    let tau = truth["truth"]["tau"].as_f64().unwrap();
    assert!((tau - 54.0).abs() < 1e-9);

    let out = run_ok(medimux().args(["closed-form"]).arg("--model").arg(model("continuous.toml")));
    let cf: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&cf, "closed_form.v1.json");
    assert_eq!(cf["t0"]["delta_z"].as_f64().unwrap(), 44.0);
    assert_eq!(cf["t0"]["delta"][0].as_f64().unwrap(), 20.0);
    assert_eq!(cf["t0"]["delta"][1].as_f64().unwrap(), 24.0);
    assert_eq!(cf["t0"]["zeta"].as_f64().unwrap(), 10.0);
    assert_eq!(cf["tau"].as_f64().unwrap(), 54.0);
}

#[test]
fn closed_form_binary_model_has_two_arms() {
    let out = run_ok(medimux().args(["closed-form"]).arg("--model").arg(model("binary.toml")));
    let cf: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&cf, "closed_form.v1.json");
    assert_eq!(cf["family"], "logit");
    let dz0 = cf["t0"]["delta_z"].as_f64().unwrap();
    let dz1 = cf["t1"]["delta_z"].as_f64().unwrap();
    assert!(dz0 > 0.0 && dz1 > 0.0);
    assert_ne!(dz0, dz1, "binary-family effects depend on the arm");
    // tau = delta_z(1) + zeta(0) by construction.
    let tau = cf["tau"].as_f64().unwrap();
    assert!((tau - (dz1 + cf["t0"]["zeta"].as_f64().unwrap())).abs() < 1e-15);
}

#[test]
fn study_writes_long_format_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("study.csv");
    let json_path = dir.path().join("study.json");
    run_ok(medimux()
        .args([
            "study",
            "--sizes",
            "150",
            "--correlations",
            "0.0,0.5",
            "--runs",
            "3",
            "--draws",
            "60",
            "--sims",
            "80",
            "--seed",
            "17",
            "--truth-rows",
            "4000",
        ])
        .arg("--model")
        .arg(model("continuous.toml"))
        .arg("--output")
        .arg(&csv_path)
        .arg("--json")
        .arg(&json_path)
        .env("MEDIMUX_CACHE_DIR", dir.path().join("cache")));

    let study: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_valid(&study, "study.v1.json");
    // 2 cells × (5 multiple + 3 simple_1 + 3 simple_2).
    assert_eq!(study["rows"].as_array().unwrap().len(), 22);

    let csv_body = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv_body.lines();
    assert_eq!(lines.next().unwrap(), "estimator,effect,metric,sample_size,correlation,value");
    assert_eq!(csv_body.lines().count(), 1 + 22 * 6);
    assert!(dir.path().join("cache").read_dir().unwrap().count() >= 1, "truth cache populated");
}

#[test]
fn errors_are_machine_readable_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("observed.csv");
    std::fs::write(&data, "t,m1,m2,y\n0,1,2,3\n0,1,2,3\n1,1,2,3\n1,1,2,3\n").unwrap();

    // Unknown column.
    let out = medimux()
        .args(["mediate", "--treatment", "t", "--mediators", "m1,nope", "--outcome", "y"])
        .arg("--input")
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_valid(&err, "error.v1.json");
    assert_eq!(err["kind"], "missing_column");

    // Treatment coded 1/2.
    std::fs::write(&data, "t,m1,m2,y\n1,1,2,3\n2,1,2,3\n1,1,2,3\n2,1,2,3\n").unwrap();
    let out = medimux()
        .args(["mediate", "--treatment", "t", "--mediators", "m1,m2", "--outcome", "y"])
        .arg("--input")
        .arg(&data)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "non_binary_treatment");

    // Degenerate simulation size.
    let out = medimux()
        .args(["simulate", "--n", "0", "--seed", "1"])
        .arg("--model")
        .arg(model("continuous.toml"))
        .arg("--output")
        .arg(dir.path().join("none.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_valid(&err, "error.v1.json");
}

#[test]
fn model_files_match_library_presets() {
    use medimux_core::simlab::{presets, SimulationModelSpec};
    let load = |name: &str| -> SimulationModelSpec {
        toml::from_str(&std::fs::read_to_string(model(name)).unwrap()).unwrap()
    };
    assert_eq!(load("continuous.toml"), presets::continuous_two_mediator(0.7));
    assert_eq!(load("binary.toml"), presets::binary_two_mediator(0.4));
    assert_eq!(load("latent_confounder.toml"), presets::latent_confounder_two_mediator(false));
}
