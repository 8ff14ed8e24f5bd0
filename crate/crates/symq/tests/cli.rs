//! Command-line interface tests: exit codes, emitted files, stream
//! conventions, and reproducibility, driven through the compiled
//! binary exactly as a user would invoke it.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use symq::voting::{small_g, OutcomeDistribution, VotingModel};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symq"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary failed to spawn")
}

fn write_config(dir: &Path, out_dir: &Path) -> std::path::PathBuf {
    let text = format!(
        "[circuit]\n\
         source = bell\n\
         \n\
         [symmetry]\n\
         n_physical = 4\n\
         variants = 4\n\
         \n\
         [noise]\n\
         source = uniform\n\
         delta_min = -0.2\n\
         delta_max = 0.2\n\
         \n\
         [aggregation]\n\
         strategy = both\n\
         threshold = 2\n\
         \n\
         [run]\n\
         seed = 5\n\
         shots = 50\n\
         \n\
         [output]\n\
         dir = {}\n",
        out_dir.display()
    );
    let path = dir.join("exp.cfg");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn symmetrize_writes_a_json_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let result = run(&["symmetrize", "--config", cfg.to_str().unwrap()]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));

    let report_path = out.join("report.json");
    assert!(report_path.exists());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("wrote"), "stdout was: {stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["metadata"]["seed"], 5);
    assert_eq!(report["metadata"]["variants"], 4);
    assert!(report["voted"]["fidelity"].is_f64());
}

#[test]
fn reports_are_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    fs::create_dir_all(dir.path().join("ca")).unwrap();
    fs::create_dir_all(dir.path().join("cb")).unwrap();
    let cfg_a = write_config(&dir.path().join("ca"), &out_a);
    let cfg_b = write_config(&dir.path().join("cb"), &out_b);
    assert!(run(&["symmetrize", "--config", cfg_a.to_str().unwrap()]).status.success());
    assert!(run(&["symmetrize", "--config", cfg_b.to_str().unwrap()]).status.success());
    let a = fs::read(out_a.join("report.json")).unwrap();
    let b = fs::read(out_b.join("report.json")).unwrap();
    assert_eq!(a, b, "reports differ between identical invocations");
}

#[test]
fn csv_format_writes_fidelity_and_histogram_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let result =
        run(&["symmetrize", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(result.status.success());
    let fidelities = fs::read_to_string(out.join("fidelities.csv")).unwrap();
    assert!(fidelities.lines().next().unwrap().contains("fidelity"));
    assert!(out.join("histograms.csv").exists());
}

#[test]
fn simulate_runs_the_unsymmetrized_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let result = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(result.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap())
            .unwrap();
    assert!(report["fidelity_exact"].is_f64());
    assert!(report["target_probability_sampled"].is_f64());
    assert!(report["noisy"].is_object());
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let result =
        run(&["symmetrize", "--config", cfg.to_str().unwrap(), "--seed", "99"]);
    assert!(result.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["metadata"]["seed"], 99);
}

#[test]
fn missing_config_file_exits_with_the_config_code() {
    let result = run(&["symmetrize", "--config", "/nonexistent/exp.cfg"]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.starts_with("error:"), "stderr was: {stderr}");
}

#[test]
fn unknown_config_key_exits_with_the_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let mut text = fs::read_to_string(&cfg).unwrap();
    text.push_str("\n[run]\nwarp_speed = 9\n");
    fs::write(&cfg, text).unwrap();
    let result = run(&["symmetrize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn impossible_calibration_exits_with_the_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let text = fs::read_to_string(&cfg)
        .unwrap()
        .replace(
            "source = uniform\ndelta_min = -0.2\ndelta_max = 0.2",
            "source = ideal\ncalibrate_low = 0.01\ncalibrate_high = 0.05",
        );
    fs::write(&cfg, text).unwrap();
    let result = run(&["symmetrize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("error:"), "stderr was: {stderr}");
}

#[test]
fn unknown_flag_exits_with_the_usage_code() {
    let result = run(&["symmetrize", "--warp", "9"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn vote_theory_emits_the_aggregated_table() {
    let dir = tempfile::tempdir().unwrap();
    let result = run(&[
        "vote-theory",
        "--h",
        "0.6,0.3,0.1",
        "--m",
        "5",
        "--t",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let table: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("vote_theory.json")).unwrap(),
    )
    .unwrap();

    // The emitted g column must match the library computation.
    let h = OutcomeDistribution::new(vec![0.6, 0.3, 0.1]).unwrap();
    let model = VotingModel::new(h, 5, 2).unwrap();
    let g = small_g(&model).unwrap();
    for (i, expected) in g.probabilities().iter().enumerate() {
        let emitted = table["g"][i].as_f64().unwrap();
        assert!(
            (emitted - expected).abs() < 1e-12,
            "g[{i}]: emitted {emitted}, library {expected}"
        );
    }
}

#[test]
fn train_threshold_prints_a_recommendation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);
    let result = run(&["train-threshold", "--config", cfg.to_str().unwrap()]);
    assert!(result.status.success(), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(
        stdout.contains("recommended threshold:"),
        "stdout was: {stdout}"
    );
    assert!(out.join("threshold.json").exists());
}

#[test]
fn sweep_shots_emits_rows_and_validates_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &out);

    let ok = run(&[
        "sweep-shots",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "10,50",
    ]);
    assert!(ok.status.success(), "stderr: {}", String::from_utf8_lossy(&ok.stderr));
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(sweep.as_array().unwrap().len(), 2);

    // A grid entry beyond the available shots is a runtime error; a
    // malformed entry is a config error.
    let too_big = run(&[
        "sweep-shots",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "10,5000",
    ]);
    assert_eq!(too_big.status.code(), Some(3));
    let garbled = run(&[
        "sweep-shots",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "ten",
    ]);
    assert_eq!(garbled.status.code(), Some(2));
}
