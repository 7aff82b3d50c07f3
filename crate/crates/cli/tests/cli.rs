use std::path::Path;
use std::process::{Command, Output};

fn lsmds(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsmds"))
        .args(args)
        .arg("--config")
        .arg(dir.join("config.json"))
        .env_remove("LSMDS_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = lsmds(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// A tiny profile that runs the whole pipeline in well under a second.
fn small_config(dir: &Path) {
    let out = dir.join("out");
    let cfg = serde_json::json!({
        "output_dir": out,
        "n_reference": 40,
        "n_holdout": 6,
        "k": 2,
        "landmark_count": 8,
        "l_grid": [5, 10],
        "descent": {"max_iters": 200},
        "train": {"epochs": 15, "batch_size": 8},
        "timing_repeats": 1
    });
    std::fs::write(dir.join("config.json"), cfg.to_string()).unwrap();
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref())
        .unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

#[test]
fn generate_writes_requested_names_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let stdout = ok(
        dir.path(),
        &[
            "generate",
            "--n-names",
            "10",
            "--n-reference",
            "6",
            "--n-holdout",
            "4",
            "--landmarks",
            "3",
            "--l-grid",
            "3",
        ],
    );
    assert!(stdout.contains("10 names"), "{stdout}");
    let names = dir.path().join("out/names.txt");
    let first = std::fs::read(&names).unwrap();
    assert_eq!(read(&names).lines().count(), 10);
    ok(
        dir.path(),
        &[
            "generate",
            "--n-names",
            "10",
            "--n-reference",
            "6",
            "--n-holdout",
            "4",
            "--landmarks",
            "3",
            "--l-grid",
            "3",
        ],
    );
    assert_eq!(std::fs::read(&names).unwrap(), first);
}

#[test]
fn pool_exhaustion_exits_nonzero_and_names_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = lsmds(dir.path(), &["generate", "--n-names", "10000000"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("name pool too small"), "{stderr}");
}

#[test]
fn embed_writes_configuration_and_monotone_trace() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    ok(
        dir.path(),
        &["generate", "--n-reference", "10", "--n-holdout", "2"],
    );
    ok(
        dir.path(),
        &["distmatrix", "--n-reference", "10", "--n-holdout", "2"],
    );
    ok(
        dir.path(),
        &["embed", "--n-reference", "10", "--n-holdout", "2"],
    );
    let csv = read(dir.path().join("out/configuration.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "id,c1,c2");
    assert_eq!(lines.len(), 11);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));

    let trace = read(dir.path().join("out/stress_trace.csv"));
    let values: Vec<f64> = trace
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]));

    ok(
        dir.path(),
        &["embed", "--n-reference", "10", "--n-holdout", "2"],
    );
    assert_eq!(read(dir.path().join("out/configuration.csv")), csv);
}

#[test]
fn ose_both_methods_and_model_reuse() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let stdout = ok(dir.path(), &["ose"]);
    assert!(
        stdout.contains("optimize:") && stdout.contains("neural:"),
        "{stdout}"
    );
    for file in [
        "ose_optimize.csv",
        "ose_neural.csv",
        "report_neural.json",
        "point_errors_optimize.csv",
        "model_neural.json",
        "landmarks.json",
    ] {
        assert!(dir.path().join("out").join(file).exists(), "{file}");
    }
    let predictions = read(dir.path().join("out/ose_neural.csv"));
    let stdout = ok(dir.path(), &["ose", "--method", "neural", "--reuse-model"]);
    assert!(
        !stdout.contains("train="),
        "model should have been loaded: {stdout}"
    );
    assert_eq!(read(dir.path().join("out/ose_neural.csv")), predictions);

    let stdout = ok(dir.path(), &["evaluate", "--method", "optimize"]);
    assert!(stdout.contains("optimize: L=8"), "{stdout}");
}

#[test]
fn too_many_landmarks_is_rejected_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = lsmds(dir.path(), &["ose", "--landmarks", "41"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        !dir.path().join("out").exists(),
        "nothing should be written"
    );
}

#[test]
fn missing_artifacts_and_corrupt_models_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = lsmds(dir.path(), &["distmatrix"]);
    assert_eq!(out.status.code(), Some(3));

    ok(dir.path(), &["ose", "--method", "neural"]);
    std::fs::write(
        dir.path().join("out/model_neural.json"),
        "{\"version\": 1, \"lay",
    )
    .unwrap();
    let out = lsmds(dir.path(), &["ose", "--method", "neural", "--reuse-model"]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn benchmark_writes_one_row_per_cell_with_shared_landmarks() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    ok(dir.path(), &["benchmark"]);
    let csv = read(dir.path().join("out/benchmark.csv"));
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][0], "optimize");
        assert_eq!(pair[1][0], "neural");
        assert_eq!(pair[0][1], pair[1][1]);
        assert_eq!(
            pair[0][8], pair[1][8],
            "same landmark file for both methods"
        );
        assert!(pair.iter().all(|r| r[9] == "ok"));
        assert!(dir.path().join("out").join(pair[0][8]).exists());
    }

    let single = ok(
        dir.path(),
        &["benchmark", "--l-grid", "5", "--method", "optimize"],
    );
    assert!(single.contains("optimize: L=5"));
    assert_eq!(
        read(dir.path().join("out/benchmark.csv")).lines().count(),
        2
    );
}

#[test]
fn output_dir_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let elsewhere = dir.path().join("elsewhere");
    let out = Command::new(env!("CARGO_BIN_EXE_lsmds"))
        .args(["generate", "--config"])
        .arg(dir.path().join("config.json"))
        .env("LSMDS_OUTPUT_DIR", &elsewhere)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(elsewhere.join("names.txt").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn config_subcommand_prints_effective_settings() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let stdout = ok(dir.path(), &["config", "-k", "5", "--seed-nn", "42"]);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["k"], 5);
    assert_eq!(v["seeds"]["nn"], 42);
    assert_eq!(v["n_reference"], 40);
}
