//! End-to-end tests of the `attnfts` binary: pipeline smoke, exit-code
//! contract, and byte-level determinism of file outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_attnfts")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    // Keep runs hermetic with respect to the seed override.
    cmd.env_remove("ATTNFTS_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn synth_csv(dir: &Path) -> PathBuf {
    let spec = dir.join("spec.json");
    write(
        &spec,
        r#"{ "kind": "sine", "length": 160, "noise_std": 0.3, "seed": 7 }"#,
    );
    let csv = dir.join("prices.csv");
    let out = run(
        &["synth", "--spec", spec.to_str().unwrap(), "--out", csv.to_str().unwrap()],
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    csv
}

fn base_config(dir: &Path, csv: &Path, out_dir: &str) -> serde_json::Value {
    serde_json::json!({
        "schema_version": 1,
        "seed": 99,
        "output_dir": dir.join(out_dir),
        "data": { "csv": { "path": csv } },
        "model": { "variant": "plain", "size": 6, "lag": 5, "dropout": 0.0 },
        "train": { "max_epochs": 4 },
        "plan": { "kind": "fixed_origin", "train_frac": 0.8 }
    })
}

#[test]
fn synth_train_evaluate_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());
    assert!(csv.exists());
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with("date,close\n"));

    let config_path = dir.path().join("run.json");
    write(
        &config_path,
        &serde_json::to_string_pretty(&base_config(dir.path(), &csv, "out")).unwrap(),
    );

    let out = run(&["train", "--config", config_path.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/checkpoint.json").exists());
    let history = std::fs::read_to_string(dir.path().join("out/loss_history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_loss,val_loss\n"));
    assert_eq!(history.lines().count(), 5); // header + 4 epochs

    let out = run(&["evaluate", "--config", config_path.to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/eval_report.json").exists());
    assert!(dir.path().join("out/eval_report.csv").exists());

    let out = run(&["report", "--in", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("source,series,variant,detail,val_loss,up_down_accuracy\n"));
    assert!(summary.contains("plain"));
}

#[test]
fn unknown_config_key_exits_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.json");
    write(
        &config_path,
        r#"{
            "schema_version": 1,
            "output_dir": "out",
            "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.0, "seed": 1 } },
            "modle": { "variant": "plain", "size": 4, "lag": 3, "dropout": 0.0 }
        }"#,
    );
    let out = run(&["evaluate", "--config", config_path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("modle"), "{stderr}");
}

#[test]
fn too_short_series_exits_2_with_minimum_length() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("short.json");
    let config = serde_json::json!({
        "schema_version": 1,
        "output_dir": dir.path().join("out"),
        "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.1, "seed": 2 } },
        "model": { "variant": "plain", "size": 4, "lag": 5, "dropout": 0.0 },
        "plan": { "kind": "rolling_window", "train_len": 100, "val_len": 20, "stride": 10 }
    });
    write(&config_path, &serde_json::to_string(&config).unwrap());
    let out = run(&["evaluate", "--config", config_path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("minimum length is 120"), "{stderr}");
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["frobnicate"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["evaluate"], &[]); // missing --config
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("gridsearch"));
}

#[test]
fn all_cells_failing_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("grid.json");
    // Every lag exceeds what the training segment can support.
    let config = serde_json::json!({
        "schema_version": 1,
        "output_dir": dir.path().join("out"),
        "data": { "synthetic": { "kind": "sine", "length": 80, "noise_std": 0.1, "seed": 2 } },
        "train": { "max_epochs": 2 },
        "grid": { "variant": "plain", "sizes": [4], "lags": [70, 75], "dropouts": [0.0] }
    });
    write(&config_path, &serde_json::to_string(&config).unwrap());
    let out = run(&["gridsearch", "--config", config_path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("every grid cell failed"));
}

#[test]
fn evaluate_outputs_are_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());

    for (out_dir, jobs) in [("a", "1"), ("b", "3"), ("c", "1")] {
        let config_path = dir.path().join(format!("{out_dir}.json"));
        write(
            &config_path,
            &serde_json::to_string(&base_config(dir.path(), &csv, out_dir)).unwrap(),
        );
        let out = run(
            &["evaluate", "--jobs", jobs, "--config", config_path.to_str().unwrap()],
            &[],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a/eval_report.json")).unwrap();
    let b = std::fs::read(dir.path().join("b/eval_report.json")).unwrap();
    let c = std::fs::read(dir.path().join("c/eval_report.json")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn seed_env_var_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());

    // Config seed 99 with env override 1234 must differ from plain seed 99,
    // and must equal a config whose seed is 1234.
    let mut with_env = base_config(dir.path(), &csv, "env");
    with_env["seed"] = serde_json::json!(99);
    let env_path = dir.path().join("env.json");
    write(&env_path, &serde_json::to_string(&with_env).unwrap());
    let out = run(
        &["evaluate", "--config", env_path.to_str().unwrap()],
        &[("ATTNFTS_SEED", "1234")],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut plain = base_config(dir.path(), &csv, "plain");
    plain["seed"] = serde_json::json!(1234);
    let plain_path = dir.path().join("plain.json");
    write(&plain_path, &serde_json::to_string(&plain).unwrap());
    let out = run(&["evaluate", "--config", plain_path.to_str().unwrap()], &[]);
    assert!(out.status.success());

    let env_csv = std::fs::read_to_string(dir.path().join("env/eval_report.csv")).unwrap();
    let plain_csv = std::fs::read_to_string(dir.path().join("plain/eval_report.csv")).unwrap();
    assert_eq!(env_csv, plain_csv);

    let out = run(
        &["evaluate", "--config", env_path.to_str().unwrap()],
        &[("ATTNFTS_SEED", "not-a-number")],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checkpoints_reload_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = synth_csv(dir.path());
    let config_path = dir.path().join("run.json");
    write(
        &config_path,
        &serde_json::to_string(&base_config(dir.path(), &csv, "out")).unwrap(),
    );
    let out = run(&["train", "--config", config_path.to_str().unwrap()], &[]);
    assert!(out.status.success());

    let model = attnfts::Model::load_from_path(dir.path().join("out/checkpoint.json")).unwrap();
    assert_eq!(model.config.size, 6);
    let window = attnfts::Matrix::from_vec(5, 1, vec![0.1, -0.2, 0.3, 0.0, 0.05]).unwrap();
    let pred = model.predict(&window).unwrap();
    assert!(pred.value.abs() <= 1.0);
}
