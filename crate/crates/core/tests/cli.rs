use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tfim_fidelity::cli::CliError;
use tfim_fidelity::records::{read_correlations, read_dynamics, read_entropy, read_statics};
use tfim_fidelity::Error;

fn tfim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tfim"));
    cmd.env_remove("TFIM_WORKERS").env("RUST_LOG", "error");
    cmd
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, output: &Path, extra: &[&str]) -> Output {
    tfim()
        .arg("run")
        .arg(config)
        .arg("--output")
        .arg(output)
        .arg("--quiet")
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const STATICS: &str = r#"
experiment = "statics_sweep"
realizations = 8
[grids]
lengths = [100]
disorders = [0.0]
lambdas = { start = 0.5, stop = 1.5, count = 5 }
"#;

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = tfim().arg("validate").arg(&path).output().unwrap();
            assert!(out.status.success(), "{}: {}", path.display(), stderr(&out));
            count += 1;
        }
    }
    assert!(count >= 14);
}

#[test]
fn unknown_key_exits_with_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &STATICS.replace("realizations = 8", "realizations = 8\nrealisations = 9"));
    let out = tfim().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("realisations") && msg.contains("line"), "{msg}");

    let out = run(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_grid_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let body = STATICS.replace("lambdas = { start = 0.5, stop = 1.5, count = 5 }\n", "");
    let cfg = write_config(dir.path(), "bad.toml", &body);
    let out = tfim().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("grids.lambdas"));
}

#[test]
fn failure_threshold_maps_to_exit_3() {
    let e = CliError::Run(Error::TooManyFailures {
        failed: 3,
        total: 10,
        breakdown: "zero-mode overlap: 3".into(),
    });
    assert_eq!(e.exit_code(), 3);
    assert_eq!(CliError::Run(Error::EmptyOverlap).exit_code(), 1);
}

#[test]
fn clean_statics_sweep_has_unit_fidelities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "statics.toml", STATICS);
    let out_dir = dir.path().join("out");
    let out = run(&cfg, &out_dir, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_statics(&out_dir.join("statics.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row.n, 8);
        for f in [row.f_mean, row.f1_mean, row.f2_mean] {
            assert!((f.unwrap() - 1.0).abs() < 1e-12, "{row:?}");
        }
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "statics_sweep");
    assert_eq!(manifest["config"]["realizations"], 8);
    assert!(manifest["wall_seconds"].as_f64().is_some());
    assert!(manifest["version"].is_string());
}

#[test]
fn outputs_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
experiment = "statics_sweep"
realizations = 40
[grids]
lengths = [24]
disorders = [0.2]
lambdas = [0.8, 1.0]
"#;
    let cfg = write_config(dir.path(), "s.toml", body);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &a, &["--workers", "1"]).status.success());
    let out = tfim()
        .env("TFIM_WORKERS", "3")
        .args(["run", cfg.to_str().unwrap(), "--quiet", "--output", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(a.join("statics.csv")).unwrap(),
        std::fs::read(b.join("statics.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["workers"], 3);
}

#[test]
fn every_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "entropy",
            r#"
experiment = "central_charge"
realizations = 4
[grids]
lengths = [32]
disorders = [0.1]
lambdas = [1.0]
"#,
        ),
        (
            "collapse",
            r#"
experiment = "collapse"
realizations = 4
[grids]
lengths = [16, 24, 32]
disorders = [0.1]
"#,
        ),
        (
            "quench",
            r#"
experiment = "quench_zero_T"
realizations = 4
format = "jsonl"
[grids]
lengths = [12]
disorders = [0.1]
lambdas = [0.75]
times = { start = 0.0, stop = 2.0, count = 5 }
"#,
        ),
        (
            "thermal",
            r#"
experiment = "quench_thermal"
realizations = 4
[grids]
lengths = [12]
disorders = [0.1]
lambdas = [1.0]
temperatures = [1.0]
times = [0.0, 1.0]
"#,
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), &format!("{name}.toml"), body);
        let out_dir = dir.path().join(name);
        let out = run(&cfg, &out_dir, &[]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
    let entropy = read_entropy(&dir.path().join("entropy/entropy.csv")).unwrap();
    assert_eq!(entropy.len(), 31);
    let corr = read_correlations(&dir.path().join("collapse/correlations.csv")).unwrap();
    assert!(!corr.is_empty());
    let quench = read_dynamics(&dir.path().join("quench/dynamics.jsonl")).unwrap();
    assert_eq!(quench.len(), 10);
    assert!(quench.iter().all(|r| r.temperature.is_none()));
    assert!((quench[0].f_mean - 1.0).abs() < 1e-12);
    let thermal = read_dynamics(&dir.path().join("thermal/dynamics.csv")).unwrap();
    assert!(thermal.iter().all(|r| r.temperature == Some(1.0)));
}

#[test]
fn oracle_subcommand_reports_agreement() {
    let out = tfim().args(["oracle", "5", "3"]).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("global quench fidelity") && !text.contains("FAILED"), "{text}");
}

#[test]
fn oracle_experiment_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "oracle.toml",
        "experiment = \"oracle_validate\"\nrealizations = 3\n[grids]\nlengths = [6]\n",
    );
    let out_dir = dir.path().join("out");
    let out = run(&cfg, &out_dir, &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = std::fs::read_to_string(out_dir.join("oracle.csv")).unwrap();
    assert!(report.starts_with("L,check,max_deviation,tolerance,passed"));
}
