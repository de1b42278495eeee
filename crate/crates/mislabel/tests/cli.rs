//! End-to-end tests of the `mislabel` binary: exit codes, seed echoing,
//! file artifacts, and the gen -> corrupt -> train -> experiment pipeline.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mislabel::{TransitionMatrix, load_csv, load_model_csv};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mislabel")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

fn bundled_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/experiment.cfg")
}

fn gen_dataset(dir: &Path, name: &str, classes: &str, n: &str, seed: &str) {
    let out = run_in(
        dir,
        &[
            "gen", "--classes", classes, "--dim", "4", "--n", n, "--sigma", "1.0", "--seed",
            seed, "--out", name,
        ],
    );
    assert_eq!(code(&out), 0, "gen failed: {}", stderr(&out));
}

#[test]
fn gen_is_deterministic_and_echoes_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "gen", "--classes", "3", "--dim", "4", "--n", "50", "--sigma", "1.0", "--seed",
            "7", "--out", "a.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("seed=7"), "stdout: {text}");
    assert!(text.contains("n=50"), "stdout: {text}");

    let ds = load_csv(dir.path().join("a.csv")).unwrap();
    assert_eq!(ds.n_examples(), 50);
    assert_eq!(ds.dim(), 4);
    assert_eq!(ds.class_count(), 3);

    let out2 = run_in(
        dir.path(),
        &[
            "gen", "--classes", "3", "--dim", "4", "--n", "50", "--sigma", "1.0", "--seed",
            "7", "--out", "b.csv",
        ],
    );
    assert_eq!(code(&out2), 0);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "same flags must write identical files");
}

#[test]
fn gen_missing_out_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--classes", "3", "--dim", "4", "--n", "50"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn corrupt_zero_rate_is_a_no_op_on_labels() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "clean.csv", "3", "80", "1");
    let out = run_in(
        dir.path(),
        &[
            "corrupt", "--in", "clean.csv", "--noise", "symmetric", "--rate", "0.0", "--seed",
            "1", "--out", "noisy.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("seed=1"));
    let clean = load_csv(dir.path().join("clean.csv")).unwrap();
    let noisy = load_csv(dir.path().join("noisy.csv")).unwrap();
    assert_eq!(clean.labels(), noisy.labels());
    assert_eq!(clean.features(), noisy.features());
}

#[test]
fn corrupt_rejects_out_of_range_rates() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "clean.csv", "3", "20", "1");
    for (noise, rate) in [
        ("pairflip", "--rate=0.5"),
        ("symmetric", "--rate=1.0"),
        ("symmetric", "--rate=-0.1"),
    ] {
        let out = run_in(
            dir.path(),
            &["corrupt", "--in", "clean.csv", "--noise", noise, rate, "--out", "noisy.csv"],
        );
        assert_eq!(code(&out), 2, "{noise} {rate} must be a usage error");
        assert!(stderr(&out).contains("rate"), "{}", stderr(&out));
    }
}

#[test]
fn corrupt_missing_input_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "corrupt", "--in", "missing.csv", "--noise", "symmetric", "--rate", "0.2", "--out",
            "noisy.csv",
        ],
    );
    assert_eq!(code(&out), 1);
}

#[test]
fn corrupt_writes_the_applied_transition_matrix() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "clean.csv", "3", "200", "2");
    let out = run_in(
        dir.path(),
        &[
            "corrupt", "--in", "clean.csv", "--noise", "symmetric", "--rate", "0.4", "--seed",
            "2", "--out", "noisy.csv", "--t-out", "t.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let t = TransitionMatrix::from_csv(dir.path().join("t.csv")).unwrap();
    assert_eq!(t, TransitionMatrix::symmetric(3, 0.4).unwrap());
}

#[test]
fn train_with_identity_t_matches_mode_none() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "train.csv", "3", "300", "3");
    TransitionMatrix::identity(3)
        .unwrap()
        .to_csv(dir.path().join("t.csv"))
        .unwrap();

    for (mode, model, metrics) in [
        ("paper-m", "m1.csv", "x1.json"),
        ("none", "m2.csv", "x2.json"),
    ] {
        let out = run_in(
            dir.path(),
            &[
                "train", "--train", "train.csv", "--t", "t.csv", "--mode", mode,
                "--out-model", model, "--out-metrics", metrics,
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(stdout(&out).contains("seed=0"));
    }
    let (m1, meta1) = load_model_csv(dir.path().join("m1.csv")).unwrap();
    let (m2, meta2) = load_model_csv(dir.path().join("m2.csv")).unwrap();
    assert_eq!(meta1.mode, "paper-m");
    assert_eq!(meta2.mode, "none");
    let worst = (m1.weights() - m2.weights())
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(
        worst <= 1e-12,
        "identity-matrix correction must not move the model, worst gap {worst:.3e}"
    );
}

#[test]
fn train_missing_t_with_correction_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "train.csv", "3", "50", "3");
    let out = run_in(
        dir.path(),
        &[
            "train", "--train", "train.csv", "--mode", "paper-m", "--out-model", "m.csv",
            "--out-metrics", "x.json",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--t"), "{}", stderr(&out));
}

#[test]
fn train_class_count_mismatch_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "train.csv", "4", "100", "4");
    TransitionMatrix::symmetric(3, 0.2)
        .unwrap()
        .to_csv(dir.path().join("t.csv"))
        .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "train", "--train", "train.csv", "--t", "t.csv", "--mode", "direct-t",
            "--out-model", "m.csv", "--out-metrics", "x.json",
        ],
    );
    assert_eq!(code(&out), 1, "{}", stderr(&out));
}

#[test]
fn train_solvers_report_matching_objectives() {
    let dir = tempfile::tempdir().unwrap();
    gen_dataset(dir.path(), "clean.csv", "3", "512", "5");
    let out = run_in(
        dir.path(),
        &[
            "corrupt", "--in", "clean.csv", "--noise", "symmetric", "--rate", "0.3", "--seed",
            "5", "--out", "noisy.csv", "--t-out", "t.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut objectives = Vec::new();
    for (solver, model, metrics) in [
        ("closed", "mc.csv", "xc.json"),
        ("iterative", "mi.csv", "xi.json"),
    ] {
        let out = run_in(
            dir.path(),
            &[
                "train", "--train", "noisy.csv", "--t", "t.csv", "--mode", "direct-t",
                "--solver", solver, "--seed", "5", "--test", "clean.csv", "--out-model",
                model, "--out-metrics", metrics,
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(metrics)).unwrap())
                .unwrap();
        assert_eq!(parsed["solver"].as_str().unwrap(), solver);
        assert_eq!(parsed["mode"].as_str().unwrap(), "direct-t");
        assert!(parsed["priors"].is_array());
        assert!(parsed["test_accuracy"].as_f64().unwrap() > 0.5);
        objectives.push(parsed["objective"].as_f64().unwrap());
    }
    let gap = (objectives[0] - objectives[1]).abs();
    assert!(gap <= 1e-4, "solver objectives differ by {gap:.3e}");
}

#[test]
fn experiment_runs_the_bundled_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = bundled_config();
    let out = run_in(
        dir.path(),
        &["experiment", "--config", config.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("seed=7"), "{}", stdout(&out));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let arms = report["arms"].as_array().unwrap();
    assert_eq!(arms.len(), 4);
    for arm in arms {
        assert_eq!(arm["trials"].as_array().unwrap().len(), 5);
    }
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 5);
}

#[test]
fn experiment_single_trial_has_zero_std() {
    let dir = tempfile::tempdir().unwrap();
    let config = bundled_config();
    let out = run_in(
        dir.path(),
        &[
            "experiment", "--config", config.to_str().unwrap(), "--trials", "1",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    for arm in report["arms"].as_array().unwrap() {
        assert_eq!(arm["std"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn experiment_reruns_are_byte_identical_except_timing() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config = bundled_config();
    for dir in [dir_a.path(), dir_b.path()] {
        let out = run_in(
            dir,
            &[
                "experiment", "--config", config.to_str().unwrap(), "--trials", "2",
            ],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let csv_a = std::fs::read(dir_a.path().join("report.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.path().join("report.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "CSV reports must be byte-identical");

    let strip = |dir: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap())
                .unwrap();
        v.as_object_mut().unwrap().remove("timing");
        serde_json::to_string_pretty(&v).unwrap()
    };
    assert_eq!(
        strip(dir_a.path()),
        strip(dir_b.path()),
        "JSON reports must agree once timing is stripped"
    );
}

#[test]
fn experiment_rejects_bad_configs_and_flag_values() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(
        &bad,
        "source = synthetic\nclasses = 3\ndim = 2\nn = 100\nnoise = symmetric\nrate = 0.2\nbogus = 1\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["experiment", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));

    let out = run_in(
        dir.path(),
        &[
            "experiment", "--config", bundled_config().to_str().unwrap(), "--trials", "0",
        ],
    );
    assert_eq!(code(&out), 2);
}
