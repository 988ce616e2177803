use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SUBCOMMANDS: [&str; 9] = [
    "ingest",
    "threshold",
    "analyze",
    "dataset",
    "train",
    "experiment",
    "stats",
    "lint",
    "synth",
];

fn mlinter(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlinter"))
        .current_dir(dir)
        .env_remove("MLINTER_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mlinter(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, text).unwrap();
}

/// Synthetic corpus taken through dataset with pools for eqeqeq and semi.
fn prepared() -> TempDir {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth",
            "--out",
            "src",
            "--files",
            "60",
            "--lines",
            "100",
            "--rate",
            "0.05",
            "--rules",
            "eqeqeq,semi",
            "--seed",
            "5",
        ],
    );
    ok(d, &["ingest", "--root", "src"]);
    ok(d, &["threshold"]);
    ok(d, &["analyze", "--rules", "eqeqeq,semi"]);
    ok(d, &["dataset", "--min-examples", "100"]);
    tmp
}

fn train_eqeqeq(d: &Path) {
    ok(
        d,
        &["train", "--rules", "eqeqeq", "--size", "M", "--seed", "1"],
    );
}

#[test]
fn ingest_counts_lines_and_skips_minified() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(&d.join("p/a.js"), "let a = 1;\nlet b = 2;\n");
    write(&d.join("p/lib/b.js"), "x();\n");
    write(&d.join("p/c.min.js"), "minified();\n");
    write(&d.join("p/d.ts"), "let t: number = 1;\n");
    let out = ok(d, &["ingest", "--root", "p"]);
    assert!(out.contains("2 files, 3 lines"), "{out}");
    let corpus = fs::read_to_string(d.join("mlinter-work/corpus.jsonl")).unwrap();
    assert_eq!(corpus.lines().count(), 3);
    assert!(d.join("mlinter-work/manifests/ingest.json").exists());
}

#[test]
fn ingest_missing_root_fails() {
    let tmp = TempDir::new().unwrap();
    let out = mlinter(tmp.path(), &["ingest", "--root", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nowhere"));
}

#[test]
fn ingest_output_is_repeatable() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth", "--out", "src", "--files", "12", "--lines", "20", "--seed", "2",
        ],
    );
    ok(d, &["ingest", "--root", "src", "--out", "a"]);
    ok(d, &["ingest", "--root", "src", "--out", "b"]);
    assert_eq!(
        fs::read(d.join("a/corpus.jsonl")).unwrap(),
        fs::read(d.join("b/corpus.jsonl")).unwrap()
    );
}

#[test]
fn threshold_of_uniform_lines_is_their_length() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    let line = format!("x = {};", "1".repeat(35));
    assert_eq!(line.len(), 40);
    for i in 0..20 {
        write(
            &d.join(format!("p/f{i}.js")),
            &format!("{line}\n{line}\n{line}\n"),
        );
    }
    ok(d, &["ingest", "--root", "p"]);
    let out = ok(d, &["threshold"]);
    assert!(out.contains("sample size: 385"), "{out}");
    assert!(out.contains("threshold: 40"), "{out}");
}

#[test]
fn missing_artifact_is_named() {
    let tmp = TempDir::new().unwrap();
    let out = mlinter(tmp.path(), &["analyze"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("corpus.jsonl"), "{}", stderr(&out));
}

#[test]
fn experiment_writes_one_line_per_run_and_stats_summarizes() {
    let tmp = prepared();
    let d = tmp.path();
    ok(
        d,
        &[
            "experiment",
            "--sizes",
            "S,M",
            "--ratios",
            "VF,VFE",
            "--reps",
            "2",
            "--seed",
            "3",
        ],
    );
    let results = fs::read_to_string(d.join("mlinter-work/results.jsonl")).unwrap();
    assert_eq!(results.lines().count(), 2 * 2 * 2 * 2);
    let summary = ok(d, &["stats"]);
    assert!(summary.contains("S/VF"), "{summary}");
    assert!(d.join("mlinter-work/report").is_dir());
    assert!(d.join("mlinter-work/manifests/experiment.json").exists());
}

#[test]
fn experiment_output_does_not_depend_on_thread_count() {
    let tmp = prepared();
    let d = tmp.path();
    let args = [
        "experiment",
        "--rules",
        "eqeqeq",
        "--sizes",
        "S",
        "--reps",
        "3",
        "--seed",
        "4",
    ];
    ok(d, &[&args[..], &["--jobs", "1"]].concat());
    let one = fs::read(d.join("mlinter-work/results.jsonl")).unwrap();
    ok(d, &[&args[..], &["--jobs", "3"]].concat());
    let three = fs::read(d.join("mlinter-work/results.jsonl")).unwrap();
    assert_eq!(one, three);
}

#[test]
fn stats_on_empty_results_fails() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(&d.join("mlinter-work/results.jsonl"), "");
    let out = mlinter(d, &["stats"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lint_exit_codes() {
    let tmp = prepared();
    let d = tmp.path();
    train_eqeqeq(d);
    write(&d.join("clean.js"), "let a = 1;\n");
    write(&d.join("bad.js"), "if (a == b) {\n  go();\n}\n");
    write(&d.join("empty.js"), "");

    let clean = mlinter(d, &["lint", "clean.js"]);
    assert_eq!(clean.status.code(), Some(0), "{}", stderr(&clean));
    assert!(clean.stdout.is_empty());

    let bad = mlinter(d, &["lint", "bad.js"]);
    assert_eq!(bad.status.code(), Some(2));
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.starts_with("bad.js:1: [eqeqeq] warning ("), "{text}");

    let empty = mlinter(d, &["lint", "empty.js"]);
    assert_eq!(empty.status.code(), Some(0));
    assert!(empty.stdout.is_empty());

    assert_eq!(mlinter(d, &["lint", "absent.js"]).status.code(), Some(1));
    let bad_model = mlinter(d, &["lint", "--model", "absent.json", "clean.js"]);
    assert_eq!(bad_model.status.code(), Some(1));
    assert!(stderr(&bad_model).contains("absent.json"));
}

#[test]
fn lint_orders_by_file_line_and_rule() {
    let tmp = prepared();
    let d = tmp.path();
    ok(d, &["train", "--size", "M", "--seed", "1"]);
    write(
        &d.join("b.js"),
        "if (a == b) {\n  go()\n}\nlet x = y != z\n",
    );
    write(&d.join("a.js"), "let q = r == s\n");
    let out = mlinter(d, &["lint", "b.js", "a.js"]);
    assert_eq!(out.status.code(), Some(2));
    let keys: Vec<(String, u32, String)> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let (path, rest) = l.split_once(':').unwrap();
            let (line, rest) = rest.split_once(':').unwrap();
            let rule = rest.split('[').nth(1).unwrap().split(']').next().unwrap();
            (path.to_string(), line.parse().unwrap(), rule.to_string())
        })
        .collect();
    assert!(!keys.is_empty());
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(keys[0].0, "a.js");
}

#[test]
fn every_command_has_help() {
    let tmp = TempDir::new().unwrap();
    for cmd in SUBCOMMANDS {
        let out = mlinter(tmp.path(), &[cmd, "--help"]);
        assert!(out.status.success(), "{cmd}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("Usage: mlinter"), "{cmd}: {text}");
    }
    let out = mlinter(tmp.path(), &["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in SUBCOMMANDS {
        assert!(text.contains(cmd), "{cmd} missing from top-level help");
    }
}

#[test]
fn usage_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(mlinter(tmp.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        mlinter(tmp.path(), &["threshold", "--quantile", "lots"])
            .status
            .code(),
        Some(1)
    );
}

fn manifest_seed(d: &Path, dir: &str) -> u64 {
    let path: PathBuf = d.join(dir).join("manifests/threshold.json");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["master_seed"].as_u64().unwrap()
}

#[test]
fn seed_comes_from_flag_then_config_then_environment() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth", "--out", "src", "--files", "5", "--lines", "10", "--seed", "1",
        ],
    );
    ok(d, &["ingest", "--root", "src"]);
    write(
        &d.join("run.toml"),
        "seed = 21\n[threshold]\nquantile = 0.5\n",
    );

    ok(d, &["threshold"]);
    assert_eq!(manifest_seed(d, "mlinter-work"), 0);

    let env = Command::new(env!("CARGO_BIN_EXE_mlinter"))
        .current_dir(d)
        .env("MLINTER_SEED", "77")
        .arg("threshold")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(manifest_seed(d, "mlinter-work"), 77);

    ok(d, &["threshold", "--config", "run.toml"]);
    assert_eq!(manifest_seed(d, "mlinter-work"), 21);
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("mlinter-work/threshold.json")).unwrap())
            .unwrap();
    assert_eq!(record["quantile"], 0.5);

    ok(
        d,
        &[
            "threshold",
            "--config",
            "run.toml",
            "--seed",
            "5",
            "--quantile",
            "0.9",
        ],
    );
    assert_eq!(manifest_seed(d, "mlinter-work"), 5);
    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("mlinter-work/threshold.json")).unwrap())
            .unwrap();
    assert_eq!(record["quantile"], 0.9);
}

#[test]
fn bad_config_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let d = tmp.path();
    write(&d.join("bad.toml"), "sede = 1\n");
    let out = mlinter(d, &["--config", "bad.toml", "synth", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.toml"));
}
