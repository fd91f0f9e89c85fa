use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn triage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = triage(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small synthetic corpus: (dir, train path, test path).
fn corpus() -> (TempDir, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    ok(&[
        "gen-synthetic",
        "--out-dir",
        s(&data),
        "--train-size",
        "400",
        "--test-size",
        "120",
        "--seed",
        "3",
    ]);
    (dir, data.join("train.jsonl"), data.join("test.jsonl"))
}

fn train(train: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec!["train", "--train", s(train), "--out-dir", s(out)];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn same_config_and_seed_give_identical_model_files() {
    let (dir, tr, _) = corpus();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    train(&tr, &a, &["--preset", "full", "--seed", "11"]);
    train(&tr, &b, &["--preset", "full", "--seed", "11"]);
    let ma = fs::read(a.join("model.json")).unwrap();
    assert_eq!(ma, fs::read(b.join("model.json")).unwrap());

    // Retraining from the emitted config reproduces the model too.
    let c = dir.path().join("c");
    ok(&[
        "train",
        "--config",
        s(&a.join("run_config.toml")),
        "--out-dir",
        s(&c),
    ]);
    assert_eq!(ma, fs::read(c.join("model.json")).unwrap());
}

#[test]
fn train_log_records_hyperparameters() {
    let (dir, tr, _) = corpus();
    let out = dir.path().join("run");
    train(
        &tr,
        &out,
        &["--preset", "tfidf-lexicons-negation", "--c", "10"],
    );
    let log: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("train_log.json")).unwrap()).unwrap();
    let h = &log["hyperparameters"];
    assert_eq!(h["C"], 10.0);
    assert_eq!(h["penalty"], "l1");
    assert_eq!(h["max_iterations"], 2000);
    assert_eq!(log["train_posts"], 400);
    assert_eq!(log["features"]["negation"], true);
    assert!(out.join("run_config.toml").exists());
}

#[test]
fn grid_search_is_logged() {
    let (dir, tr, _) = corpus();
    let out = dir.path().join("run");
    train(
        &tr,
        &out,
        &[
            "--preset",
            "only-lexicons",
            "--estimator",
            "knn",
            "--grid",
            "--k-folds",
            "3",
        ],
    );
    let log: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("train_log.json")).unwrap()).unwrap();
    assert_eq!(log["search"]["cells"].as_array().unwrap().len(), 25);
    assert!(log["search"]["best_score"].as_f64().is_some());
}

#[test]
fn missing_lexicon_file_names_the_manifest_entry() {
    let (dir, tr, _) = corpus();
    let manifest = dir.path().join("manifest.toml");
    fs::write(
        &manifest,
        "[[lexicon]]\nname = \"feelings\"\npath = \"nowhere/feelings.tsv\"\n",
    )
    .unwrap();
    let out = triage(&[
        "train",
        "--train",
        s(&tr),
        "--lexicons",
        s(&manifest),
        "--out-dir",
        s(&dir.path().join("run")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"feelings\""), "{err}");
}

#[test]
fn eval_reports_metrics_in_unit_interval() {
    let (dir, tr, te) = corpus();
    let out = dir.path().join("run");
    train(&tr, &out, &["--preset", "tfidf-lexicons"]);
    let stdout = ok(&["eval", "--test", s(&te), "--out-dir", s(&out)]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    for line in lines {
        let v: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&v), "{line}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["support"].as_array().unwrap().len(), 4);
    let confusion = fs::read_to_string(out.join("confusion.tsv")).unwrap();
    assert_eq!(confusion.lines().count(), 5);
}

#[test]
fn perfect_classifier_scores_one() {
    // 1-nearest-neighbor evaluated on its own training posts.
    let (dir, tr, _) = corpus();
    let out = dir.path().join("run");
    train(
        &tr,
        &out,
        &[
            "--preset",
            "tfidf-lexicons",
            "--estimator",
            "knn",
            "--k",
            "1",
        ],
    );
    let stdout = ok(&["eval", "--test", s(&tr), "--out-dir", s(&out)]);
    for line in stdout.lines() {
        assert!(line.ends_with("\t1.0000"), "{line}");
    }
}

#[test]
fn eval_with_other_lexicons_is_a_fingerprint_error() {
    let (dir, tr, te) = corpus();
    let out = dir.path().join("run");
    train(&tr, &out, &["--preset", "tfidf-lexicons"]);

    let lex = dir.path().join("lex");
    fs::create_dir_all(&lex).unwrap();
    fs::write(lex.join("mood.tsv"), "sad\tnegative\nhappy\tpositive\n").unwrap();
    fs::write(
        lex.join("manifest.toml"),
        "[[lexicon]]\nname = \"mood\"\npath = \"mood.tsv\"\n",
    )
    .unwrap();
    let res = triage(&[
        "eval",
        "--test",
        s(&te),
        "--out-dir",
        s(&out),
        "--lexicons",
        s(&lex.join("manifest.toml")),
    ]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("fingerprint"), "{err}");
}

#[test]
fn predict_keeps_input_order_and_handles_empty_bodies() {
    let (dir, tr, _) = corpus();
    let out = dir.path().join("run");
    train(&tr, &out, &["--preset", "full"]);
    let input = dir.path().join("new.jsonl");
    fs::write(
        &input,
        concat!(
            "{\"post_id\":\"z9\",\"body\":\"thanks everyone, lovely weekend in the garden\"}\n",
            "{\"post_id\":\"a1\",\"body\":\"\"}\n",
            "{\"post_id\":\"m5\",\"author_rank\":\"Member\",\"body\":\"goodbye, I have the pills tonight\"}\n",
        ),
    )
    .unwrap();
    let stdout = ok(&[
        "predict",
        "--model",
        s(&out.join("model.json")),
        "--input",
        s(&input),
    ]);
    let lines: Vec<Vec<&str>> = stdout.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0][..2], ["post_id", "label"]);
    let ids: Vec<&str> = lines[1..].iter().map(|l| l[0]).collect();
    assert_eq!(ids, ["z9", "a1", "m5"]);
    for l in &lines[1..] {
        assert_eq!(l.len(), 6);
        for score in &l[2..] {
            assert!(score.parse::<f64>().unwrap().is_finite());
        }
    }

    // With an output directory the records go to predictions.tsv.
    let pred_dir = dir.path().join("pred");
    ok(&[
        "predict",
        "--model",
        s(&out.join("model.json")),
        "--input",
        s(&input),
        "--out-dir",
        s(&pred_dir),
    ]);
    assert_eq!(
        fs::read_to_string(pred_dir.join("predictions.tsv")).unwrap(),
        stdout
    );
}

#[test]
fn ablate_rows_subset_and_full_table() {
    let (dir, tr, te) = corpus();
    let one = dir.path().join("one");
    let stdout = ok(&[
        "ablate",
        "--train",
        s(&tr),
        "--test",
        s(&te),
        "--rows",
        "only-lexicons",
        "--out-dir",
        s(&one),
    ]);
    assert_eq!(stdout.lines().count(), 2);
    assert_eq!(
        fs::read_to_string(one.join("ablation.jsonl"))
            .unwrap()
            .lines()
            .count(),
        1
    );

    let all = dir.path().join("all");
    let stdout = ok(&[
        "ablate",
        "--train",
        s(&tr),
        "--test",
        s(&te),
        "--out-dir",
        s(&all),
    ]);
    assert_eq!(stdout.lines().count(), 6);
}

#[test]
fn flags_override_the_config_file() {
    let (dir, tr, _) = corpus();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "seed = 5\npreset = \"only-lexicons\"\n[training.svm]\nC = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    train(&tr, &out, &["--config", s(&cfg), "--seed", "9"]);
    let written = fs::read_to_string(out.join("run_config.toml")).unwrap();
    assert!(written.contains("seed = 9"), "{written}");
    assert!(written.contains("preset = \"only-lexicons\""));
    assert!(written.contains("C = 0.5"));
}

#[test]
fn user_errors_exit_with_status_two() {
    let dir = TempDir::new().unwrap();
    let out = triage(&["train", "--preset", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = triage(&["train", "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--train"));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "colour = 3\n").unwrap();
    let out = triage(&["train", "--config", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stats_prints_label_counts() {
    let (_dir, tr, _) = corpus();
    let stdout = ok(&["stats", s(&tr)]);
    assert!(stdout.contains("total"));
    assert!(stdout.lines().any(|l| l.starts_with("crisis")));
}
