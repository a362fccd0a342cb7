//! Wiring tests for the binary: flag plumbing, the exit-code contract
//! (0 ok, 1 usage, 2 data) and output routing. The numbered acceptance
//! tests cover the substance; these cover the seams.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pulsemine"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Ingested store in a tempdir, for tests that need real documents.
fn populated_store(dir: &Path) -> PathBuf {
    let store = dir.join("db");
    let out = run(&[
        "ingest",
        "--source",
        path_str(&fixture("uber_tweets.jsonl")),
        "--heuristics",
        path_str(&fixture("heuristics.json")),
        "--store",
        path_str(&store),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    store
}

fn classified_store(dir: &Path) -> (PathBuf, PathBuf) {
    let store = populated_store(dir);
    let out = run(&[
        "classify",
        "--method",
        "lexicon",
        "--lexicon",
        path_str(&fixture("lexicon.tsv")),
        "--store",
        path_str(&store),
        "--kb",
        path_str(&fixture("kb.json")),
        "--entity",
        "uber",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let annotations = store.join("annotations.jsonl");
    (store, annotations)
}

#[test]
fn help_exits_zero_and_prints_usage() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"), "help text: {text}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["--bogus"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["ingest"])), 1, "missing required flags");
}

#[test]
fn missing_input_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ingest",
        "--source",
        "/nonexistent/tweets.jsonl",
        "--heuristics",
        path_str(&fixture("heuristics.json")),
        "--store",
        path_str(&dir.path().join("db")),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty(), "data errors should be explained on stderr");
}

#[test]
fn unknown_classify_method_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let out = run(&[
        "classify",
        "--method",
        "astrology",
        "--store",
        path_str(&store),
        "--kb",
        path_str(&fixture("kb.json")),
        "--entity",
        "uber",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn method_without_its_inputs_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let kb = fixture("kb.json");
    let base = [
        "classify",
        "--store",
        path_str(&store),
        "--kb",
        path_str(&kb),
        "--entity",
        "uber",
    ];
    let mut lexicon_args = vec!["--method", "lexicon"];
    lexicon_args.extend_from_slice(&base[1..]);
    let mut all = vec![base[0]];
    all.extend_from_slice(&lexicon_args);
    assert_eq!(code(&run(&all)), 1, "lexicon method needs --lexicon");

    let mut classifier_args: Vec<&str> = vec!["classify", "--method", "classifier"];
    classifier_args.extend_from_slice(&base[1..]);
    assert_eq!(code(&run(&classifier_args)), 1, "classifier method needs --model");
}

#[test]
fn bad_report_enums_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let kb = fixture("kb.json");
    let base = |rest: &[&str]| -> i32 {
        let mut args = vec![
            "report",
            "volume",
            "--store",
            path_str(&store),
            "--kb",
            path_str(&kb),
            "--entity",
            "uber",
        ];
        args.extend_from_slice(rest);
        code(&run(&args))
    };
    assert_eq!(base(&["--bucket", "fortnight"]), 1);
    assert_eq!(base(&["--format", "xlsx"]), 1);
}

#[test]
fn unsupported_report_format_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let (store, annotations) = classified_store(dir.path());
    let out = run(&[
        "report",
        "delta",
        "--store",
        path_str(&store),
        "--annotations",
        path_str(&annotations),
        "--before-from",
        "2016-04-28T00:00:00Z",
        "--before-to",
        "2016-04-28T23:59:59Z",
        "--after-from",
        "2016-04-30T00:00:00Z",
        "--after-to",
        "2016-04-30T23:59:59Z",
        "--format",
        "svg",
    ]);
    assert_eq!(code(&out), 1, "delta has no svg rendering");
}

#[test]
fn window_flag_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (store, annotations) = classified_store(dir.path());
    let shares = |from: &str, to: Option<&str>| -> i32 {
        let mut args = vec![
            "report",
            "shares",
            "--store",
            path_str(&store),
            "--annotations",
            path_str(&annotations),
            "--from",
            from,
        ];
        if let Some(to) = to {
            args.push("--to");
            args.push(to);
        }
        code(&run(&args))
    };
    assert_eq!(
        shares("2016-04-30T00:00:00Z", Some("2016-04-28T00:00:00Z")),
        1,
        "window end before start"
    );
    assert_eq!(shares("2016-04-28T00:00:00Z", None), 1, "--from without --to");
    assert_eq!(shares("yesterday-ish", Some("2016-04-28T00:00:00Z")), 1, "unparseable instant");
}

#[test]
fn empty_window_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (store, annotations) = classified_store(dir.path());
    let out = run(&[
        "report",
        "shares",
        "--store",
        path_str(&store),
        "--annotations",
        path_str(&annotations),
        "--from",
        "2019-01-01T00:00:00Z",
        "--to",
        "2019-01-02T00:00:00Z",
    ]);
    assert_eq!(code(&out), 2, "no documents in range is a data problem");
}

#[test]
fn unknown_entity_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let out = run(&[
        "report",
        "volume",
        "--store",
        path_str(&store),
        "--kb",
        path_str(&fixture("kb.json")),
        "--entity",
        "lyft",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn annotation_for_unknown_document_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (store, annotations) = classified_store(dir.path());
    let mut text = std::fs::read_to_string(&annotations).unwrap();
    text.push_str(
        "{\"doc_id\":\"ghost\",\"label\":\"positive\",\"probs\":[1.0,0.0,0.0],\"method\":\"lexicon\"}\n",
    );
    std::fs::write(&annotations, text).unwrap();
    let out = run(&[
        "report",
        "shares",
        "--store",
        path_str(&store),
        "--annotations",
        path_str(&annotations),
        "--from",
        "2016-04-28T00:00:00Z",
        "--to",
        "2016-04-28T23:59:59Z",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn corrupt_store_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let documents = store.join("documents.jsonl");
    let mut text = std::fs::read_to_string(&documents).unwrap();
    text.push_str("this is not json\n");
    std::fs::write(&documents, text).unwrap();
    let out = run(&[
        "report",
        "volume",
        "--store",
        path_str(&store),
        "--kb",
        path_str(&fixture("kb.json")),
        "--entity",
        "uber",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn classify_writes_annotations_into_the_store_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let (store, annotations) = classified_store(dir.path());
    assert!(annotations.exists());
    assert_eq!(annotations.parent().unwrap(), store);
    let first = std::fs::read_to_string(&annotations).unwrap();
    assert_eq!(first.lines().count(), 427);
}

#[test]
fn report_out_file_matches_stdout_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let store = populated_store(dir.path());
    let kb = fixture("kb.json");
    let base = [
        "report",
        "volume",
        "--store",
        path_str(&store),
        "--kb",
        path_str(&kb),
        "--entity",
        "uber",
        "--format",
        "csv",
    ];
    let stdout_run = run(&base);
    assert_eq!(code(&stdout_run), 0);

    let out_path = dir.path().join("volume.csv");
    let mut with_out = base.to_vec();
    with_out.push("--out");
    with_out.push(path_str(&out_path));
    let file_run = run(&with_out);
    assert_eq!(code(&file_run), 0);
    assert!(file_run.stdout.is_empty(), "--out should silence stdout");
    assert_eq!(std::fs::read(&out_path).unwrap(), stdout_run.stdout);
}

#[test]
fn ingest_keeps_stdout_clean_and_dedups_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("db");
    let source = fixture("uber_tweets.jsonl");
    let heuristics = fixture("heuristics.json");
    let args = [
        "ingest",
        "--source",
        path_str(&source),
        "--heuristics",
        path_str(&heuristics),
        "--store",
        path_str(&store),
    ];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    assert!(first.stdout.is_empty(), "ingest reports through logging, not stdout");

    let second = run(&args);
    assert_eq!(code(&second), 0);
    let stderr = String::from_utf8_lossy(&second.stderr);
    assert!(
        stderr.contains("427") && stderr.contains("accepted 0"),
        "rerun should log full dedup, got: {stderr}"
    );
}
