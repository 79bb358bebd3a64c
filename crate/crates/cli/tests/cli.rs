//! End-to-end tests driving the `simsmooth` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MICRO: &str = "a\tx\na\tx\na\ty\nb\tx\nb\ty\nb\tz\nb\tz\nc\tz\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simsmooth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_micro(dir: &Path) -> PathBuf {
    let path = dir.join("micro.tsv");
    fs::write(&path, MICRO).unwrap();
    path
}

/// A small clustered corpus written through the library's generator.
fn write_synth(dir: &Path) -> PathBuf {
    use simsmooth::{count, two_cluster_corpus, write_pairs, SynthConfig};
    let config = SynthConfig {
        n_nouns: 60,
        n_verbs: 30,
        n_generalists: 4,
        n_subclasses: 3,
        quota_base: 5,
        quota_scale: 12.0,
        generalist_min: 3,
        generalist_scale: 25.0,
        anchors: 4,
        ..SynthConfig::default()
    };
    let (vocab, pairs) = two_cluster_corpus(&config, 17);
    let table = count(&pairs);
    let path = dir.join("synth.tsv");
    let mut file = fs::File::create(&path).unwrap();
    write_pairs(&mut file, &vocab, &table, &[]).unwrap();
    path
}

#[test]
fn ingest_summary_and_singleton_drop() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let out_path = dir.path().join("table.tsv");

    let out = run(&["ingest", micro.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("N=8 |V1|=3 |V2|=3 singletons=4"));
    let table = fs::read_to_string(&out_path).unwrap();
    assert!(table.contains("a\tx\t2\n"));
    assert!(table.contains("c\tz\n"));

    let out = run(&[
        "ingest",
        micro.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--drop-singletons",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("N=4"));
}

#[test]
fn ingest_missing_file_fails_with_path() {
    let out = run(&["ingest", "/nonexistent/pairs.tsv"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("/nonexistent/pairs.tsv"));
}

#[test]
fn neighbors_table_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--measure",
        "l1",
        "--k",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# measure=l1"));
    assert!(lines[1].starts_with("a\t0"), "self row first: {}", lines[1]);
    assert!(lines[2].starts_with("b\t1"), "{}", lines[2]);
    assert!(lines[3].starts_with("c\t2"), "{}", lines[3]);

    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--measure",
        "l1",
        "--k",
        "1",
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3, "header + self + one neighbor");

    // threshold excludes c (L = 2.0 >= 1.5)
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--measure",
        "l1",
        "--t",
        "1.5",
    ]);
    assert!(!stdout(&out).contains('c'));
}

#[test]
fn neighbors_confusion_ranks_self_naturally() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--measure",
        "conf",
    ]);
    assert!(out.status.success());
    // P_C(a|a) = 11/18 outranks P_C(b|a) = 7/18 here; the self row is
    // placed by rank, not pinned to the top
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].starts_with("a\t0.61"), "{}", lines[1]);
    assert!(lines[2].starts_with("b\t0.38"), "{}", lines[2]);
}

#[test]
fn neighbors_unknown_word_suggests() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let out = run(&["neighbors", micro.to_str().unwrap(), "--word", "zz", "--measure", "js"]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("nearest matches"), "{err}");
}

fn parse_value(text: &str, key: &str) -> Option<f64> {
    text.lines()
        .find(|l| l.starts_with(&format!("{key}=")))
        .and_then(|l| l.split('=').nth(1))
        .and_then(|v| v.parse().ok())
}

#[test]
fn perplexity_gamma_one_matches_katz() {
    let dir = tempfile::tempdir().unwrap();
    let synth = write_synth(dir.path());
    let synth = synth.to_str().unwrap();
    let katz = run(&["perplexity", "--train", synth, "--test", synth, "--model", "katz"]);
    assert!(katz.status.success(), "{}", stderr(&katz));
    let sim = run(&[
        "perplexity",
        "--train",
        synth,
        "--test",
        synth,
        "--model",
        "sim",
        "--gamma",
        "1",
    ]);
    assert!(sim.status.success(), "{}", stderr(&sim));
    let a = parse_value(&stdout(&katz), "overall_perplexity").unwrap();
    let b = parse_value(&stdout(&sim), "overall_perplexity").unwrap();
    assert!((a - b).abs() <= 1e-12, "katz {a} vs gamma=1 similarity {b}");
    // test = train: no unseen pairs
    assert!(stdout(&katz).contains("unseen_perplexity=undefined"));
}

#[test]
fn perplexity_reports_zero_probability_pair() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let test = dir.path().join("test.tsv");
    fs::write(&test, "a\tz\n").unwrap();
    let out = run(&[
        "perplexity",
        "--train",
        micro.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--model",
        "mle",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("overall_perplexity=inf"), "{text}");
    assert!(text.contains("zero_probability_pair=a\tz"), "{text}");
}

#[test]
fn disambig_writes_report_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let synth = write_synth(dir.path());
    let synth = synth.to_str().unwrap();
    let rep1 = dir.path().join("rep1");
    let rep2 = dir.path().join("rep2");
    let args = |out: &Path| {
        vec![
            "disambig".to_owned(),
            synth.to_owned(),
            "--folds".into(),
            "3".into(),
            "--seed".into(),
            "4".into(),
            "--beta-grid".into(),
            "1,3,6".into(),
            "--voting".into(),
            "--voting-k".into(),
            "1,5".into(),
            "--out".into(),
            out.to_str().unwrap().to_owned(),
        ]
    };
    let out = bin().args(args(&rep1)).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for method in ["mle", "katz", "rand", "conf", "l1", "js"] {
        assert!(text.contains(&format!("method={method}")), "{text}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(rep1.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["n_folds"], 3);
    assert!(json["methods"].as_array().unwrap().len() == 6);
    let sweep = fs::read_to_string(rep1.join("sweep_beta_js.csv")).unwrap();
    assert!(sweep.starts_with("param,fold,error\n"));
    assert!(rep1.join("voting_js.csv").exists());

    let out = bin().args(args(&rep2)).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(rep1.join("report.json")).unwrap(),
        fs::read(rep2.join("report.json")).unwrap(),
        "reports must be byte-identical across runs"
    );
}

#[test]
fn disambig_single_method_near_tie_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let synth = write_synth(dir.path());
    let out = run(&[
        "disambig",
        synth.to_str().unwrap(),
        "--measure",
        "mle",
        "--folds",
        "3",
        "--seed",
        "4",
        "--out",
        dir.path().join("rep").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mean = text
        .lines()
        .find(|l| l.starts_with("method=mle"))
        .and_then(|l| l.split("mean_error=").nth(1))
        .and_then(|v| v.split_whitespace().next())
        .and_then(|v| v.parse::<f64>().ok())
        .unwrap();
    // at this corpus seed every unseen instance has an unseen distractor
    // too, so the MLE ties everywhere and scores exactly one half
    assert_eq!(mean, 0.5, "mle mean {mean}");
}

#[test]
fn tune_echoes_singleton_grid() {
    let dir = tempfile::tempdir().unwrap();
    let synth = write_synth(dir.path());
    let out = run(&[
        "tune",
        synth.to_str().unwrap(),
        "--measure",
        "l1",
        "--beta-grid",
        "3",
        "--folds",
        "3",
        "--seed",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("grid_points=1"), "{text}");
    for fold in 0..3 {
        assert!(text.contains(&format!("fold={fold} beta=3")), "{text}");
    }
    let rerun = run(&[
        "tune",
        synth.to_str().unwrap(),
        "--measure",
        "l1",
        "--beta-grid",
        "3",
        "--folds",
        "3",
        "--seed",
        "4",
    ]);
    assert_eq!(stdout(&out), stdout(&rerun), "tune must be deterministic");
}

#[test]
fn config_file_overlay_and_flag_priority() {
    let dir = tempfile::tempdir().unwrap();
    let micro = write_micro(dir.path());
    let config = dir.path().join("config.txt");
    fs::write(&config, "measure=l1\nbeta=9\nk=2\n").unwrap();
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("# measure=l1 beta=9 k=2"), "{}", stdout(&out));

    // explicit flags beat the file
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--config",
        config.to_str().unwrap(),
        "--beta",
        "2",
    ]);
    assert!(stdout(&out).contains("beta=2"), "{}", stdout(&out));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "nonsense=1\n").unwrap();
    let out = run(&[
        "neighbors",
        micro.to_str().unwrap(),
        "--word",
        "a",
        "--config",
        bad.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("unknown config key"));
}

#[test]
fn help_enumerates_defaults_and_rejects_unknown_flags() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    for sub in ["ingest", "neighbors", "perplexity", "disambig", "tune"] {
        assert!(stdout(&out).contains(sub));
    }
    let out = run(&["perplexity", "--help"]);
    let text = stdout(&out);
    for needle in ["beta 4", "gamma 0.15", "k 60", "t 2.5"] {
        assert!(text.contains(needle), "perplexity help misses {needle:?}");
    }
    let out = run(&["disambig", "--help"]);
    let text = stdout(&out);
    assert!(text.contains("gamma 0"), "{text}");
    assert!(text.contains("S(w1) = V1"), "{text}");

    let out = run(&["ingest", "x.tsv", "--frobnicate"]);
    assert!(!out.status.success());
}
