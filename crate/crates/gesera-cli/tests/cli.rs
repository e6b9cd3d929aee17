//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gesera::experiments::synth::{generate, SynthConfig};

fn gesera(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gesera"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn small_synth() -> SynthConfig {
    SynthConfig {
        topics: 4,
        systems: 5,
        annotators: 2,
        noise_annotators: 0,
        index_docs: 60,
        docs_per_topic: 10,
        topic_vocab: 15,
        shared_vocab: 40,
        doc_len: 25,
        summary_len: 12,
        max_corruption: 0.8,
        seed: 21,
    }
}

fn write_fixture(dir: &Path) {
    let data = generate(&small_synth()).unwrap();
    data.write_files(dir).unwrap();
    fs::write(
        dir.join("config.txt"),
        "corpus = corpus.jsonl\nsummaries = summaries.jsonl\n\
         manual.quality = quality.csv\nsubset_sizes = 40, 60\n\
         strategies = gesera\ncutoffs = 5\nseed = 3\nout = results\n",
    )
    .unwrap();
}

#[test]
fn sweep_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());

    let mut outputs = Vec::new();
    for (threads, out) in [("1", "run1"), ("4", "run4"), ("2", "run2")] {
        let output = gesera(
            &[
                "sweep",
                "--config",
                "config.txt",
                "--threads",
                threads,
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_success(&output);
        outputs.push(fs::read_to_string(dir.path().join(out).join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(outputs[0].lines().count() > 1, "{}", outputs[0]);
}

#[test]
fn score_reports_one_for_identical_texts() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    assert_success(&gesera(
        &["build-index", "--config", "config.txt", "--out", "ix"],
        dir.path(),
    ));

    let candidate = "{\"topic_id\":\"t\",\"system_id\":\"sys\",\"kind\":\"candidate\",\
                     \"text\":\"taaaax taaabx taaacx\"}\n";
    let reference = "{\"topic_id\":\"t\",\"system_id\":\"A1\",\"kind\":\"reference\",\
                     \"text\":\"taaaax taaabx taaacx\"}\n";
    fs::write(dir.path().join("cand.jsonl"), candidate).unwrap();
    fs::write(dir.path().join("refs.jsonl"), reference).unwrap();

    let output = gesera(
        &[
            "score",
            "--index",
            "ix/index.jsonl",
            "--candidates",
            "cand.jsonl",
            "--references",
            "refs.jsonl",
            "--strategy",
            "gesera",
            "--variant",
            "sera",
            "--cutoff",
            "5",
        ],
        dir.path(),
    );
    assert_success(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout, "topic_id,system_id,metric,score\nt,sys,GeSERA-5,1\n");
}

#[test]
fn score_warns_on_degenerate_candidates() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    assert_success(&gesera(
        &["build-index", "--config", "config.txt", "--out", "ix"],
        dir.path(),
    ));

    // "the of and" reformulates to an empty query under every strategy.
    let candidate = "{\"topic_id\":\"t\",\"system_id\":\"sys\",\"kind\":\"candidate\",\
                     \"text\":\"the of and\"}\n";
    let reference = "{\"topic_id\":\"t\",\"system_id\":\"A1\",\"kind\":\"reference\",\
                     \"text\":\"taaaax taaabx\"}\n";
    fs::write(dir.path().join("cand.jsonl"), candidate).unwrap();
    fs::write(dir.path().join("refs.jsonl"), reference).unwrap();

    let output = gesera(
        &[
            "score",
            "--index",
            "ix/index.jsonl",
            "--candidates",
            "cand.jsonl",
            "--references",
            "refs.jsonl",
        ],
        dir.path(),
    );
    assert_success(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stdout.contains("t,sys,GeSERA-10,0"), "{stdout}");
    assert!(stderr.contains("retrieved no documents"), "{stderr}");
}

#[test]
fn annotators_study_runs_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    fs::write(
        dir.path().join("config.txt"),
        "corpus = corpus.jsonl\nsummaries = summaries.jsonl\n\
         manual.quality = quality.csv\nsubset_sizes = 40\n\
         strategies = gesera\nvariants = sera\ncutoffs = 5\nseed = 3\nout = results\n\
         annotator_subsets = A1; A1,A2\n",
    )
    .unwrap();
    let output = gesera(&["annotators", "--config", "config.txt"], dir.path());
    assert_success(&output);
    let csv = fs::read_to_string(dir.path().join("results/annotators.csv")).unwrap();
    assert!(csv.starts_with("annotators,metric,manual_method"), "{csv}");
    assert_eq!(csv.lines().count(), 3, "{csv}");
}

#[test]
fn pos_report_prints_percentages() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("tiny.jsonl"),
        "{\"id\":\"d\",\"body\":\"dog ran fast\"}\n",
    )
    .unwrap();
    let output = gesera(&["pos-report", "tiny.jsonl"], dir.path());
    assert_success(&output);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("tiny.jsonl,Noun,"), "{stdout}");
    assert_eq!(stdout.lines().count(), 6, "{stdout}");
}

#[test]
fn missing_config_fails_with_a_clear_message() {
    let dir = tempfile::tempdir().unwrap();
    let output = gesera(&["sweep", "--config", "nope.txt"], dir.path());
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("nope.txt"), "{stderr}");
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "corpus = missing.jsonl\nbogus = 1\n").unwrap();
    let output = gesera(&["sweep", "--config", "bad.txt"], dir.path());
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    for needle in ["unknown key bogus", "summaries", "subset_sizes"] {
        assert!(stderr.contains(needle), "missing {needle:?} in {stderr}");
    }
}
