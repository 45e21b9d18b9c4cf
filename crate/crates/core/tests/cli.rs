//! End-to-end checks of the `lexemb` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lexemb::ner::{write_tagged, Document};
use lexemb::synth::{toy_ner, two_class_corpus, ToyNerConfig};

fn lexemb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexemb")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lexemb(args);
    assert!(
        out.status.success(),
        "lexemb {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) {
    let text: String = lines.into_iter().map(|l| l + "\n").collect();
    fs::write(path, text).unwrap();
}

fn write_conll(path: &Path, docs: &[Document]) {
    let spans: Vec<Vec<_>> = docs.iter().map(|d| d.sentences.iter().map(|s| s.spans.clone()).collect()).collect();
    let mut buf = Vec::new();
    write_tagged(&mut buf, docs, &spans).unwrap();
    fs::write(path, buf).unwrap();
}

#[test]
fn usage_errors_exit_nonzero() {
    let out = lexemb(&[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(!lexemb(&["frobnicate"]).status.success());
    assert!(!lexemb(&["eval-ner", "--gold"]).status.success());
    assert!(!lexemb(&["train-embeddings", "--bogus-flag", "1"]).status.success());
    assert!(lexemb(&["--help"]).status.success());
}

#[test]
fn missing_input_is_reported_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("v.txt");
    let out = lexemb(&["build-vocab", "--corpus", "/nonexistent/corpus.txt", "--output", p(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/corpus.txt"));
    assert!(!out_path.exists());
}

#[test]
fn eval_ner_identical_files_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.conll");
    write_conll(&gold, &toy_ner(&ToyNerConfig::default(), 1).test);
    let stdout = ok(&["eval-ner", "--gold", p(&gold), "--pred", p(&gold)]);
    assert!(stdout.lines().any(|l| l == "F1 1.0000"), "{stdout}");
}

#[test]
fn embedding_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    let c = two_class_corpus(60_000, 8, 3);
    write_lines(&corpus, c.sentences.iter().map(|s| s.join(" ")));
    let lex = dir.path().join("class_a.txt");
    write_lines(&lex, c.class_a.clone());

    let phrases = dir.path().join("phrases.txt");
    ok(&["mine-phrases", "--corpus", p(&corpus), "--threshold", "5", "--output", p(&phrases)]);
    let vocab = dir.path().join("vocab.txt");
    ok(&["build-vocab", "--corpus", p(&corpus), "--phrases", p(&phrases), "--min-count", "2", "--output", p(&vocab)]);

    let run = |name: &str| -> PathBuf {
        let out = dir.path().join(name);
        ok(&[
            "train-embeddings", "--corpus", p(&corpus), "--phrases", p(&phrases), "--vocab", p(&vocab),
            "--dim", "8", "--window", "2", "--lexicons", p(&lex), "--neg-rate", "0.01", "--seed", "7",
            "--workers", "1", "--output", p(&out),
        ]);
        out
    };
    let (a, b) = (run("a.emb"), run("b.emb"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sidecar = |x: &Path| PathBuf::from(format!("{}.state", x.display()));
    assert_eq!(fs::read(sidecar(&a)).unwrap(), fs::read(sidecar(&b)).unwrap());

    let questions = dir.path().join("q.txt");
    write_lines(
        &questions,
        [": classes".to_owned(), "a0 a1 b0 b1".to_owned(), "a2 a3 b2 b3".to_owned(), "a0 a1 zz b0".to_owned()],
    );
    let stdout = ok(&["eval-analogy", "--embeddings", p(&a), "--questions", p(&questions), "--restrict", "100"]);
    assert!(stdout.contains("classes: accuracy"), "{stdout}");
    assert!(stdout.contains("1 out of vocabulary"), "{stdout}");
}

#[test]
fn ner_train_tag_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ToyNerConfig { train_sentences: 150, dev_sentences: 40, test_sentences: 40, ..Default::default() };
    let toy = toy_ner(&cfg, 2);
    let (train, dev, test) = (dir.path().join("train"), dir.path().join("dev"), dir.path().join("test"));
    write_conll(&train, &toy.train);
    write_conll(&dev, &toy.dev);
    write_conll(&test, &toy.test);
    let gaz = dir.path().join("loc.txt");
    write_lines(&gaz, toy.lexicons[1].1.clone());
    let grid = dir.path().join("grid.toml");
    fs::write(&grid, "eta = [0.05, 0.1]\nepochs = [3]\nrefit = false\n").unwrap();

    let model = dir.path().join("model.ner");
    let stdout = ok(&[
        "train-ner", "--train", p(&train), "--dev", p(&dev), "--gazetteers", p(&gaz), "--stacked", "--folds", "3",
        "--grid", p(&grid), "--output", p(&model),
    ]);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("grid ")).count(), 2);

    let tagged = dir.path().join("tagged");
    ok(&["tag", "--model", p(&model), "--input", p(&test), "--gazetteers", p(&gaz), "--output", p(&tagged)]);
    let stdout = ok(&["eval-ner", "--gold", p(&test), "--pred", p(&tagged)]);
    let f1: f64 = stdout.lines().find_map(|l| l.strip_prefix("F1 ")).unwrap().parse().unwrap();
    assert!(f1 > 0.5, "{stdout}");

    // tagging with a different resource set is rejected
    let out = lexemb(&["tag", "--model", p(&model), "--input", p(&test), "--output", p(&tagged)]);
    assert_eq!(out.status.code(), Some(1));
}
