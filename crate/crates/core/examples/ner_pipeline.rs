//! End-to-end NER on a generated toy corpus: lexicon-infused embeddings
//! from unlabeled text, a stacked CRF tagger with and without them, span F1
//! on held-out names, and CoNLL output.
//!
//! `cargo run --release --example ner_pipeline`

use lexemb::corpus::build_vocab;
use lexemb::embedder::{train, TrainConfig};
use lexemb::lexicons::LexiconSet;
use lexemb::ner::{score_spans, train_ner, write_tagged, Document, NerModel, NerTrainConfig, Resources};
use lexemb::synth::{toy_ner, ToyNerConfig};

fn evaluate(model: &NerModel, docs: &[Document], resources: &Resources) -> lexemb::Result<f64> {
    let gold: Vec<_> = docs.iter().flat_map(|d| d.sentences.iter().map(|s| s.spans.clone())).collect();
    let pred: Vec<_> = model.tag_all(docs, resources)?.into_iter().flatten().collect();
    let report = score_spans(&gold, &pred)?;
    println!("{report}");
    Ok(report.overall.f1)
}

fn main() -> lexemb::Result<()> {
    let toy = toy_ner(&ToyNerConfig::default(), 3);

    let vocab = build_vocab(toy.unlabeled.iter().flatten(), usize::MAX, 1)?;
    let ids: Vec<Vec<u32>> = toy
        .unlabeled
        .iter()
        .map(|s| s.iter().map(|t| vocab.id(t).expect("every token is counted")).collect())
        .collect();
    let lexicons = LexiconSet::from_entries(toy.lexicons.iter().map(|(n, v)| (n.clone(), v.clone())))?;
    let embed_config = TrainConfig { dim: 20, window_radius: 3, epochs: 5, ..TrainConfig::default() };
    let embeddings = train(vocab, &ids, &embed_config, Some(&lexicons))?;

    let config = NerTrainConfig::default();
    let plain = Resources::new();
    println!("baseline:");
    let base = evaluate(&train_ner(&toy.train, &plain, &config)?, &toy.test, &plain)?;

    let mut with_embeddings = Resources::new();
    with_embeddings.embeddings = Some(embeddings);
    println!("baseline + lexicon-infused embeddings:");
    let model = train_ner(&toy.train, &with_embeddings, &config)?;
    let better = evaluate(&model, &toy.test, &with_embeddings)?;
    println!("test F1 {base:.4} -> {better:.4}\n");

    let first = &toy.test[..1];
    let predicted = model.tag_all(first, &with_embeddings)?;
    let mut out = Vec::new();
    write_tagged(&mut out, first, &predicted).expect("writing to memory");
    let text = String::from_utf8(out).expect("utf-8 output");
    println!("tagged output (first lines):");
    for line in text.lines().take(12) {
        println!("{line}");
    }
    Ok(())
}
