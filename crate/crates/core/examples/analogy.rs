//! Answers 3CosAdd analogy questions over a tiny hand-built embedding table
//! and scores a question set.
//!
//! `cargo run --example analogy`

use std::collections::HashMap;

use lexemb::corpus::Vocabulary;
use lexemb::embedder::{analogy_query, eval_analogy, AnalogyAnswer, EmbeddingModel};

fn main() -> lexemb::Result<()> {
    // axes: royalty, gender, plurality, noise
    let rows: [(&str, [f32; 4]); 8] = [
        ("man", [0.0, 1.0, 0.0, 0.1]),
        ("woman", [0.0, -1.0, 0.0, 0.1]),
        ("king", [1.0, 1.0, 0.0, 0.0]),
        ("queen", [1.0, -1.0, 0.0, 0.0]),
        ("kings", [1.0, 1.0, 1.0, 0.0]),
        ("queens", [1.0, -1.0, 1.0, 0.0]),
        ("men", [0.0, 1.0, 1.0, 0.1]),
        ("women", [0.0, -1.0, 1.0, 0.1]),
    ];
    // counts only fix the vocabulary order
    let counts: HashMap<String, u64> = rows.iter().enumerate().map(|(i, (w, _))| (w.to_string(), 100 - i as u64)).collect();
    let vocab = Vocabulary::from_counts(counts, 0, rows.len(), 1)?;
    let leaf: Vec<f32> = rows.iter().flat_map(|(_, v)| *v).collect();
    let model = EmbeddingModel::from_parts(vocab, vec![], 4, leaf, None, None)?;
    let id = |w: &str| model.vocab().id(w).expect("word in table");

    match analogy_query(&model, id("man"), id("king"), id("woman"), 8)? {
        AnalogyAnswer::Answer(d) => println!("man : king :: woman : {}", model.vocab().key(d)),
        AnalogyAnswer::Skipped(reason) => println!("skipped: {reason:?}"),
    }

    let questions = [
        [id("man"), id("king"), id("woman"), id("queen")],
        [id("king"), id("kings"), id("queen"), id("queens")],
        [id("man"), id("men"), id("woman"), id("women")],
    ];
    let report = eval_analogy(&model, &questions, 8)?;
    println!("{} / {} correct (accuracy {:.2})", report.correct, report.answered, report.accuracy);
    Ok(())
}
