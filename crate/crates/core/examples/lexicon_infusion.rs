//! Trains standard and lexicon-infused skip-gram embeddings on a synthetic
//! corpus and compares how tightly the lexicon's members cluster.
//!
//! `cargo run --release --example lexicon_infusion`

use lexemb::corpus::build_vocab;
use lexemb::embedder::{mean_pairwise_cosine, nearest, train, TrainConfig};
use lexemb::lexicons::LexiconSet;
use lexemb::synth::two_class_corpus;

fn main() -> lexemb::Result<()> {
    let corpus = two_class_corpus(300_000, 20, 7);
    let vocab = build_vocab(corpus.sentences.iter().flatten(), usize::MAX, 1)?;
    let ids: Vec<Vec<u32>> = corpus
        .sentences
        .iter()
        .map(|s| s.iter().map(|t| vocab.id(t).expect("every token is counted")).collect())
        .collect();
    let members: Vec<u32> = corpus.class_a.iter().filter_map(|w| vocab.id(w)).collect();
    let lexicon = LexiconSet::from_entries([("class_a", corpus.class_a.clone())])?;
    let config = TrainConfig { dim: 20, window_radius: 2, seed: 7, ..TrainConfig::default() };

    let standard = train(vocab.clone(), &ids, &config, None)?;
    let infused = train(vocab, &ids, &config, Some(&lexicon))?;
    println!("mean cosine within the lexicon:");
    println!("  standard skip-gram  {:.4}", mean_pairwise_cosine(&standard, &members));
    println!("  lexicon-infused     {:.4}", mean_pairwise_cosine(&infused, &members));

    let probe = members[0];
    for (name, model) in [("standard", &standard), ("infused", &infused)] {
        let neighbors: Vec<String> = nearest(model, probe, 5, None)?
            .into_iter()
            .map(|(id, cos)| format!("{} ({cos:.2})", model.vocab().key(id)))
            .collect();
        println!("{name:>9} neighbors of {}: {}", model.vocab().key(probe), neighbors.join(", "));
    }
    Ok(())
}
