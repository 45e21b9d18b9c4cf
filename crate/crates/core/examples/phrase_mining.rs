//! Mines PMI phrases from a small corpus and segments sentences with them.
//!
//! `cargo run --example phrase_mining`

use std::collections::HashSet;

use lexemb::corpus::{build_phrase_vocab, mine_phrases, pmi_score, segment_corpus, tokenize_line, NGramCounts};

fn main() -> lexemb::Result<()> {
    let text = [
        "the mayor of new york visited los angeles",
        "new york and los angeles are large cities",
        "she moved from los angeles to new york city",
        "new york city is in new york state",
        "the weather in los angeles is warm",
        "a new idea came from york",
    ];
    let sentences: Vec<Vec<String>> = text.iter().map(|l| tokenize_line(l, true)).collect();
    let counts = NGramCounts::from_sentences(&sentences);
    let stopwords: HashSet<String> = ["the", "of", "and", "in", "is", "a", "to"].iter().map(|s| s.to_string()).collect();

    // a discount of 1 removes bigrams seen only once, which would
    // otherwise score highest in a corpus this small
    let (threshold, discount) = (3.5, 1.0);
    println!("PMI scores of a few bigrams (discount {discount}):");
    for (a, b) in [("new", "york"), ("los", "angeles"), ("york", "city"), ("moved", "from")] {
        println!("  {a} {b}: {:.2}", pmi_score(a, b, &counts, discount)?);
    }
    let table = mine_phrases(&counts, threshold, discount, &stopwords, &[])?;
    println!("mined {} phrases above {threshold}:", table.len());
    for key in table.iter() {
        println!("  {key}");
    }

    let vocab = build_phrase_vocab(&sentences, &table, 1000, 1)?;
    for (sentence, ids) in sentences.iter().zip(segment_corpus(&sentences, &table, &vocab)).take(3) {
        let keys: Vec<&str> = ids.iter().map(|&id| vocab.key(id)).collect();
        println!("{}\n  -> {}", sentence.join(" "), keys.join(" | "));
    }
    Ok(())
}
