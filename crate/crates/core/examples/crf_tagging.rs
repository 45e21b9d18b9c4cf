//! Trains a linear-chain CRF with AdaGrad RDA on a handful of sentences,
//! then decodes BILOU labels into entity spans.
//!
//! `cargo run --example crf_tagging`

use lexemb::crf::{encode_bilou, train_crf, CrfTrainConfig, FeatureAlphabet, LabelAlphabet, RawSequence, Span};

fn features(tokens: &[&str]) -> Vec<Vec<String>> {
    (0..tokens.len())
        .map(|i| {
            let w = tokens[i];
            let mut f = vec![format!("w={}", w.to_lowercase()), "bias".to_string()];
            if w.chars().next().is_some_and(char::is_uppercase) {
                f.push("cap".into());
            }
            f.push(format!("prev={}", if i > 0 { tokens[i - 1].to_lowercase() } else { "<s>".into() }));
            f
        })
        .collect()
}

fn sequence(tokens: &[&str], spans: &[Span], labels: &LabelAlphabet) -> lexemb::Result<RawSequence> {
    Ok(RawSequence {
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
        features: features(tokens),
        dense: vec![vec![]; tokens.len()],
        gold: Some(encode_bilou(spans, tokens.len(), labels)?),
    })
}

fn main() -> lexemb::Result<()> {
    let labels = LabelAlphabet::new(&["PER", "LOC"])?;
    let data = [
        (vec!["Alice", "lives", "in", "Paris"], vec![Span::new(0, 1, "PER"), Span::new(3, 4, "LOC")]),
        (vec!["Bob", "Smith", "visited", "New", "York"], vec![Span::new(0, 2, "PER"), Span::new(3, 5, "LOC")]),
        (vec!["they", "met", "in", "Rome"], vec![Span::new(3, 4, "LOC")]),
        (vec!["Carol", "Jones", "left", "Berlin"], vec![Span::new(0, 2, "PER"), Span::new(3, 4, "LOC")]),
    ];
    let raw: Vec<RawSequence> = data.iter().map(|(t, s)| sequence(t, s, &labels)).collect::<lexemb::Result<_>>()?;
    let mut alphabet = FeatureAlphabet::new();
    let instances: Vec<_> = raw.iter().map(|r| r.intern(&mut alphabet)).collect();
    let config = CrfTrainConfig { epochs: 20, ..CrfTrainConfig::default() };
    let model = train_crf(&instances, labels, alphabet, 0, &config)?;
    println!("{} of {} weights are non-zero", model.nonzero_weights(), model.weights().len());

    let test = ["Dave", "Smith", "lives", "in", "Rome"];
    let inst = sequence(&test, &[], model.labels())?.lookup(model.features());
    let path: Vec<String> = model.viterbi(&inst).iter().map(|&l| model.labels().name(l)).collect();
    println!("{}\n{}", test.join(" "), path.join(" "));
    for span in model.predict_spans(&inst) {
        println!("  {span}: {}", test[span.start..span.end].join(" "));
    }
    Ok(())
}
