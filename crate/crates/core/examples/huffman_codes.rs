//! Builds the hierarchical-softmax tree from word counts and prints each
//! word's code.
//!
//! `cargo run --example huffman_codes`

use lexemb::huffman::HuffmanTree;

fn main() -> lexemb::Result<()> {
    let words = ["the", "of", "city", "river", "london", "thames"];
    let counts = [120u64, 80, 30, 20, 9, 4];
    let tree = HuffmanTree::from_counts(&counts)?;
    for (id, word) in words.iter().enumerate() {
        let path = tree.path(id as u32);
        let code: String = path.labels.iter().map(|&l| if l > 0 { '0' } else { '1' }).collect();
        println!("{word:>8}  count {:>4}  code {code:<6} via inner nodes {:?}", counts[id], path.nodes);
    }
    let total: u64 = counts.iter().sum();
    println!(
        "expected code length {:.3} bits",
        tree.weighted_length(&counts) as f64 / total as f64
    );
    Ok(())
}
