//! Lexicon sentiment scores for a few sentences.
//!
//! cargo run --example sentiment -- "some text to score"

use abuse_diffusion::features::sentiment::{sentiment_score, tokenize, Lexicon};

fn main() {
    let lexicon = Lexicon::bundled();
    let mut texts: Vec<String> = std::env::args().skip(1).collect();
    if texts.is_empty() {
        texts = [
            "what a great and happy day",
            "this is not good",
            "you pathetic idiot",
            "win a free prize now",
            "the train leaves at noon",
        ]
        .map(String::from)
        .to_vec();
    }
    println!("{} lexicon entries", lexicon.len());
    for t in &texts {
        let matched: Vec<String> = tokenize(t)
            .filter(|w| lexicon.get(w).is_some())
            .collect();
        println!("{:+.3}  {t:?}  matched {matched:?}", sentiment_score(t, &lexicon));
    }
}
