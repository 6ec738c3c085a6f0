//! Crowdsourced versus non-crowdsourced prediction on a synthetic corpus.
//!
//! cargo run --release --example crowd_vs_baseline -- [users] [messages] [signal] [seed]

use std::time::Instant;

use abuse_diffusion::features::sentiment::Lexicon;
use abuse_diffusion::features::FeatureTable;
use abuse_diffusion::pipeline::{run_task1, Task1Config};
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_owned());
    let config = SynthConfig {
        n_users: arg(0, "1000").parse()?,
        n_messages: arg(1, "4000").parse()?,
        signal_strength: arg(2, "1.0").parse()?,
        seed: arg(3, "0").parse()?,
        ..Default::default()
    };

    let start = Instant::now();
    let generated = generate(&config)?;
    let corpus = &generated.corpus;
    println!(
        "corpus: {} users, {} messages, {} interactions ({:.1}s)",
        corpus.users().len(),
        corpus.tweets().len(),
        corpus.interactions().len(),
        start.elapsed().as_secs_f64()
    );

    let lexicon = Lexicon::bundled();
    let table = FeatureTable::new(corpus, &lexicon);
    let task = Task1Config {
        seed: config.seed,
        ..Default::default()
    };
    let out = run_task1(corpus, &table, &task)?;
    println!(
        "edge model: {} iterations, converged {}; baseline: {} iterations",
        out.model.meta.iterations, out.model.meta.converged, out.baseline.meta.iterations
    );
    println!("{}", out.comparison.table());
    println!(
        "macro-F1 crowdsourced {:.4}, non-crowdsourced {:.4}, delta {:+.4} ({:.1}s)",
        out.comparison.macro_f1_cro,
        out.comparison.macro_f1_noncro,
        out.comparison.macro_delta_f1,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
