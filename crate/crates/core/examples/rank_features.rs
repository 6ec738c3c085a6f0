//! Random-forest feature rankings for diffusion of offensive and normal
//! posts, and for user involvement with offensive content.
//!
//! cargo run --release --example rank_features -- [trees]

use abuse_diffusion::features::sentiment::Lexicon;
use abuse_diffusion::features::FeatureTable;
use abuse_diffusion::forest::{rf_rank_features, ForestConfig};
use abuse_diffusion::graph::derive_cascades;
use abuse_diffusion::pipeline::{edge_ranking_data, user_ranking_data, EdgeGroup};
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trees = std::env::args().nth(1).map_or(Ok(100), |s| s.parse())?;
    let g = generate(&SynthConfig {
        n_users: 600,
        n_messages: 1200,
        seed: 3,
        ..Default::default()
    })?;
    let lexicon = Lexicon::bundled();
    let table = FeatureTable::new(&g.corpus, &lexicon);
    let cascades = derive_cascades(&g.corpus);
    let config = ForestConfig {
        n_trees: trees,
        seed: 3,
        ..Default::default()
    };

    let offensive = edge_ranking_data(&table, &cascades, EdgeGroup::Offensive, Some(4000));
    let normal = edge_ranking_data(&table, &cascades, EdgeGroup::Normal, Some(4000));
    let a = rf_rank_features(&offensive.fit(&config)?, 10);
    let b = rf_rank_features(&normal.fit(&config)?, 10);
    println!("{:>4}  {:<40} {:<40}", "rank", "offensive posts", "normal posts");
    for (x, y) in a.iter().zip(&b) {
        println!(
            "{:>4}  {:<32} {:.3}  {:<32} {:.3}",
            x.rank, x.feature, x.importance, y.feature, y.importance
        );
    }

    let users = user_ranking_data(&g.corpus, &table);
    let forest = users.fit(&config)?;
    println!("\nusers ({} rows, out-of-bag accuracy {:.3}):", users.rows.len(), forest.oob_accuracy.unwrap_or(f64::NAN));
    for r in rf_rank_features(&forest, 5) {
        println!("{:>4}  {:<32} {:.3}", r.rank, r.feature, r.importance);
    }
    Ok(())
}
