//! The 44 named values attached to one propagation edge.

use abuse_diffusion::features::sentiment::Lexicon;
use abuse_diffusion::features::{edge_feature_names, FeatureTable};
use abuse_diffusion::graph::derive_cascades;
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate(&SynthConfig {
        n_users: 200,
        n_messages: 100,
        seed: 1,
        ..Default::default()
    })?;
    let lexicon = Lexicon::bundled();
    let table = FeatureTable::new(&g.corpus, &lexicon);
    let cascades = derive_cascades(&g.corpus);
    let edge = cascades
        .iter()
        .flat_map(|c| c.edges.iter())
        .find(|e| e.diffused)
        .expect("a diffused edge");
    println!(
        "message {} from {} to {} ({:?})",
        edge.message_id, edge.spreader_id, edge.receiver_id, edge.reaction
    );
    let v = table.edge_vector(edge);
    for (name, value) in edge_feature_names().iter().zip(v.as_slice()) {
        println!("{name:<36} {value:>12.4}");
    }
    Ok(())
}
