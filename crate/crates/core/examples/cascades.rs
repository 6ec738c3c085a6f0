//! Follow graph and per-message propagation cascades.

use abuse_diffusion::graph::{build_follow_graph, derive_cascades, CascadeRecord};
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate(&SynthConfig {
        n_users: 300,
        n_messages: 200,
        seed: 4,
        ..Default::default()
    })?;
    let corpus = &g.corpus;
    let graph = build_follow_graph(corpus);
    let mut by_degree: Vec<(&str, usize)> = graph.nodes().map(|u| (u, graph.out_degree(u))).collect();
    by_degree.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    println!("{} follow edges; most followed: {:?}", graph.edge_count(), &by_degree[..3]);

    let cascades = derive_cascades(corpus);
    let mut sizes: Vec<_> = cascades
        .iter()
        .map(|c| (c.edges.len(), c.diffused_count(), c.label, &c.message_id))
        .collect();
    sizes.sort_by_key(|s| std::cmp::Reverse(s.0));
    println!("{} messages with exposures", cascades.len());
    for (edges, diffused, label, id) in sizes.iter().take(5) {
        println!("  {id}: {edges} edges, {diffused} diffused, label {label:?}");
    }

    let smallest = cascades.iter().min_by_key(|c| c.edges.len()).expect("some cascade");
    println!("{}", serde_json::to_string_pretty(&CascadeRecord::from(smallest))?);
    Ok(())
}
