//! Generate a synthetic corpus and print what was planted.
//!
//! cargo run --example synth_corpus -- [out_dir] [seed] [signal]

use abuse_diffusion::synth::{generate, plant_report, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = args.first().map_or("synthetic-corpus", String::as_str);
    let config = SynthConfig {
        n_users: 800,
        n_messages: 2000,
        seed: args.get(1).map_or(Ok(0), |s| s.parse())?,
        signal_strength: args.get(2).map_or(Ok(1.0), |s| s.parse())?,
        ..Default::default()
    };
    let g = generate(&config)?;
    g.write(out.as_ref())?;

    let m = &g.manifest;
    println!("{} users, {} follows, {} messages, {} exposure events", m.n_users, m.n_follows, m.n_tweets, m.n_interactions);
    println!("labels: {:?}", m.label_counts);
    let report = plant_report(m);
    println!("{:<8} {:>9} {:>8} {:>7} {:>12}", "label", "exposures", "diffused", "rate", "vs normal");
    for e in &report.effects {
        println!(
            "{:<8} {:>9} {:>8} {:>7.3} {:>12}",
            e.label.as_str(),
            e.exposures,
            e.diffused,
            e.rate,
            e.ratio_to_normal.map_or("-".into(), |r| format!("{r:.2}x")),
        );
    }
    println!("corr(ln followers/friends, diffused) = {:.3}", report.ratio_diffusion_correlation);
    println!("files written to {out}/");
    Ok(())
}
