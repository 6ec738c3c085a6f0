//! Persona scores and reaction classes.

use std::collections::BTreeMap;

use abuse_diffusion::datamodel::AbuseLabel;
use abuse_diffusion::features::persona::{discriminator_class, persona_scores};
use abuse_diffusion::pipeline::persona_report;
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use AbuseLabel::*;
    let posts = [Abusive, Normal, Normal, Spam, Abusive, Normal, Normal, Normal, Normal, Normal];
    let p = persona_scores("example", &posts);
    println!("10 posts, 2 abusive -> scores {:?}", p.scores);
    println!("reacted to [normal, normal] -> {:?}", discriminator_class(&[Normal, Normal]));
    println!("reacted to [abusive, hate] -> {:?}", discriminator_class(&[Abusive, Hate]));

    let g = generate(&SynthConfig {
        n_users: 400,
        n_messages: 800,
        seed: 6,
        ..Default::default()
    })?;
    let rows = persona_report(&g.corpus);
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    for r in &rows {
        *classes.entry(format!("{:?}", r.discriminator)).or_default() += 1;
    }
    println!("reaction classes over {} users: {classes:?}", rows.len());
    let mut worst: Vec<_> = rows.iter().filter(|r| r.labeled_posts >= 3).collect();
    worst.sort_by(|a, b| b.scores["abusive"].total_cmp(&a.scores["abusive"]).then(a.user_id.cmp(&b.user_id)));
    for r in worst.iter().take(3) {
        println!("{} ({} posts): {:?}", r.user_id, r.labeled_posts, r.scores);
    }
    Ok(())
}
