//! Load a corpus from disk, check it, and show what a violation looks like.
//!
//! cargo run --example load_and_validate -- [corpus_dir]

use abuse_diffusion::datamodel::{load_corpus, validate_corpus, Corpus, CorpusPaths, FollowEdge};
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let generated = generate(&SynthConfig {
        n_users: 200,
        n_messages: 300,
        ..Default::default()
    })?;
    let tmp = std::env::temp_dir().join("abuse-diffusion-load-example");
    let dir = std::env::args().nth(1).map_or(tmp, Into::into);
    if !dir.join("users.jsonl").exists() {
        generated.write(&dir)?;
    }

    let corpus = load_corpus(&CorpusPaths::in_dir(&dir), generated.manifest.config.snapshot)?;
    println!(
        "loaded {} users, {} tweets, {} follows, {} interactions from {}",
        corpus.users().len(),
        corpus.tweets().len(),
        corpus.follows().len(),
        corpus.interactions().len(),
        dir.display()
    );
    println!("label distribution: {}", corpus.label_distribution());
    println!("violations: {}", validate_corpus(&corpus).len());

    let mut follows = corpus.follows().to_vec();
    let u = corpus.users()[0].user_id.clone();
    follows.push(FollowEdge {
        followee_id: u.clone(),
        follower_id: u,
    });
    let broken = Corpus::new(
        corpus.users().to_vec(),
        corpus.tweets().to_vec(),
        follows,
        corpus.interactions().to_vec(),
        corpus.snapshot_time(),
    );
    for v in validate_corpus(&broken) {
        println!("after adding a self-follow: {v}");
    }
    Ok(())
}
