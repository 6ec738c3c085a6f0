//! Train the MAP softmax model on edge vectors and inspect it.

use abuse_diffusion::blr::{blr_gradient_check, mean_probabilities, rows_to_matrix, BlrConfig, LabelMode};
use abuse_diffusion::features::sentiment::Lexicon;
use abuse_diffusion::features::{edge_feature_names, FeatureTable};
use abuse_diffusion::graph::derive_cascades;
use abuse_diffusion::pipeline::{edge_training_set, labeled_messages, train_crowd_model};
use abuse_diffusion::synth::{generate, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate(&SynthConfig {
        n_users: 600,
        n_messages: 1500,
        seed: 2,
        ..Default::default()
    })?;
    let lexicon = Lexicon::bundled();
    let table = FeatureTable::new(&g.corpus, &lexicon);
    let cascades = derive_cascades(&g.corpus);
    let ids: Vec<String> = labeled_messages(&g.corpus).into_iter().map(|(id, _)| id).collect();

    for mode in [LabelMode::Multiclass, LabelMode::Offensive] {
        let config = BlrConfig {
            sigma2: 10.0,
            ..Default::default()
        };
        let model = train_crowd_model(&table, &cascades, &ids, mode, &config)?;
        println!(
            "{mode:?}: {} edges, {} iterations, converged {}, log posterior {:.2}",
            model.meta.n_samples, model.meta.iterations, model.meta.converged, model.meta.objective
        );

        let (rows, labels) = edge_training_set(&table, &cascades, &ids[..50]);
        let x = rows_to_matrix(&rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>(), edge_feature_names().len())?;
        let y: Vec<usize> = labels.iter().map(|&l| mode.class_of(l)).collect();
        println!("  gradient check on 50 messages: max relative error {:.1e}", blr_gradient_check(&model, x.view(), &y));
        println!("  mean predicted probabilities: {:?}", mean_probabilities(&model, x.view())?);

        let diffused = edge_feature_names().iter().position(|n| n == "diffused").unwrap();
        for (class, w) in model.classes.iter().zip(&model.weights) {
            println!("  weight on `diffused` for {class}: {:+.3}", w[1 + diffused]);
        }
    }
    Ok(())
}
