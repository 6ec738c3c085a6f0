//! Split, per-class metrics and the results-table comparison on toy data.

use abuse_diffusion::datamodel::AbuseLabel;
use abuse_diffusion::eval::{compare_models, evaluate, f1_score, split_messages, DEFAULT_RATIOS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [AbuseLabel::Normal, AbuseLabel::Abusive, AbuseLabel::Spam, AbuseLabel::Hate];
    let messages: Vec<(String, AbuseLabel)> = (0..100)
        .map(|i| (format!("m{i:03}"), labels[[0, 0, 0, 1, 2, 0, 1, 0, 2, 3][i % 10]]))
        .collect();
    let split = split_messages(&messages, DEFAULT_RATIOS, 42)?;
    println!("split sizes (train/val/test): {:?}", split.sizes());

    let classes: Vec<String> = AbuseLabel::ALL.iter().map(|l| l.as_str().to_owned()).collect();
    let ids: Vec<String> = (0..12).map(|i| format!("m{i}")).collect();
    let truth = [0, 0, 0, 1, 2, 3, 3, 3, 3, 3, 3, 2];
    let better = [0, 0, 3, 1, 2, 3, 3, 3, 3, 3, 2, 2];
    let worse = [3, 0, 3, 3, 2, 3, 3, 3, 0, 3, 2, 3];
    let a = evaluate(&classes, &ids, &better, &truth)?;
    let b = evaluate(&classes, &ids, &worse, &truth)?;
    println!("confusion (rows = truth): {:?}", a.confusion);
    print!("{}", compare_models(&a, &b)?.table());
    println!("F1 of P=0.85, R=0.82: {:.2}", f1_score(0.85, 0.82));
    Ok(())
}
