//! Per-user label ratios and reaction-history classes.

use serde::{Deserialize, Serialize};

use crate::datamodel::AbuseLabel;

/// Fraction of a user's labeled posts carrying each abuse level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaScores {
    pub user_id: String,
    /// Indexed by [`AbuseLabel::index`].
    pub scores: [f64; 4],
    pub counts: [usize; 4],
    pub total: usize,
    /// Set when the user has no labeled posts; all scores are then zero.
    pub undefined: bool,
}

impl PersonaScores {
    pub fn score(&self, label: AbuseLabel) -> f64 {
        self.scores[label.index()]
    }
}

/// `score_i = count_i / N` over the user's labeled posts.
pub fn persona_scores(user_id: &str, labels: &[AbuseLabel]) -> PersonaScores {
    let mut counts = [0usize; 4];
    for l in labels {
        counts[l.index()] += 1;
    }
    let total = labels.len();
    let scores = if total == 0 {
        [0.0; 4]
    } else {
        counts.map(|c| c as f64 / total as f64)
    };
    PersonaScores {
        user_id: user_id.to_owned(),
        scores,
        counts,
        total,
        undefined: total == 0,
    }
}

/// Users grouped by the abuse levels of the posts they reacted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discriminator {
    NormalOnly,
    AbusiveOnly,
    Mixed,
    NoReactions,
}

pub fn discriminator_class(reacted: &[AbuseLabel]) -> Discriminator {
    if reacted.is_empty() {
        Discriminator::NoReactions
    } else if reacted.iter().all(|&l| l == AbuseLabel::Normal) {
        Discriminator::NormalOnly
    } else if reacted.iter().all(|l| l.is_offensive()) {
        Discriminator::AbusiveOnly
    } else {
        Discriminator::Mixed
    }
}
