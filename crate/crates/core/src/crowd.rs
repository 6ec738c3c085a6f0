//! Message-level verdicts from edge-level predictions.
//!
//! A message that travelled along `n ≥ 1` edges gets the label most edges
//! voted for. Ties go to the tied class with the highest mean posterior, then
//! to the class listed first. Messages nobody was exposed to are scored by a
//! baseline over author and message features only.

use serde::{Deserialize, Serialize};

use crate::blr::{argmax, BlrModel, LabelMode};
use crate::error::ModelError;
use crate::features::{assemble_baseline_vector, EdgeFeatureVector, MessageFeatures, UserFeatures};
use crate::graph::MessageCascade;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictMode {
    Crowdsourced,
    FallbackNoncrowdsourced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageVerdict {
    pub message_id: String,
    pub classes: Vec<String>,
    /// Index into `classes`.
    pub class: usize,
    pub mode: VerdictMode,
    pub n_edges: usize,
    pub votes: Vec<usize>,
    pub mean_posterior: Vec<f64>,
}

impl MessageVerdict {
    pub fn label(&self) -> &str {
        &self.classes[self.class]
    }
}

/// Outcome of counting per-edge arg-max votes.
#[derive(Debug, Clone, PartialEq)]
pub struct Vote {
    pub winner: usize,
    pub votes: Vec<usize>,
    pub mean_posterior: Vec<f64>,
}

/// Majority vote over per-edge posteriors. Panics on an empty slice.
pub fn majority_vote(posteriors: &[Vec<f64>]) -> Vote {
    assert!(!posteriors.is_empty(), "vote needs at least one edge");
    let k = posteriors[0].len();
    let mut votes = vec![0usize; k];
    let mut mean = vec![0.0; k];
    for p in posteriors {
        votes[argmax(p)] += 1;
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v;
        }
    }
    let n = posteriors.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    let top = *votes.iter().max().expect("k ≥ 1");
    let mut winner = None::<usize>;
    for c in (0..k).filter(|&c| votes[c] == top) {
        if winner.is_none_or(|w| mean[c] > mean[w]) {
            winner = Some(c);
        }
    }
    Vote {
        winner: winner.expect("some class has the top count"),
        votes,
        mean_posterior: mean,
    }
}

fn verdict(message_id: &str, classes: &[String], mode: VerdictMode, n_edges: usize, vote: Vote) -> MessageVerdict {
    MessageVerdict {
        message_id: message_id.to_owned(),
        classes: classes.to_vec(),
        class: vote.winner,
        mode,
        n_edges,
        votes: vote.votes,
        mean_posterior: vote.mean_posterior,
    }
}

fn edge_posteriors(
    m: &BlrModel,
    cascade: &MessageCascade,
    vectors: &[EdgeFeatureVector],
) -> Result<Vec<Vec<f64>>, ModelError> {
    if cascade.edges.is_empty() {
        return Err(ModelError::EmptyCascade);
    }
    if vectors.len() != cascade.edges.len() {
        return Err(ModelError::DimensionMismatch {
            expected: cascade.edges.len(),
            actual: vectors.len(),
        });
    }
    vectors.iter().map(|v| m.predict_proba(v.as_slice())).collect()
}

/// Majority label over the cascade's edges; `vectors[i]` belongs to edge `i`.
pub fn predict_message_crowdsourced(
    m: &BlrModel,
    cascade: &MessageCascade,
    vectors: &[EdgeFeatureVector],
) -> Result<MessageVerdict, ModelError> {
    let posteriors = edge_posteriors(m, cascade, vectors)?;
    Ok(verdict(
        &cascade.message_id,
        &m.classes,
        VerdictMode::Crowdsourced,
        posteriors.len(),
        majority_vote(&posteriors),
    ))
}

/// Single prediction from author and message features (27 values).
pub fn predict_message_noncrowdsourced(
    baseline: &BlrModel,
    message_id: &str,
    msg: &MessageFeatures,
    author: &UserFeatures,
) -> Result<MessageVerdict, ModelError> {
    let x = assemble_baseline_vector(author, msg);
    let p = baseline.predict_proba(&x)?;
    let mut vote = majority_vote(&[p]);
    vote.votes.iter_mut().for_each(|v| *v = 0);
    Ok(verdict(
        message_id,
        &baseline.classes,
        VerdictMode::FallbackNoncrowdsourced,
        0,
        vote,
    ))
}

/// Collapses a four-class posterior to `[offensive, not_offensive]`.
pub fn collapse_offensive(p: &[f64]) -> Vec<f64> {
    let offensive = p[0] + p[1];
    vec![offensive, 1.0 - offensive]
}

/// Binary offensive verdict by majority over the cascade.
///
/// A binary model votes directly; a four-class model has each edge
/// posterior collapsed first, so an edge votes offensive when
/// `p(abusive) + p(hate) > 1/2`.
pub fn predict_offensive(
    m: &BlrModel,
    cascade: &MessageCascade,
    vectors: &[EdgeFeatureVector],
) -> Result<MessageVerdict, ModelError> {
    let posteriors = edge_posteriors(m, cascade, vectors)?;
    let posteriors: Vec<Vec<f64>> = match m.mode {
        LabelMode::Offensive => posteriors,
        LabelMode::Multiclass => posteriors.iter().map(|p| collapse_offensive(p)).collect(),
    };
    let classes: Vec<String> = LabelMode::Offensive
        .classes()
        .iter()
        .map(|c| (*c).to_owned())
        .collect();
    Ok(verdict(
        &cascade.message_id,
        &classes,
        VerdictMode::Crowdsourced,
        posteriors.len(),
        majority_vote(&posteriors),
    ))
}

/// Routes a message to the crowdsourced path when it has edges and to the
/// baseline otherwise.
pub fn predict_message(
    model: &BlrModel,
    baseline: &BlrModel,
    message_id: &str,
    cascade: Option<(&MessageCascade, &[EdgeFeatureVector])>,
    msg: &MessageFeatures,
    author: &UserFeatures,
) -> Result<MessageVerdict, ModelError> {
    match cascade {
        Some((c, v)) if !c.edges.is_empty() => predict_message_crowdsourced(model, c, v),
        _ => predict_message_noncrowdsourced(baseline, message_id, msg, author),
    }
}

/// One row of `verdicts.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub message_id: String,
    pub label: String,
    pub mode: VerdictMode,
    pub n_edges: usize,
    pub votes: std::collections::BTreeMap<String, usize>,
    pub mean_posterior: std::collections::BTreeMap<String, f64>,
}

impl From<&MessageVerdict> for VerdictRecord {
    fn from(v: &MessageVerdict) -> Self {
        VerdictRecord {
            message_id: v.message_id.clone(),
            label: v.label().to_owned(),
            mode: v.mode,
            n_edges: v.n_edges,
            votes: v.classes.iter().cloned().zip(v.votes.iter().copied()).collect(),
            mean_posterior: v
                .classes
                .iter()
                .cloned()
                .zip(v.mean_posterior.iter().copied())
                .collect(),
        }
    }
}
