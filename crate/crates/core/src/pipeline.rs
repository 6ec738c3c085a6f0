//! End-to-end stages shared by the command-line tool, the examples and the
//! acceptance suite.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::blr::{blr_train, BlrConfig, BlrModel, LabelMode};
use crate::crowd::{predict_message, predict_message_noncrowdsourced, MessageVerdict};
use crate::datamodel::{AbuseLabel, Corpus};
use crate::error::{EvalError, ModelError};
use crate::eval::{compare_models, evaluate, split_messages, Comparison, EvalReport, Split};
use crate::features::persona::{discriminator_class, persona_scores, Discriminator, PersonaScores};
use crate::features::{
    baseline_feature_names, edge_feature_names, EdgeFeatureVector, FeatureTable, MessageFeatures,
    MESSAGE_DIM, MESSAGE_FEATURE_NAMES, USER_DIM, USER_FEATURE_NAMES,
};
use crate::forest::{rf_train, ForestConfig, ForestModel};
use crate::graph::{derive_cascades, MessageCascade};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Labeled messages as `(tweet_id, label)`, in corpus order.
pub fn labeled_messages(c: &Corpus) -> Vec<(String, AbuseLabel)> {
    c.tweets()
        .iter()
        .filter_map(|t| t.label.map(|l| (t.tweet_id.clone(), l)))
        .collect()
}

/// Cascades keyed by message id.
pub fn cascade_index(cascades: &[MessageCascade]) -> HashMap<&str, &MessageCascade> {
    cascades.iter().map(|c| (c.message_id.as_str(), c)).collect()
}

/// Edge vectors of every edge of the given messages, each tagged with its
/// message's label.
pub fn edge_training_set(
    table: &FeatureTable<'_>,
    cascades: &[MessageCascade],
    messages: &[String],
) -> (Vec<EdgeFeatureVector>, Vec<AbuseLabel>) {
    let keep: HashSet<&str> = messages.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in cascades.iter().filter(|c| keep.contains(c.message_id.as_str())) {
        let Some(label) = c.label else { continue };
        for e in &c.edges {
            rows.push(table.edge_vector(e));
            labels.push(label);
        }
    }
    (rows, labels)
}

/// Edge-level model trained on the cascades of `messages`.
pub fn train_crowd_model(
    table: &FeatureTable<'_>,
    cascades: &[MessageCascade],
    messages: &[String],
    mode: LabelMode,
    config: &BlrConfig,
) -> Result<BlrModel, ModelError> {
    let (rows, labels) = edge_training_set(table, cascades, messages);
    let rows: Vec<&[f64]> = rows.iter().map(EdgeFeatureVector::as_slice).collect();
    blr_train(&rows, &labels, mode, edge_feature_names(), config)
}

/// Message-level baseline trained on author and message features.
pub fn train_baseline_model(
    table: &FeatureTable<'_>,
    messages: &[String],
    mode: LabelMode,
    config: &BlrConfig,
) -> Result<BlrModel, ModelError> {
    let corpus = table.corpus();
    let mut rows = Vec::with_capacity(messages.len());
    let mut labels = Vec::with_capacity(messages.len());
    for id in messages {
        let t = corpus.tweet(id).expect("split ids come from the corpus");
        if let Some(l) = t.label {
            rows.push(table.baseline_vector(t));
            labels.push(l);
        }
    }
    blr_train(&rows, &labels, mode, baseline_feature_names(), config)
}

/// Crowdsourced verdicts, falling back to the baseline for messages without
/// edges. Output follows the order of `messages`.
pub fn predict_crowdsourced(
    table: &FeatureTable<'_>,
    cascades: &[MessageCascade],
    model: &BlrModel,
    baseline: &BlrModel,
    messages: &[String],
) -> Result<Vec<MessageVerdict>, ModelError> {
    let by_id = cascade_index(cascades);
    let corpus = table.corpus();
    messages
        .iter()
        .map(|id| {
            let t = corpus.tweet(id).expect("message ids come from the corpus");
            let msg = table.message(id).expect("message features exist");
            let author = table.user(&t.author_id).expect("author features exist");
            let cascade = by_id.get(id.as_str()).copied();
            let vectors: Vec<EdgeFeatureVector> = cascade
                .map(|c| c.edges.iter().map(|e| table.edge_vector(e)).collect())
                .unwrap_or_default();
            predict_message(
                model,
                baseline,
                id,
                cascade.map(|c| (c, vectors.as_slice())),
                msg,
                author,
            )
        })
        .collect()
}

/// Baseline verdicts for every message.
pub fn predict_noncrowdsourced(
    table: &FeatureTable<'_>,
    baseline: &BlrModel,
    messages: &[String],
) -> Result<Vec<MessageVerdict>, ModelError> {
    let corpus = table.corpus();
    messages
        .iter()
        .map(|id| {
            let t = corpus.tweet(id).expect("message ids come from the corpus");
            predict_message_noncrowdsourced(
                baseline,
                id,
                table.message(id).expect("message features exist"),
                table.user(&t.author_id).expect("author features exist"),
            )
        })
        .collect()
}

/// Scores verdicts against the corpus labels; unlabeled messages are skipped.
pub fn evaluate_verdicts(
    corpus: &Corpus,
    verdicts: &[MessageVerdict],
    mode: LabelMode,
) -> Result<EvalReport, EvalError> {
    let classes: Vec<String> = mode.classes().iter().map(|c| (*c).to_owned()).collect();
    let mut ids = Vec::new();
    let mut preds = Vec::new();
    let mut truths = Vec::new();
    for v in verdicts {
        let Some(label) = corpus.tweet(&v.message_id).and_then(|t| t.label) else {
            continue;
        };
        ids.push(v.message_id.clone());
        preds.push(v.class);
        truths.push(mode.class_of(label));
    }
    evaluate(&classes, &ids, &preds, &truths)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task1Config {
    pub mode: LabelMode,
    pub ratios: [f64; 3],
    pub seed: u64,
    pub blr: BlrConfig,
}

impl Default for Task1Config {
    fn default() -> Self {
        Self {
            mode: LabelMode::Multiclass,
            ratios: crate::eval::DEFAULT_RATIOS,
            seed: 0,
            blr: BlrConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Task1Outcome {
    pub split: Split,
    pub model: BlrModel,
    pub baseline: BlrModel,
    pub crowdsourced: Vec<MessageVerdict>,
    pub noncrowdsourced: Vec<MessageVerdict>,
    pub report_crowdsourced: EvalReport,
    pub report_noncrowdsourced: EvalReport,
    pub comparison: Comparison,
}

/// Splits the labeled messages, trains both models on the training part and
/// compares them on the test part.
pub fn run_task1(
    corpus: &Corpus,
    table: &FeatureTable<'_>,
    config: &Task1Config,
) -> Result<Task1Outcome, PipelineError> {
    let cascades = derive_cascades(corpus);
    let split = split_messages(&labeled_messages(corpus), config.ratios, config.seed)?;
    let blr = BlrConfig {
        seed: config.seed,
        ..config.blr.clone()
    };
    let model = train_crowd_model(table, &cascades, &split.train, config.mode, &blr)?;
    let baseline = train_baseline_model(table, &split.train, config.mode, &blr)?;
    let crowdsourced = predict_crowdsourced(table, &cascades, &model, &baseline, &split.test)?;
    let noncrowdsourced = predict_noncrowdsourced(table, &baseline, &split.test)?;
    let report_crowdsourced = evaluate_verdicts(corpus, &crowdsourced, config.mode)?;
    let report_noncrowdsourced = evaluate_verdicts(corpus, &noncrowdsourced, config.mode)?;
    let comparison = compare_models(&report_crowdsourced, &report_noncrowdsourced)?;
    Ok(Task1Outcome {
        split,
        model,
        baseline,
        crowdsourced,
        noncrowdsourced,
        report_crowdsourced,
        report_noncrowdsourced,
        comparison,
    })
}

/// Labels of the messages each user diffused, keyed by user id.
pub fn reacted_labels(corpus: &Corpus, cascades: &[MessageCascade]) -> BTreeMap<String, Vec<AbuseLabel>> {
    let mut out: BTreeMap<String, Vec<AbuseLabel>> = BTreeMap::new();
    for c in cascades {
        let Some(label) = c.label else { continue };
        for e in c.edges.iter().filter(|e| e.diffused) {
            out.entry(e.receiver_id.clone()).or_default().push(label);
        }
    }
    for u in corpus.users() {
        out.entry(u.user_id.clone()).or_default();
    }
    out
}

/// One row of `persona.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaRecord {
    pub user_id: String,
    pub scores: BTreeMap<String, f64>,
    pub labeled_posts: usize,
    pub undefined: bool,
    pub discriminator: Discriminator,
}

/// Persona scores and reaction classes for every user, sorted by id.
pub fn persona_report(corpus: &Corpus) -> Vec<PersonaRecord> {
    let cascades = derive_cascades(corpus);
    let reacted = reacted_labels(corpus, &cascades);
    let by_author = corpus.tweets_by_author();
    reacted
        .iter()
        .map(|(user, labels)| {
            let posted: Vec<AbuseLabel> = by_author
                .get(user.as_str())
                .map(|ts| ts.iter().filter_map(|t| t.label).collect())
                .unwrap_or_default();
            let p: PersonaScores = persona_scores(user, &posted);
            PersonaRecord {
                user_id: user.clone(),
                scores: AbuseLabel::ALL
                    .iter()
                    .map(|l| (l.as_str().to_owned(), p.score(*l)))
                    .collect(),
                labeled_posts: p.total,
                undefined: p.undefined,
                discriminator: discriminator_class(labels),
            }
        })
        .collect()
}

/// Design matrix rows with their names and class targets.
#[derive(Debug, Clone)]
pub struct RankingData {
    pub group: String,
    pub feature_names: Vec<String>,
    pub classes: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub targets: Vec<usize>,
}

impl RankingData {
    pub fn fit(&self, config: &ForestConfig) -> Result<ForestModel, ModelError> {
        let m = crate::blr::rows_to_matrix(&self.rows, self.feature_names.len())?;
        rf_train(m.view(), &self.targets, &self.classes, &self.feature_names, config)
    }
}

/// Per-user rows (user features ⊕ persona scores ⊕ mean message features)
/// with target "posts or reacts to offensive content".
pub fn user_ranking_data(corpus: &Corpus, table: &FeatureTable<'_>) -> RankingData {
    let cascades = derive_cascades(corpus);
    let reacted = reacted_labels(corpus, &cascades);
    let by_author = corpus.tweets_by_author();
    let mut names: Vec<String> = USER_FEATURE_NAMES.iter().map(|n| format!("user_{n}")).collect();
    names.extend(AbuseLabel::ALL.iter().map(|l| format!("persona_{}", l.as_str())));
    names.extend(MESSAGE_FEATURE_NAMES.iter().map(|n| format!("mean_msg_{n}")));
    let mut rows = Vec::with_capacity(corpus.users().len());
    let mut targets = Vec::with_capacity(corpus.users().len());
    for (user, reacted_to) in &reacted {
        let authored = by_author.get(user.as_str()).map(Vec::as_slice).unwrap_or(&[]);
        let posted: Vec<AbuseLabel> = authored.iter().filter_map(|t| t.label).collect();
        let mut row = Vec::with_capacity(USER_DIM + 4 + MESSAGE_DIM);
        row.extend(table.user(user).expect("every user has features").to_array());
        row.extend(persona_scores(user, &posted).scores);
        let mut mean = [0.0; MESSAGE_DIM];
        for t in authored {
            let f: &MessageFeatures = table.message(&t.tweet_id).expect("message features exist");
            for (m, v) in mean.iter_mut().zip(f.to_array()) {
                *m += v;
            }
        }
        if !authored.is_empty() {
            mean.iter_mut().for_each(|m| *m /= authored.len() as f64);
        }
        row.extend(mean);
        let offensive = posted.iter().chain(reacted_to).any(|l| l.is_offensive());
        rows.push(row);
        targets.push(usize::from(!offensive));
    }
    RankingData {
        group: "users".into(),
        feature_names: names,
        classes: vec!["offensive_involved".into(), "not_involved".into()],
        rows,
        targets,
    }
}

/// Label groups for edge-level rankings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeGroup {
    Offensive,
    Normal,
}

impl EdgeGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeGroup::Offensive => "offensive",
            EdgeGroup::Normal => "normal",
        }
    }

    pub fn contains(self, label: AbuseLabel) -> bool {
        match self {
            EdgeGroup::Offensive => label.is_offensive(),
            EdgeGroup::Normal => label == AbuseLabel::Normal,
        }
    }
}

/// Edge rows of one label group without the diffusion flag, with target
/// diffused / not diffused. `max_rows` keeps an evenly spaced subset of the
/// edges when the group is larger.
pub fn edge_ranking_data(
    table: &FeatureTable<'_>,
    cascades: &[MessageCascade],
    group: EdgeGroup,
    max_rows: Option<usize>,
) -> RankingData {
    let d = edge_feature_names().len() - 1;
    let edges: Vec<_> = cascades
        .iter()
        .filter(|c| c.label.is_some_and(|l| group.contains(l)))
        .flat_map(|c| c.edges.iter())
        .collect();
    let stride = match max_rows {
        Some(m) if m > 0 && edges.len() > m => edges.len().div_ceil(m),
        _ => 1,
    };
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for e in edges.iter().step_by(stride) {
        let v = table.edge_vector(e);
        rows.push(v.0[..d].to_vec());
        targets.push(usize::from(!e.diffused));
    }
    RankingData {
        group: group.as_str().into(),
        feature_names: edge_feature_names()[..d].to_vec(),
        classes: vec!["diffused".into(), "not_diffused".into()],
        rows,
        targets,
    }
}
