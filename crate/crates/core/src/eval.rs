//! Message-level splits, one-vs-rest classification metrics, and the
//! crowdsourced-versus-baseline comparison.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datamodel::AbuseLabel;
use crate::error::EvalError;

pub const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.3, 0.1];

/// Disjoint train/validation/test message ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub seed: u64,
    pub ratios: [f64; 3],
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

impl Split {
    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.val.len(), self.test.len()]
    }
}

/// Largest-remainder rounding of `total · ratios`; ties go to the earlier slot.
fn apportion(total: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let exact = ratios.map(|r| total as f64 * r);
    let mut out = exact.map(|v| (v + 1e-9).floor() as usize);
    let mut left = total - out.iter().sum::<usize>().min(total);
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - out[a] as f64;
        let fb = exact[b] - out[b] as f64;
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &j in order.iter().cycle() {
        if left == 0 {
            break;
        }
        out[j] += 1;
        left -= 1;
    }
    out
}

/// Stratified split at message level.
///
/// Per-class counts are within one message of `n_class · ratio`, and the
/// three set sizes equal the largest-remainder rounding of `n · ratios`.
pub fn split_messages(
    messages: &[(String, AbuseLabel)],
    ratios: [f64; 3],
    seed: u64,
) -> Result<Split, EvalError> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| !(0.0..=1.0).contains(r)) || (sum - 1.0).abs() > 1e-9 {
        return Err(EvalError::BadRatios(ratios.to_vec()));
    }
    if messages.is_empty() {
        return Err(EvalError::EmptyClass);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: Vec<Vec<&str>> = AbuseLabel::ALL
        .iter()
        .map(|&l| {
            let mut ids: Vec<&str> = messages
                .iter()
                .filter(|(_, m)| *m == l)
                .map(|(id, _)| id.as_str())
                .collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    for g in &mut groups {
        g.shuffle(&mut rng);
    }

    let totals = apportion(messages.len(), &ratios);
    let mut alloc: Vec<[usize; 3]> = groups
        .iter()
        .map(|g| ratios.map(|r| (g.len() as f64 * r + 1e-9).floor() as usize))
        .collect();
    let mut remaining: Vec<usize> = groups
        .iter()
        .zip(&alloc)
        .map(|(g, a)| g.len() - a.iter().sum::<usize>())
        .collect();
    let mut deficit: [usize; 3] =
        std::array::from_fn(|j| totals[j] - alloc.iter().map(|a| a[j]).sum::<usize>());

    let mut fractions = Vec::new();
    for (c, g) in groups.iter().enumerate() {
        for j in 0..3 {
            let exact = g.len() as f64 * ratios[j];
            fractions.push((exact - alloc[c][j] as f64, c, j));
        }
    }
    fractions.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(_, c, j) in &fractions {
        if remaining[c] > 0 && deficit[j] > 0 {
            alloc[c][j] += 1;
            remaining[c] -= 1;
            deficit[j] -= 1;
        }
    }
    for c in 0..groups.len() {
        for j in 0..3 {
            let take = remaining[c].min(deficit[j]);
            alloc[c][j] += take;
            remaining[c] -= take;
            deficit[j] -= take;
        }
    }

    let mut sets: [Vec<String>; 3] = Default::default();
    for (g, a) in groups.iter().zip(&alloc) {
        let mut start = 0;
        for j in 0..3 {
            sets[j].extend(g[start..start + a[j]].iter().map(|s| (*s).to_owned()));
            start += a[j];
        }
    }
    for s in &mut sets {
        s.sort();
    }
    let [train, val, test] = sets;
    Ok(Split {
        seed,
        ratios,
        train,
        val,
        test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// One-vs-rest precision, recall and F1 for `positive`. Zero denominators
/// yield 0. F1 is taken from the counts as `2tp / (2tp + fp + fn)`, the
/// harmonic mean in a single rounding.
pub fn precision_recall_f1(
    predictions: &[usize],
    truths: &[usize],
    positive: usize,
) -> Result<Prf, EvalError> {
    if predictions.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&p, &t) in predictions.iter().zip(truths) {
        match (p == positive, t == positive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    Ok(Prf {
        precision,
        recall,
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[truth][prediction]`.
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// Messages the report was computed on, sorted.
    pub message_ids: Vec<String>,
}

pub fn evaluate(
    classes: &[String],
    message_ids: &[String],
    predictions: &[usize],
    truths: &[usize],
) -> Result<EvalReport, EvalError> {
    if predictions.len() != truths.len() || message_ids.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in predictions.iter().zip(truths) {
        confusion[t][p] += 1;
    }
    let mut per_class = Vec::with_capacity(k);
    for (c, name) in classes.iter().enumerate() {
        let prf = precision_recall_f1(predictions, truths, c)?;
        per_class.push(ClassMetrics {
            class: name.clone(),
            precision: prf.precision,
            recall: prf.recall,
            f1: prf.f1,
            support: confusion[c].iter().sum(),
        });
    }
    let mean = |f: fn(&ClassMetrics) -> f64| {
        if k == 0 {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / k as f64
        }
    };
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let mut ids = message_ids.to_vec();
    ids.sort();
    Ok(EvalReport {
        classes: classes.to_vec(),
        accuracy: if truths.is_empty() {
            0.0
        } else {
            correct as f64 / truths.len() as f64
        },
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        per_class,
        confusion,
        message_ids: ids,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassComparison {
    pub class: String,
    pub cro: ClassMetrics,
    pub noncro: ClassMetrics,
    /// `F1_cro − F1_noncro`.
    pub delta_f1: f64,
    /// `delta_f1 / F1_noncro`, absent when the baseline F1 is 0.
    pub relative_delta_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ClassComparison>,
    pub macro_f1_cro: f64,
    pub macro_f1_noncro: f64,
    pub macro_delta_f1: f64,
    pub macro_relative_delta_f1: Option<f64>,
}

fn relative(delta: f64, base: f64) -> Option<f64> {
    (base != 0.0).then(|| delta / base)
}

/// Per-class F1 deltas of two reports over the same messages and classes.
pub fn compare_models(cro: &EvalReport, noncro: &EvalReport) -> Result<Comparison, EvalError> {
    let a: HashSet<&String> = cro.message_ids.iter().collect();
    let b: HashSet<&String> = noncro.message_ids.iter().collect();
    if a != b || cro.classes != noncro.classes {
        return Err(EvalError::SplitMismatch);
    }
    let rows = cro
        .per_class
        .iter()
        .zip(&noncro.per_class)
        .map(|(c, n)| {
            let delta = c.f1 - n.f1;
            ClassComparison {
                class: c.class.clone(),
                cro: c.clone(),
                noncro: n.clone(),
                delta_f1: delta,
                relative_delta_f1: relative(delta, n.f1),
            }
        })
        .collect();
    let delta = cro.macro_f1 - noncro.macro_f1;
    Ok(Comparison {
        rows,
        macro_f1_cro: cro.macro_f1,
        macro_f1_noncro: noncro.macro_f1,
        macro_delta_f1: delta,
        macro_relative_delta_f1: relative(delta, noncro.macro_f1),
    })
}

impl Comparison {
    /// Plain-text table: class, CRO P/R/F1, nonCRO P/R/F1, absolute and
    /// relative F1 change.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14} {:>7} {:>7} {:>7}   {:>9} {:>9} {:>9}   {:>7} {:>8}",
            "class", "CRO-P", "CRO-R", "CRO-F1", "nonCRO-P", "nonCRO-R", "nonCRO-F1", "dF1", "dF1/F1"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<14} {:>7.2} {:>7.2} {:>7.2}   {:>9.2} {:>9.2} {:>9.2}   {:>+7.2} {:>8}",
                r.class,
                r.cro.precision,
                r.cro.recall,
                r.cro.f1,
                r.noncro.precision,
                r.noncro.recall,
                r.noncro.f1,
                r.delta_f1,
                fmt_rel(r.relative_delta_f1),
            );
        }
        let _ = writeln!(
            out,
            "{:<14} {:>7} {:>7} {:>7.2}   {:>9} {:>9} {:>9.2}   {:>+7.2} {:>8}",
            "macro",
            "",
            "",
            self.macro_f1_cro,
            "",
            "",
            self.macro_f1_noncro,
            self.macro_delta_f1,
            fmt_rel(self.macro_relative_delta_f1),
        );
        out
    }
}

fn fmt_rel(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_owned(), |v| format!("{:+.0}%", 100.0 * v))
}

/// Union of the three sets, for partition checks.
pub fn split_union(s: &Split) -> BTreeSet<&str> {
    s.train
        .iter()
        .chain(&s.val)
        .chain(&s.test)
        .map(String::as_str)
        .collect()
}
