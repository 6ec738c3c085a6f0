//! Random forest of Gini decision trees, used to rank features by mean
//! decrease in impurity.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Candidate features per split; `None` means ⌈√d⌉.
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: None,
            min_leaf: 2,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        class: usize,
        counts: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub seed: u64,
    pub nodes: Vec<Node>,
    /// Impurity decrease per feature, normalized to sum 1 when the tree splits.
    pub importances: Vec<f64>,
}

impl Tree {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { class, .. } => return *class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_splits(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub features_per_split: usize,
    pub trees: Vec<Tree>,
    /// Mean of the per-tree importances, normalized to sum 1; all zero when
    /// no tree ever split.
    pub importances: Vec<f64>,
    pub oob_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub rank: usize,
    pub feature: String,
    pub importance: f64,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    config: &'a ForestConfig,
    mtry: usize,
    root_size: f64,
    nodes: Vec<Node>,
    importance: Vec<f64>,
    rng: ChaCha8Rng,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Builder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let counts = self.counts(&idx);
        let n = idx.len();
        let impurity = gini(&counts, n);
        let depth_ok = self.config.max_depth.is_none_or(|m| depth < m);
        let split = if impurity > 0.0 && depth_ok && n >= 2 * self.config.min_leaf {
            self.best_split(&idx, &counts, impurity)
        } else {
            None
        };
        let Some(split) = split else {
            self.nodes.push(Node::Leaf {
                class: majority(&counts),
                counts,
            });
            return self.nodes.len() - 1;
        };
        self.importance[split.feature] += split.decrease * n as f64 / self.root_size;
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf {
            class: 0,
            counts: vec![],
        });
        let left = self.grow(split.left, depth + 1);
        let right = self.grow(split.right, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        slot
    }

    fn best_split(&mut self, idx: &[usize], counts: &[usize], impurity: f64) -> Option<BestSplit> {
        let d = self.x.ncols();
        let candidates = sample(&mut self.rng, d, self.mtry.min(d));
        let n = idx.len();
        let min_leaf = self.config.min_leaf.max(1);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
        for feature in candidates.iter() {
            sorted.clear();
            sorted.extend(idx.iter().map(|&i| (self.x[[i, feature]], self.y[i])));
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0usize; self.n_classes];
            let mut right = counts.to_vec();
            for pos in 1..n {
                let (v, c) = sorted[pos - 1];
                left[c] += 1;
                right[c] -= 1;
                let next = sorted[pos].0;
                if next <= v || pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let weighted = (pos as f64 * gini(&left, pos)
                    + (n - pos) as f64 * gini(&right, n - pos))
                    / n as f64;
                let decrease = impurity - weighted;
                if decrease > 1e-12 && best.is_none_or(|(_, _, d)| decrease > d) {
                    best = Some((feature, v + (next - v) / 2.0, decrease));
                }
            }
        }
        let (feature, threshold, decrease) = best?;
        let (left, right) = idx
            .iter()
            .partition(|&&i| self.x[[i, feature]] <= threshold);
        Some(BestSplit {
            feature,
            threshold,
            decrease,
            left,
            right,
        })
    }
}

/// Trains a forest on rows `x` with class indices `y` into `classes`.
///
/// Tree `t` draws its bootstrap and feature subsets from its own seed, which
/// is the `t`-th draw of a ChaCha8 stream seeded with `config.seed`.
pub fn rf_train(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    classes: &[String],
    feature_names: &[String],
    config: &ForestConfig,
) -> Result<ForestModel, ModelError> {
    let n = x.nrows();
    let d = x.ncols();
    if n != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    if d != feature_names.len() {
        return Err(ModelError::DimensionMismatch {
            expected: feature_names.len(),
            actual: d,
        });
    }
    if n < 2 {
        return Err(ModelError::DegenerateTraining("need at least two samples".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= classes.len()) {
        return Err(ModelError::DegenerateTraining(format!("class index {bad} out of range")));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(ModelError::DegenerateTraining("only one class present".into()));
    }
    if config.n_trees == 0 {
        return Err(ModelError::InvalidConfig("n_trees must be ≥ 1".into()));
    }
    let mtry = config
        .features_per_split
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d.max(1));

    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.n_trees).map(|_| master.random()).collect();
    let k = classes.len();
    let mut oob_votes = vec![vec![0usize; k]; n];
    let mut trees = Vec::with_capacity(config.n_trees);

    for &seed in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut in_bag = vec![false; n];
        let idx: Vec<usize> = (0..n)
            .map(|_| {
                let i = rng.random_range(0..n);
                in_bag[i] = true;
                i
            })
            .collect();
        let mut b = Builder {
            x,
            y,
            n_classes: k,
            config,
            mtry,
            root_size: n as f64,
            nodes: Vec::new(),
            importance: vec![0.0; d],
            rng,
        };
        b.grow(idx, 0);
        let total: f64 = b.importance.iter().sum();
        if total > 0.0 {
            b.importance.iter_mut().for_each(|v| *v /= total);
        }
        let tree = Tree {
            seed,
            nodes: b.nodes,
            importances: b.importance,
        };
        for (i, votes) in oob_votes.iter_mut().enumerate() {
            if !in_bag[i] {
                votes[tree.predict(&x.row(i).to_vec())] += 1;
            }
        }
        trees.push(tree);
    }

    let mut importances = vec![0.0; d];
    for t in &trees {
        for (acc, v) in importances.iter_mut().zip(&t.importances) {
            *acc += v;
        }
    }
    let total: f64 = importances.iter().sum();
    if total > 0.0 {
        importances.iter_mut().for_each(|v| *v /= total);
    }

    let (hits, scored) = oob_votes
        .iter()
        .zip(y)
        .filter(|(v, _)| v.iter().any(|&c| c > 0))
        .fold((0usize, 0usize), |(h, s), (v, &c)| {
            (h + usize::from(majority(v) == c), s + 1)
        });
    let oob_accuracy = (scored > 0).then(|| hits as f64 / scored as f64);

    Ok(ForestModel {
        classes: classes.to_vec(),
        feature_names: feature_names.to_vec(),
        features_per_split: mtry,
        trees,
        importances,
        oob_accuracy,
    })
}

impl ForestModel {
    /// Per-tree vote counts over classes.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<usize>, ModelError> {
        if x.len() != self.feature_names.len() {
            return Err(ModelError::DimensionMismatch {
                expected: self.feature_names.len(),
                actual: x.len(),
            });
        }
        let mut votes = vec![0; self.classes.len()];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        Ok(votes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forest serializes")
    }
}

/// Majority vote over trees; ties go to the class listed first.
pub fn rf_predict(m: &ForestModel, x: &[f64]) -> Result<usize, ModelError> {
    Ok(majority(&m.votes(x)?))
}

/// Top `top_k` features by importance, descending, ties by name.
/// Empty when no tree found a split.
pub fn rf_rank_features(m: &ForestModel, top_k: usize) -> Vec<RankedFeature> {
    if m.importances.iter().all(|&v| v == 0.0) {
        log::warn!("forest has no splits; feature ranking is empty");
        return Vec::new();
    }
    let mut rows: Vec<(&String, f64)> = m.feature_names.iter().zip(m.importances.iter().copied()).collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    rows.into_iter()
        .take(top_k)
        .enumerate()
        .map(|(i, (name, importance))| RankedFeature {
            rank: i + 1,
            feature: name.clone(),
            importance,
        })
        .collect()
}

/// `rank<TAB>feature<TAB>importance` with a header row.
pub fn ranking_tsv(rows: &[RankedFeature]) -> String {
    let mut out = String::from("rank\tfeature\timportance\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\t{:.6}\n", r.rank, r.feature, r.importance));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn classes(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("c{i}")).collect()
    }

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    /// Feature 2 decides the class; the rest is noise.
    fn planted(seed: u64, n: usize) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 6), |_| rng.random::<f64>());
        let y = x.column(2).iter().map(|&v| usize::from(v > 0.5)).collect();
        (x, y)
    }

    #[test]
    fn informative_feature_dominates_every_tree() {
        let (x, y) = planted(1, 200);
        let cfg = ForestConfig {
            n_trees: 25,
            seed: 9,
            ..Default::default()
        };
        let m = rf_train(x.view(), &y, &classes(2), &names(6), &cfg).unwrap();
        for t in &m.trees {
            assert_eq!(crate::blr::argmax(&t.importances), 2, "{:?}", t.importances);
        }
        let top = rf_rank_features(&m, 1);
        assert_eq!(top[0].feature, "f2");
    }

    #[test]
    fn constant_feature_has_zero_importance() {
        let (mut x, y) = planted(2, 150);
        x.column_mut(4).fill(3.0);
        let m = rf_train(x.view(), &y, &classes(2), &names(6), &ForestConfig {
            n_trees: 20,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(m.importances[4], 0.0);
        let total: f64 = m.importances.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.importances.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn thresholds_lie_between_observed_values() {
        let (x, y) = planted(3, 120);
        let m = rf_train(x.view(), &y, &classes(2), &names(6), &ForestConfig {
            n_trees: 10,
            ..Default::default()
        })
        .unwrap();
        for t in &m.trees {
            for node in &t.nodes {
                if let Node::Split { feature, threshold, .. } = node {
                    let col = x.column(*feature);
                    assert!(col.iter().any(|&v| v < *threshold));
                    assert!(col.iter().any(|&v| v > *threshold));
                }
            }
        }
    }

    #[test]
    fn xor_stump_accuracy_at_most_three_quarters() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [0, 1, 1, 0];
        for seed in 0..20 {
            let cfg = ForestConfig {
                n_trees: 1,
                max_depth: Some(1),
                min_leaf: 1,
                features_per_split: Some(2),
                seed,
            };
            let m = rf_train(x.view(), &y, &classes(2), &names(2), &cfg).unwrap();
            let hits = x
                .outer_iter()
                .zip(&y)
                .filter(|(r, &c)| rf_predict(&m, &r.to_vec()).unwrap() == c)
                .count();
            assert!(hits <= 3);
        }
    }

    #[test]
    fn single_class_is_degenerate() {
        let x = array![[0.0], [1.0]];
        let err = rf_train(x.view(), &[1, 1], &classes(2), &names(1), &ForestConfig::default()).unwrap_err();
        assert!(matches!(err, ModelError::DegenerateTraining(_)));
    }

    #[test]
    fn vote_tie_goes_to_first_class() {
        let leaf = |class| Tree {
            seed: 0,
            nodes: vec![Node::Leaf {
                class,
                counts: vec![],
            }],
            importances: vec![0.0],
        };
        let mut m = ForestModel {
            classes: classes(4),
            feature_names: names(1),
            features_per_split: 1,
            trees: vec![leaf(3), leaf(1)],
            importances: vec![0.0],
            oob_accuracy: None,
        };
        assert_eq!(rf_predict(&m, &[0.0]).unwrap(), 1);
        m.trees.truncate(1);
        assert_eq!(rf_predict(&m, &[0.0]).unwrap(), 3);
        assert!(rf_predict(&m, &[0.0, 1.0]).is_err());
        assert!(rf_rank_features(&m, 5).is_empty());
    }

    #[test]
    fn ranking_ties_break_by_name_and_truncate() {
        let m = ForestModel {
            classes: classes(2),
            feature_names: vec!["b".into(), "a".into(), "c".into()],
            features_per_split: 1,
            trees: vec![],
            importances: vec![0.4, 0.4, 0.2],
            oob_accuracy: None,
        };
        let r = rf_rank_features(&m, 2);
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].feature.as_str(), r[1].feature.as_str()), ("a", "b"));
        assert_eq!(rf_rank_features(&m, 10).len(), 3);
        assert!(ranking_tsv(&r).starts_with("rank\tfeature\timportance\n1\ta\t0.400000\n"));
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = planted(4, 100);
        let cfg = ForestConfig {
            n_trees: 8,
            seed: 77,
            ..Default::default()
        };
        let a = rf_train(x.view(), &y, &classes(2), &names(6), &cfg).unwrap();
        let b = rf_train(x.view(), &y, &classes(2), &names(6), &cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn oob_accuracy_on_planted_fixture() {
        for seed in 0..10 {
            let (x, y) = planted(100 + seed, 200);
            let cfg = ForestConfig {
                n_trees: 30,
                seed,
                ..Default::default()
            };
            let m = rf_train(x.view(), &y, &classes(2), &names(6), &cfg).unwrap();
            assert!(m.oob_accuracy.unwrap() >= 0.9, "seed {seed}: {:?}", m.oob_accuracy);
        }
    }
}
