//! Multinomial logistic regression fitted by MAP estimation.
//!
//! The prior is an isotropic Gaussian with variance `sigma2` on every
//! non-intercept weight, so the objective maximized is
//!
//! ```text
//! Σ_i log softmax(W x̃_i)[y_i] − ‖W_{:,1..}‖² / (2 σ²)
//! ```
//!
//! where `x̃ = [1, standardize(x)]`. Features named as counts get `log1p`
//! before z-scoring; the statistics are stored with the model so callers
//! always pass raw vectors.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::datamodel::AbuseLabel;
use crate::error::ModelError;
use crate::features::is_count_feature;

/// Which target the classifier predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Abusive, hate, spam, normal.
    #[default]
    Multiclass,
    /// Offensive (abusive or hate) versus everything else.
    Offensive,
}

impl LabelMode {
    pub fn classes(self) -> &'static [&'static str] {
        match self {
            LabelMode::Multiclass => &["abusive", "hate", "spam", "normal"],
            LabelMode::Offensive => &["offensive", "not_offensive"],
        }
    }

    pub fn n_classes(self) -> usize {
        self.classes().len()
    }

    pub fn class_of(self, label: AbuseLabel) -> usize {
        match self {
            LabelMode::Multiclass => label.index(),
            LabelMode::Offensive => usize::from(!label.is_offensive()),
        }
    }
}

impl std::str::FromStr for LabelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiclass" => Ok(LabelMode::Multiclass),
            "offensive" => Ok(LabelMode::Offensive),
            other => Err(format!("unknown mode `{other}` (expected multiclass or offensive)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlrConfig {
    /// Prior variance on non-intercept weights.
    pub sigma2: f64,
    pub max_iters: usize,
    /// Stop once an accepted step improves the objective by less than
    /// `tol · max(1, |objective|)`.
    pub tol: f64,
    /// First trial step length, in units of `1 / n_samples`. Later trials
    /// start from the Barzilai–Borwein estimate.
    pub initial_step: f64,
    /// Step shrink factor during backtracking.
    pub backtrack: f64,
    /// Sufficient-increase constant of the Armijo test.
    pub armijo: f64,
    pub seed: u64,
}

impl Default for BlrConfig {
    fn default() -> Self {
        Self {
            sigma2: 100.0,
            max_iters: 5000,
            tol: 1e-8,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            seed: 0,
        }
    }
}

/// `log1p` mask plus z-score statistics learned from the training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub log1p: Vec<bool>,
    pub mean: Vec<f64>,
    /// Zero-variance features get a std of 1.
    pub std: Vec<f64>,
}

impl Standardization {
    pub fn fit(x: ArrayView2<'_, f64>, log1p: Vec<bool>) -> Self {
        let d = x.ncols();
        let n = x.nrows().max(1) as f64;
        let mut mean = vec![0.0; d];
        let mut std = vec![1.0; d];
        for j in 0..d {
            let col = x.column(j);
            let tr = |v: f64| if log1p[j] { v.ln_1p() } else { v };
            let m = col.iter().map(|&v| tr(v)).sum::<f64>() / n;
            let var = col.iter().map(|&v| (tr(v) - m).powi(2)).sum::<f64>() / n;
            mean[j] = m;
            let sd = var.sqrt();
            std[j] = if sd > 1e-12 { sd } else { 1.0 };
        }
        Self { log1p, mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for j in 0..x.len() {
            let v = if self.log1p[j] { x[j].ln_1p() } else { x[j] };
            out[j] = (v - self.mean[j]) / self.std[j];
        }
    }

    /// Rows of `x` transformed and prefixed with a bias column of ones.
    pub fn design(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut z = Array2::<f64>::ones((x.nrows(), x.ncols() + 1));
        for (src, mut dst) in x.outer_iter().zip(z.outer_iter_mut()) {
            let src = src.to_vec();
            let dst = dst.as_slice_mut().expect("row-major design matrix");
            self.apply(&src, &mut dst[1..]);
        }
        z
    }
}

/// Training summary stored alongside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    /// Last few accepted objective values, oldest first.
    pub objective_trace_tail: Vec<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlrModel {
    pub mode: LabelMode,
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    /// K rows of `d + 1` weights, intercept first.
    pub weights: Vec<Vec<f64>>,
    pub sigma2: f64,
    pub standardization: Standardization,
    pub meta: TrainingMeta,
}

const TRACE_TAIL: usize = 10;

/// Objective and gradient of the MAP problem on a fixed design matrix.
pub struct MapObjective<'a> {
    design: ArrayView2<'a, f64>,
    targets: &'a [usize],
    n_classes: usize,
    sigma2: f64,
}

impl<'a> MapObjective<'a> {
    pub fn new(
        design: ArrayView2<'a, f64>,
        targets: &'a [usize],
        n_classes: usize,
        sigma2: f64,
    ) -> Self {
        assert_eq!(design.nrows(), targets.len());
        Self {
            design,
            targets,
            n_classes,
            sigma2,
        }
    }

    fn penalty(&self, w: &Array2<f64>) -> f64 {
        w.slice(s![.., 1..]).iter().map(|v| v * v).sum::<f64>() / (2.0 * self.sigma2)
    }

    pub fn value(&self, w: &Array2<f64>) -> f64 {
        let logits = self.design.dot(&w.t());
        let mut ll = 0.0;
        for (row, &y) in logits.outer_iter().zip(self.targets) {
            ll += row[y] - log_sum_exp(row);
        }
        ll - self.penalty(w)
    }

    /// Objective value and gradient in one pass.
    pub fn value_and_gradient(&self, w: &Array2<f64>) -> (f64, Array2<f64>) {
        let mut resid = self.design.dot(&w.t());
        let mut ll = 0.0;
        for (mut row, &y) in resid.outer_iter_mut().zip(self.targets) {
            let lse = log_sum_exp(row.view());
            ll += row[y] - lse;
            row.mapv_inplace(|v| -(v - lse).exp());
            row[y] += 1.0;
        }
        let mut grad = resid.t().dot(&self.design);
        let mut reg = w.clone() / self.sigma2;
        reg.column_mut(0).fill(0.0);
        grad -= &reg;
        (ll - self.penalty(w), grad)
    }

    pub fn gradient(&self, w: &Array2<f64>) -> Array2<f64> {
        self.value_and_gradient(w).1
    }

    pub fn n_params(&self) -> (usize, usize) {
        (self.n_classes, self.design.ncols())
    }
}

fn log_sum_exp(row: ArrayView1<'_, f64>) -> f64 {
    let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if !m.is_finite() {
        return m;
    }
    m + row.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - m).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Fits a MAP model on raw feature rows `x` with class indices `y`.
pub fn blr_fit(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    mode: LabelMode,
    feature_names: &[String],
    config: &BlrConfig,
) -> Result<BlrModel, ModelError> {
    let k = mode.n_classes();
    if config.sigma2.is_nan() || config.sigma2 <= 0.0 {
        return Err(ModelError::InvalidConfig("sigma2 must be > 0".into()));
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(ModelError::InvalidConfig("tol must be > 0".into()));
    }
    if x.nrows() != y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    if x.ncols() != feature_names.len() {
        return Err(ModelError::DimensionMismatch {
            expected: feature_names.len(),
            actual: x.ncols(),
        });
    }
    if y.len() < k {
        return Err(ModelError::DegenerateTraining(format!(
            "{} samples for {k} classes",
            y.len()
        )));
    }
    let mut support = vec![0usize; k];
    for &c in y {
        if c >= k {
            return Err(ModelError::DegenerateTraining(format!("class index {c} out of range")));
        }
        support[c] += 1;
    }
    if let Some(c) = support.iter().position(|&n| n == 0) {
        return Err(ModelError::DegenerateTraining(format!(
            "class `{}` has no samples",
            mode.classes()[c]
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::DegenerateTraining("non-finite feature value".into()));
    }

    let log1p = feature_names.iter().map(|n| is_count_feature(n)).collect();
    let standardization = Standardization::fit(x, log1p);
    let design = standardization.design(x);
    let problem = MapObjective::new(design.view(), y, k, config.sigma2);
    let (w, meta) = ascend(&problem, config)?;

    Ok(BlrModel {
        mode,
        classes: mode.classes().iter().map(|c| (*c).to_owned()).collect(),
        feature_names: feature_names.to_vec(),
        weights: w.outer_iter().map(|r| r.to_vec()).collect(),
        sigma2: config.sigma2,
        standardization,
        meta,
    })
}

/// Gradient ascent from zero weights with Barzilai–Borwein trial steps and
/// Armijo backtracking; every accepted step increases the objective.
fn ascend(problem: &MapObjective<'_>, config: &BlrConfig) -> Result<(Array2<f64>, TrainingMeta), ModelError> {
    ascend_traced(problem, config).map(|(w, meta, _)| (w, meta))
}

fn ascend_traced(
    problem: &MapObjective<'_>,
    config: &BlrConfig,
) -> Result<(Array2<f64>, TrainingMeta, Vec<f64>), ModelError> {
    let (k, p) = problem.n_params();
    let n = problem.targets.len();
    let mut w = Array2::<f64>::zeros((k, p));
    let (mut f, mut g) = problem.value_and_gradient(&w);
    if !f.is_finite() {
        return Err(ModelError::NonFinite { iteration: 0 });
    }
    let mut trace = vec![f];
    let mut step = config.initial_step / n as f64;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iters {
        iterations += 1;
        let g_sq: f64 = g.iter().map(|v| v * v).sum();
        if g_sq == 0.0 {
            converged = true;
            break;
        }
        let mut t = step;
        let mut accepted = None;
        for _ in 0..60 {
            let candidate = &w + &(&g * t);
            let fc = problem.value(&candidate);
            if fc.is_nan() {
                return Err(ModelError::NonFinite { iteration: iterations });
            }
            if fc >= f + config.armijo * t * g_sq {
                accepted = Some((candidate, fc));
                break;
            }
            t *= config.backtrack;
        }
        let Some((w_new, f_new)) = accepted else {
            // no ascent direction left at machine precision
            converged = true;
            break;
        };
        if !f_new.is_finite() {
            return Err(ModelError::NonFinite { iteration: iterations });
        }
        let (_, g_new) = problem.value_and_gradient(&w_new);
        let improvement = f_new - f;

        // BB1 step for the next iteration: s·s / s·(g_old − g_new)
        let s_vec = &w_new - &w;
        let y_vec = &g - &g_new;
        let sy: f64 = s_vec.iter().zip(y_vec.iter()).map(|(a, b)| a * b).sum();
        let ss: f64 = s_vec.iter().map(|v| v * v).sum();
        step = if sy > 0.0 && ss > 0.0 { ss / sy } else { t * 2.0 };

        w = w_new;
        f = f_new;
        g = g_new;
        trace.push(f);
        if improvement < config.tol * f.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    log::debug!("map ascent: {iterations} iterations, objective {f}, converged {converged}");
    let meta = TrainingMeta {
        seed: config.seed,
        iterations,
        converged,
        objective: f,
        objective_trace_tail: trace[trace.len().saturating_sub(TRACE_TAIL)..].to_vec(),
        n_samples: n,
    };
    Ok((w, meta, trace))
}

/// Trains on abuse-labeled vectors; labels are mapped through `mode`.
pub fn blr_train<V: AsRef<[f64]>>(
    x: &[V],
    labels: &[AbuseLabel],
    mode: LabelMode,
    feature_names: &[String],
    config: &BlrConfig,
) -> Result<BlrModel, ModelError> {
    let m = rows_to_matrix(x, feature_names.len())?;
    let y: Vec<usize> = labels.iter().map(|&l| mode.class_of(l)).collect();
    blr_fit(m.view(), &y, mode, feature_names, config)
}

pub fn rows_to_matrix<V: AsRef<[f64]>>(rows: &[V], d: usize) -> Result<Array2<f64>, ModelError> {
    let mut m = Array2::<f64>::zeros((rows.len(), d));
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_ref();
        if r.len() != d {
            return Err(ModelError::DimensionMismatch {
                expected: d,
                actual: r.len(),
            });
        }
        m.row_mut(i).assign(&ArrayView1::from(r));
    }
    Ok(m)
}

impl BlrModel {
    /// Model with all weights zero, which predicts the uniform distribution.
    pub fn zeros(mode: LabelMode, feature_names: &[String]) -> Self {
        let d = feature_names.len();
        Self {
            mode,
            classes: mode.classes().iter().map(|c| (*c).to_owned()).collect(),
            feature_names: feature_names.to_vec(),
            weights: vec![vec![0.0; d + 1]; mode.n_classes()],
            sigma2: BlrConfig::default().sigma2,
            standardization: Standardization {
                log1p: feature_names.iter().map(|n| is_count_feature(n)).collect(),
                mean: vec![0.0; d],
                std: vec![1.0; d],
            },
            meta: TrainingMeta {
                seed: 0,
                iterations: 0,
                converged: false,
                objective: 0.0,
                objective_trace_tail: vec![],
                n_samples: 0,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn weight_matrix(&self) -> Array2<f64> {
        let k = self.weights.len();
        let p = self.dim() + 1;
        Array2::from_shape_fn((k, p), |(i, j)| self.weights[i][j])
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let mut z = vec![0.0; x.len()];
        self.standardization.apply(x, &mut z);
        let logits: Vec<f64> = self
            .weights
            .iter()
            .map(|w| w[0] + w[1..].iter().zip(&z).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        Ok(softmax(&logits))
    }

    /// Arg-max class index; ties go to the lowest index.
    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    /// MAP objective of the current weights on raw rows `x`.
    pub fn objective(&self, x: ArrayView2<'_, f64>, y: &[usize]) -> f64 {
        let design = self.standardization.design(x);
        MapObjective::new(design.view(), y, self.n_classes(), self.sigma2)
            .value(&self.weight_matrix())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// Central-difference check (h = 1e-5) of the analytic gradient at the
/// model's current weights on a batch of raw rows.
///
/// Returns the largest `|analytic − numeric| / max(|analytic|, |numeric|, 1e-3)`.
pub fn blr_gradient_check(model: &BlrModel, x: ArrayView2<'_, f64>, y: &[usize]) -> f64 {
    const H: f64 = 1e-5;
    let design = model.standardization.design(x);
    let problem = MapObjective::new(design.view(), y, model.n_classes(), model.sigma2);
    let w = model.weight_matrix();
    let analytic = problem.gradient(&w);
    let mut worst: f64 = 0.0;
    for idx in ndarray::indices_of(&w) {
        let mut plus = w.clone();
        plus[idx] += H;
        let mut minus = w.clone();
        minus[idx] -= H;
        let numeric = (problem.value(&plus) - problem.value(&minus)) / (2.0 * H);
        let a = analytic[idx];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-3);
        worst = worst.max(rel);
    }
    worst
}

/// Column means of the predicted probabilities, a quick calibration view.
pub fn mean_probabilities(model: &BlrModel, x: ArrayView2<'_, f64>) -> Result<Vec<f64>, ModelError> {
    let mut acc = Array1::<f64>::zeros(model.n_classes());
    for row in x.axis_iter(Axis(0)) {
        let p = model.predict_proba(&row.to_vec())?;
        acc += &ArrayView1::from(&p[..]);
    }
    let n = x.nrows().max(1) as f64;
    Ok((acc / n).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    /// 20 points, class 1 iff x0 + x1 > 0, margin ≥ 0.5.
    fn separable() -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        while y.len() < 20 {
            let a: f64 = rng.random_range(-3.0..3.0);
            let b: f64 = rng.random_range(-3.0..3.0);
            if (a + b).abs() < 0.5 {
                continue;
            }
            rows.push(vec![a, b]);
            y.push(usize::from(a + b > 0.0));
        }
        if !y.contains(&0) || !y.contains(&1) {
            unreachable!("fixture has both classes");
        }
        (rows_to_matrix(&rows, 2).unwrap(), y)
    }

    #[test]
    fn separable_fixture_is_fit_exactly() {
        let (x, y) = separable();
        let cfg = BlrConfig {
            sigma2: 1e4,
            ..Default::default()
        };
        let m = blr_fit(x.view(), &y, LabelMode::Offensive, &names(2), &cfg).unwrap();
        for (row, &c) in x.outer_iter().zip(&y) {
            assert_eq!(m.predict(&row.to_vec()).unwrap(), c);
        }
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = BlrModel::zeros(LabelMode::Multiclass, &names(3));
        let p = m.predict_proba(&[5.0, -1.0, 2.0]).unwrap();
        for v in p {
            assert!((v - 0.25).abs() < 1e-15);
        }
        assert_eq!(m.predict(&[0.0, 0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn tiny_prior_variance_predicts_class_priors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 400;
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = [0, 0, 1, 2, 3, 3, 3, 3, 3, 3][i % 10];
            rows.push(vec![rng.random::<f64>() + c as f64, rng.random::<f64>()]);
            y.push(c);
        }
        let x = rows_to_matrix(&rows, 2).unwrap();
        let cfg = BlrConfig {
            sigma2: 1e-6,
            ..Default::default()
        };
        let m = blr_fit(x.view(), &y, LabelMode::Multiclass, &names(2), &cfg).unwrap();
        for w in &m.weights {
            assert!(w[1..].iter().all(|v| v.abs() < 1e-3), "{w:?}");
        }
        let priors = [0.2, 0.1, 0.1, 0.6];
        let p = m.predict_proba(&[0.3, 0.7]).unwrap();
        for (a, b) in p.iter().zip(priors) {
            assert!((a - b).abs() < 0.02, "{p:?}");
        }
    }

    #[test]
    fn missing_class_is_degenerate() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let err = blr_fit(x.view(), &[0, 0, 1, 1], LabelMode::Multiclass, &names(1), &BlrConfig::default())
            .unwrap_err();
        assert!(matches!(err, ModelError::DegenerateTraining(_)));
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let m = BlrModel::zeros(LabelMode::Multiclass, &names(3));
        assert_eq!(
            m.predict_proba(&[1.0]).unwrap_err(),
            ModelError::DimensionMismatch {
                expected: 3,
                actual: 1
            }
        );
    }

    #[test]
    fn standardization_is_internal() {
        // Same data offset by a constant gives the same fitted predictions.
        let (x, y) = separable();
        let shifted = &x + 10.0;
        let cfg = BlrConfig::default();
        let a = blr_fit(x.view(), &y, LabelMode::Offensive, &names(2), &cfg).unwrap();
        let b = blr_fit(shifted.view(), &y, LabelMode::Offensive, &names(2), &cfg).unwrap();
        for (ra, rb) in x.outer_iter().zip(shifted.outer_iter()) {
            let pa = a.predict_proba(&ra.to_vec()).unwrap();
            let pb = b.predict_proba(&rb.to_vec()).unwrap();
            assert!((pa[0] - pb[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn single_sample_binary_gradient_matches_closed_form() {
        // One sample z = [1, z1], K = 2, y = 0, weights w0 = [a0, a1], w1 = [b0, b1].
        // ∂/∂w0 = (1 − p0) z − [0, a1]/σ², ∂/∂w1 = −p1 z − [0, b1]/σ².
        let design = array![[1.0, 0.7]];
        let w = array![[0.2, -0.4], [0.1, 0.3]];
        let sigma2 = 2.0;
        let problem = MapObjective::new(design.view(), &[0], 2, sigma2);
        let g = problem.gradient(&w);
        let s0: f64 = 0.2 + -0.4 * 0.7;
        let s1: f64 = 0.1 + 0.3 * 0.7;
        let p0 = s0.exp() / (s0.exp() + s1.exp());
        let p1 = 1.0 - p0;
        let expected = array![
            [1.0 - p0, (1.0 - p0) * 0.7 + 0.4 / sigma2],
            [-p1, -p1 * 0.7 - 0.3 / sigma2]
        ];
        for (a, b) in g.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-14, "{g} vs {expected}");
        }
    }

    #[test]
    fn prior_does_not_touch_intercepts() {
        let design = Array2::<f64>::zeros((0, 3));
        let problem = MapObjective::new(design.view(), &[], 2, 0.5);
        let w = array![[1.5, 1.0, -2.0], [-0.5, 0.5, 0.0]];
        let g = problem.gradient(&w);
        assert_eq!(g[[0, 0]], 0.0);
        assert_eq!(g[[1, 0]], 0.0);
        assert_eq!(g[[0, 1]], -2.0);
        assert_eq!(g[[0, 2]], 4.0);
    }

    #[test]
    fn gradient_check_on_random_batches() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let rows: Vec<Vec<f64>> = (0..10)
                .map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let y: Vec<usize> = (0..10).map(|i| i % 4).collect();
            let x = rows_to_matrix(&rows, 4).unwrap();
            let mut m = BlrModel::zeros(LabelMode::Multiclass, &names(4));
            m.sigma2 = 3.0;
            for row in &mut m.weights {
                for v in row.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                }
            }
            assert!(blr_gradient_check(&m, x.view(), &y) < 1e-5);
        }
    }

    #[test]
    fn objective_trace_is_monotone() {
        let (x, y) = separable();
        let names = names(2);
        let log1p = vec![false; 2];
        let design = Standardization::fit(x.view(), log1p).design(x.view());
        let problem = MapObjective::new(design.view(), &y, 2, 100.0);
        let (_, _, trace) = ascend_traced(&problem, &BlrConfig::default()).unwrap();
        assert!(trace.len() > 2);
        for pair in trace.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        let m = blr_fit(x.view(), &y, LabelMode::Offensive, &names, &BlrConfig::default()).unwrap();
        assert_eq!(m.meta.objective_trace_tail.last(), trace.last());
    }

    #[test]
    fn offensive_mode_collapses_labels() {
        let mode = LabelMode::Offensive;
        assert_eq!(mode.class_of(AbuseLabel::Abusive), 0);
        assert_eq!(mode.class_of(AbuseLabel::Hate), 0);
        assert_eq!(mode.class_of(AbuseLabel::Spam), 1);
        assert_eq!(mode.class_of(AbuseLabel::Normal), 1);
    }
}
