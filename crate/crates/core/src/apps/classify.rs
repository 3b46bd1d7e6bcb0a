//! Semi-supervised classification by filtering a label signal over a
//! feature multiplex.
//!
//! Every feature becomes one layer whose intralayer weights come from the
//! Gaussian rule on that single feature. The input signal carries each known
//! label in all layers of its entity and zero elsewhere. Two filters are
//! offered: an adaptive polynomial fitted on the labeled entities (sign
//! decision at 0) and a fixed power `F^[τ]` (decision at the mean score).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::multiplex::{build_feature_multiplex, MultiplexParams};
use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::filters::{column_means, fit_adaptive_polynomial_with, AdaptiveFit, AdaptiveOptions};
use crate::network::{adjacency, Threshold};
use crate::signal::{apply_tensor_with, MlnSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    /// Greedy-fitted polynomial filter.
    Adaptive,
    /// Fixed power of the adjacency tensor.
    FixedPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub kind: ClassifierKind,
    /// Highest polynomial order (adaptive) or the power `τ` (fixed).
    pub order: usize,
    pub delta: f64,
    pub threshold: Threshold,
    pub interlayer_weight: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::Adaptive,
            order: 10,
            delta: 1.0,
            threshold: Threshold::Mean,
            interlayer_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyResult {
    /// `±1` prediction for every entity (`0` only if a score is exactly on
    /// the threshold).
    pub predicted: Vec<f64>,
    /// Column means of the filtered signal.
    pub scores: Vec<f64>,
    pub decision_threshold: f64,
    pub fit: Option<AdaptiveFit>,
    /// All known labels belong to one class.
    pub single_class_training: bool,
}

impl ClassifyResult {
    /// Fraction of `truth` matched on the entities with `labels[i] == 0`.
    pub fn unlabeled_accuracy(&self, labels: &[f64], truth: &[f64]) -> f64 {
        let mut hit = 0usize;
        let mut total = 0usize;
        for ((p, l), t) in self.predicted.iter().zip(labels).zip(truth) {
            if *l == 0.0 {
                total += 1;
                if p == t {
                    hit += 1;
                }
            }
        }
        if total == 0 {
            1.0
        } else {
            hit as f64 / total as f64
        }
    }
}

fn decide(score: f64, threshold: f64) -> f64 {
    if score > threshold {
        1.0
    } else if score < threshold {
        -1.0
    } else {
        0.0
    }
}

/// Classify entities given a `K_feat × N` data matrix and partial labels in
/// `{−1, 0, +1}` (0 = unknown).
pub fn classify_semisupervised(x: &DMatrix<f64>, labels: &[f64], opts: &ClassifyOptions) -> Result<ClassifyResult> {
    classify_semisupervised_with(Exec::default(), x, labels, opts)
}

pub fn classify_semisupervised_with(
    exec: Exec,
    x: &DMatrix<f64>,
    labels: &[f64],
    opts: &ClassifyOptions,
) -> Result<ClassifyResult> {
    let (m, n) = x.shape();
    if labels.len() != n {
        return Err(MgspError::ShapeMismatch(format!(
            "{} labels for {n} entities",
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|l| ![-1.0, 0.0, 1.0].contains(*l)) {
        return Err(MgspError::InvalidArgument(format!("label {bad} is not in {{-1, 0, 1}}")));
    }
    if labels.iter().all(|&l| l == 0.0) {
        return Err(MgspError::InvalidArgument("no labeled entities".into()));
    }
    let single_class_training = !(labels.contains(&1.0) && labels.contains(&-1.0));

    let features: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|l| (0..n).map(|i| vec![x[(l, i)]]).collect())
        .collect();
    let params = MultiplexParams {
        deltas: vec![opts.delta],
        thresholds: vec![opts.threshold],
        interlayer_weight: opts.interlayer_weight,
    };
    let net = build_feature_multiplex(&features, &params)?;
    let f = adjacency(&net);
    let s = MlnSignal::new(DMatrix::from_fn(m, n, |_, i| labels[i]))?;

    match opts.kind {
        ClassifierKind::Adaptive => {
            let targets: Vec<Option<f64>> = labels
                .iter()
                .map(|&l| if l == 0.0 { None } else { Some(l) })
                .collect();
            let fit_opts = AdaptiveOptions {
                k_max: opts.order.max(1),
                require_nonzero_shift: true,
                ..AdaptiveOptions::default()
            };
            let fit = fit_adaptive_polynomial_with(exec, &f, &s, &targets, &fit_opts)?;
            // evaluate on the normalized powers the fit was scored on
            let scale = if fit.spectral_radius > 0.0 { fit.spectral_radius } else { 1.0 };
            let mut power = s.clone();
            let mut h = s.matrix() * fit.normalized[0];
            for &c in &fit.normalized[1..] {
                power = MlnSignal::new(apply_tensor_with(exec, f.tensor(), &power)?.into_matrix() / scale)?;
                h += power.matrix() * c;
            }
            let scores = column_means(&h);
            let predicted = scores.iter().map(|&v| decide(v, 0.0)).collect();
            Ok(ClassifyResult {
                predicted,
                scores,
                decision_threshold: 0.0,
                fit: Some(fit),
                single_class_training,
            })
        }
        ClassifierKind::FixedPower => {
            // a positive rescaling per step keeps magnitudes bounded and
            // leaves the mean-threshold decisions unchanged
            let scale = f
                .flatten(crate::tensor::Convention::LayerWise)
                .data
                .row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0_f64, f64::max);
            let scale = if scale > 0.0 { scale } else { 1.0 };
            let mut h = s.clone();
            for _ in 0..opts.order {
                h = MlnSignal::new(apply_tensor_with(exec, f.tensor(), &h)?.into_matrix() / scale)?;
            }
            let scores = column_means(h.matrix());
            let threshold = scores.iter().sum::<f64>() / n as f64;
            let predicted = scores.iter().map(|&v| decide(v, threshold)).collect();
            Ok(ClassifyResult {
                predicted,
                scores,
                decision_threshold: threshold,
                fit: None,
                single_class_training,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(n: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
        let mut rng = crate::rng::seeded(seed);
        let truth: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let x = DMatrix::from_fn(3, n, |_, i| {
            let c = if truth[i] > 0.0 { 4.0 } else { -4.0 };
            c + rng.random_range(-0.5..0.5)
        });
        (x, truth)
    }

    fn partial(truth: &[f64], every: usize) -> Vec<f64> {
        truth
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % every < 2 { t } else { 0.0 })
            .collect()
    }

    #[test]
    fn both_filters_separate_blobs() {
        let (x, truth) = blobs(40, 2);
        let labels = partial(&truth, 10);
        for kind in [ClassifierKind::Adaptive, ClassifierKind::FixedPower] {
            let opts = ClassifyOptions { kind, ..Default::default() };
            let r = classify_semisupervised(&x, &labels, &opts).unwrap();
            assert_eq!(r.unlabeled_accuracy(&labels, &truth), 1.0, "{kind:?}");
            assert!(!r.single_class_training);
        }
    }

    #[test]
    fn fully_labeled_adaptive_reproduces_training_labels() {
        let (x, truth) = blobs(20, 5);
        let r = classify_semisupervised(&x, &truth, &ClassifyOptions::default()).unwrap();
        assert_eq!(r.fit.as_ref().unwrap().mse, 0.0);
        assert_eq!(r.predicted, truth);
    }

    #[test]
    fn isolated_unlabeled_entity_follows_its_neighbours() {
        // entity 3 only links (in feature space) to the +1 group
        let x = DMatrix::from_row_slice(1, 6, &[0.0, 0.1, 0.2, 0.15, 9.0, 9.1]);
        let labels = vec![1.0, 1.0, 1.0, 0.0, -1.0, -1.0];
        let opts = ClassifyOptions {
            kind: ClassifierKind::FixedPower,
            ..Default::default()
        };
        let r = classify_semisupervised(&x, &labels, &opts).unwrap();
        assert_eq!(r.predicted[3], 1.0);
    }

    #[test]
    fn permuting_entities_permutes_predictions() {
        let (x, truth) = blobs(30, 8);
        let labels = partial(&truth, 5);
        let perm: Vec<usize> = (0..30).map(|i| (i * 7) % 30).collect();
        let xp = DMatrix::from_fn(3, 30, |r, c| x[(r, perm[c])]);
        let lp: Vec<f64> = perm.iter().map(|&p| labels[p]).collect();
        for kind in [ClassifierKind::Adaptive, ClassifierKind::FixedPower] {
            let opts = ClassifyOptions { kind, ..Default::default() };
            let a = classify_semisupervised(&x, &labels, &opts).unwrap();
            let b = classify_semisupervised(&xp, &lp, &opts).unwrap();
            for (c, &p) in perm.iter().enumerate() {
                assert_eq!(b.predicted[c], a.predicted[p]);
            }
        }
    }

    #[test]
    fn rejects_bad_labels() {
        let x = DMatrix::zeros(2, 3);
        assert!(classify_semisupervised(&x, &[0.0; 3], &ClassifyOptions::default()).is_err());
        assert!(classify_semisupervised(&x, &[2.0, 0.0, 1.0], &ClassifyOptions::default()).is_err());
        assert!(classify_semisupervised(&x, &[1.0, 0.0], &ClassifyOptions::default()).is_err());
        let r = classify_semisupervised(
            &DMatrix::from_row_slice(1, 3, &[0.0, 0.1, 0.2]),
            &[1.0, 0.0, 1.0],
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert!(r.single_class_training);
    }
}
