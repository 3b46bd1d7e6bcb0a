//! Feature-driven multiplex construction shared by the pipelines.

use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::network::{gaussian_weights, MultilayerNetwork, Threshold};
use crate::tensor::Tensor4;

/// Per-layer Gaussian parameters. A single entry applies to every layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplexParams {
    pub deltas: Vec<f64>,
    pub thresholds: Vec<Threshold>,
    /// Weight of the counterpart edges between layers.
    pub interlayer_weight: f64,
}

impl MultiplexParams {
    pub fn uniform(delta: f64, threshold: Threshold) -> Self {
        Self {
            deltas: vec![delta],
            thresholds: vec![threshold],
            interlayer_weight: 1.0,
        }
    }
}

fn per_layer<T: Copy>(values: &[T], layer: usize, layers: usize, what: &str) -> Result<T> {
    match values.len() {
        1 => Ok(values[0]),
        l if l == layers => Ok(values[layer]),
        l => Err(MgspError::ShapeMismatch(format!(
            "{l} {what} values for {layers} layers"
        ))),
    }
}

/// Multiplex with one layer per feature set.
///
/// `features[ℓ][i]` is the feature vector of entity `i` in layer `ℓ`.
/// Intralayer weights follow the thresholded Gaussian rule of each layer;
/// every entity is linked to its counterparts in all other layers.
pub fn build_feature_multiplex(features: &[Vec<Vec<f64>>], params: &MultiplexParams) -> Result<MultilayerNetwork> {
    let m = features.len();
    if m == 0 {
        return Err(MgspError::InvalidArgument("no feature layers given".into()));
    }
    let n = features[0].len();
    if let Some((l, f)) = features.iter().enumerate().find(|(_, f)| f.len() != n) {
        return Err(MgspError::ShapeMismatch(format!(
            "layer {l} has {} entities, layer 0 has {n}",
            f.len()
        )));
    }
    if !params.interlayer_weight.is_finite() {
        return Err(MgspError::NonFinite("interlayer weight".into()));
    }
    let mut t = Tensor4::zeros([m, n, m, n]);
    for (a, layer) in features.iter().enumerate() {
        let delta = per_layer(&params.deltas, a, m, "delta")?;
        let threshold = per_layer(&params.thresholds, a, m, "threshold")?;
        let w = gaussian_weights(layer, delta, threshold)?;
        for i in 0..n {
            for j in 0..n {
                if w[(i, j)] != 0.0 {
                    t.set(a, i, a, j, w[(i, j)]);
                }
            }
        }
    }
    if params.interlayer_weight != 0.0 {
        for i in 0..n {
            for a in 0..m {
                for b in 0..m {
                    if a != b {
                        t.set(a, i, b, i, params.interlayer_weight);
                    }
                }
            }
        }
    }
    MultilayerNetwork::from_adjacency(t, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_features_give_complete_layers() {
        let layer: Vec<Vec<f64>> = (0..4).map(|_| vec![0.5, 0.5]).collect();
        let net = build_feature_multiplex(&[layer.clone(), layer], &MultiplexParams::uniform(1.0, Threshold::Value(1e9)))
            .unwrap();
        for a in 0..2 {
            for i in 0..4 {
                for j in 0..4 {
                    let expect = if i == j { 0.0 } else { 1.0 };
                    assert_eq!(net.weight(a, i, a, j), expect);
                }
            }
        }
    }

    #[test]
    fn single_entity_has_only_counterpart_edges() {
        let features = vec![vec![vec![0.1]], vec![vec![0.7]], vec![vec![0.3]]];
        let net = build_feature_multiplex(&features, &MultiplexParams::uniform(1.0, Threshold::Mean)).unwrap();
        assert_eq!(net.edges().len(), 3);
        assert!(net.edges().iter().all(|e| e.a != e.b && e.w == 1.0));
    }

    #[test]
    fn separated_blobs_are_block_diagonal() {
        let layer: Vec<Vec<f64>> = vec![vec![0.0], vec![0.2], vec![10.0], vec![10.1]];
        let net = build_feature_multiplex(&[layer], &MultiplexParams::uniform(1.0, Threshold::Mean)).unwrap();
        // mean squared distance ≈ 66, below every cross-blob distance (≥ 96)
        assert!(net.weight(0, 0, 0, 1) > 0.9);
        assert!(net.weight(0, 2, 0, 3) > 0.9);
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            assert_eq!(net.weight(0, i, 0, j), 0.0);
        }
    }

    #[test]
    fn inconsistent_inputs() {
        let bad = vec![vec![vec![0.0], vec![1.0]], vec![vec![0.0]]];
        assert!(build_feature_multiplex(&bad, &MultiplexParams::uniform(1.0, Threshold::Mean)).is_err());
        let ok = vec![vec![vec![0.0], vec![1.0]]; 3];
        let params = MultiplexParams {
            deltas: vec![1.0, 2.0],
            thresholds: vec![Threshold::Mean],
            interlayer_weight: 1.0,
        };
        assert!(build_feature_multiplex(&ok, &params).is_err());
    }
}
