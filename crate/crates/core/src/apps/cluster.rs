//! Spectral clustering of entities over the entity-wise spectrum.

use std::cmp::Ordering;
use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::multiplex::{build_feature_multiplex, MultiplexParams};
use crate::error::{MgspError, Result};
use crate::filters::{make_ranked_mask, spectral_filter, MaskSide, MaskSource, PassKind};
use crate::network::{adjacency, MultilayerNetwork};
use crate::numerics::kmeans;
use crate::signal::MlnSignal;
use crate::spectral::{hosvd, orthogonal_cp, CpOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterBasis {
    /// `W_e` from the higher-order SVD.
    #[default]
    Singular,
    /// `E_e` from the orthogonal CP decomposition.
    OrderWiseCp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub k: usize,
    /// `N×K` leading entity spectrum, one row per entity.
    pub leading: DMatrix<f64>,
    /// Ordering values of all entity components, descending.
    pub values: Vec<f64>,
    pub basis: ClusterBasis,
}

/// Position of the largest gap between consecutive values, counted as the
/// number of values before it. Ties go to the smallest `K`.
pub fn largest_gap_k(values: &[f64]) -> Result<usize> {
    if values.len() < 2 {
        return Err(MgspError::InvalidArgument(
            "the gap rule needs at least two values".into(),
        ));
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut best_k = 1;
    let mut best_gap = values[0] - values[1];
    for k in 2..values.len() {
        let gap = values[k - 1] - values[k];
        if gap > best_gap + 1e-12 * scale {
            best_gap = gap;
            best_k = k;
        }
    }
    Ok(best_k)
}

/// Entity basis columns with their ordering values, sorted by descending
/// magnitude (ties to the lower column).
fn entity_components(net: &MultilayerNetwork, basis: ClusterBasis) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let f = adjacency(net);
    let (cols, values) = match basis {
        ClusterBasis::Singular => {
            let spec = hosvd(&f)?;
            (spec.entity_basis, spec.entity_values)
        }
        ClusterBasis::OrderWiseCp => {
            let spec = orthogonal_cp(&f, CpOptions::default())?;
            let values = (0..spec.n)
                .map(|i| spec.coefficients.column(i).norm())
                .collect();
            (spec.entity_basis, values)
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .abs()
            .partial_cmp(&values[a].abs())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let sorted = DMatrix::from_fn(cols.nrows(), cols.ncols(), |r, c| cols[(r, order[c])]);
    let sorted_values = order.iter().map(|&c| values[c].abs()).collect();
    Ok((sorted, sorted_values))
}

pub fn mln_spectral_cluster(
    net: &MultilayerNetwork,
    k: KChoice,
    basis: ClusterBasis,
    seed: u64,
) -> Result<ClusterResult> {
    let n = net.entities();
    let (components, values) = entity_components(net, basis)?;
    let k = match k {
        KChoice::Fixed(k) if k == 0 || k > n => {
            return Err(MgspError::InvalidArgument(format!(
                "K must lie in 1..={n}, got {k}"
            )))
        }
        KChoice::Fixed(k) => k,
        KChoice::Auto if n < 2 => 1,
        KChoice::Auto => largest_gap_k(&values)?,
    };
    let leading = components.columns(0, k).into_owned();
    let labels = if k == 1 {
        vec![0; n]
    } else {
        kmeans(&leading, k, seed)?.labels
    };
    Ok(ClusterResult {
        labels,
        k,
        leading,
        values,
        basis,
    })
}

/// Feature multiplex construction followed by spectral clustering.
pub fn segment_from_features(
    features: &[Vec<Vec<f64>>],
    params: &MultiplexParams,
    k: KChoice,
    basis: ClusterBasis,
    seed: u64,
) -> Result<ClusterResult> {
    let net = build_feature_multiplex(features, params)?;
    mln_spectral_cluster(&net, k, basis, seed)
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(MgspError::ShapeMismatch(format!(
            "partitions of {} and {} items",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let pairs = |x: f64| x * (x - 1.0) / 2.0;
    let mut table: HashMap<(usize, usize), f64> = HashMap::new();
    let mut rows: HashMap<usize, f64> = HashMap::new();
    let mut cols: HashMap<usize, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1.0;
        *rows.entry(x).or_default() += 1.0;
        *cols.entry(y).or_default() += 1.0;
    }
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n as f64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        // both partitions trivial (all-one-cluster or all-singletons)
        return Ok(if a_equiv_b(&table, &rows, &cols) { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

fn a_equiv_b(
    table: &HashMap<(usize, usize), f64>,
    rows: &HashMap<usize, f64>,
    cols: &HashMap<usize, f64>,
) -> bool {
    table.len() == rows.len() && table.len() == cols.len()
}

/// Entity-wise high-pass filter on the singular basis, keeping the `keep`
/// components with the smallest entity singular values.
pub fn highpass_entity_probe(net: &MultilayerNetwork, s: &MlnSignal, keep: usize) -> Result<MlnSignal> {
    let spec = hosvd(&adjacency(net))?;
    let mask = make_ranked_mask(
        &spec.entity_values,
        keep,
        PassKind::HighPass,
        MaskSide::Entity,
        (spec.m, spec.n),
        MaskSource::Singular,
    )?;
    spectral_filter(s, &spec, &mask)
}
