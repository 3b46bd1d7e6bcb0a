//! Total variation and frequency ordering of spectral components.
//!
//! `TV(V) = ‖V − F⋄V / |λ|_max‖`. A component with larger variation is a
//! higher frequency. For an exact eigen-tensor this collapses to
//! `|1 − λ/|λ|_max| · ‖V‖`.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::joint::JointSpectrum;
use crate::error::Result;
use crate::network::RepresentingTensor;
use crate::signal::{apply_tensor, MlnSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvNorm {
    #[default]
    L1,
    L2,
}

impl TvNorm {
    pub fn of(self, x: &DMatrix<f64>) -> f64 {
        match self {
            TvNorm::L1 => x.iter().map(|v| v.abs()).sum(),
            TvNorm::L2 => x.norm(),
        }
    }
}

/// How each component is scaled before its variation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TvScaling {
    /// Components as returned by the decomposition (unit Frobenius norm).
    #[default]
    AsComputed,
    /// Each component divided by its own norm in the chosen TV norm, so
    /// that the variation of an eigen-tensor is exactly `|1 − λ/|λ|_max|`.
    UnitNorm,
}

/// `‖V − F⋄V / |λ|_max‖`; with `|λ|_max = 0` the shift term is dropped.
pub fn total_variation(f: &RepresentingTensor, lambda_max: f64, v: &DMatrix<f64>, norm: TvNorm) -> Result<f64> {
    let s = MlnSignal::new(v.clone())?;
    if lambda_max == 0.0 {
        return Ok(norm.of(v));
    }
    let shifted = apply_tensor(f.tensor(), &s)?;
    Ok(norm.of(&(v - shifted.matrix() / lambda_max.abs())))
}

pub fn total_variation_closed_form(lambda: f64, lambda_max: f64, v: &DMatrix<f64>, norm: TvNorm) -> f64 {
    let factor = if lambda_max == 0.0 {
        1.0
    } else {
        (1.0 - lambda / lambda_max.abs()).abs()
    };
    factor * norm.of(v)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyRanking {
    /// `TV_k` indexed by spectral (ascending-value) index.
    pub tv: Vec<f64>,
    /// `order[r]` is the spectral index with frequency rank `r`
    /// (rank 0 = highest frequency).
    pub order: Vec<usize>,
    pub norm: TvNorm,
    pub scaling: TvScaling,
    pub lambda_max: f64,
    /// Set when `|λ|_max = 0` and every TV fell back to the plain norm.
    pub degenerate: bool,
}

impl FrequencyRanking {
    /// Inverse permutation: frequency rank of spectral index `k`.
    pub fn rank_of(&self) -> Vec<usize> {
        let mut r = vec![0; self.order.len()];
        for (rank, &k) in self.order.iter().enumerate() {
            r[k] = rank;
        }
        r
    }
}

/// Permutation sorting `tv` descending; ties go to the smaller index.
pub fn rank_components(tv: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tv.len()).collect();
    order.sort_by(|&a, &b| tv[b].partial_cmp(&tv[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Total variation of every joint eigen-tensor and the induced frequency order.
pub fn rank_frequencies(
    f: &RepresentingTensor,
    spec: &JointSpectrum,
    norm: TvNorm,
    scaling: TvScaling,
) -> Result<FrequencyRanking> {
    let lambda_max = spec.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut tv = Vec::with_capacity(spec.len());
    for k in 0..spec.len() {
        let mut v = spec.eigen_tensor(k);
        if scaling == TvScaling::UnitNorm {
            let s = norm.of(&v);
            if s > 0.0 {
                v /= s;
            }
        }
        tv.push(total_variation(f, lambda_max, &v, norm)?);
    }
    let order = rank_components(&tv);
    Ok(FrequencyRanking {
        tv,
        order,
        norm,
        scaling,
        lambda_max,
        degenerate: lambda_max == 0.0,
    })
}
