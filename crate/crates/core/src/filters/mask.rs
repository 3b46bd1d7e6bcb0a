//! Spectral-domain filters over a pair of orthonormal bases.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::signal::MlnSignal;
use crate::spectral::SeparableBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSource {
    OrderWise,
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassKind {
    LowPass,
    HighPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSide {
    Layer,
    Entity,
}

/// Per-component gains `g` (layers) and `f` (entities).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMask {
    pub layer: Vec<f64>,
    pub entity: Vec<f64>,
    pub source: MaskSource,
}

impl SpectralMask {
    pub fn new(layer: Vec<f64>, entity: Vec<f64>, source: MaskSource) -> Result<Self> {
        if layer.iter().chain(&entity).any(|x| !x.is_finite()) {
            return Err(MgspError::NonFinite("mask entry".into()));
        }
        Ok(Self {
            layer,
            entity,
            source,
        })
    }

    pub fn all_pass(m: usize, n: usize, source: MaskSource) -> Self {
        Self {
            layer: vec![1.0; m],
            entity: vec![1.0; n],
            source,
        }
    }
}

/// `E_f·diag(g)·E_fᵀ · s · E_e·diag(f)·E_eᵀ`.
pub fn spectral_filter(s: &MlnSignal, basis: &impl SeparableBasis, mask: &SpectralMask) -> Result<MlnSignal> {
    let (ef, ee) = (basis.layer_basis(), basis.entity_basis());
    let (m, n) = (ef.nrows(), ee.nrows());
    s.check_shape(m, n)?;
    if mask.layer.len() != m || mask.entity.len() != n {
        return Err(MgspError::ShapeMismatch(format!(
            "mask is {}+{}, bases are {m}+{n}",
            mask.layer.len(),
            mask.entity.len()
        )));
    }
    let left = ef * DMatrix::from_diagonal(&DVector::from_column_slice(&mask.layer)) * ef.transpose();
    let right = ee * DMatrix::from_diagonal(&DVector::from_column_slice(&mask.entity)) * ee.transpose();
    MlnSignal::new(left * s.matrix() * right)
}

/// Binary mask keeping `keep` components of one side.
///
/// `values` holds one importance value per component on that side, larger
/// meaning lower frequency (singular values, or negated total variation).
/// Low-pass keeps the `keep` largest, high-pass the `keep` smallest; ties
/// are resolved toward the lower index. The other side passes everything.
pub fn make_ranked_mask(
    values: &[f64],
    keep: usize,
    kind: PassKind,
    side: MaskSide,
    dims: (usize, usize),
    source: MaskSource,
) -> Result<SpectralMask> {
    let (m, n) = dims;
    let len = match side {
        MaskSide::Layer => m,
        MaskSide::Entity => n,
    };
    if values.len() != len {
        return Err(MgspError::ShapeMismatch(format!(
            "{} ranking values for a side of {len} components",
            values.len()
        )));
    }
    if keep > len {
        return Err(MgspError::InvalidArgument(format!(
            "cannot keep {keep} of {len} components"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        let by_value = values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal);
        let by_value = match kind {
            PassKind::LowPass => by_value,
            PassKind::HighPass => by_value.reverse(),
        };
        by_value.then(a.cmp(&b))
    });
    let mut gains = vec![0.0; len];
    for &k in &order[..keep] {
        gains[k] = 1.0;
    }
    let mut mask = SpectralMask::all_pass(m, n, source);
    match side {
        MaskSide::Layer => mask.layer = gains,
        MaskSide::Entity => mask.entity = gains,
    }
    Ok(mask)
}
