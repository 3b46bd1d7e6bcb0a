//! Spectral constructions over multilayer networks and their transforms.

pub mod joint;
pub mod orderwise;
pub mod singular;
pub mod tucker;
pub mod variation;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::signal::MlnSignal;

pub use joint::{
    directed_joint_spectrum, imgft_joint, joint_spectrum, joint_spectrum_with, mgft_directed,
    imgft_directed, mgft_joint, DirectedJointSpectrum, JointSpectrum,
};
pub use orderwise::{imgft_orderwise, mgft_orderwise, orthogonal_cp, CpInit, CpOptions, OrderWiseSpectrum};
pub use singular::{hosvd, imgst, mgst, SingularSpectrum};
pub use tucker::{tucker_hooi, TuckerDecomposition, TuckerOptions};
pub use variation::{
    rank_components, rank_frequencies, total_variation, total_variation_closed_form,
    FrequencyRanking, TvNorm, TvScaling,
};

/// Which orders a separable transform acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformMode {
    /// `E_fᵀ·s`
    Layer,
    /// `s·E_e`
    Entity,
    /// `E_fᵀ·s·E_e`
    Joint,
}

/// A pair of orthonormal bases, one over layers (`M×M`) and one over
/// entities (`N×N`), as produced by the order-wise and singular spectra.
pub trait SeparableBasis {
    fn layer_basis(&self) -> &DMatrix<f64>;
    fn entity_basis(&self) -> &DMatrix<f64>;
}

fn check_signal(basis: &impl SeparableBasis, s: &DMatrix<f64>) -> Result<()> {
    let (m, n) = (basis.layer_basis().nrows(), basis.entity_basis().nrows());
    if s.nrows() != m || s.ncols() != n {
        return Err(MgspError::ShapeMismatch(format!(
            "{}×{} array against {m}×{n} bases",
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn separable_forward(
    basis: &impl SeparableBasis,
    s: &MlnSignal,
    mode: TransformMode,
) -> Result<DMatrix<f64>> {
    let s = s.matrix();
    check_signal(basis, s)?;
    let (ef, ee) = (basis.layer_basis(), basis.entity_basis());
    Ok(match mode {
        TransformMode::Layer => ef.transpose() * s,
        TransformMode::Entity => s * ee,
        TransformMode::Joint => ef.transpose() * s * ee,
    })
}

pub(crate) fn separable_inverse(
    basis: &impl SeparableBasis,
    coeffs: &DMatrix<f64>,
    mode: TransformMode,
) -> Result<MlnSignal> {
    check_signal(basis, coeffs)?;
    let (ef, ee) = (basis.layer_basis(), basis.entity_basis());
    MlnSignal::new(match mode {
        TransformMode::Layer => ef * coeffs,
        TransformMode::Entity => coeffs * ee.transpose(),
        TransformMode::Joint => ef * coeffs * ee.transpose(),
    })
}
