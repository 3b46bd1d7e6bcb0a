//! Singular spectrum via higher-order SVD.
//!
//! Every mode factor `U^(n)` is the full left singular basis of the mode-`n`
//! unfolding, and the core is `S = F ×₁U^(1)ᵀ ×₂U^(2)ᵀ ×₃U^(3)ᵀ ×₄U^(4)ᵀ`.
//! For a symmetric representing tensor the third and fourth unfoldings are
//! column permutations of the first two, so a single layer basis `W_f` and a
//! single entity basis `W_e` serve both slots.

use nalgebra::DMatrix;

use super::{separable_forward, separable_inverse, SeparableBasis, TransformMode};
use crate::error::{MgspError, Result};
use crate::network::RepresentingTensor;
use crate::numerics::left_singular_basis;
use crate::signal::MlnSignal;
use crate::tensor::Tensor4;

#[derive(Debug, Clone)]
pub struct SingularSpectrum {
    pub m: usize,
    pub n: usize,
    /// Layer basis `W_f = U^(1)`.
    pub layer_basis: DMatrix<f64>,
    /// Entity basis `W_e = U^(2)`.
    pub entity_basis: DMatrix<f64>,
    /// Mode-1 singular values `γ`, descending.
    pub layer_values: Vec<f64>,
    /// Mode-2 singular values `σ`, descending.
    pub entity_values: Vec<f64>,
    pub core: Tensor4,
    /// `U^(1..4)`; for undirected input slots 3 and 4 repeat slots 1 and 2.
    pub factors: [DMatrix<f64>; 4],
    pub undirected: bool,
}

impl SeparableBasis for SingularSpectrum {
    fn layer_basis(&self) -> &DMatrix<f64> {
        &self.layer_basis
    }
    fn entity_basis(&self) -> &DMatrix<f64> {
        &self.entity_basis
    }
}

impl SingularSpectrum {
    /// `S ×₁U^(1) ×₂U^(2) ×₃U^(3) ×₄U^(4)`.
    pub fn reconstruct(&self) -> Tensor4 {
        let mut t = self.core.clone();
        for (mode, u) in self.factors.iter().enumerate() {
            t = t.mode_product(mode, u).expect("factor shapes match the core");
        }
        t
    }

    /// `λ_{αi} = γ_α·σ_i` as an `M×N` array. These are singular-value
    /// products, not eigenvalues of `F`.
    pub fn joint_values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.n, |a, i| {
            self.layer_values[a] * self.entity_values[i]
        })
    }

    /// Frobenius norms of the core sub-tensors `S_{i_mode = k}` for every `k`.
    pub fn mode_norms(&self, mode: usize) -> Vec<f64> {
        let unf = self.core.unfold(mode);
        (0..unf.nrows()).map(|r| unf.row(r).norm()).collect()
    }

    /// Singular tensor `V̂_{αi} = f_α ∘ e_i`.
    pub fn singular_tensor(&self, alpha: usize, i: usize) -> DMatrix<f64> {
        self.layer_basis.column(alpha) * self.entity_basis.column(i).transpose()
    }
}

/// Full left singular bases of the mode-1 and mode-2 unfoldings.
pub(crate) fn mode_bases(t: &Tensor4) -> (DMatrix<f64>, DMatrix<f64>) {
    (
        left_singular_basis(&t.unfold(0)).0,
        left_singular_basis(&t.unfold(1)).0,
    )
}

pub(crate) fn core_of(t: &Tensor4, factors: &[DMatrix<f64>; 4]) -> Tensor4 {
    let mut core = t.clone();
    for (mode, u) in factors.iter().enumerate() {
        core = core
            .mode_product(mode, &u.transpose())
            .expect("factor shapes match the tensor");
    }
    core
}

pub fn hosvd(f: &RepresentingTensor) -> Result<SingularSpectrum> {
    let (m, n) = f.dims();
    let t = f.tensor();
    let (wf, gamma) = left_singular_basis(&t.unfold(0));
    let (we, sigma) = left_singular_basis(&t.unfold(1));
    let undirected = !f.directed;
    let factors = if undirected {
        [wf.clone(), we.clone(), wf.clone(), we.clone()]
    } else {
        [
            wf.clone(),
            we.clone(),
            left_singular_basis(&t.unfold(2)).0,
            left_singular_basis(&t.unfold(3)).0,
        ]
    };
    let core = core_of(t, &factors);
    Ok(SingularSpectrum {
        m,
        n,
        layer_basis: wf,
        entity_basis: we,
        layer_values: gamma,
        entity_values: sigma,
        core,
        factors,
        undirected,
    })
}

fn require_undirected(spec: &SingularSpectrum) -> Result<()> {
    if !spec.undirected {
        return Err(MgspError::InvalidArgument(
            "singular transforms are defined for undirected networks only".into(),
        ));
    }
    Ok(())
}

/// Forward singular transform with `W_f`, `W_e` in place of `E_f`, `E_e`.
pub fn mgst(spec: &SingularSpectrum, s: &MlnSignal, mode: TransformMode) -> Result<DMatrix<f64>> {
    require_undirected(spec)?;
    separable_forward(spec, s, mode)
}

pub fn imgst(spec: &SingularSpectrum, coeffs: &DMatrix<f64>, mode: TransformMode) -> Result<MlnSignal> {
    require_undirected(spec)?;
    separable_inverse(spec, coeffs, mode)
}
