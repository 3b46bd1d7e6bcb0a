//! Structural checks tying the tensor spectra to their flattened forms.
//!
//! * flattening invariance: layer-wise and entity-wise supra-matrices share
//!   one eigenvalue multiset;
//! * reshaped supra-matrix eigenvectors solve `F ⋄ V = λV`;
//! * orthogonal-CP factor tensors are approximate eigen-tensors whose
//!   residual is bounded by the overall fit residual;
//! * the Gram tensor of the CP factor tensors is super-diagonal with ones.
//!
//! The last two apply to undirected networks only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::network::RepresentingTensor;
use crate::numerics::{gen_eig, sym_eig};
use crate::signal::{apply_tensor, MlnSignal};
use crate::spectral::{joint_spectrum, orthogonal_cp, CpOptions};
use crate::tensor::{Convention, Tensor4};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyTolerances {
    /// Absolute gap between the two sorted eigenvalue lists.
    pub flattening: f64,
    /// `‖F⋄V − λV‖_F` relative to `‖F‖_F`.
    pub eigen_equation: f64,
    /// Slack allowed above the CP fit residual.
    pub cp_slack: f64,
    /// Deviation of the Gram tensor from the super-diagonal identity.
    pub gram: f64,
}

impl Default for PropertyTolerances {
    fn default() -> Self {
        Self {
            flattening: 1e-10,
            eigen_equation: 1e-9,
            cp_slack: 1e-9,
            gram: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub layers: usize,
    pub entities: usize,
    pub directed: bool,
    /// Fit residual of the orthogonal CP decomposition (undirected only).
    pub cp_residual: Option<f64>,
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, value: f64, bound: f64) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        value,
        bound,
        passed: value <= bound,
    }
}

fn sorted_complex(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Largest gap between the eigenvalue multisets of the two flattenings.
pub fn flattening_gap(f: &RepresentingTensor) -> Result<f64> {
    let lw = f.flatten(Convention::LayerWise).data;
    let ew = f.flatten(Convention::EntityWise).data;
    if f.directed {
        let a = sorted_complex(gen_eig(&lw)?.values);
        let b = sorted_complex(gen_eig(&ew)?.values);
        // sorting by (re, im) can interleave near-equal real parts
        // differently, so match each value to its nearest partner
        let mut used = vec![false; b.len()];
        let mut worst = 0.0_f64;
        for x in &a {
            let (k, d) = b
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, y)| (k, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .expect("equal lengths");
            used[k] = true;
            worst = worst.max(d);
        }
        Ok(worst)
    } else {
        let a = sym_eig(&lw)?.values;
        let b = sym_eig(&ew)?.values;
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }
}

/// Largest `‖F⋄V_k − λ_k V_k‖_F / ‖F‖_F`, with the contraction evaluated
/// on the reshaped eigen-tensors.
pub fn eigen_equation_residual(f: &RepresentingTensor) -> Result<f64> {
    let spec = joint_spectrum(f)?;
    let norm = f.tensor().frobenius_norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0_f64;
    for k in 0..spec.len() {
        let v = spec.eigen_tensor(k);
        let fv = apply_tensor(f.tensor(), &MlnSignal::new(v.clone())?)?;
        worst = worst.max((fv.matrix() - v * spec.values[k]).norm() / norm);
    }
    Ok(worst)
}

pub fn check_properties(f: &RepresentingTensor, tol: &PropertyTolerances) -> Result<PropertyReport> {
    let (m, n) = f.dims();
    let mut checks = vec![check("flattening_eigenvalues", flattening_gap(f)?, tol.flattening)];
    let mut cp_residual = None;
    if !f.directed {
        checks.push(check("eigen_equation", eigen_equation_residual(f)?, tol.eigen_equation));
        let cp = orthogonal_cp(f, CpOptions::default())?;
        let pair = cp.eigen_residuals(f).amax();
        checks.push(check("cp_approximate_eigen", pair, cp.residual + tol.cp_slack));
        let gram = cp.gram_tensor();
        let dev = gram.sub(&Tensor4::identity(m, n))?.max_abs();
        checks.push(check("cp_gram_superdiagonal", dev, tol.gram));
        cp_residual = Some(cp.residual);
    }
    Ok(PropertyReport {
        layers: m,
        entities: n,
        directed: f.directed,
        cp_residual,
        checks,
    })
}
