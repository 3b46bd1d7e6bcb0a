//! Joint spectrum: eigen-tensors of the representing tensor obtained from
//! the eigendecomposition of a flattened supra-matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{MgspError, Result};
use crate::network::RepresentingTensor;
use crate::numerics::{gen_eig, sym_eig};
use crate::signal::{flatten_signal, unflatten_signal, MlnSignal};
use crate::tensor::{Convention, Tensor4};

/// Real eigen-tensors of an undirected representing tensor.
///
/// Column `k` of `vectors` is the eigen-tensor `V_k` in layer-wise
/// flattened order (`V_k[α,i] = vectors[(N·α+i, k)]`) regardless of which
/// flattening was decomposed; `convention` records that choice.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    pub m: usize,
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub convention: Convention,
}

impl JointSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `V_k` as an `M×N` matrix.
    pub fn eigen_tensor(&self, k: usize) -> DMatrix<f64> {
        let col = self.vectors.column(k).into_owned();
        unflatten_signal(&col, self.m, self.n, Convention::LayerWise)
            .expect("eigenvector length is MN")
            .into_matrix()
    }

    pub fn eigen_tensors(&self) -> Vec<DMatrix<f64>> {
        (0..self.len()).map(|k| self.eigen_tensor(k)).collect()
    }

    /// `Σ_k g(λ_k) V_k ∘ V_k`.
    pub fn spectral_tensor(&self, g: impl Fn(f64) -> f64) -> Tensor4 {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * g(self.values[c])
        });
        let mat = scaled * self.vectors.transpose();
        Tensor4::from_layerwise_matrix(self.m, self.n, &mat)
    }

    /// `Σ_k λ_k V_k ∘ V_k`.
    pub fn reconstruct(&self) -> Tensor4 {
        self.spectral_tensor(|x| x)
    }

    pub fn reconstruction_error(&self, f: &RepresentingTensor) -> f64 {
        self.reconstruct()
            .relative_error(f.tensor())
            .expect("spectrum built from this tensor")
    }

    /// Largest `‖F ⋄ V_k − λ_k V_k‖_F` over all `k`.
    pub fn max_eigen_residual(&self, f: &RepresentingTensor) -> f64 {
        let fl = f.tensor().layerwise_matrix();
        let fv = &fl * &self.vectors;
        (0..self.len())
            .map(|k| (fv.column(k) - self.vectors.column(k) * self.values[k]).norm())
            .fold(0.0, f64::max)
    }
}

fn require_symmetric(f: &RepresentingTensor) -> Result<DMatrix<f64>> {
    let fl = f.tensor().layerwise_matrix();
    if f.directed {
        return Err(MgspError::InvalidArgument(
            "real joint spectrum needs an undirected network; use the directed joint spectrum".into(),
        ));
    }
    Ok(fl)
}

/// Eigen-tensors via the layer-wise flattening.
pub fn joint_spectrum(f: &RepresentingTensor) -> Result<JointSpectrum> {
    joint_spectrum_with(f, Convention::LayerWise)
}

/// Eigen-tensors via either flattening; eigenvectors of the entity-wise
/// supra-matrix are reshaped with `V[α,i] = y[M·i+α]`.
pub fn joint_spectrum_with(f: &RepresentingTensor, convention: Convention) -> Result<JointSpectrum> {
    let (m, n) = f.dims();
    let fl = require_symmetric(f)?;
    let eig = match convention {
        Convention::LayerWise => sym_eig(&fl)?,
        Convention::EntityWise => sym_eig(&f.flatten(Convention::EntityWise).data)?,
    };
    let vectors = match convention {
        Convention::LayerWise => eig.vectors,
        Convention::EntityWise => {
            let mn = m * n;
            let mut out = DMatrix::zeros(mn, mn);
            for a in 0..m {
                for i in 0..n {
                    let src = Convention::EntityWise.index(m, n, a, i);
                    let dst = Convention::LayerWise.index(m, n, a, i);
                    out.set_row(dst, &eig.vectors.row(src));
                }
            }
            out
        }
    };
    Ok(JointSpectrum {
        m,
        n,
        values: eig.values,
        vectors,
        convention,
    })
}

/// Joint M-GFT: `ŝ_k = ⟨V_k, s⟩`.
pub fn mgft_joint(spec: &JointSpectrum, s: &MlnSignal) -> Result<DVector<f64>> {
    s.check_shape(spec.m, spec.n)?;
    let x = flatten_signal(s, Convention::LayerWise);
    Ok(spec.vectors.transpose() * x)
}

/// Inverse joint M-GFT: `s = Σ_k ŝ_k V_k`.
pub fn imgft_joint(spec: &JointSpectrum, coeffs: &DVector<f64>) -> Result<MlnSignal> {
    if coeffs.len() != spec.len() {
        return Err(MgspError::ShapeMismatch(format!(
            "{} coefficients for a spectrum of size {}",
            coeffs.len(),
            spec.len()
        )));
    }
    let x = &spec.vectors * coeffs;
    unflatten_signal(&x, spec.m, spec.n, Convention::LayerWise)
}

/// Complex spectrum of a directed representing tensor:
/// `F ≈ Σ_k λ_k V_k ∘ U_k` with `V_k` the right eigenvectors and `U_k` the
/// rows of their inverse, both in layer-wise order.
#[derive(Debug, Clone)]
pub struct DirectedJointSpectrum {
    pub m: usize,
    pub n: usize,
    pub values: Vec<Complex64>,
    /// Columns are `V_k`.
    pub right: DMatrix<Complex64>,
    /// Rows are `U_k`; `left · right = I`.
    pub left: DMatrix<Complex64>,
}

impl DirectedJointSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.right.clone();
        for (k, v) in self.values.iter().enumerate() {
            scaled.column_mut(k).iter_mut().for_each(|x| *x *= *v);
        }
        scaled * &self.left
    }
}

/// Eigen-tensors of any representing tensor (directed or not) through the
/// general eigendecomposition of the layer-wise flattening.
pub fn directed_joint_spectrum(f: &RepresentingTensor) -> Result<DirectedJointSpectrum> {
    let (m, n) = f.dims();
    let fl = f.tensor().layerwise_matrix();
    let eig = gen_eig(&fl)?;
    let left = eig.vectors.clone().try_inverse().ok_or_else(|| {
        MgspError::Numeric("eigenvector matrix is singular (defective representing tensor)".into())
    })?;
    let check = (&left * &eig.vectors - DMatrix::<Complex64>::identity(m * n, m * n))
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if check > 1e-6 {
        return Err(MgspError::Numeric(format!(
            "eigenvector matrix is ill-conditioned (‖E⁻¹E − I‖ = {check:e})"
        )));
    }
    Ok(DirectedJointSpectrum {
        m,
        n,
        values: eig.values,
        right: eig.vectors,
        left,
    })
}

/// `ŝ = E⁻¹ s`: projections onto the left spectral tensors.
pub fn mgft_directed(spec: &DirectedJointSpectrum, s: &MlnSignal) -> Result<DVector<Complex64>> {
    s.check_shape(spec.m, spec.n)?;
    let x = flatten_signal(s, Convention::LayerWise).map(|v| Complex64::new(v, 0.0));
    Ok(&spec.left * x)
}

/// `s = Σ_k ŝ_k V_k`; fails if the result is not real to 1e-8.
pub fn imgft_directed(spec: &DirectedJointSpectrum, coeffs: &DVector<Complex64>) -> Result<MlnSignal> {
    if coeffs.len() != spec.len() {
        return Err(MgspError::ShapeMismatch(format!(
            "{} coefficients for a spectrum of size {}",
            coeffs.len(),
            spec.len()
        )));
    }
    let x = &spec.right * coeffs;
    let scale = x.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    let imag = x.iter().fold(0.0_f64, |a, z| a.max(z.im.abs()));
    if imag > 1e-8 * scale {
        return Err(MgspError::Numeric(format!(
            "inverse transform has imaginary part {imag:e}"
        )));
    }
    unflatten_signal(&x.map(|z| z.re), spec.m, spec.n, Convention::LayerWise)
}
