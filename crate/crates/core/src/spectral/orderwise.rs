//! Order-wise spectrum from a structured orthogonal CP decomposition
//!
//! ```text
//! F ≈ Σ_{α,i} λ_{αi} · f_α ∘ e_i ∘ f_α ∘ e_i
//! ```
//!
//! with orthonormal layer vectors `f_α` (columns of `E_f`) and entity
//! vectors `e_i` (columns of `E_e`). In flattened form this is
//! `F_L ≈ Q·diag(λ)·Qᵀ` with `Q = E_f ⊗ E_e`, so for fixed bases the optimal
//! coefficients are `λ_{αi} = qᵀ F_L q` and the fit residual is the
//! off-diagonal mass of `Qᵀ F_L Q`.
//!
//! Solver: start from candidate bases, then alternate Procrustes updates
//! (polar factor of the least-squares cross term) for `E_f` and `E_e`,
//! refreshing `λ` after each. The best candidate by final residual wins.

use nalgebra::DMatrix;

use super::singular::mode_bases;
use super::{separable_forward, separable_inverse, SeparableBasis, TransformMode};
use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::network::RepresentingTensor;
use crate::numerics::{dominant_index, polar_factor, sym_eig};
use crate::signal::MlnSignal;
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 500,
        }
    }
}

/// Starting bases of the alternating solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpInit {
    /// Mode-1 / mode-2 singular vectors of `F`.
    Hosvd,
    /// Eigenvectors of the partial traces `Σ_i F[·,i,·,i]` and `Σ_α F[α,·,α,·]`.
    PartialTrace,
}

#[derive(Debug, Clone)]
pub struct OrderWiseSpectrum {
    pub m: usize,
    pub n: usize,
    /// `E_f`, columns `f_α`.
    pub layer_basis: DMatrix<f64>,
    /// `E_e`, columns `e_i`.
    pub entity_basis: DMatrix<f64>,
    /// `λ_{αi}` as an `M×N` array.
    pub coefficients: DMatrix<f64>,
    /// `‖F − Σ λ Ṽ∘Ṽ‖_F / ‖F‖_F`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub init: CpInit,
}

impl SeparableBasis for OrderWiseSpectrum {
    fn layer_basis(&self) -> &DMatrix<f64> {
        &self.layer_basis
    }
    fn entity_basis(&self) -> &DMatrix<f64> {
        &self.entity_basis
    }
}

impl OrderWiseSpectrum {
    /// `Ṽ_{αi} = f_α ∘ e_i`.
    pub fn factor_tensor(&self, alpha: usize, i: usize) -> DMatrix<f64> {
        self.layer_basis.column(alpha) * self.entity_basis.column(i).transpose()
    }

    /// `Σ λ_{αi} Ṽ_{αi} ∘ Ṽ_{αi}`.
    pub fn reconstruct(&self) -> Tensor4 {
        let q = kron(&self.layer_basis, &self.entity_basis);
        let mut scaled = q.clone();
        for a in 0..self.m {
            for i in 0..self.n {
                let c = a * self.n + i;
                scaled.column_mut(c).scale_mut(self.coefficients[(a, i)]);
            }
        }
        Tensor4::from_layerwise_matrix(self.m, self.n, &(scaled * q.transpose()))
    }

    /// `‖F ⋄ Ṽ_{αi} − λ_{αi} Ṽ_{αi}‖_F / ‖F‖_F` for every pair.
    pub fn eigen_residuals(&self, f: &RepresentingTensor) -> DMatrix<f64> {
        let y = kron_apply(Exec::default(), f.tensor(), &self.layer_basis, &self.entity_basis);
        let (m, n) = (self.m, self.n);
        let mn = m * n;
        let norm = f.tensor().frobenius_norm().max(f64::MIN_POSITIVE);
        DMatrix::from_fn(m, n, |a, i| {
            let c = a * n + i;
            let lam = self.coefficients[(a, i)];
            let mut acc = 0.0;
            for b in 0..m {
                for j in 0..n {
                    let q = self.layer_basis[(b, a)] * self.entity_basis[(j, i)];
                    let d = y[(b * n + j) * mn + c] - lam * q;
                    acc += d * d;
                }
            }
            acc.sqrt() / norm
        })
    }

    /// `W[α,i,β,j] = ⟨Ṽ_{αi}, Ṽ_{βj}⟩`.
    pub fn gram_tensor(&self) -> Tensor4 {
        let q = kron(&self.layer_basis, &self.entity_basis);
        Tensor4::from_layerwise_matrix(self.m, self.n, &(q.transpose() * q))
    }
}

/// `E_f ⊗ E_e`: column `N·α+i` is the flattened `f_α ∘ e_i`.
pub(crate) fn kron(ef: &DMatrix<f64>, ee: &DMatrix<f64>) -> DMatrix<f64> {
    ef.kronecker(ee)
}

/// `Y = F_L·(E_f ⊗ E_e)` as a row-major `MN×MN` buffer, computed row by row
/// as `E_fᵀ·F[r]·E_e` where `F[r]` is row `r` of `F_L` viewed as `M×N`.
pub(crate) fn kron_apply(exec: Exec, f: &Tensor4, ef: &DMatrix<f64>, ee: &DMatrix<f64>) -> Vec<f64> {
    let [m, n, _, _] = f.dims();
    let mn = m * n;
    let fd = f.data();
    let mut out = vec![0.0; mn * mn];
    exec.for_each_row(&mut out, mn, |r, row| {
        let frow = &fd[r * mn..(r + 1) * mn];
        // tmp[γ, i] = Σ_k F[r][γ, k] · ee[k, i]
        let mut tmp = vec![0.0; m * n];
        for g in 0..m {
            for k in 0..n {
                let x = frow[g * n + k];
                if x == 0.0 {
                    continue;
                }
                for i in 0..n {
                    tmp[g * n + i] += x * ee[(k, i)];
                }
            }
        }
        for a in 0..m {
            for g in 0..m {
                let w = ef[(g, a)];
                if w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    row[a * n + i] += w * tmp[g * n + i];
                }
            }
        }
    });
    out
}

struct Fit {
    ef: DMatrix<f64>,
    ee: DMatrix<f64>,
    lambda: DMatrix<f64>,
    y: Vec<f64>,
    /// `1 − Σλ²/‖F‖²`, clamped at zero.
    r2: f64,
}

fn evaluate(f: &Tensor4, norm2: f64, ef: DMatrix<f64>, ee: DMatrix<f64>) -> Fit {
    let [m, n, _, _] = f.dims();
    let mn = m * n;
    let y = kron_apply(Exec::default(), f, &ef, &ee);
    let mut lambda = DMatrix::zeros(m, n);
    for a in 0..m {
        for i in 0..n {
            let c = a * n + i;
            let mut acc = 0.0;
            for b in 0..m {
                let fb = ef[(b, a)];
                for j in 0..n {
                    acc += fb * ee[(j, i)] * y[(b * n + j) * mn + c];
                }
            }
            lambda[(a, i)] = acc;
        }
    }
    let captured: f64 = lambda.iter().map(|x| x * x).sum();
    let r2 = if norm2 > 0.0 {
        (1.0 - captured / norm2).max(0.0)
    } else {
        0.0
    };
    Fit {
        ef,
        ee,
        lambda,
        y,
        r2,
    }
}

fn layer_update(fit: &Fit, m: usize, n: usize) -> DMatrix<f64> {
    let mn = m * n;
    // G_f[β, α] = Σ_i λ_{αi} Σ_j Y[(β,j),(α,i)] e_i[j]
    DMatrix::from_fn(m, m, |b, a| {
        let mut acc = 0.0;
        for i in 0..n {
            let lam = fit.lambda[(a, i)];
            if lam == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for j in 0..n {
                inner += fit.y[(b * n + j) * mn + a * n + i] * fit.ee[(j, i)];
            }
            acc += lam * inner;
        }
        acc
    })
}

fn entity_update(fit: &Fit, m: usize, n: usize) -> DMatrix<f64> {
    let mn = m * n;
    // G_e[j, i] = Σ_α λ_{αi} Σ_β Y[(β,j),(α,i)] f_α[β]
    DMatrix::from_fn(n, n, |j, i| {
        let mut acc = 0.0;
        for a in 0..m {
            let lam = fit.lambda[(a, i)];
            if lam == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for b in 0..m {
                inner += fit.y[(b * n + j) * mn + a * n + i] * fit.ef[(b, a)];
            }
            acc += lam * inner;
        }
        acc
    })
}

/// Residual from the off-diagonal mass of `Qᵀ F_L Q`, free of the
/// cancellation in `‖F‖² − Σλ²`.
fn exact_residual(f: &Tensor4, fit: &Fit) -> f64 {
    let [m, n, _, _] = f.dims();
    let q = kron(&fit.ef, &fit.ee);
    let y = DMatrix::from_row_slice(m * n, m * n, &fit.y);
    let t = q.transpose() * y;
    let mut off = 0.0;
    for r in 0..m * n {
        for c in 0..m * n {
            if r != c {
                off += t[(r, c)] * t[(r, c)];
            }
        }
    }
    let norm = f.frobenius_norm();
    if norm > 0.0 {
        off.sqrt() / norm
    } else {
        0.0
    }
}

fn partial_trace_bases(f: &Tensor4) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let [m, n, _, _] = f.dims();
    let layer = DMatrix::from_fn(m, m, |a, b| (0..n).map(|i| f.get(a, i, b, i)).sum());
    let entity = DMatrix::from_fn(n, n, |i, j| (0..m).map(|a| f.get(a, i, a, j)).sum());
    let lf = sym_eig(&((&layer + layer.transpose()) * 0.5))?;
    let le = sym_eig(&((&entity + entity.transpose()) * 0.5))?;
    Ok((lf.vectors, le.vectors))
}

fn run(f: &Tensor4, opts: &CpOptions, ef: DMatrix<f64>, ee: DMatrix<f64>) -> (Fit, usize, bool) {
    let [m, n, _, _] = f.dims();
    let norm2 = f.frobenius_norm().powi(2);
    let mut fit = evaluate(f, norm2, ef, ee);
    let mut iterations = 0;
    let mut converged = fit.r2 <= 1e-24;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let prev_r = fit.r2.sqrt();
        let ef = polar_factor(&layer_update(&fit, m, n));
        let step = evaluate(f, norm2, ef, fit.ee.clone());
        let ee = polar_factor(&entity_update(&step, m, n));
        let next = evaluate(f, norm2, step.ef.clone(), ee);
        if next.r2 > fit.r2 + 1e-14 {
            // a non-improving sweep ends the iteration at the previous fit
            converged = true;
            break;
        }
        fit = next;
        if (prev_r - fit.r2.sqrt()).abs() < opts.tol || fit.r2 <= 1e-24 {
            converged = true;
        }
    }
    (fit, iterations, converged)
}

fn normalize_signs(basis: &mut DMatrix<f64>) {
    for c in 0..basis.ncols() {
        let p = dominant_index(basis.column(c).iter().map(|x| x.abs()));
        if basis[(p, c)] < 0.0 {
            basis.column_mut(c).neg_mut();
        }
    }
}

/// Order-wise spectrum of an undirected representing tensor.
pub fn orthogonal_cp(f: &RepresentingTensor, opts: CpOptions) -> Result<OrderWiseSpectrum> {
    let (m, n) = f.dims();
    if f.directed {
        return Err(MgspError::InvalidArgument(
            "order-wise spectrum is defined for undirected networks only".into(),
        ));
    }
    let t = f.tensor();
    let asym = {
        let fl = t.layerwise_matrix();
        (&fl - fl.transpose()).amax()
    };
    if asym > 1e-10 * t.max_abs().max(1.0) {
        return Err(MgspError::NotSymmetric(asym));
    }

    let (hf, he) = mode_bases(t);
    let (pf, pe) = partial_trace_bases(t)?;
    let mut best: Option<(Fit, usize, bool, CpInit, f64)> = None;
    for (init, ef, ee) in [(CpInit::Hosvd, hf, he), (CpInit::PartialTrace, pf, pe)] {
        let (fit, iters, conv) = run(t, &opts, ef, ee);
        let res = exact_residual(t, &fit);
        if best.as_ref().is_none_or(|b| res < b.4) {
            best = Some((fit, iters, conv, init, res));
        }
    }
    let (fit, iterations, converged, init, residual) = best.expect("two candidates");
    let mut layer_basis = fit.ef;
    let mut entity_basis = fit.ee;
    normalize_signs(&mut layer_basis);
    normalize_signs(&mut entity_basis);
    Ok(OrderWiseSpectrum {
        m,
        n,
        layer_basis,
        entity_basis,
        coefficients: fit.lambda,
        residual,
        iterations,
        converged,
        init,
    })
}

/// Order-wise M-GFT on the sides selected by `mode`.
pub fn mgft_orderwise(spec: &OrderWiseSpectrum, s: &MlnSignal, mode: TransformMode) -> Result<DMatrix<f64>> {
    separable_forward(spec, s, mode)
}

/// Inverse order-wise M-GFT; `Joint` gives `E_f·ŝ·E_eᵀ`.
pub fn imgft_orderwise(
    spec: &OrderWiseSpectrum,
    coeffs: &DMatrix<f64>,
    mode: TransformMode,
) -> Result<MlnSignal> {
    separable_inverse(spec, coeffs, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::x4;
    use crate::network::{adjacency, build_from_edges, gen_er_multiplex, Edge};

    fn is_hadamard_up_to_sign(b: &DMatrix<f64>) -> bool {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        (0..2).all(|c| {
            let col = b.column(c);
            (col[0].abs() - h).abs() < 1e-8 && (col[1].abs() - h).abs() < 1e-8
        })
    }

    #[test]
    fn x4_is_exact_kronecker_sum() {
        let spec = orthogonal_cp(&adjacency(&x4()), CpOptions::default()).unwrap();
        assert!(spec.residual < 1e-8, "residual {}", spec.residual);
        assert!(is_hadamard_up_to_sign(&spec.layer_basis));
        assert!(is_hadamard_up_to_sign(&spec.entity_basis));
        let mut vals: Vec<f64> = spec.coefficients.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((v - e).abs() < 1e-8, "{vals:?}");
        }
    }

    #[test]
    fn single_layer_reduces_to_eigendecomposition() {
        let net = build_from_edges(
            1,
            4,
            false,
            &[
                Edge::new(0, 0, 0, 1, 1.0),
                Edge::new(0, 1, 0, 2, 2.0),
                Edge::new(0, 2, 0, 3, 0.5),
                Edge::new(0, 0, 0, 3, 1.5),
            ],
        )
        .unwrap();
        let f = adjacency(&net);
        let spec = orthogonal_cp(&f, CpOptions::default()).unwrap();
        assert!(spec.residual < 1e-10);
        let mut vals: Vec<f64> = spec.coefficients.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let eig = sym_eig(&f.tensor().layerwise_matrix()).unwrap();
        for (v, e) in vals.iter().zip(&eig.values) {
            assert!((v - e).abs() < 1e-10);
        }
    }

    #[test]
    fn gram_tensor_is_superdiagonal() {
        let net = gen_er_multiplex(0.3, 0.5, 3, 5, 4).unwrap();
        let spec = orthogonal_cp(&adjacency(&net), CpOptions::default()).unwrap();
        let w = spec.gram_tensor();
        let id = Tensor4::identity(3, 5);
        assert!(w.sub(&id).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn pair_residuals_bounded_by_fit() {
        let net = gen_er_multiplex(0.5, 0.3, 3, 4, 8).unwrap();
        let f = adjacency(&net);
        let spec = orthogonal_cp(&f, CpOptions::default()).unwrap();
        let r = spec.eigen_residuals(&f);
        assert!(r.amax() <= spec.residual + 1e-9);
        let rec = spec.reconstruct().relative_error(f.tensor()).unwrap();
        assert!((rec - spec.residual).abs() < 1e-10);
    }

    #[test]
    fn transforms_round_trip() {
        let net = gen_er_multiplex(0.5, 0.5, 3, 4, 1).unwrap();
        let spec = orthogonal_cp(&adjacency(&net), CpOptions::default()).unwrap();
        let s = MlnSignal::new(DMatrix::from_fn(3, 4, |a, i| (a * 4 + i) as f64 - 5.0)).unwrap();
        for mode in [TransformMode::Layer, TransformMode::Entity, TransformMode::Joint] {
            let c = mgft_orderwise(&spec, &s, mode).unwrap();
            let back = imgft_orderwise(&spec, &c, mode).unwrap();
            assert!((back.matrix() - s.matrix()).amax() < 1e-10);
        }
        let mut unit = DMatrix::zeros(3, 4);
        unit[(1, 2)] = 1.0;
        let v = imgft_orderwise(&spec, &unit, TransformMode::Joint).unwrap();
        assert!((v.matrix() - spec.factor_tensor(1, 2)).amax() < 1e-14);
        assert!(mgft_orderwise(&spec, &MlnSignal::zeros(2, 4), TransformMode::Joint).is_err());
    }

    #[test]
    fn x4_hadamard_joint_coefficients() {
        let spec = orthogonal_cp(&adjacency(&x4()), CpOptions::default()).unwrap();
        let s = MlnSignal::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let c = mgft_orderwise(&spec, &s, TransformMode::Joint).unwrap();
        // With H = [[1,1],[1,-1]]/√2 in both slots, Hᵀ·I·H = I. Sign flips or
        // column swaps of either basis permute/negate entries of that result.
        let mut mags: Vec<f64> = c.iter().map(|x| x.abs()).collect();
        mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, e) in mags.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((x - e).abs() < 1e-8, "{c}");
        }
    }

    #[test]
    fn directed_rejected() {
        let c = adjacency(&crate::network::gen_cyclic(3).unwrap());
        assert!(orthogonal_cp(&c, CpOptions::default()).is_err());
    }
}
