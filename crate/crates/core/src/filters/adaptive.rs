//! Greedy coordinate fit of polynomial filter coefficients.
//!
//! Coefficients are searched on a fixed grid. The grid for `a_k` is scaled by
//! `1/ρ^k` (ρ the spectral radius of `F`) so every power contributes on a
//! comparable scale. The filtered signal is mapped to per-entity scores by
//! column mean followed by the sign function, and the objective is the
//! mean square error against the known labels.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::polynomial::PolynomialFilter;
use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::network::RepresentingTensor;
use crate::numerics::{gen_eig, sym_eig};
use crate::signal::{apply_tensor_with, MlnSignal};

pub const DEFAULT_GRID: [f64; 7] = [0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveOptions {
    pub k_max: usize,
    pub grid: Vec<f64>,
    pub sweeps: usize,
    /// Start from a pure shift `(0, 1, 0, …)` and never accept a candidate
    /// whose coefficients above `a_0` are all zero.
    pub require_nonzero_shift: bool,
    /// Weight of the smoothness term `‖h − F⋄h/ρ‖²/(MN)` added to the MSE.
    /// Zero by default, which leaves the objective as plain MSE.
    pub smoothness_weight: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            k_max: 10,
            grid: DEFAULT_GRID.to_vec(),
            sweeps: 2,
            require_nonzero_shift: false,
            smoothness_weight: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaptiveFit {
    /// Coefficients on raw powers `F^[k]`.
    pub filter: PolynomialFilter,
    /// Grid values chosen for the normalized powers `(F/ρ)^[k]`.
    pub normalized: Vec<f64>,
    pub spectral_radius: f64,
    /// Training objective at the start and after every sweep.
    pub history: Vec<f64>,
    /// Training objective after every coordinate step.
    pub trace: Vec<f64>,
    pub mse: f64,
}

/// Largest eigenvalue magnitude of the flattened tensor.
pub fn spectral_radius(f: &RepresentingTensor) -> Result<f64> {
    let mat = f.flatten(crate::tensor::Convention::LayerWise).data;
    if f.directed {
        Ok(gen_eig(&mat)?.values.iter().fold(0.0, |m, v| m.max(v.norm())))
    } else {
        Ok(sym_eig(&mat)?.values.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}

/// `sign(column mean)` with `sign(0) = 0`.
pub fn map_scores(h: &DMatrix<f64>) -> Vec<f64> {
    column_means(h).into_iter().map(sign).collect()
}

pub fn column_means(h: &DMatrix<f64>) -> Vec<f64> {
    let m = h.nrows().max(1) as f64;
    (0..h.ncols()).map(|i| h.column(i).sum() / m).collect()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

struct Objective<'a> {
    /// `(F/ρ)^[k] ⋄ s` for `k = 0..=k_max+1`.
    powers: Vec<DMatrix<f64>>,
    targets: &'a [Option<f64>],
    labeled: usize,
    smoothness_weight: f64,
}

impl Objective<'_> {
    fn eval(&self, a: &[f64]) -> f64 {
        let mut h = &self.powers[0] * a[0];
        for (k, &c) in a.iter().enumerate().skip(1) {
            if c != 0.0 {
                h += &self.powers[k] * c;
            }
        }
        let scores = map_scores(&h);
        let mut err = 0.0;
        for (p, t) in scores.iter().zip(self.targets) {
            if let Some(y) = t {
                err += (p - y).powi(2);
            }
        }
        let mut obj = err / self.labeled as f64;
        if self.smoothness_weight != 0.0 {
            let mut shifted = &self.powers[1] * a[0];
            for (k, &c) in a.iter().enumerate().skip(1) {
                shifted += &self.powers[k + 1] * c;
            }
            let size = (h.nrows() * h.ncols()).max(1) as f64;
            obj += self.smoothness_weight * (h - shifted).norm_squared() / size;
        }
        obj
    }
}

/// Fit `a_0..a_K` by coordinate sweeps over the grid.
///
/// `targets[i]` is the known value of entity `i` or `None`. A coefficient
/// changes only when the candidate strictly lowers the objective, so both
/// `history` and `trace` are non-increasing.
pub fn fit_adaptive_polynomial(
    f: &RepresentingTensor,
    s: &MlnSignal,
    targets: &[Option<f64>],
    opts: &AdaptiveOptions,
) -> Result<AdaptiveFit> {
    fit_adaptive_polynomial_with(Exec::default(), f, s, targets, opts)
}

pub fn fit_adaptive_polynomial_with(
    exec: Exec,
    f: &RepresentingTensor,
    s: &MlnSignal,
    targets: &[Option<f64>],
    opts: &AdaptiveOptions,
) -> Result<AdaptiveFit> {
    let (m, n) = f.dims();
    s.check_shape(m, n)?;
    if targets.len() != n {
        return Err(MgspError::ShapeMismatch(format!(
            "{} targets for {n} entities",
            targets.len()
        )));
    }
    let labeled = targets.iter().filter(|t| t.is_some()).count();
    if labeled == 0 {
        return Err(MgspError::InvalidArgument("no labeled entities to fit against".into()));
    }
    if opts.k_max == 0 {
        return Err(MgspError::InvalidArgument("k_max must be at least 1".into()));
    }
    if opts.grid.is_empty() || opts.grid.iter().any(|g| !g.is_finite()) {
        return Err(MgspError::InvalidArgument("grid must be non-empty and finite".into()));
    }

    let rho = spectral_radius(f)?;
    let scale = if rho > 0.0 { rho } else { 1.0 };
    let mut powers = Vec::with_capacity(opts.k_max + 2);
    let mut cur = s.clone();
    powers.push(cur.matrix().clone());
    for _ in 0..=opts.k_max {
        cur = MlnSignal::new(apply_tensor_with(exec, f.tensor(), &cur)?.into_matrix() / scale)?;
        powers.push(cur.matrix().clone());
    }
    let obj = Objective {
        powers,
        targets,
        labeled,
        smoothness_weight: opts.smoothness_weight,
    };

    let mut a = vec![0.0; opts.k_max + 1];
    if opts.require_nonzero_shift {
        a[1] = 1.0;
    }
    let mut best = obj.eval(&a);
    let mut history = vec![best];
    let mut trace = vec![best];
    for _ in 0..opts.sweeps {
        for k in 0..=opts.k_max {
            for &g in &opts.grid {
                if g == a[k] {
                    continue;
                }
                let prev = a[k];
                a[k] = g;
                let admissible = !opts.require_nonzero_shift || a[1..].iter().any(|&c| c != 0.0);
                let value = if admissible { obj.eval(&a) } else { f64::INFINITY };
                if value < best {
                    best = value;
                } else {
                    a[k] = prev;
                }
            }
            trace.push(best);
        }
        history.push(best);
    }

    let raw: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(k, c)| c / scale.powi(k as i32))
        .collect();
    Ok(AdaptiveFit {
        filter: PolynomialFilter::new(raw, f.kind)?,
        normalized: a,
        spectral_radius: rho,
        history,
        trace,
        mse: best,
    })
}
