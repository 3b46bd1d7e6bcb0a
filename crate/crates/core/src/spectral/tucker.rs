//! Truncated Tucker decomposition by higher-order orthogonal iteration.

use nalgebra::DMatrix;
use rand::Rng;

use super::singular::core_of;
use crate::error::{MgspError, Result};
use crate::network::RepresentingTensor;
use crate::numerics::{left_singular_basis, polar_factor};
use crate::rng::seeded;
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuckerOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the extra random orthonormal start tried besides truncated HOSVD.
    pub seed: u64,
}

impl Default for TuckerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TuckerDecomposition {
    pub ranks: [usize; 4],
    /// `r1×r2×r3×r4` core.
    pub core: Tensor4,
    /// Column-orthonormal `dim_n × r_n` factors.
    pub factors: [DMatrix<f64>; 4],
    /// Final relative Frobenius residual.
    pub residual: f64,
    /// Residual after initialization and after every sweep of the kept run.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl TuckerDecomposition {
    pub fn reconstruct(&self) -> Tensor4 {
        let mut t = self.core.clone();
        for (mode, u) in self.factors.iter().enumerate() {
            t = t.mode_product(mode, u).expect("factor shapes match the core");
        }
        t
    }
}

fn leading(u: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    u.columns(0, r).into_owned()
}

fn residual(t: &Tensor4, factors: &[DMatrix<f64>; 4]) -> (Tensor4, f64) {
    let core = core_of(t, factors);
    let mut rec = core.clone();
    for (mode, u) in factors.iter().enumerate() {
        rec = rec.mode_product(mode, u).expect("shapes match");
    }
    let err = rec.relative_error(t).expect("same shape");
    (core, err)
}

fn random_orthonormal(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    // a uniform random matrix has full column rank with probability one,
    // so its polar factor has orthonormal columns
    let g = DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0));
    polar_factor(&g)
}

struct Run {
    factors: [DMatrix<f64>; 4],
    core: Tensor4,
    residual: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn hooi(t: &Tensor4, ranks: [usize; 4], opts: &TuckerOptions, start: [DMatrix<f64>; 4]) -> Run {
    let (core, r0) = residual(t, &start);
    let mut run = Run {
        factors: start,
        core,
        residual: r0,
        history: vec![r0],
        iterations: 0,
        converged: r0 <= 1e-14,
    };
    while !run.converged && run.iterations < opts.max_iter {
        let mut next = run.factors.clone();
        for mode in 0..4 {
            let mut y = t.clone();
            for (other, u) in next.iter().enumerate() {
                if other != mode {
                    y = y.mode_product(other, &u.transpose()).expect("shapes match");
                }
            }
            let (basis, _) = left_singular_basis(&y.unfold(mode));
            next[mode] = leading(&basis, ranks[mode]);
        }
        let (core, r) = residual(t, &next);
        run.iterations += 1;
        if r > run.residual {
            // round-off can nudge a converged sweep upward; keep the better fit
            run.converged = true;
            break;
        }
        let delta = run.residual - r;
        run.factors = next;
        run.core = core;
        run.residual = r;
        run.history.push(r);
        if delta < opts.tol {
            run.converged = true;
        }
    }
    run
}

/// Rank-`(r1,r2,r3,r4)` Tucker fit of `F`.
///
/// Two starts are refined, the truncated HOSVD and a seeded random
/// orthonormal frame, and the lower final residual is kept. The kept run's
/// residual history is non-increasing.
pub fn tucker_hooi(f: &RepresentingTensor, ranks: [usize; 4], opts: TuckerOptions) -> Result<TuckerDecomposition> {
    let t = f.tensor();
    let dims = t.dims();
    for (r, d) in ranks.iter().zip(dims) {
        if *r == 0 || *r > d {
            return Err(MgspError::InvalidArgument(format!(
                "Tucker ranks {ranks:?} must lie in 1..=dims {dims:?}"
            )));
        }
    }
    let hosvd_start: [DMatrix<f64>; 4] =
        std::array::from_fn(|mode| leading(&left_singular_basis(&t.unfold(mode)).0, ranks[mode]));
    let mut rng = seeded(opts.seed);
    let random_start: [DMatrix<f64>; 4] =
        std::array::from_fn(|mode| random_orthonormal(dims[mode], ranks[mode], &mut rng));

    let a = hooi(t, ranks, &opts, hosvd_start);
    let best = if a.residual <= 1e-14 {
        a
    } else {
        let b = hooi(t, ranks, &opts, random_start);
        if b.residual < a.residual {
            b
        } else {
            a
        }
    };
    Ok(TuckerDecomposition {
        ranks,
        core: best.core,
        factors: best.factors,
        residual: best.residual,
        history: best.history,
        iterations: best.iterations,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::x4;
    use crate::network::{adjacency, gen_er_multiplex, laplacian};

    #[test]
    fn full_rank_is_lossless() {
        let f = adjacency(&x4());
        let d = tucker_hooi(&f, [2, 2, 2, 2], TuckerOptions::default()).unwrap();
        assert!(d.residual < 1e-10);
        assert!(d.reconstruct().relative_error(f.tensor()).unwrap() < 1e-10);
    }

    /// Brute force over unit vectors `(cos θ, sin θ)` in every mode: the best
    /// rank-(1,1,1,1) value is `max |F ×₁u₁ᵀ ×₂u₂ᵀ ×₃u₃ᵀ ×₄u₄ᵀ|`.
    #[test]
    fn x4_rank_one_matches_exhaustive_search() {
        let f = adjacency(&x4());
        let t = f.tensor();
        let steps = 72;
        let angles: Vec<(f64, f64)> = (0..steps)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / steps as f64;
                (th.cos(), th.sin())
            })
            .collect();
        let mut best = 0.0_f64;
        for u1 in &angles {
            for u2 in &angles {
                for u3 in &angles {
                    for u4 in &angles {
                        let u = [u1, u2, u3, u4];
                        let mut v = 0.0;
                        for a in 0..2 {
                            for i in 0..2 {
                                for b in 0..2 {
                                    for j in 0..2 {
                                        let c = |x: &(f64, f64), k: usize| if k == 0 { x.0 } else { x.1 };
                                        v += t.get(a, i, b, j)
                                            * c(u[0], a)
                                            * c(u[1], i)
                                            * c(u[2], b)
                                            * c(u[3], j);
                                    }
                                }
                            }
                        }
                        best = best.max(v.abs());
                    }
                }
            }
        }
        let norm2 = t.frobenius_norm().powi(2);
        let oracle = ((norm2 - best * best).max(0.0)).sqrt() / norm2.sqrt();
        let d = tucker_hooi(&f, [1, 1, 1, 1], TuckerOptions::default()).unwrap();
        assert!((best - 2.0).abs() < 1e-9);
        assert!((d.residual - oracle).abs() < 1e-8, "{} vs {oracle}", d.residual);
    }

    #[test]
    fn history_is_monotone_and_ranks_nest() {
        let net = gen_er_multiplex(0.5, 0.5, 3, 5, 11).unwrap();
        let f = laplacian(&net);
        let mut prev = f64::INFINITY;
        for r in 1..=5 {
            let d = tucker_hooi(&f, [3, r, 3, r], TuckerOptions::default()).unwrap();
            assert!(d.history.windows(2).all(|w| w[1] <= w[0]));
            assert!(d.residual <= prev + 1e-9, "rank {r}: {} > {prev}", d.residual);
            prev = d.residual;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn invalid_ranks() {
        let f = adjacency(&x4());
        assert!(tucker_hooi(&f, [0, 1, 1, 1], TuckerOptions::default()).is_err());
        assert!(tucker_hooi(&f, [3, 1, 1, 1], TuckerOptions::default()).is_err());
    }
}
