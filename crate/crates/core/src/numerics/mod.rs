//! Dense linear-algebra kernels with fixed ordering and sign conventions.
//!
//! Symmetric eigenproblems and SVDs are delegated to `nalgebra`, general
//! (non-symmetric) eigenproblems to `faer`. Everything returned from here
//! is sorted and sign-normalized so downstream spectra are deterministic.

mod eig;
mod kmeans;
mod svd;

pub use eig::{gen_eig, sym_eig, ComplexEigenPairs, EigenPairs};
pub use kmeans::{kmeans, KMeansResult, KMEANS_MAX_ITER};
pub use svd::{left_singular_basis, nearest_orthogonal, polar_factor, svd, SvdFactors};

/// Index of the entry with the largest magnitude; near-ties (within 1e-12
/// relative) go to the lowest index.
pub(crate) fn dominant_index<I: Iterator<Item = f64>>(mags: I) -> usize {
    let mags: Vec<f64> = mags.collect();
    let max = mags.iter().cloned().fold(0.0_f64, f64::max);
    let tol = 1e-12 * max.max(f64::MIN_POSITIVE);
    mags.iter().position(|&x| x >= max - tol).unwrap_or(0)
}
