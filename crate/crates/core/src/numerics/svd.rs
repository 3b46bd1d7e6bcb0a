use std::cmp::Ordering;

use nalgebra::DMatrix;

use super::{dominant_index, sym_eig};
use crate::error::{MgspError, Result};

/// Thin SVD `A = U·diag(σ)·Vᵀ` with `σ` descending and each left vector
/// normalized so its largest-magnitude entry is positive.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for c in 0..k {
            let s = self.singular_values[c];
            us.column_mut(c).scale_mut(s);
        }
        us * self.v.transpose()
    }
}

pub fn svd(a: &DMatrix<f64>) -> SvdFactors {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return SvdFactors {
            u: DMatrix::zeros(m, 0),
            singular_values: vec![],
            v: DMatrix::zeros(n, 0),
        };
    }
    let dec = a.clone().svd(true, true);
    let u_raw = dec.u.expect("requested U");
    let vt_raw = dec.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| {
        dec.singular_values[y]
            .partial_cmp(&dec.singular_values[x])
            .unwrap_or(Ordering::Equal)
    });
    let mut u = DMatrix::zeros(m, k);
    let mut v = DMatrix::zeros(n, k);
    let mut singular_values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let ucol = u_raw.column(src);
        let p = dominant_index(ucol.iter().map(|x| x.abs()));
        let sign = if ucol[p] < 0.0 { -1.0 } else { 1.0 };
        u.set_column(dst, &(ucol * sign));
        v.set_column(dst, &(vt_raw.row(src).transpose() * sign));
        singular_values.push(dec.singular_values[src]);
    }
    SvdFactors {
        u,
        singular_values,
        v,
    }
}

/// Full orthonormal left basis (`rows×rows`) of `a` with the matching
/// singular values (zero-padded when `a` has fewer columns than rows).
pub fn left_singular_basis(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let (m, n) = a.shape();
    if m <= n {
        let f = svd(a);
        return (f.u, f.singular_values);
    }
    // tall case: eigenvectors of the Gram matrix span the whole row space
    let gram = a * a.transpose();
    let e = sym_eig(&gram).expect("Gram matrix is symmetric");
    let mut u = DMatrix::zeros(m, m);
    let mut values = Vec::with_capacity(m);
    for (dst, src) in (0..m).rev().enumerate() {
        u.set_column(dst, &e.vectors.column(src));
        values.push(e.values[src].max(0.0).sqrt());
    }
    (u, values)
}

/// `U·Vᵀ` from the SVD of a square matrix, without a rank check.
pub fn polar_factor(a: &DMatrix<f64>) -> DMatrix<f64> {
    let f = svd(a);
    &f.u * f.v.transpose()
}

/// Closest orthogonal matrix in Frobenius norm (the polar factor).
pub fn nearest_orthogonal(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(MgspError::ShapeMismatch(format!(
            "nearest orthogonal matrix needs a square input, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let f = svd(a);
    let smax = f.singular_values.first().copied().unwrap_or(0.0);
    let smin = f.singular_values.last().copied().unwrap_or(0.0);
    if !(smin > 1e-12 * smax) {
        return Err(MgspError::Numeric(format!(
            "rank-deficient input (σ_min = {smin:e}, σ_max = {smax:e})"
        )));
    }
    Ok(&f.u * f.v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn random_matrix(r: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut g = rng::seeded(seed);
        DMatrix::from_fn(r, c, |_, _| g.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn diagonal_values() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, 2.0]));
        let f = svd(&d);
        assert_eq!(f.singular_values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn rank_one() {
        let u = nalgebra::DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let v = nalgebra::DVector::from_vec(vec![3.0, 4.0]);
        let f = svd(&(&u * v.transpose()));
        assert!((f.singular_values[0] - 15.0).abs() < 1e-12);
        assert!(f.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn random_reconstruction() {
        let a = random_matrix(5, 3, 11);
        let f = svd(&a);
        assert!((f.reconstruct() - &a).norm() / a.norm() < 1e-10);
        assert!((f.u.transpose() * &f.u - DMatrix::identity(3, 3)).amax() < 1e-10);
        assert!((f.v.transpose() * &f.v - DMatrix::identity(3, 3)).amax() < 1e-10);
        assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tall_left_basis_is_complete() {
        let a = random_matrix(5, 2, 3);
        let (u, s) = left_singular_basis(&a);
        assert_eq!(u.shape(), (5, 5));
        assert!((u.transpose() * &u - DMatrix::identity(5, 5)).amax() < 1e-10);
        let thin = svd(&a);
        assert!((s[0] - thin.singular_values[0]).abs() < 1e-10);
        assert!(s[2].abs() < 1e-6);
    }

    #[test]
    fn polar_fixed_points() {
        let eye2 = DMatrix::<f64>::identity(3, 3) * 2.0;
        let q = nearest_orthogonal(&eye2).unwrap();
        assert!((q - DMatrix::identity(3, 3)).amax() < 1e-14);

        let th: f64 = 0.7;
        let rot = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let q = nearest_orthogonal(&rot).unwrap();
        assert!((q - &rot).amax() < 1e-14);

        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(nearest_orthogonal(&singular).unwrap_err().is_numeric());
    }

    #[test]
    fn polar_beats_rotation_grid() {
        // Brute force over 2-D rotations and reflections on a fine angle grid.
        let a = random_matrix(2, 2, 5);
        let q = nearest_orthogonal(&a).unwrap();
        let best_polar = (&a - &q).norm();
        let mut best_grid = f64::INFINITY;
        for step in 0..20_000 {
            let th = step as f64 * std::f64::consts::TAU / 20_000.0;
            let (c, s) = (th.cos(), th.sin());
            for cand in [
                DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
                DMatrix::from_row_slice(2, 2, &[c, s, s, -c]),
            ] {
                best_grid = best_grid.min((&a - cand).norm());
            }
        }
        assert!(best_polar <= best_grid + 1e-12);
        assert!(best_grid - best_polar < 1e-6);
        assert!((q.transpose() * &q - DMatrix::identity(2, 2)).amax() < 1e-10);
    }
}
