use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dominant_index;
use crate::error::{MgspError, Result};

/// Real eigenpairs of a symmetric matrix, values ascending, orthonormal
/// column eigenvectors aligned with `values`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// Right eigenpairs of a general matrix, values sorted by (real, imaginary).
#[derive(Debug, Clone)]
pub struct ComplexEigenPairs {
    pub values: Vec<Complex64>,
    pub vectors: DMatrix<Complex64>,
}

const SYMMETRY_TOL: f64 = 1e-10;
const GEN_RESIDUAL_TOL: f64 = 1e-8;

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(MgspError::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

pub fn sym_eig(a: &DMatrix<f64>) -> Result<EigenPairs> {
    check_square(a)?;
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let asym = (a - a.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(MgspError::NotSymmetric(asym));
    }
    if n == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eig.eigenvalues[x]
            .partial_cmp(&eig.eigenvalues[y])
            .unwrap_or(Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let p = dominant_index(col.iter().map(|x| x.abs()));
        let sign = if col[p] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(dst, &(col * sign));
    }
    Ok(EigenPairs { values, vectors })
}

/// Tolerant lexicographic order on (re, im), so round-off in the real part
/// does not reorder conjugate pairs.
fn complex_order(x: &Complex64, y: &Complex64, tol: f64) -> Ordering {
    if (x.re - y.re).abs() > tol {
        x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal)
    } else if (x.im - y.im).abs() > tol {
        x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal)
    } else {
        Ordering::Equal
    }
}

pub fn gen_eig(a: &DMatrix<f64>) -> Result<ComplexEigenPairs> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(ComplexEigenPairs {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let eig = fm
        .eigen()
        .map_err(|e| MgspError::Numeric(format!("general eigendecomposition failed: {e:?}")))?;
    let s = eig.S();
    let u = eig.U();
    let raw_values: Vec<Complex64> = (0..n).map(|k| Complex64::new(s[k].re, s[k].im)).collect();
    let norm = a.norm();
    let tol = 1e-9 * norm.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| complex_order(&raw_values[x], &raw_values[y], tol));

    let ac = a.map(|x| Complex64::new(x, 0.0));
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v: Vec<Complex64> = (0..n)
            .map(|r| {
                let z = u[(r, src)];
                Complex64::new(z.re, z.im)
            })
            .collect();
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(MgspError::Numeric("zero eigenvector returned".into()));
        }
        let p = dominant_index(v.iter().map(|z| z.norm()));
        let phase = v[p] / v[p].norm();
        for z in v.iter_mut() {
            *z /= phase * nrm;
        }
        v[p] = Complex64::new(v[p].re, 0.0);
        let lambda = raw_values[src];
        let col = nalgebra::DVector::from_vec(v);
        let resid = (&ac * &col - &col * lambda).norm();
        if resid > GEN_RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE) && resid > 1e-300 {
            return Err(MgspError::Numeric(format!(
                "eigenpair residual {resid:e} exceeds {GEN_RESIDUAL_TOL:e}·‖A‖ (defective matrix?)"
            )));
        }
        vectors.set_column(dst, &col);
        values.push(lambda);
    }
    Ok(ComplexEigenPairs { values, vectors })
}
