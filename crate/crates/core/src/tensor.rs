//! Dense fourth-order tensors and the supra-matrix flattenings.
//!
//! Storage is row-major over `[d0, d1, d2, d3]`. For a representing tensor
//! of shape `M×N×M×N` this is exactly the row-major layout of the
//! layer-wise supra-matrix, with row `N·α+i` and column `N·β+j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dims: [usize; 4],
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dims: [usize; 4]) -> Self {
        Self {
            dims,
            data: vec![0.0; dims.iter().product()],
        }
    }

    pub fn from_vec(dims: [usize; 4], data: Vec<f64>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(MgspError::ShapeMismatch(format!(
                "tensor {:?} needs {} entries, got {}",
                dims,
                len,
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    /// `I[α,i,β,j] = δ(α,β)·δ(i,j)`, the unit of the ⊙ contraction.
    pub fn identity(m: usize, n: usize) -> Self {
        let mut t = Self::zeros([m, n, m, n]);
        let mn = m * n;
        for r in 0..mn {
            t.data[r * mn + r] = 1.0;
        }
        t
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn offset(&self, a: usize, i: usize, b: usize, j: usize) -> usize {
        let [_, d1, d2, d3] = self.dims;
        ((a * d1 + i) * d2 + b) * d3 + j
    }

    #[inline]
    pub fn get(&self, a: usize, i: usize, b: usize, j: usize) -> f64 {
        self.data[self.offset(a, i, b, j)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, i: usize, b: usize, j: usize, v: f64) {
        let o = self.offset(a, i, b, j);
        self.data[o] = v;
    }

    /// True when the shape is `M×N×M×N`.
    pub fn is_mln_shaped(&self) -> bool {
        self.dims[0] == self.dims[2] && self.dims[1] == self.dims[3]
    }

    /// `(M, N)` for an `M×N×M×N` tensor.
    pub fn mln_dims(&self) -> Result<(usize, usize)> {
        if !self.is_mln_shaped() {
            return Err(MgspError::ShapeMismatch(format!(
                "expected M×N×M×N tensor, got {:?}",
                self.dims
            )));
        }
        Ok((self.dims[0], self.dims[1]))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Tensor4) -> Result<Tensor4> {
        self.check_same(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Tensor4 {
            dims: self.dims,
            data,
        })
    }

    pub fn add(&self, other: &Tensor4) -> Result<Tensor4> {
        self.check_same(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Tensor4 {
            dims: self.dims,
            data,
        })
    }

    pub fn scaled(&self, s: f64) -> Tensor4 {
        Tensor4 {
            dims: self.dims,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `‖self − other‖_F / ‖other‖_F`, or the absolute error when `other` is zero.
    pub fn relative_error(&self, other: &Tensor4) -> Result<f64> {
        let diff = self.sub(other)?.frobenius_norm();
        let base = other.frobenius_norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }

    fn check_same(&self, other: &Tensor4) -> Result<()> {
        if self.dims != other.dims {
            return Err(MgspError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    fn strides(&self) -> [usize; 4] {
        let [_, d1, d2, d3] = self.dims;
        [d1 * d2 * d3, d2 * d3, d3, 1]
    }

    /// Mode-`n` unfolding: `dims[n]` rows, remaining indices (in mode order,
    /// last fastest) as columns.
    pub fn unfold(&self, mode: usize) -> DMatrix<f64> {
        assert!(mode < 4, "mode must be 0..4");
        let rows = self.dims[mode];
        let cols = self.data.len() / rows.max(1);
        let strides = self.strides();
        let others: Vec<usize> = (0..4).filter(|&m| m != mode).collect();
        let mut out = DMatrix::zeros(rows, cols);
        for r in 0..rows {
            let mut c = 0;
            for x in 0..self.dims[others[0]] {
                for y in 0..self.dims[others[1]] {
                    for z in 0..self.dims[others[2]] {
                        let off = r * strides[mode]
                            + x * strides[others[0]]
                            + y * strides[others[1]]
                            + z * strides[others[2]];
                        out[(r, c)] = self.data[off];
                        c += 1;
                    }
                }
            }
        }
        out
    }

    /// Mode-`n` product `self ×ₙ U`: `Y[…k…] = Σ_{iₙ} U[k, iₙ] X[…iₙ…]`.
    pub fn mode_product(&self, mode: usize, u: &DMatrix<f64>) -> Result<Tensor4> {
        if mode >= 4 || u.ncols() != self.dims[mode] {
            return Err(MgspError::ShapeMismatch(format!(
                "mode-{} product with {}×{} matrix on tensor {:?}",
                mode,
                u.nrows(),
                u.ncols(),
                self.dims
            )));
        }
        let mut dims = self.dims;
        dims[mode] = u.nrows();
        let mut out = Tensor4::zeros(dims);
        let in_strides = self.strides();
        let out_strides = out.strides();
        let [d0, d1, d2, d3] = dims;
        for a in 0..d0 {
            for b in 0..d1 {
                for c in 0..d2 {
                    for d in 0..d3 {
                        let idx = [a, b, c, d];
                        let k = idx[mode];
                        let mut base = 0;
                        for m in 0..4 {
                            if m != mode {
                                base += idx[m] * in_strides[m];
                            }
                        }
                        let mut acc = 0.0;
                        for src in 0..self.dims[mode] {
                            acc += u[(k, src)] * self.data[base + src * in_strides[mode]];
                        }
                        let o = a * out_strides[0]
                            + b * out_strides[1]
                            + c * out_strides[2]
                            + d * out_strides[3];
                        out.data[o] = acc;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Outer product `X∘Y` of two `M×N` matrices: `T[α,i,β,j] = X[α,i]·Y[β,j]`.
    pub fn outer(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Tensor4 {
        let dims = [x.nrows(), x.ncols(), y.nrows(), y.ncols()];
        let mut t = Tensor4::zeros(dims);
        let mut o = 0;
        for a in 0..dims[0] {
            for i in 0..dims[1] {
                let xv = x[(a, i)];
                for b in 0..dims[2] {
                    for j in 0..dims[3] {
                        t.data[o] = xv * y[(b, j)];
                        o += 1;
                    }
                }
            }
        }
        t
    }

    /// Layer-wise supra-matrix view as an nalgebra matrix.
    pub(crate) fn layerwise_matrix(&self) -> DMatrix<f64> {
        let mn = self.dims[0] * self.dims[1];
        DMatrix::from_row_slice(mn, mn, &self.data)
    }

    pub(crate) fn from_layerwise_matrix(m: usize, n: usize, mat: &DMatrix<f64>) -> Tensor4 {
        let mn = m * n;
        let mut data = vec![0.0; mn * mn];
        for r in 0..mn {
            for c in 0..mn {
                data[r * mn + c] = mat[(r, c)];
            }
        }
        Tensor4 {
            dims: [m, n, m, n],
            data,
        }
    }
}

/// Row/column ordering of a supra-matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Index `N·α + i`.
    LayerWise,
    /// Index `M·i + α`.
    EntityWise,
}

impl Convention {
    #[inline]
    pub fn index(self, m: usize, n: usize, alpha: usize, i: usize) -> usize {
        match self {
            Convention::LayerWise => n * alpha + i,
            Convention::EntityWise => m * i + alpha,
        }
    }

    /// Inverse of [`Convention::index`].
    #[inline]
    pub fn split(self, m: usize, n: usize, idx: usize) -> (usize, usize) {
        match self {
            Convention::LayerWise => (idx / n, idx % n),
            Convention::EntityWise => (idx % m, idx / m),
        }
    }
}

/// An `MN×MN` flattening of a representing tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SupraMatrix {
    pub convention: Convention,
    pub m: usize,
    pub n: usize,
    pub data: DMatrix<f64>,
}

pub fn flatten(f: &Tensor4, convention: Convention) -> Result<SupraMatrix> {
    let (m, n) = f.mln_dims()?;
    let data = match convention {
        Convention::LayerWise => f.layerwise_matrix(),
        Convention::EntityWise => {
            let mn = m * n;
            let mut out = DMatrix::zeros(mn, mn);
            for a in 0..m {
                for i in 0..n {
                    let r = convention.index(m, n, a, i);
                    for b in 0..m {
                        for j in 0..n {
                            out[(r, convention.index(m, n, b, j))] = f.get(a, i, b, j);
                        }
                    }
                }
            }
            out
        }
    };
    Ok(SupraMatrix {
        convention,
        m,
        n,
        data,
    })
}

impl SupraMatrix {
    pub fn unflatten(&self) -> Result<Tensor4> {
        let mn = self.m * self.n;
        if self.data.nrows() != mn || self.data.ncols() != mn {
            return Err(MgspError::ShapeMismatch(format!(
                "supra-matrix is {}×{}, expected {mn}×{mn}",
                self.data.nrows(),
                self.data.ncols()
            )));
        }
        let mut t = Tensor4::zeros([self.m, self.n, self.m, self.n]);
        for r in 0..mn {
            let (a, i) = self.convention.split(self.m, self.n, r);
            for c in 0..mn {
                let (b, j) = self.convention.split(self.m, self.n, c);
                t.set(a, i, b, j, self.data[(r, c)]);
            }
        }
        Ok(t)
    }
}

/// The ⊙ product `W[α,i,ε,p] = Σ_{β,j} U[α,i,β,j]·V[β,j,ε,p]`.
pub fn contract_tensors(u: &Tensor4, v: &Tensor4) -> Result<Tensor4> {
    contract_tensors_with(Exec::default(), u, v)
}

pub fn contract_tensors_with(exec: Exec, u: &Tensor4, v: &Tensor4) -> Result<Tensor4> {
    let (m, n) = u.mln_dims()?;
    if v.dims != u.dims {
        return Err(MgspError::ShapeMismatch(format!(
            "contraction of {:?} with {:?}",
            u.dims, v.dims
        )));
    }
    let mn = m * n;
    let mut out = Tensor4::zeros(u.dims);
    let (ud, vd) = (&u.data, &v.data);
    exec.for_each_row(&mut out.data, mn, |r, row| {
        let urow = &ud[r * mn..(r + 1) * mn];
        for (k, &w) in urow.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let vrow = &vd[k * mn..(k + 1) * mn];
            for (o, &x) in row.iter_mut().zip(vrow) {
                *o += w * x;
            }
        }
    });
    Ok(out)
}
