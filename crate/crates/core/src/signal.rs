//! Signals over multilayer networks and signal shifting.

use nalgebra::{DMatrix, DVector};

use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::network::RepresentingTensor;
use crate::tensor::{Convention, Tensor4};

/// An `M×N` signal: row `α`, column `i` is the sample at entity `i` in layer `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct MlnSignal {
    data: DMatrix<f64>,
}

impl MlnSignal {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.iter().any(|x| !x.is_finite()) {
            return Err(MgspError::NonFinite("signal sample".into()));
        }
        Ok(Self { data })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            data: DMatrix::zeros(m, n),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != n) {
            return Err(MgspError::ShapeMismatch("ragged signal rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(m, n, &flat))
    }

    pub fn layers(&self) -> usize {
        self.data.nrows()
    }

    pub fn entities(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn get(&self, a: usize, i: usize) -> f64 {
        self.data[(a, i)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.layers())
            .map(|a| self.data.row(a).iter().copied().collect())
            .collect()
    }

    pub(crate) fn check_shape(&self, m: usize, n: usize) -> Result<()> {
        if self.layers() != m || self.entities() != n {
            return Err(MgspError::ShapeMismatch(format!(
                "signal is {}×{}, network is {m}×{n}",
                self.layers(),
                self.entities()
            )));
        }
        Ok(())
    }
}

/// Flatten to a length-`MN` vector using the same index map as the supra-matrix.
pub fn flatten_signal(s: &MlnSignal, convention: Convention) -> DVector<f64> {
    let (m, n) = (s.layers(), s.entities());
    let mut v = DVector::zeros(m * n);
    for a in 0..m {
        for i in 0..n {
            v[convention.index(m, n, a, i)] = s.data[(a, i)];
        }
    }
    v
}

pub fn unflatten_signal(
    v: &DVector<f64>,
    m: usize,
    n: usize,
    convention: Convention,
) -> Result<MlnSignal> {
    if v.len() != m * n {
        return Err(MgspError::ShapeMismatch(format!(
            "vector of length {} cannot hold a {m}×{n} signal",
            v.len()
        )));
    }
    let mut data = DMatrix::zeros(m, n);
    for a in 0..m {
        for i in 0..n {
            data[(a, i)] = v[convention.index(m, n, a, i)];
        }
    }
    MlnSignal::new(data)
}

/// One shifting step `s'[α,i] = Σ_{β,j} F[α,i,β,j]·s[β,j]`.
pub fn shift(f: &RepresentingTensor, s: &MlnSignal) -> Result<MlnSignal> {
    apply_tensor_with(Exec::default(), f.tensor(), s)
}

/// Contraction `T ⋄ s` for any `M×N×M×N` tensor.
pub fn apply_tensor(t: &Tensor4, s: &MlnSignal) -> Result<MlnSignal> {
    apply_tensor_with(Exec::default(), t, s)
}

pub fn apply_tensor_with(exec: Exec, t: &Tensor4, s: &MlnSignal) -> Result<MlnSignal> {
    let (m, n) = t.mln_dims()?;
    s.check_shape(m, n)?;
    let mn = m * n;
    let x = flatten_signal(s, Convention::LayerWise);
    let td = t.data();
    let mut out = vec![0.0; mn];
    exec.for_each_row(&mut out, 1, |r, o| {
        let row = &td[r * mn..(r + 1) * mn];
        o[0] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    });
    unflatten_signal(&DVector::from_vec(out), m, n, Convention::LayerWise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::x4;
    use crate::network::{adjacency, build_from_edges, gen_er_multiplex, laplacian, Edge};
    use crate::tensor::flatten;

    fn diag_signal() -> MlnSignal {
        MlnSignal::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn flatten_signal_maps() {
        let s = diag_signal();
        let l = flatten_signal(&s, Convention::LayerWise);
        let e = flatten_signal(&s, Convention::EntityWise);
        assert_eq!(l.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(e.as_slice(), &[1.0, 0.0, 0.0, 1.0]);

        let r = MlnSignal::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let e = flatten_signal(&r, Convention::EntityWise);
        assert_eq!(e.as_slice(), &[1.0, 4.0, 2.0, 5.0, 3.0, 6.0]);
        for c in [Convention::LayerWise, Convention::EntityWise] {
            let back = unflatten_signal(&flatten_signal(&r, c), 2, 3, c).unwrap();
            assert_eq!(back, r);
        }
        assert!(unflatten_signal(&e, 3, 3, Convention::LayerWise).is_err());
    }

    #[test]
    fn x4_shift() {
        let out = shift(&adjacency(&x4()), &diag_signal()).unwrap();
        assert_eq!(out.rows(), vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn laplacian_kills_constant_signal() {
        let net = gen_er_multiplex(0.5, 0.5, 3, 4, 3).unwrap();
        let s = MlnSignal::new(DMatrix::from_element(3, 4, 2.5)).unwrap();
        let out = shift(&laplacian(&net), &s).unwrap();
        assert!(out.matrix().amax() < 1e-12);
    }

    #[test]
    fn single_layer_shift_is_matrix_vector_product() {
        let net = build_from_edges(
            1,
            3,
            true,
            &[Edge::new(0, 0, 0, 1, 2.0), Edge::new(0, 2, 0, 0, -1.0)],
        )
        .unwrap();
        let s = MlnSignal::from_rows(&[vec![1.0, 3.0, 5.0]]).unwrap();
        let out = shift(&adjacency(&net), &s).unwrap();
        let a = flatten(net.adjacency(), Convention::LayerWise).unwrap().data;
        let expect = a * DVector::from_vec(vec![1.0, 3.0, 5.0]);
        assert_eq!(out.matrix().row(0).transpose(), expect);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let s = MlnSignal::zeros(3, 2);
        assert!(matches!(
            shift(&adjacency(&x4()), &s),
            Err(MgspError::ShapeMismatch(_))
        ));
    }
}
