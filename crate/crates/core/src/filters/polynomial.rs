//! Shift-domain polynomial filters `h(s) = Σ_k a_k F^[k] ⋄ s`.

use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::exec::Exec;
use crate::network::{RepresentationKind, RepresentingTensor};
use crate::signal::{apply_tensor_with, MlnSignal};
use crate::spectral::joint_spectrum;
use crate::tensor::{contract_tensors_with, Tensor4};

/// How `F^[τ]` is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerPath {
    /// Repeated `⊙` contraction.
    #[default]
    Contraction,
    /// `Σ_k λ_k^τ V_k ∘ V_k` from the joint spectrum (undirected only).
    Spectral,
}

pub fn poly_power(f: &RepresentingTensor, tau: u32, path: PowerPath) -> Result<Tensor4> {
    poly_power_with(Exec::default(), f, tau, path)
}

pub fn poly_power_with(exec: Exec, f: &RepresentingTensor, tau: u32, path: PowerPath) -> Result<Tensor4> {
    let (m, n) = f.dims();
    match path {
        PowerPath::Contraction => {
            let mut acc = Tensor4::identity(m, n);
            for _ in 0..tau {
                acc = contract_tensors_with(exec, &acc, f.tensor())?;
            }
            Ok(acc)
        }
        PowerPath::Spectral => {
            if f.directed {
                return Err(MgspError::InvalidArgument(
                    "spectral powers need an undirected representing tensor".into(),
                ));
            }
            let spec = joint_spectrum(f)?;
            Ok(spec.spectral_tensor(|x| x.powi(tau as i32)))
        }
    }
}

/// `F^[0], …, F^[k_max]` by successive contraction.
pub fn poly_powers(exec: Exec, f: &RepresentingTensor, k_max: u32) -> Result<Vec<Tensor4>> {
    let (m, n) = f.dims();
    let mut out = Vec::with_capacity(k_max as usize + 1);
    out.push(Tensor4::identity(m, n));
    for k in 1..=k_max as usize {
        let next = contract_tensors_with(exec, &out[k - 1], f.tensor())?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFilter {
    /// `a_0, …, a_K`.
    pub coefficients: Vec<f64>,
    pub kind: RepresentationKind,
}

impl PolynomialFilter {
    pub fn new(coefficients: Vec<f64>, kind: RepresentationKind) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(MgspError::InvalidArgument("a polynomial filter needs at least a_0".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(MgspError::NonFinite("filter coefficient".into()));
        }
        Ok(Self { coefficients, kind })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }
}

/// `Σ_k a_k F^[k] ⋄ s`, evaluated as repeated shifts of `s` so no tensor
/// power is ever materialized.
pub fn apply_polynomial(filter: &PolynomialFilter, f: &RepresentingTensor, s: &MlnSignal) -> Result<MlnSignal> {
    apply_polynomial_with(Exec::default(), filter, f, s)
}

pub fn apply_polynomial_with(
    exec: Exec,
    filter: &PolynomialFilter,
    f: &RepresentingTensor,
    s: &MlnSignal,
) -> Result<MlnSignal> {
    let (m, n) = f.dims();
    s.check_shape(m, n)?;
    let mut power = s.clone();
    let mut out = s.matrix() * filter.coefficients[0];
    for &a in &filter.coefficients[1..] {
        power = apply_tensor_with(exec, f.tensor(), &power)?;
        out += power.matrix() * a;
    }
    MlnSignal::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::x4;
    use crate::network::{adjacency, gen_er_multiplex, laplacian};
    use crate::signal::shift;
    use nalgebra::DMatrix;

    #[test]
    fn x4_square() {
        let f = adjacency(&x4());
        let p2 = poly_power(&f, 2, PowerPath::Contraction).unwrap();
        let expect = [
            2.0, 0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 0.0, 2.0, 2.0, 0.0, 2.0, 0.0, 0.0, 2.0,
        ];
        assert_eq!(p2.data(), &expect);
        let sp = poly_power(&f, 2, PowerPath::Spectral).unwrap();
        assert!(sp.sub(&p2).unwrap().max_abs() < 1e-12);
        assert_eq!(poly_power(&f, 0, PowerPath::Contraction).unwrap(), Tensor4::identity(2, 2));
        assert_eq!(&poly_power(&f, 1, PowerPath::Contraction).unwrap(), f.tensor());
    }

    #[test]
    fn paths_agree_up_to_ten() {
        let net = gen_er_multiplex(0.5, 0.5, 3, 4, 9).unwrap();
        let f = laplacian(&net);
        let powers = poly_powers(Exec::Sequential, &f, 10).unwrap();
        for tau in 0..=10u32 {
            let sp = poly_power(&f, tau, PowerPath::Spectral).unwrap();
            let c = &powers[tau as usize];
            assert!(sp.relative_error(c).unwrap() < 1e-9, "τ={tau}");
        }
        assert!(poly_power(&adjacency(&crate::network::gen_cyclic(3).unwrap()), 2, PowerPath::Spectral).is_err());
    }

    #[test]
    fn apply_matches_repeated_shift() {
        let f = adjacency(&x4());
        let s = MlnSignal::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let h = PolynomialFilter::new(vec![0.0, 0.0, 1.0], RepresentationKind::Adjacency).unwrap();
        let out = apply_polynomial(&h, &f, &s).unwrap();
        assert_eq!(out.rows(), vec![vec![4.0, 0.0], vec![0.0, 4.0]]);
        assert_eq!(out, shift(&f, &shift(&f, &s).unwrap()).unwrap());
        let id = PolynomialFilter::new(vec![1.0], RepresentationKind::Adjacency).unwrap();
        assert_eq!(apply_polynomial(&id, &f, &s).unwrap(), s);
        let sh = PolynomialFilter::new(vec![0.0, 1.0], RepresentationKind::Adjacency).unwrap();
        assert_eq!(apply_polynomial(&sh, &f, &s).unwrap(), shift(&f, &s).unwrap());
    }

    #[test]
    fn linear_in_signal() {
        let net = gen_er_multiplex(0.5, 0.5, 2, 5, 3).unwrap();
        let f = adjacency(&net);
        let h = PolynomialFilter::new(vec![0.3, -1.0, 0.25, 0.1], RepresentationKind::Adjacency).unwrap();
        let s1 = MlnSignal::new(DMatrix::from_fn(2, 5, |a, i| (a + i) as f64)).unwrap();
        let s2 = MlnSignal::new(DMatrix::from_fn(2, 5, |a, i| (a * i) as f64 - 1.0)).unwrap();
        let mix = MlnSignal::new(s1.matrix() * 2.0 - s2.matrix() * 0.5).unwrap();
        let lhs = apply_polynomial(&h, &f, &mix).unwrap();
        let rhs = apply_polynomial(&h, &f, &s1).unwrap().matrix() * 2.0
            - apply_polynomial(&h, &f, &s2).unwrap().matrix() * 0.5;
        assert!((lhs.matrix() - rhs).amax() < 1e-12);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(PolynomialFilter::new(vec![], RepresentationKind::Adjacency).is_err());
        assert!(PolynomialFilter::new(vec![f64::NAN], RepresentationKind::Adjacency).is_err());
    }
}
