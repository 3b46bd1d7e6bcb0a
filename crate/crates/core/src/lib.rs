//! Signal processing over multilayer networks.
//!
//! A network with `M` layers of `N` entities is represented by a
//! fourth-order tensor `F ∈ ℝ^{M×N×M×N}`, either the adjacency or the
//! Laplacian. Signals are `M×N` matrices and shifting is the contraction
//! `F ⋄ s`.
//!
//! [`spectral`] builds the joint eigen-tensor spectrum together with two
//! separable bases from tensor decompositions, and ranks components by total
//! variation. [`filters`] holds polynomial and mask filters, and
//! [`apps`] builds the application pipelines on top of both.

pub mod apps;
pub mod error;
pub mod exec;
pub mod filters;
pub mod fixtures;
pub mod io;
pub mod network;
pub mod numerics;
pub mod properties;
pub mod rng;
pub mod signal;
pub mod spectral;
pub mod tensor;

pub use error::{MgspError, Result};
pub use exec::Exec;
pub use network::{
    build_from_edges, degree_tensor, gen_cyclic, gen_er_multiplex, laplacian, Edge,
    MultilayerNetwork, RepresentationKind, RepresentingTensor,
};
pub use signal::{flatten_signal, shift, unflatten_signal, MlnSignal};
pub use tensor::{contract_tensors, flatten, Convention, SupraMatrix, Tensor4};
