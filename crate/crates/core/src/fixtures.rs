//! Small networks with known spectra, shared by tests and the CLI.

use crate::network::{build_from_edges, Edge, MultilayerNetwork};

/// Two layers of two entities; intralayer edges `(·,0)-(·,1)` and
/// counterpart interlayer edges, all of weight 1. Its layer-wise
/// supra-adjacency is the 4-cycle.
pub fn x4() -> MultilayerNetwork {
    build_from_edges(
        2,
        2,
        false,
        &[
            Edge::new(0, 0, 0, 1, 1.0),
            Edge::new(1, 0, 1, 1, 1.0),
            Edge::new(0, 0, 1, 0, 1.0),
            Edge::new(0, 1, 1, 1, 1.0),
        ],
    )
    .expect("fixture edges are valid")
}
