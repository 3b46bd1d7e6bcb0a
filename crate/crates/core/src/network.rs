//! Multilayer networks, their representing tensors and generators.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MgspError, Result};
use crate::rng;
use crate::tensor::{flatten, Convention, SupraMatrix, Tensor4};

/// Weighted edge from node `(b, j)` to node `(a, i)`; 0-based layer/entity indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub i: usize,
    pub b: usize,
    pub j: usize,
    pub w: f64,
}

impl Edge {
    pub fn new(a: usize, i: usize, b: usize, j: usize, w: f64) -> Self {
        Self { a, i, b, j, w }
    }
}

/// `M` layers of `N` entities each, stored as the adjacency tensor
/// `A[α,i,β,j]` = weight of the edge from `(β,j)` to `(α,i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilayerNetwork {
    m: usize,
    n: usize,
    directed: bool,
    adjacency: Tensor4,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl MultilayerNetwork {
    pub fn empty(m: usize, n: usize, directed: bool) -> Result<Self> {
        check_dims(m, n)?;
        Ok(Self {
            m,
            n,
            directed,
            adjacency: Tensor4::zeros([m, n, m, n]),
        })
    }

    /// Wrap an existing adjacency tensor, checking finiteness and (for
    /// undirected networks) partial symmetry.
    pub fn from_adjacency(adjacency: Tensor4, directed: bool) -> Result<Self> {
        let (m, n) = adjacency.mln_dims()?;
        check_dims(m, n)?;
        if let Some(x) = adjacency.data().iter().find(|x| !x.is_finite()) {
            return Err(MgspError::NonFinite(format!("adjacency entry {x}")));
        }
        let net = Self {
            m,
            n,
            directed,
            adjacency,
        };
        if !directed {
            let dev = net.asymmetry();
            if dev > SYMMETRY_TOL {
                return Err(MgspError::NotSymmetric(dev));
            }
        }
        Ok(net)
    }

    pub fn layers(&self) -> usize {
        self.m
    }

    pub fn entities(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn adjacency(&self) -> &Tensor4 {
        &self.adjacency
    }

    pub fn weight(&self, a: usize, i: usize, b: usize, j: usize) -> f64 {
        self.adjacency.get(a, i, b, j)
    }

    /// Largest `|A[α,i,β,j] − A[β,j,α,i]|`.
    pub fn asymmetry(&self) -> f64 {
        let mn = self.m * self.n;
        let d = self.adjacency.data();
        let mut dev = 0.0_f64;
        for r in 0..mn {
            for c in (r + 1)..mn {
                dev = dev.max((d[r * mn + c] - d[c * mn + r]).abs());
            }
        }
        dev
    }

    /// Nonzero entries as edges; undirected networks list each pair once
    /// (upper triangle of the layer-wise supra-matrix, diagonal included).
    pub fn edges(&self) -> Vec<Edge> {
        let mn = self.m * self.n;
        let d = self.adjacency.data();
        let mut out = Vec::new();
        for r in 0..mn {
            let start = if self.directed { 0 } else { r };
            for c in start..mn {
                let w = d[r * mn + c];
                if w != 0.0 {
                    let (a, i) = (r / self.n, r % self.n);
                    let (b, j) = (c / self.n, c % self.n);
                    out.push(Edge { a, i, b, j, w });
                }
            }
        }
        out
    }

    pub fn supra_adjacency(&self, convention: Convention) -> SupraMatrix {
        flatten(&self.adjacency, convention).expect("adjacency is M×N×M×N")
    }
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(MgspError::InvalidArgument(format!(
            "network needs M ≥ 1 and N ≥ 1, got M={m}, N={n}"
        )));
    }
    Ok(())
}

/// Build a network from an edge list. Undirected edges are mirrored, and a
/// pair given in both orientations counts as a duplicate.
pub fn build_from_edges(
    m: usize,
    n: usize,
    directed: bool,
    edges: &[Edge],
) -> Result<MultilayerNetwork> {
    let mut net = MultilayerNetwork::empty(m, n, directed)?;
    let mut seen = HashSet::with_capacity(edges.len());
    for e in edges {
        if e.a >= m || e.b >= m || e.i >= n || e.j >= n {
            return Err(MgspError::IndexOutOfRange(format!(
                "edge ({},{},{},{}) in network with M={m}, N={n}",
                e.a, e.i, e.b, e.j
            )));
        }
        if !e.w.is_finite() {
            return Err(MgspError::NonFinite(format!(
                "weight of edge ({},{},{},{})",
                e.a, e.i, e.b, e.j
            )));
        }
        let key = if directed || (e.a, e.i) <= (e.b, e.j) {
            (e.a, e.i, e.b, e.j)
        } else {
            (e.b, e.j, e.a, e.i)
        };
        if !seen.insert(key) {
            return Err(MgspError::DuplicateEdge {
                a: e.a,
                i: e.i,
                b: e.b,
                j: e.j,
            });
        }
        net.adjacency.set(e.a, e.i, e.b, e.j, e.w);
        if !directed {
            net.adjacency.set(e.b, e.j, e.a, e.i, e.w);
        }
    }
    Ok(net)
}

/// Diagonal strength tensor: `D[α,i,α,i] = Σ_{β,j} A[α,i,β,j]`.
pub fn degree_tensor(net: &MultilayerNetwork) -> Tensor4 {
    let (m, n) = (net.m, net.n);
    let mn = m * n;
    let a = net.adjacency.data();
    let mut d = Tensor4::zeros([m, n, m, n]);
    for r in 0..mn {
        let s: f64 = a[r * mn..(r + 1) * mn].iter().sum();
        d.data_mut()[r * mn + r] = s;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationKind {
    Adjacency,
    Laplacian,
}

/// The tensor `F` that drives shifting and spectra: either `A` or `L = D − A`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentingTensor {
    pub kind: RepresentationKind,
    pub directed: bool,
    tensor: Tensor4,
}

impl RepresentingTensor {
    pub fn new(net: &MultilayerNetwork, kind: RepresentationKind) -> Self {
        match kind {
            RepresentationKind::Adjacency => adjacency(net),
            RepresentationKind::Laplacian => laplacian(net),
        }
    }

    /// Wrap an arbitrary `M×N×M×N` tensor (e.g. a filter power) so it can be
    /// used wherever a representing tensor is expected.
    pub fn from_tensor(kind: RepresentationKind, directed: bool, tensor: Tensor4) -> Result<Self> {
        tensor.mln_dims()?;
        Ok(Self {
            kind,
            directed,
            tensor,
        })
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.tensor
    }

    pub fn dims(&self) -> (usize, usize) {
        let d = self.tensor.dims();
        (d[0], d[1])
    }

    pub fn flatten(&self, convention: Convention) -> SupraMatrix {
        flatten(&self.tensor, convention).expect("representing tensor is M×N×M×N")
    }
}

pub fn adjacency(net: &MultilayerNetwork) -> RepresentingTensor {
    RepresentingTensor {
        kind: RepresentationKind::Adjacency,
        directed: net.directed,
        tensor: net.adjacency.clone(),
    }
}

/// `L = D − A`.
pub fn laplacian(net: &MultilayerNetwork) -> RepresentingTensor {
    let d = degree_tensor(net);
    let tensor = d.sub(&net.adjacency).expect("same shape");
    RepresentingTensor {
        kind: RepresentationKind::Laplacian,
        directed: net.directed,
        tensor,
    }
}

/// One layer of a network whose layers may have different node counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub nodes: usize,
}

/// Result of padding an irregular network to a uniform `M×N` shape.
#[derive(Debug, Clone)]
pub struct AugmentedNetwork {
    pub network: MultilayerNetwork,
    /// `node_map[layer][local]` gives the `(α, i)` position of each original node.
    pub node_map: Vec<Vec<(usize, usize)>>,
    /// Positions of the isolated nodes that were added.
    pub added: Vec<(usize, usize)>,
}

/// Pad every layer with isolated nodes up to the largest layer size.
///
/// `edges` use per-layer local node indices (`i < layers[a].nodes`).
pub fn augment_isolated(
    layers: &[LayerSpec],
    directed: bool,
    edges: &[Edge],
) -> Result<AugmentedNetwork> {
    if layers.is_empty() {
        return Err(MgspError::InvalidArgument("no layers given".into()));
    }
    let m = layers.len();
    let n = layers.iter().map(|l| l.nodes).max().unwrap_or(0);
    for e in edges {
        if e.a >= m || e.b >= m {
            return Err(MgspError::IndexOutOfRange(format!(
                "edge layer {} / {} with {m} layers",
                e.a, e.b
            )));
        }
        if e.i >= layers[e.a].nodes || e.j >= layers[e.b].nodes {
            return Err(MgspError::IndexOutOfRange(format!(
                "edge ({},{},{},{}) references a node beyond its layer size",
                e.a, e.i, e.b, e.j
            )));
        }
    }
    let network = build_from_edges(m, n, directed, edges)?;
    let node_map = layers
        .iter()
        .enumerate()
        .map(|(a, l)| (0..l.nodes).map(|i| (a, i)).collect())
        .collect();
    let added = layers
        .iter()
        .enumerate()
        .flat_map(|(a, l)| (l.nodes..n).map(move |i| (a, i)))
        .collect();
    Ok(AugmentedNetwork {
        network,
        node_map,
        added,
    })
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MgspError::InvalidArgument(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Undirected ER multiplex `ER(p, q, M, N)`.
///
/// Draw order (one uniform draw per candidate pair): for each layer `α`,
/// pairs `i < j` in lexicographic order with probability `p`; then for each
/// entity `i`, layer pairs `α < β` with probability `q`. All weights are 1.
pub fn gen_er_multiplex(p: f64, q: f64, m: usize, n: usize, seed: u64) -> Result<MultilayerNetwork> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    let mut net = MultilayerNetwork::empty(m, n, false)?;
    let mut rng = rng::seeded(seed);
    for a in 0..m {
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    net.adjacency.set(a, i, a, j, 1.0);
                    net.adjacency.set(a, j, a, i, 1.0);
                }
            }
        }
    }
    for i in 0..n {
        for a in 0..m {
            for b in (a + 1)..m {
                if rng.random::<f64>() < q {
                    net.adjacency.set(a, i, b, i, 1.0);
                    net.adjacency.set(b, i, a, i, 1.0);
                }
            }
        }
    }
    Ok(net)
}

/// Directed single-layer cycle whose supra-matrix has ones on the
/// subdiagonal and in the top-right corner, so shifting moves each sample
/// to the next node.
pub fn gen_cyclic(n: usize) -> Result<MultilayerNetwork> {
    if n < 2 {
        return Err(MgspError::InvalidArgument(format!(
            "cyclic graph needs N ≥ 2, got {n}"
        )));
    }
    let mut net = MultilayerNetwork::empty(1, n, true)?;
    for i in 0..n {
        net.adjacency.set(0, (i + 1) % n, 0, i, 1.0);
    }
    Ok(net)
}

/// Threshold on squared feature distances for [`gaussian_weights`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Value(f64),
    /// Mean of all pairwise squared distances.
    Mean,
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Mean of the squared distances over all unordered pairs.
pub fn mean_squared_distance(features: &[Vec<f64>]) -> f64 {
    let n = features.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += squared_distance(&features[i], &features[j]);
        }
    }
    total / ((n * (n - 1) / 2) as f64)
}

/// Gaussian intralayer weights `exp(−‖xᵢ−xⱼ‖²/δ²)`, kept only where
/// `‖xᵢ−xⱼ‖² ≤ t`. Symmetric with zero diagonal.
pub fn gaussian_weights(features: &[Vec<f64>], delta: f64, threshold: Threshold) -> Result<DMatrix<f64>> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(MgspError::InvalidArgument(format!(
            "Gaussian scale must be positive, got {delta}"
        )));
    }
    let n = features.len();
    if let Some(dim) = features.first().map(Vec::len) {
        if features.iter().any(|f| f.len() != dim) {
            return Err(MgspError::ShapeMismatch(
                "feature vectors have different lengths".into(),
            ));
        }
    }
    let t = match threshold {
        Threshold::Value(t) => t,
        Threshold::Mean => mean_squared_distance(features),
    };
    let d2 = delta * delta;
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = squared_distance(&features[i], &features[j]);
            if dist <= t {
                let v = (-dist / d2).exp();
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
    }
    Ok(w)
}
