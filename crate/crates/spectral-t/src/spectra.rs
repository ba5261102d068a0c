//! Random-walk analysis of finite weighted graphs in the degree-weighted
//! inner product: full spectrum, second-largest eigenvalue, the sides
//! projection of a bipartite graph, and the vector-valued contraction check.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::BTreeMap;
use thiserror::Error;

/// Eigenvalues closer than this are merged when reporting multiplicities.
pub const EIG_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("empty graph")]
    EmptyGraph,
    #[error("isolated vertex {0}")]
    IsolatedVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("edge {0}-{1} does not cross the bipartition")]
    EdgeWithinSide(String, String),
    #[error("vertex {0} missing from the bipartition")]
    VertexNotInSides(String),
    #[error("graph has no bipartition")]
    NotBipartite,
    #[error("graph is disconnected")]
    Disconnected,
}

/// A finite graph with degree weights and an optional bipartition.
///
/// Weights are degrees by definition; they are recomputed from the edge list
/// at build time.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    vertex_ids: Vec<String>,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    /// side[v] in {0,1} when a bipartition is present.
    sides: Option<Vec<u8>>,
}

impl WeightedGraph {
    pub fn new(
        vertex_ids: Vec<String>,
        edge_ids: &[(String, String)],
        sides: Option<(Vec<String>, Vec<String>)>,
    ) -> Result<Self, GraphError> {
        let mut index = BTreeMap::new();
        for (i, id) in vertex_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(id.clone()));
            }
        }
        let lookup = |id: &String| -> Result<usize, GraphError> {
            index
                .get(id)
                .cloned()
                .ok_or_else(|| GraphError::UnknownVertex(id.clone()))
        };
        let mut edges = Vec::with_capacity(edge_ids.len());
        let mut seen = std::collections::BTreeSet::new();
        for (a, b) in edge_ids {
            let (i, j) = (lookup(a)?, lookup(b)?);
            if i == j {
                return Err(GraphError::SelfLoop(a.clone()));
            }
            let key = (i.min(j), i.max(j));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(a.clone(), b.clone()));
            }
            edges.push(key);
        }
        edges.sort_unstable();
        let n = vertex_ids.len();
        let mut degrees = vec![0usize; n];
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            degrees[i] += 1;
            degrees[j] += 1;
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        let side_flags = match sides {
            None => None,
            Some((s1, s2)) => {
                let mut flags = vec![u8::MAX; n];
                for id in &s1 {
                    flags[lookup(id)?] = 0;
                }
                for id in &s2 {
                    flags[lookup(id)?] = 1;
                }
                for (v, f) in flags.iter().enumerate() {
                    if *f == u8::MAX {
                        return Err(GraphError::VertexNotInSides(vertex_ids[v].clone()));
                    }
                }
                for &(i, j) in &edges {
                    if flags[i] == flags[j] {
                        return Err(GraphError::EdgeWithinSide(
                            vertex_ids[i].clone(),
                            vertex_ids[j].clone(),
                        ));
                    }
                }
                Some(flags)
            }
        };
        Ok(WeightedGraph {
            vertex_ids,
            edges,
            degrees,
            adjacency,
            sides: side_flags,
        })
    }

    /// Infer a bipartition by 2-coloring; error when an odd cycle exists.
    pub fn with_inferred_sides(mut self) -> Result<Self, GraphError> {
        let n = self.vertex_ids.len();
        let mut color = vec![u8::MAX; n];
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.adjacency[v] {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        queue.push_back(u);
                    } else if color[u] == color[v] {
                        return Err(GraphError::NotBipartite);
                    }
                }
            }
        }
        self.sides = Some(color);
        self.check_side_weights();
        Ok(self)
    }

    fn check_side_weights(&self) {
        if let Some(sides) = &self.sides {
            if self.is_connected() && !self.edges.is_empty() {
                let m1: usize = self
                    .degrees
                    .iter()
                    .zip(sides)
                    .filter(|(_, s)| **s == 0)
                    .map(|(d, _)| d)
                    .sum();
                let total: usize = self.degrees.iter().sum();
                debug_assert_eq!(2 * m1, total);
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn sides(&self) -> Option<&[u8]> {
        self.sides.as_deref()
    }

    pub fn side_sizes(&self) -> Option<(usize, usize)> {
        self.sides.as_ref().map(|s| {
            let n0 = s.iter().filter(|x| **x == 0).count();
            (n0, s.len() - n0)
        })
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_ids.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == n
    }

    /// Apply the random-walk operator to a coefficient matrix (rows indexed
    /// by vertices, one column per coordinate).
    pub fn walk_apply(&self, phi: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.vertex_count();
        assert_eq!(phi.nrows(), n);
        let mut out = DMatrix::zeros(n, phi.ncols());
        for v in 0..n {
            let inv_deg = 1.0 / self.degrees[v] as f64;
            for &u in &self.adjacency[v] {
                for c in 0..phi.ncols() {
                    out[(v, c)] += inv_deg * phi[(u, c)];
                }
            }
        }
        out
    }

    /// Degree-weighted squared norm of a coefficient matrix.
    pub fn weighted_norm_sq(&self, phi: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        for v in 0..self.vertex_count() {
            let m = self.degrees[v] as f64;
            for c in 0..phi.ncols() {
                acc += m * phi[(v, c)] * phi[(v, c)];
            }
        }
        acc
    }

    /// Degree-weighted inner product.
    pub fn weighted_inner(&self, phi: &DMatrix<f64>, psi: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        for v in 0..self.vertex_count() {
            let m = self.degrees[v] as f64;
            for c in 0..phi.ncols() {
                acc += m * phi[(v, c)] * psi[(v, c)];
            }
        }
        acc
    }
}

/// Spectrum of the random-walk operator, sorted descending.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub lambda_second: f64,
    pub connected: bool,
    pub bipartite: bool,
    /// Set when the spectrum is exactly {1, -1}: the single-edge case where
    /// the second-largest eigenvalue is -1.
    pub degenerate: bool,
}

impl SpectrumResult {
    /// Eigenvalues merged within [`EIG_MERGE_TOL`], as (value, multiplicity).
    pub fn merged(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &ev in &self.eigenvalues {
            match out.last_mut() {
                Some((v, k)) if (*v - ev).abs() <= EIG_MERGE_TOL => *k += 1,
                _ => out.push((ev, 1)),
            }
        }
        out
    }
}

/// Eigenvalues of the random walk, computed on the symmetric conjugate
/// `D^{1/2} A D^{-1/2}`.
pub fn random_walk_spectrum(g: &WeightedGraph) -> Result<SpectrumResult, GraphError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    for v in 0..n {
        if g.degree(v) == 0 {
            return Err(GraphError::IsolatedVertex(g.vertex_ids()[v].clone()));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        let w = 1.0 / ((g.degree(i) * g.degree(j)) as f64).sqrt();
        m[(i, j)] = w;
        m[(j, i)] = w;
    }
    let eig = m.symmetric_eigen();
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let connected = g.is_connected();
    let bipartite = eigenvalues
        .last()
        .map(|&e| (e + 1.0).abs() <= EIG_MERGE_TOL)
        .unwrap_or(false)
        && connected;
    let lambda_second = if n >= 2 { eigenvalues[1] } else { eigenvalues[0] };
    let degenerate = n == 2 && (lambda_second + 1.0).abs() <= EIG_MERGE_TOL;
    Ok(SpectrumResult {
        eigenvalues,
        lambda_second,
        connected,
        bipartite,
        degenerate,
    })
}

/// Eigenbasis of the random walk in vertex coordinates, paired with
/// eigenvalues.  Eigenvectors of the symmetric conjugate are mapped back by
/// `D^{-1/2}`.
pub fn random_walk_eigenbasis(g: &WeightedGraph) -> Result<Vec<(f64, DVector<f64>)>, GraphError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut m = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        let w = 1.0 / ((g.degree(i) * g.degree(j)) as f64).sqrt();
        m[(i, j)] = w;
        m[(j, i)] = w;
    }
    let eig = m.symmetric_eigen();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = DVector::zeros(n);
        for i in 0..n {
            v[i] = eig.eigenvectors[(i, k)] / (g.degree(i) as f64).sqrt();
        }
        out.push((eig.eigenvalues[k], v));
    }
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(out)
}

/// The sides-averaging projection of a bipartite graph, applied to a
/// coefficient matrix (rows = vertices).
pub fn m_sides_apply(g: &WeightedGraph, phi: &DMatrix<f64>) -> Result<DMatrix<f64>, GraphError> {
    let sides = g.sides().ok_or(GraphError::NotBipartite)?;
    let n = g.vertex_count();
    assert_eq!(phi.nrows(), n);
    let d = phi.ncols();
    let mut mass = [0.0f64; 2];
    let mut avg = DMatrix::zeros(2, d);
    for v in 0..n {
        let s = sides[v] as usize;
        let m = g.degree(v) as f64;
        mass[s] += m;
        for c in 0..d {
            avg[(s, c)] += m * phi[(v, c)];
        }
    }
    for s in 0..2 {
        if mass[s] > 0.0 {
            for c in 0..d {
                avg[(s, c)] /= mass[s];
            }
        }
    }
    let mut out = DMatrix::zeros(n, d);
    for v in 0..n {
        let s = sides[v] as usize;
        for c in 0..d {
            out[(v, c)] = avg[(s, c)];
        }
    }
    Ok(out)
}

/// Result of the vector-valued contraction sampling.
#[derive(Debug, Clone)]
pub struct ContractionCheck {
    pub max_ratio: f64,
    pub lambda_second: f64,
    pub holds: bool,
    pub seed: u64,
}

/// Sample random coefficient functions and bound the operator norm of
/// `(A(I - M_sides)) ⊗ id` against the second-largest scalar eigenvalue.
pub fn vector_contraction_check(
    g: &WeightedGraph,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ContractionCheck, GraphError> {
    if g.sides().is_none() {
        return Err(GraphError::NotBipartite);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let spectrum = random_walk_spectrum(g)?;
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let phi = DMatrix::from_fn(n, dim, |_, _| normal.sample(&mut rng));
        let norm_sq = g.weighted_norm_sq(&phi);
        if norm_sq <= 0.0 {
            continue;
        }
        let centered = &phi - m_sides_apply(g, &phi)?;
        let image = g.walk_apply(&centered);
        let ratio = (g.weighted_norm_sq(&image) / norm_sq).sqrt();
        max_ratio = max_ratio.max(ratio);
    }
    let holds = max_ratio <= spectrum.lambda_second + 1e-9;
    Ok(ContractionCheck {
        max_ratio,
        lambda_second: spectrum.lambda_second,
        holds,
        seed,
    })
}

/// Scalar sweep over the full eigenbasis; for connected bipartite graphs the
/// maximum equals the second-largest eigenvalue.
pub fn eigenbasis_contraction_sweep(g: &WeightedGraph) -> Result<f64, GraphError> {
    if g.sides().is_none() {
        return Err(GraphError::NotBipartite);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let basis = random_walk_eigenbasis(g)?;
    let mut max_ratio: f64 = 0.0;
    for (_, v) in basis {
        let phi = DMatrix::from_column_slice(g.vertex_count(), 1, v.as_slice());
        let norm_sq = g.weighted_norm_sq(&phi);
        if norm_sq <= 1e-24 {
            continue;
        }
        let centered = &phi - m_sides_apply(g, &phi)?;
        let image = g.walk_apply(&centered);
        max_ratio = max_ratio.max((g.weighted_norm_sq(&image) / norm_sq).sqrt());
    }
    Ok(max_ratio)
}
