//! Seeded property suites: randomized subspace instances for the
//! projection-distance inequality, and randomized connected bipartite graphs
//! for the contraction and spectral-symmetry checks.  Used by the CLI
//! selftests and the acceptance tests.

use crate::hilbert::{self, Subspace};
use crate::spectra::{self, WeightedGraph};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn random_subspace(rng: &mut ChaCha8Rng, ambient: usize, dim: usize) -> Subspace {
    let normal = StandardNormal;
    let m = DMatrix::from_fn(ambient, dim, |_, _| normal.sample(rng));
    Subspace::from_columns_span(m)
}

/// Random instances of the projection-distance inequality: ambient dim <= 10,
/// 2..=5 subspaces, only instances whose cosine matrix has smallest
/// eigenvalue >= 0.05.  Relative slack allowed: 1e-8.
pub fn kassabov_suite(instances: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut failures = 0;
    let mut max_excess: f64 = f64::NEG_INFINITY;
    let mut done = 0;
    while done < instances {
        let ambient = rng.gen_range(2..=10);
        let count = rng.gen_range(2..=5);
        let subspaces: Vec<Subspace> = (0..count)
            .map(|_| {
                let dim = rng.gen_range(1..=ambient.min(4));
                random_subspace(&mut rng, ambient, dim)
            })
            .collect();
        let cm = match hilbert::cosine_matrix(&subspaces) {
            Ok(cm) => cm,
            Err(_) => continue,
        };
        if cm.smallest_eigenvalue < 0.05 {
            continue;
        }
        let x = DVector::from_fn(ambient, |_, _| normal.sample(&mut rng));
        if x.norm() < 1e-9 {
            continue;
        }
        let out = hilbert::kassabov_check(&subspaces, &x).expect("matrix verified pd");
        // relative slack 1e-8, with an absolute floor so that instances with
        // both sides at rounding level do not divide noise by noise
        let excess = (out.lhs - out.rhs) / out.rhs.max(1e-12);
        max_excess = max_excess.max(excess);
        if !out.holds || excess > 1e-8 {
            failures += 1;
        }
        done += 1;
    }
    SuiteResult {
        name: "kassabov".into(),
        cases: done,
        failures,
        detail: format!("max relative excess {max_excess:.3e}"),
    }
}

/// Seeded connected bipartite graph with at most `max_vertices` vertices and
/// minimum degree 1.
pub fn random_connected_bipartite(rng: &mut ChaCha8Rng, max_vertices: usize) -> WeightedGraph {
    loop {
        let a = rng.gen_range(2..=max_vertices / 2);
        let b = rng.gen_range(2..=(max_vertices - a).min(max_vertices / 2));
        let p: f64 = rng.gen_range(0.3..1.0);
        let mut vertex_ids: Vec<String> = Vec::new();
        for i in 0..a {
            vertex_ids.push(format!("a{i}"));
        }
        for j in 0..b {
            vertex_ids.push(format!("b{j}"));
        }
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                if rng.gen::<f64>() < p {
                    edges.push((format!("a{i}"), format!("b{j}")));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let side1: Vec<String> = (0..a).map(|i| format!("a{i}")).collect();
        let side2: Vec<String> = (0..b).map(|j| format!("b{j}")).collect();
        let g = WeightedGraph::new(vertex_ids, &edges, Some((side1, side2))).unwrap();
        let min_degree = (0..g.vertex_count()).map(|v| g.degree(v)).min().unwrap();
        if min_degree >= 1 && g.is_connected() {
            return g;
        }
    }
}

/// Contraction bound over random graphs and coefficient dimensions, plus the
/// scalar eigenbasis sweep that must attain the second eigenvalue.
pub fn contraction_suite(graphs: usize, dims: &[usize], trials: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for case in 0..graphs {
        let g = random_connected_bipartite(&mut rng, 12);
        let spectrum = spectra::random_walk_spectrum(&g).unwrap();
        for &d in dims {
            let out =
                spectra::vector_contraction_check(&g, d, trials, seed ^ (case as u64) ^ (d as u64))
                    .unwrap();
            if !out.holds {
                failures += 1;
            }
        }
        let sweep = spectra::eigenbasis_contraction_sweep(&g).unwrap();
        if (sweep - spectrum.lambda_second).abs() > 1e-9 {
            failures += 1;
        }
    }
    SuiteResult {
        name: "contraction".into(),
        cases: graphs,
        failures,
        detail: format!("dims {dims:?}, {trials} trials per graph"),
    }
}

/// Spectral facts for bipartite graphs: negation-symmetric spectrum, the
/// side-indicator eigenfunction at -1, and the sides projection being an
/// orthogonal projection.
pub fn bipartite_facts_suite(graphs: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut failures = 0;
    for _ in 0..graphs {
        let g = random_connected_bipartite(&mut rng, 12);
        let n = g.vertex_count();
        let spectrum = spectra::random_walk_spectrum(&g).unwrap();
        let mut negated: Vec<f64> = spectrum.eigenvalues.iter().map(|e| -e).collect();
        negated.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let symmetric = spectrum
            .eigenvalues
            .iter()
            .zip(&negated)
            .all(|(x, y)| (x - y).abs() <= 1e-9);

        let sides = g.sides().unwrap().to_vec();
        let indicator =
            DMatrix::from_fn(n, 1, |v, _| if sides[v] == 0 { 1.0 } else { -1.0 });
        let residual = (g.walk_apply(&indicator) + &indicator).norm();

        let phi = DMatrix::from_fn(n, 2, |_, _| normal.sample(&mut rng));
        let psi = DMatrix::from_fn(n, 2, |_, _| normal.sample(&mut rng));
        let m_phi = spectra::m_sides_apply(&g, &phi).unwrap();
        let m_psi = spectra::m_sides_apply(&g, &psi).unwrap();
        let idempotent = (spectra::m_sides_apply(&g, &m_phi).unwrap() - &m_phi).norm();
        let self_adjoint =
            (g.weighted_inner(&m_phi, &psi) - g.weighted_inner(&phi, &m_psi)).abs();

        if !symmetric || residual > 1e-12 || idempotent > 1e-12 || self_adjoint > 1e-12 {
            failures += 1;
        }
    }
    SuiteResult {
        name: "bipartite-facts".into(),
        cases: graphs,
        failures,
        detail: String::new(),
    }
}

/// The one-sided expander equivalence: the centered walk norm is at most
/// `lambda` iff the spectrum without one copy of 1 sits below `lambda`.
pub fn expander_equivalence_suite(graphs: usize, seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..graphs {
        let g = random_connected_bipartite(&mut rng, 12);
        let spectrum = spectra::random_walk_spectrum(&g).unwrap();
        let sweep = spectra::eigenbasis_contraction_sweep(&g).unwrap();
        // both directions via the sweep, which computes the exact norm on
        // the full eigenbasis
        let lambda = spectrum.lambda_second;
        if (sweep - lambda).abs() > 1e-9 {
            failures += 1;
        }
        let below: bool = spectrum.eigenvalues[1..]
            .iter()
            .all(|&e| e <= lambda + 1e-12);
        if !below {
            failures += 1;
        }
    }
    SuiteResult {
        name: "expander-equivalence".into(),
        cases: graphs,
        failures,
        detail: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kassabov_suite_small_run() {
        let result = kassabov_suite(50, 11);
        assert!(result.passed(), "{}", result.detail);
    }

    #[test]
    fn contraction_suite_small_run() {
        let result = contraction_suite(10, &[1, 2], 20, 5);
        assert!(result.passed());
    }

    #[test]
    fn bipartite_facts_small_run() {
        let result = bipartite_facts_suite(20, 3);
        assert!(result.passed());
    }

    #[test]
    fn expander_equivalence_small_run() {
        let result = expander_equivalence_suite(20, 9);
        assert!(result.passed());
    }
}
