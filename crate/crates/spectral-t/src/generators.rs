//! Deterministic construction of the example complexes, graphs and link
//! families used by tests and acceptance runs.

use crate::complex::{ComplexError, SimplicialComplex};
use crate::criterion::LinkFamilyInput;
use crate::spectra::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const CONNECTIVITY_ATTEMPT_CAP: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("bad part sizes {0:?}")]
    BadSizes(Vec<usize>),
    #[error("unsupported projective-plane order {0}, only 2 and 3")]
    UnsupportedQ(usize),
    #[error("cycle length {0} must be even and >= 4")]
    OddLength(usize),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("no gallery-connected sample within {0} attempts")]
    ConnectivityCapExceeded(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Join of discrete vertex sets: every transversal picking one vertex per
/// part is a maximal simplex.  Sizes (2,2,2) give the octahedron.
pub fn complete_multipartite(sizes: &[usize]) -> Result<SimplicialComplex, GeneratorError> {
    if sizes.len() < 2 || sizes.iter().any(|&s| s == 0) {
        return Err(GeneratorError::BadSizes(sizes.to_vec()));
    }
    let n = sizes.len() - 1;
    let mut vertices = Vec::new();
    for (part, &size) in sizes.iter().enumerate() {
        for i in 0..size {
            vertices.push((format!("p{part}_{i}"), part));
        }
    }
    let mut maximal: Vec<Vec<String>> = vec![Vec::new()];
    for (part, &size) in sizes.iter().enumerate() {
        let mut next = Vec::new();
        for prefix in &maximal {
            for i in 0..size {
                let mut simplex = prefix.clone();
                simplex.push(format!("p{part}_{i}"));
                next.push(simplex);
            }
        }
        maximal = next;
    }
    Ok(SimplicialComplex::build(n, &vertices, &maximal)?)
}

/// Bipartite incidence graph of points vs. lines of the projective plane
/// over the field with `q` elements, q in {2, 3}.  The q = 2 case is the
/// Heawood graph.
pub fn pg2_incidence(q: usize) -> Result<WeightedGraph, GeneratorError> {
    if q != 2 && q != 3 {
        return Err(GeneratorError::UnsupportedQ(q));
    }
    // Projective points: nonzero vectors over F_q with first nonzero
    // coordinate normalized to 1.  Lines are the same set by duality;
    // incidence is a vanishing dot product.
    let mut reps: Vec<[usize; 3]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let v = [a, b, c];
                if v == [0, 0, 0] {
                    continue;
                }
                let first = v.iter().find(|&&x| x != 0).unwrap();
                if *first == 1 {
                    reps.push(v);
                }
            }
        }
    }
    debug_assert_eq!(reps.len(), q * q + q + 1);
    let points: Vec<String> = (0..reps.len()).map(|i| format!("p{i}")).collect();
    let lines: Vec<String> = (0..reps.len()).map(|i| format!("l{i}")).collect();
    let mut vertex_ids = points.clone();
    vertex_ids.extend(lines.iter().cloned());
    let mut edges = Vec::new();
    for (i, p) in reps.iter().enumerate() {
        for (j, l) in reps.iter().enumerate() {
            let dot: usize = p.iter().zip(l).map(|(a, b)| a * b).sum();
            if dot % q == 0 {
                edges.push((points[i].clone(), lines[j].clone()));
            }
        }
    }
    Ok(WeightedGraph::new(vertex_ids, &edges, Some((points, lines)))
        .expect("incidence graph is valid by construction"))
}

/// Even cycle with alternating sides.
pub fn cycle(length: usize) -> Result<WeightedGraph, GeneratorError> {
    if length < 4 || length % 2 != 0 {
        return Err(GeneratorError::OddLength(length));
    }
    let ids: Vec<String> = (0..length).map(|i| format!("c{i}")).collect();
    let edges: Vec<(String, String)> = (0..length)
        .map(|i| (ids[i].clone(), ids[(i + 1) % length].clone()))
        .collect();
    let side1: Vec<String> = ids.iter().step_by(2).cloned().collect();
    let side2: Vec<String> = ids.iter().skip(1).step_by(2).cloned().collect();
    Ok(WeightedGraph::new(ids.clone(), &edges, Some((side1, side2)))
        .expect("cycle is valid by construction"))
}

/// Named two-dimensional link families: one graph per type pair.
pub fn link_family(name: &str) -> Result<LinkFamilyInput, GeneratorError> {
    let graph = match name {
        "a2_tilde_q2" => pg2_incidence(2)?,
        "a2_tilde_q3" => pg2_incidence(3)?,
        "coxeter_a2" => cycle(6)?,
        other => return Err(GeneratorError::UnknownFamily(other.to_string())),
    };
    let entries = vec![
        ((0, 1), graph.clone()),
        ((0, 2), graph.clone()),
        ((1, 2), graph),
    ];
    Ok(LinkFamilyInput { n: 2, entries })
}

/// Random partite complex: transversal simplices kept independently with the
/// given probability, orphans pruned, resampled until gallery connected.
pub fn random_partite_complex(
    sizes: &[usize],
    density: f64,
    seed: u64,
) -> Result<SimplicialComplex, GeneratorError> {
    random_partite_complex_capped(sizes, density, seed, CONNECTIVITY_ATTEMPT_CAP)
}

pub fn random_partite_complex_capped(
    sizes: &[usize],
    density: f64,
    seed: u64,
    cap: usize,
) -> Result<SimplicialComplex, GeneratorError> {
    assert!(density > 0.0 && density <= 1.0);
    let full = complete_multipartite(sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cap {
        let mut kept: Vec<Vec<String>> = Vec::new();
        for chamber in full.chambers() {
            if rng.gen::<f64>() < density {
                kept.push(
                    chamber
                        .iter()
                        .map(|&v| full.vertex_ids()[v].clone())
                        .collect(),
                );
            }
        }
        if kept.is_empty() {
            continue;
        }
        // prune orphan vertices
        let used: std::collections::BTreeSet<&String> = kept.iter().flatten().collect();
        let vertices: Vec<(String, usize)> = full
            .vertex_ids()
            .iter()
            .enumerate()
            .filter(|(_, id)| used.contains(id))
            .map(|(v, id)| (id.clone(), full.vertex_type(v)))
            .collect();
        let x = SimplicialComplex::build(sizes.len() - 1, &vertices, &kept)?;
        if x.gallery_connectivity().connected {
            return Ok(x);
        }
    }
    Err(GeneratorError::ConnectivityCapExceeded(cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::random_walk_spectrum;

    #[test]
    fn octahedron_has_eight_chambers() {
        let x = complete_multipartite(&[2, 2, 2]).unwrap();
        assert_eq!(x.chambers().len(), 8);
    }

    #[test]
    fn single_triangle() {
        let x = complete_multipartite(&[1, 1, 1]).unwrap();
        assert_eq!(x.chambers().len(), 1);
    }

    #[test]
    fn tripartite_333_is_thick() {
        let x = complete_multipartite(&[3, 3, 3]).unwrap();
        assert_eq!(x.chambers().len(), 27);
        assert!(x.thickness_report().is_thick);
    }

    #[test]
    fn bad_sizes_rejected() {
        assert!(matches!(
            complete_multipartite(&[3]),
            Err(GeneratorError::BadSizes(_))
        ));
        assert!(matches!(
            complete_multipartite(&[2, 0, 2]),
            Err(GeneratorError::BadSizes(_))
        ));
    }

    #[test]
    fn heawood_shape_and_spectrum() {
        let g = pg2_incidence(2).unwrap();
        assert_eq!(g.vertex_count(), 14);
        assert_eq!(g.edge_count(), 21);
        for v in 0..g.vertex_count() {
            assert_eq!(g.degree(v), 3);
        }
        assert_eq!(g.side_sizes(), Some((7, 7)));
        let s = random_walk_spectrum(&g).unwrap();
        let expected = 2f64.sqrt() / 3.0;
        assert!((s.lambda_second - expected).abs() < 1e-9);
        // walk spectrum is {±1, ±sqrt(q)/(q+1)} as a set
        for &e in &s.eigenvalues {
            let near = [1.0, -1.0, expected, -expected]
                .iter()
                .any(|&t| (e - t).abs() < 1e-9);
            assert!(near, "unexpected eigenvalue {e}");
        }
    }

    #[test]
    fn pg2_q3_spectrum() {
        let g = pg2_incidence(3).unwrap();
        assert_eq!(g.vertex_count(), 26);
        for v in 0..g.vertex_count() {
            assert_eq!(g.degree(v), 4);
        }
        let s = random_walk_spectrum(&g).unwrap();
        assert!((s.lambda_second - 3f64.sqrt() / 4.0).abs() < 1e-9);
    }

    #[test]
    fn unsupported_q_rejected() {
        assert_eq!(pg2_incidence(4).unwrap_err(), GeneratorError::UnsupportedQ(4));
    }

    #[test]
    fn cycle_spectra() {
        for (len, expected) in [(4usize, 0.0), (6, 0.5), (8, 2f64.sqrt() / 2.0)] {
            let g = cycle(len).unwrap();
            let s = random_walk_spectrum(&g).unwrap();
            assert!((s.lambda_second - expected).abs() < 1e-9, "C{len}");
        }
    }

    #[test]
    fn odd_cycle_rejected() {
        assert_eq!(cycle(5).unwrap_err(), GeneratorError::OddLength(5));
        assert_eq!(cycle(2).unwrap_err(), GeneratorError::OddLength(2));
    }

    #[test]
    fn link_families() {
        let fam = link_family("a2_tilde_q2").unwrap();
        assert_eq!(fam.entries.len(), 3);
        for (_, g) in &fam.entries {
            assert_eq!(g.vertex_count(), 14);
        }
        let fam = link_family("coxeter_a2").unwrap();
        for (_, g) in &fam.entries {
            assert_eq!(g.vertex_count(), 6);
        }
        assert!(matches!(
            link_family("nope"),
            Err(GeneratorError::UnknownFamily(_))
        ));
    }

    #[test]
    fn random_complex_deterministic() {
        let a = random_partite_complex(&[4, 4, 4], 0.6, 7).unwrap();
        let b = random_partite_complex(&[4, 4, 4], 0.6, 7).unwrap();
        assert_eq!(a.chambers(), b.chambers());
        assert!(a.gallery_connectivity().connected);
    }

    #[test]
    fn density_one_is_complete() {
        let a = random_partite_complex(&[2, 2, 2], 1.0, 0).unwrap();
        let b = complete_multipartite(&[2, 2, 2]).unwrap();
        assert_eq!(a.chambers(), b.chambers());
    }

    #[test]
    fn sparse_density_hits_cap() {
        let err = random_partite_complex_capped(&[3, 3, 3], 1e-9, 3, 10).unwrap_err();
        assert_eq!(err, GeneratorError::ConnectivityCapExceeded(10));
    }
}
