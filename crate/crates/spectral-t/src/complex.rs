//! Partite pure simplicial complexes presented by maximal simplices: build
//! validation, skeletons, links, codimension-2 link graphs, gallery
//! connectivity and thickness.

use crate::spectra::WeightedGraph;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

/// Cap on chamber counts for which the pairwise gallery-distance table is
/// materialized.
pub const DISTANCE_TABLE_CAP: usize = 512;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(String),
    #[error("type label {1} of vertex {0} outside 0..={2}")]
    BadTypeLabel(String, usize, usize),
    #[error("simplex {0:?} has {1} vertices, expected {2}")]
    WrongSimplexSize(Vec<String>, usize, usize),
    #[error("simplex {0:?} repeats type {1}")]
    TypeClash(Vec<String>, usize),
    #[error("simplex {0:?} misses type {1}")]
    MissingType(Vec<String>, usize),
    #[error("vertex {0} lies in no maximal simplex")]
    OrphanVertex(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(String),
    #[error("simplex not in complex: {0:?}")]
    SimplexNotInComplex(Vec<String>),
    #[error("dimension {0} too low, need >= 2")]
    DimensionTooLow(usize),
}

/// A simplex as a sorted set of vertex indices into the owning complex.
pub type Simplex = Vec<usize>;

/// A pure n-dimensional partite simplicial complex with typed vertices,
/// presented by its maximal simplices; lower skeletons are derived.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    n: usize,
    vertex_ids: Vec<String>,
    types: Vec<usize>,
    maximal: Vec<Simplex>,
    /// skeletons[k] = X(k), each simplex sorted, the list sorted.
    skeletons: Vec<Vec<Simplex>>,
}

impl SimplicialComplex {
    /// Validate and build.  Vertices are re-indexed in lexicographic id
    /// order; all derived sets are sorted.
    pub fn build(
        n: usize,
        vertices: &[(String, usize)],
        maximal_simplices: &[Vec<String>],
    ) -> Result<Self, ComplexError> {
        let mut sorted: Vec<(String, usize)> = vertices.to_vec();
        sorted.sort();
        let mut index = BTreeMap::new();
        for (i, (id, ty)) in sorted.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(ComplexError::DuplicateVertex(id.clone()));
            }
            if *ty > n {
                return Err(ComplexError::BadTypeLabel(id.clone(), *ty, n));
            }
        }
        let vertex_ids: Vec<String> = sorted.iter().map(|(id, _)| id.clone()).collect();
        let types: Vec<usize> = sorted.iter().map(|(_, ty)| *ty).collect();

        let mut maximal: Vec<Simplex> = Vec::with_capacity(maximal_simplices.len());
        for raw in maximal_simplices {
            if raw.len() != n + 1 {
                return Err(ComplexError::WrongSimplexSize(
                    raw.clone(),
                    raw.len(),
                    n + 1,
                ));
            }
            let mut simplex: Simplex = Vec::with_capacity(n + 1);
            for id in raw {
                let i = *index
                    .get(id)
                    .ok_or_else(|| ComplexError::UnknownVertex(id.clone()))?;
                simplex.push(i);
            }
            simplex.sort_unstable();
            simplex.dedup();
            if simplex.len() != n + 1 {
                return Err(ComplexError::WrongSimplexSize(
                    raw.clone(),
                    simplex.len(),
                    n + 1,
                ));
            }
            let mut seen_types = vec![false; n + 1];
            for &v in &simplex {
                let ty = types[v];
                if seen_types[ty] {
                    return Err(ComplexError::TypeClash(raw.clone(), ty));
                }
                seen_types[ty] = true;
            }
            if let Some(missing) = seen_types.iter().position(|s| !s) {
                return Err(ComplexError::MissingType(raw.clone(), missing));
            }
            maximal.push(simplex);
        }
        maximal.sort();
        maximal.dedup();

        let mut covered = vec![false; vertex_ids.len()];
        for simplex in &maximal {
            for &v in simplex {
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(ComplexError::OrphanVertex(vertex_ids[v].clone()));
        }

        let skeletons = derive_skeletons(n, &maximal);
        Ok(SimplicialComplex {
            n,
            vertex_ids,
            types,
            maximal,
            skeletons,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex_type(&self, v: usize) -> usize {
        self.types[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.binary_search_by(|x| x.as_str().cmp(id)).ok()
    }

    /// X(k): all simplices with k+1 vertices, sorted.
    pub fn skeleton(&self, k: usize) -> &[Simplex] {
        &self.skeletons[k]
    }

    pub fn chambers(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        if simplex.is_empty() {
            return true;
        }
        let k = simplex.len() - 1;
        if k > self.n {
            return false;
        }
        self.skeletons[k].binary_search_by(|s| s.as_slice().cmp(simplex)).is_ok()
    }

    pub fn type_set(&self, simplex: &[usize]) -> BTreeSet<usize> {
        simplex.iter().map(|&v| self.types[v]).collect()
    }

    /// The link of `tau`: vertices disjoint from `tau` whose union with it
    /// stays in the complex.  Types are re-indexed to `0..=n-|tau|` by rank
    /// among the missing types.  The link of the empty simplex is the
    /// complex itself.
    pub fn link(&self, tau: &[usize]) -> Result<SimplicialComplex, ComplexError> {
        let mut tau_sorted: Simplex = tau.to_vec();
        tau_sorted.sort_unstable();
        if tau_sorted.is_empty() {
            return Ok(self.clone());
        }
        if !self.contains(&tau_sorted) {
            return Err(ComplexError::SimplexNotInComplex(
                tau_sorted.iter().map(|&v| self.vertex_ids[v].clone()).collect(),
            ));
        }
        assert!(
            tau_sorted.len() <= self.n,
            "link of a top-dimensional simplex is empty"
        );
        let tau_types = self.type_set(&tau_sorted);
        let missing: Vec<usize> = (0..=self.n).filter(|t| !tau_types.contains(t)).collect();
        let type_rank: BTreeMap<usize, usize> =
            missing.iter().enumerate().map(|(r, &t)| (t, r)).collect();

        let mut vertices: Vec<(String, usize)> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut link_maximal: Vec<Vec<String>> = Vec::new();
        for chamber in &self.maximal {
            if tau_sorted.iter().all(|v| chamber.binary_search(v).is_ok()) {
                let rest: Vec<usize> = chamber
                    .iter()
                    .cloned()
                    .filter(|v| tau_sorted.binary_search(v).is_err())
                    .collect();
                for &v in &rest {
                    if seen.insert(v) {
                        vertices.push((self.vertex_ids[v].clone(), type_rank[&self.types[v]]));
                    }
                }
                link_maximal.push(rest.iter().map(|&v| self.vertex_ids[v].clone()).collect());
            }
        }
        let link_dim = self.n - tau_sorted.len();
        SimplicialComplex::build(link_dim, &vertices, &link_maximal)
    }

    /// The link of a codimension-2 simplex as a bipartite graph with side
    /// labels taken from the two missing types.
    pub fn link_graph(&self, eta: &[usize]) -> Result<LinkGraph, ComplexError> {
        let mut eta_sorted: Simplex = eta.to_vec();
        eta_sorted.sort_unstable();
        if self.n < 2 {
            return Err(ComplexError::DimensionTooLow(self.n));
        }
        assert_eq!(eta_sorted.len(), self.n - 1, "need a codimension-2 simplex");
        if !self.contains(&eta_sorted) {
            return Err(ComplexError::SimplexNotInComplex(
                eta_sorted.iter().map(|&v| self.vertex_ids[v].clone()).collect(),
            ));
        }
        let eta_types = self.type_set(&eta_sorted);
        let missing: Vec<usize> = (0..=self.n).filter(|t| !eta_types.contains(t)).collect();
        let (t1, t2) = (missing[0], missing[1]);

        let mut side1: Vec<String> = Vec::new();
        let mut side2: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for chamber in &self.maximal {
            if eta_sorted.iter().all(|v| chamber.binary_search(v).is_ok()) {
                let rest: Vec<usize> = chamber
                    .iter()
                    .cloned()
                    .filter(|v| eta_sorted.binary_search(v).is_err())
                    .collect();
                debug_assert_eq!(rest.len(), 2);
                let (mut a, mut b) = (rest[0], rest[1]);
                if self.types[a] != t1 {
                    std::mem::swap(&mut a, &mut b);
                }
                debug_assert_eq!(self.types[a], t1);
                debug_assert_eq!(self.types[b], t2);
                if seen.insert(a) {
                    side1.push(self.vertex_ids[a].clone());
                }
                if seen.insert(b) {
                    side2.push(self.vertex_ids[b].clone());
                }
                edges.push((self.vertex_ids[a].clone(), self.vertex_ids[b].clone()));
            }
        }
        side1.sort();
        side2.sort();
        let mut vertex_ids = side1.clone();
        vertex_ids.extend(side2.iter().cloned());
        let graph = WeightedGraph::new(vertex_ids, &edges, Some((side1, side2)))
            .expect("link graphs are valid by construction");
        Ok(LinkGraph {
            base: eta_sorted,
            side_types: (t1, t2),
            graph,
        })
    }

    /// One link graph per codimension-2 simplex, each tagged with its
    /// missing type pair.
    pub fn codim2_links(&self) -> Result<Vec<Codim2Link>, ComplexError> {
        if self.n < 2 {
            return Err(ComplexError::DimensionTooLow(self.n));
        }
        let mut out = Vec::new();
        for eta in self.skeleton(self.n - 2) {
            let lg = self.link_graph(eta)?;
            let connected = lg.graph.is_connected();
            let type_pair = {
                let (a, b) = lg.side_types;
                (a.min(b), a.max(b))
            };
            out.push(Codim2Link {
                base_ids: eta.iter().map(|&v| self.vertex_ids[v].clone()).collect(),
                type_pair,
                connected,
                link: lg,
            });
        }
        Ok(out)
    }

    /// BFS over the chamber graph (chambers adjacent when they share a
    /// panel).  The distance table is materialized only below the cap.
    pub fn gallery_connectivity(&self) -> GalleryReport {
        let chambers = &self.maximal;
        let count = chambers.len();
        if count == 0 {
            return GalleryReport {
                connected: true,
                degenerate: true,
                distances: None,
            };
        }
        // adjacency via shared panels
        let mut panel_map: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
        for (ci, chamber) in chambers.iter().enumerate() {
            for skip in 0..chamber.len() {
                let mut panel = chamber.clone();
                panel.remove(skip);
                panel_map.entry(panel).or_default().push(ci);
            }
        }
        let mut adj = vec![BTreeSet::new(); count];
        for members in panel_map.values() {
            for &a in members {
                for &b in members {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        let bfs = |start: usize| -> Vec<Option<usize>> {
            let mut dist = vec![None; count];
            dist[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if dist[u].is_none() {
                        dist[u] = Some(dist[v].unwrap() + 1);
                        queue.push_back(u);
                    }
                }
            }
            dist
        };
        let from0 = bfs(0);
        let connected = from0.iter().all(|d| d.is_some());
        let distances = if connected && count <= DISTANCE_TABLE_CAP {
            let mut table = Vec::with_capacity(count);
            for s in 0..count {
                table.push(bfs(s).into_iter().map(|d| d.unwrap()).collect());
            }
            Some(table)
        } else {
            None
        };
        GalleryReport {
            connected,
            degenerate: false,
            distances,
        }
    }

    /// Chamber counts per panel and the thickness flag (every panel in at
    /// least three chambers).
    pub fn thickness_report(&self) -> ThicknessReport {
        let mut counts: BTreeMap<Simplex, usize> = BTreeMap::new();
        for chamber in &self.maximal {
            for skip in 0..chamber.len() {
                let mut panel = chamber.clone();
                panel.remove(skip);
                *counts.entry(panel).or_insert(0) += 1;
            }
        }
        let min = counts.values().cloned().min().unwrap_or(0);
        let max = counts.values().cloned().max().unwrap_or(0);
        ThicknessReport {
            min_chambers_per_panel: min,
            max_chambers_per_panel: max,
            is_thick: min >= 3,
        }
    }
}

fn derive_skeletons(n: usize, maximal: &[Simplex]) -> Vec<Vec<Simplex>> {
    let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); n + 1];
    for chamber in maximal {
        // all nonempty subsets
        let len = chamber.len();
        for mask in 1u32..(1u32 << len) {
            let sub: Simplex = (0..len)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| chamber[i])
                .collect();
            sets[sub.len() - 1].insert(sub);
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// A codimension-2 link presented as a bipartite graph.
#[derive(Debug, Clone)]
pub struct LinkGraph {
    pub base: Simplex,
    /// The two types of `{0..n}` missing from the base simplex.
    pub side_types: (usize, usize),
    pub graph: WeightedGraph,
}

#[derive(Debug, Clone)]
pub struct Codim2Link {
    pub base_ids: Vec<String>,
    pub type_pair: (usize, usize),
    pub connected: bool,
    pub link: LinkGraph,
}

#[derive(Debug, Clone)]
pub struct GalleryReport {
    pub connected: bool,
    /// Empty complex: connected vacuously.
    pub degenerate: bool,
    pub distances: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone)]
pub struct ThicknessReport {
    pub min_chambers_per_panel: usize,
    pub max_chambers_per_panel: usize,
    pub is_thick: bool,
}
