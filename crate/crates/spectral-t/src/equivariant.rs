//! Finite group actions on partite complexes, unitary representations, and a
//! concrete model of the equivariant chamber-function space with its
//! weighted norm.  Verifies the intersection lemma, the angle bounds against
//! the link eigenvalue table, and the inequality chain behind the Kazhdan
//! constant.

use crate::complex::{Simplex, SimplicialComplex};
use crate::criterion::LambdaTable;
use crate::hilbert::{self, Subspace};
use nalgebra::{DMatrix, DVector};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

pub const DEFAULT_CLOSURE_CAP: usize = 20160;

#[derive(Debug, Error, PartialEq)]
pub enum EquivariantError {
    #[error("generator is not a bijection on the vertex set")]
    NotBijection,
    #[error("group element breaks a maximal simplex")]
    NotSimplicial,
    #[error("group closure exceeds cap {0}")]
    ClosureCapExceeded(usize),
    #[error("action is not type preserving; pass through the type-permutation kernel first")]
    NotTypePreserving,
    #[error("complex is not gallery connected")]
    NotGalleryConnected,
    #[error("representation matrices fail the homomorphism or unitarity check")]
    BadRepresentation,
    #[error("type set {0:?} must have exactly n elements")]
    BadTypeSet(Vec<usize>),
    #[error("lambda table misses pair ({0},{1})")]
    TableMismatch(usize, usize),
    #[error("x must be a unit vector")]
    NotUnitVector,
    #[error("the set K is empty")]
    KEmpty,
    #[error("lambda_X must be positive for the chain bound")]
    NonPositiveLambda,
}

/// A finite group of simplicial automorphisms, stored as the generated
/// closure of vertex permutations.  Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct GroupAction {
    elements: Vec<Vec<usize>>,
    /// (parent element, generator index) with element = parent ∘ generator;
    /// None for the identity.
    parents: Vec<Option<(usize, usize)>>,
    inverses: Vec<usize>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl GroupAction {
    /// Generate the closure of the given vertex permutations and verify that
    /// every generator maps maximal simplices to maximal simplices.
    pub fn load(
        x: &SimplicialComplex,
        generators: &[Vec<usize>],
        cap: usize,
    ) -> Result<Self, EquivariantError> {
        let nv = x.vertex_ids().len();
        let chamber_set: BTreeSet<&Simplex> = x.chambers().iter().collect();
        for g in generators {
            if g.len() != nv {
                return Err(EquivariantError::NotBijection);
            }
            let mut seen = vec![false; nv];
            for &img in g {
                if img >= nv || seen[img] {
                    return Err(EquivariantError::NotBijection);
                }
                seen[img] = true;
            }
            for chamber in x.chambers() {
                let mut image: Simplex = chamber.iter().map(|&v| g[v]).collect();
                image.sort_unstable();
                if !chamber_set.contains(&image) {
                    return Err(EquivariantError::NotSimplicial);
                }
            }
        }
        let identity: Vec<usize> = (0..nv).collect();
        let mut elements = vec![identity.clone()];
        let mut parents: Vec<Option<(usize, usize)>> = vec![None];
        let mut index = BTreeMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for (gi, g) in generators.iter().enumerate() {
                // (cur ∘ g)(v) = cur(g(v))
                let product: Vec<usize> = (0..nv).map(|v| elements[cur][g[v]]).collect();
                if !index.contains_key(&product) {
                    if elements.len() >= cap {
                        return Err(EquivariantError::ClosureCapExceeded(cap));
                    }
                    index.insert(product.clone(), elements.len());
                    elements.push(product);
                    parents.push(Some((cur, gi)));
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let inverses = elements
            .iter()
            .map(|e| {
                let mut inv = vec![0usize; nv];
                for (v, &img) in e.iter().enumerate() {
                    inv[img] = v;
                }
                index[&inv]
            })
            .collect();
        Ok(GroupAction {
            elements,
            parents,
            inverses,
            index,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn perm(&self, e: usize) -> &[usize] {
        &self.elements[e]
    }

    pub fn inverse(&self, e: usize) -> usize {
        self.inverses[e]
    }

    /// Product in the closure: (a ∘ b)(v) = a(b(v)).
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let product: Vec<usize> = self.elements[b]
            .iter()
            .map(|&v| self.elements[a][v])
            .collect();
        self.index[&product]
    }

    pub fn apply_vertex(&self, e: usize, v: usize) -> usize {
        self.elements[e][v]
    }

    pub fn apply_simplex(&self, e: usize, simplex: &[usize]) -> Simplex {
        let mut image: Simplex = simplex.iter().map(|&v| self.elements[e][v]).collect();
        image.sort_unstable();
        image
    }

    pub fn is_type_preserving(&self, x: &SimplicialComplex) -> bool {
        self.elements.iter().all(|e| {
            e.iter()
                .enumerate()
                .all(|(v, &img)| x.vertex_type(v) == x.vertex_type(img))
        })
    }

    /// Subgroup from a subset of element indices (must be closed).
    fn subgroup(&self, members: &[usize]) -> GroupAction {
        let elements: Vec<Vec<usize>> = members.iter().map(|&e| self.elements[e].clone()).collect();
        let index: BTreeMap<Vec<usize>, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let inverses = elements
            .iter()
            .map(|e| {
                let mut inv = vec![0usize; e.len()];
                for (v, &img) in e.iter().enumerate() {
                    inv[img] = v;
                }
                index[&inv]
            })
            .collect();
        let parents = vec![None; elements.len()];
        GroupAction {
            elements,
            parents,
            inverses,
            index,
        }
    }
}

/// The homomorphism onto type permutations induced by a (possibly non
/// type-preserving) action, and its kernel.
pub struct TypePermutation {
    /// table[e] = permutation of type labels, table[e][i] = type(e⁻¹ · v_i).
    pub table: Vec<Vec<usize>>,
    pub kernel: GroupAction,
    pub kernel_index: usize,
}

pub fn type_permutation_kernel(
    x: &SimplicialComplex,
    action: &GroupAction,
    base: &[usize],
) -> Result<TypePermutation, EquivariantError> {
    if !x.gallery_connectivity().connected {
        return Err(EquivariantError::NotGalleryConnected);
    }
    let n = x.dim();
    // vertex of the base chamber carrying each type
    let mut by_type = vec![usize::MAX; n + 1];
    for &v in base {
        by_type[x.vertex_type(v)] = v;
    }
    assert!(by_type.iter().all(|&v| v != usize::MAX), "base must be a chamber");
    let mut table = Vec::with_capacity(action.order());
    for e in 0..action.order() {
        let inv = action.inverse(e);
        let phi: Vec<usize> = (0..=n)
            .map(|i| x.vertex_type(action.apply_vertex(inv, by_type[i])))
            .collect();
        table.push(phi);
    }
    // homomorphism check over the full table
    for a in 0..action.order() {
        for b in 0..action.order() {
            let ab = action.mul(a, b);
            let composed: Vec<usize> = (0..=n).map(|i| table[a][table[b][i]]).collect();
            debug_assert_eq!(table[ab], composed, "type map is not a homomorphism");
        }
    }
    let identity_perm: Vec<usize> = (0..=n).collect();
    let members: Vec<usize> = (0..action.order())
        .filter(|&e| table[e] == identity_perm)
        .collect();
    let kernel_index = action.order() / members.len();
    Ok(TypePermutation {
        table,
        kernel: action.subgroup(&members),
        kernel_index,
    })
}

/// A unitary (orthogonal, over the reals) representation of the group.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    pub dim: usize,
    matrices: Vec<DMatrix<f64>>,
}

impl UnitaryRep {
    /// The regular representation: dimension |G|, permutation matrices of
    /// left multiplication.
    pub fn regular(action: &GroupAction) -> Self {
        let n = action.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = DMatrix::zeros(n, n);
                for h in 0..n {
                    m[(action.mul(g, h), h)] = 1.0;
                }
                m
            })
            .collect();
        UnitaryRep { dim: n, matrices }
    }

    /// The vertex-permutation representation: dimension |V|.
    pub fn vertex_permutation(action: &GroupAction) -> Self {
        let nv = action.perm(0).len();
        let matrices = (0..action.order())
            .map(|g| {
                let mut m = DMatrix::zeros(nv, nv);
                for v in 0..nv {
                    m[(action.apply_vertex(g, v), v)] = 1.0;
                }
                m
            })
            .collect();
        UnitaryRep {
            dim: nv,
            matrices,
        }
    }

    /// Build from matrices for the generators that produced the closure,
    /// extended along the closure's parent chain, then validated.
    pub fn from_generator_matrices(
        action: &GroupAction,
        gen_matrices: &[DMatrix<f64>],
    ) -> Result<Self, EquivariantError> {
        let dim = gen_matrices
            .first()
            .map(|m| m.nrows())
            .unwrap_or(1);
        let mut matrices: Vec<Option<DMatrix<f64>>> = vec![None; action.order()];
        matrices[0] = Some(DMatrix::identity(dim, dim));
        // parents are in BFS order, so a parent is always resolved first
        for e in 1..action.order() {
            let (parent, gi) = action.parents[e].expect("non-identity element has a parent");
            let m = matrices[parent].as_ref().expect("BFS order") * &gen_matrices[gi];
            matrices[e] = Some(m);
        }
        let rep = UnitaryRep {
            dim,
            matrices: matrices.into_iter().map(|m| m.unwrap()).collect(),
        };
        rep.validate(action)?;
        Ok(rep)
    }

    /// Wrap explicit per-element matrices and validate them.
    pub fn explicit(
        action: &GroupAction,
        matrices: Vec<DMatrix<f64>>,
    ) -> Result<Self, EquivariantError> {
        assert_eq!(matrices.len(), action.order());
        let dim = matrices[0].nrows();
        let rep = UnitaryRep { dim, matrices };
        rep.validate(action)?;
        Ok(rep)
    }

    fn validate(&self, action: &GroupAction) -> Result<(), EquivariantError> {
        let n = action.order();
        let id = DMatrix::identity(self.dim, self.dim);
        for g in 0..n {
            let m = &self.matrices[g];
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(EquivariantError::BadRepresentation);
            }
            if (m.transpose() * m - &id).norm() > 1e-10 {
                return Err(EquivariantError::BadRepresentation);
            }
        }
        // homomorphism: exhaustive up to order 64, sampled stride above
        let stride = if n <= 64 { 1 } else { n / 64 + 1 };
        for g in (0..n).step_by(stride) {
            for h in (0..n).step_by(stride) {
                let gh = action.mul(g, h);
                if (&self.matrices[g] * &self.matrices[h] - &self.matrices[gh]).norm() > 1e-10 {
                    return Err(EquivariantError::BadRepresentation);
                }
            }
        }
        Ok(())
    }

    pub fn matrix(&self, e: usize) -> &DMatrix<f64> {
        &self.matrices[e]
    }

    pub fn apply(&self, e: usize, x: &DVector<f64>) -> DVector<f64> {
        &self.matrices[e] * x
    }

    /// Orthonormal basis of the common fixed space of the given elements.
    pub fn fixed_space(&self, elements: &[usize]) -> Subspace {
        // the averaging operator is the orthogonal projection on the fixed
        // space when the element set is a subgroup
        let mut avg = DMatrix::zeros(self.dim, self.dim);
        for &e in elements {
            avg += &self.matrices[e];
        }
        avg /= elements.len() as f64;
        Subspace::from_columns_span(avg)
    }
}

/// Concrete model of the equivariant chamber-function space.  Vectors are
/// stored in "weighted coordinates": the block of an orbit representative
/// `σ` holds `sqrt(c/|G_σ|) · φ(σ)`, which makes the weighted inner product
/// the standard one.
pub struct EquivariantSpace<'a> {
    pub complex: &'a SimplicialComplex,
    pub action: &'a GroupAction,
    pub rep: &'a UnitaryRep,
    /// Indices into `complex.chambers()`: the lex-least orbit
    /// representatives, ascending.
    pub domain: Vec<usize>,
    /// Stabilizer element lists per representative.
    pub stabilizers: Vec<Vec<usize>>,
    /// Per chamber: (position in `domain`, group element g with
    /// g · representative = chamber).
    pub transversal: Vec<(usize, usize)>,
    /// Normalization (Σ 1/|G_σ|)⁻¹.
    pub norm_const: f64,
    /// Per representative: sqrt(norm_const / |G_σ|).
    pub block_scale: Vec<f64>,
    /// Orthonormal basis of the equivariant space in weighted coordinates
    /// (ambient × dim).
    pub basis: DMatrix<f64>,
}

impl<'a> EquivariantSpace<'a> {
    pub fn build(
        complex: &'a SimplicialComplex,
        action: &'a GroupAction,
        rep: &'a UnitaryRep,
    ) -> Result<Self, EquivariantError> {
        if !action.is_type_preserving(complex) {
            return Err(EquivariantError::NotTypePreserving);
        }
        let chambers = complex.chambers();
        let chamber_index: BTreeMap<&Simplex, usize> =
            chambers.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut transversal: Vec<Option<(usize, usize)>> = vec![None; chambers.len()];
        let mut domain = Vec::new();
        let mut stabilizers = Vec::new();
        for ci in 0..chambers.len() {
            if transversal[ci].is_some() {
                continue;
            }
            // chambers are sorted, so the first unassigned chamber is the
            // lex-least member of its orbit
            let rep_pos = domain.len();
            domain.push(ci);
            let mut stab = Vec::new();
            for e in 0..action.order() {
                let image = action.apply_simplex(e, &chambers[ci]);
                let ii = chamber_index[&image];
                if ii == ci {
                    stab.push(e);
                }
                if transversal[ii].is_none() {
                    transversal[ii] = Some((rep_pos, e));
                }
            }
            stabilizers.push(stab);
        }
        let transversal: Vec<(usize, usize)> = transversal.into_iter().map(|t| t.unwrap()).collect();
        let inv_sum: f64 = stabilizers.iter().map(|s| 1.0 / s.len() as f64).sum();
        let norm_const = 1.0 / inv_sum;
        let block_scale: Vec<f64> = stabilizers
            .iter()
            .map(|s| (norm_const / s.len() as f64).sqrt())
            .collect();

        // basis: per representative, an orthonormal basis of the stabilizer
        // fixed space, placed in that block
        let d = rep.dim;
        let ambient = domain.len() * d;
        let mut columns: Vec<DVector<f64>> = Vec::new();
        for (r, stab) in stabilizers.iter().enumerate() {
            let fixed = rep.fixed_space(stab);
            for j in 0..fixed.dim() {
                let mut w = DVector::zeros(ambient);
                for i in 0..d {
                    w[r * d + i] = fixed.basis()[(i, j)];
                }
                columns.push(w);
            }
        }
        let mut basis = DMatrix::zeros(ambient, columns.len());
        for (j, c) in columns.iter().enumerate() {
            basis.set_column(j, c);
        }
        Ok(EquivariantSpace {
            complex,
            action,
            rep,
            domain,
            stabilizers,
            transversal,
            norm_const,
            block_scale,
            basis,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.len() * self.rep.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn block(&self, w: &DVector<f64>, r: usize) -> DVector<f64> {
        let d = self.rep.dim;
        DVector::from_column_slice(&w.as_slice()[r * d..(r + 1) * d])
    }

    /// φ(σ_r) read out of weighted coordinates.
    pub fn value_at_representative(&self, w: &DVector<f64>, r: usize) -> DVector<f64> {
        self.block(w, r) / self.block_scale[r]
    }

    /// φ at an arbitrary chamber, via the transversal and equivariance.
    pub fn value_at_chamber(&self, w: &DVector<f64>, chamber: usize) -> DVector<f64> {
        let (r, g) = self.transversal[chamber];
        self.rep.apply(g, &self.value_at_representative(w, r))
    }

    /// Pack values at the representatives into weighted coordinates.
    pub fn from_values(&self, values: &[DVector<f64>]) -> DVector<f64> {
        assert_eq!(values.len(), self.domain.len());
        let d = self.rep.dim;
        let mut w = DVector::zeros(self.ambient_dim());
        for (r, v) in values.iter().enumerate() {
            for i in 0..d {
                w[r * d + i] = self.block_scale[r] * v[i];
            }
        }
        w
    }

    fn check_type_set(&self, nu: &[usize]) -> Result<BTreeSet<usize>, EquivariantError> {
        let set: BTreeSet<usize> = nu.iter().cloned().collect();
        let n = self.complex.dim();
        if set.len() != n || nu.len() != n || set.iter().any(|&t| t > n) {
            return Err(EquivariantError::BadTypeSet(nu.to_vec()));
        }
        Ok(set)
    }

    /// Equivalence classes of chambers sharing a face of the given type set
    /// (one class per face).
    fn nu_classes(&self, nu: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut by_face: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
        for (ci, chamber) in self.complex.chambers().iter().enumerate() {
            let face: Simplex = chamber
                .iter()
                .cloned()
                .filter(|&v| nu.contains(&self.complex.vertex_type(v)))
                .collect();
            by_face.entry(face).or_default().push(ci);
        }
        by_face.into_values().collect()
    }

    /// Apply the ν-class averaging operator in weighted coordinates.
    pub fn p_nu_apply(
        &self,
        nu: &[usize],
        w: &DVector<f64>,
    ) -> Result<DVector<f64>, EquivariantError> {
        let set = self.check_type_set(nu)?;
        let classes = self.nu_classes(&set);
        let mut class_of = vec![usize::MAX; self.complex.chambers().len()];
        for (k, class) in classes.iter().enumerate() {
            for &ci in class {
                class_of[ci] = k;
            }
        }
        let mut values = Vec::with_capacity(self.domain.len());
        for &ci in &self.domain {
            let class = &classes[class_of[ci]];
            let mut avg = DVector::zeros(self.rep.dim);
            for &cj in class {
                avg += self.value_at_chamber(w, cj);
            }
            avg /= class.len() as f64;
            values.push(avg);
        }
        Ok(self.from_values(&values))
    }

    /// Matrix of the ν-averaging operator in the space's orthonormal basis.
    pub fn p_nu_matrix(&self, nu: &[usize]) -> Result<DMatrix<f64>, EquivariantError> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        for j in 0..m {
            let bj: DVector<f64> = self.basis.column(j).into();
            let image = self.p_nu_apply(nu, &bj)?;
            let coeffs = self.basis.transpose() * image;
            out.set_column(j, &coeffs);
        }
        Ok(out)
    }

    /// The image of the ν-averaging operator as a subspace of the weighted
    /// coordinate space (with ν = all types except `skip`).
    pub fn u_subspace(&self, skip: usize) -> Result<Subspace, EquivariantError> {
        let nu: Vec<usize> = (0..=self.complex.dim()).filter(|&t| t != skip).collect();
        let m = self.dim();
        let mut columns = DMatrix::zeros(self.ambient_dim(), m);
        for j in 0..m {
            let bj: DVector<f64> = self.basis.column(j).into();
            columns.set_column(j, &self.p_nu_apply(&nu, &bj)?);
        }
        Ok(Subspace::from_columns_span(columns))
    }

    /// The constant equivariant maps: φ ≡ x₀ with x₀ fixed by the whole
    /// group, in weighted coordinates.
    pub fn constants_subspace(&self) -> Subspace {
        let all: Vec<usize> = (0..self.action.order()).collect();
        let fixed = self.rep.fixed_space(&all);
        let mut columns = DMatrix::zeros(self.ambient_dim(), fixed.dim());
        for j in 0..fixed.dim() {
            let x0: DVector<f64> = fixed.basis().column(j).into();
            let values: Vec<DVector<f64>> = self.domain.iter().map(|_| x0.clone()).collect();
            columns.set_column(j, &self.from_values(&values));
        }
        Subspace::from_columns_span(columns)
    }

    /// φ_x: stabilizer-averaged translate of `x` at each representative.
    pub fn phi_x(&self, x: &DVector<f64>) -> DVector<f64> {
        let values: Vec<DVector<f64>> = self
            .stabilizers
            .iter()
            .map(|stab| {
                let mut avg = DVector::zeros(self.rep.dim);
                for &g in stab {
                    avg += self.rep.apply(g, x);
                }
                avg / stab.len() as f64
            })
            .collect();
        self.from_values(&values)
    }

    /// K = elements moving some representative onto a chamber sharing at
    /// least a panel with another representative.
    pub fn k_set(&self) -> Vec<usize> {
        let n = self.complex.dim();
        let chambers = self.complex.chambers();
        let mut k = Vec::new();
        'outer: for e in 0..self.action.order() {
            for &cj in &self.domain {
                let image = self.action.apply_simplex(e, &chambers[cj]);
                for &ci in &self.domain {
                    let shared = intersection_size(&image, &chambers[ci]);
                    if shared >= n {
                        k.push(e);
                        continue 'outer;
                    }
                }
            }
        }
        k
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    // both sorted
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Outcome of the intersection-lemma verification.
#[derive(Debug, Clone)]
pub struct IntersectLemmaReport {
    pub intersection_dim: usize,
    pub invariant_dim: usize,
    pub matches: bool,
}

/// Intersect the images of all co-type averaging operators and compare with
/// the constant maps valued in the group-invariant vectors.
pub fn verify_intersect_lemma(
    space: &EquivariantSpace,
) -> Result<IntersectLemmaReport, EquivariantError> {
    let n = space.complex.dim();
    let subspaces: Result<Vec<Subspace>, _> = (0..=n).map(|i| space.u_subspace(i)).collect();
    let subspaces = subspaces?;
    let inter = hilbert::intersect(space.ambient_dim(), &subspaces)
        .expect("common ambient dimension by construction");
    let constants = space.constants_subspace();
    let matches = inter.dim() == constants.dim()
        && inter.contained_in(&constants)
        && constants.contained_in(&inter);
    Ok(IntersectLemmaReport {
        intersection_dim: inter.dim(),
        invariant_dim: constants.dim(),
        matches,
    })
}

/// Outcome of the angle-bound verification against a λ table.
#[derive(Debug, Clone)]
pub struct AngleBoundReport {
    pub cosines: DMatrix<f64>,
    pub a_pi_smallest_eigenvalue: f64,
    pub entrywise_ok: bool,
    pub eigen_ok: bool,
}

/// Check that every pairwise subspace angle is dominated by the link
/// eigenvalue bound and that the cosine matrix eigenvalue dominates the
/// criterion matrix eigenvalue.
pub fn verify_angle_bounds(
    space: &EquivariantSpace,
    table: &LambdaTable,
) -> Result<AngleBoundReport, EquivariantError> {
    let n = space.complex.dim();
    let subspaces: Result<Vec<Subspace>, _> = (0..=n).map(|i| space.u_subspace(i)).collect();
    let subspaces = subspaces?;
    let size = n + 1;
    let mut cos = DMatrix::zeros(size, size);
    let mut a_pi = DMatrix::identity(size, size);
    let mut a_x = DMatrix::identity(size, size);
    let mut entrywise_ok = true;
    for i in 0..size {
        for j in (i + 1)..size {
            let c = hilbert::angle_cos(&subspaces[i], &subspaces[j])
                .expect("common ambient dimension by construction");
            let lambda = table
                .get(&(i, j))
                .ok_or(EquivariantError::TableMismatch(i, j))?
                .value;
            cos[(i, j)] = c;
            cos[(j, i)] = c;
            a_pi[(i, j)] = -c;
            a_pi[(j, i)] = -c;
            a_x[(i, j)] = -lambda;
            a_x[(j, i)] = -lambda;
            if c > lambda + 1e-9 {
                entrywise_ok = false;
            }
        }
    }
    let a_pi_min = hilbert::smallest_eigenvalue(&a_pi);
    let a_x_min = hilbert::smallest_eigenvalue(&a_x);
    Ok(AngleBoundReport {
        cosines: cos,
        a_pi_smallest_eigenvalue: a_pi_min,
        entrywise_ok,
        eigen_ok: a_pi_min >= a_x_min - 1e-9,
    })
}

/// Outcome of the inequality-chain check for one test vector.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub eps_prime: f64,
    pub phi_norm: f64,
    pub norm_lower_bound_holds: bool,
    pub projection_bounds_hold: bool,
    pub kassabov_bound_holds: bool,
    pub k_size: usize,
    pub k_symmetric: bool,
    pub k_generates: bool,
}

/// Verify the three inequalities behind the Kazhdan-pair argument for a
/// concrete unit vector: the norm lower bound for the stabilizer average,
/// the averaging-distance bound per type set, and the projection-distance
/// bound with the criterion eigenvalue.
pub fn phi_x_chain_check(
    space: &EquivariantSpace,
    x: &DVector<f64>,
    lambda_x: f64,
) -> Result<ChainReport, EquivariantError> {
    if (x.norm() - 1.0).abs() > 1e-9 {
        return Err(EquivariantError::NotUnitVector);
    }
    if lambda_x <= 0.0 {
        return Err(EquivariantError::NonPositiveLambda);
    }
    let k = space.k_set();
    if k.is_empty() {
        return Err(EquivariantError::KEmpty);
    }
    let k_index: BTreeSet<usize> = k.iter().cloned().collect();
    let k_symmetric = k.iter().all(|&g| k_index.contains(&space.action.inverse(g)));
    // closure of K by repeated multiplication
    let mut closure = k_index.clone();
    loop {
        let mut grew = false;
        let snapshot: Vec<usize> = closure.iter().cloned().collect();
        for &a in &snapshot {
            for &b in &k {
                if closure.insert(space.action.mul(a, b)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let k_generates = closure.len() == space.action.order();

    let eps_prime = k
        .iter()
        .map(|&g| (space.rep.apply(g, x) - x).norm())
        .fold(0.0, f64::max);

    let phi = space.phi_x(x);
    let phi_norm = phi.norm();
    let norm_lower_bound_holds = phi_norm >= 1.0 - eps_prime - 1e-9;

    let n = space.complex.dim();
    let mut projection_bounds_hold = true;
    for skip in 0..=n {
        let nu: Vec<usize> = (0..=n).filter(|&t| t != skip).collect();
        let projected = space.p_nu_apply(&nu, &phi)?;
        if (&phi - projected).norm() > 2.0 * eps_prime + 1e-9 {
            projection_bounds_hold = false;
        }
    }

    let subspaces: Result<Vec<Subspace>, _> = (0..=n).map(|i| space.u_subspace(i)).collect();
    let subspaces = subspaces?;
    let inter = hilbert::intersect(space.ambient_dim(), &subspaces)
        .expect("common ambient dimension by construction");
    let lhs = (&phi - inter.project(&phi)).norm_squared();
    let rhs: f64 = subspaces
        .iter()
        .map(|u| (&phi - u.project(&phi)).norm_squared())
        .sum::<f64>()
        / lambda_x;
    let kassabov_bound_holds = lhs <= rhs + 1e-9;

    Ok(ChainReport {
        eps_prime,
        phi_norm,
        norm_lower_bound_holds,
        projection_bounds_hold,
        kassabov_bound_holds,
        k_size: k.len(),
        k_symmetric,
        k_generates,
    })
}
