//! Finite-dimensional subspace geometry: orthonormal bases, projections,
//! intersections, the angle between subspaces, cosine matrices and the
//! associated projection-distance inequality.
//!
//! The angle here is the one used throughout the criterion: it is 0 when one
//! subspace contains the other, and otherwise the largest principal cosine
//! after the mutual intersection has been removed from both sides.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Rank / containment tolerance for orthonormalization.
pub const RANK_TOL: f64 = 1e-10;
/// Principal cosines at least `1 - INTERSECT_TOL` are treated as intersection
/// directions.
pub const INTERSECT_TOL: f64 = 1e-9;
/// Containment test threshold on projection residuals.
pub const CONTAIN_TOL: f64 = 1e-9;
/// Positive-definiteness tolerance on the smallest eigenvalue.
pub const PD_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum HilbertError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cosine matrix is not positive definite (smallest eigenvalue {0})")]
    NotPositiveDefinite(f64),
}

/// A subspace of a finite-dimensional real Hilbert space, stored as an
/// orthonormal basis matrix (`ambient x dim` columns).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    /// The zero subspace of the given ambient dimension.
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    /// Wrap a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        let ambient = basis.nrows();
        debug_assert!({
            let gram = basis.transpose() * &basis;
            (gram - DMatrix::identity(basis.ncols(), basis.ncols())).norm() < 1e-8
        });
        Subspace { ambient, basis }
    }

    /// Orthonormal basis of the span of the given vectors.  Rank is decided
    /// with tolerance [`RANK_TOL`] relative to the largest singular value.
    pub fn from_spanning(ambient: usize, vectors: &[DVector<f64>]) -> Result<Self, HilbertError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(HilbertError::DimensionMismatch(ambient, v.len()));
            }
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let mut m = DMatrix::zeros(ambient, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        Ok(Self::from_columns_span(m))
    }

    /// Orthonormal basis of the column span of `m`, via Gram–Schmidt with
    /// column pivoting and full re-orthogonalization.  (Deliberately avoids
    /// the SVD here: clustered singular values trip it up.)
    pub fn from_columns_span(m: DMatrix<f64>) -> Self {
        let ambient = m.nrows();
        if m.ncols() == 0 {
            return Self::zero(ambient);
        }
        let mut residual: Vec<DVector<f64>> = (0..m.ncols()).map(|j| m.column(j).into()).collect();
        let scale = residual.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Self::zero(ambient);
        }
        let threshold = scale * RANK_TOL;
        let mut basis: Vec<DVector<f64>> = Vec::new();
        loop {
            // re-orthogonalize everything against the basis so far, then
            // pull out the largest remaining column
            let mut best = 0.0;
            let mut pick = None;
            for (j, col) in residual.iter_mut().enumerate() {
                for b in &basis {
                    let c = b.dot(col);
                    *col -= b * c;
                }
                let norm = col.norm();
                if norm > best {
                    best = norm;
                    pick = Some(j);
                }
            }
            match pick {
                Some(j) if best > threshold => {
                    let b = &residual[j] / best;
                    basis.push(b);
                }
                _ => break,
            }
        }
        let mut out = DMatrix::zeros(ambient, basis.len());
        for (j, b) in basis.iter().enumerate() {
            out.set_column(j, b);
        }
        Subspace {
            ambient,
            basis: out,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(self.ambient);
        }
        &self.basis * (self.basis.transpose() * x)
    }

    /// Whether `self` is contained in `other`, by projection residual.
    pub fn contained_in(&self, other: &Subspace) -> bool {
        if self.dim() == 0 {
            return true;
        }
        if other.dim() == 0 {
            return false;
        }
        for j in 0..self.dim() {
            let col: DVector<f64> = self.basis.column(j).into();
            let residual = &col - other.project(&col);
            if residual.norm() > CONTAIN_TOL {
                return false;
            }
        }
        true
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), HilbertError> {
        if self.ambient != other.ambient {
            return Err(HilbertError::DimensionMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    /// Orthogonal complement of `w` inside `self` (assumes `w ⊆ self`).
    fn deflate(&self, w: &Subspace) -> Subspace {
        if w.dim() == 0 {
            return self.clone();
        }
        let mut residuals = self.basis.clone();
        for j in 0..residuals.ncols() {
            let col: DVector<f64> = residuals.column(j).into();
            let proj = w.project(&col);
            residuals.set_column(j, &(col - proj));
        }
        Subspace::from_columns_span(residuals)
    }
}

/// Singular values of `b1ᵀ b2`, i.e. the principal cosines, descending.
/// Computed through the symmetric eigenproblem of the smaller Gram matrix,
/// which is robust where the plain SVD is not.
fn principal_cosines(u1: &Subspace, u2: &Subspace) -> Vec<f64> {
    if u1.dim() == 0 || u2.dim() == 0 {
        return Vec::new();
    }
    let prod = u1.basis().transpose() * u2.basis();
    let gram = if prod.nrows() <= prod.ncols() {
        &prod * prod.transpose()
    } else {
        prod.transpose() * &prod
    };
    let eig = gram.symmetric_eigen();
    let mut s: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt().min(1.0))
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Intersection of two subspaces via principal vectors: directions whose
/// principal cosine is at least `1 - INTERSECT_TOL`.
pub fn intersect_pair(u1: &Subspace, u2: &Subspace) -> Result<Subspace, HilbertError> {
    u1.check_ambient(u2)?;
    if u1.dim() == 0 || u2.dim() == 0 {
        return Ok(Subspace::zero(u1.ambient_dim()));
    }
    // eigenvectors of B1ᵀ P2 B1 with eigenvalue cos² ≈ 1 give the
    // intersection directions inside U1
    let prod = u1.basis().transpose() * u2.basis();
    let gram = &prod * prod.transpose();
    let eig = gram.symmetric_eigen();
    let cutoff = (1.0 - INTERSECT_TOL) * (1.0 - INTERSECT_TOL);
    let cols: Vec<usize> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| **l >= cutoff)
        .map(|(i, _)| i)
        .collect();
    let mut dirs = DMatrix::zeros(u1.ambient_dim(), cols.len());
    for (j, &i) in cols.iter().enumerate() {
        let v = u1.basis() * DVector::from_column_slice(eig.eigenvectors.column(i).as_slice());
        dirs.set_column(j, &v);
    }
    Ok(Subspace::from_columns_span(dirs))
}

/// Intersection of a list of subspaces, folded pairwise with
/// re-orthonormalization.  The empty list yields the full ambient space.
pub fn intersect(ambient: usize, subspaces: &[Subspace]) -> Result<Subspace, HilbertError> {
    let mut acc = Subspace::from_orthonormal(DMatrix::identity(ambient, ambient));
    for s in subspaces {
        if s.ambient_dim() != ambient {
            return Err(HilbertError::DimensionMismatch(ambient, s.ambient_dim()));
        }
        acc = intersect_pair(&acc, s)?;
    }
    Ok(acc)
}

/// Cosine of the angle between two subspaces: 0 under containment (either
/// direction), otherwise the top principal cosine after removing the
/// intersection from both sides.
pub fn angle_cos(u1: &Subspace, u2: &Subspace) -> Result<f64, HilbertError> {
    u1.check_ambient(u2)?;
    if u1.contained_in(u2) || u2.contained_in(u1) {
        return Ok(0.0);
    }
    let w = intersect_pair(u1, u2)?;
    let r1 = u1.deflate(&w);
    let r2 = u2.deflate(&w);
    let cosines = principal_cosines(&r1, &r2);
    let top = cosines.first().cloned().unwrap_or(0.0);
    // The intersection has been removed, so the top cosine sits strictly
    // below 1 up to the intersection threshold.
    Ok(top.clamp(0.0, 1.0))
}

/// The symmetric matrix with unit diagonal and negated pairwise angle
/// cosines off-diagonal, together with its smallest eigenvalue.
#[derive(Debug, Clone)]
pub struct CosineMatrix {
    pub matrix: DMatrix<f64>,
    pub smallest_eigenvalue: f64,
}

impl CosineMatrix {
    pub fn positive_definite(&self) -> bool {
        self.smallest_eigenvalue > PD_TOL
    }

    pub fn borderline(&self) -> bool {
        self.smallest_eigenvalue.abs() <= PD_TOL
    }
}

pub fn cosine_matrix(subspaces: &[Subspace]) -> Result<CosineMatrix, HilbertError> {
    let k = subspaces.len();
    assert!(k >= 2, "need at least two subspaces");
    let mut m = DMatrix::identity(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let c = angle_cos(&subspaces[i], &subspaces[j])?;
            m[(i, j)] = -c;
            m[(j, i)] = -c;
        }
    }
    let smallest = smallest_eigenvalue(&m);
    Ok(CosineMatrix {
        matrix: m,
        smallest_eigenvalue: smallest,
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn smallest_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Outcome of the projection-distance inequality check for a tuple of
/// subspaces and a test vector.
#[derive(Debug, Clone)]
pub struct KassabovOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check `‖x − P_∩ x‖² ≤ dᵀ A⁻¹ d` where `d_i = ‖x − P_{U_i} x‖` and `A` is
/// the cosine matrix of the subspaces.  Errors when `A` is not positive
/// definite.
pub fn kassabov_check(
    subspaces: &[Subspace],
    x: &DVector<f64>,
) -> Result<KassabovOutcome, HilbertError> {
    let cm = cosine_matrix(subspaces)?;
    if !cm.positive_definite() {
        return Err(HilbertError::NotPositiveDefinite(cm.smallest_eigenvalue));
    }
    let ambient = subspaces[0].ambient_dim();
    let inter = intersect(ambient, subspaces)?;
    let lhs = (x - inter.project(x)).norm_squared();
    let d = DVector::from_iterator(
        subspaces.len(),
        subspaces.iter().map(|u| (x - u.project(x)).norm()),
    );
    let inv = cm
        .matrix
        .clone()
        .try_inverse()
        .ok_or(HilbertError::NotPositiveDefinite(cm.smallest_eigenvalue))?;
    let rhs = (d.transpose() * inv * &d)[(0, 0)];
    let holds = lhs <= rhs * (1.0 + 1e-8) + 1e-12;
    Ok(KassabovOutcome { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(s)
    }

    #[test]
    fn spanning_independent_pair() {
        let u = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[1.0, 1.0, 0.0])]).unwrap();
        assert_eq!(u.dim(), 2);
    }

    #[test]
    fn spanning_rank_deficient() {
        let u = Subspace::from_spanning(2, &[v(&[1.0, 1.0]), v(&[2.0, 2.0])]).unwrap();
        assert_eq!(u.dim(), 1);
    }

    #[test]
    fn spanning_empty_is_zero() {
        let u = Subspace::from_spanning(4, &[]).unwrap();
        assert_eq!(u.dim(), 0);
    }

    #[test]
    fn spanning_dimension_mismatch() {
        let err = Subspace::from_spanning(3, &[v(&[1.0, 0.0])]).unwrap_err();
        assert_eq!(err, HilbertError::DimensionMismatch(3, 2));
    }

    #[test]
    fn intersect_coordinate_planes() {
        let u1 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        let u2 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 0.0, 1.0])]).unwrap();
        let w = intersect_pair(&u1, &u2).unwrap();
        assert_eq!(w.dim(), 1);
        let e1 = v(&[1.0, 0.0, 0.0]);
        assert!((w.project(&e1) - &e1).norm() < 1e-10);
    }

    #[test]
    fn intersect_idempotent() {
        let u = Subspace::from_spanning(4, &[v(&[1.0, 2.0, 0.0, 1.0]), v(&[0.0, 1.0, 1.0, 0.0])])
            .unwrap();
        let w = intersect_pair(&u, &u).unwrap();
        assert_eq!(w.dim(), u.dim());
        assert!(w.contained_in(&u) && u.contained_in(&w));
    }

    #[test]
    fn intersect_generic_position_is_zero() {
        // Two 3-dim subspaces of R^6 spanned by fixed pseudo-random vectors.
        let a = [
            v(&[0.3, -1.2, 0.7, 0.1, 2.0, -0.5]),
            v(&[1.1, 0.4, -0.9, 0.6, -0.2, 0.8]),
            v(&[-0.7, 0.9, 1.3, -1.1, 0.5, 0.2]),
        ];
        let b = [
            v(&[0.9, 0.1, -0.4, 1.5, -0.8, 0.3]),
            v(&[-0.2, 1.7, 0.6, -0.3, 1.1, -1.4]),
            v(&[0.5, -0.6, 1.9, 0.8, 0.4, 0.7]),
        ];
        let u1 = Subspace::from_spanning(6, &a).unwrap();
        let u2 = Subspace::from_spanning(6, &b).unwrap();
        assert_eq!(intersect_pair(&u1, &u2).unwrap().dim(), 0);
    }

    #[test]
    fn angle_of_plane_lines() {
        let theta = std::f64::consts::PI / 3.0;
        let u1 = Subspace::from_spanning(2, &[v(&[1.0, 0.0])]).unwrap();
        let u2 = Subspace::from_spanning(2, &[v(&[theta.cos(), theta.sin()])]).unwrap();
        let c = angle_cos(&u1, &u2).unwrap();
        assert!((c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn angle_removes_intersection() {
        let theta = std::f64::consts::PI / 4.0;
        let u1 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        let u2 = Subspace::from_spanning(
            3,
            &[v(&[1.0, 0.0, 0.0]), v(&[0.0, theta.cos(), theta.sin()])],
        )
        .unwrap();
        let c = angle_cos(&u1, &u2).unwrap();
        assert!((c - theta.cos()).abs() < 1e-9, "got {c}");
    }

    #[test]
    fn angle_zero_under_containment() {
        let u1 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0])]).unwrap();
        let u2 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(angle_cos(&u1, &u2).unwrap(), 0.0);
        assert_eq!(angle_cos(&u2, &u1).unwrap(), 0.0);
    }

    #[test]
    fn cosine_matrix_orthogonal_subspaces() {
        let u0 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0])]).unwrap();
        let u1 = Subspace::from_spanning(3, &[v(&[0.0, 1.0, 0.0])]).unwrap();
        let u2 = Subspace::from_spanning(3, &[v(&[0.0, 0.0, 1.0])]).unwrap();
        let cm = cosine_matrix(&[u0, u1, u2]).unwrap();
        assert!((cm.matrix.clone() - DMatrix::identity(3, 3)).norm() < 1e-12);
        assert!((cm.smallest_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_matrix_three_lines_at_sixty_degrees() {
        let line = |t: f64| Subspace::from_spanning(2, &[v(&[t.cos(), t.sin()])]).unwrap();
        let subs = [
            line(0.0),
            line(std::f64::consts::PI / 3.0),
            line(2.0 * std::f64::consts::PI / 3.0),
        ];
        let cm = cosine_matrix(&subs).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((cm.matrix[(i, j)] + 0.5).abs() < 1e-12);
                }
            }
        }
        assert!(cm.smallest_eigenvalue.abs() < 1e-10);
        assert!(cm.borderline());
    }

    #[test]
    fn cosine_matrix_repeated_subspace_is_identity() {
        let u = Subspace::from_spanning(3, &[v(&[1.0, 1.0, 0.0])]).unwrap();
        let cm = cosine_matrix(&[u.clone(), u.clone(), u]).unwrap();
        assert!((cm.matrix.clone() - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn kassabov_equality_for_orthogonal_lines() {
        let u0 = Subspace::from_spanning(2, &[v(&[1.0, 0.0])]).unwrap();
        let u1 = Subspace::from_spanning(2, &[v(&[0.0, 1.0])]).unwrap();
        let x = v(&[1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()]);
        let out = kassabov_check(&[u0, u1], &x).unwrap();
        assert!((out.lhs - 1.0).abs() < 1e-12);
        assert!((out.rhs - 1.0).abs() < 1e-12);
        assert!(out.holds);
    }

    #[test]
    fn kassabov_trivial_when_x_in_intersection() {
        let u0 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        let u1 = Subspace::from_spanning(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 0.0, 1.0])]).unwrap();
        let x = v(&[1.0, 0.0, 0.0]);
        let out = kassabov_check(&[u0, u1], &x).unwrap();
        assert!(out.lhs < 1e-12);
        assert!(out.holds);
    }

    #[test]
    fn kassabov_rejects_non_pd() {
        let line = |t: f64| Subspace::from_spanning(2, &[v(&[t.cos(), t.sin()])]).unwrap();
        let subs = [
            line(0.0),
            line(std::f64::consts::PI / 3.0),
            line(2.0 * std::f64::consts::PI / 3.0),
        ];
        let err = kassabov_check(&subs, &v(&[1.0, 0.0])).unwrap_err();
        assert!(matches!(err, HilbertError::NotPositiveDefinite(_)));
    }

    #[test]
    fn projection_correctness() {
        let u = Subspace::from_spanning(4, &[v(&[1.0, 1.0, 0.0, 0.0]), v(&[0.0, 0.0, 1.0, -1.0])])
            .unwrap();
        let x = v(&[0.3, -0.7, 2.0, 0.5]);
        let p = u.project(&x);
        assert!((u.project(&p) - &p).norm() < 1e-10);
        let r = &x - &p;
        assert!((u.basis().transpose() * &r).norm() < 1e-10);
    }
}
