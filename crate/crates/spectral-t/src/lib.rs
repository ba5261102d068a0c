//! Spectral verification toolkit for the positive-definiteness criterion on
//! partite simplicial complexes.
//!
//! The pipeline: build a partite pure complex (or take a family of
//! codimension-2 link graphs directly), compute the second-largest random-walk
//! eigenvalue of every link, assemble the criterion matrix with unit diagonal
//! and negated link eigenvalues off-diagonal, and report its smallest
//! eigenvalue together with the resulting Kazhdan constant when the matrix is
//! positive definite.  A separate module models equivariant function spaces
//! for finite group actions and checks the supporting subspace-angle lemmas
//! numerically.

pub mod complex;
pub mod criterion;
pub mod equivariant;
pub mod formats;
pub mod generators;
pub mod hilbert;
pub mod spectra;
pub mod suites;
