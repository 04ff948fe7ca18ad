//! Eigenvalue-free algebraic-set invariants of multipartite mixed states.
//!
//! A mixed state is probed with separable pure states on some of its parties.
//! The locus `V^k` of probes for which the induced Hermitian form on the
//! remaining parties has rank at most `k` only depends on the range of the
//! state, not on its eigenvalues, and is carried covariantly by local
//! unitaries. For a state that is separable across a cut this locus is a
//! finite union of products of linear subspaces, which gives a separability
//! test that detects whole families of entangled states at once.
//!
//! The crate is split into:
//!
//! - [`tensor`]: dense multipartite linear algebra (partial traces and
//!   transposes, spectra, Schmidt ranks, Haar sampling).
//! - [`locus`]: the polynomial W-matrix of a cut, its minors, numerical
//!   membership, locus sampling and the linearity test.
//! - [`states`]: example families (generalized Smolin states, the
//!   three-qutrit family with constant spectra) and their fingerprints.
//! - [`analysis`]: end-to-end screening pipelines and randomized audits.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod error;
pub mod locus;
pub mod seed;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
