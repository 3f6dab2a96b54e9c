//! Numerical and exact-rational machinery for the conformal geometry of the
//! unit ball, the Hilbert space of harmonic polynomials it acts on, and the
//! free-field (Wick) structure built on top of both.
//!
//! The crate is organized in layers, each usable on its own:
//!
//! * [`mobius`] — the conformal group of `S^d` realized as `(d+2)×(d+2)`
//!   matrices preserving a Lorentzian form, together with the submonoid of
//!   maps sending the open unit ball into itself, image-ball geometry and the
//!   matrix factorizations the other layers need.
//! * [`harmonic`] — exact multivariate polynomial algebra over big rationals:
//!   harmonic projection, the Fisher and representation inner products,
//!   Gegenbauer polynomials and orthonormal graded bases.
//! * [`rkhs`] — the truncated reproducing-kernel Hilbert space spanned by the
//!   harmonic basis, evaluation vectors, and dense matrices for the monoid
//!   action on it.
//! * [`contraction`] — two-point contraction bilinear forms: exact matrix
//!   elements, a symbolic Green-kernel oracle, entrywise bounds, and the
//!   norm-divergence probe at tangent geometry.
//! * [`fock`] — the truncated symmetric-tensor algebra: lifted monoid action,
//!   pairwise contractions, operadic products, vacuum and sphere states.
//! * [`verify`] — batch check suites producing machine-readable reports.

pub mod contraction;
pub mod error;
pub mod fock;
pub mod harmonic;
pub mod mobius;
pub mod num;
pub mod rkhs;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Tolerance for group-law identities on matrix entries.
pub const TOL_GROUP: f64 = 1e-10;
/// Tolerance for sampled numerical identities (cocycle, distance identity, ...).
pub const TOL_NUM: f64 = 1e-9;
/// Tolerance for geometric fits (image balls, classification).
pub const TOL_GEO: f64 = 1e-9;
/// Tolerance for finite-difference Jacobian checks.
pub const TOL_FD: f64 = 1e-5;
/// Tolerance for orthonormality of float-path bases.
pub const TOL_BASIS: f64 = 1e-12;
/// Lift scalars smaller than this are treated as the point at infinity.
pub const POLE_EPS: f64 = 1e-13;
