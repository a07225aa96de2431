//! Numerical toolkit for decomposable quantum dynamical semigroups and
//! D-divisible dynamical maps on finite-dimensional matrix algebras.
//!
//! The crate builds generators of semigroups whose maps split into a completely
//! positive (CP) and a completely copositive (coCP) part, classifies linear
//! maps against the cone hierarchy CP / coCP / PPT / decomposable at the Choi
//! matrix level, verifies dissipation inequalities by sampling, and scans
//! time-dependent dynamical maps for D-divisibility of their propagators.
//!
//! Modules, bottom to top:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigensolver, matrix
//!   exponential, Kronecker/vectorization/partial-transpose plumbing.
//! - [`qmaps`]: superoperator, Choi matrix and Kraus representations of linear
//!   maps, duals and tensor extensions.
//! - [`cones`]: cone membership tests, Dykstra alternating projections,
//!   witness and CP + coCP split extraction.
//! - [`generators`]: standard-form generator builders and dissipation checks.
//! - [`semigroup`]: semigroup evolution, Trotter products and time-grid scans.
//! - [`dynmap`]: master-equation integration, propagators, divisibility scans.
//! - [`cli`]: scenario files, reports and the batch command-line interface.
//!
//! Conventions are fixed once and used everywhere: row-stacking vectorization
//! (`vec(AXB) = (A ⊗ Bᵀ) vec(X)`), Choi matrices with the index factor first
//! (`C = Σ E_ij ⊗ Φ(E_ij)`), and copositivity tested as positivity of the
//! partial transpose on the second tensor factor.

pub mod cli;
pub mod cones;
pub mod dynmap;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod qmaps;
pub mod sample;
pub mod semigroup;

#[cfg(test)]
pub mod testutil;

pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix};
