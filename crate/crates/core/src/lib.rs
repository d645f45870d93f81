//! Certification of unique non-equilibrium steady states for finite-dimensional
//! Lindblad (GKSL) equations.
//!
//! The crate decides an algebraic sufficient condition for uniqueness by
//! computing the operator algebra generated by the effective non-Hermitian
//! Hamiltonian `K = H − (i/2) Σ L†L` together with the jump operators, refines
//! it to strong-symmetry sectors, and cross-checks every verdict against an
//! SVD of the vectorized Liouvillian.
//!
//! Module map:
//! - [`opalg`]: dense operators, Pauli strings, Jordan–Wigner fermions, HS bases.
//! - [`modelspec`]: model description, JSON format and builtin models.
//! - [`liouvillian`]: the generator, its matrix, spectrum and kernel.
//! - [`closure`]: generated algebras and commutants.
//! - [`symmetry`]: strong symmetries and sector decompositions.
//! - [`ness`]: steady states and the verdict pipeline.
//! - [`cli`]: the `lindblad-certify` command line front end.

pub mod cli;
pub mod closure;
pub mod error;
pub mod liouvillian;
pub mod modelspec;
pub mod ness;
pub mod opalg;
pub mod report;
pub mod symmetry;

pub use error::{Error, Result};
pub use opalg::{c64, Operator};
