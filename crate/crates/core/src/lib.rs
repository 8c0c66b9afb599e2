//! Sandwiched Rényi entropies and the strong-converse bounds they imply for
//! quantum source-coding protocols.
//!
//! The crate is split the same way the computations are layered:
//!
//! - [`tensor`]: labeled composite systems, partial traces, matrix functions,
//!   fidelity, purification, channels and seeded random ensembles.
//! - [`entropy`]: sandwiched divergences, Rényi entropies, the optimized
//!   conditional entropy and mutual information, and Rényi conditional mutual
//!   information.
//! - [`protocol`]: simulators for redistribution (with and without feedback),
//!   merging, splitting, measurement compression, randomness extraction and
//!   data compression.
//! - [`bounds`]: the converse bounds as functions of α, exponent curves and
//!   α→1 limit checks.
//! - [`harness`]: randomized inequality suites, brute-force oracles and the
//!   bound-comparison falsifier.
//!
//! All entropic quantities are in bits.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod entropy;
mod error;
pub mod harness;
pub mod protocol;
pub mod tensor;

pub use error::{Error, Result};
