//! Exact invariants of irregular classes at infinity on the affine line.
//!
//! The crate computes, in exact arithmetic throughout:
//!
//! - exponential factors (Puiseux polynomials with cyclotomic coefficients),
//!   their Galois orbits (Stokes circles), and the circle invariants
//!   (ramification, irregularity, slope, exponents, levels);
//! - pairwise common parts and fission exponents, loop/edge multiplicities
//!   in raw and rescaled form, and the core diagram of an irregular class;
//! - the fission tree of a class, as a height-labeled dendrogram with
//!   mandatory/admissible/empty decorations;
//! - graph classification: fission graphs (with a constructive witness
//!   class), certified non-realizable diagrams (exact decoration
//!   feasibility), and inconclusive candidates.
//!
//! Everything is immutable after construction and safe to share across
//! threads. See the `parse` and `emit` modules for the text grammar and the
//! JSON/DOT serializations used by the command-line tool.

pub mod classify;
pub mod cyclo;
pub mod diagram;
pub mod emit;
pub mod error;
pub mod feasible;
pub mod parse;
pub mod puiseux;
pub mod rational;
pub mod sample;
pub mod tree;

pub use cyclo::Cyclotomic;
pub use error::{Error, Result};
pub use rational::Rational;
