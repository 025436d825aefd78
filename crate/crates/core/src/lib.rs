//! Computational toolkit for isoperimetric constants of Cayley graphs and of
//! finite models of measured equivalence relations.
//!
//! The crate is organised by subsystem:
//!
//! - [`groups`]: normal forms for free, free abelian and finite abelian groups
//!   (and direct products of these) and breadth-first Cayley balls.
//! - [`isoperimetry`]: edge and inner boundaries, exact minimum boundary ratios,
//!   ball profiles, growth estimates and the Følner/Kazhdan comparisons.
//! - [`forests`]: Wilson's algorithm, free and wired spanning forests on balls,
//!   and degree-based cost / first ℓ²-Betti number estimators.
//! - [`harmonic`]: finite-ball harmonic 1-chains, the center trace and the
//!   restriction rank identity.
//! - [`relsim`]: partial injections, graphings, cost, witness families of
//!   symmetric vertices and the cost-one and compression constructions.

pub mod error;
pub mod forests;
pub mod graph;
pub mod groups;
pub mod harmonic;
pub mod isoperimetry;
pub mod relsim;
pub mod rng;
mod union_find;

pub use error::{Error, Result};

/// Exact non-negative rational used for boundary ratios and costs.
pub type Rational = num_rational::Ratio<u64>;

/// Default hard cap on the number of vertices in a Cayley ball.
pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;
