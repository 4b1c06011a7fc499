//! Exact solvers for the Vertex-Vertex, Vertex-Boundary and Boundary-Vertex
//! art gallery problems, fixed-parameter tractable in the number of reflex
//! vertices.
//!
//! The pipeline: exact rational visibility ([`geom`]) feeds a convex-region
//! decomposition with monotone view tables ([`regions`]); the driver
//! ([`structured`]) enumerates structured guesses and hands each one to the
//! constraint builder ([`karp`]), which emits a monotone 2-CSP solved through
//! a 2-SAT reduction ([`csp`]). Brute-force oracles and a random polygon
//! generator ([`oracle`]) certify every stage.

pub mod csp;
pub mod geom;
pub mod karp;
pub mod oracle;
pub mod rational;
pub mod regions;
pub mod structured;

#[cfg(test)]
pub(crate) mod fixtures;

pub use geom::{Point, Polygon};
pub use rational::Rat;
