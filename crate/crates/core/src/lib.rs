//! Exact computations in invariant rings of permutation groups acting on the
//! edges of graphs and the arcs of digraphs.

pub mod chain;
pub mod error;
pub mod gensets;
pub mod group;
pub mod hilbert;
pub mod kernel;
pub mod orbits;
pub mod studies;

pub use error::{Error, Result};
pub use group::ActionSpec;
pub use kernel::{DegreePolynomial, Dominance, Rational, TruncatedSeries};
pub use orbits::{exps, Action, ExponentVector, InvariantPolynomial, Product, WeightedGraph};

/// Bumped whenever a change could alter any computed output.
pub const ENGINE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+1");
