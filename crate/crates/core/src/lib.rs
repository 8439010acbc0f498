//! Equigeodesic vectors on reductive homogeneous spaces.
//!
//! The crate builds explicit matrix realizations of `so(n)`, `u(n)` and
//! `sp(n)`, assembles reductive decompositions `g = h + m` for a fixed set of
//! homogeneous spaces, derives the bilinear systems whose zero sets are the
//! equigeodesic vectors, checks cataloged solution families against those
//! systems, and searches the systems numerically.
//!
//! Modules, bottom-up:
//!
//! * [`liealg`]: matrix elements, bases, structure constants, the form
//!   `B(X, Y) = -Re tr(XY)`, and bracket-table validation.
//! * [`homspace`]: space configurations, invariant metrics and class
//!   partitions, Wallach-type validation.
//! * [`engine`]: projected brackets, equigeodesic residuals, system
//!   generation, vector classification, geodesic-vector test.
//! * [`catalog`]: solution families as data, instantiation and verification.
//! * [`solver`]: damped Gauss-Newton on the unit sphere with random restarts.

pub mod catalog;
pub mod engine;
mod error;
pub mod homspace;
pub mod liealg;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
