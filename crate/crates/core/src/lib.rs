//! Source-to-sink equivalence of acyclic orientations.
//!
//! Clicking a source of an acyclic orientation turns it into a sink. Two
//! acyclic orientations are κ-equivalent when a sequence of clicks maps one
//! onto the other, and κ(Y) counts the classes. This crate computes κ three
//! independent ways and builds the structures that explain the
//! deletion/contraction recursion:
//!
//! - [`orientations`]: brute force over `Acyc(Y)`: click graph, ν invariants,
//!   cut-equivalence, unique-source transversal.
//! - [`kappa`]: κ by memoized deletion/contraction of cycle-edges.
//! - [`tutte`]: the Tutte polynomial and its evaluations `T(1,0) = κ`,
//!   `T(2,0) = |Acyc|`, plus a subset-expansion oracle.
//! - [`collapse`]: the collapse graph on κ-classes for a cycle-edge.
//! - [`verify`]: the cross-engine differential suite.

pub mod collapse;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod kappa;
pub mod key;
pub mod orientations;
pub mod tutte;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{EdgeKind, GraphId, Minor, Multigraph};
pub use kappa::{kappa, kappa_with_trace, KappaEngine, KappaResult};
pub use orientations::{KappaPartition, Orientation, PathSpec, DEFAULT_BRUTE_FORCE_CAP};
pub use tutte::{tutte_eval, tutte_polynomial, TuttePolynomial};
