//! litp: a labeled interpolation toolkit for propositional logic.
//!
//! The crate bundles a small CDCL solver that logs resolution proofs, Craig
//! interpolation over those proofs driven by occurrence labelings, checkers
//! for collective interpolant properties (path, simultaneous-abstraction,
//! generalized simultaneous-abstraction, state-transition, and tree shapes),
//! and a static analysis that predicts those properties from the labelings
//! alone.

pub mod cli;
pub mod collectives;
pub mod constraints;
pub mod formula;
pub mod proof;
pub mod interpolate;
pub mod labeling;
pub mod sat;

pub use formula::{BoolExpr, Clause, Lit, PartIdx, PartitionedCnf, Var};
pub use proof::{ProofBuilder, ResolutionProof};
