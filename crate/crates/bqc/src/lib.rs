//! Toolkit for Basic Predicate Calculus: derivation checking, realizer
//! extraction into a Gödel-numbered model of total computable functions, and
//! validation of realizers against generalized-realizability semantics over
//! finite domains.
//!
//! The pipeline: parse formulas and derivations ([`syntax`], [`formats`]),
//! check each derivation node against the axiom and rule schemas
//! ([`calculus`]), extract a numeric realizer from a checked derivation
//! ([`extraction`]), and decide — exactly where possible, boundedly otherwise
//! — whether a number realizes a formula over a finite evaluation
//! ([`semantics`]). [`numbering`] supplies the program language, its
//! numbering, and the interpreter that everything else runs on.

pub mod calculus;
pub mod campaign;
pub mod cli;
pub mod extraction;
pub mod formats;
pub mod numbering;
pub mod semantics;
pub mod syntax;

pub use numbering::{Nat, nat};
