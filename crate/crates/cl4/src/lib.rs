//! Computability-logic toolkit for CL4: formulas, classical validity, proofs,
//! proof search, game semantics, strategy extraction and the CL3 translation.

pub mod calculus;
pub mod classical;
pub mod decide;
pub mod games;
pub mod gen;
pub mod strategy;
pub mod syntax;
pub mod translate;
