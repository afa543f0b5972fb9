//! A kernel for a simply-typed constant-domain modal lambda calculus and
//! its intensional combinatory logic.
//!
//! The calculus restricts ordinary simply-typed lambda calculus in two
//! ways: state atoms cannot be arrow codomains, and each state atom carries
//! a budget of variable indices. Those restrictions break the usual
//! metatheory in interesting ways — substitution can be unrecoverably
//! capturing, beta reduction comes with a distance, and confluence fails —
//! and this crate implements the machinery that repairs it: distanced
//! rewriting, a combinatory logic over B, C, D, K, W with Church-Rosser
//! machinery, translations in both directions, expressibility compilers,
//! and finite Henkin-style model evaluation.

pub mod cl;
pub mod cli;
pub mod comb;
pub mod combinator;
pub mod gen;
pub mod reduction;
pub mod semantics;
pub mod syntax;
pub mod term;
pub mod translate;
pub mod types;

pub use cl::ClTerm;
pub use comb::{CombKind, CombinatorSpec};
pub use term::{Term, Var};
pub use types::{Budget, Parameter, Signature, Type};
