//! The syntactic framework kernel: a simply typed specification calculus in
//! which all variables have atomic type, constructors are fully applied, and
//! `box` marks closed subterms. Terms are addressed from the computation layer
//! through contextual types `[Psi |- a]`, quoted variables, parameter
//! variables, and explicit closures.

pub mod matching;
pub mod subst;
pub mod syntax;
pub mod typing;

pub use syntax::*;
