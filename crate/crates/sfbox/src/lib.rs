//! sfbox — a checker, interpreter, and type-preserving translator for a
//! small functional language whose programs compute over syntax with
//! binders.
//!
//! The crate has three layers plus glue:
//!
//! * [`sf`] — the syntactic framework: simply typed terms over a
//!   user-declared signature, with contextual types `[Psi |- a]`, explicit
//!   substitutions, and pattern matching on syntax.
//! * [`coreml`] — the computation language: a bidirectionally typed
//!   functional language with data types and embedded SF objects, plus a
//!   big-step interpreter.
//! * [`target`] — a polymorphic language with type-equality-constrained
//!   pattern matching and a fixed deep embedding of SF syntax as indexed
//!   data, plus its checker and evaluator.
//! * [`trans`] — the type-preserving translation from source programs to
//!   target programs, and the machinery that cross-checks both sides.
//! * [`gen`] — seeded generators for random well-typed programs.
//! * [`driver`] — surface syntax (lexer, parser, printer), JSON output, and
//!   the command-line entry points.
//!
//! [`oracle`] holds independent reference implementations used only by the
//! test suite.

pub mod coreml;
pub mod diag;
pub mod driver;
pub mod gen;
pub mod names;
pub mod oracle;
pub mod sf;
pub mod target;
pub mod trans;
