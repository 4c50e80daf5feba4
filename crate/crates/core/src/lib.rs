//! Connection-tableau theorem proving driven by Monte-Carlo tree search.
//!
//! The crate is layered bottom-up:
//!
//! * [`parse`] / [`syntax`]: clausal problems with interned 64-bit symbols.
//! * [`tableau`]: the connection calculus as an explicit, undoable state.
//! * [`check`]: an independent replay checker for proofs.
//! * [`features`]: hashed term-walk and abstract features of proof states.
//! * [`learn`]: linear regression models for policy and value guidance.
//! * [`search`]: bare random playouts, UCT search and iterative deepening.
//! * [`orchestrate`]: corpus runs, the reinforcement-learning loop and reports.

pub mod check;
pub mod config;
pub mod error;
pub mod features;
pub mod learn;
mod matrix;
pub mod orchestrate;
pub mod parse;
pub mod proof;
pub mod search;
pub mod syntax;
pub mod tableau;

pub use check::{check_proof, check_proof_detailed};
pub use error::{LearnError, ProblemError, RunError, TableauError};
pub use parse::{load_problem, parse_problem, ProblemLoader};
pub use syntax::{intern_symbol, Clause, Literal, Problem, SymbolId, SymbolKind, Term};
pub use tableau::{Action, TableauState};
