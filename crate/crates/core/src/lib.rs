//! A workbench for higher-order and lambda-logic over finite topological
//! semantics: a proof checker for the entailment calculi, the topos of
//! sheaves on a finite space as a concrete computation, sheaf-valued
//! classical and intuitionistic semantics, and finite Henkin-model tooling.

pub mod deduction;
pub mod error;
pub mod finspace;
pub mod henkin;
pub mod semantics;
pub mod sheaf;
pub mod syntax;

pub use error::{DeductionError, HenkinError, SemanticsError, SheafError, SpaceError, SyntaxError};
