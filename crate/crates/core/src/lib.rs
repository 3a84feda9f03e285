//! First-order sentences over finite relational structures: parsing, evaluation,
//! prenex classification, relativization, cores, covers and bounded
//! preservation searches.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod logic;
pub mod normal;
pub mod par;
pub mod report;
pub mod substructure;
pub mod syntax;

pub use error::{Error, Result};
pub use logic::{Assignment, FiniteStructure, Formula, Quantifier, Term, Theory, Vocabulary};
pub use par::ExecMode;
pub use substructure::SearchBudget;
