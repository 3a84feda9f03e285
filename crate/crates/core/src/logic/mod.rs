//! Vocabularies, finite structures, formulas and theories.

mod formula;
mod structure;
mod vocabulary;

pub use formula::{Assignment, Formula, Quantifier, Term, Theory};
pub use structure::{FiniteStructure, StructureDraft, Violation};
pub(crate) use structure::{table_len, tuple_index};
pub use vocabulary::{is_identifier, RelationSymbol, Vocabulary};

/// Checks a draft against every structure invariant; an empty list means ok.
pub fn validate_structure(draft: &StructureDraft) -> Vec<Violation> {
    draft.validate()
}
