use thiserror::Error;

use crate::syntax::ParseError;

/// Errors raised by the library. Validation problems of a structure draft are
/// reported separately as [`crate::logic::Violation`] lists.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("invalid structure: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidStructure(Vec<crate::logic::Violation>),

    #[error("unknown relation symbol `{0}`")]
    UnknownRelation(String),

    #[error("unknown constant symbol `{0}`")]
    UnknownConstant(String),

    #[error("arity mismatch for {relation}: expected {expected}, found {found}")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },

    #[error("element `{0}` is not in the universe")]
    UnknownElement(String),

    #[error("free variable `{0}` is not covered by the assignment")]
    UnboundVariable(String),

    #[error("formula has free variables: {0:?}")]
    NotASentence(Vec<String>),

    #[error("constant symbol `{0}` cannot be bound by a quantifier")]
    BoundConstant(String),

    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),

    #[error("relativization needs at least one variable or constant")]
    EmptyRelativization,

    #[error("relativization variable `{0}` is not fresh")]
    VariableNotFresh(String),

    #[error("prefix does not start with an existential block")]
    NotExistential,

    #[error("core undefined for non-members: the structure does not model the theory")]
    CoreUndefined,

    #[error("empty substructure universe")]
    EmptySubstructure,

    #[error("`{0}` is not a substructure of `{1}`")]
    NotASubstructure(String, String),

    #[error("a covered extension needs a non-empty collection")]
    EmptyCollection,

    #[error("structure `{0}` has {1} elements; subset search supports at most 63")]
    TooLarge(String, usize),

    #[error("search space for universe size {0} is too large to index")]
    SearchSpaceTooLarge(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
