//! Concrete syntax for formulas, theories, vocabularies and structure files.

mod lexer;
mod parser;
mod printer;

pub use lexer::SourceSpan;
pub use parser::{
    parse_formula, parse_formula_unchecked, parse_structures, parse_theory, parse_vocabulary,
    ParseError,
};
pub use printer::{print_formula, print_structure, print_structure_file};
