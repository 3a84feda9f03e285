use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A relation symbol with its arity (always at least 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A finite relational vocabulary with constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Vocabulary {
    name: String,
    relations: Vec<RelationSymbol>,
    constants: Vec<String>,
}

const KEYWORDS: [&str; 2] = ["forall", "exists"];

/// `[A-Za-z_][A-Za-z0-9_']*`, excluding the quantifier keywords.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !KEYWORDS.contains(&s)
}

impl Vocabulary {
    pub fn new<R, C>(name: impl Into<String>, relations: R, constants: C) -> Result<Self>
    where
        R: IntoIterator<Item = (String, usize)>,
        C: IntoIterator<Item = String>,
    {
        let name = name.into();
        let relations: Vec<RelationSymbol> = relations
            .into_iter()
            .map(|(name, arity)| RelationSymbol { name, arity })
            .collect();
        let constants: Vec<String> = constants.into_iter().collect();

        let mut seen = BTreeSet::new();
        for symbol in relations.iter().map(|r| &r.name).chain(constants.iter()) {
            if !is_identifier(symbol) {
                return Err(Error::InvalidVocabulary(format!("`{symbol}` is not an identifier")));
            }
            if !seen.insert(symbol.as_str()) {
                return Err(Error::InvalidVocabulary(format!("duplicate symbol `{symbol}`")));
            }
        }
        if let Some(r) = relations.iter().find(|r| r.arity == 0) {
            return Err(Error::InvalidVocabulary(format!(
                "relation `{}` has arity 0",
                r.name
            )));
        }
        Ok(Self {
            name,
            relations,
            constants,
        })
    }

    /// Directed graphs: a single binary relation `E`.
    pub fn graph() -> Self {
        Self::new("graph", [("E".to_string(), 2)], []).expect("valid vocabulary")
    }

    /// No relations and no constants.
    pub fn empty() -> Self {
        Self::new("empty", [], []).expect("valid vocabulary")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.relation_index(name).is_some() || self.constant_index(name).is_some()
    }

    /// Same relation and constant symbols, ignoring the vocabulary's name.
    pub fn same_symbols(&self, other: &Vocabulary) -> bool {
        self.relations == other.relations && self.constants == other.constants
    }

    /// Extends the vocabulary with fresh constants.
    pub fn with_constants(&self, name: impl Into<String>, extra: &[String]) -> Result<Self> {
        Self::new(
            name,
            self.relations.iter().map(|r| (r.name.clone(), r.arity)),
            self.constants.iter().chain(extra).cloned(),
        )
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vocab {} {{", self.name)?;
        for r in &self.relations {
            write!(f, " relation {}/{};", r.name, r.arity)?;
        }
        for c in &self.constants {
            write!(f, " constant {c};")?;
        }
        write!(f, " }}")
    }
}
