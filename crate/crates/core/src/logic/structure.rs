use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::vocabulary::{is_identifier, Vocabulary};
use crate::error::{Error, Result};

/// Dense tables larger than this many entries are refused.
const MAX_TABLE_ENTRIES: usize = 1 << 24;

/// A single broken structure invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    EmptyUniverse,
    InvalidElementName(String),
    DuplicateElement(String),
    UnknownRelation(String),
    DuplicateRelationTable(String),
    ArityMismatch { relation: String, tuple: Vec<String> },
    UnknownElement { symbol: String, element: String },
    UnknownConstant(String),
    DuplicateConstant(String),
    UninterpretedConstant(String),
    TableTooLarge(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyUniverse => write!(f, "empty universe"),
            Violation::InvalidElementName(e) => write!(f, "invalid element name `{e}`"),
            Violation::DuplicateElement(e) => write!(f, "duplicate element `{e}`"),
            Violation::UnknownRelation(r) => write!(f, "unknown relation `{r}`"),
            Violation::DuplicateRelationTable(r) => write!(f, "relation `{r}` interpreted twice"),
            Violation::ArityMismatch { relation, tuple } => {
                write!(f, "arity mismatch for {relation}: ({})", tuple.join(","))
            }
            Violation::UnknownElement { symbol, element } => {
                write!(f, "`{element}` used by {symbol} is not in the universe")
            }
            Violation::UnknownConstant(c) => write!(f, "unknown constant `{c}`"),
            Violation::DuplicateConstant(c) => write!(f, "constant `{c}` interpreted twice"),
            Violation::UninterpretedConstant(c) => write!(f, "uninterpreted constant `{c}`"),
            Violation::TableTooLarge(r) => write!(f, "table for `{r}` is too large"),
        }
    }
}

/// Unchecked, name-based description of a structure. [`StructureDraft::build`]
/// validates it into a [`FiniteStructure`].
#[derive(Debug, Clone)]
pub struct StructureDraft {
    pub name: String,
    pub vocab: Arc<Vocabulary>,
    pub universe: Vec<String>,
    pub tables: Vec<(String, Vec<Vec<String>>)>,
    pub constants: Vec<(String, String)>,
}

impl StructureDraft {
    pub fn new(name: impl Into<String>, vocab: Arc<Vocabulary>) -> Self {
        Self {
            name: name.into(),
            vocab,
            universe: Vec::new(),
            tables: Vec::new(),
            constants: Vec::new(),
        }
    }

    pub fn elements<I, S>(mut self, elements: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.universe.extend(elements.into_iter().map(Into::into));
        self
    }

    pub fn relation<I, T, S>(mut self, name: impl Into<String>, tuples: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tuples = tuples
            .into_iter()
            .map(|t| t.into_iter().map(Into::into).collect())
            .collect();
        self.tables.push((name.into(), tuples));
        self
    }

    pub fn constant(mut self, name: impl Into<String>, element: impl Into<String>) -> Self {
        self.constants.push((name.into(), element.into()));
        self
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.universe.is_empty() {
            out.push(Violation::EmptyUniverse);
        }
        let mut elements = BTreeSet::new();
        for e in &self.universe {
            if !is_identifier(e) {
                out.push(Violation::InvalidElementName(e.clone()));
            }
            if !elements.insert(e.as_str()) {
                out.push(Violation::DuplicateElement(e.clone()));
            }
        }

        let mut seen_tables = BTreeSet::new();
        for (name, tuples) in &self.tables {
            let Some(index) = self.vocab.relation_index(name) else {
                out.push(Violation::UnknownRelation(name.clone()));
                continue;
            };
            if !seen_tables.insert(name.as_str()) {
                out.push(Violation::DuplicateRelationTable(name.clone()));
            }
            let arity = self.vocab.relations()[index].arity;
            if table_len(elements.len(), arity).is_none() {
                out.push(Violation::TableTooLarge(name.clone()));
            }
            for tuple in tuples {
                if tuple.len() != arity {
                    out.push(Violation::ArityMismatch {
                        relation: name.clone(),
                        tuple: tuple.clone(),
                    });
                    continue;
                }
                for e in tuple {
                    if !elements.contains(e.as_str()) {
                        out.push(Violation::UnknownElement {
                            symbol: name.clone(),
                            element: e.clone(),
                        });
                    }
                }
            }
        }

        let mut seen_constants = BTreeSet::new();
        for (c, e) in &self.constants {
            if self.vocab.constant_index(c).is_none() {
                out.push(Violation::UnknownConstant(c.clone()));
                continue;
            }
            if !seen_constants.insert(c.as_str()) {
                out.push(Violation::DuplicateConstant(c.clone()));
            }
            if !elements.contains(e.as_str()) {
                out.push(Violation::UnknownElement {
                    symbol: c.clone(),
                    element: e.clone(),
                });
            }
        }
        for c in self.vocab.constants() {
            if !seen_constants.contains(c.as_str()) {
                out.push(Violation::UninterpretedConstant(c.clone()));
            }
        }
        out
    }

    pub fn build(self) -> Result<FiniteStructure> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidStructure(violations));
        }
        let mut universe = self.universe;
        universe.sort();
        let n = universe.len();
        let index = |e: &str| universe.binary_search_by(|u| u.as_str().cmp(e)).unwrap();

        let mut tables: Vec<Vec<bool>> = self
            .vocab
            .relations()
            .iter()
            .map(|r| vec![false; table_len(n, r.arity).unwrap()])
            .collect();
        for (name, tuples) in &self.tables {
            let r = self.vocab.relation_index(name).unwrap();
            for tuple in tuples {
                let idx: Vec<usize> = tuple.iter().map(|e| index(e)).collect();
                tables[r][tuple_index(n, &idx)] = true;
            }
        }
        let mut constants = vec![0; self.vocab.constants().len()];
        for (c, e) in &self.constants {
            constants[self.vocab.constant_index(c).unwrap()] = index(e);
        }
        Ok(FiniteStructure {
            name: self.name,
            vocab: self.vocab,
            universe,
            tables,
            constants,
        })
    }
}

pub(crate) fn table_len(n: usize, arity: usize) -> Option<usize> {
    let len = n.checked_pow(u32::try_from(arity).ok()?)?;
    (len <= MAX_TABLE_ENTRIES).then_some(len)
}

/// Row-major position of a tuple in a dense table over `n` elements.
pub(crate) fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &t| acc * n + t)
}

/// A validated finite structure. Elements are kept in lexicographic order and
/// addressed by their position in that order.
///
/// Equality ignores the structure's name.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    name: String,
    vocab: Arc<Vocabulary>,
    universe: Vec<String>,
    tables: Vec<Vec<bool>>,
    constants: Vec<usize>,
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.vocab.same_symbols(&other.vocab)
            && self.universe == other.universe
            && self.tables == other.tables
            && self.constants == other.constants
    }
}

impl Eq for FiniteStructure {}

impl FiniteStructure {
    /// Assembles a structure from dense parts that are already known to be valid.
    pub(crate) fn from_dense(
        name: String,
        vocab: Arc<Vocabulary>,
        universe: Vec<String>,
        tables: Vec<Vec<bool>>,
        constants: Vec<usize>,
    ) -> Self {
        debug_assert!(!universe.is_empty());
        debug_assert!(universe.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(tables.len(), vocab.relations().len());
        debug_assert_eq!(constants.len(), vocab.constants().len());
        Self {
            name,
            vocab,
            universe,
            tables,
            constants,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vocab_arc(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.universe.binary_search_by(|u| u.as_str().cmp(name)).ok()
    }

    pub fn element(&self, index: usize) -> &str {
        &self.universe[index]
    }

    pub(crate) fn table(&self, relation: usize) -> &[bool] {
        &self.tables[relation]
    }

    /// Whether the tuple (of element indices) belongs to relation `relation`.
    #[inline]
    pub fn holds(&self, relation: usize, tuple: &[usize]) -> bool {
        self.tables[relation][tuple_index(self.size(), tuple)]
    }

    /// Tuples of a relation in lexicographic order, as element indices.
    pub fn tuples(&self, relation: usize) -> Vec<Vec<usize>> {
        let n = self.size();
        let arity = self.vocab.relations()[relation].arity;
        self.tables[relation]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(mut i, _)| {
                let mut t = vec![0; arity];
                for slot in t.iter_mut().rev() {
                    *slot = i % n;
                    i /= n;
                }
                t
            })
            .collect()
    }

    /// Element index interpreting constant number `constant`.
    pub fn constant(&self, constant: usize) -> usize {
        self.constants[constant]
    }

    pub fn constant_elements(&self) -> &[usize] {
        &self.constants
    }

    pub fn constant_by_name(&self, name: &str) -> Option<&str> {
        self.vocab
            .constant_index(name)
            .map(|c| self.universe[self.constants[c]].as_str())
    }

    /// Converts back into a draft with named tuples.
    pub fn to_draft(&self) -> StructureDraft {
        let tables = self
            .vocab
            .relations()
            .iter()
            .enumerate()
            .map(|(r, sym)| {
                let tuples = self
                    .tuples(r)
                    .into_iter()
                    .map(|t| t.into_iter().map(|i| self.universe[i].clone()).collect())
                    .collect();
                (sym.name.clone(), tuples)
            })
            .collect();
        let constants = self
            .vocab
            .constants()
            .iter()
            .zip(&self.constants)
            .map(|(c, &e)| (c.clone(), self.universe[e].clone()))
            .collect();
        StructureDraft {
            name: self.name.clone(),
            vocab: self.vocab.clone(),
            universe: self.universe.clone(),
            tables,
            constants,
        }
    }

    /// Interprets fresh constants `c1..cr` as the given elements.
    ///
    /// Fresh names that collide with an existing symbol get primes appended.
    pub fn expand_with_parameters(&self, elements: &[&str]) -> Result<FiniteStructure> {
        if elements.is_empty() {
            return Ok(self.clone());
        }
        let mut indices = Vec::with_capacity(elements.len());
        for e in elements {
            indices.push(
                self.element_index(e)
                    .ok_or_else(|| Error::UnknownElement(e.to_string()))?,
            );
        }
        let mut fresh: Vec<String> = Vec::with_capacity(elements.len());
        for i in 1..=elements.len() {
            let mut name = format!("c{i}");
            while self.vocab.has_symbol(&name) || fresh.contains(&name) {
                name.push('\'');
            }
            fresh.push(name);
        }
        let vocab = self
            .vocab
            .with_constants(format!("{}_p{}", self.vocab.name(), elements.len()), &fresh)?;
        let mut constants = self.constants.clone();
        constants.extend(indices);
        Ok(FiniteStructure {
            name: self.name.clone(),
            vocab: Arc::new(vocab),
            universe: self.universe.clone(),
            tables: self.tables.clone(),
            constants,
        })
    }

    /// Restricts to a sub-vocabulary that keeps every relation and a subset of the constants.
    pub fn reduct(&self, target: Arc<Vocabulary>) -> Result<FiniteStructure> {
        if target.relations() != self.vocab.relations() {
            return Err(Error::VocabularyMismatch(
                "reduct must keep the relation symbols".into(),
            ));
        }
        let mut constants = Vec::with_capacity(target.constants().len());
        for c in target.constants() {
            let i = self
                .vocab
                .constant_index(c)
                .ok_or_else(|| Error::UnknownConstant(c.clone()))?;
            constants.push(self.constants[i]);
        }
        Ok(FiniteStructure {
            name: self.name.clone(),
            vocab: target,
            universe: self.universe.clone(),
            tables: self.tables.clone(),
            constants,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> FiniteStructure {
        StructureDraft::new("C3", Arc::new(Vocabulary::graph()))
            .elements(["a", "b", "c"])
            .relation("E", [["a", "b"], ["b", "c"], ["c", "a"]])
            .build()
            .unwrap()
    }

    #[test]
    fn c3_is_valid() {
        let s = c3();
        assert_eq!(s.size(), 3);
        assert_eq!(s.tuples(0), vec![vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert!(s.to_draft().validate().is_empty());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let v = StructureDraft::new("bad", Arc::new(Vocabulary::graph()))
            .elements(["a", "b", "c"])
            .relation("E", [vec!["a", "b", "c"]])
            .validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].to_string().starts_with("arity mismatch for E"));
    }

    #[test]
    fn empty_universe_is_reported() {
        let v = StructureDraft::new("bad", Arc::new(Vocabulary::graph())).validate();
        assert_eq!(v, vec![Violation::EmptyUniverse]);
        assert_eq!(v[0].to_string(), "empty universe");
    }

    #[test]
    fn missing_constant_is_reported() {
        let vocab = Vocabulary::new("g", [("E".into(), 2)], ["c0".into()]).unwrap();
        let v = StructureDraft::new("s", Arc::new(vocab)).elements(["a"]).validate();
        assert_eq!(v, vec![Violation::UninterpretedConstant("c0".into())]);
    }

    #[test]
    fn expand_with_parameters() {
        let s = c3();
        let e = s.expand_with_parameters(&["a"]).unwrap();
        assert_eq!(e.vocab().constants(), ["c1"]);
        assert_eq!(e.constant_by_name("c1"), Some("a"));

        assert_eq!(s.expand_with_parameters(&[]).unwrap(), s);

        let e = s.expand_with_parameters(&["a", "a"]).unwrap();
        assert_eq!(e.constant_by_name("c1"), Some("a"));
        assert_eq!(e.constant_by_name("c2"), Some("a"));

        assert!(matches!(
            s.expand_with_parameters(&["z"]),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn fresh_constants_skip_collisions() {
        let vocab = Vocabulary::new("g", [("E".into(), 2)], ["c1".into()]).unwrap();
        let s = StructureDraft::new("s", Arc::new(vocab))
            .elements(["a", "b"])
            .constant("c1", "b")
            .build()
            .unwrap();
        let e = s.expand_with_parameters(&["a"]).unwrap();
        assert_eq!(e.vocab().constants(), ["c1", "c1'"]);
        assert_eq!(e.constant_by_name("c1'"), Some("a"));
        assert_eq!(e.reduct(s.vocab_arc().clone()).unwrap(), s);
    }
}
