//! Decision procedures for cores, covers, bounded preservation searches,
//! bounded equivalence and existential closure.

mod cores;
mod covers;
mod ec;
mod search;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

pub use cores::{is_core, minimal_cores, witness_sets_are_cores};
pub use covers::{is_k_ary_covered_extension, pce_counterexample_at};
pub use ec::{ec_formula_oracle, is_existentially_closed_in};
pub use search::{
    bounded_equiv, duality_check, pce_counterexample_search, psc_counterexample_search,
};

use crate::error::{Error, Result};
use crate::eval::CompiledTheory;
use crate::logic::FiniteStructure;

/// Element sets are reported as sorted name lists.
pub type ElementSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoreReport {
    pub structure: String,
    pub theory: Vec<String>,
    pub k: usize,
    pub cores: Vec<ElementSet>,
    pub minimal_cores: Vec<ElementSet>,
    /// The structure models the theory and has no core of size at most `k`.
    pub is_psc_witness_failure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub structure: String,
    pub sentence: String,
    pub k: usize,
    /// Universes of the cover members; `None` when the structure admits no cover.
    pub cover: Option<Vec<ElementSet>>,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Psc,
    Pce,
    Duality,
    Equiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Found,
    NoneUpTo { bound: usize },
    /// The time budget ran out; every size up to `completed_size` was searched.
    BudgetExhausted { completed_size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub query: QueryKind,
    pub params: Vec<(String, String)>,
    pub outcome: Outcome,
    pub witness: Option<FiniteStructure>,
    pub cover: Option<Vec<ElementSet>>,
    pub cores: Option<Vec<ElementSet>>,
    pub elapsed_ms: Option<u64>,
}

impl CounterexampleReport {
    pub fn found(&self) -> bool {
        self.outcome == Outcome::Found
    }

    pub fn search_complete(&self) -> bool {
        !matches!(self.outcome, Outcome::BudgetExhausted { .. })
    }
}

pub(crate) fn names(m: &FiniteStructure, idx: &[usize]) -> ElementSet {
    idx.iter().map(|&i| m.element(i).to_string()).collect()
}

pub(crate) fn indices(m: &FiniteStructure, set: &ElementSet) -> Result<Vec<usize>> {
    set.iter()
        .map(|e| m.element_index(e).ok_or_else(|| Error::UnknownElement(e.clone())))
        .collect()
}

pub(crate) fn mask(idx: &[usize]) -> u64 {
    idx.iter().fold(0, |acc, &i| acc | (1 << i))
}

/// Memoized truth of a theory in the induced substructures of one structure.
pub(crate) struct SubTruth<'a> {
    m: &'a FiniteStructure,
    theory: &'a CompiledTheory,
    memo: HashMap<u64, bool>,
}

impl<'a> SubTruth<'a> {
    pub(crate) fn new(m: &'a FiniteStructure, theory: &'a CompiledTheory) -> Result<Self> {
        if m.size() > 63 {
            return Err(Error::TooLarge(m.name().to_string(), m.size()));
        }
        Ok(Self {
            m,
            theory,
            memo: HashMap::new(),
        })
    }

    /// Truth in the substructure on `x`, a sorted set containing every constant.
    pub(crate) fn holds(&mut self, x: &[usize]) -> bool {
        let (m, theory) = (self.m, self.theory);
        *self
            .memo
            .entry(mask(x))
            .or_insert_with(|| theory.holds_on(m, x))
    }

    /// `c ∪ constants`, sorted.
    pub(crate) fn closure(&self, c: &[usize]) -> Vec<usize> {
        let mut req: Vec<usize> = c.iter().chain(self.m.constant_elements()).copied().collect();
        req.sort_unstable();
        req.dedup();
        req
    }

    /// Every substructure containing `c` models the theory.
    pub(crate) fn all_supersets_hold(&mut self, c: &[usize]) -> bool {
        let req = self.closure(c);
        let n = self.m.size();
        crate::substructure::supersets_in_order(n, req).all(|x| self.holds(&x))
    }

    /// The first substructure universe containing `a`, in enumeration order, that models the theory.
    pub(crate) fn first_model_above(&mut self, a: &[usize]) -> Option<Vec<usize>> {
        let req = self.closure(a);
        let n = self.m.size();
        crate::substructure::supersets_in_order(n, req).find(|x| self.holds(x))
    }
}
