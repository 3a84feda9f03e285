//! Induced substructures, ordered subset enumeration and exhaustive structure
//! generation.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::logic::{table_len, tuple_index, FiniteStructure, Vocabulary};
use crate::par::ExecMode;

/// Largest universe the structure enumerator supports; element names `e0..e9`
/// then sort in index order.
pub const MAX_ENUMERATION_SIZE: usize = 10;

/// Induced substructure on `x` together with every constant interpretation.
pub fn induced_substructure(m: &FiniteStructure, x: &BTreeSet<String>) -> Result<FiniteStructure> {
    let mut idx = Vec::with_capacity(x.len());
    for e in x {
        idx.push(
            m.element_index(e)
                .ok_or_else(|| Error::UnknownElement(e.clone()))?,
        );
    }
    idx.extend_from_slice(m.constant_elements());
    idx.sort_unstable();
    idx.dedup();
    if idx.is_empty() {
        return Err(Error::EmptySubstructure);
    }
    Ok(induced_on(m, &idx))
}

/// Induced substructure on sorted, constant-closed element indices.
pub(crate) fn induced_on(m: &FiniteStructure, idx: &[usize]) -> FiniteStructure {
    let n = m.size();
    let k = idx.len();
    let tables = m
        .vocab()
        .relations()
        .iter()
        .enumerate()
        .map(|(r, sym)| {
            let len = table_len(k, sym.arity).expect("sub-table fits when the table does");
            let src = m.table(r);
            let mut out = vec![false; len];
            let mut t = vec![0usize; sym.arity];
            let mut orig = vec![0usize; sym.arity];
            for (pos, slot) in out.iter_mut().enumerate() {
                let mut rest = pos;
                for i in (0..sym.arity).rev() {
                    t[i] = rest % k;
                    rest /= k;
                    orig[i] = idx[t[i]];
                }
                *slot = src[tuple_index(n, &orig)];
            }
            out
        })
        .collect();
    let constants = m
        .constant_elements()
        .iter()
        .map(|c| idx.binary_search(c).expect("constants are included"))
        .collect();
    FiniteStructure::from_dense(
        m.name().to_string(),
        m.vocab_arc().clone(),
        idx.iter().map(|&i| m.element(i).to_string()).collect(),
        tables,
        constants,
    )
}

/// Sorted index sets `required ⊆ X ⊆ 0..n`, by size ascending then
/// lexicographically; the empty set is skipped.
pub(crate) fn supersets_in_order(n: usize, required: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let free: Vec<usize> = (0..n).filter(|i| !required.contains(i)).collect();
    let free_len = free.len();
    (0..=free_len).flat_map(move |extra| {
        let required = required.clone();
        free.clone().into_iter().combinations(extra).filter_map(move |pick| {
            let mut x: Vec<usize> = required.iter().copied().chain(pick).collect();
            x.sort_unstable();
            (!x.is_empty()).then_some(x)
        })
    })
}

/// Every subset of `0..n` of size at most `k`, by size then lexicographically.
pub(crate) fn subsets_up_to(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |s| (0..n).combinations(s))
}

/// Element sets `X` with `must_contain ∪ constants ⊆ X`, in enumeration order.
pub fn substructure_universes<'a>(
    m: &'a FiniteStructure,
    must_contain: &BTreeSet<String>,
) -> Result<impl Iterator<Item = BTreeSet<String>> + 'a> {
    let mut required = Vec::new();
    for e in must_contain {
        required.push(
            m.element_index(e)
                .ok_or_else(|| Error::UnknownElement(e.clone()))?,
        );
    }
    required.extend_from_slice(m.constant_elements());
    required.sort_unstable();
    required.dedup();
    let free: Vec<usize> = (0..m.size()).filter(|i| required.binary_search(i).is_err()).collect();
    let iter = (0..=free.len()).flat_map(move |extra| {
        let required = required.clone();
        free.clone().into_iter().combinations(extra).filter_map(move |pick| {
            let x: BTreeSet<String> = required
                .iter()
                .chain(&pick)
                .map(|&i| m.element(i).to_string())
                .collect();
            (!x.is_empty()).then_some(x)
        })
    });
    Ok(iter)
}

/// `n ⊆ m` as an induced substructure with agreeing constants.
pub fn is_substructure(n: &FiniteStructure, m: &FiniteStructure) -> Result<bool> {
    if !n.vocab().same_symbols(m.vocab()) {
        return Err(Error::VocabularyMismatch(format!(
            "`{}` and `{}` have different vocabularies",
            n.name(),
            m.name()
        )));
    }
    let mut idx = Vec::with_capacity(n.size());
    for e in n.universe() {
        match m.element_index(e) {
            Some(i) => idx.push(i),
            None => return Ok(false),
        }
    }
    if m.constant_elements().iter().any(|c| idx.binary_search(c).is_err()) {
        return Ok(false);
    }
    Ok(&induced_on(m, &idx) == n)
}

/// Limits for exhaustive searches.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    pub max_universe_size: usize,
    pub max_seconds: Option<f64>,
    pub dedup_isomorphic: bool,
    pub exec: ExecMode,
}

impl SearchBudget {
    pub fn new(max_universe_size: usize) -> Self {
        Self {
            max_universe_size,
            max_seconds: None,
            dedup_isomorphic: true,
            exec: ExecMode::default(),
        }
    }

    pub fn with_dedup(mut self, dedup: bool) -> Self {
        self.dedup_isomorphic = dedup;
        self
    }

    pub fn with_seconds(mut self, seconds: Option<f64>) -> Self {
        self.max_seconds = seconds;
        self
    }

    pub fn with_exec(mut self, exec: ExecMode) -> Self {
        self.exec = exec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_universe_size == 0 {
            return Err(Error::InvalidParams("max universe size must be at least 1".into()));
        }
        if self.max_universe_size > MAX_ENUMERATION_SIZE {
            return Err(Error::InvalidParams(format!(
                "max universe size is capped at {MAX_ENUMERATION_SIZE}"
            )));
        }
        if self.max_seconds.is_some_and(|s| s.is_nan() || s < 0.0) {
            return Err(Error::InvalidParams("time budget must be non-negative".into()));
        }
        Ok(())
    }
}

/// All structures of one universe size, addressed by index.
///
/// An index is a mixed-radix number whose digits, most significant first, are
/// the relation-table bits in vocabulary order followed by the constant values.
#[derive(Debug, Clone)]
pub struct StructureSpace {
    vocab: Arc<Vocabulary>,
    size: usize,
    universe: Vec<String>,
    table_lens: Vec<usize>,
    radices: Vec<u64>,
    count: u64,
    permutations: Vec<Vec<usize>>,
}

impl StructureSpace {
    pub fn new(vocab: Arc<Vocabulary>, size: usize) -> Result<Self> {
        if size == 0 || size > MAX_ENUMERATION_SIZE {
            return Err(Error::SearchSpaceTooLarge(size));
        }
        let mut table_lens = Vec::new();
        let mut radices = Vec::new();
        for r in vocab.relations() {
            let len = table_len(size, r.arity).ok_or(Error::SearchSpaceTooLarge(size))?;
            table_lens.push(len);
            radices.extend(std::iter::repeat_n(2, len));
        }
        radices.extend(std::iter::repeat_n(size as u64, vocab.constants().len()));
        let count = radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r))
            .filter(|&c| c <= 1 << 62)
            .ok_or(Error::SearchSpaceTooLarge(size))?;
        Ok(Self {
            vocab,
            size,
            universe: (0..size).map(|i| format!("e{i}")).collect(),
            table_lens,
            radices,
            count,
            permutations: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of labeled structures of this size.
    pub fn count(&self) -> u64 {
        self.count
    }

    fn digits(&self, mut index: u64) -> Vec<u64> {
        let mut d = vec![0; self.radices.len()];
        for (slot, &r) in d.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        d
    }

    pub fn structure_at(&self, index: u64) -> FiniteStructure {
        assert!(index < self.count, "index out of range");
        let d = self.digits(index);
        let mut pos = 0;
        let tables = self
            .table_lens
            .iter()
            .map(|&len| {
                let t = d[pos..pos + len].iter().map(|&b| b == 1).collect();
                pos += len;
                t
            })
            .collect();
        let constants = d[pos..].iter().map(|&c| c as usize).collect();
        FiniteStructure::from_dense(
            format!("s{}_{}", self.size, index),
            self.vocab.clone(),
            self.universe.clone(),
            tables,
            constants,
        )
    }

    /// Precomputes the permutation group used by [`Self::is_canonical`].
    pub fn with_permutations(mut self) -> Self {
        self.permutations = (0..self.size).permutations(self.size).skip(1).collect();
        self
    }

    /// Whether `index` is the least index in its isomorphism class.
    pub fn is_canonical(&self, index: u64) -> bool {
        let d = self.digits(index);
        let perms: Vec<Vec<usize>>;
        let perms = if self.permutations.is_empty() && self.size > 1 {
            perms = (0..self.size).permutations(self.size).skip(1).collect();
            &perms
        } else {
            &self.permutations
        };
        perms.iter().all(|p| !self.image_is_smaller(&d, p))
    }

    // Compares the digit string of the image under `p` with `d`, stopping at
    // the first difference.
    fn image_is_smaller(&self, d: &[u64], p: &[usize]) -> bool {
        let n = self.size;
        let mut inv = vec![0; n];
        for (i, &pi) in p.iter().enumerate() {
            inv[pi] = i;
        }
        let mut base = 0;
        let mut t = Vec::new();
        for (r, sym) in self.vocab.relations().iter().enumerate() {
            let len = self.table_lens[r];
            t.resize(sym.arity, 0);
            for pos in 0..len {
                // The image holds at tuple `pos` iff the original holds at its preimage.
                let mut rest = pos;
                for i in (0..sym.arity).rev() {
                    t[i] = inv[rest % n];
                    rest /= n;
                }
                let image = d[base + tuple_index(n, &t)];
                let own = d[base + pos];
                if image != own {
                    return image < own;
                }
            }
            base += len;
        }
        for &c in &d[base..] {
            let image = p[c as usize] as u64;
            if image != c {
                return image < c;
            }
        }
        false
    }
}

/// Lazily yields every structure within the budget, in canonical order.
pub struct StructureEnumerator {
    spaces: Vec<StructureSpace>,
    space: usize,
    next: u64,
    dedup: bool,
    deadline: crate::par::Deadline,
    exhausted: bool,
}

impl StructureEnumerator {
    /// True once iteration stopped early because the time budget ran out.
    pub fn budget_exhausted(&self) -> bool {
        self.exhausted
    }
}

impl Iterator for StructureEnumerator {
    type Item = FiniteStructure;

    fn next(&mut self) -> Option<FiniteStructure> {
        while let Some(space) = self.spaces.get(self.space) {
            if self.next >= space.count() {
                self.space += 1;
                self.next = 0;
                continue;
            }
            if self.deadline.passed() {
                self.exhausted = true;
                self.spaces.clear();
                return None;
            }
            let i = self.next;
            self.next += 1;
            if !self.dedup || space.is_canonical(i) {
                return Some(space.structure_at(i));
            }
        }
        None
    }
}

pub fn enumerate_structures(vocab: Arc<Vocabulary>, budget: &SearchBudget) -> Result<StructureEnumerator> {
    budget.validate()?;
    let spaces = (1..=budget.max_universe_size)
        .map(|s| {
            let space = StructureSpace::new(vocab.clone(), s)?;
            Ok(if budget.dedup_isomorphic { space.with_permutations() } else { space })
        })
        .collect::<Result<_>>()?;
    Ok(StructureEnumerator {
        spaces,
        space: 0,
        next: 0,
        dedup: budget.dedup_isomorphic,
        deadline: crate::par::Deadline::after(budget.max_seconds),
        exhausted: false,
    })
}
