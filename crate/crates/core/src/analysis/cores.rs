use crate::error::{Error, Result};
use crate::eval::{witness_indices, CompiledTheory};
use crate::logic::{FiniteStructure, Theory};
use crate::normal::PrenexForm;
use crate::substructure::subsets_up_to;

use super::{indices, mask, names, CoreReport, ElementSet, SubTruth};

fn compile_member(m: &FiniteStructure, s: &Theory) -> Result<CompiledTheory> {
    let t = CompiledTheory::compile(s, m.vocab())?;
    if !t.holds(m) {
        return Err(Error::CoreUndefined);
    }
    Ok(t)
}

/// Whether every substructure of `m` containing `c` (and the constants) models `s`.
pub fn is_core(m: &FiniteStructure, c: &ElementSet, s: &Theory) -> Result<bool> {
    let idx = indices(m, c)?;
    let t = compile_member(m, s)?;
    Ok(SubTruth::new(m, &t)?.all_supersets_hold(&idx))
}

/// All cores of size at most `k_max`, by size then lexicographically, and the
/// inclusion-minimal ones among them.
pub fn minimal_cores(m: &FiniteStructure, s: &Theory, k_max: usize) -> Result<CoreReport> {
    let t = compile_member(m, s)?;
    let mut truth = SubTruth::new(m, &t)?;
    let cores: Vec<Vec<usize>> = subsets_up_to(m.size(), k_max)
        .filter(|c| truth.all_supersets_hold(c))
        .collect();
    // Smaller sets come first, so a proper sub-core is always already listed.
    let mut minimal: Vec<u64> = Vec::new();
    let mut minimal_cores = Vec::new();
    for c in &cores {
        let cm = mask(c);
        if minimal.iter().all(|&p| p & cm != p) {
            minimal.push(cm);
            minimal_cores.push(names(m, c));
        }
    }
    Ok(CoreReport {
        structure: m.name().to_string(),
        theory: s.sentences().iter().map(ToString::to_string).collect(),
        k: k_max,
        is_psc_witness_failure: cores.is_empty(),
        cores: cores.iter().map(|c| names(m, c)).collect(),
        minimal_cores,
    })
}

/// Whether `m` (a model of `t`) has some core of size at most `k`. Cores are
/// upward closed, so only sets of size `min(k, |m|)` need checking.
pub(crate) fn has_small_core(truth: &mut SubTruth<'_>, n: usize, k: usize) -> bool {
    let size = k.min(n);
    subsets_up_to(n, size)
        .filter(|c| c.len() == size)
        .any(|c| truth.all_supersets_hold(&c))
}

/// Checks that the element set of every witness of the leading existential
/// block of `pf` is a core of `m` with respect to `pf`.
pub fn witness_sets_are_cores(m: &FiniteStructure, pf: &PrenexForm) -> Result<bool> {
    let theory = Theory::single(pf.to_formula())?;
    let t = compile_member(m, &theory)?;
    let mut truth = SubTruth::new(m, &t)?;
    let mut sets: Vec<Vec<usize>> = witness_indices(m, pf)?
        .into_iter()
        .map(|mut w| {
            w.sort_unstable();
            w.dedup();
            w
        })
        .collect();
    sets.sort();
    sets.dedup();
    Ok(sets.iter().all(|w| truth.all_supersets_hold(w)))
}
