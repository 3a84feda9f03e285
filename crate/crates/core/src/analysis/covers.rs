use crate::error::{Error, Result};
use crate::eval::CompiledTheory;
use crate::logic::{FiniteStructure, Formula, Theory};
use crate::substructure::{is_substructure, subsets_up_to};

use super::{mask, names, CoverReport, SubTruth};

/// Whether every member of `r` is a substructure of `m` and every set of at most
/// `k` elements of `m` lies inside some member.
pub fn is_k_ary_covered_extension(m: &FiniteStructure, r: &[FiniteStructure], k: usize) -> Result<bool> {
    if r.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if m.size() > 63 {
        return Err(Error::TooLarge(m.name().to_string(), m.size()));
    }
    let mut members = Vec::with_capacity(r.len());
    for n in r {
        if !is_substructure(n, m)? {
            return Ok(false);
        }
        let idx: Vec<usize> = n
            .universe()
            .iter()
            .map(|e| m.element_index(e).expect("substructure"))
            .collect();
        members.push(mask(&idx));
    }
    // Any smaller set extends to one of size min(k, |m|).
    let size = k.min(m.size());
    Ok(subsets_up_to(m.size(), size)
        .filter(|a| a.len() == size)
        .all(|a| {
            let am = mask(&a);
            members.iter().any(|&u| u & am == am)
        }))
}

/// For every `A` of size at most `k`, the first universe `X ⊇ A ∪ constants`
/// with `m[X]` a model; `None` as soon as some `A` has none. Duplicates are
/// dropped, keeping first occurrences.
pub(crate) fn canonical_cover(truth: &mut SubTruth<'_>, n: usize, k: usize) -> Option<Vec<Vec<usize>>> {
    let mut cover: Vec<Vec<usize>> = Vec::new();
    for a in subsets_up_to(n, k) {
        let x = truth.first_model_above(&a)?;
        if !cover.contains(&x) {
            cover.push(x);
        }
    }
    Some(cover)
}

/// Whether some cover exists; only sets of size `min(k, |m|)` matter.
pub(crate) fn has_cover(truth: &mut SubTruth<'_>, n: usize, k: usize) -> bool {
    let size = k.min(n);
    subsets_up_to(n, size)
        .filter(|a| a.len() == size)
        .all(|a| truth.first_model_above(&a).is_some())
}

/// Looks for a k-ary cover of `m` by induced substructures that model `phi`
/// while `m` itself does not.
///
/// Any such cover may be replaced by one set `N_A ⊇ A` per small set `A`, so a
/// per-set existence search decides the question.
pub fn pce_counterexample_at(phi: &Formula, k: usize, m: &FiniteStructure) -> Result<CoverReport> {
    let theory = Theory::single(phi.clone())?;
    let t = CompiledTheory::compile(&theory, m.vocab())?;
    let cover = if t.holds(m) {
        None
    } else {
        let mut truth = SubTruth::new(m, &t)?;
        canonical_cover(&mut truth, m.size(), k)
            .map(|c| c.iter().map(|x| names(m, x)).collect())
    };
    Ok(CoverReport {
        structure: m.name().to_string(),
        sentence: phi.to_string(),
        k,
        cover,
        complete: true,
    })
}
