use itertools::Itertools;

use crate::error::{Error, Result};
use crate::eval::models;
use crate::logic::{FiniteStructure, Formula, Quantifier, Term};
use crate::substructure::is_substructure;

fn check_pair(m: &FiniteStructure, r: &FiniteStructure) -> Result<()> {
    if !is_substructure(m, r)? {
        return Err(Error::NotASubstructure(m.name().to_string(), r.name().to_string()));
    }
    if r.size() > 63 {
        return Err(Error::TooLarge(r.name().to_string(), r.size()));
    }
    Ok(())
}

/// Whether `h` (indices of `r` to indices of `m`) preserves every relation in
/// both directions on the listed elements of `r`.
fn is_partial_embedding(r: &FiniteStructure, m: &FiniteStructure, dom: &[usize], h: &[usize]) -> bool {
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for (rel, sym) in r.vocab().relations().iter().enumerate() {
        for t in (0..sym.arity).map(|_| 0..dom.len()).multi_cartesian_product() {
            src.clear();
            dst.clear();
            src.extend(t.iter().map(|&i| dom[i]));
            dst.extend(t.iter().map(|&i| h[i]));
            if r.holds(rel, &src) != m.holds(rel, &dst) {
                return false;
            }
        }
    }
    true
}

/// Decides `m ⪯₁ r` for a finite substructure `m` of `r`: for every
/// constant-closed `A ⊆ m` and every nonempty `B ⊆ r ∖ m`, some injection
/// `B → m ∖ A` extends the identity on `A` to an embedding of `r[A ∪ B]` into `m`.
pub fn is_existentially_closed_in(m: &FiniteStructure, r: &FiniteStructure) -> Result<bool> {
    check_pair(m, r)?;
    // m's element i is r's element in_r[i]
    let in_r: Vec<usize> = m.universe().iter().map(|e| r.element_index(e).unwrap()).collect();
    let outside: Vec<usize> = (0..r.size()).filter(|i| !in_r.contains(i)).collect();
    let consts: Vec<usize> = m.constant_elements().to_vec();
    let optional: Vec<usize> = (0..m.size()).filter(|i| !consts.contains(i)).collect();

    for extra in optional.iter().copied().powerset() {
        let a: Vec<usize> = consts.iter().copied().chain(extra).sorted().dedup().collect();
        let rest: Vec<usize> = (0..m.size()).filter(|i| !a.contains(i)).collect();
        for b in outside.iter().copied().powerset().skip(1) {
            let dom: Vec<usize> = a.iter().map(|&i| in_r[i]).chain(b.iter().copied()).collect();
            let found = rest.iter().copied().permutations(b.len()).any(|g| {
                let h: Vec<usize> = a.iter().copied().chain(g).collect();
                is_partial_embedding(r, m, &dom, &h)
            });
            if !found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The defining condition checked directly: every sentence
/// `∃ȳ δ(ā, ȳ)` with `δ` the complete atomic diagram of `(ā, b̄)` in `r`, for
/// parameters `ā` from `m` (at most `max_params`) and tuples `b̄` of `r` (at
/// most `max_vars`), must hold in `m`. Complete diagrams imply every other
/// quantifier-free formula they satisfy, so on pairs with `|m| ≤ max_params`
/// and `|r ∖ m| ≤ max_vars` this equals `m ⪯₁ r`.
pub fn ec_formula_oracle(
    m: &FiniteStructure,
    r: &FiniteStructure,
    max_params: usize,
    max_vars: usize,
) -> Result<bool> {
    check_pair(m, r)?;
    for p in 0..=max_params {
        for params in (0..p).map(|_| m.universe().iter()).multi_cartesian_product() {
            let params: Vec<&str> = params.into_iter().map(String::as_str).collect();
            let mp = m.expand_with_parameters(&params)?;
            let rp = r.expand_with_parameters(&params)?;
            let consts: Vec<String> = rp.vocab().constants().to_vec();
            for v in 1..=max_vars {
                for b in (0..v).map(|_| 0..r.size()).multi_cartesian_product() {
                    let phi = diagram_sentence(&rp, &consts, &b);
                    debug_assert!(models(&rp, &phi)?);
                    if !models(&mp, &phi)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// ∃y1..yv (complete atomic diagram of constants and b̄ in r)
fn diagram_sentence(r: &FiniteStructure, consts: &[String], b: &[usize]) -> Formula {
    let vars: Vec<String> = (1..=b.len()).map(|i| format!("y{i}")).collect();
    let mut terms: Vec<(Term, usize)> = consts
        .iter()
        .map(|c| (Term::constant(c.clone()), r.element_index(r.constant_by_name(c).unwrap()).unwrap()))
        .collect();
    terms.extend(vars.iter().zip(b).map(|(v, &e)| (Term::var(v.clone()), e)));

    let mut lits = Vec::new();
    for (i, j) in (0..terms.len()).tuple_combinations() {
        let (ti, ei) = &terms[i];
        let (tj, ej) = &terms[j];
        lits.push(if ei == ej {
            Formula::eq(ti.clone(), tj.clone())
        } else {
            Formula::neq(ti.clone(), tj.clone())
        });
    }
    for (rel, sym) in r.vocab().relations().iter().enumerate() {
        for t in (0..sym.arity).map(|_| 0..terms.len()).multi_cartesian_product() {
            let args: Vec<Term> = t.iter().map(|&i| terms[i].0.clone()).collect();
            let elems: Vec<usize> = t.iter().map(|&i| terms[i].1).collect();
            let atom = Formula::atom(sym.name.clone(), args);
            lits.push(if r.holds(rel, &elems) { atom } else { Formula::not(atom) });
        }
    }
    let body = Formula::conjunction(lits).unwrap_or_else(|| Formula::eq(Term::var("y1"), Term::var("y1")));
    Formula::quantify_all(Quantifier::Exists, vars, body)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use super::*;
    use crate::logic::{StructureDraft, Vocabulary};
    use crate::substructure::induced_substructure;

    fn graph(elems: &[&str], edges: &[[&str; 2]]) -> FiniteStructure {
        StructureDraft::new("g", Arc::new(Vocabulary::graph()))
            .elements(elems.iter().copied())
            .relation("E", edges.iter().copied())
            .build()
            .unwrap()
    }

    fn sub(r: &FiniteStructure, xs: &[&str]) -> FiniteStructure {
        let x: BTreeSet<String> = xs.iter().map(|s| s.to_string()).collect();
        induced_substructure(r, &x).unwrap()
    }

    #[test]
    fn reflexive() {
        let r = graph(&["a", "b"], &[["a", "b"]]);
        assert!(is_existentially_closed_in(&r, &r).unwrap());
        assert!(ec_formula_oracle(&r, &r, 2, 2).unwrap());
    }

    #[test]
    fn missing_successor() {
        let r = graph(&["a", "b"], &[["a", "b"]]);
        let m = sub(&r, &["a"]);
        assert!(!is_existentially_closed_in(&m, &r).unwrap());
        assert!(!ec_formula_oracle(&m, &r, 2, 2).unwrap());
    }

    #[test]
    fn isolated_points() {
        // `exists y. y != a` separates them, as does counting elements.
        let r = graph(&["a", "b"], &[]);
        let m = sub(&r, &["a"]);
        assert!(!is_existentially_closed_in(&m, &r).unwrap());
        assert!(!ec_formula_oracle(&m, &r, 2, 2).unwrap());
    }

    #[test]
    fn precondition() {
        let r = graph(&["a", "b"], &[["a", "b"]]);
        let not_sub = graph(&["a"], &[["a", "a"]]);
        assert!(matches!(
            is_existentially_closed_in(&not_sub, &r),
            Err(Error::NotASubstructure(_, _))
        ));
    }
}
