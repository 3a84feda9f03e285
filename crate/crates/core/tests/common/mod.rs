#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use preslab::logic::{FiniteStructure, Formula, Term, Vocabulary};
use preslab::substructure::enumerate_structures;
use preslab::SearchBudget;

pub fn graph() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::graph())
}

pub fn digraphs(max: usize, dedup: bool) -> Vec<FiniteStructure> {
    enumerate_structures(graph(), &SearchBudget::new(max).with_dedup(dedup))
        .unwrap()
        .collect()
}

/// Evaluation by substitution: a quantified variable is replaced by each
/// element in turn (written as a `#name` constant) and the body re-evaluated.
pub fn eval_by_substitution(m: &FiniteStructure, f: &Formula) -> bool {
    let element = |t: &Term| -> usize {
        match t {
            Term::Const(c) if c.starts_with('#') => m.element_index(&c[1..]).unwrap(),
            Term::Const(c) => m.element_index(m.constant_by_name(c).unwrap()).unwrap(),
            Term::Var(v) => panic!("free variable {v}"),
        }
    };
    match f {
        Formula::Atom(r, args) => {
            let rel = m.vocab().relation_index(r).unwrap();
            let t: Vec<usize> = args.iter().map(element).collect();
            m.tuples(rel).contains(&t)
        }
        Formula::Eq(a, b) => element(a) == element(b),
        Formula::Not(g) => !eval_by_substitution(m, g),
        Formula::And(a, b) => eval_by_substitution(m, a) && eval_by_substitution(m, b),
        Formula::Or(a, b) => eval_by_substitution(m, a) || eval_by_substitution(m, b),
        Formula::Implies(a, b) => !eval_by_substitution(m, a) || eval_by_substitution(m, b),
        Formula::Iff(a, b) => eval_by_substitution(m, a) == eval_by_substitution(m, b),
        Formula::Forall(x, g) => m
            .universe()
            .iter()
            .all(|e| eval_by_substitution(m, &substitute(g, x, &format!("#{e}")))),
        Formula::Exists(x, g) => m
            .universe()
            .iter()
            .any(|e| eval_by_substitution(m, &substitute(g, x, &format!("#{e}")))),
    }
}

/// Replaces free occurrences of variable `x` by the constant `c`.
pub fn substitute(f: &Formula, x: &str, c: &str) -> Formula {
    let term = |t: &Term| match t {
        Term::Var(v) if v == x => Term::Const(c.to_string()),
        other => other.clone(),
    };
    let go = |g: &Formula| Box::new(substitute(g, x, c));
    match f {
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(term).collect()),
        Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
        Formula::Not(g) => Formula::Not(go(g)),
        Formula::And(a, b) => Formula::And(go(a), go(b)),
        Formula::Or(a, b) => Formula::Or(go(a), go(b)),
        Formula::Implies(a, b) => Formula::Implies(go(a), go(b)),
        Formula::Iff(a, b) => Formula::Iff(go(a), go(b)),
        Formula::Forall(v, _) | Formula::Exists(v, _) if v == x => f.clone(),
        Formula::Forall(v, g) => Formula::Forall(v.clone(), go(g)),
        Formula::Exists(v, g) => Formula::Exists(v.clone(), go(g)),
    }
}

/// Brute-force isomorphism test by trying every bijection.
pub fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    if a.size() != b.size() || !a.vocab().same_symbols(b.vocab()) {
        return false;
    }
    let n = a.size();
    let rels = a.vocab().relations().len();
    (0..n).permutations(n).any(|p| {
        let consts_ok = a
            .constant_elements()
            .iter()
            .zip(b.constant_elements())
            .all(|(&x, &y)| p[x] == y);
        consts_ok
            && (0..rels).all(|r| {
                let mut image: Vec<Vec<usize>> = a
                    .tuples(r)
                    .into_iter()
                    .map(|t| t.into_iter().map(|i| p[i]).collect())
                    .collect();
                image.sort();
                image == b.tuples(r)
            })
    })
}

/// Element names to indices, for building assignments by hand.
pub fn index_map(m: &FiniteStructure) -> BTreeMap<String, usize> {
    m.universe().iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
}
