//! Normal forms and prefix bookkeeping: negation normal form, prenex form,
//! Σ/Π classification by leading-block size, and relativization to a finite set
//! of variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Formula, Quantifier, Term, Vocabulary};

/// Pushes negations down to atoms and eliminates `->` and `<->`.
pub fn to_nnf(f: &Formula) -> Formula {
    nnf(f, false)
}

fn nnf(f: &Formula, negate: bool) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Eq(..) => {
            if negate {
                Formula::not(f.clone())
            } else {
                f.clone()
            }
        }
        Formula::Not(g) => nnf(g, !negate),
        Formula::And(a, b) if negate => Formula::or(nnf(a, true), nnf(b, true)),
        Formula::And(a, b) => Formula::and(nnf(a, false), nnf(b, false)),
        Formula::Or(a, b) if negate => Formula::and(nnf(a, true), nnf(b, true)),
        Formula::Or(a, b) => Formula::or(nnf(a, false), nnf(b, false)),
        Formula::Implies(a, b) if negate => Formula::and(nnf(a, false), nnf(b, true)),
        Formula::Implies(a, b) => Formula::or(nnf(a, true), nnf(b, false)),
        // a <-> b  ==  (a -> b) & (b -> a)
        Formula::Iff(a, b) if negate => Formula::or(
            Formula::and(nnf(a, false), nnf(b, true)),
            Formula::and(nnf(b, false), nnf(a, true)),
        ),
        Formula::Iff(a, b) => Formula::and(
            Formula::or(nnf(a, true), nnf(b, false)),
            Formula::or(nnf(b, true), nnf(a, false)),
        ),
        Formula::Forall(v, g) => {
            let q = if negate { Quantifier::Exists } else { Quantifier::Forall };
            Formula::quantified(q, v.clone(), nnf(g, negate))
        }
        Formula::Exists(v, g) => {
            let q = if negate { Quantifier::Forall } else { Quantifier::Exists };
            Formula::quantified(q, v.clone(), nnf(g, negate))
        }
    }
}

/// A quantifier prefix over a quantifier-free matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrenexForm {
    prefix: Vec<(Quantifier, String)>,
    matrix: Formula,
}

impl PrenexForm {
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: Formula) -> Result<Self> {
        if !matrix.is_quantifier_free() {
            return Err(Error::InvalidParams("matrix must be quantifier-free".into()));
        }
        let mut seen = BTreeSet::new();
        for (_, v) in &prefix {
            if !seen.insert(v) {
                return Err(Error::InvalidParams(format!("prefix binds `{v}` twice")));
            }
        }
        Ok(Self { prefix, matrix })
    }

    /// Reads a formula that is already in prenex shape.
    pub fn from_formula(f: &Formula) -> Result<Self> {
        let mut prefix = Vec::new();
        let mut cur = f;
        loop {
            match cur {
                Formula::Forall(v, g) => {
                    prefix.push((Quantifier::Forall, v.clone()));
                    cur = g;
                }
                Formula::Exists(v, g) => {
                    prefix.push((Quantifier::Exists, v.clone()));
                    cur = g;
                }
                _ => break,
            }
        }
        Self::new(prefix, cur.clone())
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Formula {
        &self.matrix
    }

    pub fn to_formula(&self) -> Formula {
        self.prefix
            .iter()
            .rev()
            .fold(self.matrix.clone(), |acc, (q, v)| Formula::quantified(*q, v.clone(), acc))
    }

    /// Quantifier and length of the first maximal block, if any.
    pub fn leading_block(&self) -> Option<(Quantifier, usize)> {
        let (q, _) = self.prefix.first()?;
        Some((*q, self.prefix.iter().take_while(|(p, _)| p == q).count()))
    }

    pub fn class(&self) -> PrefixClass {
        let blocks = self
            .prefix
            .iter()
            .map(|(q, _)| *q)
            .fold(Vec::<Quantifier>::new(), |mut acc, q| {
                if acc.last() != Some(&q) {
                    acc.push(q);
                }
                acc
            });
        PrefixClass {
            polarity: self.prefix.first().map(|(q, _)| match q {
                Quantifier::Exists => Polarity::Sigma,
                Quantifier::Forall => Polarity::Pi,
            }),
            n: blocks.len(),
            leading_count: self.leading_block().map_or(0, |(_, k)| k),
        }
    }

    /// Inserts `count` vacuous quantifiers of kind `q` at prefix position `at`,
    /// binding fresh variables `r0, r1, ...`. Truth is unchanged on every
    /// (nonempty) structure.
    pub fn pad_redundant(&self, at: usize, q: Quantifier, count: usize) -> PrenexForm {
        let mut taken = self.to_formula().variables();
        let mut fresh = Vec::with_capacity(count);
        let mut i = 0;
        while fresh.len() < count {
            let name = format!("r{i}");
            if taken.insert(name.clone()) {
                fresh.push((q, name));
            }
            i += 1;
        }
        let at = at.min(self.prefix.len());
        let mut prefix = self.prefix[..at].to_vec();
        prefix.extend(fresh);
        prefix.extend_from_slice(&self.prefix[at..]);
        PrenexForm {
            prefix,
            matrix: self.matrix.clone(),
        }
    }
}

impl fmt::Display for PrenexForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_formula().fmt(f)
    }
}

/// Converts to prenex form. Bound variables are renamed `v0, v1, ...` in binder
/// order (skipping names free in `f`) and quantifiers are pulled out
/// left operand first.
pub fn to_prenex(f: &Formula) -> PrenexForm {
    let nnf = to_nnf(f);
    let free = nnf.free_variables();
    let mut counter = 0;
    let renamed = rename_bound(&nnf, &mut BTreeMap::new(), &free, &mut counter);
    let mut prefix = Vec::new();
    let matrix = pull(&renamed, &mut prefix);
    PrenexForm { prefix, matrix }
}

fn rename_term(t: &Term, env: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => env.get(v).map_or_else(|| t.clone(), |n| Term::Var(n.clone())),
        Term::Const(_) => t.clone(),
    }
}

fn rename_bound(
    f: &Formula,
    env: &mut BTreeMap<String, String>,
    free: &BTreeSet<String>,
    counter: &mut usize,
) -> Formula {
    match f {
        Formula::Atom(r, args) => {
            Formula::Atom(r.clone(), args.iter().map(|t| rename_term(t, env)).collect())
        }
        Formula::Eq(a, b) => Formula::Eq(rename_term(a, env), rename_term(b, env)),
        Formula::Not(g) => Formula::not(rename_bound(g, env, free, counter)),
        Formula::And(a, b) => {
            let a = rename_bound(a, env, free, counter);
            Formula::and(a, rename_bound(b, env, free, counter))
        }
        Formula::Or(a, b) => {
            let a = rename_bound(a, env, free, counter);
            Formula::or(a, rename_bound(b, env, free, counter))
        }
        Formula::Implies(a, b) => {
            let a = rename_bound(a, env, free, counter);
            Formula::implies(a, rename_bound(b, env, free, counter))
        }
        Formula::Iff(a, b) => {
            let a = rename_bound(a, env, free, counter);
            Formula::iff(a, rename_bound(b, env, free, counter))
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let q = if matches!(f, Formula::Forall(..)) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let fresh = loop {
                let name = format!("v{counter}");
                *counter += 1;
                if !free.contains(&name) {
                    break name;
                }
            };
            let saved = env.insert(v.clone(), fresh.clone());
            let body = rename_bound(g, env, free, counter);
            match saved {
                Some(old) => env.insert(v.clone(), old),
                None => env.remove(v),
            };
            Formula::quantified(q, fresh, body)
        }
    }
}

// Expects NNF with all binders distinct from each other and from free variables.
fn pull(f: &Formula, prefix: &mut Vec<(Quantifier, String)>) -> Formula {
    match f {
        Formula::Forall(v, g) => {
            prefix.push((Quantifier::Forall, v.clone()));
            pull(g, prefix)
        }
        Formula::Exists(v, g) => {
            prefix.push((Quantifier::Exists, v.clone()));
            pull(g, prefix)
        }
        Formula::And(a, b) => {
            let a = pull(a, prefix);
            Formula::and(a, pull(b, prefix))
        }
        Formula::Or(a, b) => {
            let a = pull(a, prefix);
            Formula::or(a, pull(b, prefix))
        }
        _ => f.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarity {
    Sigma,
    Pi,
}

/// Σ⁰ₙ / Π⁰ₙ with the size of the leading quantifier block.
///
/// `polarity` is `None` exactly when the formula is quantifier-free (`n = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrefixClass {
    pub polarity: Option<Polarity>,
    pub n: usize,
    pub leading_count: usize,
}

impl fmt::Display for PrefixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            None => write!(f, "quantifier-free (n=0, leading 0)"),
            Some(Polarity::Sigma) => write!(f, "Sigma_{} (leading exists^{})", self.n, self.leading_count),
            Some(Polarity::Pi) => write!(f, "Pi_{} (leading forall^{})", self.n, self.leading_count),
        }
    }
}

pub fn classify_prefix(f: &Formula) -> PrefixClass {
    to_prenex(f).class()
}

/// Relativizes a sentence to the substructure generated by `vars` together with the
/// constants of `vocab`. The result has exactly `vars` free.
pub fn relativize(f: &Formula, vars: &[&str], vocab: &Vocabulary) -> Result<Formula> {
    let free = f.free_variables();
    if !free.is_empty() {
        return Err(Error::NotASentence(free.into_iter().collect()));
    }
    if vars.is_empty() && vocab.constants().is_empty() {
        return Err(Error::EmptyRelativization);
    }
    let used = f.variables();
    let mut seen = BTreeSet::new();
    for v in vars {
        if used.contains(*v) || vocab.has_symbol(v) || !seen.insert(*v) {
            return Err(Error::VariableNotFresh(v.to_string()));
        }
    }
    let guards: Vec<Term> = vars
        .iter()
        .map(|v| Term::var(*v))
        .chain(vocab.constants().iter().map(|c| Term::constant(c.clone())))
        .collect();
    Ok(relativize_inner(f, &guards))
}

fn relativize_inner(f: &Formula, guards: &[Term]) -> Formula {
    let guard = |z: &str| {
        Formula::disjunction(guards.iter().map(|g| Formula::eq(Term::var(z), g.clone())))
            .expect("at least one guard")
    };
    match f {
        Formula::Atom(..) | Formula::Eq(..) => f.clone(),
        Formula::Not(g) => Formula::not(relativize_inner(g, guards)),
        Formula::And(a, b) => Formula::and(relativize_inner(a, guards), relativize_inner(b, guards)),
        Formula::Or(a, b) => Formula::or(relativize_inner(a, guards), relativize_inner(b, guards)),
        Formula::Implies(a, b) => {
            Formula::implies(relativize_inner(a, guards), relativize_inner(b, guards))
        }
        Formula::Iff(a, b) => Formula::iff(relativize_inner(a, guards), relativize_inner(b, guards)),
        Formula::Forall(z, g) => Formula::forall(
            z.clone(),
            Formula::implies(guard(z), relativize_inner(g, guards)),
        ),
        Formula::Exists(z, g) => Formula::exists(
            z.clone(),
            Formula::and(guard(z), relativize_inner(g, guards)),
        ),
    }
}
