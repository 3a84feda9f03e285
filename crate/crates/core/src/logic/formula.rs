use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::vocabulary::Vocabulary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First-order formula over a relational vocabulary with equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom<I>(relation: impl Into<String>, args: I) -> Self
    where
        I: IntoIterator<Item = Term>,
    {
        Formula::Atom(relation.into(), args.into_iter().collect())
    }

    /// Atom whose arguments are all variables.
    pub fn atom_vars(relation: impl Into<String>, vars: &[&str]) -> Self {
        Self::atom(relation, vars.iter().map(|v| Term::var(*v)))
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Self {
        Formula::not(Formula::Eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn quantified(q: Quantifier, var: impl Into<String>, body: Formula) -> Self {
        match q {
            Quantifier::Forall => Formula::Forall(var.into(), Box::new(body)),
            Quantifier::Exists => Formula::Exists(var.into(), Box::new(body)),
        }
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Self {
        Self::quantified(Quantifier::Forall, var, body)
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Self {
        Self::quantified(Quantifier::Exists, var, body)
    }

    /// `Q v1. Q v2. ... body`, innermost binder last.
    pub fn quantify_all<I, S>(q: Quantifier, vars: I, body: Formula) -> Self
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<String>,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Self::quantified(q, v, acc))
    }

    /// Left-nested conjunction; `None` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Self> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction; `None` when empty.
    pub fn disjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Option<Self> {
        parts.into_iter().reduce(Formula::or)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Atom(_, args) => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(_, args) => out.extend(args.iter().filter_map(var_name)),
            Formula::Eq(a, b) => out.extend([a, b].into_iter().filter_map(var_name)),
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom(..) | Formula::Eq(..) => {}
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Forall(..) | Formula::Exists(..)) {
                qf = false;
            }
        });
        qf
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => 0,
            Formula::Not(g) => g.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Forall(_, g) | Formula::Exists(_, g) => 1 + g.quantifier_depth(),
        }
    }

    /// Checks symbols and arities against a vocabulary.
    pub fn check(&self, vocab: &Vocabulary) -> Result<()> {
        let check_term = |t: &Term| match t {
            Term::Const(c) if vocab.constant_index(c).is_none() => {
                Err(Error::UnknownConstant(c.clone()))
            }
            _ => Ok(()),
        };
        let mut result = Ok(());
        self.visit(&mut |f| {
            if result.is_err() {
                return;
            }
            result = match f {
                Formula::Atom(rel, args) => match vocab.relation_index(rel) {
                    None => Err(Error::UnknownRelation(rel.clone())),
                    Some(i) if vocab.relations()[i].arity != args.len() => {
                        Err(Error::ArityMismatch {
                            relation: rel.clone(),
                            expected: vocab.relations()[i].arity,
                            found: args.len(),
                        })
                    }
                    Some(_) => args.iter().try_for_each(check_term),
                },
                Formula::Eq(a, b) => check_term(a).and_then(|_| check_term(b)),
                Formula::Forall(v, _) | Formula::Exists(v, _) if vocab.constant_index(v).is_some() => {
                    Err(Error::BoundConstant(v.clone()))
                }
                _ => Ok(()),
            };
        });
        result
    }

    /// Replaces free occurrences of variables by constants.
    pub fn substitute_constants(&self, map: &BTreeMap<String, String>) -> Formula {
        let sub = |t: &Term| match t {
            Term::Var(v) => map.get(v).map_or_else(|| t.clone(), |c| Term::Const(c.clone())),
            Term::Const(_) => t.clone(),
        };
        match self {
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(sub).collect()),
            Formula::Eq(a, b) => Formula::Eq(sub(a), sub(b)),
            Formula::Not(g) => Formula::not(g.substitute_constants(map)),
            Formula::And(a, b) => Formula::and(a.substitute_constants(map), b.substitute_constants(map)),
            Formula::Or(a, b) => Formula::or(a.substitute_constants(map), b.substitute_constants(map)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute_constants(map), b.substitute_constants(map))
            }
            Formula::Iff(a, b) => Formula::iff(a.substitute_constants(map), b.substitute_constants(map)),
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let mut inner = map.clone();
                inner.remove(v);
                let q = if matches!(self, Formula::Forall(..)) {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                };
                Formula::quantified(q, v.clone(), g.substitute_constants(&inner))
            }
        }
    }
}

fn var_name(t: &Term) -> Option<String> {
    match t {
        Term::Var(v) => Some(v.clone()),
        Term::Const(_) => None,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_formula(self))
    }
}

/// A finite list of sentences, read as their conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theory {
    sentences: Vec<Formula>,
}

impl Theory {
    pub fn new(sentences: Vec<Formula>) -> Result<Self> {
        for s in &sentences {
            let free = s.free_variables();
            if !free.is_empty() {
                return Err(Error::NotASentence(free.into_iter().collect()));
            }
        }
        Ok(Self { sentences })
    }

    pub fn single(sentence: Formula) -> Result<Self> {
        Self::new(vec![sentence])
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn check(&self, vocab: &Vocabulary) -> Result<()> {
        self.sentences.iter().try_for_each(|s| s.check(vocab))
    }

    /// Grounds a theory with free variables: each listed variable becomes a fresh
    /// constant, matching [`super::FiniteStructure::expand_with_parameters`] naming
    /// for a structure over `vocab`.
    pub fn ground_free_variables(
        formulas: &[Formula],
        vars: &[&str],
        vocab: &Vocabulary,
    ) -> Result<(Vec<String>, Theory)> {
        let mut fresh: Vec<String> = Vec::with_capacity(vars.len());
        for i in 1..=vars.len() {
            let mut name = format!("c{i}");
            while vocab.has_symbol(&name) || fresh.contains(&name) {
                name.push('\'');
            }
            fresh.push(name);
        }
        let map: BTreeMap<String, String> = vars
            .iter()
            .map(|v| v.to_string())
            .zip(fresh.iter().cloned())
            .collect();
        let grounded = formulas.iter().map(|f| f.substitute_constants(&map)).collect();
        Ok((fresh, Theory::new(grounded)?))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sentences.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join("; "))
    }
}

/// Partial map from variables to element names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, element: impl Into<String>) -> Self {
        self.0.insert(var.into(), element.into());
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, element: impl Into<String>) {
        self.0.insert(var.into(), element.into());
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Self(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}
