//! Tarskian evaluation on finite structures.
//!
//! Formulas are compiled once per vocabulary (symbols resolved to indices,
//! variables to environment slots) and then evaluated by plain recursion.
//! Quantifiers range over a *domain*: the whole universe for ordinary
//! evaluation, or a subset of it, which evaluates in the induced substructure
//! on that subset without materializing it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::{Assignment, FiniteStructure, Formula, Quantifier, Term, Theory, Vocabulary};
use crate::normal::PrenexForm;

#[derive(Debug, Clone, Copy)]
enum Arg {
    Slot(usize),
    Const(usize),
}

#[derive(Debug, Clone)]
enum Node {
    Atom(usize, Vec<Arg>),
    Eq(Arg, Arg),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

/// A formula resolved against a vocabulary, ready to evaluate in any structure over it.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
    slots: usize,
    free: Vec<(String, usize)>,
    scratch_tuple: usize,
}

impl CompiledFormula {
    pub fn compile(f: &Formula, vocab: &Vocabulary) -> Result<Self> {
        f.check(vocab)?;
        let mut slots = BTreeMap::new();
        for v in f.variables() {
            let n = slots.len();
            slots.insert(v, n);
        }
        let mut max_arity = 0;
        let root = compile_node(f, vocab, &slots, &mut max_arity);
        let free = f
            .free_variables()
            .into_iter()
            .map(|v| {
                let s = slots[&v];
                (v, s)
            })
            .collect();
        Ok(Self {
            root,
            slots: slots.len(),
            free,
            scratch_tuple: max_arity,
        })
    }

    /// Free variables with their environment slots.
    pub fn free_variables(&self) -> impl Iterator<Item = &str> {
        self.free.iter().map(|(v, _)| v.as_str())
    }

    /// Evaluates with free variables bound by name.
    pub fn eval(&self, m: &FiniteStructure, asg: &Assignment) -> Result<bool> {
        let mut env = vec![usize::MAX; self.slots];
        for (v, s) in &self.free {
            let e = asg.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            env[*s] = m
                .element_index(e)
                .ok_or_else(|| Error::UnknownElement(e.to_string()))?;
        }
        let domain: Vec<usize> = (0..m.size()).collect();
        Ok(self.run(m, &mut env, &domain))
    }

    /// Evaluates with free variables bound positionally (in the order of
    /// [`Self::free_variables`]) and quantifiers ranging over `domain`.
    ///
    /// `domain` must contain every constant interpretation and every bound element.
    pub fn holds(&self, m: &FiniteStructure, bindings: &[usize], domain: &[usize]) -> bool {
        debug_assert_eq!(bindings.len(), self.free.len());
        let mut env = vec![usize::MAX; self.slots];
        for ((_, s), &e) in self.free.iter().zip(bindings) {
            env[*s] = e;
        }
        self.run(m, &mut env, domain)
    }

    fn run(&self, m: &FiniteStructure, env: &mut [usize], domain: &[usize]) -> bool {
        let mut tuple = vec![0; self.scratch_tuple];
        eval_node(&self.root, m, env, domain, &mut tuple)
    }
}

fn compile_arg(t: &Term, vocab: &Vocabulary, slots: &BTreeMap<String, usize>) -> Arg {
    match t {
        Term::Var(v) => Arg::Slot(slots[v]),
        Term::Const(c) => Arg::Const(vocab.constant_index(c).expect("checked")),
    }
}

fn compile_node(
    f: &Formula,
    vocab: &Vocabulary,
    slots: &BTreeMap<String, usize>,
    max_arity: &mut usize,
) -> Node {
    let mut go = |g: &Formula| Box::new(compile_node(g, vocab, slots, max_arity));
    match f {
        Formula::Atom(r, args) => {
            *max_arity = (*max_arity).max(args.len());
            Node::Atom(
                vocab.relation_index(r).expect("checked"),
                args.iter().map(|t| compile_arg(t, vocab, slots)).collect(),
            )
        }
        Formula::Eq(a, b) => Node::Eq(compile_arg(a, vocab, slots), compile_arg(b, vocab, slots)),
        Formula::Not(g) => Node::Not(go(g)),
        Formula::And(a, b) => {
            let a = go(a);
            Node::And(a, go(b))
        }
        Formula::Or(a, b) => {
            let a = go(a);
            Node::Or(a, go(b))
        }
        Formula::Implies(a, b) => {
            let a = go(a);
            Node::Implies(a, go(b))
        }
        Formula::Iff(a, b) => {
            let a = go(a);
            Node::Iff(a, go(b))
        }
        Formula::Forall(v, g) => Node::Forall(slots[v], go(g)),
        Formula::Exists(v, g) => Node::Exists(slots[v], go(g)),
    }
}

#[inline]
fn resolve(a: Arg, m: &FiniteStructure, env: &[usize]) -> usize {
    match a {
        Arg::Slot(s) => env[s],
        Arg::Const(c) => m.constant(c),
    }
}

fn eval_node(
    node: &Node,
    m: &FiniteStructure,
    env: &mut [usize],
    domain: &[usize],
    tuple: &mut Vec<usize>,
) -> bool {
    match node {
        Node::Atom(r, args) => {
            for (slot, a) in tuple.iter_mut().zip(args) {
                *slot = resolve(*a, m, env);
            }
            m.holds(*r, &tuple[..args.len()])
        }
        Node::Eq(a, b) => resolve(*a, m, env) == resolve(*b, m, env),
        Node::Not(g) => !eval_node(g, m, env, domain, tuple),
        Node::And(a, b) => eval_node(a, m, env, domain, tuple) && eval_node(b, m, env, domain, tuple),
        Node::Or(a, b) => eval_node(a, m, env, domain, tuple) || eval_node(b, m, env, domain, tuple),
        Node::Implies(a, b) => {
            !eval_node(a, m, env, domain, tuple) || eval_node(b, m, env, domain, tuple)
        }
        Node::Iff(a, b) => eval_node(a, m, env, domain, tuple) == eval_node(b, m, env, domain, tuple),
        Node::Forall(s, g) | Node::Exists(s, g) => {
            let universal = matches!(node, Node::Forall(..));
            let saved = env[*s];
            let mut result = universal;
            for &e in domain {
                env[*s] = e;
                if eval_node(g, m, env, domain, tuple) != universal {
                    result = !universal;
                    break;
                }
            }
            env[*s] = saved;
            result
        }
    }
}

/// `m ⊨ f[asg]`.
pub fn eval(m: &FiniteStructure, f: &Formula, asg: &Assignment) -> Result<bool> {
    CompiledFormula::compile(f, m.vocab())?.eval(m, asg)
}

/// Truth of a sentence.
pub fn models(m: &FiniteStructure, sentence: &Formula) -> Result<bool> {
    let c = CompiledFormula::compile(sentence, m.vocab())?;
    if let Some(v) = c.free_variables().next() {
        return Err(Error::UnboundVariable(v.to_string()));
    }
    Ok(c.holds(m, &[], &(0..m.size()).collect::<Vec<_>>()))
}

/// The sentences of a theory compiled against one vocabulary.
#[derive(Debug, Clone)]
pub struct CompiledTheory {
    sentences: Vec<CompiledFormula>,
}

impl CompiledTheory {
    pub fn compile(t: &Theory, vocab: &Vocabulary) -> Result<Self> {
        let sentences = t
            .sentences()
            .iter()
            .map(|s| CompiledFormula::compile(s, vocab))
            .collect::<Result<_>>()?;
        Ok(Self { sentences })
    }

    /// Truth in the substructure induced on `domain` (which must contain the constants).
    pub fn holds_on(&self, m: &FiniteStructure, domain: &[usize]) -> bool {
        self.sentences.iter().all(|s| s.holds(m, &[], domain))
    }

    pub fn holds(&self, m: &FiniteStructure) -> bool {
        self.holds_on(m, &(0..m.size()).collect::<Vec<_>>())
    }
}

/// `m ⊨ t`: every sentence holds. Members with free variables are an error.
pub fn models_theory(m: &FiniteStructure, t: &Theory) -> Result<bool> {
    for s in t.sentences() {
        if !s.is_sentence() {
            return Err(Error::NotASentence(s.free_variables().into_iter().collect()));
        }
    }
    Ok(CompiledTheory::compile(t, m.vocab())?.holds(m))
}

/// All assignments to a leading existential block that satisfy the rest of the formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub formula: PrenexForm,
    pub tuples: Vec<Vec<String>>,
}

impl WitnessSet {
    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// Enumerates, in lexicographic element order, every tuple for the leading
/// existential block of `pf` that makes the remainder true in `m`.
pub fn witnesses(m: &FiniteStructure, pf: &PrenexForm) -> Result<WitnessSet> {
    let tuples = witness_indices(m, pf)?
        .into_iter()
        .map(|t| t.into_iter().map(|i| m.element(i).to_string()).collect())
        .collect();
    Ok(WitnessSet {
        formula: pf.clone(),
        tuples,
    })
}

pub(crate) fn witness_indices(m: &FiniteStructure, pf: &PrenexForm) -> Result<Vec<Vec<usize>>> {
    let k = match pf.leading_block() {
        Some((Quantifier::Exists, k)) => k,
        _ => return Err(Error::NotExistential),
    };
    let leading: Vec<&str> = pf.prefix()[..k].iter().map(|(_, v)| v.as_str()).collect();
    let rest = PrenexForm::new(pf.prefix()[k..].to_vec(), pf.matrix().clone())?.to_formula();
    let compiled = CompiledFormula::compile(&rest, m.vocab())?;
    let extra: Vec<&str> = compiled
        .free_variables()
        .filter(|v| !leading.contains(v))
        .collect();
    if let Some(v) = extra.first() {
        return Err(Error::UnboundVariable(v.to_string()));
    }
    // Leading variables that do not occur in the remainder are unconstrained.
    let order: Vec<&str> = compiled.free_variables().collect();
    let positions: Vec<Option<usize>> = leading
        .iter()
        .map(|v| order.iter().position(|o| o == v))
        .collect();
    let domain: Vec<usize> = (0..m.size()).collect();

    let n = m.size();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; k];
    let mut bindings = vec![0usize; order.len()];
    loop {
        for (pos, &e) in positions.iter().zip(&tuple) {
            if let Some(pos) = pos {
                bindings[*pos] = e;
            }
        }
        if compiled.holds(m, &bindings, &domain) {
            out.push(tuple.clone());
        }
        // odometer, last position fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, SentenceFamily, StructureFamily};
    use crate::normal::to_prenex;
    use crate::syntax::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s, &crate::logic::Vocabulary::graph()).unwrap()
    }

    #[test]
    fn cycle_has_no_dominating_vertex() {
        let c3 = corpus::gen_structure(&StructureFamily::Cycle(3)).unwrap();
        assert!(!models(&c3, &p("exists x. forall y. E(x,y)")).unwrap());
    }

    #[test]
    fn linear_order_minimum_is_the_only_witness() {
        let l3 = corpus::gen_structure(&StructureFamily::LinearOrder(3)).unwrap();
        let f = p("exists x. forall y. E(x,y)");
        assert!(models(&l3, &f).unwrap());
        let w = witnesses(&l3, &to_prenex(&f)).unwrap();
        assert_eq!(w.tuples, vec![vec!["e0".to_string()]]);

        let none = witnesses(&l3, &to_prenex(&p("exists x. forall y. ~E(x,y)"))).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn loop_pair_theory() {
        let g = corpus::gen_structure(&StructureFamily::LoopPair).unwrap();
        assert!(models(&g, &p("exists x. E(x,x)")).unwrap());
        let t = corpus::gen_theory(&corpus::TheoryFamily::LoopContrast).unwrap();
        assert!(models_theory(&g, &t).unwrap());
        let loop1 = corpus::gen_structure(&StructureFamily::Cycle(1)).unwrap();
        assert!(!models_theory(&loop1, &t).unwrap());
        assert!(models_theory(&loop1, &Theory::default()).unwrap());
    }

    #[test]
    fn two_triangles_witnesses() {
        let g = corpus::gen_structure(&StructureFamily::DisjointCycles(vec![3, 3])).unwrap();
        let f = corpus::gen_sentence(&SentenceFamily::HasCycle(3)).unwrap();
        let w = witnesses(&g, &to_prenex(&f)).unwrap();
        // three rotations per triangle; reversed orientations are not cycles
        assert_eq!(w.tuples.len(), 6);
    }

    #[test]
    fn errors() {
        let c3 = corpus::gen_structure(&StructureFamily::Cycle(3)).unwrap();
        assert!(matches!(
            eval(&c3, &p("E(x,y)"), &Assignment::new().with("x", "e0")),
            Err(Error::UnboundVariable(_))
        ));
        assert!(eval(&c3, &p("E(x,y)"), &Assignment::new().with("x", "e0").with("y", "e1")).unwrap());
        assert!(matches!(
            witnesses(&c3, &to_prenex(&p("forall x. E(x,x)"))),
            Err(Error::NotExistential)
        ));
        assert!(models_theory(&c3, &Theory::default()).unwrap());
    }

    #[test]
    fn shadowing_restores_outer_binding() {
        let c3 = corpus::gen_structure(&StructureFamily::Cycle(3)).unwrap();
        let f = p("(exists x. E(x,x)) | E(x,y)");
        let asg = Assignment::new().with("x", "e0").with("y", "e1");
        assert!(eval(&c3, &f, &asg).unwrap());
        let g = p("E(x,y) & exists x. E(y,x)");
        assert!(eval(&c3, &g, &asg).unwrap());
    }
}
