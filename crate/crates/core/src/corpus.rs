//! Deterministic generators for the structure, sentence and theory families used
//! as examples and counterexamples.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::logic::{FiniteStructure, Formula, StructureDraft, Term, Theory, Vocabulary};
use crate::normal::to_prenex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureFamily {
    /// Directed n-cycle on `e0..e(n-1)`; n = 1 is a self-loop, n = 2 a mutual pair.
    Cycle(usize),
    /// Disjoint union of directed cycles; component `j` has elements `cj_e0, cj_e1, ...`.
    DisjointCycles(Vec<usize>),
    /// `e0 <= e1 <= ...` with `E` the reflexive order.
    LinearOrder(usize),
    /// n elements over the empty vocabulary.
    BareSet(usize),
    /// `({a, b}, {(a, a)})`.
    LoopPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SentenceFamily {
    HasCycle(usize),
    NoCycle(usize),
    FewerThan(usize),
    Domination,
    OutEdge,
    /// Free in `x`: x lies on no cycle of length at most n.
    Phi(usize),
    Psi(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoryFamily {
    LoopContrast,
    PsiPrefix(usize),
    NoCycles(usize),
}

fn positive(n: usize, what: &str) -> Result<usize> {
    if n == 0 {
        Err(Error::InvalidParams(format!("{what} needs a positive parameter")))
    } else {
        Ok(n)
    }
}

fn graph_structure(name: String, universe: Vec<String>, edges: Vec<[String; 2]>) -> Result<FiniteStructure> {
    StructureDraft::new(name, Arc::new(Vocabulary::graph()))
        .elements(universe)
        .relation("E", edges)
        .build()
}

pub fn gen_structure(family: &StructureFamily) -> Result<FiniteStructure> {
    let name = family.to_string();
    match family {
        StructureFamily::Cycle(n) => {
            let n = positive(*n, "cycle")?;
            let e = |i: usize| format!("e{i}");
            graph_structure(
                name,
                (0..n).map(e).collect(),
                (0..n).map(|i| [e(i), e((i + 1) % n)]).collect(),
            )
        }
        StructureFamily::DisjointCycles(lengths) => {
            if lengths.is_empty() {
                return Err(Error::InvalidParams("disjoint_cycles needs at least one cycle".into()));
            }
            let mut universe = Vec::new();
            let mut edges = Vec::new();
            for (j, &len) in lengths.iter().enumerate() {
                let len = positive(len, "disjoint_cycles")?;
                let e = |i: usize| format!("c{j}_e{i}");
                universe.extend((0..len).map(e));
                edges.extend((0..len).map(|i| [e(i), e((i + 1) % len)]));
            }
            graph_structure(name, universe, edges)
        }
        StructureFamily::LinearOrder(n) => {
            let n = positive(*n, "linear_order")?;
            let e = |i: usize| format!("e{i}");
            let edges = (0..n)
                .flat_map(|i| (i..n).map(move |j| [e(i), e(j)]))
                .collect();
            graph_structure(name, (0..n).map(e).collect(), edges)
        }
        StructureFamily::BareSet(n) => {
            let n = positive(*n, "bare_set")?;
            StructureDraft::new(name, Arc::new(Vocabulary::empty()))
                .elements((0..n).map(|i| format!("e{i}")))
                .build()
        }
        StructureFamily::LoopPair => graph_structure(
            name,
            vec!["a".into(), "b".into()],
            vec![["a".into(), "a".into()]],
        ),
    }
}

fn var(name: &str) -> Term {
    Term::var(name)
}

fn edge(a: &str, b: &str) -> Formula {
    Formula::atom("E", [var(a), var(b)])
}

fn has_cycle(k: usize) -> Formula {
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let distinct = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
    let parts = distinct
        .map(|(i, j)| Formula::neq(var(&xs[i]), var(&xs[j])))
        .chain((0..k).map(|i| edge(&xs[i], &xs[(i + 1) % k])));
    let body = Formula::conjunction(parts).expect("k >= 1");
    Formula::quantify_all(crate::logic::Quantifier::Exists, xs, body)
}

// x is not on a cycle of length exactly `len`
fn not_on_cycle(len: usize) -> Formula {
    if len == 1 {
        return Formula::not(edge("x", "x"));
    }
    let m = len - 1;
    let zs: Vec<String> = (1..=m).map(|i| format!("z{i}")).collect();
    let distinct = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| Formula::neq(var(&zs[i]), var(&zs[j])));
    let from_x = zs.iter().map(|z| Formula::neq(var("x"), var(z)));
    let closing = [edge("x", &zs[0]), edge(&zs[m - 1], "x")];
    let chain = (0..m - 1).map(|i| edge(&zs[i], &zs[i + 1]));
    let body = Formula::conjunction(distinct.chain(from_x).chain(closing).chain(chain)).unwrap();
    Formula::not(Formula::quantify_all(crate::logic::Quantifier::Exists, zs, body))
}

pub fn gen_sentence(family: &SentenceFamily) -> Result<Formula> {
    Ok(match family {
        SentenceFamily::HasCycle(k) => has_cycle(positive(*k, "has_cycle")?),
        SentenceFamily::NoCycle(k) => {
            to_prenex(&Formula::not(has_cycle(positive(*k, "no_cycle")?))).to_formula()
        }
        SentenceFamily::FewerThan(k) => {
            let k = positive(*k, "fewer_than")?;
            let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
            let pairs = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .map(|(i, j)| Formula::eq(var(&xs[i]), var(&xs[j])));
            // the empty disjunction is falsum
            let body = Formula::disjunction(pairs)
                .unwrap_or_else(|| Formula::neq(var(&xs[0]), var(&xs[0])));
            Formula::quantify_all(crate::logic::Quantifier::Forall, xs, body)
        }
        SentenceFamily::Domination => Formula::exists("x", Formula::forall("y", edge("x", "y"))),
        SentenceFamily::OutEdge => Formula::forall("x", Formula::exists("y", edge("x", "y"))),
        SentenceFamily::Phi(n) => {
            let n = positive(*n, "phi")?;
            Formula::conjunction((1..=n).map(not_on_cycle)).unwrap()
        }
        SentenceFamily::Psi(n) => Formula::exists("x", gen_sentence(&SentenceFamily::Phi(*n))?),
    })
}

pub fn gen_theory(family: &TheoryFamily) -> Result<Theory> {
    let sentences = match family {
        TheoryFamily::LoopContrast => vec![
            Formula::exists("x", edge("x", "x")),
            Formula::exists("y", Formula::not(edge("y", "y"))),
        ],
        TheoryFamily::PsiPrefix(m) => (1..=positive(*m, "psi_prefix")?)
            .map(|n| gen_sentence(&SentenceFamily::Psi(n)))
            .collect::<Result<_>>()?,
        TheoryFamily::NoCycles(m) => (1..=positive(*m, "no_cycles")?)
            .map(|k| gen_sentence(&SentenceFamily::NoCycle(k)))
            .collect::<Result<_>>()?,
    };
    Theory::new(sentences)
}

impl SentenceFamily {
    /// The natural vocabulary: pure equality for `fewer_than`, digraphs otherwise.
    pub fn vocabulary(&self) -> Vocabulary {
        match self {
            SentenceFamily::FewerThan(_) => Vocabulary::empty(),
            _ => Vocabulary::graph(),
        }
    }
}

/// Twenty digraph sentences covering every connective and prefix shape up to Σ₃/Π₃.
pub fn sentence_corpus() -> Vec<(String, Formula)> {
    let families = [
        SentenceFamily::Domination,
        SentenceFamily::OutEdge,
        SentenceFamily::HasCycle(1),
        SentenceFamily::HasCycle(2),
        SentenceFamily::HasCycle(3),
        SentenceFamily::NoCycle(2),
        SentenceFamily::NoCycle(3),
        SentenceFamily::FewerThan(2),
        SentenceFamily::FewerThan(3),
        SentenceFamily::Psi(1),
        SentenceFamily::Psi(2),
    ];
    let mut out: Vec<(String, Formula)> = families
        .iter()
        .map(|f| (f.to_string(), gen_sentence(f).expect("valid family")))
        .collect();
    let texts = [
        ("has_loop", "exists x. E(x,x)"),
        ("has_loopless", "exists y. ~E(y,y)"),
        ("symmetric", "forall x, y. E(x,y) -> E(y,x)"),
        ("transitive", "forall x, y, z. E(x,y) & E(y,z) -> E(x,z)"),
        ("loop_iff_in_edge", "forall x. E(x,x) <-> (exists y. E(y,x) & x != y)"),
        ("comparable_point", "exists x. forall y. E(x,y) | E(y,x)"),
        ("asymmetric_successor", "forall x. exists y. E(x,y) & ~E(y,x)"),
        (
            "no_sink_implies_branching",
            "~(exists x. forall y. E(y,x)) -> forall x. exists y, z. y != z & E(x,y) & E(x,z)",
        ),
        ("twins", "exists x, y. x != y & (forall z. E(z,x) <-> E(z,y))"),
    ];
    let graph = Vocabulary::graph();
    out.extend(texts.iter().map(|(name, text)| {
        (
            name.to_string(),
            crate::syntax::parse_formula(text, &graph).expect("corpus sentence parses"),
        )
    }));
    out
}

/// Uniformly random tables; a testing utility only.
pub fn random_structure(vocab: Arc<Vocabulary>, size: usize, seed: u64) -> Result<FiniteStructure> {
    let size = positive(size, "random_structure")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let universe: Vec<String> = (0..size).map(|i| format!("e{i}")).collect();
    let mut draft = StructureDraft::new(format!("random_{seed}"), vocab.clone()).elements(universe.clone());
    for r in vocab.relations() {
        let mut tuples = Vec::new();
        let mut t = vec![0usize; r.arity];
        'outer: loop {
            if rng.random_bool(0.5) {
                tuples.push(t.iter().map(|&i| universe[i].clone()).collect::<Vec<_>>());
            }
            let mut i = r.arity;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                t[i] += 1;
                if t[i] < size {
                    break;
                }
                t[i] = 0;
            }
        }
        draft = draft.relation(r.name.clone(), tuples);
    }
    for c in vocab.constants() {
        let e = universe[rng.random_range(0..size)].clone();
        draft = draft.constant(c.clone(), e);
    }
    draft.build()
}

/// Seed for randomized test utilities, from `PRESLAB_SEED` (default 0).
pub fn seed_from_env() -> u64 {
    std::env::var("PRESLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

impl fmt::Display for StructureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureFamily::Cycle(n) => write!(f, "cycle_{n}"),
            StructureFamily::DisjointCycles(ls) => {
                write!(f, "disjoint_cycles")?;
                for l in ls {
                    write!(f, "_{l}")?;
                }
                Ok(())
            }
            StructureFamily::LinearOrder(n) => write!(f, "linear_order_{n}"),
            StructureFamily::BareSet(n) => write!(f, "bare_set_{n}"),
            StructureFamily::LoopPair => write!(f, "loop_pair"),
        }
    }
}

impl fmt::Display for SentenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentenceFamily::HasCycle(k) => write!(f, "has_{k}_cycle"),
            SentenceFamily::NoCycle(k) => write!(f, "no_{k}_cycle"),
            SentenceFamily::FewerThan(k) => write!(f, "fewer_than_{k}"),
            SentenceFamily::Domination => write!(f, "domination"),
            SentenceFamily::OutEdge => write!(f, "out_edge"),
            SentenceFamily::Phi(n) => write!(f, "phi_{n}"),
            SentenceFamily::Psi(n) => write!(f, "psi_{n}"),
        }
    }
}

impl fmt::Display for TheoryFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryFamily::LoopContrast => write!(f, "loop_contrast"),
            TheoryFamily::PsiPrefix(m) => write!(f, "psi_prefix_{m}"),
            TheoryFamily::NoCycles(m) => write!(f, "no_cycles_{m}"),
        }
    }
}

/// Splits `name(a, b)`, `name_a_b` or `name` into a name and numeric arguments.
/// Patterns with the number in the middle (`has_3_cycle`) are handled by callers.
fn split_call(s: &str) -> Result<(String, Vec<usize>)> {
    let bad = || Error::InvalidParams(format!("cannot parse family `{s}`"));
    let s = s.trim();
    if let Some(open) = s.find('(') {
        let close = s.strip_suffix(')').ok_or_else(bad)?;
        let args = close[open + 1..]
            .split(',')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(|a| a.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        return Ok((s[..open].trim().to_string(), args));
    }
    let mut parts: Vec<&str> = s.split('_').collect();
    let mut args = Vec::new();
    while let Some(last) = parts.last() {
        match last.parse::<usize>() {
            Ok(n) if parts.len() > 1 => {
                args.push(n);
                parts.pop();
            }
            _ => break,
        }
    }
    args.reverse();
    Ok((parts.join("_"), args))
}

fn one(name: &str, args: &[usize]) -> Result<usize> {
    match args {
        [n] => Ok(*n),
        _ => Err(Error::InvalidParams(format!("`{name}` takes exactly one parameter"))),
    }
}

impl FromStr for StructureFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        match name.as_str() {
            "cycle" => Ok(Self::Cycle(one(&name, &args)?)),
            "disjoint_cycles" => Ok(Self::DisjointCycles(args)),
            "linear_order" => Ok(Self::LinearOrder(one(&name, &args)?)),
            "bare_set" => Ok(Self::BareSet(one(&name, &args)?)),
            "loop_pair" if args.is_empty() => Ok(Self::LoopPair),
            _ => Err(Error::InvalidParams(format!("unknown structure family `{s}`"))),
        }
    }
}

impl FromStr for SentenceFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for (prefix, make) in [
            ("has_", Self::HasCycle as fn(usize) -> Self),
            ("no_", Self::NoCycle as fn(usize) -> Self),
        ] {
            if let Some(k) = s
                .strip_prefix(prefix)
                .and_then(|r| r.strip_suffix("_cycle"))
                .and_then(|k| k.parse().ok())
            {
                return Ok(make(k));
            }
        }
        let (name, args) = split_call(s)?;
        match name.as_str() {
            "has_cycle" => Ok(Self::HasCycle(one(&name, &args)?)),
            "no_cycle" => Ok(Self::NoCycle(one(&name, &args)?)),
            "fewer_than" => Ok(Self::FewerThan(one(&name, &args)?)),
            "domination" if args.is_empty() => Ok(Self::Domination),
            "out_edge" if args.is_empty() => Ok(Self::OutEdge),
            "phi" => Ok(Self::Phi(one(&name, &args)?)),
            "psi" => Ok(Self::Psi(one(&name, &args)?)),
            _ => Err(Error::InvalidParams(format!("unknown sentence family `{s}`"))),
        }
    }
}

impl FromStr for TheoryFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = split_call(s)?;
        match name.as_str() {
            "loop_contrast" if args.is_empty() => Ok(Self::LoopContrast),
            "psi_prefix" => Ok(Self::PsiPrefix(one(&name, &args)?)),
            "no_cycles" => Ok(Self::NoCycles(one(&name, &args)?)),
            _ => Err(Error::InvalidParams(format!("unknown theory family `{s}`"))),
        }
    }
}
