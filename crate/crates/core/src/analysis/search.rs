use std::sync::Arc;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::eval::{CompiledFormula, CompiledTheory};
use crate::logic::{FiniteStructure, Formula, Theory, Vocabulary};
use crate::par::{find_first, Deadline, Probe};
use crate::substructure::{SearchBudget, StructureSpace};

use super::cores::has_small_core;
use super::covers::{canonical_cover, has_cover};
use super::{names, CounterexampleReport, ElementSet, Outcome, QueryKind, SubTruth};

/// First structure in canonical order (sizes ascending) on which `probe`
/// returns `Some`, with the search outcome.
fn first_structure<T, F>(
    vocab: &Arc<Vocabulary>,
    budget: &SearchBudget,
    probe: F,
) -> Result<(Outcome, Option<(FiniteStructure, T)>)>
where
    T: Send,
    F: Fn(&FiniteStructure) -> Option<T> + Sync + Send,
{
    budget.validate()?;
    let deadline = Deadline::after(budget.max_seconds);
    for size in 1..=budget.max_universe_size {
        let space = StructureSpace::new(vocab.clone(), size)?;
        let space = if budget.dedup_isomorphic { space.with_permutations() } else { space };
        let hit = find_first(0..space.count(), budget.exec, |i| {
            if deadline.passed() {
                return Some(Probe::OutOfTime);
            }
            if budget.dedup_isomorphic && !space.is_canonical(i) {
                return None;
            }
            let m = space.structure_at(i);
            probe(&m).map(|t| Probe::Hit((m, t)))
        });
        match hit {
            Some(Probe::Hit(found)) => return Ok((Outcome::Found, Some(found))),
            Some(Probe::OutOfTime) => {
                return Ok((Outcome::BudgetExhausted { completed_size: size - 1 }, None))
            }
            None => {}
        }
    }
    Ok((Outcome::NoneUpTo { bound: budget.max_universe_size }, None))
}

fn budget_params(k: Option<usize>, budget: &SearchBudget) -> Vec<(String, String)> {
    let mut p = Vec::new();
    if let Some(k) = k {
        let k = if k == usize::MAX { "finite".to_string() } else { k.to_string() };
        p.push(("k".to_string(), k));
    }
    p.push(("max_size".to_string(), budget.max_universe_size.to_string()));
    p.push(("dedup".to_string(), budget.dedup_isomorphic.to_string()));
    p
}

fn elapsed(start: Instant) -> Option<u64> {
    Some(start.elapsed().as_millis() as u64)
}

fn sets(m: &FiniteStructure, xs: &[Vec<usize>]) -> Vec<ElementSet> {
    xs.iter().map(|x| names(m, x)).collect()
}

/// First model of `theory` (in canonical order) without a core of size at most `k`.
pub fn psc_counterexample_search(
    theory: &Theory,
    vocab: Arc<Vocabulary>,
    k: usize,
    budget: &SearchBudget,
) -> Result<CounterexampleReport> {
    let start = Instant::now();
    let t = CompiledTheory::compile(theory, &vocab)?;
    let (outcome, found) = first_structure(&vocab, budget, |m| {
        if !t.holds(m) {
            return None;
        }
        let mut truth = SubTruth::new(m, &t).ok()?;
        (!has_small_core(&mut truth, m.size(), k)).then_some(())
    })?;
    let mut params = vec![("theory".to_string(), theory.to_string())];
    params.extend(budget_params(Some(k), budget));
    Ok(CounterexampleReport {
        query: QueryKind::Psc,
        params,
        outcome,
        cores: found.as_ref().map(|_| Vec::new()),
        witness: found.map(|(m, ())| m),
        cover: None,
        elapsed_ms: elapsed(start),
    })
}

/// First structure (in canonical order) that falsifies `phi` yet has a k-ary
/// cover by induced substructures modeling `phi`.
pub fn pce_counterexample_search(
    phi: &Formula,
    vocab: Arc<Vocabulary>,
    k: usize,
    budget: &SearchBudget,
) -> Result<CounterexampleReport> {
    let start = Instant::now();
    let t = CompiledTheory::compile(&Theory::single(phi.clone())?, &vocab)?;
    let (outcome, found) = first_structure(&vocab, budget, |m| {
        if t.holds(m) {
            return None;
        }
        let mut truth = SubTruth::new(m, &t).ok()?;
        if !has_cover(&mut truth, m.size(), k) {
            return None;
        }
        canonical_cover(&mut truth, m.size(), k)
    })?;
    let mut params = vec![("sentence".to_string(), phi.to_string())];
    params.extend(budget_params(Some(k), budget));
    Ok(CounterexampleReport {
        query: QueryKind::Pce,
        params,
        outcome,
        cover: found.as_ref().map(|(m, c)| sets(m, c)),
        witness: found.map(|(m, _)| m),
        cores: None,
        elapsed_ms: elapsed(start),
    })
}

/// Checks, structure by structure, that `m ⊨ phi` without a core of size at
/// most `k` exactly when `~phi` has a k-ary cover of `m`. Reports the first
/// structure where the two sides disagree.
pub fn duality_check(
    phi: &Formula,
    vocab: Arc<Vocabulary>,
    k: usize,
    budget: &SearchBudget,
) -> Result<CounterexampleReport> {
    let start = Instant::now();
    let pos = CompiledTheory::compile(&Theory::single(phi.clone())?, &vocab)?;
    let neg = CompiledTheory::compile(&Theory::single(Formula::not(phi.clone()))?, &vocab)?;
    let (outcome, found) = first_structure(&vocab, budget, |m| {
        let lacks_core = pos.holds(m) && {
            let mut truth = SubTruth::new(m, &pos).ok()?;
            !has_small_core(&mut truth, m.size(), k)
        };
        let mut neg_truth = SubTruth::new(m, &neg).ok()?;
        let cover = if neg.holds(m) {
            None
        } else {
            canonical_cover(&mut neg_truth, m.size(), k)
        };
        (lacks_core != cover.is_some()).then_some(cover)
    })?;
    let mut params = vec![("sentence".to_string(), phi.to_string())];
    params.extend(budget_params(Some(k), budget));
    let cores = match &found {
        Some((m, _)) if pos.holds(m) => {
            let report = super::minimal_cores(m, &Theory::single(phi.clone())?, k)?;
            Some(report.cores)
        }
        _ => None,
    };
    Ok(CounterexampleReport {
        query: QueryKind::Duality,
        params,
        outcome,
        cover: found.as_ref().and_then(|(m, c)| c.as_ref().map(|c| sets(m, c))),
        cores,
        witness: found.map(|(m, _)| m),
        elapsed_ms: elapsed(start),
    })
}

/// First structure (in canonical order) on which the sentences `f` and `g` differ.
pub fn bounded_equiv(
    f: &Formula,
    g: &Formula,
    vocab: Arc<Vocabulary>,
    budget: &SearchBudget,
) -> Result<CounterexampleReport> {
    let start = Instant::now();
    let compile = |h: &Formula| -> Result<CompiledFormula> {
        if !h.is_sentence() {
            return Err(Error::NotASentence(h.free_variables().into_iter().collect()));
        }
        CompiledFormula::compile(h, &vocab).map_err(|e| match e {
            Error::UnknownRelation(_) | Error::UnknownConstant(_) | Error::ArityMismatch { .. } => {
                Error::VocabularyMismatch(format!("`{h}` is not over `{}`: {e}", vocab.name()))
            }
            other => other,
        })
    };
    let (cf, cg) = (compile(f)?, compile(g)?);
    let (outcome, found) = first_structure(&vocab, budget, |m| {
        let all: Vec<usize> = (0..m.size()).collect();
        (cf.holds(m, &[], &all) != cg.holds(m, &[], &all)).then_some(())
    })?;
    let mut params = vec![
        ("f".to_string(), f.to_string()),
        ("g".to_string(), g.to_string()),
    ];
    params.extend(budget_params(None, budget));
    Ok(CounterexampleReport {
        query: QueryKind::Equiv,
        params,
        outcome,
        witness: found.map(|(m, ())| m),
        cover: None,
        cores: None,
        elapsed_ms: elapsed(start),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{minimal_cores, pce_counterexample_at};
    use crate::corpus::{gen_sentence, SentenceFamily};
    use crate::eval::models;
    use crate::par::ExecMode;
    use crate::syntax::parse_formula;

    fn graph() -> Arc<Vocabulary> {
        Arc::new(Vocabulary::graph())
    }

    fn f(text: &str) -> Formula {
        parse_formula(text, &Vocabulary::graph()).unwrap()
    }

    #[test]
    fn out_edge_is_not_psc_three() {
        let t = Theory::single(f("forall x. exists y. E(x,y)")).unwrap();
        let r = psc_counterexample_search(&t, graph(), 3, &SearchBudget::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::Found);
        let m = r.witness.unwrap();
        assert_eq!(m.size(), 4);
        let again = minimal_cores(&m, &t, 3).unwrap();
        assert!(again.is_psc_witness_failure);
    }

    #[test]
    fn psc_affirmations() {
        let dom = Theory::single(f("exists x. forall y. E(x,y)")).unwrap();
        let r = psc_counterexample_search(&dom, graph(), 1, &SearchBudget::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::NoneUpTo { bound: 4 });
        let cyc = Theory::single(gen_sentence(&SentenceFamily::HasCycle(3)).unwrap()).unwrap();
        let r = psc_counterexample_search(&cyc, graph(), 3, &SearchBudget::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::NoneUpTo { bound: 4 });
    }

    #[test]
    fn pce_hierarchy_for_three() {
        let phi = gen_sentence(&SentenceFamily::FewerThan(3)).unwrap();
        let empty = Arc::new(Vocabulary::empty());
        let r = pce_counterexample_search(&phi, empty.clone(), 2, &SearchBudget::new(4)).unwrap();
        assert!(r.found());
        let m = r.witness.unwrap();
        assert_eq!(m.size(), 3);
        assert!(pce_counterexample_at(&phi, 2, &m).unwrap().cover.is_some());
        let r = pce_counterexample_search(&phi, empty, 3, &SearchBudget::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::NoneUpTo { bound: 4 });
        let no3 = gen_sentence(&SentenceFamily::NoCycle(3)).unwrap();
        let r = pce_counterexample_search(&no3, graph(), 3, &SearchBudget::new(4)).unwrap();
        assert_eq!(r.outcome, Outcome::NoneUpTo { bound: 4 });
    }

    #[test]
    fn duality_examples() {
        let cases = [
            ("forall x. exists y. E(x,y)", 3, 4),
            ("exists x. forall y. E(x,y)", 1, 3),
            ("forall x1, x2. x1 = x2", 0, 3),
        ];
        for (text, k, size) in cases {
            let r = duality_check(&f(text), graph(), k, &SearchBudget::new(size)).unwrap();
            assert_eq!(r.outcome, Outcome::NoneUpTo { bound: size }, "{text}");
        }
    }

    #[test]
    fn equivalence_separator() {
        let r = bounded_equiv(
            &f("exists x. E(x,x)"),
            &f("forall x. E(x,x)"),
            graph(),
            &SearchBudget::new(2),
        )
        .unwrap();
        assert!(r.found());
        let m = r.witness.unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.tuples(0).iter().filter(|t| t[0] == t[1]).count(), 1);
        assert_ne!(models(&m, &f("exists x. E(x,x)")).unwrap(), models(&m, &f("forall x. E(x,x)")).unwrap());
        let same = bounded_equiv(&f("exists x. E(x,x)"), &f("exists x. E(x,x)"), graph(), &SearchBudget::new(3)).unwrap();
        assert_eq!(same.outcome, Outcome::NoneUpTo { bound: 3 });
    }

    #[test]
    fn equivalence_rejects_foreign_symbols() {
        let p = parse_formula("exists x. P(x)", &Vocabulary::new("p", [("P".to_string(), 1)], []).unwrap()).unwrap();
        let r = bounded_equiv(&p, &p, graph(), &SearchBudget::new(2));
        assert!(matches!(r, Err(Error::VocabularyMismatch(_))));
    }

    #[test]
    fn modes_agree() {
        let t = Theory::single(f("forall x. exists y. E(x,y)")).unwrap();
        let seq = psc_counterexample_search(&t, graph(), 2, &SearchBudget::new(4).with_exec(ExecMode::Sequential)).unwrap();
        let par = psc_counterexample_search(&t, graph(), 2, &SearchBudget::new(4).with_exec(ExecMode::Parallel)).unwrap();
        assert_eq!(seq.witness, par.witness);
        assert_eq!(seq.witness.unwrap().name(), par.witness.unwrap().name());
    }

    #[test]
    fn zero_budget_is_exhausted() {
        let t = Theory::single(f("forall x. exists y. E(x,y)")).unwrap();
        let r = psc_counterexample_search(&t, graph(), 3, &SearchBudget::new(4).with_seconds(Some(0.0))).unwrap();
        assert_eq!(r.outcome, Outcome::BudgetExhausted { completed_size: 0 });
        assert!(!r.search_complete());
    }
}
