//! Runs every acceptance criterion at its stated bound and time limit and
//! prints one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use preslab::analysis::{
    bounded_equiv, duality_check, ec_formula_oracle, is_core, is_existentially_closed_in,
    minimal_cores, pce_counterexample_search, witness_sets_are_cores, Outcome,
};
use preslab::corpus::{
    gen_sentence, gen_structure, gen_theory, sentence_corpus, SentenceFamily, StructureFamily,
    TheoryFamily,
};
use preslab::eval::{models, CompiledFormula};
use preslab::normal::{relativize, to_prenex};
use preslab::substructure::{enumerate_structures, induced_substructure};
use preslab::{Assignment, FiniteStructure, SearchBudget, Theory, Vocabulary};

type Check = Result<String, String>;

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn graph() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::graph())
}

fn all_digraphs(max: usize, dedup: bool) -> Vec<FiniteStructure> {
    enumerate_structures(graph(), &SearchBudget::new(max).with_dedup(dedup))
        .unwrap()
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core_size_example() -> Check {
    let g = gen_structure(&StructureFamily::LoopPair).map_err(|e| e.to_string())?;
    let t = gen_theory(&TheoryFamily::LoopContrast).unwrap();
    let r2 = minimal_cores(&g, &t, 2).unwrap();
    ensure(r2.minimal_cores == vec![set(&["a", "b"])], || {
        format!("minimal cores {:?}", r2.minimal_cores)
    })?;
    let r1 = minimal_cores(&g, &t, 1).unwrap();
    ensure(r1.cores.is_empty() && r1.is_psc_witness_failure, || {
        format!("unexpected small cores {:?}", r1.cores)
    })?;
    Ok("minimal core {a, b}; no core of size <= 1".into())
}

fn cycle_only_core() -> Check {
    let out_edge = Theory::single(gen_sentence(&SentenceFamily::OutEdge).unwrap()).unwrap();
    for n in 3..=5 {
        let c = gen_structure(&StructureFamily::Cycle(n)).unwrap();
        let r = minimal_cores(&c, &out_edge, n).unwrap();
        let all: BTreeSet<String> = c.universe().iter().cloned().collect();
        ensure(r.cores == vec![all.clone()] && r.minimal_cores == vec![all], || {
            format!("cycle({n}): cores {:?}", r.cores)
        })?;
    }
    Ok("cycle(3..5): the full vertex set is the only core".into())
}

fn witness_core_theorem() -> Check {
    let structures = all_digraphs(4, true);
    let mut checked = 0;
    for fam in [SentenceFamily::Domination, SentenceFamily::HasCycle(3)] {
        let phi = gen_sentence(&fam).unwrap();
        let pf = to_prenex(&phi);
        for m in &structures {
            if !models(m, &phi).unwrap() {
                continue;
            }
            checked += 1;
            ensure(witness_sets_are_cores(m, &pf).unwrap(), || {
                format!("{fam}: a witness set of {} is not a core", m.name())
            })?;
        }
    }
    Ok(format!("{checked} models checked, 0 violations"))
}

fn duality() -> Check {
    let mut runs = 0;
    for fam in [
        SentenceFamily::Domination,
        SentenceFamily::OutEdge,
        SentenceFamily::FewerThan(2),
        SentenceFamily::HasCycle(3),
    ] {
        let phi = gen_sentence(&fam).unwrap();
        for k in 0..=3 {
            let r = duality_check(&phi, graph(), k, &SearchBudget::new(4)).unwrap();
            ensure(r.outcome == Outcome::NoneUpTo { bound: 4 }, || {
                format!("{fam} at k={k}: {:?}", r.outcome)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{runs} (sentence, k) pairs: none_up_to(4)"))
}

fn pce_hierarchy() -> Check {
    let empty = Arc::new(Vocabulary::empty());
    let mut failures = Vec::new();
    for k in 1..=3 {
        let phi = gen_sentence(&SentenceFamily::FewerThan(k)).unwrap();
        let below = pce_counterexample_search(&phi, empty.clone(), k - 1, &SearchBudget::new(4)).unwrap();
        match &below.witness {
            Some(m) if m.size() == k => {}
            Some(m) => failures.push(format!("fewer_than_{k} at {}: counterexample of size {}", k - 1, m.size())),
            None => failures.push(format!("fewer_than_{k} at {}: {:?}", k - 1, below.outcome)),
        }
        let at = pce_counterexample_search(&phi, empty.clone(), k, &SearchBudget::new(4)).unwrap();
        if at.outcome != (Outcome::NoneUpTo { bound: 4 }) {
            failures.push(format!("fewer_than_{k} at {k}: {:?}", at.outcome));
        }
    }
    if failures.is_empty() {
        Ok("refuted below k with a size-k structure, accepted at k".into())
    } else {
        Err(failures.join("; "))
    }
}

fn relativization_law() -> Check {
    let corpus = sentence_corpus();
    let structures = all_digraphs(3, false);
    let vars = ["w1", "w2", "w3"];
    let mut checks = 0u64;
    for (name, phi) in &corpus {
        let rel: Vec<_> = (1..=3)
            .map(|len| CompiledFormula::compile(&relativize(phi, &vars[..len], &Vocabulary::graph()).unwrap(), &Vocabulary::graph()).unwrap())
            .collect();
        for m in &structures {
            for len in 1..=3 {
                let mut tuple = vec![0usize; len];
                loop {
                    let asg: Assignment = vars[..len]
                        .iter()
                        .zip(&tuple)
                        .map(|(v, &i)| (v.to_string(), m.element(i).to_string()))
                        .collect();
                    let left = rel[len - 1].eval(m, &asg).unwrap();
                    let x: BTreeSet<String> = tuple.iter().map(|&i| m.element(i).to_string()).collect();
                    let right = models(&induced_substructure(m, &x).unwrap(), phi).unwrap();
                    ensure(left == right, || format!("{name} on {} at {tuple:?}", m.name()))?;
                    checks += 1;
                    if !advance(&mut tuple, m.size()) {
                        break;
                    }
                }
            }
        }
    }
    Ok(format!("{} sentences, {checks} checks, 0 violations", corpus.len()))
}

fn advance(t: &mut [usize], n: usize) -> bool {
    for i in (0..t.len()).rev() {
        t[i] += 1;
        if t[i] < n {
            return true;
        }
        t[i] = 0;
    }
    false
}

fn lemma_replay() -> Check {
    let g = gen_structure(&StructureFamily::DisjointCycles(vec![1, 2, 3, 4, 5])).unwrap();
    let t = gen_theory(&TheoryFamily::PsiPrefix(4)).unwrap();
    let short: Vec<String> = g
        .universe()
        .iter()
        .filter(|e| ["c0_", "c1_", "c2_"].iter().any(|p| e.starts_with(p)))
        .cloned()
        .collect();
    ensure(short.len() == 6, || format!("short-cycle vertices {short:?}"))?;
    for bits in 0u32..(1 << short.len()) {
        let s: BTreeSet<String> = (0..short.len())
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| short[i].clone())
            .collect();
        ensure(!is_core(&g, &s, &t).unwrap(), || format!("{s:?} is a core"))?;
    }
    let phis: Vec<_> = (1..=5)
        .map(|n| CompiledFormula::compile(&gen_sentence(&SentenceFamily::Phi(n)).unwrap(), &Vocabulary::graph()).unwrap())
        .collect();
    let structures = all_digraphs(4, false);
    for m in &structures {
        for x in m.universe() {
            let asg = Assignment::new().with("x", x.clone());
            let truth: Vec<bool> = phis.iter().map(|p| p.eval(m, &asg).unwrap()).collect();
            for n in 0..truth.len() {
                for mm in 0..=n {
                    ensure(!truth[n] || truth[mm], || {
                        format!("phi_{} -> phi_{} fails on {} at {x}", n + 1, mm + 1, m.name())
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "64 short-cycle subsets are not cores; phi_n monotone on {} digraphs",
        structures.len()
    ))
}

fn prenex_soundness() -> Check {
    let corpus = sentence_corpus();
    for (name, phi) in &corpus {
        let pf = to_prenex(phi).to_formula();
        let r = bounded_equiv(phi, &pf, graph(), &SearchBudget::new(3)).unwrap();
        ensure(r.outcome == Outcome::NoneUpTo { bound: 3 }, || format!("{name}: {:?}", r.outcome))?;
    }
    Ok(format!("{} sentences: none_up_to(3)", corpus.len()))
}

fn ec_oracle() -> Check {
    let mut pairs = 0;
    let mut closed = 0;
    for r in all_digraphs(3, false) {
        let n = r.size();
        for bits in 1u32..(1 << n) {
            let x: BTreeSet<String> = (0..n)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| r.element(i).to_string())
                .collect();
            let m = induced_substructure(&r, &x).unwrap();
            let fast = is_existentially_closed_in(&m, &r).unwrap();
            let slow = ec_formula_oracle(&m, &r, 2, 2).unwrap();
            ensure(fast == slow, || format!("{} in {}: {fast} vs {slow}", m.name(), r.name()))?;
            pairs += 1;
            closed += usize::from(fast);
        }
    }
    Ok(format!("{pairs} pairs agree ({closed} existentially closed)"))
}

fn determinism() -> Check {
    let commands: Vec<Vec<&str>> = vec![
        vec!["psc-search", "--sentence", "forall x. exists y. E(x,y)", "--k", "3", "--max-size", "4"],
        vec!["psc-search", "--theory", "loop_contrast", "--k", "1", "--max-size", "4"],
        vec!["pce-search", "--sentence", "fewer_than_3", "--vocab", "empty", "--k", "2", "--max-size", "4"],
        vec!["pce-search", "--sentence", "no_3_cycle", "--k", "3", "--max-size", "4"],
        vec!["duality-test", "--sentence", "forall x. exists y. E(x,y)", "--k", "3", "--max-size", "4"],
        vec!["duality-test", "--sentence", "has_3_cycle", "--k", "2", "--max-size", "4", "--no-dedup"],
        vec!["equiv", "--sentence", "exists x. E(x,x)", "--other", "forall x. E(x,x)", "--max-size", "3"],
        vec!["equiv", "--sentence", "psi_2", "--other", "psi_2", "--max-size", "4"],
    ];
    for cmd in &commands {
        let mut outputs = Vec::new();
        for jobs in ["1", "8"] {
            let mut args = vec!["preslab"];
            args.extend(cmd.iter().copied());
            args.extend(["--format", "json", "--jobs", jobs]);
            let mut out = Vec::new();
            let mut err = Vec::new();
            let code = preslab::cli::run(args, &mut out, &mut err);
            ensure(code == 0 || code == 1, || {
                format!("{cmd:?} exited {code}: {}", String::from_utf8_lossy(&err))
            })?;
            outputs.push(out);
        }
        ensure(outputs[0] == outputs[1], || format!("{cmd:?}: output differs between 1 and 8 jobs"))?;
    }
    Ok(format!("{} search commands byte-identical at 1 and 8 jobs", commands.len()))
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "loop_pair core size", limit: Duration::from_secs(1), run: core_size_example },
        Criterion { id: 2, name: "cycle has only the full core", limit: Duration::from_secs(5), run: cycle_only_core },
        Criterion { id: 3, name: "witness sets are cores", limit: Duration::from_secs(120), run: witness_core_theorem },
        Criterion { id: 4, name: "core/cover duality", limit: Duration::from_secs(600), run: duality },
        Criterion { id: 5, name: "PCE hierarchy strictness", limit: Duration::from_secs(60), run: pce_hierarchy },
        Criterion { id: 6, name: "relativization law", limit: Duration::from_secs(300), run: relativization_law },
        Criterion { id: 7, name: "psi prefix replay and phi monotonicity", limit: Duration::from_secs(300), run: lemma_replay },
        Criterion { id: 8, name: "prenex soundness", limit: Duration::from_secs(120), run: prenex_soundness },
        Criterion { id: 9, name: "e.c. characterization vs formula oracle", limit: Duration::from_secs(120), run: ec_oracle },
        Criterion { id: 10, name: "determinism across job counts", limit: Duration::from_secs(300), run: determinism },
    ];
    let filter: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let verdict = match result {
            Ok(detail) if took <= c.limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; exceeded {:?}", c.limit)),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!("{} criterion {:>2} {}: {} [{:.2}s]", verdict.0, c.id, c.name, verdict.1, took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
