use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use preslab::analysis::{duality_check, psc_counterexample_search};
use preslab::corpus::{gen_sentence, SentenceFamily};
use preslab::{ExecMode, SearchBudget, Theory, Vocabulary};

fn modes() -> [(&'static str, ExecMode); 2] {
    [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)]
}

fn psc_search(c: &mut Criterion) {
    let graph = Arc::new(Vocabulary::graph());
    let cyc = Theory::single(gen_sentence(&SentenceFamily::HasCycle(3)).unwrap()).unwrap();
    let mut group = c.benchmark_group("psc_has_3_cycle_k3_size4");
    group.sample_size(10);
    for (name, mode) in modes() {
        let budget = SearchBudget::new(4).with_exec(mode);
        group.bench_with_input(BenchmarkId::from_parameter(name), &budget, |b, budget| {
            b.iter(|| black_box(psc_counterexample_search(&cyc, graph.clone(), 3, budget).unwrap()))
        });
    }
    group.finish();
}

fn duality(c: &mut Criterion) {
    let graph = Arc::new(Vocabulary::graph());
    let dom = gen_sentence(&SentenceFamily::Domination).unwrap();
    let mut group = c.benchmark_group("duality_domination_k2_size4");
    group.sample_size(10);
    for (name, mode) in modes() {
        let budget = SearchBudget::new(4).with_exec(mode);
        group.bench_with_input(BenchmarkId::from_parameter(name), &budget, |b, budget| {
            b.iter(|| black_box(duality_check(&dom, graph.clone(), 2, budget).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, psc_search, duality);
criterion_main!(benches);
