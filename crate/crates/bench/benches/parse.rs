use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use storax::automaton::{recognizes, RunBudget};
use storax::parse::{coarse_to_fine_nbest, enumerate_runs_best_first, LoopCondition, SearchLimits};
use storax::transform::{determinize_powerset, to_fsa};
use storax::{bundled, Strategy, StrategySpec};
use storax_bench::{blocks, tropical, viterbi_word};

fn recognition(c: &mut Criterion) {
    let tss = bundled::load("tss-anbncn").unwrap();
    let mut g = c.benchmark_group("recognize/tss-anbncn");
    for n in [2, 4, 8] {
        let w = blocks("abc", n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| recognizes(tss.base(), black_box(w), RunBudget::for_word(w.len())).unwrap())
        });
    }
    g.finish();
}

fn stream(c: &mut Criterion) {
    let m = tropical("count-anbn");
    let mut g = c.benchmark_group("stream/count-anbn");
    for n in [4, 16, 64] {
        let w = blocks("ab", n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| enumerate_runs_best_first(&m, black_box(w), SearchLimits::for_word(w.len())).count())
        });
    }
    g.finish();
}

fn nbest(c: &mut Criterion) {
    let m = tropical("pd-viterbi");
    let count = Strategy::instantiate(&StrategySpec::Count, &m.base.storage.spec()).unwrap();
    let mut g = c.benchmark_group("nbest/pd-viterbi");
    for n in [1, 2, 3] {
        let w = viterbi_word(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &w, |b, w| {
            b.iter(|| coarse_to_fine_nbest(&m, &count, 1, black_box(w), SearchLimits::for_word(w.len()), LoopCondition::AsPrinted).unwrap())
        });
    }
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let pd2 = bundled::load("pd2-equal-length").unwrap().base().clone();
    let det = determinize_powerset(&pd2);
    let w = storax::storage::syms("abab");
    c.bench_function("recognize/det-powerset(pd2)", |b| {
        b.iter(|| recognizes(&det, black_box(&w), RunBudget::for_word(w.len())).unwrap())
    });

    let tss = bundled::load("tss-anbncn").unwrap().base().clone();
    let cf = Strategy::instantiate(&StrategySpec::Cf, &tss.storage.spec()).unwrap();
    let top = Strategy::instantiate(&StrategySpec::Top, cf.target()).unwrap();
    let flat = storax::approx::approximate_automaton(&tss, &cf.then(&top).unwrap()).unwrap().automaton;
    c.bench_function("to_fsa/cf∘top(tss)", |b| b.iter(|| to_fsa(black_box(&flat), 10_000).unwrap()));
}

criterion_group!(benches, recognition, stream, nbest, transforms);
criterion_main!(benches);
