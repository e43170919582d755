#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use storax::automaton::accepted_words;
use storax::storage::syms;
use storax::{Automaton, ExtNat, Strategy, StrategySpec, StorageSpec, Sym, Tropical, WeightedAutomaton};

pub type Word = Vec<Sym>;

/// Every word over `alphabet` of length at most `n`, shortest first.
pub fn words_up_to(alphabet: &[Sym], n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for a in alphabet {
                let mut v: Word = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `L(m) ∩ Σ^{≤n}`; panics if the sample was truncated.
pub fn language(m: &Automaton, n: usize) -> BTreeSet<Word> {
    let s = accepted_words(m, n, 200_000).expect("language sample");
    assert!(!s.truncated, "language sample truncated");
    s.words
}

/// The words of `Σ^{≤n}` satisfying `pred`.
pub fn gold(alphabet: &[Sym], n: usize, pred: impl Fn(&[Sym]) -> bool) -> BTreeSet<Word> {
    words_up_to(alphabet, n).into_iter().filter(|w| pred(w)).collect()
}

pub fn render(w: &[Sym]) -> String {
    w.iter().map(Sym::as_str).collect::<Vec<_>>().join(" ")
}

pub fn unit_costs(m: &Automaton) -> WeightedAutomaton<Tropical> {
    let n = m.transitions.len();
    WeightedAutomaton::with_weights(m.clone(), Tropical, vec![ExtNat::Fin(1); n])
}

/// `a^i b^j c^k …` block structure: counts of each letter of `order`, or
/// `None` if `w` is not of that shape.
pub fn blocks(w: &[Sym], order: &str) -> Option<Vec<usize>> {
    let order = syms(order);
    let mut counts = vec![0; order.len()];
    let mut at = 0;
    for s in w {
        while at < order.len() && order[at] != *s {
            at += 1;
        }
        if at == order.len() {
            return None;
        }
        counts[at] += 1;
    }
    Some(counts)
}

fn merge_all(gamma: &[Sym], class: &str) -> BTreeMap<Sym, Sym> {
    gamma.iter().map(|g| (g.clone(), Sym::from(class))).collect()
}

fn rename(gamma: &[Sym]) -> BTreeMap<Sym, Sym> {
    gamma.iter().map(|g| (g.clone(), Sym::from(format!("{g}~")))).collect()
}

/// Catalogue strategies that apply to `source`, composed chains included.
pub fn applicable(source: &StorageSpec) -> Vec<Strategy> {
    let mut specs = vec![StrategySpec::Identity];
    let mut chains: Vec<Strategy> = Vec::new();
    match source {
        StorageSpec::Count => specs.push(StrategySpec::EvenOdd),
        StorageSpec::Pushdown { gamma, .. } => {
            specs.extend([
                StrategySpec::Top,
                StrategySpec::TopK(1),
                StrategySpec::TopK(2),
                StrategySpec::Uniq,
                StrategySpec::Merge(merge_all(gamma, "x")),
                StrategySpec::Merge(rename(gamma)),
                StrategySpec::BoundedK(1),
                StrategySpec::BoundedK(3),
                StrategySpec::IncompK(merge_all(gamma, "x"), 2),
                StrategySpec::Count,
            ]);
            let count = Strategy::instantiate(&StrategySpec::Count, source).unwrap();
            let eo = Strategy::instantiate(&StrategySpec::EvenOdd, count.target()).unwrap();
            chains.push(count.then(&eo).unwrap());
        }
        StorageSpec::TreeStack { gamma, .. } => {
            specs.extend([StrategySpec::Cf, StrategySpec::Merge(merge_all(gamma, "x")), StrategySpec::Merge(rename(gamma))]);
            let cf = Strategy::instantiate(&StrategySpec::Cf, source).unwrap();
            for next in [StrategySpec::Top, StrategySpec::TopK(2), StrategySpec::Uniq, StrategySpec::BoundedK(3), StrategySpec::Count] {
                let s = Strategy::instantiate(&next, cf.target()).unwrap();
                chains.push(cf.then(&s).unwrap());
            }
        }
        _ => {}
    }
    let mut out: Vec<Strategy> = specs.iter().map(|s| Strategy::instantiate(s, source).unwrap()).collect();
    out.extend(chains);
    out
}
