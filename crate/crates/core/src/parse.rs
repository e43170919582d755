//! Best-first run enumeration and coarse-to-fine n-best parsing.
//!
//! The search graph is the product of an automaton with the input word.
//! Nodes are set nodes, so a frontier entry is one transition sequence; the
//! frontier is ordered by weight with ties broken by the lexicographically
//! smaller index sequence.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;

use crate::approx::{approximate_weighted, Strategy, WeightedApproximation};
use crate::automaton::{set_step, witness_trace, Automaton, Run, SetNode, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::storage::Sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Longest transition sequence that is extended further.
    pub max_run_length: usize,
    /// Frontier pops before the stream gives up.
    pub max_expansions: usize,
    /// Runs emitted before the stream stops.
    pub max_enumerated: usize,
}

impl SearchLimits {
    pub fn for_word(len: usize) -> Self {
        SearchLimits {
            max_run_length: 10 * len + 100,
            max_expansions: 1_000_000,
            max_enumerated: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoredRun<V> {
    pub run: Run,
    pub weight: V,
}

struct Entry<S: Semiring> {
    weight: S::Value,
    seq: Vec<usize>,
    node: SetNode,
    /// Nodes reached by the trailing ε-steps, with their weights.
    eps: Rc<Vec<(SetNode, S::Value)>>,
    sr: S,
    clash: Rc<RefCell<Option<(String, String)>>>,
}

impl<S: Semiring> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Semiring> Eq for Entry<S> {}

impl<S: Semiring> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Semiring> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_weight = match self.sr.compare(&self.weight, &other.weight) {
            Some(o) => o,
            None => {
                self.clash
                    .borrow_mut()
                    .get_or_insert_with(|| (self.weight.to_string(), other.weight.to_string()));
                Ordering::Equal
            }
        };
        by_weight.then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Accepting runs of an automaton on `w` in non-increasing weight order.
///
/// Extensions must not increase weights; a violation ends the stream with
/// [`Error::NonMonotoneWeight`].
pub struct RunStream<'a, S: Semiring> {
    m: &'a WeightedAutomaton<S>,
    w: Vec<Sym>,
    limits: SearchLimits,
    heap: BinaryHeap<Entry<S>>,
    clash: Rc<RefCell<Option<(String, String)>>>,
    expansions: usize,
    emitted: usize,
    truncated: bool,
    zero_weight_cycle: bool,
    failed: bool,
}

pub fn enumerate_runs_best_first<'a, S: Semiring>(m: &'a WeightedAutomaton<S>, w: &[Sym], limits: SearchLimits) -> RunStream<'a, S> {
    let clash = Rc::new(RefCell::new(None));
    let mut heap = BinaryHeap::new();
    for &q in &m.base.initial {
        let node = SetNode::start(&m.base, q);
        heap.push(Entry {
            weight: m.semiring.one(),
            seq: Vec::new(),
            eps: Rc::new(vec![(node.clone(), m.semiring.one())]),
            node,
            sr: m.semiring.clone(),
            clash: clash.clone(),
        });
    }
    RunStream {
        m,
        w: w.to_vec(),
        limits,
        heap,
        clash,
        expansions: 0,
        emitted: 0,
        truncated: false,
        zero_weight_cycle: false,
        failed: false,
    }
}

impl<S: Semiring> RunStream<'_, S> {
    /// An upper bound on the weight of every run not yet emitted; `None`
    /// once the frontier is empty.
    pub fn upper_bound(&self) -> Option<S::Value> {
        if self.emitted >= self.limits.max_enumerated || self.failed {
            return None;
        }
        self.heap.peek().map(|e| e.weight.clone())
    }

    /// Some limit cut the search.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// An ε-cycle that keeps the weight unchanged was followed.
    pub fn zero_weight_cycle(&self) -> bool {
        self.zero_weight_cycle
    }

    pub fn expansions(&self) -> usize {
        self.expansions
    }

    fn clash_error(&self) -> Option<Error> {
        self.clash.borrow().clone().map(|(a, b)| Error::Incomparable(a, b))
    }

    fn expand(&mut self, e: &Entry<S>) -> Result<()> {
        let m = &self.m.base;
        let sr = &self.m.semiring;
        if e.seq.len() >= self.limits.max_run_length {
            if (0..m.transitions.len()).any(|t| m.transitions[t].from == e.node.state) {
                self.truncated = true;
            }
            return Ok(());
        }
        for t in 0..m.transitions.len() {
            let Some(node) = set_step(m, Some(&self.w), &e.node, t)? else { continue };
            let weight = sr.times(&e.weight, &self.m.weight(t));
            match sr.compare(&weight, &e.weight) {
                Some(Ordering::Less | Ordering::Equal) => {}
                Some(Ordering::Greater) => {
                    return Err(Error::NonMonotoneWeight {
                        transition: m.transitions[t].id.clone(),
                    })
                }
                None => return Err(Error::Incomparable(weight.to_string(), e.weight.to_string())),
            }
            let eps = if node.pos == e.node.pos {
                if e.eps.iter().any(|(n, v)| *n == node && *v == weight) {
                    self.zero_weight_cycle = true;
                }
                let mut v = (*e.eps).clone();
                v.push((node.clone(), weight.clone()));
                Rc::new(v)
            } else {
                Rc::new(vec![(node.clone(), weight.clone())])
            };
            let mut seq = e.seq.clone();
            seq.push(t);
            self.heap.push(Entry {
                weight,
                seq,
                node,
                eps,
                sr: sr.clone(),
                clash: self.clash.clone(),
            });
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<Option<ScoredRun<S::Value>>> {
        let m = &self.m.base;
        if self.emitted >= self.limits.max_enumerated {
            if !self.heap.is_empty() {
                self.truncated = true;
            }
            return Ok(None);
        }
        while let Some(e) = self.heap.pop() {
            if let Some(err) = self.clash_error() {
                return Err(err);
            }
            if self.expansions >= self.limits.max_expansions {
                self.truncated = true;
                self.heap.clear();
                return Ok(None);
            }
            self.expansions += 1;
            self.expand(&e)?;
            if e.node.pos == self.w.len() && m.is_final(e.node.state) {
                let run = rebuild(m, &self.w, &e.seq)?.expect("a frontier path replays");
                self.emitted += 1;
                return Ok(Some(ScoredRun { run, weight: e.weight }));
            }
        }
        Ok(None)
    }
}

impl<S: Semiring> Iterator for RunStream<'_, S> {
    type Item = Result<ScoredRun<S::Value>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.advance() {
            Ok(r) => r.map(Ok),
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// Replays `seq` on `w` from the first transition's source state and `c_i`.
fn rebuild(m: &Automaton, w: &[Sym], seq: &[usize]) -> Result<Option<Run>> {
    let start = match seq.first() {
        Some(&t) => m.transitions[t].from,
        None => match m.initial.iter().find(|&&q| m.is_final(q)) {
            Some(&q) => q,
            None => return Ok(None),
        },
    };
    let mut nodes = vec![SetNode::start(m, start)];
    for &t in seq {
        match set_step(m, Some(w), nodes.last().unwrap(), t)? {
            Some(n) => nodes.push(n),
            None => return Ok(None),
        }
    }
    let trace = witness_trace(m, Some(w), &nodes, seq)?;
    Ok(Some(Run {
        transitions: seq.to_vec(),
        trace,
    }))
}

/// `⟦ℳ⟧(w)` over a selective semiring: the weight of the first streamed
/// run, or `0̄` if the stream ends without one. `None` when a limit cut the
/// search before either happened.
pub fn best_run_weight<S: Semiring>(m: &WeightedAutomaton<S>, w: &[Sym], limits: SearchLimits) -> Result<Option<S::Value>> {
    if !m.semiring.is_selective() {
        return Err(Error::InvalidParameter(format!("{} is not selective", m.semiring.name())));
    }
    let mut stream = enumerate_runs_best_first(m, w, limits);
    match stream.next() {
        Some(r) => Ok(Some(r?.weight)),
        None if stream.truncated() => Ok(None),
        None => Ok(Some(m.semiring.zero())),
    }
}

/// Every sequence over the source transitions whose pointwise image is
/// `coarse`: the product of the per-position preimages.
pub fn preimage_sequences(preimages: &[Vec<usize>], coarse: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in coarse {
        let choices = preimages.get(c).map(Vec::as_slice).unwrap_or(&[]);
        out = out
            .iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&t| {
                    let mut s = prefix.clone();
                    s.push(t);
                    s
                })
            })
            .collect();
    }
    out
}

/// Checks only the storage behaviour of `seq`, starting at the source of
/// its first transition with `c_i` and threading states. Returns the word
/// read, or `None` when `seq` is not executable.
pub fn is_run(m: &Automaton, seq: &[usize]) -> Result<Option<Vec<Sym>>> {
    let Some(&first) = seq.first() else { return Ok(Some(Vec::new())) };
    let mut node = SetNode::start(m, m.transitions[first].from);
    let mut word = Vec::new();
    for &t in seq {
        match set_step(m, None, &node, t)? {
            Some(n) => node = n,
            None => return Ok(None),
        }
        word.extend(m.transitions[t].read.clone());
    }
    Ok(Some(word))
}

/// `seq` as a run on `w`: initial to final state, from `c_i`, reading all
/// of `w`.
pub fn run_on(m: &Automaton, w: &[Sym], seq: &[usize]) -> Result<Option<Run>> {
    let Some(run) = rebuild(m, w, seq)? else { return Ok(None) };
    let first = run.trace.first().unwrap();
    let last = run.trace.last().unwrap();
    let ok = m.is_initial(first.state) && m.is_final(last.state) && last.pos == w.len();
    Ok(ok.then_some(run))
}

/// Loop condition of the coarse-to-fine search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoopCondition {
    /// Continue while `|X| < n` or the worst weight in `X` is below the
    /// best remaining coarse weight.
    #[default]
    AsPrinted,
    /// Continue while `|X| < n` or the `n`-th best weight in `X` is below
    /// the best remaining coarse weight.
    NthBest,
}

#[derive(Clone, Debug)]
pub struct NBest<V> {
    /// At most `n` runs, best first.
    pub runs: Vec<ScoredRun<V>>,
    /// No limit cut the coarse search, so `runs` are `n` best runs.
    pub certified: bool,
    /// Coarse runs taken from the stream.
    pub coarse_runs: Vec<ScoredRun<V>>,
    /// Preimage sequences examined.
    pub candidates: usize,
    pub zero_weight_cycle: bool,
}

/// Sorts best first; ties go to the lexicographically smaller sequence.
pub fn rank<S: Semiring>(sr: &S, runs: &mut [ScoredRun<S::Value>]) {
    runs.sort_by(|a, b| {
        sr.compare(&b.weight, &a.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.run.transitions.cmp(&b.run.transitions))
    });
}

/// Coarse-to-fine `n`-best parsing of `w` with `app{A}ℳ` as coarse
/// automaton.
pub fn coarse_to_fine_nbest<S: Semiring>(
    m: &WeightedAutomaton<S>,
    a: &Strategy,
    n: usize,
    w: &[Sym],
    limits: SearchLimits,
    condition: LoopCondition,
) -> Result<NBest<S::Value>> {
    if !a.is_total() {
        return Err(Error::NotTotal(a.name().to_string()));
    }
    let approx = approximate_weighted(m, a)?;
    coarse_to_fine_with(m, &approx, n, w, limits, condition)
}

/// As [`coarse_to_fine_nbest`] with a prepared approximation.
pub fn coarse_to_fine_with<S: Semiring>(
    m: &WeightedAutomaton<S>,
    approx: &WeightedApproximation<S>,
    n: usize,
    w: &[Sym],
    limits: SearchLimits,
    condition: LoopCondition,
) -> Result<NBest<S::Value>> {
    let sr = &m.semiring;
    let mut out = NBest {
        runs: Vec::new(),
        certified: true,
        coarse_runs: Vec::new(),
        candidates: 0,
        zero_weight_cycle: false,
    };
    if n == 0 {
        return Ok(out);
    }
    let preimages = approx.preimages();
    let mut stream = enumerate_runs_best_first(&approx.automaton, w, limits);
    let mut found: Vec<ScoredRun<S::Value>> = Vec::new();
    loop {
        if found.len() >= n {
            let Some(bound) = stream.upper_bound() else { break };
            rank(sr, &mut found);
            let pivot = match condition {
                LoopCondition::AsPrinted => &found.last().unwrap().weight,
                LoopCondition::NthBest => &found[n - 1].weight,
            };
            match sr.compare(pivot, &bound) {
                Some(Ordering::Less) => {}
                Some(_) => break,
                None => return Err(Error::Incomparable(pivot.to_string(), bound.to_string())),
            }
        }
        let Some(next) = stream.next() else { break };
        let coarse = next?;
        for seq in preimage_sequences(&preimages, &coarse.run.transitions) {
            out.candidates += 1;
            if is_run(&m.base, &seq)?.is_none() {
                continue;
            }
            if let Some(run) = run_on(&m.base, w, &seq)? {
                let weight = m.run_weight(&seq);
                found.push(ScoredRun { run, weight });
            }
        }
        out.coarse_runs.push(coarse);
    }
    out.certified = !stream.truncated();
    out.zero_weight_cycle = stream.zero_weight_cycle();
    rank(sr, &mut found);
    found.truncate(n);
    out.runs = found;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::StrategySpec;
    use crate::automaton::{runs_on, RunBudget};
    use crate::semiring::{Boolean, ExtNat, Tropical};
    use crate::storage::{syms, CountStorage, Instr, Pred, StorageSpec};
    use std::sync::Arc;

    fn count_anbn() -> WeightedAutomaton<Tropical> {
        let mut m = Automaton::new(syms("ab"), Arc::new(CountStorage));
        m.add("1", "a", Pred::All, Instr::Inc, "1");
        m.add("1", "b", Pred::All, Instr::Dec, "2");
        m.add("2", "b", Pred::All, Instr::Dec, "2");
        m.add("2", "", Pred::Zero, Instr::Inc, "3");
        m.set_initial("1");
        m.set_final("3");
        let n = m.transitions.len();
        WeightedAutomaton::with_weights(m, Tropical, vec![ExtNat::Fin(1); n])
    }

    #[test]
    fn best_run_weight_is_the_word_weight() {
        let m = count_anbn();
        for w in ["aabb", "ab", "aab", ""] {
            let w = syms(w);
            let exact = crate::automaton::weight_of_word(&m, &w, RunBudget::for_word(w.len())).unwrap();
            assert_eq!(best_run_weight(&m, &w, SearchLimits::for_word(w.len())).unwrap(), Some(exact.value));
        }
        let counting = WeightedAutomaton::uniform(m.base.clone(), crate::semiring::Counting::default());
        assert!(best_run_weight(&counting, &syms("ab"), SearchLimits::for_word(2)).is_err());
    }

    #[test]
    fn preimages_are_products() {
        let pre = vec![vec![0], vec![1, 2], vec![]];
        assert_eq!(preimage_sequences(&pre, &[0, 1, 1]).len(), 4);
        assert_eq!(preimage_sequences(&pre, &[0, 1]), vec![vec![0, 1], vec![0, 2]]);
        assert!(preimage_sequences(&pre, &[2]).is_empty());
        assert_eq!(preimage_sequences(&pre, &[]), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn is_run_checks_storage_only() {
        let m = count_anbn();
        assert_eq!(is_run(&m.base, &[]).unwrap(), Some(vec![]));
        // dec on 0 fails
        assert_eq!(is_run(&m.base, &[1]).unwrap(), None);
        assert_eq!(is_run(&m.base, &[0, 1]).unwrap(), Some(syms("ab")));
        // starts in state 2, which is not initial, but is executable
        assert_eq!(is_run(&m.base, &[3]).unwrap(), Some(vec![]));
        assert!(run_on(&m.base, &[], &[3]).unwrap().is_none());
    }

    #[test]
    fn stream_on_parity_approximation() {
        let m = count_anbn();
        let eo = Strategy::instantiate(&StrategySpec::EvenOdd, &StorageSpec::Count).unwrap();
        let ap = approximate_weighted(&m, &eo).unwrap();
        let w = syms("bb");
        let runs: Vec<_> = enumerate_runs_best_first(&ap.automaton, &w, SearchLimits::for_word(2))
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(runs[0].weight, ExtNat::Fin(3));
        assert!(runs.windows(2).all(|p| Tropical.leq(&p[1].weight, &p[0].weight)));
        let none: Vec<_> = enumerate_runs_best_first(&m, &w, SearchLimits::for_word(2)).collect();
        assert!(none.is_empty());
    }

    #[test]
    fn stream_matches_exhaustive_runs() {
        let m = count_anbn();
        let w = syms("aaabbb");
        let all = runs_on(&m.base, &w, RunBudget::for_word(6)).unwrap();
        let streamed: Vec<_> = enumerate_runs_best_first(&m, &w, SearchLimits::for_word(6))
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(streamed.len(), all.runs.len());
        assert_eq!(streamed[0].run, all.runs[0]);
    }

    #[test]
    fn nbest_of_count_with_parity() {
        let m = count_anbn();
        let eo = Strategy::instantiate(&StrategySpec::EvenOdd, &StorageSpec::Count).unwrap();
        let w = syms("aabb");
        let res = coarse_to_fine_nbest(&m, &eo, 2, &w, SearchLimits::for_word(4), LoopCondition::AsPrinted).unwrap();
        assert!(res.certified);
        assert_eq!(res.runs.len(), 1);
        assert_eq!(m.base.ids(&res.runs[0].run.transitions), ["t1", "t1", "t2", "t3", "t4"]);
        assert_eq!(res.runs[0].weight, ExtNat::Fin(5));
        let zero = coarse_to_fine_nbest(&m, &eo, 0, &w, SearchLimits::for_word(4), LoopCondition::AsPrinted).unwrap();
        assert!(zero.runs.is_empty() && zero.coarse_runs.is_empty());
    }

    #[test]
    fn partial_strategies_are_refused() {
        let mut m = Automaton::new(syms("a"), Arc::new(crate::storage::PushdownStorage::new(syms("a"), crate::storage::PdFlavor::Plain)));
        m.add("1", "a", Pred::All, Instr::Push("a".into()), "1");
        m.set_initial("1");
        m.set_final("1");
        let wm = WeightedAutomaton::uniform(m, Boolean);
        let bd = Strategy::instantiate(&StrategySpec::BoundedK(2), &wm.base.storage.spec()).unwrap();
        let err = coarse_to_fine_nbest(&wm, &bd, 1, &syms("a"), SearchLimits::for_word(1), LoopCondition::AsPrinted);
        assert!(matches!(err, Err(Error::NotTotal(_))));
    }

    #[test]
    fn increasing_weights_are_rejected() {
        let mut m = Automaton::new(syms("a"), Arc::new(CountStorage));
        m.add("1", "a", Pred::All, Instr::Stay, "1");
        m.set_initial("1");
        m.set_final("1");
        let wm = WeightedAutomaton::with_weights(m, crate::semiring::Counting::default(), vec![ExtNat::Fin(2)]);
        let got: Vec<_> = enumerate_runs_best_first(&wm, &syms("aa"), SearchLimits::for_word(2)).collect();
        assert!(got.iter().any(|r| matches!(r, Err(Error::NonMonotoneWeight { .. }))));
    }

    #[test]
    fn limits_flag_truncation() {
        let mut m = Automaton::new(syms("a"), Arc::new(CountStorage));
        m.add("1", "", Pred::All, Instr::Inc, "1");
        m.add("1", "a", Pred::All, Instr::Stay, "2");
        m.set_initial("1");
        m.set_final("2");
        let wm = WeightedAutomaton::uniform(m, Tropical);
        let limits = SearchLimits { max_run_length: 5, max_expansions: 1000, max_enumerated: 100 };
        let mut s = enumerate_runs_best_first(&wm, &syms("a"), limits);
        let runs: Vec<_> = s.by_ref().collect::<Result<_>>().unwrap();
        assert_eq!(runs.len(), 5);
        assert!(s.truncated());
    }
}
