//! `(S, Σ)`- and `(S, Σ, K)`-automata: stepping, runs, languages, weights.
//!
//! Run enumeration works on *set nodes* `(q, position, D)` where `D` is the
//! set of storage configurations reachable by one fixed transition sequence.
//! A transition sequence is then exactly one path, so a run is found once
//! even when a nondeterministic storage admits several traces for it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::{self, Display};

use crate::error::{Error, Result};
use crate::semiring::{product_seq, sum_finite, Semiring};
use crate::storage::{render_word, successor_set, Config, Instr, Pred, StorageRef, Sym};

pub type State = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub id: String,
    pub from: State,
    /// `None` is `ε`.
    pub read: Option<Sym>,
    pub pred: Pred,
    pub instr: Instr,
    pub to: State,
}

impl Transition {
    fn reads_at(&self, w: &[Sym], pos: usize) -> Option<usize> {
        match &self.read {
            None => Some(pos),
            Some(a) => (w.get(pos) == Some(a)).then_some(pos + 1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Automaton {
    pub alphabet: Vec<Sym>,
    pub storage: StorageRef,
    /// State names; a state is its index.
    pub states: Vec<String>,
    pub initial: Vec<State>,
    pub finals: Vec<State>,
    pub transitions: Vec<Transition>,
}

impl Automaton {
    pub fn new(alphabet: Vec<Sym>, storage: StorageRef) -> Self {
        Automaton {
            alphabet,
            storage,
            states: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
            transitions: Vec::new(),
        }
    }

    /// Index of the state called `name`, adding it when new.
    pub fn state(&mut self, name: &str) -> State {
        match self.states.iter().position(|s| s == name) {
            Some(q) => q,
            None => {
                self.states.push(name.to_string());
                self.states.len() - 1
            }
        }
    }

    pub fn state_index(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name)
    }

    pub fn set_initial(&mut self, name: &str) {
        let q = self.state(name);
        if !self.initial.contains(&q) {
            self.initial.push(q);
        }
    }

    pub fn set_final(&mut self, name: &str) {
        let q = self.state(name);
        if !self.finals.contains(&q) {
            self.finals.push(q);
        }
    }

    /// Adds `(from, read, pred, instr, to)` with id `t{n}`; `read = ""` is `ε`.
    pub fn add(&mut self, from: &str, read: &str, pred: Pred, instr: Instr, to: &str) -> usize {
        let id = format!("t{}", self.transitions.len() + 1);
        let (from, to) = (self.state(from), self.state(to));
        let read = (!read.is_empty()).then(|| Sym::from(read));
        self.transitions.push(Transition {
            id,
            from,
            read,
            pred,
            instr,
            to,
        });
        self.transitions.len() - 1
    }

    pub fn is_initial(&self, q: State) -> bool {
        self.initial.contains(&q)
    }

    pub fn is_final(&self, q: State) -> bool {
        self.finals.contains(&q)
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.id == id)
    }

    pub fn ids(&self, seq: &[usize]) -> Vec<String> {
        seq.iter().map(|&i| self.transitions[i].id.clone()).collect()
    }

    pub fn render_transition(&self, i: usize) -> String {
        let t = &self.transitions[i];
        format!(
            "{}: ({}, {}, {}, {}, {})",
            t.id,
            self.states[t.from],
            t.read.as_ref().map_or("ε".to_string(), Sym::to_string),
            t.pred,
            t.instr,
            self.states[t.to]
        )
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.alphabet.is_empty() {
            out.push(Violation::EmptyAlphabet);
        }
        let n = self.states.len();
        let mut names = HashSet::new();
        for s in &self.states {
            if !names.insert(s) {
                out.push(Violation::DuplicateState(s.clone()));
            }
        }
        for &q in self.initial.iter().chain(&self.finals) {
            if q >= n {
                out.push(Violation::StateOutOfRange { transition: None, state: q });
            }
        }
        let mut ids = HashSet::new();
        for t in &self.transitions {
            if !ids.insert(&t.id) {
                out.push(Violation::DuplicateId(t.id.clone()));
            }
            for q in [t.from, t.to] {
                if q >= n {
                    out.push(Violation::StateOutOfRange {
                        transition: Some(t.id.clone()),
                        state: q,
                    });
                }
            }
            if let Some(a) = &t.read {
                if !self.alphabet.contains(a) {
                    out.push(Violation::UnknownSymbol {
                        transition: t.id.clone(),
                        symbol: a.clone(),
                    });
                }
            }
            if !self.storage.has_predicate(&t.pred) {
                out.push(Violation::UnknownPredicate {
                    transition: t.id.clone(),
                    pred: t.pred.clone(),
                });
            }
            if !self.storage.has_instruction(&t.instr) {
                out.push(Violation::UnknownInstruction {
                    transition: t.id.clone(),
                    instr: t.instr.clone(),
                });
            }
        }
        out
    }

    /// `validate`, as a `Result`.
    pub fn checked(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::Invalid(v))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyAlphabet,
    DuplicateState(String),
    DuplicateId(String),
    StateOutOfRange { transition: Option<String>, state: State },
    UnknownSymbol { transition: String, symbol: Sym },
    UnknownPredicate { transition: String, pred: Pred },
    UnknownInstruction { transition: String, instr: Instr },
    MissingWeight(String),
    ExtraWeights(usize),
}

impl Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet => f.write_str("alphabet is empty"),
            Violation::DuplicateState(s) => write!(f, "state `{s}` declared twice"),
            Violation::DuplicateId(id) => write!(f, "transition id `{id}` used twice"),
            Violation::StateOutOfRange { transition: Some(t), state } => {
                write!(f, "transition `{t}` refers to unknown state {state}")
            }
            Violation::StateOutOfRange { transition: None, state } => {
                write!(f, "initial or final state {state} is unknown")
            }
            Violation::UnknownSymbol { transition, symbol } => {
                write!(f, "transition `{transition}` reads `{symbol}` outside the alphabet")
            }
            Violation::UnknownPredicate { transition, pred } => {
                write!(f, "transition `{transition}` uses unknown predicate `{pred}`")
            }
            Violation::UnknownInstruction { transition, instr } => {
                write!(f, "transition `{transition}` uses unknown instruction `{instr}`")
            }
            Violation::MissingWeight(id) => write!(f, "transition `{id}` has no weight"),
            Violation::ExtraWeights(n) => write!(f, "{n} weights but fewer transitions"),
        }
    }
}

/// An `ℳ`-configuration `(q, c, w[pos..])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachineConfiguration {
    pub state: State,
    pub storage: Config,
    /// Number of input symbols consumed so far.
    pub pos: usize,
}

impl MachineConfiguration {
    pub fn render(&self, m: &Automaton, w: &[Sym]) -> String {
        format!(
            "({}, {}, {})",
            m.states[self.state],
            self.storage,
            render_word(&w[self.pos.min(w.len())..])
        )
    }
}

/// A transition sequence together with a configuration trace witnessing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    /// Transition indices.
    pub transitions: Vec<usize>,
    /// `|transitions| + 1` configurations.
    pub trace: Vec<MachineConfiguration>,
}

impl Run {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Replays the transitions with [`step`] and checks the trace.
    pub fn replays(&self, m: &Automaton, w: &[Sym]) -> Result<bool> {
        if self.trace.len() != self.transitions.len() + 1 {
            return Ok(false);
        }
        for (k, &t) in self.transitions.iter().enumerate() {
            if !step(m, w, &self.trace[k], t)?.contains(&self.trace[k + 1]) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunBudget {
    pub max_steps: usize,
    pub max_configs: usize,
}

impl RunBudget {
    pub fn for_word(len: usize) -> Self {
        RunBudget {
            max_steps: 10 * len + 100,
            max_configs: 1_000_000,
        }
    }
}

/// `cfg ⊢_τ cfg′` for every `cfg′` in the result.
pub fn step(m: &Automaton, w: &[Sym], cfg: &MachineConfiguration, t: usize) -> Result<Vec<MachineConfiguration>> {
    let tr = &m.transitions[t];
    if tr.from != cfg.state {
        return Ok(vec![]);
    }
    let Some(pos) = tr.reads_at(w, cfg.pos) else { return Ok(vec![]) };
    if !m.storage.test(&tr.pred, &cfg.storage) {
        return Ok(vec![]);
    }
    Ok(successor_set(m.storage.as_ref(), &tr.instr, &cfg.storage)?
        .into_iter()
        .map(|storage| MachineConfiguration {
            state: tr.to,
            storage,
            pos,
        })
        .collect())
}

/// A state, an input position and every storage configuration reachable by
/// one transition sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct SetNode {
    pub state: State,
    pub pos: usize,
    pub configs: Vec<Config>,
}

impl SetNode {
    pub fn start(m: &Automaton, q: State) -> SetNode {
        SetNode {
            state: q,
            pos: 0,
            configs: vec![m.storage.initial()],
        }
    }
}

/// Successor set node under transition `t`; `None` when `t` cannot fire.
/// With `w = None` the input is not checked and positions count symbols read.
pub(crate) fn set_step(m: &Automaton, w: Option<&[Sym]>, node: &SetNode, t: usize) -> Result<Option<SetNode>> {
    let tr = &m.transitions[t];
    if tr.from != node.state {
        return Ok(None);
    }
    let pos = match w {
        Some(w) => match tr.reads_at(w, node.pos) {
            Some(p) => p,
            None => return Ok(None),
        },
        None => node.pos + usize::from(tr.read.is_some()),
    };
    let mut next = Vec::new();
    for c in &node.configs {
        if m.storage.test(&tr.pred, c) {
            next.extend(successor_set(m.storage.as_ref(), &tr.instr, c)?);
        }
    }
    if next.is_empty() {
        return Ok(None);
    }
    next.sort();
    next.dedup();
    Ok(Some(SetNode {
        state: tr.to,
        pos,
        configs: next,
    }))
}

/// Rebuilds one concrete trace along a path of set nodes.
pub(crate) fn witness_trace(m: &Automaton, w: Option<&[Sym]>, nodes: &[SetNode], seq: &[usize]) -> Result<Vec<MachineConfiguration>> {
    let cfg = |n: &SetNode, c: &Config| MachineConfiguration {
        state: n.state,
        storage: c.clone(),
        pos: n.pos,
    };
    let empty: Vec<Sym> = Vec::new();
    let word = w.unwrap_or(&empty);
    let last = nodes.last().expect("a path has at least one node");
    let mut trace = vec![cfg(last, &last.configs[0])];
    for k in (0..seq.len()).rev() {
        let target = trace.last().unwrap().storage.clone();
        let tr = &m.transitions[seq[k]];
        let mut found = None;
        for c in &nodes[k].configs {
            if m.storage.test(&tr.pred, c) && successor_set(m.storage.as_ref(), &tr.instr, c)?.contains(&target) {
                found = Some(c.clone());
                break;
            }
        }
        let c = found.expect("every configuration of a set node has a predecessor");
        trace.push(cfg(&nodes[k], &c));
    }
    trace.reverse();
    if w.is_some() {
        debug_assert!(trace.windows(2).zip(seq).all(|(p, &t)| step(m, word, &p[0], t)
            .map(|s| s.contains(&p[1]))
            .unwrap_or(false)));
    }
    Ok(trace)
}

#[derive(Clone, Debug)]
pub struct RunSet {
    pub runs: Vec<Run>,
    /// Some branch was cut by the budget.
    pub truncated: bool,
}

/// `Runs_ℳ(w)` up to the budget, ordered by transition sequence.
pub fn runs_on(m: &Automaton, w: &[Sym], budget: RunBudget) -> Result<RunSet> {
    struct Search<'a> {
        m: &'a Automaton,
        w: &'a [Sym],
        budget: RunBudget,
        visited: usize,
        truncated: bool,
        nodes: Vec<SetNode>,
        seq: Vec<usize>,
        runs: Vec<Run>,
    }

    impl Search<'_> {
        fn accept_here(&mut self) -> Result<()> {
            let n = self.nodes.last().unwrap();
            if n.pos == self.w.len() && self.m.is_final(n.state) {
                let trace = witness_trace(self.m, Some(self.w), &self.nodes, &self.seq)?;
                self.runs.push(Run {
                    transitions: self.seq.clone(),
                    trace,
                });
            }
            Ok(())
        }

        fn dfs(&mut self) -> Result<()> {
            self.accept_here()?;
            let node = self.nodes.last().unwrap().clone();
            for t in 0..self.m.transitions.len() {
                let Some(next) = set_step(self.m, Some(self.w), &node, t)? else { continue };
                if self.seq.len() >= self.budget.max_steps || self.visited >= self.budget.max_configs {
                    self.truncated = true;
                    continue;
                }
                self.visited += 1;
                self.nodes.push(next);
                self.seq.push(t);
                self.dfs()?;
                self.nodes.pop();
                self.seq.pop();
            }
            Ok(())
        }
    }

    let mut s = Search {
        m,
        w,
        budget,
        visited: 0,
        truncated: false,
        nodes: Vec::new(),
        seq: Vec::new(),
        runs: Vec::new(),
    };
    for &q in &m.initial {
        s.nodes = vec![SetNode::start(m, q)];
        s.dfs()?;
    }
    let mut runs = s.runs;
    runs.sort_by(|a, b| a.transitions.cmp(&b.transitions));
    Ok(RunSet {
        runs,
        truncated: s.truncated,
    })
}

#[derive(Clone, Debug)]
pub struct Recognition {
    pub accepted: bool,
    pub witness: Option<Run>,
    /// The search stopped at the budget without finding a run.
    pub truncated: bool,
}

/// Breadth-first membership test with a shortest witness.
pub fn recognizes(m: &Automaton, w: &[Sym], budget: RunBudget) -> Result<Recognition> {
    let mut parent: HashMap<MachineConfiguration, Option<(MachineConfiguration, usize)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &q in &m.initial {
        let c = MachineConfiguration {
            state: q,
            storage: m.storage.initial(),
            pos: 0,
        };
        if parent.insert(c.clone(), None).is_none() {
            queue.push_back((c, 0usize));
        }
    }
    let mut truncated = false;
    while let Some((c, depth)) = queue.pop_front() {
        if c.pos == w.len() && m.is_final(c.state) {
            let mut transitions = Vec::new();
            let mut trace = vec![c.clone()];
            let mut cur = c;
            while let Some(Some((prev, t))) = parent.get(&cur) {
                transitions.push(*t);
                trace.push(prev.clone());
                cur = prev.clone();
            }
            transitions.reverse();
            trace.reverse();
            return Ok(Recognition {
                accepted: true,
                witness: Some(Run { transitions, trace }),
                truncated: false,
            });
        }
        if depth >= budget.max_steps {
            truncated = true;
            continue;
        }
        for t in 0..m.transitions.len() {
            for next in step(m, w, &c, t)? {
                if parent.contains_key(&next) {
                    continue;
                }
                if parent.len() >= budget.max_configs {
                    truncated = true;
                    continue;
                }
                parent.insert(next.clone(), Some((c.clone(), t)));
                queue.push_back((next, depth + 1));
            }
        }
    }
    Ok(Recognition {
        accepted: false,
        witness: None,
        truncated,
    })
}

/// Membership with the default budget; truncation counts as rejection.
pub fn accepts(m: &Automaton, w: &[Sym]) -> Result<bool> {
    Ok(recognizes(m, w, RunBudget::for_word(w.len()))?.accepted)
}

#[derive(Clone, Debug)]
pub struct LanguageSample {
    pub words: BTreeSet<Vec<Sym>>,
    /// Some ε-closure hit the cap; the sample may miss words.
    pub truncated: bool,
}

/// Every accepted word of length at most `max_len`, by a prefix-tree walk
/// that drops dead prefixes. Each ε-closure is capped at `cap` pairs.
pub fn accepted_words(m: &Automaton, max_len: usize, cap: usize) -> Result<LanguageSample> {
    type Pairs = BTreeSet<(State, Config)>;

    fn closure(m: &Automaton, start: Pairs, cap: usize, truncated: &mut bool) -> Result<Pairs> {
        let mut seen = start.clone();
        let mut todo: Vec<_> = start.into_iter().collect();
        while let Some((q, c)) = todo.pop() {
            for t in m.transitions.iter().filter(|t| t.from == q && t.read.is_none()) {
                if !m.storage.test(&t.pred, &c) {
                    continue;
                }
                for c2 in successor_set(m.storage.as_ref(), &t.instr, &c)? {
                    if seen.len() >= cap {
                        *truncated = true;
                        return Ok(seen);
                    }
                    if seen.insert((t.to, c2.clone())) {
                        todo.push((t.to, c2));
                    }
                }
            }
        }
        Ok(seen)
    }

    fn walk(
        m: &Automaton,
        prefix: &mut Vec<Sym>,
        pairs: Pairs,
        max_len: usize,
        cap: usize,
        out: &mut LanguageSample,
    ) -> Result<()> {
        if pairs.iter().any(|(q, _)| m.is_final(*q)) {
            out.words.insert(prefix.clone());
        }
        if prefix.len() == max_len {
            return Ok(());
        }
        for a in &m.alphabet {
            let mut next = Pairs::new();
            for (q, c) in &pairs {
                for t in m.transitions.iter().filter(|t| t.from == *q && t.read.as_ref() == Some(a)) {
                    if m.storage.test(&t.pred, c) {
                        for c2 in successor_set(m.storage.as_ref(), &t.instr, c)? {
                            next.insert((t.to, c2));
                        }
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            let next = closure(m, next, cap, &mut out.truncated)?;
            prefix.push(a.clone());
            walk(m, prefix, next, max_len, cap, out)?;
            prefix.pop();
        }
        Ok(())
    }

    let mut out = LanguageSample {
        words: BTreeSet::new(),
        truncated: false,
    };
    let start: Pairs = m.initial.iter().map(|&q| (q, m.storage.initial())).collect();
    let start = closure(m, start, cap, &mut out.truncated)?;
    walk(m, &mut Vec::new(), start, max_len, cap, &mut out)?;
    Ok(out)
}

/// An `(S, Σ, K)`-automaton.
#[derive(Clone, Debug)]
pub struct WeightedAutomaton<S: Semiring> {
    pub base: Automaton,
    pub semiring: S,
    /// `δ`, indexed like `base.transitions`.
    pub delta: Vec<Option<S::Value>>,
}

impl<S: Semiring> WeightedAutomaton<S> {
    /// Every transition weighted `1̄`.
    pub fn uniform(base: Automaton, semiring: S) -> Self {
        let delta = vec![Some(semiring.one()); base.transitions.len()];
        WeightedAutomaton { base, semiring, delta }
    }

    pub fn with_weights(base: Automaton, semiring: S, weights: Vec<S::Value>) -> Self {
        WeightedAutomaton {
            base,
            semiring,
            delta: weights.into_iter().map(Some).collect(),
        }
    }

    /// `δ(τ)`; a missing entry reads as `0̄`.
    pub fn weight(&self, t: usize) -> S::Value {
        self.delta.get(t).cloned().flatten().unwrap_or_else(|| self.semiring.zero())
    }

    /// `wt_ℳ(θ)`.
    pub fn run_weight(&self, seq: &[usize]) -> S::Value {
        let ws: Vec<S::Value> = seq.iter().map(|&t| self.weight(t)).collect();
        product_seq(&self.semiring, &ws)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.base.validate();
        for (t, d) in self.base.transitions.iter().zip(&self.delta) {
            if d.is_none() {
                out.push(Violation::MissingWeight(t.id.clone()));
            }
        }
        let n = self.base.transitions.len();
        if self.delta.len() < n {
            for t in &self.base.transitions[self.delta.len()..] {
                out.push(Violation::MissingWeight(t.id.clone()));
            }
        } else if self.delta.len() > n {
            out.push(Violation::ExtraWeights(self.delta.len()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightReport<V> {
    pub value: V,
    /// False when the run search was truncated.
    pub exact: bool,
    pub runs: usize,
}

/// `⟦ℳ⟧(w)` summed over the runs found within the budget.
pub fn weight_of_word<S: Semiring>(m: &WeightedAutomaton<S>, w: &[Sym], budget: RunBudget) -> Result<WeightReport<S::Value>> {
    let set = runs_on(&m.base, w, budget)?;
    let ws: Vec<S::Value> = set.runs.iter().map(|r| m.run_weight(&r.transitions)).collect();
    Ok(WeightReport {
        value: sum_finite(&m.semiring, &ws),
        exact: !set.truncated,
        runs: set.runs.len(),
    })
}
