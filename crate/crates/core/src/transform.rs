//! Normal forms: predicate-free storage, powerset and bounded
//! determinization, and conversion of finitely many reachable
//! configurations into a finite-state automaton.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::automaton::{Automaton, State, Transition};
use crate::error::{Error, Result};
use crate::storage::{successor_set, Config, Instr, NoneStorage, PowersetStorage, Pred, PredicateFreeStorage, SplitStorage, Sym};

/// `(q, v, p, r, q′) ↦ (q, v, ⊤, r↾p, q′)` over the predicate-free storage.
pub fn predicate_free(m: &Automaton) -> Automaton {
    let mut out = m.clone();
    out.storage = Arc::new(PredicateFreeStorage::new(m.storage.clone()));
    for t in &mut out.transitions {
        t.instr = Instr::restrict(t.instr.clone(), t.pred.clone());
        t.pred = Pred::All;
    }
    out
}

/// The automaton over `det(S)`; predicates are folded away first.
pub fn determinize_powerset(m: &Automaton) -> Automaton {
    let mut out = predicate_free(m);
    out.storage = Arc::new(PowersetStorage::new(out.storage.clone()));
    out
}

/// Splits every transition into `k` copies using `r#1 … r#k`. Copy `i` of
/// transition `t` gets the id `t#i`.
///
/// Successor sets larger than `k` surface as [`Error::BoundExceeded`] when
/// the result is run.
pub fn determinize_bounded(m: &Automaton, k: usize) -> Result<Automaton> {
    if k == 0 {
        return Err(Error::InvalidParameter("bounded determinization needs k > 0".into()));
    }
    let mut out = m.clone();
    out.storage = Arc::new(SplitStorage::new(m.storage.clone(), k));
    out.transitions = m
        .transitions
        .iter()
        .flat_map(|t| {
            (1..=k).map(move |i| Transition {
                id: format!("{}#{i}", t.id),
                instr: Instr::Nth(i, Box::new(t.instr.clone())),
                ..t.clone()
            })
        })
        .collect();
    Ok(out)
}

/// A classical automaton without storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsaAutomaton {
    pub states: Vec<String>,
    pub alphabet: Vec<Sym>,
    pub transitions: Vec<(State, Option<Sym>, State)>,
    pub initial: Vec<State>,
    pub finals: Vec<State>,
}

impl FsaAutomaton {
    fn closure(&self, mut set: BTreeSet<State>) -> BTreeSet<State> {
        let mut todo: Vec<State> = set.iter().copied().collect();
        while let Some(q) = todo.pop() {
            for (p, v, r) in &self.transitions {
                if *p == q && v.is_none() && set.insert(*r) {
                    todo.push(*r);
                }
            }
        }
        set
    }

    pub fn accepts(&self, w: &[Sym]) -> bool {
        let mut cur = self.closure(self.initial.iter().copied().collect());
        for a in w {
            let next = self
                .transitions
                .iter()
                .filter(|(p, v, _)| cur.contains(p) && v.as_ref() == Some(a))
                .map(|(_, _, r)| *r)
                .collect();
            cur = self.closure(next);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    /// The same machine as an automaton over the trivial storage.
    pub fn to_automaton(&self) -> Automaton {
        let mut m = Automaton::new(self.alphabet.clone(), Arc::new(NoneStorage));
        m.states = self.states.clone();
        m.initial = self.initial.clone();
        m.finals = self.finals.clone();
        for (i, (p, v, q)) in self.transitions.iter().enumerate() {
            m.transitions.push(Transition {
                id: format!("t{}", i + 1),
                from: *p,
                read: v.clone(),
                pred: Pred::All,
                instr: Instr::Stay,
                to: *q,
            });
        }
        m
    }
}

/// Product construction over the reachable pairs `(q, c)`.
///
/// Fails with [`Error::CapExhausted`] when more than `cap` pairs are
/// reachable.
pub fn to_fsa(m: &Automaton, cap: usize) -> Result<FsaAutomaton> {
    let mut index: HashMap<(State, Config), State> = HashMap::new();
    let mut pairs: Vec<(State, Config)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |q: State, c: Config, pairs: &mut Vec<(State, Config)>, queue: &mut VecDeque<State>| -> Result<State> {
        if let Some(&i) = index.get(&(q, c.clone())) {
            return Ok(i);
        }
        if pairs.len() >= cap {
            return Err(Error::CapExhausted { cap });
        }
        let i = pairs.len();
        index.insert((q, c.clone()), i);
        pairs.push((q, c));
        queue.push_back(i);
        Ok(i)
    };
    let mut initial = Vec::new();
    for &q in &m.initial {
        initial.push(intern(q, m.storage.initial(), &mut pairs, &mut queue)?);
    }
    let mut transitions = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (q, c) = pairs[i].clone();
        for t in m.transitions.iter().filter(|t| t.from == q) {
            if !m.storage.test(&t.pred, &c) {
                continue;
            }
            for c2 in successor_set(m.storage.as_ref(), &t.instr, &c)? {
                let j = intern(t.to, c2, &mut pairs, &mut queue)?;
                transitions.push((i, t.read.clone(), j));
            }
        }
    }
    transitions.sort();
    transitions.dedup();
    let finals = (0..pairs.len()).filter(|&i| m.is_final(pairs[i].0)).collect();
    let states = pairs.iter().map(|(q, c)| format!("({}, {c})", m.states[*q])).collect();
    initial.sort();
    initial.dedup();
    Ok(FsaAutomaton {
        states,
        alphabet: m.alphabet.clone(),
        transitions,
        initial,
        finals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{accepted_words, accepts, runs_on, RunBudget};
    use crate::storage::{apply_instruction, syms, CountStorage, PdFlavor, PushdownStorage};

    fn count_anbn() -> Automaton {
        let mut m = Automaton::new(syms("ab"), Arc::new(CountStorage));
        m.add("1", "a", Pred::All, Instr::Inc, "1");
        m.add("1", "b", Pred::All, Instr::Dec, "2");
        m.add("2", "b", Pred::All, Instr::Dec, "2");
        m.add("2", "", Pred::Zero, Instr::Inc, "3");
        m.set_initial("1");
        m.set_final("3");
        m
    }

    fn language(m: &Automaton, n: usize) -> BTreeSet<Vec<Sym>> {
        let s = accepted_words(m, n, 100_000).unwrap();
        assert!(!s.truncated);
        s.words
    }

    #[test]
    fn predicate_free_keeps_language() {
        let m = count_anbn();
        let pf = predicate_free(&m);
        assert!(pf.transitions.iter().all(|t| t.pred == Pred::All));
        let instrs: BTreeSet<String> = pf.transitions.iter().map(|t| t.instr.to_string()).collect();
        assert_eq!(instrs.len(), 3);
        assert!(pf.validate().is_empty());
        assert_eq!(language(&m, 10), language(&pf, 10));
    }

    #[test]
    fn powerset_runs_carry_singletons_for_count() {
        let m = count_anbn();
        let det = determinize_powerset(&m);
        let w = syms("aabb");
        let runs = runs_on(&det, &w, RunBudget::for_word(4)).unwrap().runs;
        assert_eq!(runs.len(), 1);
        let trace: Vec<Config> = runs[0].trace.iter().map(|c| c.storage.clone()).collect();
        let expected: Vec<Config> = [0, 1, 2, 1, 0, 1].into_iter().map(|n| Config::set([Config::Nat(n)])).collect();
        assert_eq!(trace, expected);
    }

    #[test]
    fn bounded_split_of_push_any() {
        let nd = Arc::new(PushdownStorage::new(syms("ab"), PdFlavor::NdPush));
        let mut m = Automaton::new(syms("x"), nd.clone());
        m.add("1", "x", Pred::All, Instr::PushAny, "1");
        m.set_initial("1");
        m.set_final("1");
        let b = determinize_bounded(&m, 2).unwrap();
        assert_eq!(b.ids(&[0, 1]), ["t1#1", "t1#2"]);
        for c in [Config::word(""), Config::word("ab")] {
            let mut union = Vec::new();
            for t in &b.transitions {
                let got = apply_instruction(b.storage.as_ref(), &t.instr, &c).unwrap();
                assert!(got.len() <= 1);
                union.extend(got);
            }
            union.sort();
            assert_eq!(union, apply_instruction(nd.as_ref(), &Instr::PushAny, &c).unwrap());
        }
        assert!(determinize_bounded(&m, 0).is_err());
        let tight = determinize_bounded(&m, 1).unwrap();
        assert!(matches!(accepts(&tight, &syms("x")), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn fsa_of_finite_storage() {
        let mut m = Automaton::new(syms("ab"), Arc::new(PushdownStorage::new(syms("a"), PdFlavor::Plain)));
        m.add("1", "a", Pred::Bottom, Instr::Push("a".into()), "2");
        m.add("2", "b", Pred::Top("a".into()), Instr::Pop, "3");
        m.add("3", "", Pred::All, Instr::Stay, "1");
        m.set_initial("1");
        m.set_final("1");
        let fsa = to_fsa(&m, 10).unwrap();
        assert_eq!(fsa.states.len(), 3);
        for w in ["", "ab", "abab", "a", "ba"] {
            assert_eq!(fsa.accepts(&syms(w)), accepts(&m, &syms(w)).unwrap(), "{w}");
        }
        let back = fsa.to_automaton();
        assert!(back.validate().is_empty());
        assert_eq!(back.storage.spec(), crate::storage::StorageSpec::None);
        assert_eq!(language(&back, 6), language(&m, 6));
    }

    #[test]
    fn unbounded_counter_exhausts_cap() {
        assert!(matches!(to_fsa(&count_anbn(), 50), Err(Error::CapExhausted { cap: 50 })));
    }
}
