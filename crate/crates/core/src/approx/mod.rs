//! Approximation strategies `A: C ⇀ C′` and approximated automata.
//!
//! A [`Strategy`] is a chain of catalogue stages. Each stage carries the
//! configuration map together with closed forms for `app{A}p` and `app{A}r`;
//! the approximated storage itself is described by the target
//! [`StorageSpec`].

pub mod targets;

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Display};

use crate::automaton::{Automaton, Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::semiring::Semiring;
use crate::storage::{Config, Instr, PdFlavor, Pred, StorageRef, StorageSpec, Sym};
use targets::{uniq_word, AT, EVEN, ODD};

/// A catalogue entry, before it is instantiated against a source storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpec {
    Identity,
    /// `A_top`
    Top,
    /// `A_top,k`
    TopK(usize),
    /// `A_uniq`
    Uniq,
    /// Pointwise symbol merge `g′`; unmapped symbols map to themselves.
    Merge(BTreeMap<Sym, Sym>),
    /// `A_bd,k`
    BoundedK(usize),
    /// `A_incomp,k`: merge, then bound the height.
    IncompK(BTreeMap<Sym, Sym>, usize),
    /// `A_eo` on `Count`.
    EvenOdd,
    /// `A_#`: pushdown length.
    Count,
    /// `A_cf,Γ`: tree-stack flattening.
    Cf,
}

impl StrategySpec {
    pub fn name(&self) -> String {
        match self {
            StrategySpec::Identity => "id".into(),
            StrategySpec::Top => "top".into(),
            StrategySpec::TopK(k) => format!("top-k:{k}"),
            StrategySpec::Uniq => "uniq".into(),
            StrategySpec::Merge(_) => "merge".into(),
            StrategySpec::BoundedK(k) => format!("bd-k:{k}"),
            StrategySpec::IncompK(_, k) => format!("incomp-k:{k}"),
            StrategySpec::EvenOdd => "eo".into(),
            StrategySpec::Count => "count".into(),
            StrategySpec::Cf => "cf".into(),
        }
    }
}

/// Reads a two-column `symbol class` table; lines starting with `//` are
/// comments.
pub fn parse_merge_map(text: &str) -> Result<BTreeMap<Sym, Sym>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [from, to] = cols[..] else {
            return Err(Error::InvalidParameter(format!("merge map line {}: expected `symbol class`", n + 1)));
        };
        if map.insert(Sym::from(from), Sym::from(to)).is_some() {
            return Err(Error::InvalidParameter(format!("merge map line {}: `{from}` mapped twice", n + 1)));
        }
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Identity,
    /// Truncation to the top `k` symbols; `labelled` for `A_top`.
    TopK { k: usize, labelled: bool },
    Uniq,
    Merge(BTreeMap<Sym, Sym>),
    Bounded(usize),
    EvenOdd,
    Length,
    Flatten,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Stage {
    step: Step,
    source: StorageSpec,
    target: StorageSpec,
    total: bool,
    injective: bool,
}

fn merge_sym(map: &BTreeMap<Sym, Sym>, s: &Sym) -> Sym {
    map.get(s).cloned().unwrap_or_else(|| s.clone())
}

impl Stage {
    fn map_config(&self, c: &Config) -> Option<Config> {
        match &self.step {
            Step::Identity => Some(c.clone()),
            Step::TopK { k, labelled } => {
                let w = c.as_word()?;
                if *labelled {
                    Some(Config::Label(w.first().cloned().unwrap_or_else(|| AT.into())))
                } else {
                    Some(Config::Word(w[..w.len().min(*k)].to_vec()))
                }
            }
            Step::Uniq => Some(Config::Word(uniq_word(c.as_word()?))),
            Step::Merge(map) => match c {
                Config::Word(w) => Some(Config::Word(w.iter().map(|s| merge_sym(map, s)).collect())),
                Config::Tree(t) => {
                    let nodes = t.nodes().iter().map(|(a, l)| (a.clone(), merge_sym(map, l))).collect();
                    crate::storage::TreeStack::from_parts(nodes, t.pointer().to_vec()).map(Config::Tree)
                }
                _ => None,
            },
            Step::Bounded(k) => {
                let w = c.as_word()?;
                (w.len() <= *k).then(|| c.clone())
            }
            Step::EvenOdd => {
                let n = c.as_nat()?;
                Some(Config::label(if n % 2 == 0 { EVEN } else { ODD }))
            }
            Step::Length => Some(Config::Nat(c.as_word()?.len() as u64)),
            Step::Flatten => Some(Config::Word(c.as_tree()?.path_labels())),
        }
    }

    fn unsupported(&self, term: impl Display) -> Error {
        Error::Unsupported {
            strategy: step_name(&self.step).into(),
            term: term.to_string(),
        }
    }

    fn map_pred(&self, p: &Pred) -> Result<Pred> {
        Ok(match (&self.step, p) {
            (Step::Merge(map), Pred::Top(g)) => Pred::Top(merge_sym(map, g)),
            (Step::Merge(map), Pred::Equals(g)) => Pred::Equals(merge_sym(map, g)),
            (Step::EvenOdd, Pred::All | Pred::Positive) => Pred::All,
            (Step::EvenOdd, Pred::Zero) => Pred::Is(EVEN.into()),
            (Step::EvenOdd, _) => return Err(self.unsupported(p)),
            (Step::Length, Pred::All) => Pred::All,
            (Step::Length, Pred::Bottom) => Pred::Zero,
            (Step::Length, Pred::Top(_)) => Pred::Positive,
            (Step::Length, _) => return Err(self.unsupported(p)),
            (Step::Flatten, Pred::All | Pred::Bottom) => p.clone(),
            (Step::Flatten, Pred::Equals(g)) => Pred::Top(g.clone()),
            (Step::Flatten, _) => return Err(self.unsupported(p)),
            _ => p.clone(),
        })
    }

    fn map_instr(&self, r: &Instr) -> Result<Instr> {
        if let Instr::Restrict(inner, p) = r {
            return Ok(Instr::restrict(self.map_instr(inner)?, self.map_pred(p)?));
        }
        if let Instr::Nth(..) = r {
            return Err(self.unsupported(r));
        }
        Ok(match (&self.step, r) {
            (Step::Merge(map), Instr::Push(g)) => Instr::Push(merge_sym(map, g)),
            (Step::Merge(map), Instr::Replace(g)) => Instr::Replace(merge_sym(map, g)),
            (Step::Merge(map), Instr::PopSym(g)) => Instr::PopSym(merge_sym(map, g)),
            (Step::Merge(map), Instr::TreePush(n, g)) => Instr::TreePush(*n, merge_sym(map, g)),
            (Step::EvenOdd, Instr::Inc | Instr::Dec) => Instr::Flip,
            (Step::EvenOdd, Instr::Stay) => Instr::Stay,
            (Step::EvenOdd, _) => return Err(self.unsupported(r)),
            (Step::Length, Instr::Stay) => Instr::Stay,
            (Step::Length, Instr::Pop | Instr::PopSym(_)) => Instr::Dec,
            (Step::Length, Instr::Push(_) | Instr::PushAny) => Instr::Inc,
            (Step::Length, Instr::Replace(_)) => Instr::restrict(Instr::Stay, Pred::Positive),
            (Step::Length, _) => return Err(self.unsupported(r)),
            (Step::Flatten, Instr::Down) => Instr::Pop,
            (Step::Flatten, Instr::Up(_)) => Instr::PushAny,
            (Step::Flatten, Instr::TreePush(_, g)) => Instr::Push(g.clone()),
            (Step::Flatten, _) => return Err(self.unsupported(r)),
            _ => r.clone(),
        })
    }
}

fn step_name(s: &Step) -> &'static str {
    match s {
        Step::Identity => "id",
        Step::TopK { labelled: true, .. } => "top",
        Step::TopK { .. } => "top-k",
        Step::Uniq => "uniq",
        Step::Merge(_) => "merge",
        Step::Bounded(_) => "bd-k",
        Step::EvenOdd => "eo",
        Step::Length => "count",
        Step::Flatten => "cf",
    }
}

/// An instantiated approximation strategy with its approximated storage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    name: String,
    stages: Vec<Stage>,
}

fn mismatch(spec: &StrategySpec, source: &StorageSpec) -> Error {
    Error::StorageMismatch {
        strategy: spec.name(),
        storage: source.to_string(),
    }
}

fn positive(spec: &StrategySpec, k: usize) -> Result<usize> {
    if k == 0 {
        Err(Error::InvalidParameter(format!("strategy `{}` needs k > 0", spec.name())))
    } else {
        Ok(k)
    }
}

impl Strategy {
    /// Instantiates a catalogue entry for storages described by `source`.
    pub fn instantiate(spec: &StrategySpec, source: &StorageSpec) -> Result<Strategy> {
        let stage = |step, target, total, injective| Stage {
            step,
            source: source.clone(),
            target,
            total,
            injective,
        };
        let pushdown = || match source {
            StorageSpec::Pushdown { flavor, gamma } => Ok((*flavor, gamma.clone())),
            _ => Err(mismatch(spec, source)),
        };
        let stages = match spec {
            StrategySpec::Identity => vec![stage(Step::Identity, source.clone(), true, true)],
            StrategySpec::Top => {
                let (flavor, gamma) = pushdown()?;
                if gamma.iter().any(|g| g.as_str() == AT) {
                    return Err(Error::InvalidParameter(format!("`{AT}` is reserved by the top strategy")));
                }
                let target = StorageSpec::Top { flavor, gamma };
                vec![stage(Step::TopK { k: 1, labelled: true }, target, true, false)]
            }
            StrategySpec::TopK(k) => {
                let k = positive(spec, *k)?;
                let (flavor, gamma) = pushdown()?;
                let target = StorageSpec::TopK { flavor, gamma, k };
                vec![stage(Step::TopK { k, labelled: false }, target, true, false)]
            }
            StrategySpec::Uniq => {
                let (flavor, gamma) = pushdown()?;
                vec![stage(Step::Uniq, StorageSpec::Uniq { flavor, gamma }, true, false)]
            }
            StrategySpec::BoundedK(k) => {
                let k = positive(spec, *k)?;
                let (flavor, gamma) = pushdown()?;
                vec![stage(Step::Bounded(k), StorageSpec::Bounded { flavor, gamma, k }, false, true)]
            }
            StrategySpec::Merge(map) => {
                let gamma = source.gamma().ok_or_else(|| mismatch(spec, source))?;
                if let Some(s) = map.keys().find(|s| !gamma.contains(s)) {
                    return Err(Error::InvalidParameter(format!("merge map names `{s}` outside the storage alphabet")));
                }
                let mut classes: Vec<Sym> = gamma.iter().map(|s| merge_sym(map, s)).collect();
                classes.sort();
                classes.dedup();
                let injective = classes.len() == gamma.len();
                let target = match source {
                    StorageSpec::Pushdown { flavor, .. } => StorageSpec::Pushdown {
                        flavor: *flavor,
                        gamma: classes,
                    },
                    StorageSpec::TreeStack { max_arity, .. } => StorageSpec::TreeStack {
                        gamma: classes,
                        max_arity: *max_arity,
                    },
                    _ => return Err(mismatch(spec, source)),
                };
                vec![stage(Step::Merge(map.clone()), target, true, injective)]
            }
            StrategySpec::IncompK(map, k) => {
                let merge = Strategy::instantiate(&StrategySpec::Merge(map.clone()), source)?;
                let bound = Strategy::instantiate(&StrategySpec::BoundedK(*k), merge.target())?;
                let mut s = merge.then(&bound)?;
                s.name = spec.name();
                return Ok(s);
            }
            StrategySpec::EvenOdd => {
                if *source != StorageSpec::Count {
                    return Err(mismatch(spec, source));
                }
                vec![stage(Step::EvenOdd, StorageSpec::Parity, true, false)]
            }
            StrategySpec::Count => {
                pushdown()?;
                vec![stage(Step::Length, StorageSpec::Count, true, false)]
            }
            StrategySpec::Cf => {
                let StorageSpec::TreeStack { gamma, .. } = source else {
                    return Err(mismatch(spec, source));
                };
                let target = StorageSpec::Pushdown {
                    flavor: PdFlavor::NdPush,
                    gamma: gamma.clone(),
                };
                vec![stage(Step::Flatten, target, true, false)]
            }
        };
        let s = Strategy {
            name: spec.name(),
            stages,
        };
        s.target().build()?;
        Ok(s)
    }

    /// `self` followed by `next`: the map `c ↦ next(self(c))`.
    pub fn then(&self, next: &Strategy) -> Result<Strategy> {
        if next.source() != self.target() {
            return Err(Error::StorageMismatch {
                strategy: next.name.clone(),
                storage: self.target().to_string(),
            });
        }
        let mut stages = self.stages.clone();
        stages.extend(next.stages.iter().cloned());
        Ok(Strategy {
            name: format!("{}∘{}", self.name, next.name),
            stages,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &StorageSpec {
        &self.stages[0].source
    }

    pub fn target(&self) -> &StorageSpec {
        &self.stages.last().expect("a strategy has a stage").target
    }

    pub fn is_total(&self) -> bool {
        self.stages.iter().all(|s| s.total)
    }

    pub fn is_injective(&self) -> bool {
        self.stages.iter().all(|s| s.injective)
    }

    /// `A(c)`; `None` outside the domain.
    pub fn map_config(&self, c: &Config) -> Option<Config> {
        self.stages.iter().try_fold(c.clone(), |c, s| s.map_config(&c))
    }

    /// `app{A}p`, as a term of the target storage.
    pub fn map_pred(&self, p: &Pred) -> Result<Pred> {
        self.stages.iter().try_fold(p.clone(), |p, s| s.map_pred(&p))
    }

    /// `app{A}r`, as a term of the target storage.
    pub fn map_instr(&self, r: &Instr) -> Result<Instr> {
        self.stages.iter().try_fold(r.clone(), |r, s| s.map_instr(&r))
    }
}

impl Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} → {}", self.name, self.source(), self.target())
    }
}

/// `compose(A1, A2) = A1 ∘ A2`, applying `A1` first.
pub fn compose(a1: &Strategy, a2: &Strategy) -> Result<Strategy> {
    a1.then(a2)
}

/// `app{A}S`, after checking that `A(c_i)` is defined.
pub fn approximate_storage(a: &Strategy) -> Result<StorageRef> {
    let source = a.source().build()?;
    let target = a.target().build()?;
    let ci = source.initial();
    match a.map_config(&ci) {
        Some(c) if c == target.initial() => Ok(target),
        _ => Err(Error::InitialNotApproximable(ci)),
    }
}

/// `app{A}ℳ` with the transition map `τ ↦ app{A}τ` kept for preimages.
#[derive(Clone, Debug)]
pub struct Approximation {
    pub automaton: Automaton,
    /// Index of `app{A}τ` for each transition index `τ` of the source.
    pub transition_map: Vec<usize>,
}

impl Approximation {
    /// Source transitions mapped onto each coarse transition.
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.automaton.transitions.len()];
        for (fine, &coarse) in self.transition_map.iter().enumerate() {
            out[coarse].push(fine);
        }
        out
    }
}

pub fn approximate_automaton(m: &Automaton, a: &Strategy) -> Result<Approximation> {
    let spec = m.storage.spec();
    if spec != *a.source() {
        return Err(Error::StorageMismatch {
            strategy: a.name().to_string(),
            storage: spec.to_string(),
        });
    }
    let storage = approximate_storage(a)?;
    let mut out = Automaton::new(m.alphabet.clone(), storage);
    out.states = m.states.clone();
    out.initial = m.initial.clone();
    out.finals = m.finals.clone();
    let mut index: HashMap<(usize, Option<Sym>, Pred, Instr, usize), usize> = HashMap::new();
    let mut transition_map = Vec::with_capacity(m.transitions.len());
    for t in &m.transitions {
        let pred = a.map_pred(&t.pred)?;
        let instr = a.map_instr(&t.instr)?;
        let key = (t.from, t.read.clone(), pred.clone(), instr.clone(), t.to);
        let i = *index.entry(key).or_insert_with(|| {
            out.transitions.push(Transition {
                id: format!("{}'", t.id),
                from: t.from,
                read: t.read.clone(),
                pred,
                instr,
                to: t.to,
            });
            out.transitions.len() - 1
        });
        transition_map.push(i);
    }
    Ok(Approximation {
        automaton: out,
        transition_map,
    })
}

#[derive(Clone, Debug)]
pub struct WeightedApproximation<S: Semiring> {
    pub automaton: WeightedAutomaton<S>,
    pub transition_map: Vec<usize>,
}

impl<S: Semiring> WeightedApproximation<S> {
    pub fn preimages(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.automaton.base.transitions.len()];
        for (fine, &coarse) in self.transition_map.iter().enumerate() {
            out[coarse].push(fine);
        }
        out
    }
}

/// Weighted `app{A}ℳ`: colliding transitions are merged with `⊕`.
pub fn approximate_weighted<S: Semiring>(m: &WeightedAutomaton<S>, a: &Strategy) -> Result<WeightedApproximation<S>> {
    let approx = approximate_automaton(&m.base, a)?;
    let sr = &m.semiring;
    let mut delta = vec![sr.zero(); approx.automaton.transitions.len()];
    for (fine, &coarse) in approx.transition_map.iter().enumerate() {
        delta[coarse] = sr.plus(&delta[coarse], &m.weight(fine));
    }
    Ok(WeightedApproximation {
        automaton: WeightedAutomaton::with_weights(approx.automaton, sr.clone(), delta),
        transition_map: approx.transition_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::accepts;
    use crate::semiring::{Counting, ExtNat};
    use crate::storage::{apply_instruction, syms, CountStorage, TreeStack};
    use std::sync::Arc;

    fn pd(flavor: PdFlavor, g: &str) -> StorageSpec {
        StorageSpec::Pushdown { flavor, gamma: syms(g) }
    }

    #[test]
    fn catalogue_examples() {
        let src = pd(PdFlavor::Plain, "abcd");
        let top = Strategy::instantiate(&StrategySpec::Top, &src).unwrap();
        assert_eq!(top.map_config(&Config::word("abc")), Some(Config::label("a")));
        assert_eq!(top.map_config(&Config::word("")), Some(Config::label("@")));
        let bd = Strategy::instantiate(&StrategySpec::BoundedK(3), &src).unwrap();
        assert_eq!(bd.map_config(&Config::word("abcd")), None);
        assert_eq!(bd.map_config(&Config::word("abc")), Some(Config::word("abc")));
        let uniq = Strategy::instantiate(&StrategySpec::Uniq, &src).unwrap();
        assert_eq!(uniq.map_config(&Config::word("abab")), Some(Config::word("ab")));
        assert!(top.is_total() && !top.is_injective());
        assert!(!bd.is_total() && bd.is_injective());
    }

    #[test]
    fn flags_and_parameters() {
        let src = pd(PdFlavor::Plain, "abc");
        assert!(Strategy::instantiate(&StrategySpec::TopK(0), &src).is_err());
        assert!(Strategy::instantiate(&StrategySpec::Top, &pd(PdFlavor::Plain, "a@")).is_err());
        assert!(matches!(
            Strategy::instantiate(&StrategySpec::EvenOdd, &src),
            Err(Error::StorageMismatch { .. })
        ));
        let g: BTreeMap<Sym, Sym> = [("a".into(), "x".into()), ("b".into(), "x".into())].into();
        let merge = Strategy::instantiate(&StrategySpec::Merge(g.clone()), &src).unwrap();
        assert!(merge.is_total() && !merge.is_injective());
        assert_eq!(merge.target().gamma().unwrap(), syms("cx").as_slice());
        let incomp = Strategy::instantiate(&StrategySpec::IncompK(g, 2), &src).unwrap();
        assert!(!incomp.is_total() && !incomp.is_injective());
        let rename: BTreeMap<Sym, Sym> = [("a".into(), "z".into())].into();
        assert!(Strategy::instantiate(&StrategySpec::Merge(rename), &src).unwrap().is_injective());
    }

    #[test]
    fn flattening_reads_path_top_first() {
        let src = StorageSpec::TreeStack { gamma: syms("*#"), max_arity: 2 };
        let cf = Strategy::instantiate(&StrategySpec::Cf, &src).unwrap();
        let mut t = TreeStack::new();
        for _ in 0..3 {
            t = t.push(1, "*".into()).unwrap();
        }
        t = t.push(1, "#".into()).unwrap();
        assert_eq!(cf.map_config(&Config::Tree(t)), Some(Config::word("#***")));
    }

    #[test]
    fn parity_storage_of_count() {
        let eo = Strategy::instantiate(&StrategySpec::EvenOdd, &StorageSpec::Count).unwrap();
        let s = approximate_storage(&eo).unwrap();
        let inc = eo.map_instr(&Instr::Inc).unwrap();
        assert_eq!(inc, eo.map_instr(&Instr::Dec).unwrap());
        let even = Config::label(EVEN);
        let odd = Config::label(ODD);
        assert_eq!(apply_instruction(s.as_ref(), &inc, &even).unwrap(), vec![odd.clone()]);
        assert_eq!(apply_instruction(s.as_ref(), &inc, &odd).unwrap(), vec![even]);
    }

    #[test]
    fn identity_is_neutral_for_composition() {
        let src = pd(PdFlavor::NdPush, "ab");
        let id = Strategy::instantiate(&StrategySpec::Identity, &src).unwrap();
        let top = Strategy::instantiate(&StrategySpec::TopK(2), &src).unwrap();
        let both = compose(&id, &top).unwrap();
        for w in ["", "a", "ab", "bab", "aabba"] {
            let c = Config::word(w);
            assert_eq!(both.map_config(&c), top.map_config(&c));
        }
        assert_eq!(both.target(), top.target());
        assert!(compose(&top, &top).is_err());
    }

    #[test]
    fn colliding_weights_are_summed() {
        let mut m = Automaton::new(syms("a"), Arc::new(CountStorage));
        m.add("1", "a", Pred::All, Instr::Inc, "2");
        m.add("1", "a", Pred::All, Instr::Dec, "2");
        m.set_initial("1");
        m.set_final("2");
        let wm = WeightedAutomaton::with_weights(m, Counting::default(), vec![ExtNat::Fin(2), ExtNat::Fin(3)]);
        let eo = Strategy::instantiate(&StrategySpec::EvenOdd, &StorageSpec::Count).unwrap();
        let ap = approximate_weighted(&wm, &eo).unwrap();
        assert_eq!(ap.automaton.base.transitions.len(), 1);
        assert_eq!(ap.automaton.delta, vec![Some(ExtNat::Fin(5))]);
        assert_eq!(ap.preimages(), vec![vec![0, 1]]);
        assert!(accepts(&ap.automaton.base, &syms("a")).unwrap());
    }

    #[test]
    fn merge_map_parsing() {
        let m = parse_merge_map("a x\n\nb x\n// note\nc y\n").unwrap();
        assert_eq!(m.len(), 3);
        assert!(parse_merge_map("a\n").is_err());
        assert!(parse_merge_map("a x\na y\n").is_err());
    }

    #[test]
    fn unsupported_terms_fail() {
        let count = Strategy::instantiate(&StrategySpec::Count, &pd(PdFlavor::PopStar, "ab")).unwrap();
        assert!(matches!(count.map_instr(&Instr::PopStar), Err(Error::Unsupported { .. })));
        let s = approximate_storage(&count).unwrap();
        assert_eq!(s.spec(), StorageSpec::Count);
    }
}
