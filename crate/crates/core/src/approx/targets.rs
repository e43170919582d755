//! Closed forms of approximated storages `app{A}S`.
//!
//! Every target interprets the instruction vocabulary of its source, so an
//! approximated transition keeps its term and only the meaning changes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::storage::pushdown::{pd_apply, pd_test};
use crate::storage::{Config, DataStorage, Instr, PdFlavor, Pred, StorageSpec, Sym};

pub(crate) const EVEN: &str = "even";
pub(crate) const ODD: &str = "odd";
/// Label of the empty pushdown under `A_top`.
pub const AT: &str = "@";

/// `app{A_eo}Count`: labels `even` and `odd`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ParityStorage;

impl DataStorage for ParityStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Parity
    }

    fn initial(&self) -> Config {
        Config::label(EVEN)
    }

    fn predicates(&self) -> Vec<Pred> {
        vec![Pred::All, Pred::Is(EVEN.into()), Pred::Is(ODD.into())]
    }

    fn instructions(&self) -> Vec<Instr> {
        vec![Instr::Flip, Instr::Stay]
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        match p {
            Pred::All => true,
            Pred::Is(l) => c.as_label() == Some(l),
            _ => false,
        }
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(l) = c.as_label() else { return Ok(vec![]) };
        Ok(match r {
            Instr::Stay => vec![c.clone()],
            Instr::Flip => vec![Config::label(if l.as_str() == EVEN { ODD } else { EVEN })],
            _ => vec![],
        })
    }
}

/// All words over `gamma` of length at most `k`.
pub(crate) fn words_up_to(gamma: &[Sym], k: usize) -> Vec<Vec<Sym>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &layer {
            for g in gamma {
                let mut v = w.clone();
                v.push(g.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `app{A_top,k}` on the pushdown vocabulary.
fn topk_apply(gamma: &[Sym], k: usize, r: &Instr, u: &[Sym]) -> Vec<Vec<Sym>> {
    let full = u.len() >= k;
    let trunc = |mut v: Vec<Sym>| {
        v.truncate(k);
        v
    };
    let pop = |u: &[Sym]| -> Vec<Vec<Sym>> {
        let Some((_, rest)) = u.split_first() else { return vec![] };
        let mut out = vec![rest.to_vec()];
        if full {
            for g in gamma {
                let mut v = rest.to_vec();
                v.push(g.clone());
                out.push(v);
            }
        }
        out
    };
    match r {
        Instr::Pop => pop(u),
        Instr::PopSym(g) => {
            if u.first() == Some(g) {
                pop(u)
            } else {
                vec![]
            }
        }
        Instr::PopStar if full => words_up_to(gamma, k),
        _ => pd_apply(gamma, r, u).into_iter().map(trunc).collect(),
    }
}

/// `app{A_top,k}PD`, and with `k = 1` in label form `app{A_top}PD`.
#[derive(Clone, Debug)]
pub struct TopKStorage {
    gamma: Vec<Sym>,
    k: usize,
    flavor: PdFlavor,
    labelled: bool,
}

impl TopKStorage {
    pub fn new(gamma: Vec<Sym>, k: usize, flavor: PdFlavor) -> Self {
        TopKStorage {
            gamma,
            k,
            flavor,
            labelled: false,
        }
    }

    /// Label form with `@` for the empty pushdown.
    pub fn top(gamma: Vec<Sym>, flavor: PdFlavor) -> Result<Self> {
        if gamma.iter().any(|g| g.as_str() == AT) {
            return Err(Error::InvalidParameter(format!("`{AT}` is reserved by the top strategy")));
        }
        Ok(TopKStorage {
            gamma,
            k: 1,
            flavor,
            labelled: true,
        })
    }

    fn to_word(&self, c: &Config) -> Option<Vec<Sym>> {
        if self.labelled {
            let l = c.as_label()?;
            Some(if l.as_str() == AT { vec![] } else { vec![l.clone()] })
        } else {
            c.as_word().map(<[Sym]>::to_vec)
        }
    }

    fn wrap_word(&self, w: Vec<Sym>) -> Config {
        if self.labelled {
            Config::Label(w.into_iter().next().unwrap_or_else(|| AT.into()))
        } else {
            Config::Word(w)
        }
    }
}

impl DataStorage for TopKStorage {
    fn spec(&self) -> StorageSpec {
        if self.labelled {
            StorageSpec::Top {
                flavor: self.flavor,
                gamma: self.gamma.clone(),
            }
        } else {
            StorageSpec::TopK {
                flavor: self.flavor,
                gamma: self.gamma.clone(),
                k: self.k,
            }
        }
    }

    fn initial(&self) -> Config {
        self.wrap_word(vec![])
    }

    fn predicates(&self) -> Vec<Pred> {
        self.flavor.predicates(&self.gamma)
    }

    fn instructions(&self) -> Vec<Instr> {
        self.flavor.instructions(&self.gamma)
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        self.to_word(c).is_some_and(|u| pd_test(p, &u))
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(u) = self.to_word(c) else { return Ok(vec![]) };
        Ok(topk_apply(&self.gamma, self.k, r, &u)
            .into_iter()
            .map(|w| self.wrap_word(w))
            .collect())
    }
}

/// `merge(γ, v)`: push `γ` and cut back to its previous occurrence.
pub(crate) fn uniq_push(g: &Sym, v: &[Sym]) -> Vec<Sym> {
    let tail = match v.iter().position(|x| x == g) {
        Some(i) => &v[i + 1..],
        None => v,
    };
    let mut out = Vec::with_capacity(tail.len() + 1);
    out.push(g.clone());
    out.extend_from_slice(tail);
    out
}

/// `A_uniq`, evaluated from the bottom of the pushdown upwards.
pub fn uniq_word(w: &[Sym]) -> Vec<Sym> {
    w.iter().rev().fold(Vec::new(), |acc, g| uniq_push(g, &acc))
}

/// Every repetition-free word over `avail`, including `ε`.
fn repetition_free(avail: &[Sym]) -> Vec<Vec<Sym>> {
    let mut out = vec![vec![]];
    let mut i = 0;
    while i < out.len() {
        let w = out[i].clone();
        for g in avail {
            if !w.contains(g) {
                let mut v = w.clone();
                v.push(g.clone());
                out.push(v);
            }
        }
        i += 1;
    }
    out
}

fn uniq_pop(gamma: &[Sym], u: &[Sym]) -> Vec<Vec<Sym>> {
    let Some((top, rest)) = u.split_first() else { return vec![] };
    let avail: Vec<Sym> = gamma.iter().filter(|g| !u.contains(g)).cloned().collect();
    let mut out = vec![rest.to_vec()];
    for mut x in repetition_free(&avail) {
        x.push(top.clone());
        x.extend_from_slice(rest);
        out.push(x);
    }
    out
}

fn uniq_apply(gamma: &[Sym], r: &Instr, u: &[Sym]) -> Vec<Vec<Sym>> {
    match r {
        Instr::Stay => vec![u.to_vec()],
        Instr::Push(g) => vec![uniq_push(g, u)],
        Instr::PushAny => gamma.iter().map(|g| uniq_push(g, u)).collect(),
        Instr::Pop => uniq_pop(gamma, u),
        Instr::PopSym(g) => {
            if u.first() == Some(g) {
                uniq_pop(gamma, u)
            } else {
                vec![]
            }
        }
        Instr::Replace(g) => uniq_pop(gamma, u).iter().map(|v| uniq_push(g, v)).collect(),
        Instr::PopStar => {
            let mut seen = BTreeSet::from([u.to_vec()]);
            let mut todo = vec![u.to_vec()];
            while let Some(v) = todo.pop() {
                for x in uniq_pop(gamma, &v) {
                    if seen.insert(x.clone()) {
                        todo.push(x);
                    }
                }
            }
            seen.into_iter().collect()
        }
        _ => vec![],
    }
}

/// `app{A_uniq}PD`: repetition-free pushdowns.
#[derive(Clone, Debug)]
pub struct UniqStorage {
    gamma: Vec<Sym>,
    flavor: PdFlavor,
}

impl UniqStorage {
    pub fn new(gamma: Vec<Sym>, flavor: PdFlavor) -> Self {
        UniqStorage { gamma, flavor }
    }
}

impl DataStorage for UniqStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Uniq {
            flavor: self.flavor,
            gamma: self.gamma.clone(),
        }
    }

    fn initial(&self) -> Config {
        Config::Word(vec![])
    }

    fn predicates(&self) -> Vec<Pred> {
        self.flavor.predicates(&self.gamma)
    }

    fn instructions(&self) -> Vec<Instr> {
        self.flavor.instructions(&self.gamma)
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        c.as_word().is_some_and(|u| pd_test(p, u))
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(u) = c.as_word() else { return Ok(vec![]) };
        Ok(uniq_apply(&self.gamma, r, u).into_iter().map(Config::Word).collect())
    }
}

/// `app{A_bd,k}PD`: the pushdown restricted to height `k`.
#[derive(Clone, Debug)]
pub struct BoundedStorage {
    gamma: Vec<Sym>,
    k: usize,
    flavor: PdFlavor,
}

impl BoundedStorage {
    pub fn new(gamma: Vec<Sym>, k: usize, flavor: PdFlavor) -> Self {
        BoundedStorage { gamma, k, flavor }
    }
}

impl DataStorage for BoundedStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Bounded {
            flavor: self.flavor,
            gamma: self.gamma.clone(),
            k: self.k,
        }
    }

    fn initial(&self) -> Config {
        Config::Word(vec![])
    }

    fn predicates(&self) -> Vec<Pred> {
        self.flavor.predicates(&self.gamma)
    }

    fn instructions(&self) -> Vec<Instr> {
        self.flavor.instructions(&self.gamma)
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        c.as_word().is_some_and(|u| u.len() <= self.k && pd_test(p, u))
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(u) = c.as_word() else { return Ok(vec![]) };
        if u.len() > self.k {
            return Ok(vec![]);
        }
        Ok(pd_apply(&self.gamma, r, u)
            .into_iter()
            .filter(|v| v.len() <= self.k)
            .map(Config::Word)
            .collect())
    }
}
