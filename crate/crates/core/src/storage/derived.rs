//! Storages built from other storages by the normal-form constructions.

use super::{successor_set, Config, DataStorage, Instr, Pred, StorageRef, StorageSpec};
use crate::error::{Error, Result};

/// A one-configuration storage; the storage of a finite-state automaton.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoneStorage;

impl DataStorage for NoneStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::None
    }

    fn initial(&self) -> Config {
        Config::Unit
    }

    fn predicates(&self) -> Vec<Pred> {
        vec![Pred::All]
    }

    fn instructions(&self) -> Vec<Instr> {
        vec![Instr::Stay]
    }

    fn test(&self, p: &Pred, _: &Config) -> bool {
        *p == Pred::All
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        Ok(match r {
            Instr::Stay => vec![c.clone()],
            _ => vec![],
        })
    }
}

/// `S` with its predicates folded into restricted instructions `r↾p`.
#[derive(Clone, Debug)]
pub struct PredicateFreeStorage {
    inner: StorageRef,
}

impl PredicateFreeStorage {
    pub fn new(inner: StorageRef) -> Self {
        PredicateFreeStorage { inner }
    }

    pub fn inner(&self) -> &StorageRef {
        &self.inner
    }
}

impl DataStorage for PredicateFreeStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::PredicateFree(Box::new(self.inner.spec()))
    }

    fn initial(&self) -> Config {
        self.inner.initial()
    }

    fn predicates(&self) -> Vec<Pred> {
        vec![Pred::All]
    }

    fn instructions(&self) -> Vec<Instr> {
        let mut rs = Vec::new();
        for r in self.inner.instructions() {
            for p in self.inner.predicates() {
                rs.push(Instr::restrict(r.clone(), p));
            }
        }
        rs
    }

    fn has_instruction(&self, r: &Instr) -> bool {
        self.inner.has_instruction(r)
    }

    fn test(&self, p: &Pred, _: &Config) -> bool {
        *p == Pred::All
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        self.inner.apply(r, c)
    }

    fn apply(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        self.inner.apply(r, c)
    }
}

/// `det(S)`: configurations are finite sets, `det(r)(d) = {r(d)}` when
/// `r(d) = ⋃_{c∈d} r(c)` is nonempty.
#[derive(Clone, Debug)]
pub struct PowersetStorage {
    inner: StorageRef,
}

impl PowersetStorage {
    pub fn new(inner: StorageRef) -> Self {
        PowersetStorage { inner }
    }

    pub fn inner(&self) -> &StorageRef {
        &self.inner
    }
}

impl DataStorage for PowersetStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Powerset(Box::new(self.inner.spec()))
    }

    fn initial(&self) -> Config {
        Config::set([self.inner.initial()])
    }

    fn predicates(&self) -> Vec<Pred> {
        vec![Pred::All]
    }

    fn instructions(&self) -> Vec<Instr> {
        self.inner.instructions()
    }

    fn has_instruction(&self, r: &Instr) -> bool {
        self.inner.has_instruction(r)
    }

    fn test(&self, p: &Pred, _: &Config) -> bool {
        *p == Pred::All
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(d) = c.as_set() else { return Ok(vec![]) };
        let mut union = Vec::new();
        for e in d {
            union.extend(self.inner.apply(r, e)?);
        }
        if union.is_empty() {
            Ok(vec![])
        } else {
            Ok(vec![Config::set(union)])
        }
    }

    fn apply(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        self.successors(r, c)
    }
}

/// `S′` of the bounded construction: `r` is split into `r#1 … r#k`, where
/// `r#i(c)` is the `i`-th element of `r(c)` ordered by rendered form.
#[derive(Clone, Debug)]
pub struct SplitStorage {
    inner: StorageRef,
    k: usize,
}

impl SplitStorage {
    pub fn new(inner: StorageRef, k: usize) -> Self {
        SplitStorage { inner, k }
    }

    pub fn bound(&self) -> usize {
        self.k
    }

    /// `r(c)` in the fixed enumeration order.
    pub fn enumerate(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let mut succ = successor_set(self.inner.as_ref(), r, c)?;
        succ.sort_by_cached_key(|c| c.to_string());
        if succ.len() > self.k {
            return Err(Error::BoundExceeded {
                instr: r.clone(),
                config: c.clone(),
                found: succ.len(),
                bound: self.k,
            });
        }
        Ok(succ)
    }
}

impl DataStorage for SplitStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Split {
            inner: Box::new(self.inner.spec()),
            k: self.k,
        }
    }

    fn initial(&self) -> Config {
        self.inner.initial()
    }

    fn predicates(&self) -> Vec<Pred> {
        self.inner.predicates()
    }

    fn instructions(&self) -> Vec<Instr> {
        let mut rs = Vec::new();
        for r in self.inner.instructions() {
            for i in 1..=self.k {
                rs.push(Instr::Nth(i, Box::new(r.clone())));
            }
        }
        rs
    }

    fn has_instruction(&self, r: &Instr) -> bool {
        match r {
            Instr::Nth(i, r) => (1..=self.k).contains(i) && self.inner.has_instruction(r),
            Instr::Restrict(r, p) => self.has_instruction(r) && self.has_predicate(p),
            _ => false,
        }
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        self.inner.test(p, c)
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        match r {
            Instr::Nth(i, r) => Ok(self.enumerate(r, c)?.into_iter().nth(i - 1).into_iter().collect()),
            _ => Ok(vec![]),
        }
    }
}
