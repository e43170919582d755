//! Data storages `S = (C, P, R, c_i)`.
//!
//! Instructions are realised pointwise as successor-set functions
//! `c ↦ r(c)`; an empty set means the instruction is not applicable. All
//! storages share the [`Config`] type and the [`Pred`]/[`Instr`] term
//! vocabulary.

mod config;
mod count;
mod derived;
pub(crate) mod pushdown;
mod spec;
mod terms;
mod tree_stack;

use std::fmt::Debug;
use std::sync::Arc;

pub use config::{render_word, syms, Config, Sym, TreeStack};
pub use count::CountStorage;
pub use derived::{NoneStorage, PowersetStorage, PredicateFreeStorage, SplitStorage};
pub use pushdown::{PdFlavor, PushdownStorage};
pub use spec::StorageSpec;
pub use terms::{Instr, Pred};
pub use tree_stack::{TreeStackStorage, DEFAULT_MAX_ARITY};

use crate::error::{Error, Result};

pub type StorageRef = Arc<dyn DataStorage>;

pub trait DataStorage: Debug + Send + Sync {
    /// Serialisable description; two storages are the same iff their specs
    /// are equal.
    fn spec(&self) -> StorageSpec;

    fn initial(&self) -> Config;

    /// The registered basic predicates.
    fn predicates(&self) -> Vec<Pred>;

    /// The registered basic instructions.
    fn instructions(&self) -> Vec<Instr>;

    fn has_predicate(&self, p: &Pred) -> bool {
        self.predicates().contains(p)
    }

    fn has_instruction(&self, r: &Instr) -> bool {
        match r {
            Instr::Restrict(r, p) => self.has_instruction(r) && self.has_predicate(p),
            _ => self.instructions().contains(r),
        }
    }

    /// Membership `c ∈ p` for a registered predicate.
    fn test(&self, p: &Pred, c: &Config) -> bool;

    /// `r(c)` for a registered basic instruction.
    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>>;

    /// `r(c)` for any registered instruction term, including restrictions.
    fn apply(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        match r {
            Instr::Restrict(inner, p) => {
                if self.test(p, c) {
                    self.apply(inner, c)
                } else {
                    Ok(Vec::new())
                }
            }
            _ => self.successors(r, c),
        }
    }
}

fn describe(s: &dyn DataStorage) -> String {
    s.spec().kind_name().to_string()
}

/// `c ∈ p`, failing for predicates the storage does not know.
pub fn check_predicate(s: &dyn DataStorage, p: &Pred, c: &Config) -> Result<bool> {
    if !s.has_predicate(p) {
        return Err(Error::UnknownPredicate {
            storage: describe(s),
            pred: p.clone(),
        });
    }
    Ok(s.test(p, c))
}

/// The deduplicated set `r(c)`, failing for instructions the storage does
/// not know.
pub fn apply_instruction(s: &dyn DataStorage, r: &Instr, c: &Config) -> Result<Vec<Config>> {
    if !s.has_instruction(r) {
        return Err(Error::UnknownInstruction {
            storage: describe(s),
            instr: r.clone(),
        });
    }
    successor_set(s, r, c)
}

/// `r(c)` without the registration check, sorted and duplicate free.
pub(crate) fn successor_set(s: &dyn DataStorage, r: &Instr, c: &Config) -> Result<Vec<Config>> {
    let mut out = s.apply(r, c)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Largest `|r(c)|` over every registered instruction and sampled `c`.
///
/// This is evidence for bounded nondeterminism on the sample, not a proof.
pub fn branching_bound(s: &dyn DataStorage, sample: &[Config]) -> Result<usize> {
    let mut best = 0;
    for r in s.instructions() {
        for c in sample {
            best = best.max(successor_set(s, &r, c)?.len());
        }
    }
    Ok(best)
}
