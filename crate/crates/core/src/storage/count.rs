use super::{Config, DataStorage, Instr, Pred, StorageSpec};
use crate::error::Result;

/// `Count = (ℕ, {ℕ, ℕ₊, {0}}, {inc, dec}, 0)` plus the identity `stay`,
/// which is the image of pushdown `stay` under the length abstraction.
#[derive(Clone, Copy, Debug, Default)]
pub struct CountStorage;

impl DataStorage for CountStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Count
    }

    fn initial(&self) -> Config {
        Config::Nat(0)
    }

    fn predicates(&self) -> Vec<Pred> {
        vec![Pred::All, Pred::Positive, Pred::Zero]
    }

    fn instructions(&self) -> Vec<Instr> {
        vec![Instr::Inc, Instr::Dec, Instr::Stay]
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        let Some(n) = c.as_nat() else { return false };
        match p {
            Pred::All => true,
            Pred::Positive => n > 0,
            Pred::Zero => n == 0,
            _ => false,
        }
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(n) = c.as_nat() else { return Ok(vec![]) };
        Ok(match r {
            Instr::Inc => n.checked_add(1).map(Config::Nat).into_iter().collect(),
            Instr::Dec => n.checked_sub(1).map(Config::Nat).into_iter().collect(),
            Instr::Stay => vec![Config::Nat(n)],
            _ => vec![],
        })
    }
}
