//! Weighted automata with data storage.
//!
//! Storages, automata over them, storage approximations, normal forms and
//! coarse-to-fine n-best parsing.

pub mod approx;
pub mod automaton;
pub mod bundled;
pub mod error;
pub mod format;
pub mod parse;
pub mod semiring;
pub mod storage;
pub mod transform;

pub use approx::{Strategy, StrategySpec};
pub use automaton::{Automaton, Run, RunBudget, Transition, WeightedAutomaton};
pub use error::{Error, Result};
pub use format::LoadedAutomaton;
pub use parse::{LoopCondition, NBest, ScoredRun, SearchLimits};
pub use semiring::{Boolean, BuiltinSemiring, Counting, ExtNat, Semiring, Tropical};
pub use storage::{Config, DataStorage, Instr, PdFlavor, Pred, StorageRef, StorageSpec, Sym};
pub use transform::FsaAutomaton;
