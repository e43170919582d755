use thiserror::Error;

use crate::automaton::Violation;
use crate::storage::{Config, Instr, Pred};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("storage `{storage}` has no predicate `{pred}`")]
    UnknownPredicate { storage: String, pred: Pred },

    #[error("storage `{storage}` has no instruction `{instr}`")]
    UnknownInstruction { storage: String, instr: Instr },

    #[error("instruction `{instr}` has {found} successors at configuration {config}, bound is {bound}")]
    BoundExceeded {
        instr: Instr,
        config: Config,
        found: usize,
        bound: usize,
    },

    #[error("automaton is invalid: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("{0}")]
    Format(String),

    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("strategy `{strategy}` cannot approximate storage `{storage}`")]
    StorageMismatch { strategy: String, storage: String },

    #[error("strategy `{strategy}` has no closed form for `{term}`")]
    Unsupported { strategy: String, term: String },

    #[error("initial configuration {0} is outside the domain of the strategy")]
    InitialNotApproximable(Config),

    #[error("strategy `{0}` is not total; coarse-to-fine parsing needs a superset approximation")]
    NotTotal(String),

    #[error("configuration space not finite within cap {cap}")]
    CapExhausted { cap: usize },

    #[error("transition `{transition}` increases the weight of a partial run")]
    NonMonotoneWeight { transition: String },

    #[error("weights {0} and {1} are incomparable")]
    Incomparable(String, String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
