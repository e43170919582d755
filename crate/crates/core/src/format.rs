//! JSON automaton files.
//!
//! ```json
//! {
//!   "alphabet": ["a", "b"],
//!   "storage": {"kind": "count"},
//!   "states": ["1", "2", "3"],
//!   "initial": ["1"],
//!   "final": ["3"],
//!   "semiring": "tropical",
//!   "transitions": [
//!     {"id": "t1", "from": "1", "read": "a", "pred": "all", "instr": "inc", "to": "1", "weight": 1}
//!   ]
//! }
//! ```
//!
//! States may be strings or integers. `read: ""` is `ε`. Missing ids become
//! `t1, t2, …` by position; a missing weight is the semiring's `1̄`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automaton::{Automaton, Transition, WeightedAutomaton};
use crate::error::{Error, Result};
use crate::semiring::{Boolean, BuiltinSemiring, Counting, Semiring, Tropical};
use crate::storage::{Instr, Pred, StorageSpec, Sym};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAutomaton {
    alphabet: Vec<Sym>,
    storage: StorageSpec,
    states: Vec<Value>,
    initial: Vec<Value>,
    #[serde(rename = "final")]
    finals: Vec<Value>,
    #[serde(default)]
    semiring: Option<String>,
    transitions: Vec<RawTransition>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    from: Value,
    read: String,
    pred: Pred,
    instr: Instr,
    to: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Value>,
}

/// An automaton as read from a file; weighted iff `semiring` was given.
#[derive(Clone, Debug)]
pub enum LoadedAutomaton {
    Unweighted(Automaton),
    Boolean(WeightedAutomaton<Boolean>),
    Tropical(WeightedAutomaton<Tropical>),
    Counting(WeightedAutomaton<Counting>),
}

impl LoadedAutomaton {
    pub fn base(&self) -> &Automaton {
        match self {
            LoadedAutomaton::Unweighted(m) => m,
            LoadedAutomaton::Boolean(m) => &m.base,
            LoadedAutomaton::Tropical(m) => &m.base,
            LoadedAutomaton::Counting(m) => &m.base,
        }
    }

    pub fn semiring(&self) -> Option<BuiltinSemiring> {
        match self {
            LoadedAutomaton::Unweighted(_) => None,
            LoadedAutomaton::Boolean(_) => Some(BuiltinSemiring::Boolean),
            LoadedAutomaton::Tropical(_) => Some(BuiltinSemiring::Tropical),
            LoadedAutomaton::Counting(_) => Some(BuiltinSemiring::Counting),
        }
    }

    /// Canonical file form with every id and weight written out.
    pub fn to_json(&self) -> Value {
        match self {
            LoadedAutomaton::Unweighted(m) => automaton_to_json(m),
            LoadedAutomaton::Boolean(m) => weighted_to_json(m),
            LoadedAutomaton::Tropical(m) => weighted_to_json(m),
            LoadedAutomaton::Counting(m) => weighted_to_json(m),
        }
    }
}

fn state_name(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Format(format!("state must be a string or an integer, found {v}"))),
    }
}

fn lookup(m: &Automaton, v: &Value) -> Result<usize> {
    let name = state_name(v)?;
    m.state_index(&name)
        .ok_or_else(|| Error::Format(format!("state `{name}` is not declared in `states`")))
}

fn weights<S: Semiring>(sr: &S, m: &Automaton, raw: &[RawTransition]) -> Result<Vec<S::Value>> {
    raw.iter()
        .zip(&m.transitions)
        .map(|(r, t)| match &r.weight {
            None => Ok(sr.one()),
            Some(v) => sr
                .parse_value(v)
                .ok_or_else(|| Error::Format(format!("transition `{}`: `{v}` is not a {} weight", t.id, sr.name()))),
        })
        .collect()
}

fn checked<S: Semiring>(wm: WeightedAutomaton<S>) -> Result<WeightedAutomaton<S>> {
    let v = wm.validate();
    if v.is_empty() {
        Ok(wm)
    } else {
        Err(Error::Invalid(v))
    }
}

/// Parses and validates an automaton file.
pub fn parse_automaton(text: &str) -> Result<LoadedAutomaton> {
    let raw: RawAutomaton = serde_json::from_str(text).map_err(|e| Error::Format(format!("parse error: {e}")))?;
    let storage = raw.storage.build()?;
    let mut m = Automaton::new(raw.alphabet, storage);
    for s in &raw.states {
        m.states.push(state_name(s)?);
    }
    for v in &raw.initial {
        m.initial.push(lookup(&m, v)?);
    }
    for v in &raw.finals {
        m.finals.push(lookup(&m, v)?);
    }
    for (i, t) in raw.transitions.iter().enumerate() {
        let tr = Transition {
            id: t.id.clone().unwrap_or_else(|| format!("t{}", i + 1)),
            from: lookup(&m, &t.from)?,
            read: (!t.read.is_empty()).then(|| Sym::from(t.read.as_str())),
            pred: t.pred.clone(),
            instr: t.instr.clone(),
            to: lookup(&m, &t.to)?,
        };
        m.transitions.push(tr);
    }
    let Some(name) = raw.semiring else {
        if let Some(t) = raw.transitions.iter().find(|t| t.weight.is_some()) {
            let id = t.id.clone().unwrap_or_default();
            return Err(Error::Format(format!("transition `{id}` has a weight but the file names no semiring")));
        }
        return Ok(LoadedAutomaton::Unweighted(m.checked()?));
    };
    let kind = BuiltinSemiring::from_name(&name).ok_or_else(|| Error::Format(format!("unknown semiring `{name}`")))?;
    Ok(match kind {
        BuiltinSemiring::Boolean => {
            let ws = weights(&Boolean, &m, &raw.transitions)?;
            LoadedAutomaton::Boolean(checked(WeightedAutomaton::with_weights(m, Boolean, ws))?)
        }
        BuiltinSemiring::Tropical => {
            let ws = weights(&Tropical, &m, &raw.transitions)?;
            LoadedAutomaton::Tropical(checked(WeightedAutomaton::with_weights(m, Tropical, ws))?)
        }
        BuiltinSemiring::Counting => {
            let sr = Counting::default();
            let ws = weights(&sr, &m, &raw.transitions)?;
            LoadedAutomaton::Counting(checked(WeightedAutomaton::with_weights(m, sr, ws))?)
        }
    })
}

pub fn load_automaton(path: impl AsRef<Path>) -> Result<LoadedAutomaton> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_automaton(&text)
}

fn transitions_json(m: &Automaton, weight: impl Fn(usize) -> Option<Value>) -> Vec<Value> {
    m.transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let raw = RawTransition {
                id: Some(t.id.clone()),
                from: Value::String(m.states[t.from].clone()),
                read: t.read.as_ref().map_or(String::new(), |s| s.to_string()),
                pred: t.pred.clone(),
                instr: t.instr.clone(),
                to: Value::String(m.states[t.to].clone()),
                weight: weight(i),
            };
            serde_json::to_value(raw).expect("transitions serialise")
        })
        .collect()
}

fn header(m: &Automaton) -> serde_json::Map<String, Value> {
    let names = |qs: &[usize]| qs.iter().map(|&q| Value::String(m.states[q].clone())).collect::<Vec<_>>();
    let v = json!({
        "alphabet": m.alphabet.iter().map(Sym::as_str).collect::<Vec<_>>(),
        "storage": m.storage.spec(),
        "states": m.states,
        "initial": names(&m.initial),
        "final": names(&m.finals),
    });
    match v {
        Value::Object(o) => o,
        _ => unreachable!(),
    }
}

pub fn automaton_to_json(m: &Automaton) -> Value {
    let mut o = header(m);
    o.insert("transitions".into(), Value::Array(transitions_json(m, |_| None)));
    Value::Object(o)
}

pub fn weighted_to_json<S: Semiring>(wm: &WeightedAutomaton<S>) -> Value {
    let mut o = header(&wm.base);
    o.insert("semiring".into(), Value::String(wm.semiring.name().into()));
    let ts = transitions_json(&wm.base, |i| Some(wm.semiring.value_to_json(&wm.weight(i))));
    o.insert("transitions".into(), Value::Array(ts));
    Value::Object(o)
}
