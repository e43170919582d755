//! Predicate and instruction terms.
//!
//! Transitions refer to predicates and instructions by term; a storage gives
//! each term its meaning. Approximated storages reuse the source vocabulary
//! wherever the approximated relation keeps its shape, so a term such as
//! `pop` may denote a nondeterministic relation in a coarse storage.

use std::fmt::{self, Display};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Sym;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Pred {
    /// The trivial predicate `C`.
    All,
    /// Empty pushdown, tree-stack pointer at the root, or `@` label.
    Bottom,
    /// Pushdown top symbol.
    Top(Sym),
    /// Tree-stack label under the pointer.
    Equals(Sym),
    /// Counter value `> 0`.
    Positive,
    /// Counter value `0`.
    Zero,
    /// Finite-label storages: the configuration is exactly this label.
    Is(Sym),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum Instr {
    Stay,
    Pop,
    Push(Sym),
    /// `stay_γ`: replace the top symbol.
    Replace(Sym),
    /// `pop*`: remove any number of symbols.
    PopStar,
    /// `push_Γ`: push any symbol.
    PushAny,
    /// `pop_γ`: pop if the top is `γ`.
    PopSym(Sym),
    Inc,
    Dec,
    /// Parity swap.
    Flip,
    Up(u32),
    Down,
    TreePush(u32, Sym),
    /// `r↾p`: apply `r` only where `p` holds.
    Restrict(Box<Instr>, Pred),
    /// The `i`-th (1-based) successor of `r` in the canonical enumeration.
    Nth(usize, Box<Instr>),
}

impl Instr {
    pub fn restrict(r: Instr, p: Pred) -> Instr {
        if p == Pred::All {
            r
        } else {
            Instr::Restrict(Box::new(r), p)
        }
    }
}

impl Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::All => f.write_str("all"),
            Pred::Bottom => f.write_str("bottom"),
            Pred::Top(s) => write!(f, "top({s})"),
            Pred::Equals(s) => write!(f, "equals({s})"),
            Pred::Positive => f.write_str("positive"),
            Pred::Zero => f.write_str("zero"),
            Pred::Is(s) => write!(f, "is({s})"),
        }
    }
}

impl Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Stay => f.write_str("stay"),
            Instr::Pop => f.write_str("pop"),
            Instr::Push(s) => write!(f, "push({s})"),
            Instr::Replace(s) => write!(f, "stay({s})"),
            Instr::PopStar => f.write_str("pop*"),
            Instr::PushAny => f.write_str("push_any"),
            Instr::PopSym(s) => write!(f, "pop({s})"),
            Instr::Inc => f.write_str("inc"),
            Instr::Dec => f.write_str("dec"),
            Instr::Flip => f.write_str("flip"),
            Instr::Up(n) => write!(f, "up({n})"),
            Instr::Down => f.write_str("down"),
            Instr::TreePush(n, s) => write!(f, "push({n},{s})"),
            Instr::Restrict(r, p) => write!(f, "{r}↾{p}"),
            Instr::Nth(i, r) => write!(f, "{r}#{i}"),
        }
    }
}

fn named(name: &str, arg: impl Into<Value>) -> Value {
    json!({ "name": name, "arg": arg.into() })
}

impl From<Pred> for Value {
    fn from(p: Pred) -> Value {
        match p {
            Pred::All => "all".into(),
            Pred::Bottom => "bottom".into(),
            Pred::Positive => "positive".into(),
            Pred::Zero => "zero".into(),
            Pred::Top(s) => named("top", s.as_str()),
            Pred::Equals(s) => named("equals", s.as_str()),
            Pred::Is(s) => named("is", s.as_str()),
        }
    }
}

impl From<Instr> for Value {
    fn from(r: Instr) -> Value {
        match r {
            Instr::Stay => "stay".into(),
            Instr::Pop => "pop".into(),
            Instr::PopStar => "pop*".into(),
            Instr::PushAny => "push_any".into(),
            Instr::Inc => "inc".into(),
            Instr::Dec => "dec".into(),
            Instr::Flip => "flip".into(),
            Instr::Down => "down".into(),
            Instr::Push(s) => named("push", s.as_str()),
            Instr::Replace(s) => named("stay", s.as_str()),
            Instr::PopSym(s) => named("pop", s.as_str()),
            Instr::Up(n) => named("up", n),
            Instr::TreePush(n, s) => json!({ "name": "push", "args": [n, s.as_str()] }),
            Instr::Restrict(r, p) => {
                json!({ "name": "restrict", "instr": Value::from(*r), "pred": Value::from(p) })
            }
            Instr::Nth(i, r) => json!({ "name": "nth", "index": i, "instr": Value::from(*r) }),
        }
    }
}

enum Arg {
    None,
    Sym(Sym),
    Num(u32),
    Pair(u32, Sym),
}

fn split_term(v: &Value) -> Result<(String, Arg), String> {
    match v {
        Value::String(s) => Ok((s.clone(), Arg::None)),
        Value::Object(o) => {
            let name = o
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| format!("term without a name: {v}"))?
                .to_string();
            let arg = match (o.get("arg"), o.get("args")) {
                (Some(a), None) => scalar_arg(a)?,
                (None, Some(Value::Array(items))) => match items.as_slice() {
                    [a] => scalar_arg(a)?,
                    [Value::Number(n), s] => Arg::Pair(
                        n.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or("bad index")?,
                        Sym::from(value_as_symbol(s)?),
                    ),
                    _ => return Err(format!("unsupported argument list in {v}")),
                },
                (None, None) => Arg::None,
                _ => return Err(format!("malformed term {v}")),
            };
            Ok((name, arg))
        }
        _ => Err(format!("expected a term name or object, found {v}")),
    }
}

fn value_as_symbol(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(format!("expected a symbol, found {v}")),
    }
}

fn scalar_arg(v: &Value) -> Result<Arg, String> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .map(Arg::Num)
            .ok_or_else(|| format!("bad numeric argument {v}")),
        Value::String(s) => Ok(Arg::Sym(Sym::from(s.as_str()))),
        _ => Err(format!("bad argument {v}")),
    }
}

impl TryFrom<Value> for Pred {
    type Error = String;

    fn try_from(v: Value) -> Result<Pred, String> {
        let (name, arg) = split_term(&v)?;
        Ok(match (name.as_str(), arg) {
            ("all" | "true" | "Γ*" | "ℕ" | "N" | "TS", Arg::None) => Pred::All,
            ("bottom", Arg::None) => Pred::Bottom,
            ("positive" | "ℕ₊" | "N+", Arg::None) => Pred::Positive,
            ("zero" | "{0}", Arg::None) => Pred::Zero,
            ("top", Arg::Sym(s)) => Pred::Top(s),
            ("equals", Arg::Sym(s)) => Pred::Equals(s),
            ("is", Arg::Sym(s)) => Pred::Is(s),
            _ => return Err(format!("unknown predicate {v}")),
        })
    }
}

impl TryFrom<Value> for Instr {
    type Error = String;

    fn try_from(v: Value) -> Result<Instr, String> {
        if let Value::Object(o) = &v {
            match o.get("name").and_then(Value::as_str) {
                Some("restrict") => {
                    let r = Instr::try_from(o.get("instr").cloned().ok_or("restrict needs `instr`")?)?;
                    let p = Pred::try_from(o.get("pred").cloned().ok_or("restrict needs `pred`")?)?;
                    return Ok(Instr::Restrict(Box::new(r), p));
                }
                Some("nth") => {
                    let i = o
                        .get("index")
                        .and_then(Value::as_u64)
                        .ok_or("nth needs a numeric `index`")?;
                    let r = Instr::try_from(o.get("instr").cloned().ok_or("nth needs `instr`")?)?;
                    return Ok(Instr::Nth(i as usize, Box::new(r)));
                }
                _ => {}
            }
        }
        let (name, arg) = split_term(&v)?;
        Ok(match (name.as_str(), arg) {
            ("stay" | "id", Arg::None) => Instr::Stay,
            ("stay", Arg::Sym(s)) => Instr::Replace(s),
            ("pop", Arg::None) => Instr::Pop,
            ("pop", Arg::Sym(s)) => Instr::PopSym(s),
            ("push", Arg::Sym(s)) => Instr::Push(s),
            ("push", Arg::Pair(n, s)) => Instr::TreePush(n, s),
            ("pop*" | "pop_star", Arg::None) => Instr::PopStar,
            ("push_any" | "push_Γ" | "push*", Arg::None) => Instr::PushAny,
            ("inc", Arg::None) => Instr::Inc,
            ("dec", Arg::None) => Instr::Dec,
            ("flip", Arg::None) => Instr::Flip,
            ("up", Arg::Num(n)) => Instr::Up(n),
            ("down", Arg::None) => Instr::Down,
            _ => return Err(format!("unknown instruction {v}")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let p: Pred = serde_json::from_str(r#"{"name":"top","arg":"a"}"#).unwrap();
        assert_eq!(p, Pred::Top("a".into()));
        let r: Instr = serde_json::from_str(r#"{"name":"push","args":[1,"*"]}"#).unwrap();
        assert_eq!(r, Instr::TreePush(1, "*".into()));
        let r: Instr = serde_json::from_str(r#""push_Γ""#).unwrap();
        assert_eq!(r, Instr::PushAny);
        assert!(serde_json::from_str::<Instr>(r#""jump""#).is_err());
    }

    #[test]
    fn nested_terms_survive_serialisation() {
        let r = Instr::Nth(2, Box::new(Instr::restrict(Instr::Inc, Pred::Zero)));
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Instr>(&text).unwrap(), r);
        assert_eq!(r.to_string(), "inc↾zero#2");
        assert_eq!(Instr::restrict(Instr::Dec, Pred::All), Instr::Dec);
    }
}
