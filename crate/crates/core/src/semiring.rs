//! Weight algebras.
//!
//! A [`Semiring`] bundles the carrier operations ⊕, ⊗, 0̄, 1̄ with a partial
//! order. Parsing ranks runs exclusively through [`Semiring::compare`], so an
//! instance decides what "better" means; for [`Tropical`] the order is the
//! reverse of the numeric order on costs.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;

/// A semiring `(K, ⊕, ⊗, 0̄, 1̄)` together with a partial order `≤` on `K`.
///
/// Implementations are expected to be *positively ordered*: `⊕` and `⊗`
/// preserve `≤` and `0̄` is the least element. The property suites in this
/// crate check these laws on sampled values.
pub trait Semiring: Clone + Debug + Send + Sync {
    type Value: Clone + Debug + Display + PartialEq + Eq + Hash + Send + Sync;

    fn name(&self) -> &'static str;
    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn plus(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn times(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Partial order; `None` for incomparable pairs.
    fn compare(&self, a: &Self::Value, b: &Self::Value) -> Option<Ordering>;

    fn leq(&self, a: &Self::Value, b: &Self::Value) -> bool {
        matches!(self.compare(a, b), Some(Ordering::Less | Ordering::Equal))
    }

    /// `a ⊕ b` is the greater of `a` and `b`. Then the weight of a word is
    /// the weight of its best run.
    fn is_selective(&self) -> bool {
        false
    }

    /// Reads a weight from its file representation.
    fn parse_value(&self, v: &serde_json::Value) -> Option<Self::Value>;

    fn value_to_json(&self, v: &Self::Value) -> serde_json::Value;
}

/// Left fold of ⊕ starting at 0̄.
pub fn sum_finite<'a, S, I>(sr: &S, values: I) -> S::Value
where
    S: Semiring,
    I: IntoIterator<Item = &'a S::Value>,
    S::Value: 'a,
{
    values
        .into_iter()
        .fold(sr.zero(), |acc, v| sr.plus(&acc, v))
}

/// Left fold of ⊗ starting at 1̄.
pub fn product_seq<'a, S, I>(sr: &S, values: I) -> S::Value
where
    S: Semiring,
    I: IntoIterator<Item = &'a S::Value>,
    S::Value: 'a,
{
    values
        .into_iter()
        .fold(sr.one(), |acc, v| sr.times(&acc, v))
}

/// `({false, true}, ∨, ∧, false, true)` ordered `false ≤ true`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    fn name(&self) -> &'static str {
        "boolean"
    }
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn times(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn compare(&self, a: &bool, b: &bool) -> Option<Ordering> {
        Some(a.cmp(b))
    }
    fn is_selective(&self) -> bool {
        true
    }
    fn parse_value(&self, v: &serde_json::Value) -> Option<bool> {
        match v {
            serde_json::Value::Bool(b) => Some(*b),
            serde_json::Value::Number(n) => match n.as_u64()? {
                0 => Some(false),
                1 => Some(true),
                _ => None,
            },
            _ => None,
        }
    }
    fn value_to_json(&self, v: &bool) -> serde_json::Value {
        serde_json::Value::Bool(*v)
    }
}

/// An element of `ℕ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }

    fn parse(v: &serde_json::Value) -> Option<ExtNat> {
        match v {
            serde_json::Value::Number(n) => n.as_u64().map(ExtNat::Fin),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" | "∞" | "infinity" => Some(ExtNat::Inf),
                other => other.parse().ok().map(ExtNat::Fin),
            },
            _ => None,
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            ExtNat::Fin(n) => serde_json::Value::from(n),
            ExtNat::Inf => serde_json::Value::from("inf"),
        }
    }
}

impl Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::Fin(n)
    }
}

/// `(ℕ ∪ {∞}, min, +, ∞, 0)`, also known under the alias `viterbi`.
///
/// Ordered by the reverse of the numeric order: a smaller cost is a greater
/// weight, so the best run is the cheapest one and `∞ = 0̄` is least.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tropical;

impl Semiring for Tropical {
    type Value = ExtNat;

    fn name(&self) -> &'static str {
        "tropical"
    }
    fn zero(&self) -> ExtNat {
        ExtNat::Inf
    }
    fn one(&self) -> ExtNat {
        ExtNat::Fin(0)
    }
    fn plus(&self, a: &ExtNat, b: &ExtNat) -> ExtNat {
        (*a).min(*b)
    }
    fn times(&self, a: &ExtNat, b: &ExtNat) -> ExtNat {
        match (a, b) {
            (ExtNat::Fin(x), ExtNat::Fin(y)) => x.checked_add(*y).map_or(ExtNat::Inf, ExtNat::Fin),
            _ => ExtNat::Inf,
        }
    }
    fn compare(&self, a: &ExtNat, b: &ExtNat) -> Option<Ordering> {
        Some(b.cmp(a))
    }
    fn is_selective(&self) -> bool {
        true
    }
    fn parse_value(&self, v: &serde_json::Value) -> Option<ExtNat> {
        ExtNat::parse(v)
    }
    fn value_to_json(&self, v: &ExtNat) -> serde_json::Value {
        v.to_json()
    }
}

/// `(ℕ ∪ {∞}, +, ⋅, 0, 1)` where every value above `cap` collapses to `∞`.
///
/// The collapse is a semiring congruence, so the laws hold exactly; a result
/// of `∞` obtained from finite operands is reported by [`Counting::saturated`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counting {
    pub cap: u64,
}

pub const DEFAULT_COUNTING_CAP: u64 = 1 << 62;

impl Default for Counting {
    fn default() -> Self {
        Counting { cap: DEFAULT_COUNTING_CAP }
    }
}

impl Counting {
    pub fn with_cap(cap: u64) -> Self {
        Counting { cap }
    }

    fn clamp(&self, n: Option<u64>) -> ExtNat {
        match n {
            Some(n) if n <= self.cap => ExtNat::Fin(n),
            _ => ExtNat::Inf,
        }
    }

    /// True for values that no longer carry an exact count.
    pub fn saturated(&self, v: &ExtNat) -> bool {
        *v == ExtNat::Inf
    }
}

impl Semiring for Counting {
    type Value = ExtNat;

    fn name(&self) -> &'static str {
        "counting"
    }
    fn zero(&self) -> ExtNat {
        ExtNat::Fin(0)
    }
    fn one(&self) -> ExtNat {
        self.clamp(Some(1))
    }
    fn plus(&self, a: &ExtNat, b: &ExtNat) -> ExtNat {
        match (a, b) {
            (ExtNat::Fin(x), ExtNat::Fin(y)) => self.clamp(x.checked_add(*y)),
            _ => ExtNat::Inf,
        }
    }
    fn times(&self, a: &ExtNat, b: &ExtNat) -> ExtNat {
        match (a, b) {
            (ExtNat::Fin(0), _) | (_, ExtNat::Fin(0)) => ExtNat::Fin(0),
            (ExtNat::Fin(x), ExtNat::Fin(y)) => self.clamp(x.checked_mul(*y)),
            _ => ExtNat::Inf,
        }
    }
    fn compare(&self, a: &ExtNat, b: &ExtNat) -> Option<Ordering> {
        Some(a.cmp(b))
    }
    fn parse_value(&self, v: &serde_json::Value) -> Option<ExtNat> {
        ExtNat::parse(v).map(|x| match x {
            ExtNat::Fin(n) => self.clamp(Some(n)),
            ExtNat::Inf => ExtNat::Inf,
        })
    }
    fn value_to_json(&self, v: &ExtNat) -> serde_json::Value {
        v.to_json()
    }
}

/// The semirings selectable by name in automaton files.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinSemiring {
    Boolean,
    Tropical,
    Counting,
}

impl BuiltinSemiring {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "boolean" | "bool" => Some(BuiltinSemiring::Boolean),
            "tropical" | "viterbi" => Some(BuiltinSemiring::Tropical),
            "counting" => Some(BuiltinSemiring::Counting),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BuiltinSemiring::Boolean => "boolean",
            BuiltinSemiring::Tropical => "tropical",
            BuiltinSemiring::Counting => "counting",
        }
    }
}
