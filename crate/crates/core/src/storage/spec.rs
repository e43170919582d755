use std::fmt::{self, Display};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    render_word, CountStorage, NoneStorage, PdFlavor, PowersetStorage, PredicateFreeStorage,
    PushdownStorage, SplitStorage, StorageRef, Sym, TreeStackStorage, DEFAULT_MAX_ARITY,
};
use crate::approx::targets::{BoundedStorage, ParityStorage, TopKStorage, UniqStorage};
use crate::error::{Error, Result};

/// Serialisable description of a storage.
///
/// Approximation targets remember the pushdown flavor of their source
/// because it decides which instruction terms they register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum StorageSpec {
    None,
    Count,
    Pushdown { flavor: PdFlavor, gamma: Vec<Sym> },
    TreeStack { gamma: Vec<Sym>, max_arity: u32 },
    /// Target of the even/odd abstraction of `Count`.
    Parity,
    /// Target of `A_top`: labels `Γ ∪ {@}`.
    Top { flavor: PdFlavor, gamma: Vec<Sym> },
    /// Target of `A_top,k`: words of length at most `k`.
    TopK { flavor: PdFlavor, gamma: Vec<Sym>, k: usize },
    /// Target of `A_uniq`: repetition-free words.
    Uniq { flavor: PdFlavor, gamma: Vec<Sym> },
    /// Target of `A_bd,k`.
    Bounded { flavor: PdFlavor, gamma: Vec<Sym>, k: usize },
    PredicateFree(Box<StorageSpec>),
    Powerset(Box<StorageSpec>),
    Split { inner: Box<StorageSpec>, k: usize },
}

impl StorageSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            StorageSpec::None => "none",
            StorageSpec::Count => "count",
            StorageSpec::Pushdown { flavor, .. } => flavor.kind_name(),
            StorageSpec::TreeStack { .. } => "tree-stack",
            StorageSpec::Parity => "parity",
            StorageSpec::Top { .. } => "top",
            StorageSpec::TopK { .. } => "top-k",
            StorageSpec::Uniq { .. } => "uniq",
            StorageSpec::Bounded { .. } => "bounded",
            StorageSpec::PredicateFree(_) => "predicate-free",
            StorageSpec::Powerset(_) => "powerset",
            StorageSpec::Split { .. } => "split",
        }
    }

    pub fn gamma(&self) -> Option<&[Sym]> {
        match self {
            StorageSpec::Pushdown { gamma, .. }
            | StorageSpec::TreeStack { gamma, .. }
            | StorageSpec::Top { gamma, .. }
            | StorageSpec::TopK { gamma, .. }
            | StorageSpec::Uniq { gamma, .. }
            | StorageSpec::Bounded { gamma, .. } => Some(gamma),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<StorageRef> {
        let nonempty = |g: &[Sym]| {
            if g.is_empty() {
                Err(Error::InvalidParameter(format!("storage `{}` needs a nonempty gamma", self.kind_name())))
            } else {
                Ok(g.to_vec())
            }
        };
        let positive = |k: usize| {
            if k == 0 {
                Err(Error::InvalidParameter(format!("storage `{}` needs k > 0", self.kind_name())))
            } else {
                Ok(k)
            }
        };
        Ok(match self {
            StorageSpec::None => Arc::new(NoneStorage),
            StorageSpec::Count => Arc::new(CountStorage),
            StorageSpec::Pushdown { flavor, gamma } => Arc::new(PushdownStorage::new(nonempty(gamma)?, *flavor)),
            StorageSpec::TreeStack { gamma, max_arity } => {
                if *max_arity == 0 {
                    return Err(Error::InvalidParameter("tree-stack needs max_arity > 0".into()));
                }
                Arc::new(TreeStackStorage::new(nonempty(gamma)?, *max_arity))
            }
            StorageSpec::Parity => Arc::new(ParityStorage),
            StorageSpec::Top { flavor, gamma } => Arc::new(TopKStorage::top(nonempty(gamma)?, *flavor)?),
            StorageSpec::TopK { flavor, gamma, k } => {
                Arc::new(TopKStorage::new(nonempty(gamma)?, positive(*k)?, *flavor))
            }
            StorageSpec::Uniq { flavor, gamma } => Arc::new(UniqStorage::new(nonempty(gamma)?, *flavor)),
            StorageSpec::Bounded { flavor, gamma, k } => {
                Arc::new(BoundedStorage::new(nonempty(gamma)?, positive(*k)?, *flavor))
            }
            StorageSpec::PredicateFree(inner) => Arc::new(PredicateFreeStorage::new(inner.build()?)),
            StorageSpec::Powerset(inner) => Arc::new(PowersetStorage::new(inner.build()?)),
            StorageSpec::Split { inner, k } => Arc::new(SplitStorage::new(inner.build()?, positive(*k)?)),
        })
    }
}

impl Display for StorageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind_name())?;
        match self {
            StorageSpec::TreeStack { gamma, max_arity } => write!(f, "[{}; {max_arity}]", render_word(gamma)),
            StorageSpec::TopK { gamma, k, .. } | StorageSpec::Bounded { gamma, k, .. } => {
                write!(f, "[{}; k={k}]", render_word(gamma))
            }
            StorageSpec::PredicateFree(inner) | StorageSpec::Powerset(inner) => write!(f, "({inner})"),
            StorageSpec::Split { inner, k } => write!(f, "({inner}; k={k})"),
            _ => match self.gamma() {
                Some(g) => write!(f, "[{}]", render_word(g)),
                None => Ok(()),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<Sym>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_arity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flavor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner: Option<Box<StorageSpec>>,
}

impl RawSpec {
    fn bare(kind: &str) -> RawSpec {
        RawSpec {
            kind: kind.into(),
            gamma: None,
            max_arity: None,
            k: None,
            flavor: None,
            inner: None,
        }
    }
}

impl From<StorageSpec> for RawSpec {
    fn from(s: StorageSpec) -> RawSpec {
        let mut raw = RawSpec::bare(s.kind_name());
        raw.gamma = s.gamma().map(<[Sym]>::to_vec);
        match s {
            StorageSpec::TreeStack { max_arity, .. } => raw.max_arity = Some(max_arity),
            StorageSpec::Top { flavor, .. } | StorageSpec::Uniq { flavor, .. } => {
                raw.flavor = Some(flavor.kind_name().into())
            }
            StorageSpec::TopK { flavor, k, .. } | StorageSpec::Bounded { flavor, k, .. } => {
                raw.flavor = Some(flavor.kind_name().into());
                raw.k = Some(k);
            }
            StorageSpec::PredicateFree(inner) | StorageSpec::Powerset(inner) => raw.inner = Some(inner),
            StorageSpec::Split { inner, k } => {
                raw.inner = Some(inner);
                raw.k = Some(k);
            }
            _ => {}
        }
        raw
    }
}

impl TryFrom<RawSpec> for StorageSpec {
    type Error = String;

    fn try_from(raw: RawSpec) -> Result<StorageSpec, String> {
        let kind = raw.kind.as_str();
        let gamma = || raw.gamma.clone().ok_or_else(|| format!("storage `{kind}` needs `gamma`"));
        let k = || raw.k.ok_or_else(|| format!("storage `{kind}` needs `k`"));
        let inner = || raw.inner.clone().ok_or_else(|| format!("storage `{kind}` needs `inner`"));
        let flavor = || match raw.flavor.as_deref() {
            None => Ok(PdFlavor::Plain),
            Some(f) => PdFlavor::from_kind_name(f).ok_or_else(|| format!("unknown pushdown flavor `{f}`")),
        };
        if let Some(f) = PdFlavor::from_kind_name(kind) {
            return Ok(StorageSpec::Pushdown { flavor: f, gamma: gamma()? });
        }
        Ok(match kind {
            "none" => StorageSpec::None,
            "count" => StorageSpec::Count,
            "tree-stack" => StorageSpec::TreeStack {
                gamma: gamma()?,
                max_arity: raw.max_arity.unwrap_or(DEFAULT_MAX_ARITY),
            },
            "parity" => StorageSpec::Parity,
            "top" => StorageSpec::Top { flavor: flavor()?, gamma: gamma()? },
            "top-k" => StorageSpec::TopK { flavor: flavor()?, gamma: gamma()?, k: k()? },
            "uniq" => StorageSpec::Uniq { flavor: flavor()?, gamma: gamma()? },
            "bounded" => StorageSpec::Bounded { flavor: flavor()?, gamma: gamma()?, k: k()? },
            "predicate-free" => StorageSpec::PredicateFree(inner()?),
            "powerset" => StorageSpec::Powerset(inner()?),
            "split" => StorageSpec::Split { inner: inner()?, k: k()? },
            other => return Err(format!("unknown storage kind `{other}`")),
        })
    }
}
