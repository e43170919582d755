use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An interned-by-sharing alphabet symbol (input or storage).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl From<String> for Sym {
    fn from(s: String) -> Self {
        Sym(Arc::from(s))
    }
}

impl From<Sym> for String {
    fn from(s: Sym) -> Self {
        s.0.to_string()
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Splits a string into single-character symbols.
pub fn syms(s: &str) -> Vec<Sym> {
    s.chars().map(|c| Sym::from(c.to_string())).collect()
}

/// Renders a symbol sequence: concatenated when every symbol is one
/// character, space separated otherwise, `ε` when empty.
pub fn render_word(w: &[Sym]) -> String {
    if w.is_empty() {
        return "ε".into();
    }
    if w.iter().all(|s| s.as_str().chars().count() == 1) {
        w.iter().map(Sym::as_str).collect()
    } else {
        w.iter().map(Sym::as_str).collect::<Vec<_>>().join(" ")
    }
}

/// A tree-stack `⟨ξ, ρ⟩`.
///
/// The root (address `ε`) is implicit and carries `@`; `nodes` holds every
/// other address of `dom(ξ)` with its label. Addresses use child indices
/// starting at 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeStack {
    nodes: BTreeMap<Vec<u32>, Sym>,
    pointer: Vec<u32>,
}

impl TreeStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a tree-stack, checking prefix closure and that the pointer is
    /// in the domain.
    pub fn from_parts(nodes: BTreeMap<Vec<u32>, Sym>, pointer: Vec<u32>) -> Option<Self> {
        let in_dom = |a: &[u32]| a.is_empty() || nodes.contains_key(a);
        let closed = nodes
            .keys()
            .all(|a| !a.contains(&0) && in_dom(&a[..a.len() - 1]));
        (closed && in_dom(&pointer)).then_some(TreeStack { nodes, pointer })
    }

    pub fn pointer(&self) -> &[u32] {
        &self.pointer
    }

    pub fn nodes(&self) -> &BTreeMap<Vec<u32>, Sym> {
        &self.nodes
    }

    pub fn at_bottom(&self) -> bool {
        self.pointer.is_empty()
    }

    /// Label under the pointer; `None` at the root (`@`).
    pub fn current(&self) -> Option<&Sym> {
        self.nodes.get(&self.pointer)
    }

    fn child(&self, n: u32) -> Vec<u32> {
        let mut a = self.pointer.clone();
        a.push(n);
        a
    }

    pub fn up(&self, n: u32) -> Option<TreeStack> {
        let a = self.child(n);
        self.nodes.contains_key(&a).then(|| TreeStack {
            nodes: self.nodes.clone(),
            pointer: a,
        })
    }

    pub fn down(&self) -> Option<TreeStack> {
        let (_, parent) = self.pointer.split_last()?;
        Some(TreeStack {
            nodes: self.nodes.clone(),
            pointer: parent.to_vec(),
        })
    }

    pub fn push(&self, n: u32, label: Sym) -> Option<TreeStack> {
        let a = self.child(n);
        if n == 0 || self.nodes.contains_key(&a) {
            return None;
        }
        let mut nodes = self.nodes.clone();
        nodes.insert(a.clone(), label);
        Some(TreeStack { nodes, pointer: a })
    }

    /// Labels on the path from the pointer down to (excluding) the root.
    pub fn path_labels(&self) -> Vec<Sym> {
        (1..=self.pointer.len())
            .rev()
            .map(|len| self.nodes[&self.pointer[..len]].clone())
            .collect()
    }
}

fn render_address(a: &[u32]) -> String {
    if a.is_empty() {
        "ε".into()
    } else {
        a.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
    }
}

impl Display for TreeStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨{ε:@")?;
        for (a, l) in &self.nodes {
            write!(f, ", {}:{}", render_address(a), l)?;
        }
        write!(f, "}}, {}⟩", render_address(&self.pointer))
    }
}

/// A storage configuration.
///
/// One closed type covers every storage in the crate so that automata,
/// strategies and the derived storages of the normal-form constructions can
/// share search code.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    Unit,
    Nat(u64),
    /// A pushdown, index 0 is the top.
    Word(Vec<Sym>),
    Label(Sym),
    Tree(TreeStack),
    /// A finite set of configurations, sorted and duplicate free.
    Set(Vec<Config>),
}

impl Config {
    pub fn word(s: &str) -> Config {
        Config::Word(syms(s))
    }

    pub fn label(s: &str) -> Config {
        Config::Label(Sym::new(s))
    }

    pub fn set<I: IntoIterator<Item = Config>>(items: I) -> Config {
        let mut v: Vec<Config> = items.into_iter().collect();
        v.sort();
        v.dedup();
        Config::Set(v)
    }

    pub fn as_word(&self) -> Option<&[Sym]> {
        match self {
            Config::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Config::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_label(&self) -> Option<&Sym> {
        match self {
            Config::Label(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_tree(&self) -> Option<&TreeStack> {
        match self {
            Config::Tree(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&[Config]> {
        match self {
            Config::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Unit => f.write_str("()"),
            Config::Nat(n) => write!(f, "{n}"),
            Config::Word(w) => f.write_str(&render_word(w)),
            Config::Label(l) => write!(f, "{l}"),
            Config::Tree(t) => write!(f, "{t}"),
            Config::Set(s) => {
                f.write_str("{")?;
                for (i, c) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("}")
            }
        }
    }
}
