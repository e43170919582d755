use super::{Config, DataStorage, Instr, Pred, StorageSpec, Sym};
use crate::error::Result;

/// Which member of the pushdown family a storage is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PdFlavor {
    /// `PD_Γ`
    Plain,
    /// `PD′_Γ`: adds `pop*`.
    PopStar,
    /// `PD″_Γ`: adds `push_Γ`.
    NdPush,
    /// `PD†_Γ`: `stay`, `push_Γ` and `pop_γ`; predicates `Γ*` and `bottom`.
    Dagger,
    /// `(PD†_Γ)′`: `push_Γ` split into the `push_γ`.
    DaggerPrime,
}

impl PdFlavor {
    pub fn kind_name(self) -> &'static str {
        match self {
            PdFlavor::Plain => "pushdown",
            PdFlavor::PopStar => "pushdown-popstar",
            PdFlavor::NdPush => "pushdown-ndpush",
            PdFlavor::Dagger => "pushdown-dagger",
            PdFlavor::DaggerPrime => "pushdown-dagger-prime",
        }
    }

    pub fn from_kind_name(s: &str) -> Option<PdFlavor> {
        [
            PdFlavor::Plain,
            PdFlavor::PopStar,
            PdFlavor::NdPush,
            PdFlavor::Dagger,
            PdFlavor::DaggerPrime,
        ]
        .into_iter()
        .find(|f| f.kind_name() == s)
    }

    /// Registered predicates over `gamma`.
    pub fn predicates(self, gamma: &[Sym]) -> Vec<Pred> {
        let mut ps = vec![Pred::All, Pred::Bottom];
        if !matches!(self, PdFlavor::Dagger | PdFlavor::DaggerPrime) {
            ps.extend(gamma.iter().cloned().map(Pred::Top));
        }
        ps
    }

    /// Registered instructions over `gamma`.
    pub fn instructions(self, gamma: &[Sym]) -> Vec<Instr> {
        let each = |f: fn(Sym) -> Instr| gamma.iter().cloned().map(f).collect::<Vec<_>>();
        let mut rs = vec![Instr::Stay];
        match self {
            PdFlavor::Dagger => {
                rs.push(Instr::PushAny);
                rs.extend(each(Instr::PopSym));
            }
            PdFlavor::DaggerPrime => {
                rs.extend(each(Instr::Push));
                rs.extend(each(Instr::PopSym));
            }
            _ => {
                rs.push(Instr::Pop);
                rs.extend(each(Instr::Push));
                rs.extend(each(Instr::Replace));
                match self {
                    PdFlavor::PopStar => rs.push(Instr::PopStar),
                    PdFlavor::NdPush => rs.push(Instr::PushAny),
                    _ => {}
                }
            }
        }
        rs
    }
}

pub(crate) fn pd_test(p: &Pred, w: &[Sym]) -> bool {
    match p {
        Pred::All => true,
        Pred::Bottom => w.is_empty(),
        Pred::Top(g) => w.first() == Some(g),
        _ => false,
    }
}

fn pushed(g: &Sym, w: &[Sym]) -> Vec<Sym> {
    let mut v = Vec::with_capacity(w.len() + 1);
    v.push(g.clone());
    v.extend_from_slice(w);
    v
}

/// Pointwise semantics of the pushdown vocabulary; the top is `w[0]`.
pub(crate) fn pd_apply(gamma: &[Sym], r: &Instr, w: &[Sym]) -> Vec<Vec<Sym>> {
    match r {
        Instr::Stay => vec![w.to_vec()],
        Instr::Pop => w.split_first().map(|(_, rest)| rest.to_vec()).into_iter().collect(),
        Instr::Push(g) => vec![pushed(g, w)],
        Instr::Replace(g) => w
            .split_first()
            .map(|(_, rest)| pushed(g, rest))
            .into_iter()
            .collect(),
        Instr::PopStar => (0..=w.len()).map(|i| w[i..].to_vec()).collect(),
        Instr::PushAny => gamma.iter().map(|g| pushed(g, w)).collect(),
        Instr::PopSym(g) => match w.split_first() {
            Some((top, rest)) if top == g => vec![rest.to_vec()],
            _ => vec![],
        },
        _ => vec![],
    }
}

/// The pushdown storages `PD_Γ`, `PD′_Γ`, `PD″_Γ`, `PD†_Γ` and `(PD†_Γ)′`.
#[derive(Clone, Debug)]
pub struct PushdownStorage {
    gamma: Vec<Sym>,
    flavor: PdFlavor,
}

impl PushdownStorage {
    pub fn new(gamma: Vec<Sym>, flavor: PdFlavor) -> Self {
        PushdownStorage { gamma, flavor }
    }

    pub fn gamma(&self) -> &[Sym] {
        &self.gamma
    }

    pub fn flavor(&self) -> PdFlavor {
        self.flavor
    }
}

impl DataStorage for PushdownStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::Pushdown {
            flavor: self.flavor,
            gamma: self.gamma.clone(),
        }
    }

    fn initial(&self) -> Config {
        Config::Word(vec![])
    }

    fn predicates(&self) -> Vec<Pred> {
        self.flavor.predicates(&self.gamma)
    }

    fn instructions(&self) -> Vec<Instr> {
        self.flavor.instructions(&self.gamma)
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        c.as_word().is_some_and(|w| pd_test(p, w))
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(w) = c.as_word() else { return Ok(vec![]) };
        Ok(pd_apply(&self.gamma, r, w).into_iter().map(Config::Word).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{apply_instruction, syms};

    #[test]
    fn plain_pushdown_laws() {
        let pd = PushdownStorage::new(syms("ab"), PdFlavor::Plain);
        let e = Config::word("");
        assert!(pd.test(&Pred::Bottom, &e));
        assert!(apply_instruction(&pd, &Instr::Pop, &e).unwrap().is_empty());
        assert!(apply_instruction(&pd, &Instr::Replace("a".into()), &e).unwrap().is_empty());
        assert_eq!(
            apply_instruction(&pd, &Instr::Replace("a".into()), &Config::word("bb")).unwrap(),
            vec![Config::word("ab")]
        );
        assert_eq!(
            apply_instruction(&pd, &Instr::Push("b".into()), &Config::word("a")).unwrap(),
            vec![Config::word("ba")]
        );
    }

    #[test]
    fn pop_star_has_one_more_successor_than_length() {
        let ps = PushdownStorage::new(syms("ab"), PdFlavor::PopStar);
        for w in ["", "a", "ab", "abba", "bbbbb"] {
            let n = apply_instruction(&ps, &Instr::PopStar, &Config::word(w)).unwrap().len();
            assert_eq!(n, w.len() + 1);
        }
    }

    #[test]
    fn dagger_pops_only_matching_symbol() {
        let d = PushdownStorage::new(syms("ab"), PdFlavor::Dagger);
        assert!(!d.has_predicate(&Pred::Top("a".into())));
        let pop_a = Instr::PopSym("a".into());
        assert_eq!(apply_instruction(&d, &pop_a, &Config::word("ab")).unwrap(), vec![Config::word("b")]);
        assert!(apply_instruction(&d, &pop_a, &Config::word("ba")).unwrap().is_empty());
        assert!(apply_instruction(&d, &Instr::Pop, &Config::word("ba")).is_err());
        assert_eq!(apply_instruction(&d, &Instr::PushAny, &Config::word("")).unwrap().len(), 2);
    }
}
