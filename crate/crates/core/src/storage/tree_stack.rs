use super::{Config, DataStorage, Instr, Pred, StorageSpec, Sym, TreeStack};
use crate::error::Result;

/// Child indices `1..=max_arity` are registered for `up_n` and `push_{n,γ}`.
pub const DEFAULT_MAX_ARITY: u32 = 8;

/// The tree-stack storage `TSS_Γ`.
#[derive(Clone, Debug)]
pub struct TreeStackStorage {
    gamma: Vec<Sym>,
    max_arity: u32,
}

impl TreeStackStorage {
    pub fn new(gamma: Vec<Sym>, max_arity: u32) -> Self {
        TreeStackStorage { gamma, max_arity }
    }

    pub fn gamma(&self) -> &[Sym] {
        &self.gamma
    }
}

impl DataStorage for TreeStackStorage {
    fn spec(&self) -> StorageSpec {
        StorageSpec::TreeStack {
            gamma: self.gamma.clone(),
            max_arity: self.max_arity,
        }
    }

    fn initial(&self) -> Config {
        Config::Tree(TreeStack::new())
    }

    fn predicates(&self) -> Vec<Pred> {
        let mut ps = vec![Pred::All, Pred::Bottom];
        ps.extend(self.gamma.iter().cloned().map(Pred::Equals));
        ps
    }

    fn instructions(&self) -> Vec<Instr> {
        let mut rs = vec![Instr::Down];
        for n in 1..=self.max_arity {
            rs.push(Instr::Up(n));
            rs.extend(self.gamma.iter().map(|g| Instr::TreePush(n, g.clone())));
        }
        rs
    }

    fn has_instruction(&self, r: &Instr) -> bool {
        let arity_ok = |n: &u32| (1..=self.max_arity).contains(n);
        match r {
            Instr::Down => true,
            Instr::Up(n) => arity_ok(n),
            Instr::TreePush(n, g) => arity_ok(n) && self.gamma.contains(g),
            Instr::Restrict(r, p) => self.has_instruction(r) && self.has_predicate(p),
            _ => false,
        }
    }

    fn test(&self, p: &Pred, c: &Config) -> bool {
        let Some(t) = c.as_tree() else { return false };
        match p {
            Pred::All => true,
            Pred::Bottom => t.at_bottom(),
            Pred::Equals(g) => t.current() == Some(g),
            _ => false,
        }
    }

    fn successors(&self, r: &Instr, c: &Config) -> Result<Vec<Config>> {
        let Some(t) = c.as_tree() else { return Ok(vec![]) };
        let next = match r {
            Instr::Down => t.down(),
            Instr::Up(n) => t.up(*n),
            Instr::TreePush(n, g) => t.push(*n, g.clone()),
            _ => None,
        };
        Ok(next.map(Config::Tree).into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{apply_instruction, syms};
    use proptest::prelude::*;

    fn storage() -> TreeStackStorage {
        TreeStackStorage::new(syms("*#"), 3)
    }

    /// Replays a random instruction script, skipping inapplicable steps.
    fn reachable(script: &[(u8, u32, bool)]) -> Config {
        let s = storage();
        let mut c = s.initial();
        for &(op, n, star) in script {
            let label = if star { "*" } else { "#" };
            let r = match op % 3 {
                0 => Instr::Down,
                1 => Instr::Up(n),
                _ => Instr::TreePush(n, label.into()),
            };
            if let Some(next) = apply_instruction(&s, &r, &c).unwrap().pop() {
                c = next;
            }
        }
        c
    }

    proptest! {
        #[test]
        fn push_then_down_returns_to_extended_tree(
            script in proptest::collection::vec((0u8..3, 1u32..=3, any::<bool>()), 0..20),
            n in 1u32..=3,
        ) {
            let s = storage();
            let c = reachable(&script);
            let t = c.as_tree().unwrap().clone();
            let pushed = apply_instruction(&s, &Instr::TreePush(n, "#".into()), &c).unwrap();
            if let Some(after) = pushed.first() {
                let back = apply_instruction(&s, &Instr::Down, after).unwrap();
                let mut nodes = t.nodes().clone();
                let mut addr = t.pointer().to_vec();
                addr.push(n);
                nodes.insert(addr, "#".into());
                let expected = TreeStack::from_parts(nodes, t.pointer().to_vec()).unwrap();
                prop_assert_eq!(back, vec![Config::Tree(expected)]);
            } else {
                prop_assert!(t.up(n).is_some());
            }
        }

        #[test]
        fn tree_stack_is_deterministic(script in proptest::collection::vec((0u8..3, 1u32..=3, any::<bool>()), 0..20)) {
            let s = storage();
            let c = reachable(&script);
            for r in s.instructions() {
                prop_assert!(apply_instruction(&s, &r, &c).unwrap().len() <= 1);
            }
        }
    }

    #[test]
    fn pointer_moves() {
        let s = storage();
        let c = s.initial();
        assert!(apply_instruction(&s, &Instr::Down, &c).unwrap().is_empty());
        assert!(apply_instruction(&s, &Instr::Up(1), &c).unwrap().is_empty());
        let c1 = apply_instruction(&s, &Instr::TreePush(1, "*".into()), &c).unwrap().remove(0);
        assert!(s.test(&Pred::Equals("*".into()), &c1));
        assert!(!s.test(&Pred::Bottom, &c1));
        assert!(!s.has_instruction(&Instr::Up(4)));
        assert!(!s.has_instruction(&Instr::Up(0)));
    }
}
