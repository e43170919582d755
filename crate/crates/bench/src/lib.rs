//! Inputs shared by the benchmarks.

use storax::{bundled, LoadedAutomaton, Sym, Tropical, WeightedAutomaton};

pub fn tropical(name: &str) -> WeightedAutomaton<Tropical> {
    match bundled::load(name).expect("bundled example") {
        LoadedAutomaton::Tropical(m) => m,
        _ => panic!("{name} is not tropical"),
    }
}

/// `a^n b^n …` with one block per letter of `letters`.
pub fn blocks(letters: &str, n: usize) -> Vec<Sym> {
    letters.chars().flat_map(|c| std::iter::repeat_n(Sym::from(c.to_string()), n)).collect()
}

/// `u # v` over the pd-viterbi alphabet with `|u| = n`.
pub fn viterbi_word(n: usize) -> Vec<Sym> {
    let mut w = vec![Sym::from("a"); n];
    w.push("#".into());
    w.extend(std::iter::repeat_n(Sym::from("a"), n));
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use storax::automaton::accepts;

    #[test]
    fn inputs_are_accepted() {
        let tss = bundled::load("tss-anbncn").unwrap();
        assert!(accepts(tss.base(), &blocks("abc", 3)).unwrap());
        assert!(accepts(&tropical("count-anbn").base, &blocks("ab", 4)).unwrap());
        assert_eq!(viterbi_word(2).len(), 5);
    }
}
