//! Example automata shipped with the crate.

use crate::error::{Error, Result};
use crate::format::{parse_automaton, LoadedAutomaton};

/// `(name, file contents)` in listing order.
pub const EXAMPLES: [(&str, &str); 5] = [
    ("count-anbn", include_str!("../data/count-anbn.json")),
    ("pd2-equal-length", include_str!("../data/pd2-equal-length.json")),
    ("pd-dagger-palindrome", include_str!("../data/pd-dagger-palindrome.json")),
    ("tss-anbncn", include_str!("../data/tss-anbncn.json")),
    ("pd-viterbi", include_str!("../data/pd-viterbi.json")),
];

/// The file text of a bundled example. Accepts `name`, `name.json` and
/// `examples/name.json`.
pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_prefix("examples/").unwrap_or(name);
    let name = name.strip_suffix(".json").unwrap_or(name);
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn load(name: &str) -> Result<LoadedAutomaton> {
    let text = source(name).ok_or_else(|| Error::Format(format!("no bundled example `{name}`")))?;
    parse_automaton(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_loads() {
        for (name, _) in EXAMPLES {
            let m = load(name).unwrap();
            assert!(m.base().validate().is_empty(), "{name}");
        }
        assert_eq!(load("examples/tss-anbncn.json").unwrap().base().transitions.len(), 7);
        assert!(source("nope").is_none());
    }
}
