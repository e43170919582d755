use std::path::Path;

use storax::approx::parse_merge_map;
use storax::{Error, Result, StorageSpec, Strategy, StrategySpec};

fn merge_file(path: &str) -> Result<std::collections::BTreeMap<storax::Sym, storax::Sym>> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| Error::Io {
        path: path.into(),
        message: e.to_string(),
    })?;
    parse_merge_map(&text)
}

fn number(what: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("{what}: `{s}` is not a number")))
}

/// `top | top-k:k | uniq | merge:file | bd-k:k | incomp-k:file,k | eo | count | cf | id`
pub fn parse_spec(s: &str) -> Result<StrategySpec> {
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    let need = |a: Option<&'_ str>| -> Result<String> {
        a.map(str::to_string)
            .ok_or_else(|| Error::InvalidParameter(format!("strategy `{head}` needs an argument")))
    };
    Ok(match (head, arg) {
        ("id", None) => StrategySpec::Identity,
        ("top", None) => StrategySpec::Top,
        ("uniq", None) => StrategySpec::Uniq,
        ("eo", None) => StrategySpec::EvenOdd,
        ("count", None) => StrategySpec::Count,
        ("cf", None) => StrategySpec::Cf,
        ("top-k", a) => StrategySpec::TopK(number("top-k", &need(a)?)?),
        ("bd-k", a) => StrategySpec::BoundedK(number("bd-k", &need(a)?)?),
        ("merge", a) => StrategySpec::Merge(merge_file(&need(a)?)?),
        ("incomp-k", a) => {
            let arg = need(a)?;
            let (file, k) = arg
                .rsplit_once(',')
                .ok_or_else(|| Error::InvalidParameter("incomp-k expects `file,k`".into()))?;
            StrategySpec::IncompK(merge_file(file)?, number("incomp-k", k)?)
        }
        _ => return Err(Error::InvalidParameter(format!("unknown strategy `{s}`"))),
    })
}

/// Instantiates `first` on `source` and each of `rest` on the previous
/// target, composing left to right.
pub fn chain(source: &StorageSpec, first: &str, rest: &[String]) -> Result<Strategy> {
    let mut a = Strategy::instantiate(&parse_spec(first)?, source)?;
    for s in rest {
        let next = Strategy::instantiate(&parse_spec(s)?, a.target())?;
        a = a.then(&next)?;
    }
    Ok(a)
}
