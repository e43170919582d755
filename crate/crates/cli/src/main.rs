mod strategy;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use storax::approx::{approximate_automaton, approximate_weighted};
use storax::automaton::{recognizes, runs_on, weight_of_word, RunSet};
use storax::format::{automaton_to_json, load_automaton, parse_automaton, weighted_to_json};
use storax::parse::{best_run_weight, coarse_to_fine_nbest, enumerate_runs_best_first, LoopCondition};
use storax::storage::render_word;
use storax::transform::{determinize_bounded, determinize_powerset, predicate_free, to_fsa};
use storax::{bundled, Automaton, Boolean, Error, LoadedAutomaton, Result, Run, RunBudget, SearchLimits, Semiring, Sym, WeightedAutomaton};

#[derive(Parser)]
#[command(name = "storax", version, about = "Weighted automata with data storage")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for sampled checks
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Words are whitespace-separated symbols instead of single characters
    #[arg(long, global = true)]
    tokens: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    /// Fold predicates into instructions
    Pf,
    DetPowerset,
    /// Needs --bound
    DetBounded,
    /// Needs finitely many reachable configurations (see --cap)
    ToFsa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Loop {
    /// Stop once |X| ≥ n and the worst kept run beats the coarse frontier
    Printed,
    /// Compare the n-th best kept run instead of the worst
    Nth,
}

#[derive(Subcommand)]
enum Command {
    /// Check a file and print a summary (or the canonical form with --format json)
    Validate { file: String },
    /// Membership test; exit 0 ACCEPT, 1 REJECT, 2 search budget exhausted
    Recognize {
        file: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Sum of run weights of a word
    Weight {
        file: String,
        #[arg(long)]
        word: String,
    },
    /// List the runs on a word
    Runs {
        file: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Normal forms and determinization; writes an automaton file
    Transform {
        op: Transform,
        file: String,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Approximate the storage; writes an automaton file
    Approx {
        file: String,
        #[arg(long)]
        strategy: String,
        /// Further strategies applied to the previous target
        #[arg(long)]
        then: Vec<String>,
        /// Compare membership on this many sampled words (see --seed)
        #[arg(long)]
        check: Option<usize>,
        #[arg(long, default_value_t = 8)]
        check_len: usize,
    },
    /// Coarse-to-fine n-best runs; exit 0 with results, 1 for none, 2 if a limit was hit
    Nbest {
        file: String,
        #[arg(long)]
        word: String,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        then: Vec<String>,
        #[arg(long)]
        max_expansions: Option<usize>,
        #[arg(long)]
        max_run_length: Option<usize>,
        /// Print the configuration trace of every run
        #[arg(long)]
        trace: bool,
        #[arg(long = "loop", value_enum, default_value = "printed")]
        loop_condition: Loop,
    },
    /// List the bundled automata, or print one
    Examples { name: Option<String> },
}

/// Files on disk win; otherwise `examples/<name>.json` and bare names
/// resolve to the bundled copies.
fn load(file: &str) -> Result<LoadedAutomaton> {
    if !Path::new(file).exists() {
        if let Some(text) = bundled::source(file) {
            return parse_automaton(text);
        }
    }
    load_automaton(file)
}

fn word(m: &Automaton, s: &str, tokens: bool) -> Result<Vec<Sym>> {
    let w: Vec<Sym> = if tokens {
        s.split_whitespace().map(Sym::from).collect()
    } else {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| Sym::from(c.to_string())).collect()
    };
    if let Some(a) = w.iter().find(|a| !m.alphabet.contains(a)) {
        let hint = if !tokens && m.alphabet.iter().any(|b| b.as_str().chars().count() > 1) {
            " (multi-character symbols need --tokens)"
        } else {
            ""
        };
        return Err(Error::InvalidParameter(format!("`{a}` is not in the alphabet{hint}")));
    }
    Ok(w)
}

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn print_json(v: &Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run_json(m: &Automaton, w: &[Sym], r: &Run) -> Value {
    json!({
        "transitions": m.ids(&r.transitions),
        "trace": r.trace.iter().map(|c| c.render(m, w)).collect::<Vec<_>>(),
    })
}

fn print_trace(m: &Automaton, w: &[Sym], r: &Run) {
    for c in &r.trace {
        out!("    {}", c.render(m, w));
    }
}

/// Unweighted files are read over the Boolean semiring.
macro_rules! weighted {
    ($loaded:expr, $wm:ident => $body:expr) => {
        match $loaded {
            LoadedAutomaton::Unweighted(m) => {
                let $wm = WeightedAutomaton::uniform(m, Boolean);
                $body
            }
            LoadedAutomaton::Boolean($wm) => $body,
            LoadedAutomaton::Tropical($wm) => $body,
            LoadedAutomaton::Counting($wm) => $body,
        }
    };
}

/// An automaton file for `base`, with transition `i` weighted like
/// transition `origin(i)` of the input.
fn emit(loaded: &LoadedAutomaton, base: Automaton, origin: impl Fn(usize) -> usize) -> Value {
    fn carry<S: Semiring>(wm: &WeightedAutomaton<S>, base: Automaton, origin: impl Fn(usize) -> usize) -> Value {
        let ws = (0..base.transitions.len()).map(|i| wm.weight(origin(i))).collect();
        weighted_to_json(&WeightedAutomaton::with_weights(base, wm.semiring.clone(), ws))
    }
    match loaded {
        LoadedAutomaton::Unweighted(_) => automaton_to_json(&base),
        LoadedAutomaton::Boolean(wm) => carry(wm, base, origin),
        LoadedAutomaton::Tropical(wm) => carry(wm, base, origin),
        LoadedAutomaton::Counting(wm) => carry(wm, base, origin),
    }
}

fn validate(file: &str, format: Format) -> ExitCode {
    match load(file) {
        Ok(m) => {
            if format == Format::Json {
                print_json(&m.to_json());
            } else {
                let b = m.base();
                let sr = m.semiring().map_or("unweighted".to_string(), |s| format!("{s:?}").to_lowercase());
                out!(
                    "valid: {} states, {} transitions, storage {}, {sr}",
                    b.states.len(),
                    b.transitions.len(),
                    b.storage.spec().kind_name()
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("invalid: {e}");
            ExitCode::from(1)
        }
    }
}

fn recognize(cli: &Cli, file: &str, w: &str, max_steps: Option<usize>) -> Result<u8> {
    let loaded = load(file)?;
    let m = loaded.base();
    let w = word(m, w, cli.tokens)?;
    let mut budget = RunBudget::for_word(w.len());
    if let Some(s) = max_steps {
        budget.max_steps = s;
    }
    let r = recognizes(m, &w, budget)?;
    let verdict = match (r.accepted, r.truncated) {
        (true, _) => "ACCEPT",
        (false, false) => "REJECT",
        (false, true) => "UNKNOWN",
    };
    if cli.format == Format::Json {
        print_json(&json!({
            "verdict": verdict,
            "witness": r.witness.as_ref().map(|run| run_json(m, &w, run)),
        }));
    } else {
        out!("{verdict}");
        if let Some(run) = &r.witness {
            out!("  {}", m.ids(&run.transitions).join(" "));
            print_trace(m, &w, run);
        }
        if verdict == "UNKNOWN" {
            eprintln!("search budget exhausted; raise --max-steps");
        }
    }
    Ok(match verdict {
        "ACCEPT" => 0,
        "REJECT" => 1,
        _ => 2,
    })
}

fn weight(cli: &Cli, file: &str, w: &str) -> Result<u8> {
    let loaded = load(file)?;
    weighted!(loaded, wm => {
        let w = word(&wm.base, w, cli.tokens)?;
        // the best run decides selective semirings, also with infinitely many runs
        let (value, exact) = match wm.semiring.is_selective() {
            true => match best_run_weight(&wm, &w, SearchLimits::for_word(w.len()))? {
                Some(v) => (v, true),
                None => (wm.semiring.zero(), false),
            },
            false => {
                let r = weight_of_word(&wm, &w, RunBudget::for_word(w.len()))?;
                (r.value, r.exact)
            }
        };
        if cli.format == Format::Json {
            print_json(&json!({
                "semiring": wm.semiring.name(),
                "weight": wm.semiring.value_to_json(&value),
                "exact": exact,
            }));
        } else {
            out!("{value}");
            if !exact {
                eprintln!("search limits reached; the value covers only the runs found");
            }
        }
        Ok(if exact { 0 } else { 2 })
    })
}

/// Up to `limit + 1` runs, best first when the weights are monotone and
/// comparable; otherwise by transition sequence.
fn list_runs<S: Semiring>(wm: &WeightedAutomaton<S>, w: &[Sym], limit: usize) -> Result<RunSet> {
    let mut stream = enumerate_runs_best_first(wm, w, SearchLimits::for_word(w.len()));
    let mut runs = Vec::new();
    for r in stream.by_ref().take(limit + 1) {
        match r {
            Ok(r) => runs.push(r.run),
            Err(Error::NonMonotoneWeight { .. } | Error::Incomparable(..)) => {
                return runs_on(&wm.base, w, RunBudget::for_word(w.len()));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunSet {
        truncated: runs.len() <= limit && stream.truncated(),
        runs,
    })
}

fn runs(cli: &Cli, file: &str, w: &str, limit: usize) -> Result<u8> {
    let loaded = load(file)?;
    weighted!(loaded, wm => {
        let m = &wm.base;
        let w = word(m, w, cli.tokens)?;
        let set = list_runs(&wm, &w, limit)?;
        let shown = &set.runs[..set.runs.len().min(limit)];
        if cli.format == Format::Json {
            let rs: Vec<Value> = shown
                .iter()
                .map(|r| {
                    let mut v = run_json(m, &w, r);
                    v["weight"] = wm.semiring.value_to_json(&wm.run_weight(&r.transitions));
                    v
                })
                .collect();
            print_json(&json!({"runs": rs, "total": set.runs.len(), "truncated": set.truncated}));
        } else {
            for r in shown {
                out!("{}\t{}", wm.run_weight(&r.transitions), m.ids(&r.transitions).join(" "));
            }
            if set.runs.len() > shown.len() {
                eprintln!("{} more runs not shown", set.runs.len() - shown.len());
            }
            if set.truncated {
                eprintln!("run search truncated");
            }
        }
        Ok(if set.truncated { 2 } else if set.runs.is_empty() { 1 } else { 0 })
    })
}

fn transform(file: &str, op: Transform, bound: Option<usize>, cap: usize) -> Result<u8> {
    let loaded = load(file)?;
    let m = loaded.base();
    let out = match op {
        Transform::Pf => emit(&loaded, predicate_free(m), |i| i),
        Transform::DetPowerset => emit(&loaded, determinize_powerset(m), |i| i),
        Transform::DetBounded => {
            let k = bound.ok_or_else(|| Error::InvalidParameter("det-bounded needs --bound".into()))?;
            emit(&loaded, determinize_bounded(m, k)?, |i| i / k)
        }
        Transform::ToFsa => {
            if loaded.semiring().is_some() {
                eprintln!("note: weights are dropped by to-fsa");
            }
            automaton_to_json(&to_fsa(m, cap)?.to_automaton())
        }
    };
    print_json(&out);
    Ok(0)
}

fn approx(cli: &Cli, file: &str, first: &str, rest: &[String], check: Option<usize>, check_len: usize) -> Result<u8> {
    let loaded = load(file)?;
    let m = loaded.base();
    let a = strategy::chain(&m.storage.spec(), first, rest)?;
    let coarse = approximate_automaton(m, &a)?;
    let out = weighted!(loaded.clone(), wm => {
        if loaded.semiring().is_some() {
            weighted_to_json(&approximate_weighted(&wm, &a)?.automaton)
        } else {
            automaton_to_json(&coarse.automaton)
        }
    });
    print_json(&out);
    let Some(samples) = check else { return Ok(0) };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let (mut violations, mut unknown) = (0, 0);
    for _ in 0..samples {
        let len = rng.gen_range(0..=check_len);
        let w: Vec<Sym> = (0..len).map(|_| m.alphabet[rng.gen_range(0..m.alphabet.len())].clone()).collect();
        let budget = RunBudget::for_word(w.len());
        let (fine, rough) = (recognizes(m, &w, budget)?, recognizes(&coarse.automaton, &w, budget)?);
        if (!fine.accepted && fine.truncated) || (!rough.accepted && rough.truncated) {
            unknown += 1;
            continue;
        }
        let lost = a.is_total() && fine.accepted && !rough.accepted;
        let gained = a.is_injective() && rough.accepted && !fine.accepted;
        if lost || gained {
            violations += 1;
            eprintln!("violation on {}: source {}, approximation {}", render_word(&w), fine.accepted, rough.accepted);
        }
    }
    eprintln!(
        "{}: total {}, injective {}; {samples} sampled words, {violations} violations, {unknown} undecided",
        a.name(),
        a.is_total(),
        a.is_injective()
    );
    Ok(if violations > 0 { 1 } else { 0 })
}

#[allow(clippy::too_many_arguments)]
fn nbest(
    cli: &Cli,
    file: &str,
    w: &str,
    n: usize,
    first: &str,
    rest: &[String],
    max_expansions: Option<usize>,
    max_run_length: Option<usize>,
    trace: bool,
    cond: Loop,
) -> Result<u8> {
    let loaded = load(file)?;
    weighted!(loaded, wm => {
        let m = &wm.base;
        let w = word(m, w, cli.tokens)?;
        let a = strategy::chain(&m.storage.spec(), first, rest)?;
        let mut limits = SearchLimits::for_word(w.len());
        if let Some(x) = max_expansions {
            limits.max_expansions = x;
        }
        if let Some(x) = max_run_length {
            limits.max_run_length = x;
        }
        let cond = match cond {
            Loop::Printed => LoopCondition::AsPrinted,
            Loop::Nth => LoopCondition::NthBest,
        };
        let res = coarse_to_fine_nbest(&wm, &a, n, &w, limits, cond)?;
        if cli.format == Format::Json {
            let rs: Vec<Value> = res
                .runs
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut v = run_json(m, &w, &r.run);
                    v["rank"] = json!(i + 1);
                    v["weight"] = wm.semiring.value_to_json(&r.weight);
                    if !trace {
                        v.as_object_mut().unwrap().remove("trace");
                    }
                    v
                })
                .collect();
            print_json(&json!({
                "runs": rs,
                "certified": res.certified,
                "coarse_runs": res.coarse_runs.len(),
                "candidates": res.candidates,
                "zero_weight_cycle": res.zero_weight_cycle,
            }));
        } else {
            for (i, r) in res.runs.iter().enumerate() {
                out!("{}\t{}\t{}", i + 1, r.weight, m.ids(&r.run.transitions).join(" "));
                if trace {
                    print_trace(m, &w, &r.run);
                }
            }
            if !res.certified {
                eprintln!("search limits reached; results may be incomplete");
            }
            if res.zero_weight_cycle {
                eprintln!("the coarse automaton has a cycle of neutral weight");
            }
        }
        Ok(if !res.certified { 2 } else if res.runs.is_empty() { 1 } else { 0 })
    })
}

fn examples(cli: &Cli, name: Option<&str>) -> Result<u8> {
    if let Some(name) = name {
        let text = bundled::source(name).ok_or_else(|| Error::Format(format!("no bundled example `{name}`")))?;
        let _ = std::io::Write::write_all(&mut std::io::stdout(), text.as_bytes());
        return Ok(0);
    }
    let mut rows = Vec::new();
    for (name, _) in bundled::EXAMPLES {
        let m = bundled::load(name)?;
        let sr = m.semiring().map(|s| format!("{s:?}").to_lowercase());
        rows.push((name, m.base().storage.spec().kind_name(), m.base().transitions.len(), sr));
    }
    if cli.format == Format::Json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(n, k, t, s)| json!({"name": n, "storage": k, "transitions": t, "semiring": s}))
            .collect();
        print_json(&json!(v));
    } else {
        for (n, k, t, s) in rows {
            out!("{n:<22}{k:<22}{t:>2} transitions  {}", s.unwrap_or_else(|| "unweighted".into()));
        }
    }
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Validate { .. } => unreachable!(),
        Command::Recognize { file, word, max_steps } => recognize(cli, file, word, *max_steps),
        Command::Weight { file, word } => weight(cli, file, word),
        Command::Runs { file, word, limit } => runs(cli, file, word, *limit),
        Command::Transform { op, file, bound, cap } => transform(file, *op, *bound, *cap),
        Command::Approx {
            file,
            strategy,
            then,
            check,
            check_len,
        } => approx(cli, file, strategy, then, *check, *check_len),
        Command::Nbest {
            file,
            word,
            n,
            strategy,
            then,
            max_expansions,
            max_run_length,
            trace,
            loop_condition,
        } => nbest(cli, file, word, *n, strategy, then, *max_expansions, *max_run_length, *trace, *loop_condition),
        Command::Examples { name } => examples(cli, name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    if let Command::Validate { file } = &cli.command {
        return validate(file, cli.format);
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
