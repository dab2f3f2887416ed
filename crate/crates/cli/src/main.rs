//! `cclo`: decide, rank and decompose labeled countable closed linear orders,
//! and evaluate Goedel logics over truth-value sets given as terms.
//!
//! Exit status: 0 for success or a true decision, 1 for a false decision,
//! 2 for any input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cclo::embed::{embed_witness, skeleton_oracle_bounded, ORACLE_BOUND};
use cclo::explore::{enumerate_terms, equivalence_classes, wqo_sample_test, TermPool};
use cclo::goedel::{
    evaluate, falsify, logic_subset_evidence, pin_term, truncate_valuation, Bounds, GoedelSet, Valuation,
};
use cclo::qo::QuasiOrder;
use cclo::syntax::{format_term, parse_formula, parse_qo, parse_term, parse_term_raw, term_to_json};
use cclo::term::{
    cb_derivative, cb_rank, decompose_c_prime, is_unbounded_sum, rk_prime, syntactic_rank, OrderTerm, Rat,
};
use cclo::Error;

#[derive(Parser, Debug)]
#[command(name = "cclo", version, about = "Labeled countable closed linear orders and Goedel logics")]
struct Cli {
    /// Label quasi-order, inline (`qo { elements: [..]; leq: [..] }`) or a file path.
    #[arg(long, global = true)]
    qo: Option<String>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Realization depth for sampled truth values.
    #[arg(long, global = true, default_value_t = 4)]
    depth: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated limits, e.g. `nodes=5,trials=100`.
    #[arg(long, global = true)]
    bounds: Option<String>,
    /// Cross-check decisions against the brute-force oracle.
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a term against the structural rules.
    Validate { term: String },
    /// Syntactic rank, and the unbounded-sum rank when defined.
    Rank { term: String },
    /// Cantor-Bendixson rank.
    Cbrank { term: String },
    /// Cantor-Bendixson derivative.
    Derivative { term: String },
    /// Split a scattered term into unbounded sums.
    Decompose { term: String },
    /// Decide whether A embeds into B.
    Embed {
        a: String,
        b: String,
        /// Treat both as Goedel sets: relabel over {0<1} pinning both ends.
        #[arg(long)]
        pinned: bool,
    },
    /// Value of a closed formula in a model (JSON, inline or path).
    Eval { model: String, formula: String },
    /// Truncate a model at `b`, keeping the formula's value.
    Truncate { model: String, formula: String, b: String },
    /// Look for a valuation into a Goedel set refuting a formula.
    Falsify { formula: String, set: String },
    /// Compare the Goedel logics of two truth-value sets.
    CompareLogics { v1: String, v2: String },
    /// List every term within the bounds.
    Enumerate,
    /// Mutual-embeddability classes of the enumerated terms.
    Classes,
    /// Sample random sequences and look for good pairs.
    WqoTest,
}

struct Fail(Error);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(e)
    }
}

fn input(msg: impl Into<String>) -> Fail {
    Fail(Error::Input(msg.into()))
}

/// Reads a file when `arg` names one, otherwise returns it unchanged.
fn text(arg: &str) -> Result<String, Fail> {
    let p = Path::new(arg);
    if arg.len() < 4096 && p.is_file() {
        return fs::read_to_string(p).map_err(|e| input(format!("{arg}: {e}")));
    }
    Ok(arg.to_string())
}

fn bounds(spec: Option<&str>) -> Result<BTreeMap<String, u64>, Fail> {
    let mut out = BTreeMap::new();
    for kv in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| input(format!("bound `{kv}` is not key=value")))?;
        let v: u64 = v.trim().parse().map_err(|_| input(format!("bound `{kv}` needs an integer")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

struct Ctx {
    q: QuasiOrder,
    json: bool,
    depth: usize,
    seed: Option<u64>,
    bounds: BTreeMap<String, u64>,
    oracle: bool,
}

impl Ctx {
    fn term(&self, arg: &str) -> Result<OrderTerm, Fail> {
        Ok(parse_term(text(arg)?.trim(), &self.q)?)
    }

    fn bound(&self, key: &str, default: u64) -> u64 {
        self.bounds.get(key).copied().unwrap_or(default)
    }

    fn seed(&self) -> Result<u64, Fail> {
        match self.seed {
            Some(s) => Ok(s),
            None if std::env::var_os("CI").is_some() => Err(input("--seed is required when CI is set")),
            None => Ok(0),
        }
    }

    fn pool(&self) -> TermPool {
        let n = self.bound("nodes", 4) as usize;
        let mut pool = TermPool::new(self.q.clone(), n).with_intervals(self.bound("intervals", 0) != 0);
        pool.max_prefix = self.bound("prefix", n as u64) as usize;
        pool.max_cycle = self.bound("cycle", n as u64) as usize;
        pool.seed = self.seed.unwrap_or(0);
        pool
    }

    fn fmt(&self, t: &OrderTerm) -> String {
        format_term(t, &self.q)
    }

    fn emit(&self, human: String, js: Value) {
        if self.json {
            println!("{js}");
        } else {
            println!("{human}");
        }
    }
}

fn model(arg: &str) -> Result<Valuation, Fail> {
    let v: Value = serde_json::from_str(&text(arg)?).map_err(|e| input(format!("model json: {e}")))?;
    Ok(Valuation::from_json(&v)?)
}

fn goedel_set(arg: &str) -> Result<GoedelSet, Fail> {
    // labels carry no meaning on a truth-value set
    Ok(GoedelSet::new(parse_term(text(arg)?.trim(), &QuasiOrder::unlabeled())?)?)
}

fn decision(b: bool) -> ExitCode {
    ExitCode::from(if b { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<ExitCode, Fail> {
    let q = match &cli.qo {
        Some(s) => parse_qo(&text(s)?)?,
        None => QuasiOrder::unlabeled(),
    };
    let cx = Ctx { q, json: cli.json, depth: cli.depth, seed: cli.seed, bounds: bounds(cli.bounds.as_deref())?, oracle: cli.oracle };
    match &cli.cmd {
        Cmd::Validate { term } => {
            let t = parse_term_raw(text(term)?.trim(), &cx.q)?;
            let vs: Vec<String> = t.validate().iter().map(|v| v.to_string()).collect();
            let human = if vs.is_empty() { "valid".to_string() } else { vs.join("\n") };
            cx.emit(human, json!({"valid": vs.is_empty(), "violations": vs}));
            Ok(decision(vs.is_empty()))
        }
        Cmd::Rank { term } => {
            let t = cx.term(term)?;
            let r = syntactic_rank(&t)?;
            let rp = rk_prime(&t, &cx.q).ok();
            let human = match rp {
                Some(p) => format!("rank {r}\nrk' {p}"),
                None => format!("rank {r}"),
            };
            cx.emit(human, json!({"rank": r, "rk_prime": rp}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cbrank { term } => {
            let r = cb_rank(&cx.term(term)?)?;
            cx.emit(r.to_string(), json!({"cb_rank": r}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Derivative { term } => {
            let d = cb_derivative(&cx.term(term)?);
            cx.emit(cx.fmt(&d), term_to_json(&d, &cx.q));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Decompose { term } => {
            let parts = decompose_c_prime(&cx.term(term)?, &cx.q)?;
            let mut unbounded = Vec::new();
            for p in &parts {
                unbounded.push(match p {
                    OrderTerm::Omega(_) => is_unbounded_sum(p, &cx.q)?,
                    _ => true,
                });
            }
            let human = parts.iter().map(|p| cx.fmt(p)).collect::<Vec<_>>().join("\n");
            let js = json!({
                "parts": parts.iter().map(|p| cx.fmt(p)).collect::<Vec<_>>(),
                "unbounded": unbounded,
            });
            cx.emit(human, js);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Embed { a, b, pinned } => {
            let (a, b, q) = if *pinned {
                let g = |s: &str| -> Result<OrderTerm, Fail> { Ok(pin_term(goedel_set(s)?.term())) };
                (g(a)?, g(b)?, QuasiOrder::two_chain())
            } else {
                (cx.term(a)?, cx.term(b)?, cx.q.clone())
            };
            let w = embed_witness(&a, &b, &q)?;
            let yes = w.is_some();
            if cx.oracle {
                let bound = cx.bound("nodes", ORACLE_BOUND as u64) as usize;
                let o = skeleton_oracle_bounded(&a, &b, &q, bound)?;
                if o != yes {
                    return Err(Fail(Error::Structural(format!("oracle disagrees: embed {yes}, oracle {o}"))));
                }
            }
            let js = json!({
                "embeds": yes,
                "source": term_to_json(&a, &q),
                "target": term_to_json(&b, &q),
                "witness": w.as_ref().map(|w| w.entries()),
            });
            cx.emit(yes.to_string(), js);
            Ok(decision(yes))
        }
        Cmd::Eval { model: m, formula } => {
            let v = model(m)?;
            let f = parse_formula(&text(formula)?)?;
            let r = evaluate(&v, &f)?;
            cx.emit(r.to_string(), json!({"value": r.to_string()}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Truncate { model: m, formula, b } => {
            let v = model(m)?;
            let f = parse_formula(&text(formula)?)?;
            let b: Rat = b.trim().parse().map_err(|_| input(format!("bad fraction `{b}`")))?;
            let t = truncate_valuation(&v, &f, &b)?;
            let js = t.to_json();
            cx.emit(serde_json::to_string_pretty(&js).expect("json"), js);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Falsify { formula, set } => {
            let f = parse_formula(&text(formula)?)?;
            let v = goedel_set(set)?;
            let d = Bounds::default();
            let bd = Bounds {
                max_universe: cx.bound("universe", d.max_universe as u64) as usize,
                depth: cx.depth,
                trials: cx.bound("trials", d.trials as u64) as usize,
                exhaustive_cap: cx.bound("exhaustive", d.exhaustive_cap),
                seed: cx.seed()?,
            };
            let found = falsify(&f, &v, &bd)?;
            let js = json!({"falsified": found.is_some(), "valuation": found.as_ref().map(|m| m.to_json())});
            let human = match &found {
                Some(m) => format!(
                    "falsified: value {}\n{}",
                    evaluate(m, &f)?,
                    serde_json::to_string_pretty(&m.to_json()).expect("json")
                ),
                None => "no countermodel within bounds".to_string(),
            };
            cx.emit(human, js);
            Ok(decision(found.is_some()))
        }
        Cmd::CompareLogics { v1, v2 } => {
            let (s1, s2) = (goedel_set(v1)?, goedel_set(v2)?);
            let ev = logic_subset_evidence(&s1, &s2)?;
            let (a, b) = (ev.v2_subset_v1.is_some(), ev.v1_subset_v2.is_some());
            let relation = match (a, b) {
                (true, true) => "equal",
                (true, false) => "G(V2) strictly inside G(V1)",
                (false, true) => "G(V1) strictly inside G(V2)",
                (false, false) => "no containment found",
            };
            let human = format!(
                "V1 -> V2 pinned: {a} (G(V2) inside G(V1))\nV2 -> V1 pinned: {b} (G(V1) inside G(V2))\n{relation}"
            );
            let js = json!({
                "v2_subset_v1": a,
                "v1_subset_v2": b,
                "relation": relation,
                "witnesses": {
                    "v1_into_v2": ev.v2_subset_v1.as_ref().map(|w| w.entries()),
                    "v2_into_v1": ev.v1_subset_v2.as_ref().map(|w| w.entries()),
                },
            });
            cx.emit(human, js);
            Ok(decision(a || b))
        }
        Cmd::Enumerate => {
            let pool = cx.pool();
            let terms = enumerate_terms(&pool);
            let names: Vec<String> = terms.iter().map(|t| cx.fmt(t)).collect();
            cx.emit(names.join("\n"), json!({"bounds": pool.to_json(), "count": terms.len(), "terms": names}));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Classes => {
            let pool = cx.pool();
            let terms = enumerate_terms(&pool);
            let classes = equivalence_classes(&terms, &cx.q);
            let human = classes
                .iter()
                .map(|c| format!("{} ({} members)", cx.fmt(&c.representative), c.members.len()))
                .collect::<Vec<_>>()
                .join("\n");
            let js = json!({
                "bounds": pool.to_json(),
                "counts": {"terms": terms.len(), "classes": classes.len()},
                "classes": classes.iter().map(|c| json!({
                    "representative": cx.fmt(&c.representative),
                    "members": c.members.iter().map(|m| cx.fmt(m)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            });
            cx.emit(human, js);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::WqoTest => {
            let pool = cx.pool();
            let length = cx.bound("length", 40) as usize;
            let trials = cx.bound("trials", 100) as usize;
            let r = wqo_sample_test(&pool, length, trials, cx.seed()?)?;
            let human = format!(
                "{} of {} sequences good (pool {}, length {}, {} classes drawn)",
                r.good,
                r.trials,
                r.pool_size,
                r.length,
                r.classes.len()
            );
            cx.emit(human, r.to_json());
            Ok(decision(r.good == r.trials))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Fail(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
