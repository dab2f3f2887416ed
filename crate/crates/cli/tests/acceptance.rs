//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cclo::embed::{check_witness_depths, embed, embed_witness, skeleton_oracle_bounded};
use cclo::explore::{enumerate_terms, wqo_sample_test, TermPool};
use cclo::goedel::{
    connective, cut_off, evaluate, evaluate_with, imp, induced_valuation, logic_subset_evidence, pinned_labeled,
    realized_map, subformula_values, truncate_valuation, Arg, Connective, Formula, GoedelSet, Valuation,
};
use cclo::qo::{Label, QuasiOrder};
use cclo::syntax::{format_term, parse_term};
use cclo::term::{cb_rank, cb_rank_iterated, decompose_c_prime, is_unbounded_sum, reassemble, OrderTerm, Rat};

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn unit_rat(rng: &mut impl Rng) -> Rat {
    let d = rng.gen_range(1..=24);
    rat(rng.gen_range(0..=d), d)
}

/// Pairs whose witness must be checked under criterion 10.
#[derive(Default)]
struct Positives {
    checked: usize,
    rejected: Vec<String>,
}

impl Positives {
    fn check(&mut self, a: &OrderTerm, b: &OrderTerm, q: &QuasiOrder) {
        let w = match embed_witness(a, b, q) {
            Ok(Some(w)) => w,
            other => {
                self.rejected.push(format!("{}: no witness ({other:?})", format_term(a, q)));
                return;
            }
        };
        self.checked += 1;
        let r = check_witness_depths(a, b, &w, q, &[3, 5]);
        if !matches!(r, Ok(true)) {
            self.rejected.push(format!("{} -> {}: {r:?}", format_term(a, q), format_term(b, q)));
        }
    }
}

fn c1_connectives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let (x, a, b) = (unit_rat(&mut rng), unit_rat(&mut rng), unit_rat(&mut rng));
        let lhs = connective(Connective::And, &x, Some(&a)).unwrap() <= b;
        let rhs = x <= imp(&a, &b);
        if lhs != rhs {
            return Err(format!("residuation fails at x={x}, a={a}, b={b}"));
        }
    }
    let grid: Vec<Rat> = (0..20).map(|i| rat(i, 19)).collect();
    for a in &grid {
        for b in &grid {
            let want = if a <= b { Rat::one() } else { b.clone() };
            if connective(Connective::Imp, a, Some(b)).unwrap() != want {
                return Err(format!("imp({a},{b})"));
            }
        }
        let neg = if a.is_zero() { Rat::one() } else { Rat::zero() };
        if connective(Connective::Neg, a, None).unwrap() != neg {
            return Err(format!("neg({a})"));
        }
    }
    Ok("500 residuation triples, 400 grid pairs".into())
}

/// Predicates `P/1`, `Q/2`, `R/0`.
const SIG: [(&str, usize); 3] = [("P", 1), ("Q", 2), ("R", 0)];

fn random_formula(rng: &mut impl Rng, depth: usize, scope: &mut Vec<String>, consts: &[String]) -> Formula {
    if depth == 0 || rng.gen_bool(0.1) {
        if rng.gen_bool(0.08) {
            return Formula::Bot;
        }
        let (p, k) = SIG[rng.gen_range(0..SIG.len())];
        let args = (0..k)
            .map(|_| {
                if !scope.is_empty() && rng.gen_bool(0.7) {
                    Arg::Var(scope[rng.gen_range(0..scope.len())].clone())
                } else {
                    Arg::Const(consts[rng.gen_range(0..consts.len())].clone())
                }
            })
            .collect();
        return Formula::Atom(p.into(), args);
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::and(random_formula(rng, d, scope, consts), random_formula(rng, d, scope, consts)),
        1 => Formula::or(random_formula(rng, d, scope, consts), random_formula(rng, d, scope, consts)),
        2 => Formula::imp(random_formula(rng, d, scope, consts), random_formula(rng, d, scope, consts)),
        3 => Formula::neg(random_formula(rng, d, scope, consts)),
        k => {
            let x = format!("x{}", scope.len());
            scope.push(x.clone());
            let body = random_formula(rng, d, scope, consts);
            scope.pop();
            if k == 4 {
                Formula::forall(&x, body)
            } else {
                Formula::exists(&x, body)
            }
        }
    }
}

fn random_valuation(rng: &mut impl Rng, n: usize, values: &[Rat]) -> Valuation {
    let universe: Vec<String> = (1..=n).map(|i| format!("m{i}")).collect();
    let mut v = Valuation::new(universe.clone()).unwrap();
    for (p, k) in SIG {
        let mut args = vec![0; k];
        loop {
            let names: Vec<&str> = args.iter().map(|&i| universe[i].as_str()).collect();
            v.set(p, &names, values.choose(rng).unwrap().clone()).unwrap();
            // odometer over M^k
            let mut i = 0;
            while i < k && args[i] == n - 1 {
                args[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            args[i] += 1;
        }
    }
    v
}

fn assignments(universe: &[String], vars: &[String]) -> Vec<HashMap<String, String>> {
    let mut out = vec![HashMap::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                universe.iter().map(move |m| {
                    let mut e = env.clone();
                    e.insert(x.clone(), m.clone());
                    e
                })
            })
            .collect();
    }
    out
}

fn c2_truncation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut done, mut checks, mut tries) = (0, 0usize, 0);
    while done < 200 {
        tries += 1;
        if tries > 100_000 {
            return Err(format!("only {done} instances met the preconditions"));
        }
        let n = rng.gen_range(1..=4);
        let values: Vec<Rat> = (0..5).map(|_| unit_rat(&mut rng)).collect();
        let v = random_valuation(&mut rng, n, &values);
        let depth = rng.gen_range(2..=5);
        let f = random_formula(&mut rng, depth, &mut Vec::new(), &v.universe);
        let val = evaluate(&v, &f).unwrap();
        let subs = subformula_values(&v, &f).unwrap();
        let b = {
            let t = Rat::from_integer(rng.gen_range(1..10).into());
            &val + (Rat::one() - &val) * t / Rat::from_integer(10.into())
        };
        if val >= Rat::one() || subs.contains(&b) {
            continue;
        }
        let t = truncate_valuation(&v, &f, &b).map_err(|e| format!("{e} for {f}"))?;
        for g in f.subformulas() {
            for env in assignments(&v.universe, &g.free_vars()) {
                let before = evaluate_with(&v, g, &env).unwrap();
                let after = evaluate_with(&t, g, &env).unwrap();
                if after != cut_off(&before, &b) {
                    return Err(format!("{g} under {env:?}: {after} vs h_b({before}) with b = {b}"));
                }
                checks += 1;
            }
        }
        done += 1;
    }
    Ok(format!("200 instances, {checks} subformula values compared exactly"))
}

fn gs(s: &str) -> GoedelSet {
    GoedelSet::new(parse_term(s, &QuasiOrder::unlabeled()).unwrap()).unwrap()
}

const V_UP: &str = "w([|pt];p;_)";
const V_DOWN: &str = "w(_;p;[|pt])";
const V_OMEGA2: &str = "w([|w([|pt];p;_)];p;_)";

fn c3_induced(pos: &mut Positives) -> Outcome {
    let pairs = [
        ("(pt + pt)", V_UP),
        (V_UP, V_OMEGA2),
        ("(pt + pt + pt)", V_DOWN),
        (V_DOWN, "int"),
        (V_UP, "(pt + int)"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let depth = 4;
    for (s1, s2) in pairs {
        let (v1, v2) = (gs(s1), gs(s2));
        let ev = logic_subset_evidence(&v1, &v2).map_err(|e| e.to_string())?;
        let w = ev.v2_subset_v1.ok_or_else(|| format!("{s1} does not embed pinned into {s2}"))?;
        let h = realized_map(&v1, &v2, &w, depth).map_err(|e| e.to_string())?;
        let values = v1.sample(depth);
        for _ in 0..100 {
            let n = rng.gen_range(1..=3);
            let m1 = random_valuation(&mut rng, n, &values);
            let fd = rng.gen_range(1..=5);
            let f = random_formula(&mut rng, fd, &mut Vec::new(), &m1.universe);
            let m2 = induced_valuation(&m1, &h).map_err(|e| e.to_string())?;
            let (a, b) = (evaluate(&m1, &f).unwrap(), evaluate(&m2, &f).unwrap());
            if h.get(&a) != Some(&b) {
                return Err(format!("{s1} -> {s2}: {f} gives {a} and {b}"));
            }
        }
        let q = QuasiOrder::two_chain();
        pos.check(&pinned_labeled(&v1), &pinned_labeled(&v2), &q);
    }
    Ok("5 pinned embeddings, 500 formulas".into())
}

fn sweep(q: &QuasiOrder, nodes: usize, pos: &mut Positives) -> Result<(usize, usize), String> {
    let terms = enumerate_terms(&TermPool::new(q.clone(), nodes));
    let mut bad = Vec::new();
    for a in &terms {
        for b in &terms {
            let e = embed(a, b, q).unwrap();
            let o = skeleton_oracle_bounded(a, b, q, 2 * nodes).unwrap();
            if e != o {
                bad.push(format!("{} -> {}: embed {e}, oracle {o}", format_term(a, q), format_term(b, q)));
            }
            if e {
                pos.check(a, b, q);
            }
        }
    }
    match bad.first() {
        None => Ok((terms.len(), terms.len().pow(2))),
        Some(b) => Err(format!("{} disagreements, first {b}", bad.len())),
    }
}

fn c4_oracle(pos: &mut Positives) -> Outcome {
    let (n1, p1) = sweep(&QuasiOrder::unlabeled(), 6, pos)?;
    let (n2, p2) = sweep(&QuasiOrder::two_chain(), 5, pos)?;
    Ok(format!("unlabeled <=6 nodes: {n1} terms, {p1} pairs; {{0<1}} <=5 nodes: {n2} terms, {p2} pairs; 0 disagreements"))
}

/// `omega^a * m + 1` for `a >= 1`, or `m + 1` points for `a = 0`.
fn ordinal(a: u32, m: usize) -> OrderTerm {
    let pt = OrderTerm::Atom(Label(0));
    if a == 0 {
        return OrderTerm::sum(vec![pt; m + 1]);
    }
    let mut e = OrderTerm::omega_left(vec![pt], Label(0));
    for _ in 1..a {
        e = OrderTerm::omega_left(vec![e], Label(0));
    }
    if m == 1 {
        e
    } else {
        OrderTerm::sum(vec![e; m])
    }
}

fn c5_ordinals(pos: &mut Positives) -> Outcome {
    let q = QuasiOrder::unlabeled();
    let fam: Vec<(u32, usize, OrderTerm)> =
        (0..=3).flat_map(|a| (1..=3).map(move |m| (a, m, ordinal(a, m)))).collect();
    let (mut by_oracle, mut by_law) = (0, 0);
    for (a1, m1, s) in &fam {
        for (a2, m2, t) in &fam {
            let law = a1 < a2 || (a1 == a2 && m1 <= m2);
            let expected = if *a1 <= 2 && *a2 <= 2 {
                by_oracle += 1;
                let o = skeleton_oracle_bounded(s, t, &q, 64).map_err(|e| e.to_string())?;
                if o != law {
                    return Err(format!("oracle table departs from the law at ({a1},{m1}) -> ({a2},{m2})"));
                }
                o
            } else {
                by_law += 1;
                law
            };
            if embed(s, t, &q).unwrap() != expected {
                return Err(format!("embed wrong at ({a1},{m1}) -> ({a2},{m2})"));
            }
            if expected {
                pos.check(s, t, &q);
            }
        }
    }
    Ok(format!("{} pairs: {by_oracle} against the oracle, {by_law} against the structural law", fam.len().pow(2)))
}

fn c6_cb() -> Outcome {
    let terms = enumerate_terms(&TermPool::new(QuasiOrder::unlabeled(), 10));
    for t in &terms {
        if cb_rank(t).unwrap() != cb_rank_iterated(t).unwrap() {
            return Err(format!("mismatch on {}", format_term(t, &QuasiOrder::unlabeled())));
        }
    }
    if terms.len() < 10_000 {
        return Err(format!("only {} terms generated", terms.len()));
    }
    Ok(format!("{} terms of size <= 10", terms.len()))
}

/// A point, or an unbounded omega-sum whose sequence entries are again of this form.
fn recursively_unbounded(t: &OrderTerm, q: &QuasiOrder) -> bool {
    match t {
        OrderTerm::Atom(_) => true,
        OrderTerm::Omega(o) => {
            is_unbounded_sum(t, q).unwrap() && o.entries().all(|e| recursively_unbounded(e, q))
        }
        _ => false,
    }
}

fn c7_decompose() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut drawn = Vec::new();
    for (q, n) in [(QuasiOrder::unlabeled(), 8), (QuasiOrder::two_chain(), 6)] {
        let pool = enumerate_terms(&TermPool::new(q.clone(), n));
        for _ in 0..250 {
            drawn.push((q.clone(), pool.choose(&mut rng).unwrap().clone()));
        }
    }
    for (q, t) in &drawn {
        let parts = decompose_c_prime(t, q).map_err(|e| e.to_string())?;
        if let Some(p) = parts.iter().find(|p| !recursively_unbounded(p, q)) {
            return Err(format!("part {} of {} is not an unbounded sum", format_term(p, q), format_term(t, q)));
        }
        let r = reassemble(&parts);
        if !(embed(&r, t, q).unwrap() && embed(t, &r, q).unwrap()) {
            return Err(format!("reassembly of {} is not equivalent", format_term(t, q)));
        }
    }
    Ok("500 random terms".into())
}

fn c8_wqo() -> Outcome {
    let r = wqo_sample_test(&TermPool::new(QuasiOrder::unlabeled(), 8), 40, 1000, 8).map_err(|e| e.to_string())?;
    let msg = format!("{}/{} good, pool {}, {} classes drawn", r.good, r.trials, r.pool_size, r.classes.len());
    if r.good == r.trials {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c9_vignette(pos: &mut Positives) -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cclo");
    let cases = [(V_UP, V_DOWN, false), (V_DOWN, V_UP, false), (V_UP, V_OMEGA2, true), (V_OMEGA2, V_UP, false)];
    let q = QuasiOrder::two_chain();
    for (a, b, want) in cases {
        let (pa, pb) = (pinned_labeled(&gs(a)), pinned_labeled(&gs(b)));
        let lib = embed(&pa, &pb, &q).unwrap();
        let orc = skeleton_oracle_bounded(&pa, &pb, &q, 64).unwrap();
        let status = Command::new(bin)
            .args(["embed", "--pinned", "--oracle", a, b])
            .output()
            .map_err(|e| e.to_string())?
            .status
            .code();
        let code = Some(if want { 0 } else { 1 });
        if lib != want || orc != want || status != code {
            return Err(format!("{a} -> {b}: library {lib}, oracle {orc}, exit {status:?}, expected {want}"));
        }
        if want {
            pos.check(&pa, &pb, &q);
        }
    }
    let bad = Command::new(bin).args(["embed", "--pinned", "w(_;_;_)", V_UP]).output().map_err(|e| e.to_string())?;
    if bad.status.code() != Some(2) {
        return Err(format!("malformed input exited {:?}", bad.status.code()));
    }
    Ok("up/down incomparable, up into omega^2+1 only; exit codes 1,1,0,1 and 2 on bad input".into())
}

fn report(n: usize, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let r = f();
    let took = start.elapsed();
    let late = limit.is_some_and(|l| took > l);
    let (ok, msg) = match r {
        Ok(m) if late => (false, format!("{m}; over the {:?} budget", limit.unwrap())),
        Ok(m) => (true, m),
        Err(m) => (false, m),
    };
    println!("{} {n:>2} {name}: {msg} [{:.2?}]", if ok { "PASS" } else { "FAIL" }, took);
    ok
}

fn main() {
    let mut pos = Positives::default();
    let mut all = true;
    all &= report(1, "connective laws", Some(Duration::from_secs(1)), c1_connectives);
    all &= report(2, "truncation", Some(Duration::from_secs(30)), c2_truncation);
    all &= report(3, "induced valuation", Some(Duration::from_secs(30)), || c3_induced(&mut pos));
    all &= report(4, "oracle equivalence", Some(Duration::from_secs(600)), || c4_oracle(&mut pos));
    all &= report(5, "ordinal family", None, || c5_ordinals(&mut pos));
    all &= report(6, "cb rank coherence", None, c6_cb);
    all &= report(7, "decomposition", None, c7_decompose);
    all &= report(8, "wqo sampling", Some(Duration::from_secs(300)), c8_wqo);
    all &= report(9, "goedel-set vignette", None, || c9_vignette(&mut pos));
    all &= report(10, "witness soundness", None, || {
        let msg = format!("{} witnesses checked at depths 3 and 5", pos.checked);
        match pos.rejected.first() {
            None => Ok(msg),
            Some(r) => Err(format!("{msg}; {} rejected, first {r}", pos.rejected.len())),
        }
    });
    if !all {
        std::process::exit(1);
    }
}
