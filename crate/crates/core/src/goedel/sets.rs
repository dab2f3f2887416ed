use std::collections::{BTreeMap, HashMap};

use num::{Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{evaluate, Valuation};
use super::formula::Formula;
use crate::embed::{embed_witness, EmbeddingWitness};
use crate::error::{Error, Result};
use crate::qo::{Label, OmegaSeq, QuasiOrder};
use crate::term::{coordinate, realize_points, Ends, OmegaSum, OrderTerm, Rat};

/// A closed subset of `[0,1]` containing both ends, given by a term.
///
/// The realization places the least point at 0 and the greatest at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoedelSet {
    term: OrderTerm,
}

impl GoedelSet {
    /// Labels are irrelevant and collapsed to the first label.
    pub fn new(term: OrderTerm) -> Result<Self> {
        term.validated()?;
        if matches!(term, OrderTerm::Empty | OrderTerm::Atom(_)) {
            return Err(Error::Precondition("a Goedel set needs distinct points 0 and 1".into()));
        }
        Ok(GoedelSet { term: term.map_labels(&|_| Label(0)) })
    }

    pub fn term(&self) -> &OrderTerm {
        &self.term
    }

    /// Realized truth values at `depth`, increasing, from 0 to 1.
    pub fn sample(&self, depth: usize) -> Vec<Rat> {
        realize_points(&self.term, &Rat::zero(), &Rat::one(), depth)
            .expect("validated")
            .into_iter()
            .map(|p| p.coord)
            .collect()
    }

    pub fn contains_sampled(&self, x: &Rat, depth: usize) -> bool {
        self.sample(depth).binary_search(x).is_ok()
    }
}

/// Relabels over `{0<1}`: least and greatest point get `1`, all else `0`.
pub fn pinned_labeled(v: &GoedelSet) -> OrderTerm {
    pin_term(&v.term)
}

/// `pinned_labeled` on a bare term; a single point simply gets label `1`.
pub fn pin_term(t: &OrderTerm) -> OrderTerm {
    let zero = t.map_labels(&|_| Label(0));
    mark(&mark(&zero, End::Min), End::Max)
}

#[derive(Clone, Copy, PartialEq)]
enum End {
    Min,
    Max,
}

const ONE: Label = Label(1);

fn mark(t: &OrderTerm, end: End) -> OrderTerm {
    match t {
        OrderTerm::Empty => OrderTerm::Empty,
        OrderTerm::Atom(_) => OrderTerm::Atom(ONE),
        OrderTerm::Interval(e) => OrderTerm::Interval(match end {
            End::Min => Ends { lo: ONE, ..*e },
            End::Max => Ends { hi: ONE, ..*e },
        }),
        OrderTerm::Sum(parts) => {
            let mut parts = parts.clone();
            let i = if end == End::Min { 0 } else { parts.len() - 1 };
            parts[i] = mark(&parts[i], end);
            OrderTerm::Sum(parts)
        }
        OrderTerm::Omega(o) => {
            let mut o: OmegaSum = (**o).clone();
            let side = if end == End::Min { &mut o.left } else { &mut o.right };
            match side {
                None => o.center = ONE,
                Some(seq) => {
                    if seq.prefix.is_empty() {
                        // block 0 is a cycle entry: peel it off so only one copy changes
                        let first = seq.cycle.remove(0);
                        seq.cycle.push(first.clone());
                        seq.prefix.push(first);
                    }
                    seq.prefix[0] = mark(&seq.prefix[0], end);
                }
            }
            OrderTerm::Omega(Box::new(o))
        }
    }
}

/// Embeddings of the pinned terms, in both directions.
#[derive(Debug, Clone)]
pub struct LogicEvidence {
    /// `V1` embeds into `V2`: the logic of `V2` is contained in the logic of `V1`.
    pub v2_subset_v1: Option<EmbeddingWitness>,
    /// `V2` embeds into `V1`: the logic of `V1` is contained in the logic of `V2`.
    pub v1_subset_v2: Option<EmbeddingWitness>,
}

pub fn logic_subset_evidence(v1: &GoedelSet, v2: &GoedelSet) -> Result<LogicEvidence> {
    let q = QuasiOrder::two_chain();
    let (a, b) = (pinned_labeled(v1), pinned_labeled(v2));
    Ok(LogicEvidence { v2_subset_v1: embed_witness(&a, &b, &q)?, v1_subset_v2: embed_witness(&b, &a, &q)? })
}

/// The coordinate map `h` of a pinned embedding `V1 -> V2` on the depth sample of `V1`.
pub fn realized_map(
    v1: &GoedelSet,
    v2: &GoedelSet,
    w: &EmbeddingWitness,
    depth: usize,
) -> Result<BTreeMap<Rat, Rat>> {
    let (a, b) = (pinned_labeled(v1), pinned_labeled(v2));
    let (zero, one) = (Rat::zero(), Rat::one());
    let mut h = BTreeMap::new();
    for p in realize_points(&a, &zero, &one, depth)? {
        let t = w
            .apply(&a, &p.site)
            .ok_or_else(|| Error::Structural(format!("no rule covers source site {}", p.site)))?;
        let y = coordinate(&b, &zero, &one, &t).ok_or_else(|| Error::Structural(format!("dangling target site {t}")))?;
        h.insert(p.coord, y);
    }
    Ok(h)
}

/// Binary digits of `x` in `(0,1)` as (pre-period, period).
fn binary_digits(x: &Rat) -> (Vec<u8>, Vec<u8>) {
    let d = x.denom().clone();
    let mut r = x.numer().clone();
    let mut seen: HashMap<num::BigInt, usize> = HashMap::new();
    let mut digits = Vec::new();
    loop {
        if let Some(&i) = seen.get(&r) {
            let period = digits.split_off(i);
            return (digits, period);
        }
        seen.insert(r.clone(), digits.len());
        r *= 2;
        let (q, rem) = r.div_rem(&d);
        digits.push(if q.is_zero() { 0 } else { 1 });
        r = rem;
    }
}

fn is_dyadic(x: &Rat) -> bool {
    let mut d = x.denom().clone();
    let two = num::BigInt::from(2);
    while d.is_even() {
        d /= &two;
    }
    d.is_one()
}

/// Reads the binary expansion of each point as a ternary Cantor-set
/// coordinate with digits 0 and 2, then places it affinely into `[lo, hi]`.
pub fn cantor_map(points: &[Rat], lo: &Rat, hi: &Rat) -> Result<Vec<(Rat, Rat)>> {
    if lo >= hi {
        return Err(Error::Precondition("empty target interval".into()));
    }
    for w in points.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Precondition("points must be strictly increasing".into()));
        }
    }
    let three = Rat::from_integer(3.into());
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        if !x.is_positive() || x >= &Rat::one() {
            return Err(Error::Precondition(format!("{x} is not inside (0,1)")));
        }
        if is_dyadic(x) {
            return Err(Error::Precondition(format!("{x} is dyadic")));
        }
        let (pre, per) = binary_digits(x);
        let mut scale = Rat::one();
        let mut head = Rat::zero();
        for d in &pre {
            scale /= &three;
            head += &scale * Rat::from_integer((2 * d).into());
        }
        let mut s = Rat::one();
        let mut block = Rat::zero();
        for d in &per {
            s /= &three;
            block += &s * Rat::from_integer((2 * d).into());
        }
        let c = head + scale * block / (Rat::one() - s);
        out.push((x.clone(), lo + (hi - lo) * c));
    }
    Ok(out)
}

/// `W = V ∪ [inf P, 1]` for the perfect kernel `P` of `V`.
pub fn gs_extend(v: &GoedelSet) -> Result<GoedelSet> {
    match extend_from_kernel(&v.term)? {
        None => Err(Error::Precondition("perfect kernel empty".into())),
        Some(t) => GoedelSet::new(t),
    }
}

fn full() -> OrderTerm {
    OrderTerm::interval(Label(0))
}

fn seq_has_interval(seq: &OmegaSeq<OrderTerm>) -> bool {
    seq.entries().any(|e| !e.is_scattered())
}

/// The term with everything from the least kernel point on replaced by one
/// interval, or `None` when the term is scattered.
fn extend_from_kernel(t: &OrderTerm) -> Result<Option<OrderTerm>> {
    Ok(match t {
        OrderTerm::Empty | OrderTerm::Atom(_) => None,
        OrderTerm::Interval(_) => Some(full()),
        OrderTerm::Sum(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if let Some(r) = extend_from_kernel(p)? {
                    let mut head = parts[..i].to_vec();
                    head.push(r);
                    return Ok(Some(OrderTerm::sum(head)));
                }
            }
            None
        }
        OrderTerm::Omega(o) => {
            if let Some(seq) = &o.left {
                for n in 0..seq.prefix.len() + seq.cycle.len() {
                    if let Some(r) = extend_from_kernel(seq.get(n))? {
                        let mut head: Vec<OrderTerm> = (0..n).map(|i| seq.get(i).clone()).collect();
                        head.push(r);
                        return Ok(Some(OrderTerm::sum(head)));
                    }
                }
            }
            let Some(seq) = &o.right else { return Ok(None) };
            if seq.cycle.iter().any(|e| !e.is_scattered()) {
                // the kernel accumulates at the center
                if o.left.is_some() {
                    return Err(Error::Precondition(
                        "least kernel point is a limit from the left; the extension is not a term".into(),
                    ));
                }
                return Ok(Some(full()));
            }
            if !seq_has_interval(seq) {
                return Ok(None);
            }
            let n = (0..seq.prefix.len()).rev().find(|&i| !seq.prefix[i].is_scattered()).expect("checked");
            let inner = OmegaSeq { prefix: seq.prefix[n + 1..].to_vec(), cycle: seq.cycle.clone() };
            let head = OrderTerm::omega(o.left.clone(), o.center, Some(inner));
            let r = extend_from_kernel(&seq.prefix[n])?.expect("has interval");
            Some(OrderTerm::sum(vec![head, r]))
        }
    })
}

/// Limits for `falsify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub max_universe: usize,
    pub depth: usize,
    pub trials: usize,
    /// Largest number of valuations enumerated exhaustively per universe size.
    pub exhaustive_cap: u64,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_universe: 2, depth: 3, trials: 2000, exhaustive_cap: 200_000, seed: 0 }
    }
}

/// Searches for a valuation into the sample of `v` giving `f` a value below 1.
pub fn falsify(f: &Formula, v: &GoedelSet, bounds: &Bounds) -> Result<Option<Valuation>> {
    if !f.is_closed() {
        return Err(Error::Input("formula is not closed".into()));
    }
    let sig = f.signature()?;
    let consts = f.constants();
    let values = v.sample(bounds.depth);
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let smallest = consts.len().max(1);
    for n in smallest..=bounds.max_universe.max(smallest) {
        let mut universe = consts.clone();
        let mut k = 1;
        while universe.len() < n {
            let name = format!("m{k}");
            if !universe.contains(&name) {
                universe.push(name);
            }
            k += 1;
        }
        let cells: Vec<(String, Vec<String>)> = sig
            .iter()
            .flat_map(|(p, &ar)| tuples(&universe, ar).into_iter().map(move |t| (p.clone(), t)))
            .collect();
        let build = |choice: &[usize]| -> Valuation {
            let mut val = Valuation { universe: universe.clone(), tables: BTreeMap::new() };
            for p in sig.keys() {
                val.tables.insert(p.clone(), BTreeMap::new());
            }
            for ((p, args), &c) in cells.iter().zip(choice) {
                val.tables.get_mut(p).unwrap().insert(args.clone(), values[c].clone());
            }
            val
        };
        let space = (values.len() as f64).powi(cells.len() as i32);
        if space <= bounds.exhaustive_cap as f64 {
            let mut choice = vec![0usize; cells.len()];
            loop {
                let val = build(&choice);
                if evaluate(&val, f)? < Rat::one() {
                    return Ok(Some(val));
                }
                let mut i = 0;
                while i < choice.len() && choice[i] + 1 == values.len() {
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
                choice[i] += 1;
            }
        } else {
            for _ in 0..bounds.trials {
                let choice: Vec<usize> = (0..cells.len()).map(|_| rng.gen_range(0..values.len())).collect();
                let val = build(&choice);
                if evaluate(&val, f)? < Rat::one() {
                    return Ok(Some(val));
                }
            }
        }
    }
    Ok(None)
}

/// All `k`-tuples over `m`, in lexicographic order.
fn tuples(m: &[String], k: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                m.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goedel::formula::parse_formula;
    use crate::syntax::parse_term;

    fn gs(s: &str) -> GoedelSet {
        GoedelSet::new(parse_term(s, &QuasiOrder::unlabeled()).unwrap()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn pinning() {
        let q = QuasiOrder::two_chain();
        let t = pinned_labeled(&gs("(pt + pt + pt)"));
        assert_eq!(crate::syntax::format_term(&t, &q), "(pt:1 + pt + pt:1)");
        let t = pinned_labeled(&gs("w([|pt];p;_)"));
        assert_eq!(crate::syntax::format_term(&t, &q), "w([pt:1|pt];1;_)");
        assert_eq!(pin_term(&OrderTerm::Atom(Label(0))), OrderTerm::Atom(ONE));
        let t = pinned_labeled(&gs("int"));
        assert_eq!(crate::syntax::format_term(&t, &q), "int:1/0/1");
    }

    #[test]
    fn cantor_third() {
        let m = cantor_map(&[r(1, 3)], &r(0, 1), &r(1, 1)).unwrap();
        assert_eq!(m[0].1, r(1, 4));
        assert!(cantor_map(&[r(1, 2)], &r(0, 1), &r(1, 1)).is_err());
        let m = cantor_map(&[r(1, 5), r(2, 7), r(2, 3)], &r(1, 1), &r(2, 1)).unwrap();
        assert!(m.windows(2).all(|w| w[0].1 < w[1].1));
        assert!(m.iter().all(|(_, y)| y > &r(1, 1) && y < &r(2, 1)));
    }

    #[test]
    fn extension() {
        assert_eq!(gs_extend(&gs("int")).unwrap(), gs("int"));
        assert_eq!(gs_extend(&gs("(pt + int)")).unwrap(), gs("(pt + int)"));
        assert_eq!(gs_extend(&gs("(pt + int + pt)")).unwrap(), gs("(pt + int)"));
        assert!(gs_extend(&gs("(pt + pt)")).is_err());
        assert!(gs_extend(&gs("w([|pt];p;[|int])")).is_err());
        assert_eq!(gs_extend(&gs("(pt + w(_;p;[|int]))")).unwrap(), gs("(pt + int)"));
    }

    #[test]
    fn falsify_examples() {
        let v = gs("(pt + pt + pt)");
        assert!(falsify(&Formula::Bot, &v, &Bounds::default()).unwrap().is_some());
        let lem = parse_formula("P(c) | ~P(c)").unwrap();
        let w = falsify(&lem, &v, &Bounds::default()).unwrap().unwrap();
        assert!(evaluate(&w, &lem).unwrap() < r(1, 1));
        let id = parse_formula("P(c) -> P(c)").unwrap();
        assert!(falsify(&id, &v, &Bounds::default()).unwrap().is_none());
    }
}
