//! Enumeration of small terms, bi-embeddability classes, and samples of the
//! good-pair property.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::embed::decide;
use crate::qo::{OmegaSeq, QuasiOrder};
use crate::syntax::format_term;
use crate::term::OrderTerm;

/// Generation bounds for term enumeration.
#[derive(Debug, Clone)]
pub struct TermPool {
    pub q: QuasiOrder,
    pub max_nodes: usize,
    pub max_prefix: usize,
    pub max_cycle: usize,
    /// Include `Interval` leaves.
    pub intervals: bool,
    /// Emit `Empty` first.
    pub with_empty: bool,
    pub seed: u64,
}

impl TermPool {
    pub fn new(q: QuasiOrder, max_nodes: usize) -> Self {
        TermPool { q, max_nodes, max_prefix: max_nodes, max_cycle: max_nodes, intervals: false, with_empty: false, seed: 0 }
    }

    pub fn with_intervals(mut self, yes: bool) -> Self {
        self.intervals = yes;
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "max_nodes": self.max_nodes,
            "max_prefix": self.max_prefix,
            "max_cycle": self.max_cycle,
            "intervals": self.intervals,
            "labels": self.q.names(),
            "seed": self.seed,
        })
    }
}

/// Every valid term within the bounds, once each: by node count, then by the
/// derived order on terms (variants in declaration order).
pub fn enumerate_terms(pool: &TermPool) -> Vec<OrderTerm> {
    let mut by_size: Vec<Vec<OrderTerm>> = vec![Vec::new(); pool.max_nodes + 1];
    for n in 1..=pool.max_nodes {
        let mut level = Vec::new();
        if n == 1 {
            for l in pool.q.labels() {
                level.push(OrderTerm::Atom(l));
                if pool.intervals {
                    level.push(OrderTerm::interval(l));
                }
            }
        }
        // finite sums: 1 + parts, each part not itself a sum
        if n >= 3 {
            for parts in lists(&by_size, n - 1, 2, usize::MAX, true) {
                level.push(OrderTerm::Sum(parts));
            }
        }
        if n >= 3 {
            let e = n - 2;
            for lt in 0..=e {
                let lefts = sides(pool, &by_size, lt);
                let rights = sides(pool, &by_size, e - lt);
                for l in &lefts {
                    for r in &rights {
                        if l.is_none() && r.is_none() {
                            continue;
                        }
                        for c in pool.q.labels() {
                            level.push(OrderTerm::omega(l.clone(), c, r.clone()));
                        }
                    }
                }
            }
        }
        level.sort();
        by_size[n] = level;
    }
    let mut out = Vec::new();
    if pool.with_empty {
        out.push(OrderTerm::Empty);
    }
    out.extend(by_size.into_iter().flatten());
    out
}

/// Options for one side of an omega-sum whose entries total `t` nodes.
fn sides(pool: &TermPool, by_size: &[Vec<OrderTerm>], t: usize) -> Vec<Option<OmegaSeq<OrderTerm>>> {
    if t == 0 {
        return vec![None];
    }
    let mut out = Vec::new();
    for tc in 1..=t {
        let prefixes = if t == tc { vec![Vec::new()] } else { lists(by_size, t - tc, 1, pool.max_prefix, false) };
        let cycles = lists(by_size, tc, 1, pool.max_cycle, false);
        for p in &prefixes {
            for c in &cycles {
                out.push(Some(OmegaSeq { prefix: p.clone(), cycle: c.clone() }));
            }
        }
    }
    out
}

/// Lists of terms with sizes summing to `total` and length in `min..=max`.
fn lists(by_size: &[Vec<OrderTerm>], total: usize, min: usize, max: usize, no_sums: bool) -> Vec<Vec<OrderTerm>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(
        by_size: &[Vec<OrderTerm>],
        left: usize,
        min: usize,
        max: usize,
        no_sums: bool,
        cur: &mut Vec<OrderTerm>,
        out: &mut Vec<Vec<OrderTerm>>,
    ) {
        if left == 0 {
            if cur.len() >= min {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() == max {
            return;
        }
        for s in 1..=left {
            for t in &by_size[s] {
                if no_sums && matches!(t, OrderTerm::Sum(_)) {
                    continue;
                }
                cur.push(t.clone());
                go(by_size, left - s, min, max, no_sums, cur, out);
                cur.pop();
            }
        }
    }
    go(by_size, total, min, max, no_sums, &mut cur, &mut out);
    out
}

fn mutual(a: &OrderTerm, b: &OrderTerm, q: &QuasiOrder) -> bool {
    decide(a, b, q) && decide(b, a, q)
}

/// A class of mutually embeddable terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    pub representative: OrderTerm,
    pub members: Vec<OrderTerm>,
}

/// Partition by mutual embeddability. Representatives are least in the
/// enumeration order, so the result does not depend on the input order.
pub fn equivalence_classes(terms: &[OrderTerm], q: &QuasiOrder) -> Vec<Class> {
    let mut sorted: Vec<&OrderTerm> = terms.iter().collect();
    sorted.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    let mut parent: Vec<usize> = (0..sorted.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    // comparing against one root per class suffices since the relation is transitive
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..sorted.len() {
        match roots.iter().find(|&&r| mutual(sorted[r], sorted[i], q)) {
            Some(&r) => {
                let a = find(&mut parent, i);
                let b = find(&mut parent, r);
                parent[a.max(b)] = a.min(b);
            }
            None => roots.push(i),
        }
    }
    let mut classes: Vec<Class> = Vec::new();
    let mut index: HashMap<usize, usize> = HashMap::new();
    for i in 0..sorted.len() {
        let r = find(&mut parent, i);
        let k = *index.entry(r).or_insert_with(|| {
            classes.push(Class { representative: sorted[r].clone(), members: Vec::new() });
            classes.len() - 1
        });
        classes[k].members.push(sorted[i].clone());
    }
    classes
}

/// Outcome of `wqo_sample_test`.
#[derive(Debug, Clone)]
pub struct WqoReport {
    pub pool: TermPool,
    pub pool_size: usize,
    pub length: usize,
    pub trials: usize,
    pub good: usize,
    /// First good pair `(i, j)` of each sequence, if any.
    pub first_pairs: Vec<Option<(usize, usize)>>,
    /// Classes among the distinct drawn terms.
    pub classes: Vec<Class>,
}

impl WqoReport {
    pub fn good_fraction(&self) -> f64 {
        self.good as f64 / self.trials.max(1) as f64
    }

    pub fn to_json(&self) -> Value {
        let q = &self.pool.q;
        json!({
            "bounds": self.pool.to_json(),
            "counts": {
                "pool": self.pool_size,
                "length": self.length,
                "trials": self.trials,
                "good": self.good,
                "classes": self.classes.len(),
            },
            "classes": self.classes.iter().map(|c| json!({
                "representative": format_term(&c.representative, q),
                "size": c.members.len(),
            })).collect::<Vec<_>>(),
            "good_fraction": self.good_fraction(),
        })
    }
}

/// Draws `trials` sequences of `length` terms from the pool (with
/// replacement) and looks for `i < j` with `t_i` embedding into `t_j`.
pub fn wqo_sample_test(pool: &TermPool, length: usize, trials: usize, seed: u64) -> crate::Result<WqoReport> {
    if length < 2 {
        return Err(crate::Error::Input("sequence length must be at least 2".into()));
    }
    let terms = enumerate_terms(pool);
    if terms.is_empty() {
        return Err(crate::Error::Input("empty pool".into()));
    }
    let q = &pool.q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    let mut drawn = vec![false; terms.len()];
    let mut good = 0;
    let mut first_pairs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let seq: Vec<usize> = (0..length).map(|_| rng.gen_range(0..terms.len())).collect();
        seq.iter().for_each(|&i| drawn[i] = true);
        let mut hit = None;
        'search: for j in 1..length {
            for i in 0..j {
                let (a, b) = (seq[i], seq[j]);
                let e = *memo.entry((a, b)).or_insert_with(|| decide(&terms[a], &terms[b], q));
                if e {
                    hit = Some((i, j));
                    break 'search;
                }
            }
        }
        if hit.is_some() {
            good += 1;
        }
        first_pairs.push(hit);
    }
    let distinct: Vec<OrderTerm> =
        terms.iter().zip(&drawn).filter(|(_, d)| **d).map(|(t, _)| t.clone()).collect();
    let classes = equivalence_classes(&distinct, q);
    Ok(WqoReport { pool: pool.clone(), pool_size: terms.len(), length, trials, good, first_pairs, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qo::Label;

    #[test]
    fn small_counts() {
        let q = QuasiOrder::unlabeled();
        assert_eq!(enumerate_terms(&TermPool::new(q.clone(), 1)), vec![OrderTerm::Atom(Label(0))]);
        assert_eq!(enumerate_terms(&TermPool::new(q.clone(), 2)).len(), 1);
        // size 3: (pt + pt), w([|pt];p;_), w(_;p;[|pt])
        assert_eq!(enumerate_terms(&TermPool::new(q, 3)).len(), 4);
    }

    #[test]
    fn classes_basic() {
        let q = QuasiOrder::unlabeled();
        let pt = OrderTerm::Atom(Label(0));
        let two = OrderTerm::sum(vec![pt.clone(), pt.clone()]);
        assert_eq!(equivalence_classes(&[pt.clone(), pt.clone()], &q).len(), 1);
        assert_eq!(equivalence_classes(&[pt.clone(), two], &q).len(), 2);
    }
}
