//! Brute-force decision on an unrolled copy of the target.
//!
//! The target is laid out as a finite list of slots: every omega-sum gets a
//! fixed number of explicit blocks per side, every interval a grid of points
//! with dense gaps between them. A source item is placed at the least end slot
//! over every candidate image of its center and every aligned window of target
//! blocks. This shares no code with the cut-based decision procedure.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qo::{Label, OmegaSeq, QuasiOrder};
use crate::term::{OmegaSum, OrderTerm};

/// Largest combined node count the oracle accepts by default.
pub const ORACLE_BOUND: usize = 14;

pub fn skeleton_oracle(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder) -> Result<bool> {
    skeleton_oracle_bounded(l, k, q, ORACLE_BOUND)
}

pub fn skeleton_oracle_bounded(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder, bound: usize) -> Result<bool> {
    for t in [l, k] {
        t.validated()?;
        t.check_labels(q)?;
    }
    let size = l.size() + k.size();
    if size > bound {
        return Err(Error::OracleRefused { size, bound });
    }
    let items = flatten(l);
    if items.is_empty() {
        return Ok(true);
    }
    let s = l.size();
    let mut sk = Skeleton { slots: Vec::new(), copies: 2 * s + 3, grid: 2 * s + 2, ivs: 0 };
    sk.emit(k);
    let gaps = (0..sk.slots.len()).filter(|&i| matches!(sk.slots[i], Slot::Gap { .. })).collect();
    let mut o = Oracle { sk: &sk, q, gaps, labels: HashMap::new(), memo: HashMap::new() };
    Ok(o.list(&items, 0).is_some())
}

fn flatten(t: &OrderTerm) -> Vec<&OrderTerm> {
    let mut v = Vec::new();
    fn go<'a>(t: &'a OrderTerm, v: &mut Vec<&'a OrderTerm>) {
        match t {
            OrderTerm::Empty => {}
            OrderTerm::Sum(parts) => parts.iter().for_each(|p| go(p, v)),
            _ => v.push(t),
        }
    }
    go(t, &mut v);
    v
}

fn flatten_all<'a>(ts: impl Iterator<Item = &'a OrderTerm>) -> Vec<&'a OrderTerm> {
    ts.flat_map(flatten).collect()
}

/// Block boundaries of one side of an unrolled omega-sum.
///
/// Left: `bounds[n]` is the first slot of block `n`, `bounds[B]` the center.
/// Right: `bounds[n]` is one past the last slot of block `n`, `bounds[B]` one
/// past the center.
#[derive(Debug, Clone)]
struct Window {
    p: usize,
    c: usize,
    bounds: Vec<usize>,
}

impl Window {
    fn blocks(&self) -> usize {
        self.bounds.len() - 1
    }

    fn aligned(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        (self.p..self.blocks()).step_by(self.c)
    }
}

#[derive(Debug, Clone)]
enum Lim {
    No,
    Gap,
    Blocks(Window),
}

#[derive(Debug, Clone)]
enum Slot {
    Pt { label: Label, left: Lim, right: Lim, iv: Option<usize> },
    Gap { inner: Label },
}

struct Skeleton {
    slots: Vec<Slot>,
    copies: usize,
    grid: usize,
    ivs: usize,
}

impl Skeleton {
    fn emit(&mut self, t: &OrderTerm) {
        match t {
            OrderTerm::Empty => {}
            OrderTerm::Atom(l) => self.slots.push(Slot::Pt { label: *l, left: Lim::No, right: Lim::No, iv: None }),
            OrderTerm::Interval(e) => {
                let id = self.ivs;
                self.ivs += 1;
                for j in 0..=self.grid {
                    if j > 0 {
                        self.slots.push(Slot::Gap { inner: e.inner });
                    }
                    let label = if j == 0 {
                        e.lo
                    } else if j == self.grid {
                        e.hi
                    } else {
                        e.inner
                    };
                    let left = if j > 0 { Lim::Gap } else { Lim::No };
                    let right = if j < self.grid { Lim::Gap } else { Lim::No };
                    self.slots.push(Slot::Pt { label, left, right, iv: Some(id) });
                }
            }
            OrderTerm::Sum(parts) => parts.iter().for_each(|p| self.emit(p)),
            OrderTerm::Omega(o) => self.emit_omega(o),
        }
    }

    fn blocks_of(&self, seq: &OmegaSeq<OrderTerm>) -> usize {
        seq.prefix.len() + seq.cycle.len() * self.copies
    }

    fn emit_omega(&mut self, o: &OmegaSum) {
        let left = o.left.as_ref().map(|seq| {
            let n = self.blocks_of(seq);
            let mut bounds = Vec::with_capacity(n + 1);
            for i in 0..n {
                bounds.push(self.slots.len());
                self.emit(seq.get(i));
            }
            bounds.push(self.slots.len());
            Window { p: seq.prefix.len(), c: seq.cycle.len(), bounds }
        });
        let at = self.slots.len();
        self.slots.push(Slot::Pt { label: o.center, left: Lim::No, right: Lim::No, iv: None });
        let right = o.right.as_ref().map(|seq| {
            let n = self.blocks_of(seq);
            let mut bounds = vec![0; n + 1];
            bounds[n] = self.slots.len();
            for i in (0..n).rev() {
                self.emit(seq.get(i));
                bounds[i] = self.slots.len();
            }
            Window { p: seq.prefix.len(), c: seq.cycle.len(), bounds }
        });
        if let Slot::Pt { left: l, right: r, .. } = &mut self.slots[at] {
            *l = left.map_or(Lim::No, Lim::Blocks);
            *r = right.map_or(Lim::No, Lim::Blocks);
        }
    }
}

struct Oracle<'s, 'a> {
    sk: &'s Skeleton,
    q: &'a QuasiOrder,
    /// Indices of gap slots, increasing.
    gaps: Vec<usize>,
    labels: HashMap<*const OrderTerm, Vec<Label>>,
    memo: HashMap<(*const OrderTerm, usize), Option<usize>>,
}

impl<'s, 'a> Oracle<'s, 'a> {
    fn list(&mut self, items: &[&'a OrderTerm], mut pos: usize) -> Option<usize> {
        for x in items {
            pos = self.item(x, pos)?;
        }
        Some(pos)
    }

    fn under(&mut self, t: &OrderTerm, cap: Label) -> bool {
        let ls = self.labels.entry(t as *const OrderTerm).or_insert_with(|| t.label_set());
        ls.iter().all(|&l| self.q.leq(l, cap))
    }

    /// Least `e` such that `x` embeds into slots `pos..e`; a gap slot counts
    /// as still open when it is the end.
    fn item(&mut self, x: &'a OrderTerm, pos: usize) -> Option<usize> {
        let key = (x as *const OrderTerm, pos);
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = self.item_uncached(x, pos);
        self.memo.insert(key, r);
        r
    }

    fn item_uncached(&mut self, x: &'a OrderTerm, pos: usize) -> Option<usize> {
        let sk = self.sk;
        let n = sk.slots.len();
        let mut best: Option<usize> = None;
        fn offer(best: &mut Option<usize>, e: usize) {
            *best = Some(best.map_or(e, |b| b.min(e)));
        }
        let first = self.gaps.partition_point(|&g| g < pos);
        for k in first..self.gaps.len() {
            let i = self.gaps[k];
            let Slot::Gap { inner } = &sk.slots[i] else { unreachable!() };
            if self.under(x, *inner) {
                offer(&mut best, i);
                break;
            }
        }
        match x {
            OrderTerm::Empty | OrderTerm::Sum(_) => unreachable!("flattened"),
            OrderTerm::Atom(l) => {
                for i in pos..n {
                    if let Slot::Pt { label, .. } = &sk.slots[i] {
                        if self.q.leq(*l, *label) {
                            offer(&mut best, i + 1);
                            break;
                        }
                    }
                }
            }
            OrderTerm::Interval(e) => {
                'outer: for a in pos..best.unwrap_or(n) {
                    let Slot::Pt { label, iv: Some(id), .. } = &sk.slots[a] else { continue };
                    if !self.q.leq(e.lo, *label) {
                        continue;
                    }
                    let mut b = a + 2;
                    while b < n {
                        let Slot::Gap { inner } = &sk.slots[b - 1] else { break };
                        if !self.q.leq(e.inner, *inner) {
                            break;
                        }
                        let Slot::Pt { label: hl, iv: Some(bid), .. } = &sk.slots[b] else { break };
                        if bid != id {
                            break;
                        }
                        if self.q.leq(e.hi, *hl) {
                            offer(&mut best, b + 1);
                            break 'outer;
                        }
                        b += 2;
                    }
                }
            }
            OrderTerm::Omega(o) => {
                if let Some(e) = self.omega(o, pos, best) {
                    offer(&mut best, e);
                }
            }
        }
        best
    }

    /// Least end for an omega-sum item; ends at or beyond `bound` are not sought.
    fn omega(&mut self, o: &'a OmegaSum, pos: usize, bound: Option<usize>) -> Option<usize> {
        let sk = self.sk;
        let lparts = o.left.as_ref().map(|s| (flatten_all(s.prefix.iter()), flatten_all(s.cycle.iter())));
        let rparts = o
            .right
            .as_ref()
            .map(|s| (flatten_all(s.prefix.iter().rev()), flatten_all(s.cycle.iter().rev())));
        let pe = match &lparts {
            Some((pre, _)) => Some(self.list(pre, pos)?),
            None => None,
        };
        let mut best: Option<usize> = None;
        for c in pos..sk.slots.len() {
            if best.or(bound).is_some_and(|b| c >= b) {
                break;
            }
            let Slot::Pt { label, left, right, .. } = &sk.slots[c] else { continue };
            if !self.q.leq(o.center, *label) {
                continue;
            }
            if let (Some((_, cyc)), Some(pe)) = (&lparts, pe) {
                let ok = match left {
                    Lim::No => false,
                    Lim::Gap => {
                        let Slot::Gap { inner } = &sk.slots[c - 1] else { unreachable!() };
                        pe < c && cyc.iter().all(|t| self.under(t, *inner))
                    }
                    // fits only get harder from later starts, so the first
                    // aligned block after the prefix decides
                    Lim::Blocks(w) => match w.aligned().find(|&b| w.bounds[b] >= pe) {
                        Some(b) => self.list(cyc, w.bounds[b]).is_some_and(|e| e <= c),
                        None => false,
                    },
                };
                if !ok {
                    continue;
                }
            }
            let end = match &rparts {
                None => Some(c + 1),
                Some((pre, cyc)) => match right {
                    Lim::No => None,
                    Lim::Gap => {
                        let Slot::Gap { inner } = &sk.slots[c + 1] else { unreachable!() };
                        if cyc.iter().all(|t| self.under(t, *inner)) {
                            self.list(pre, c + 1)
                        } else {
                            None
                        }
                    }
                    // the innermost window holding one copy leaves the most room
                    Lim::Blocks(w) => self.list(cyc, c + 1).and_then(|e| {
                        let b = w.aligned().rev().find(|&b| e <= w.bounds[b])?;
                        self.list(pre, w.bounds[b])
                    }),
                },
            };
            if let Some(e) = end {
                best = Some(best.map_or(e, |b| b.min(e)));
            }
        }
        best
    }
}
