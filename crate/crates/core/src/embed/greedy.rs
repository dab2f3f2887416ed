//! Leftmost placement of source items into a target.
//!
//! Source items are placed one after another, each as far left as possible.
//! A placement is summarized by a cut: the infimum of the greatest image
//! point. Ranges of an interval compress toward its left end, so a cut at an
//! interval point still leaves the rest of that interval available.

use std::cell::RefCell;
use std::collections::HashMap;

use num::{One, Zero};

use crate::qo::{Label, QuasiOrder};
use crate::term::{Ends, OmegaSum, OrderTerm, Rat, Side, Site, Step};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Cut {
    Start,
    After(Site),
}

impl Cut {
    fn steps(&self) -> Option<&[Step]> {
        match self {
            Cut::Start => None,
            Cut::After(s) => Some(s.steps()),
        }
    }
}

/// First acceptable position after a cut. `attained` is false when the
/// position is only an infimum of acceptable ones.
#[derive(Debug, Clone)]
pub(crate) struct Hit {
    pub site: Site,
    pub attained: bool,
}

/// A source term that is not a finite sum, tagged with the sequence entry
/// (or sum part) it came from.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Item<'a> {
    pub term: &'a OrderTerm,
    pub entry: usize,
}

fn push_entry<'a>(out: &mut Vec<Item<'a>>, entry: usize, t: &'a OrderTerm) {
    match t {
        OrderTerm::Sum(parts) => out.extend(parts.iter().map(|p| Item { term: p, entry })),
        OrderTerm::Empty => {}
        _ => out.push(Item { term: t, entry }),
    }
}

/// Items of a whole term in order.
pub(crate) fn top_items(t: &OrderTerm) -> Vec<Item<'_>> {
    match t {
        OrderTerm::Sum(parts) => parts.iter().enumerate().map(|(i, p)| Item { term: p, entry: i }).collect(),
        OrderTerm::Empty => Vec::new(),
        _ => vec![Item { term: t, entry: 0 }],
    }
}

/// Items of a list of sequence entries in left-to-right order. Right-side
/// entries are listed from the outside in, so they are reversed.
pub(crate) fn seq_items<'a>(entries: &'a [OrderTerm], side: Side) -> Vec<Item<'a>> {
    let mut out = Vec::new();
    match side {
        Side::Left => entries.iter().enumerate().for_each(|(i, e)| push_entry(&mut out, i, e)),
        Side::Right => entries.iter().enumerate().rev().for_each(|(i, e)| push_entry(&mut out, i, e)),
    }
    out
}

#[derive(Debug, Clone, Copy)]
enum Cand<'a> {
    Atom(Label),
    Center(&'a OmegaSum),
    Interval(Ends, Option<&'a Rat>),
}

pub(crate) enum Query<'a> {
    Atom(Label),
    Interval(Ends),
    Omega(OmegaQuery<'a>),
}

pub(crate) struct OmegaQuery<'a> {
    pub x: &'a OmegaSum,
    left_labels: Vec<Label>,
    right_labels: Vec<Label>,
}

impl<'a> OmegaQuery<'a> {
    pub fn new(x: &'a OmegaSum) -> Self {
        let labels = |s: Side| {
            let mut v = Vec::new();
            if let Some(seq) = x.side(s) {
                seq.cycle.iter().for_each(|e| e.labels(&mut v));
            }
            v.sort();
            v.dedup();
            v
        };
        OmegaQuery { x, left_labels: labels(Side::Left), right_labels: labels(Side::Right) }
    }
}

type FitKey = (usize, Side, usize, Side);

pub(crate) struct Ctx<'a> {
    pub q: &'a QuasiOrder,
    fits: RefCell<HashMap<FitKey, Option<usize>>>,
}

impl<'a> Ctx<'a> {
    pub fn new(q: &'a QuasiOrder) -> Self {
        Ctx { q, fits: RefCell::new(HashMap::new()) }
    }
}

/// Where placements happen: a real target, or the left blocks of a virtual
/// omega-sum cycling through the given entries with a center that accepts
/// nothing.
pub(crate) enum Host<'a> {
    Real(&'a OrderTerm),
    Ring(Vec<&'a OrderTerm>),
}

pub(crate) struct Engine<'c, 'a> {
    ctx: &'c Ctx<'a>,
    host: Host<'a>,
    memo: RefCell<HashMap<(usize, Cut), Option<Site>>>,
}

fn addr<T>(t: &T) -> usize {
    t as *const T as usize
}

impl<'c, 'a> Engine<'c, 'a> {
    pub fn new(ctx: &'c Ctx<'a>, host: Host<'a>) -> Self {
        Engine { ctx, host, memo: RefCell::new(HashMap::new()) }
    }

    pub fn q(&self) -> &'a QuasiOrder {
        self.ctx.q
    }

    fn leq(&self, a: Label, b: Label) -> bool {
        self.ctx.q.leq(a, b)
    }

    fn all_leq(&self, ls: &[Label], b: Label) -> bool {
        ls.iter().all(|&l| self.leq(l, b))
    }

    pub fn greedy(&self, items: &[Item<'a>], mut cut: Cut) -> Option<Cut> {
        for it in items {
            cut = Cut::After(self.place(it.term, &cut)?);
        }
        Some(cut)
    }

    /// Least possible greatest image of `x` above `cut`.
    pub fn place(&self, x: &'a OrderTerm, cut: &Cut) -> Option<Site> {
        let key = (addr(x), cut.clone());
        if let Some(r) = self.memo.borrow().get(&key) {
            return r.clone();
        }
        let r = self.place_raw(x, cut);
        self.memo.borrow_mut().insert(key, r.clone());
        r
    }

    fn place_raw(&self, x: &'a OrderTerm, cut: &Cut) -> Option<Site> {
        match x {
            OrderTerm::Atom(a) => self.scan(cut, &Query::Atom(*a)).map(|h| h.site),
            OrderTerm::Interval(e) => self.scan(cut, &Query::Interval(*e)).map(|h| h.site),
            OrderTerm::Omega(o) => {
                let k = self.left_prefix_cut(o, cut)?;
                let y = self.scan(&k, &Query::Omega(OmegaQuery::new(o)))?;
                self.right_prefix_end(o, &y.site)
            }
            OrderTerm::Sum(_) | OrderTerm::Empty => unreachable!("items are flattened"),
        }
    }

    pub fn left_prefix_cut(&self, o: &'a OmegaSum, cut: &Cut) -> Option<Cut> {
        match &o.left {
            Some(s) => self.greedy(&seq_items(&s.prefix, Side::Left), cut.clone()),
            None => Some(cut.clone()),
        }
    }

    pub fn right_prefix_end(&self, o: &'a OmegaSum, y: &Site) -> Option<Site> {
        match &o.right {
            Some(s) => match self.greedy(&seq_items(&s.prefix, Side::Right), Cut::After(y.clone()))? {
                Cut::After(s) => Some(s),
                Cut::Start => unreachable!(),
            },
            None => Some(y.clone()),
        }
    }

    /// First position strictly after `cut` accepted by `q`.
    pub fn scan(&self, cut: &Cut, q: &Query<'a>) -> Option<Hit> {
        let from = cut.steps();
        let mut path = Vec::new();
        match &self.host {
            Host::Real(t) => self.scan_node(t, &mut path, from, q),
            Host::Ring(entries) => {
                let (n0, rest) = match from {
                    None => (0, None),
                    Some([Step::Left(n), rest @ ..]) => (*n, Some(rest)),
                    Some(_) => return None,
                };
                for n in n0..=n0 + entries.len() {
                    path.push(Step::Left(n));
                    let r = self.scan_node(entries[n % entries.len()], &mut path, if n == n0 { rest } else { None }, q);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                }
                None
            }
        }
    }

    fn scan_node(
        &self,
        node: &'a OrderTerm,
        path: &mut Vec<Step>,
        from: Option<&[Step]>,
        q: &Query<'a>,
    ) -> Option<Hit> {
        match node {
            OrderTerm::Empty => None,
            OrderTerm::Atom(l) => match from {
                None => self.accept(q, Cand::Atom(*l), path),
                Some(_) => None,
            },
            OrderTerm::Interval(e) => match from {
                None => self.accept(q, Cand::Interval(*e, None), path),
                Some([Step::At(t)]) => self.accept(q, Cand::Interval(*e, Some(t)), path),
                Some(_) => None,
            },
            OrderTerm::Sum(parts) => {
                let (start, mut rest) = match from {
                    None => (0, None),
                    Some([Step::Part(i), rest @ ..]) => (*i, Some(rest)),
                    Some(_) => return None,
                };
                for (i, part) in parts.iter().enumerate().skip(start) {
                    path.push(Step::Part(i));
                    let r = self.scan_node(part, path, rest.take(), q);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                }
                None
            }
            OrderTerm::Omega(o) => self.scan_omega(o, path, from, q),
        }
    }

    fn scan_omega(
        &self,
        o: &'a OmegaSum,
        path: &mut Vec<Step>,
        from: Option<&[Step]>,
        q: &Query<'a>,
    ) -> Option<Hit> {
        let side_range = |seq: &crate::qo::OmegaSeq<OrderTerm>, n0: usize| {
            n0..n0.max(seq.prefix.len()) + seq.cycle.len() + 1
        };
        // phase 0: left blocks from n0; 1: center; 2: right side from the center
        let (phase, n0, mut rest) = match from {
            None => (0, 0, None),
            Some([Step::Left(n), rest @ ..]) => (0, *n, Some(rest)),
            Some([Step::Center]) => (2, 0, None),
            Some([Step::Right(m), rest @ ..]) => {
                return self.scan_right_from(o, path, *m, Some(rest), q);
            }
            Some(_) => return None,
        };
        if phase == 0 {
            if let Some(seq) = &o.left {
                for n in side_range(seq, n0) {
                    path.push(Step::Left(n));
                    let r = self.scan_node(seq.get(n), path, rest.take(), q);
                    path.pop();
                    if r.is_some() {
                        return r;
                    }
                }
            }
            let r = self.accept(q, Cand::Center(o), path);
            if r.is_some() {
                return r;
            }
        }
        let seq = o.right.as_ref()?;
        // anything acceptable deep on the right puts the infimum at the center
        let p = seq.prefix.len();
        for (j, e) in seq.cycle.iter().enumerate() {
            path.push(Step::Right(p + j));
            let r = self.scan_node(e, path, None, q);
            path.pop();
            if r.is_some() {
                let mut site = path.clone();
                site.push(Step::Center);
                return Some(Hit { site: Site(site), attained: false });
            }
        }
        if p == 0 {
            return None;
        }
        self.scan_right_from(o, path, p - 1, None, q)
    }

    fn scan_right_from(
        &self,
        o: &'a OmegaSum,
        path: &mut Vec<Step>,
        m: usize,
        mut rest: Option<&[Step]>,
        q: &Query<'a>,
    ) -> Option<Hit> {
        let seq = o.right.as_ref()?;
        for n in (0..=m).rev() {
            path.push(Step::Right(n));
            let r = self.scan_node(seq.get(n), path, rest.take(), q);
            path.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }

    fn accept(&self, q: &Query<'a>, cand: Cand<'a>, path: &[Step]) -> Option<Hit> {
        let here = |attained: bool| Some(Hit { site: Site(path.to_vec()), attained });
        let at = |t: Rat, attained: bool| {
            let mut v = path.to_vec();
            v.push(Step::At(t));
            Some(Hit { site: Site(v), attained })
        };
        match (q, cand) {
            (Query::Atom(a), Cand::Atom(l)) => self.leq(*a, l).then(|| here(true)).flatten(),
            (Query::Atom(a), Cand::Center(n)) => {
                if !self.leq(*a, n.center) {
                    return None;
                }
                let mut v = path.to_vec();
                v.push(Step::Center);
                Some(Hit { site: Site(v), attained: true })
            }
            (Query::Atom(a), Cand::Interval(e, None)) => {
                if self.leq(*a, e.lo) {
                    at(Rat::zero(), true)
                } else if self.leq(*a, e.inner) {
                    at(Rat::zero(), false)
                } else if self.leq(*a, e.hi) {
                    at(Rat::one(), true)
                } else {
                    None
                }
            }
            (Query::Atom(a), Cand::Interval(e, Some(t))) => {
                if t.is_one() {
                    None
                } else if self.leq(*a, e.inner) {
                    at(t.clone(), false)
                } else if self.leq(*a, e.hi) {
                    at(Rat::one(), true)
                } else {
                    None
                }
            }
            (Query::Interval(s), Cand::Interval(e, after)) => {
                if !self.leq(s.inner, e.inner) || after.is_some_and(|t| t.is_one()) {
                    return None;
                }
                let start_ok = self.leq(s.lo, e.inner) || (after.is_none() && self.leq(s.lo, e.lo));
                if !start_ok {
                    return None;
                }
                if self.leq(s.hi, e.inner) {
                    at(after.cloned().unwrap_or_else(Rat::zero), false)
                } else if self.leq(s.hi, e.hi) {
                    at(Rat::one(), true)
                } else {
                    None
                }
            }
            (Query::Interval(_), _) => None,
            (Query::Omega(_), Cand::Atom(_)) => None,
            (Query::Omega(oq), Cand::Center(n)) => {
                let mut v = path.to_vec();
                v.push(Step::Center);
                let x = oq.x;
                let ok = self.leq(x.center, n.center)
                    && (x.left.is_none()
                        || (n.left.is_some() && self.fits(x, Side::Left, n, Side::Left).is_some()))
                    && (x.right.is_none()
                        || (n.right.is_some() && self.fits(x, Side::Right, n, Side::Right).is_some()));
                ok.then(|| Some(Hit { site: Site(v), attained: true })).flatten()
            }
            (Query::Omega(oq), Cand::Interval(e, after)) => {
                let x = oq.x;
                let s_ok = self.all_leq(&oq.left_labels, e.inner);
                let t_ok = self.all_leq(&oq.right_labels, e.inner);
                let inner_ok = self.leq(x.center, e.inner)
                    && (x.left.is_none() || s_ok)
                    && (x.right.is_none() || t_ok);
                let hi_ok = x.right.is_none() && s_ok && self.leq(x.center, e.hi);
                match after {
                    None => {
                        if x.left.is_none() && t_ok && self.leq(x.center, e.lo) {
                            at(Rat::zero(), true)
                        } else if inner_ok {
                            at(Rat::zero(), false)
                        } else if hi_ok {
                            at(Rat::one(), true)
                        } else {
                            None
                        }
                    }
                    Some(t) if t.is_one() => None,
                    Some(t) => {
                        if inner_ok {
                            at(t.clone(), false)
                        } else if hi_ok {
                            at(Rat::one(), true)
                        } else {
                            None
                        }
                    }
                }
            }
        }
    }

    /// Number `J` of consecutive copies of the target cycle on side `ns` of
    /// `n` that suffice for one copy of the source cycle on side `xs` of `x`.
    pub fn fits(&self, x: &'a OmegaSum, xs: Side, n: &'a OmegaSum, ns: Side) -> Option<usize> {
        let key = (addr(x), xs, addr(n), ns);
        if let Some(r) = self.ctx.fits.borrow().get(&key) {
            return *r;
        }
        let src = x.side(xs).expect("source side present");
        let dst = n.side(ns).expect("target side present");
        let mut ring: Vec<&'a OrderTerm> = dst.cycle.iter().collect();
        if ns == Side::Right {
            ring.reverse();
        }
        let len = ring.len();
        let sub = Engine::new(self.ctx, Host::Ring(ring));
        let r = match sub.greedy(&seq_items(&src.cycle, xs), Cut::Start) {
            Some(Cut::After(site)) => match site.steps().first() {
                Some(Step::Left(b)) => Some(b / len + 1),
                _ => None,
            },
            _ => None,
        };
        self.ctx.fits.borrow_mut().insert(key, r);
        r
    }
}
