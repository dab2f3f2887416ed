//! Terms for labeled countable closed linear orders.

mod decompose;
mod rank;
mod realize;

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, One, Zero};

use crate::qo::{Label, OmegaSeq, QuasiOrder};

pub use decompose::{decompose_c_prime, is_unbounded_sum, reassemble};
pub use rank::{cb_derivative, cb_rank, cb_rank_iterated, rk_prime, syntactic_rank};
pub use realize::{coordinate, point_extent, realize_points, Point};
pub(crate) use realize::CoordCache;

pub type Rat = BigRational;

/// Labels on a perfect interval: its two endpoints and everything between.
///
/// Terms written in the text grammar always carry one label; endpoint labels
/// only differ after relabeling, as in pinned Goedel sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ends {
    pub lo: Label,
    pub inner: Label,
    pub hi: Label,
}

impl Ends {
    pub fn uniform(l: Label) -> Self {
        Ends { lo: l, inner: l, hi: l }
    }

    pub fn is_uniform(&self) -> bool {
        self.lo == self.inner && self.hi == self.inner
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderTerm {
    Empty,
    Atom(Label),
    Interval(Ends),
    Sum(Vec<OrderTerm>),
    Omega(Box<OmegaSum>),
}

/// `L_0 + L_1 + ... + p + ... + ^1L + ^0L`. Right entry 0 is outermost.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaSum {
    pub left: Option<OmegaSeq<OrderTerm>>,
    pub center: Label,
    pub right: Option<OmegaSeq<OrderTerm>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl OmegaSum {
    pub fn side(&self, side: Side) -> Option<&OmegaSeq<OrderTerm>> {
        match side {
            Side::Left => self.left.as_ref(),
            Side::Right => self.right.as_ref(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &OrderTerm> {
        self.left.iter().chain(self.right.iter()).flat_map(|s| s.entries())
    }

    pub fn cycle_entries(&self) -> impl Iterator<Item = &OrderTerm> {
        self.left.iter().chain(self.right.iter()).flat_map(|s| s.cycle.iter())
    }
}

impl OrderTerm {
    pub fn atom(l: Label) -> Self {
        OrderTerm::Atom(l)
    }

    pub fn interval(l: Label) -> Self {
        OrderTerm::Interval(Ends::uniform(l))
    }

    /// Finite sum with nested sums flattened and empty parts dropped.
    pub fn sum(parts: Vec<OrderTerm>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                OrderTerm::Empty => {}
                OrderTerm::Sum(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => OrderTerm::Empty,
            1 => flat.pop().unwrap(),
            _ => OrderTerm::Sum(flat),
        }
    }

    pub fn omega(
        left: Option<OmegaSeq<OrderTerm>>,
        center: Label,
        right: Option<OmegaSeq<OrderTerm>>,
    ) -> Self {
        OrderTerm::Omega(Box::new(OmegaSum { left, center, right }))
    }

    /// `w([|x];p;_)`: the order type of `x·ω + 1` when `x` is a point.
    pub fn omega_left(cycle: Vec<OrderTerm>, center: Label) -> Self {
        Self::omega(Some(OmegaSeq::cyclic(cycle)), center, None)
    }

    pub fn omega_right(cycle: Vec<OrderTerm>, center: Label) -> Self {
        Self::omega(None, center, Some(OmegaSeq::cyclic(cycle)))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, OrderTerm::Empty)
    }

    /// Node count. An omega-sum counts itself and its center point.
    pub fn size(&self) -> usize {
        match self {
            OrderTerm::Empty | OrderTerm::Atom(_) | OrderTerm::Interval(_) => 1,
            OrderTerm::Sum(parts) => 1 + parts.iter().map(|p| p.size()).sum::<usize>(),
            OrderTerm::Omega(o) => 2 + o.entries().map(|e| e.size()).sum::<usize>(),
        }
    }

    pub fn is_scattered(&self) -> bool {
        match self {
            OrderTerm::Empty | OrderTerm::Atom(_) => true,
            OrderTerm::Interval(_) => false,
            OrderTerm::Sum(parts) => parts.iter().all(|p| p.is_scattered()),
            OrderTerm::Omega(o) => o.entries().all(|e| e.is_scattered()),
        }
    }

    /// Every label occurring anywhere in the term.
    pub fn labels(&self, out: &mut Vec<Label>) {
        match self {
            OrderTerm::Empty => {}
            OrderTerm::Atom(l) => out.push(*l),
            OrderTerm::Interval(e) => out.extend([e.lo, e.inner, e.hi]),
            OrderTerm::Sum(parts) => parts.iter().for_each(|p| p.labels(out)),
            OrderTerm::Omega(o) => {
                out.push(o.center);
                o.entries().for_each(|e| e.labels(out));
            }
        }
    }

    pub fn label_set(&self) -> Vec<Label> {
        let mut v = Vec::new();
        self.labels(&mut v);
        v.sort();
        v.dedup();
        v
    }

    pub fn check_labels(&self, q: &QuasiOrder) -> crate::Result<()> {
        self.label_set().into_iter().try_for_each(|l| q.check(l))
    }

    pub fn map_labels(&self, f: &impl Fn(Label) -> Label) -> OrderTerm {
        match self {
            OrderTerm::Empty => OrderTerm::Empty,
            OrderTerm::Atom(l) => OrderTerm::Atom(f(*l)),
            OrderTerm::Interval(e) => {
                OrderTerm::Interval(Ends { lo: f(e.lo), inner: f(e.inner), hi: f(e.hi) })
            }
            OrderTerm::Sum(parts) => OrderTerm::Sum(parts.iter().map(|p| p.map_labels(f)).collect()),
            OrderTerm::Omega(o) => OrderTerm::omega(
                o.left.as_ref().map(|s| s.map(|e| e.map_labels(f))),
                f(o.center),
                o.right.as_ref().map(|s| s.map(|e| e.map_labels(f))),
            ),
        }
    }

    /// Structural violations, each tagged with the node path.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        self.validate_at(&mut Vec::new(), true, &mut out);
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn validated(&self) -> crate::Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(v))
        }
    }

    fn validate_at(&self, path: &mut Vec<Step>, top: bool, out: &mut Vec<Violation>) {
        fn push(out: &mut Vec<Violation>, rule: Rule, path: &[Step]) {
            out.push(Violation { path: Site(path.to_vec()), rule })
        }
        match self {
            OrderTerm::Empty => {
                if !top {
                    push(out, Rule::EmptyNested, path);
                }
            }
            OrderTerm::Atom(_) | OrderTerm::Interval(_) => {}
            OrderTerm::Sum(parts) => {
                if parts.len() < 2 {
                    push(out, Rule::ShortSum, path);
                }
                for (i, p) in parts.iter().enumerate() {
                    path.push(Step::Part(i));
                    match p {
                        OrderTerm::Empty => push(out, Rule::EmptyPart, path),
                        OrderTerm::Sum(_) => push(out, Rule::NestedSum, path),
                        _ => {}
                    }
                    if !p.is_empty() {
                        p.validate_at(path, false, out);
                    }
                    path.pop();
                }
            }
            OrderTerm::Omega(o) => {
                if o.left.is_none() && o.right.is_none() {
                    push(out, Rule::BothSidesEmpty, path);
                }
                for side in [Side::Left, Side::Right] {
                    let Some(seq) = o.side(side) else { continue };
                    if seq.cycle.is_empty() {
                        push(out, Rule::EmptyCycle, path);
                    }
                    for k in 0..seq.prefix.len() + seq.cycle.len() {
                        path.push(Step::block(side, k));
                        let e = if k < seq.prefix.len() {
                            &seq.prefix[k]
                        } else {
                            &seq.cycle[k - seq.prefix.len()]
                        };
                        if e.is_empty() {
                            push(out, Rule::EmptyEntry, path);
                        } else {
                            e.validate_at(path, false, out);
                        }
                        path.pop();
                    }
                }
            }
        }
    }

    /// Follows `path` through parts and blocks down to a node.
    pub fn node_at(&self, path: &[Step]) -> Option<&OrderTerm> {
        let Some((first, rest)) = path.split_first() else { return Some(self) };
        match (self, first) {
            (OrderTerm::Sum(parts), Step::Part(i)) => parts.get(*i)?.node_at(rest),
            (OrderTerm::Omega(o), Step::Left(n)) => o.left.as_ref()?.get(*n).node_at(rest),
            (OrderTerm::Omega(o), Step::Right(n)) => o.right.as_ref()?.get(*n).node_at(rest),
            _ => None,
        }
    }

    /// The point addressed by `site`, if it names one.
    pub fn point_at(&self, site: &Site) -> Option<PointKind<'_>> {
        self.point_at_steps(&site.0)
    }

    fn point_at_steps(&self, path: &[Step]) -> Option<PointKind<'_>> {
        match (self, path) {
            (OrderTerm::Atom(l), []) => Some(PointKind::Atom(*l)),
            (OrderTerm::Interval(e), [Step::At(t)]) => {
                if t.is_zero() {
                    Some(PointKind::IntervalLo(*e))
                } else if t.is_one() {
                    Some(PointKind::IntervalHi(*e))
                } else if *t > Rat::zero() && *t < Rat::one() {
                    Some(PointKind::IntervalInner(*e))
                } else {
                    None
                }
            }
            (OrderTerm::Omega(o), [Step::Center]) => Some(PointKind::Center(o)),
            (_, [first, rest @ ..]) => {
                let child = self.node_at(std::slice::from_ref(first))?;
                child.point_at_steps(rest)
            }
            _ => None,
        }
    }

    pub fn label_at(&self, site: &Site) -> Option<Label> {
        self.point_at(site).map(|p| p.label())
    }

    /// Path to the least point; `None` for `Empty`.
    pub fn min_path(&self) -> Option<Vec<Step>> {
        let mut out = Vec::new();
        let mut node = self;
        loop {
            match node {
                OrderTerm::Empty => return None,
                OrderTerm::Atom(_) => return Some(out),
                OrderTerm::Interval(_) => {
                    out.push(Step::At(Rat::zero()));
                    return Some(out);
                }
                OrderTerm::Sum(parts) => {
                    out.push(Step::Part(0));
                    node = &parts[0];
                }
                OrderTerm::Omega(o) => match &o.left {
                    Some(s) => {
                        out.push(Step::Left(0));
                        node = s.get(0);
                    }
                    None => {
                        out.push(Step::Center);
                        return Some(out);
                    }
                },
            }
        }
    }

    /// Path to the greatest point; `None` for `Empty`.
    pub fn max_path(&self) -> Option<Vec<Step>> {
        let mut out = Vec::new();
        let mut node = self;
        loop {
            match node {
                OrderTerm::Empty => return None,
                OrderTerm::Atom(_) => return Some(out),
                OrderTerm::Interval(_) => {
                    out.push(Step::At(Rat::one()));
                    return Some(out);
                }
                OrderTerm::Sum(parts) => {
                    out.push(Step::Part(parts.len() - 1));
                    node = parts.last().unwrap();
                }
                OrderTerm::Omega(o) => match &o.right {
                    Some(s) => {
                        out.push(Step::Right(0));
                        node = s.get(0);
                    }
                    None => {
                        out.push(Step::Center);
                        return Some(out);
                    }
                },
            }
        }
    }
}

/// What sits at a point site.
#[derive(Debug, Clone, Copy)]
pub enum PointKind<'a> {
    Atom(Label),
    Center(&'a OmegaSum),
    IntervalLo(Ends),
    IntervalInner(Ends),
    IntervalHi(Ends),
}

impl PointKind<'_> {
    pub fn label(&self) -> Label {
        match self {
            PointKind::Atom(l) => *l,
            PointKind::Center(o) => o.center,
            PointKind::IntervalLo(e) => e.lo,
            PointKind::IntervalInner(e) => e.inner,
            PointKind::IntervalHi(e) => e.hi,
        }
    }
}

/// One step of a path into a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    Part(usize),
    Left(usize),
    Right(usize),
    Center,
    /// Relative coordinate inside an interval leaf.
    At(Rat),
}

impl Step {
    pub fn block(side: Side, n: usize) -> Step {
        match side {
            Side::Left => Step::Left(n),
            Side::Right => Step::Right(n),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Step::Part(_) => 0,
            Step::Left(_) => 1,
            Step::Center => 2,
            Step::Right(_) => 3,
            Step::At(_) => 4,
        }
    }
}

impl Ord for Step {
    /// Order of the positions the steps lead to. Right blocks run toward the
    /// center, so a larger right index is further left.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Step::Part(a), Step::Part(b)) | (Step::Left(a), Step::Left(b)) => a.cmp(b),
            (Step::Right(a), Step::Right(b)) => b.cmp(a),
            (Step::At(a), Step::At(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Step {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Part(i) => write!(f, "part({i})"),
            Step::Left(n) => write!(f, "left({n})"),
            Step::Right(n) => write!(f, "right({n})"),
            Step::Center => write!(f, "center"),
            Step::At(t) => write!(f, "at({t})"),
        }
    }
}

/// Address of a point (or node) inside a term. Sites compare in term order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Site(pub Vec<Step>);

impl Site {
    pub fn root() -> Self {
        Site(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn child(&self, s: Step) -> Site {
        let mut v = self.0.clone();
        v.push(s);
        Site(v)
    }

    pub fn join(&self, rest: &[Step]) -> Site {
        let mut v = self.0.clone();
        v.extend_from_slice(rest);
        Site(v)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for s in &self.0 {
            write!(f, "/{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    BothSidesEmpty,
    EmptyPart,
    EmptyEntry,
    EmptyCycle,
    EmptyNested,
    ShortSum,
    NestedSum,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::BothSidesEmpty => "both sides empty",
            Rule::EmptyPart => "empty part in finite sum",
            Rule::EmptyEntry => "empty sequence entry",
            Rule::EmptyCycle => "empty cycle",
            Rule::EmptyNested => "empty term below the root",
            Rule::ShortSum => "finite sum with fewer than two parts",
            Rule::NestedSum => "unflattened nested finite sum",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Site,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.rule, self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: Label = Label(0);

    fn pt() -> OrderTerm {
        OrderTerm::Atom(P)
    }

    #[test]
    fn validation_rules() {
        assert!(pt().is_valid());
        let bad = OrderTerm::omega(None, P, None);
        assert_eq!(bad.validate()[0].rule, Rule::BothSidesEmpty);
        let bad = OrderTerm::Sum(vec![pt(), OrderTerm::Empty]);
        assert_eq!(bad.validate()[0].rule, Rule::EmptyPart);
        let bad = OrderTerm::omega_left(vec![OrderTerm::Empty], P);
        assert_eq!(bad.validate()[0].rule, Rule::EmptyEntry);
        assert_eq!(bad.validate()[0].path, Site(vec![Step::Left(0)]));
    }

    #[test]
    fn sum_flattens() {
        let s = OrderTerm::sum(vec![OrderTerm::sum(vec![pt(), pt()]), pt(), OrderTerm::Empty]);
        assert_eq!(s, OrderTerm::Sum(vec![pt(), pt(), pt()]));
        assert_eq!(OrderTerm::sum(vec![pt()]), pt());
    }

    #[test]
    fn sizes() {
        assert_eq!(pt().size(), 1);
        assert_eq!(OrderTerm::omega_left(vec![pt()], P).size(), 3);
        assert_eq!(OrderTerm::sum(vec![pt(), pt()]).size(), 3);
    }

    #[test]
    fn step_order() {
        let mut v = vec![Step::Right(0), Step::Center, Step::Right(3), Step::Left(2), Step::Left(0)];
        v.sort();
        assert_eq!(v, vec![Step::Left(0), Step::Left(2), Step::Center, Step::Right(3), Step::Right(0)]);
    }

    #[test]
    fn extreme_paths() {
        let t = OrderTerm::omega_left(vec![pt()], P);
        assert_eq!(t.min_path().unwrap(), vec![Step::Left(0)]);
        assert_eq!(t.max_path().unwrap(), vec![Step::Center]);
        assert!(matches!(t.point_at(&Site(vec![Step::Left(7)])), Some(PointKind::Atom(_))));
        assert!(t.point_at(&Site(vec![Step::Right(0)])).is_none());
    }
}
