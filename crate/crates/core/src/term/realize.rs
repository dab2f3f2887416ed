//! Placement of terms on the rational line.
//!
//! Every node of positive extent fills its host interval exactly: its least
//! point sits on the lower end and its greatest on the upper end. Gaps come
//! from base-3 subdivision, so all coordinates inside `[0, 1]` are triadic.

use std::collections::HashMap;

use num::{One, Zero};

use super::{OrderTerm, Rat, Site, Step};
use crate::error::{Error, Result};
use crate::qo::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub coord: Rat,
    pub label: Label,
    pub site: Site,
}

fn third(lo: &Rat, hi: &Rat) -> Rat {
    (hi - lo) / Rat::from_integer(3.into())
}

fn pow3(n: usize) -> Rat {
    Rat::from_integer(num::pow(num::BigInt::from(3), n))
}

/// Host handed to a child: degenerate for atoms.
fn fit(child: &OrderTerm, lo: Rat, hi: Rat, atom_at_hi: bool) -> (Rat, Rat) {
    if matches!(child, OrderTerm::Atom(_)) {
        let x = if atom_at_hi { hi } else { lo };
        (x.clone(), x)
    } else {
        (lo, hi)
    }
}

fn sum_part_host(parts: &[OrderTerm], i: usize, mut lo: Rat, hi: Rat) -> (Rat, Rat) {
    for (k, part) in parts.iter().enumerate() {
        let last = k + 1 == parts.len();
        if last {
            return fit(part, lo, hi, true);
        }
        let w = third(&lo, &hi);
        if k == i {
            return fit(part, lo.clone(), &lo + &w, false);
        }
        lo = &lo + &w + &w;
    }
    unreachable!("part index in range")
}

/// Center coordinate and the left and right regions of an omega-sum.
fn omega_regions(
    o: &super::OmegaSum,
    lo: &Rat,
    hi: &Rat,
) -> (Rat, (Rat, Rat), (Rat, Rat)) {
    match (&o.left, &o.right) {
        (Some(_), None) => (hi.clone(), (lo.clone(), hi.clone()), (hi.clone(), hi.clone())),
        (None, _) => (lo.clone(), (lo.clone(), lo.clone()), (lo.clone(), hi.clone())),
        (Some(_), Some(_)) => {
            let c = lo + third(lo, hi);
            (c.clone(), (lo.clone(), c.clone()), (c, hi.clone()))
        }
    }
}

fn left_block_host(entry: &OrderTerm, n: usize, lo: &Rat, c: &Rat) -> (Rat, Rat) {
    let w = c - lo;
    let t = c - &w / pow3(n);
    let end = &t + &w / pow3(n + 1);
    fit(entry, t, end, false)
}

fn right_block_host(entry: &OrderTerm, n: usize, c: &Rat, hi: &Rat) -> (Rat, Rat) {
    let w = hi - c;
    let s = c + &w / pow3(n);
    let start = &s - &w / pow3(n + 1);
    fit(entry, start, s, true)
}

fn atom_coord(lo: &Rat, hi: &Rat) -> Rat {
    if lo == hi {
        lo.clone()
    } else {
        lo + third(lo, hi)
    }
}

/// Child reached by one step, with its host interval.
fn step_into<'a>(node: &'a OrderTerm, lo: Rat, hi: Rat, step: &Step) -> Option<(&'a OrderTerm, Rat, Rat)> {
    Some(match (node, step) {
        (OrderTerm::Sum(parts), Step::Part(i)) if *i < parts.len() => {
            let (a, b) = sum_part_host(parts, *i, lo, hi);
            (&parts[*i], a, b)
        }
        (OrderTerm::Omega(o), Step::Left(n)) => {
            let e = o.left.as_ref()?.get(*n);
            let (c, (l0, _), _) = omega_regions(o, &lo, &hi);
            let (a, b) = left_block_host(e, *n, &l0, &c);
            (e, a, b)
        }
        (OrderTerm::Omega(o), Step::Right(n)) => {
            let e = o.right.as_ref()?.get(*n);
            let (c, _, (_, r1)) = omega_regions(o, &lo, &hi);
            let (a, b) = right_block_host(e, *n, &c, &r1);
            (e, a, b)
        }
        _ => return None,
    })
}

/// Node reached by `path` together with its host interval.
pub fn point_extent<'a>(
    term: &'a OrderTerm,
    lo: &Rat,
    hi: &Rat,
    path: &[Step],
) -> Option<(&'a OrderTerm, Rat, Rat)> {
    let (mut node, mut lo, mut hi) = (term, lo.clone(), hi.clone());
    for step in path {
        (node, lo, hi) = step_into(node, lo, hi, step)?;
    }
    Some((node, lo, hi))
}

fn split_site(site: &Site) -> (&[Step], Option<&Step>) {
    let steps = site.steps();
    match steps.last() {
        Some(Step::Center) | Some(Step::At(_)) => (&steps[..steps.len() - 1], steps.last()),
        _ => (steps, None),
    }
}

fn leaf_coordinate(node: &OrderTerm, a: &Rat, b: &Rat, last: Option<&Step>) -> Option<Rat> {
    match (node, last) {
        (OrderTerm::Atom(_), None) => Some(atom_coord(a, b)),
        (OrderTerm::Omega(o), Some(Step::Center)) => Some(omega_regions(o, a, b).0),
        (OrderTerm::Interval(_), Some(Step::At(t))) if *t >= Rat::zero() && *t <= Rat::one() => Some(a + (b - a) * t),
        _ => None,
    }
}

/// Coordinate of the point at `site` when `term` is realized in `[lo, hi]`.
pub fn coordinate(term: &OrderTerm, lo: &Rat, hi: &Rat, site: &Site) -> Option<Rat> {
    let (body, last) = split_site(site);
    let (node, a, b) = point_extent(term, lo, hi, body)?;
    leaf_coordinate(node, &a, &b, last)
}

/// `coordinate` in `[0,1]` with host intervals memoized per path prefix, for
/// callers that look up many nearby sites of the same terms.
#[derive(Default)]
pub(crate) struct CoordCache<'a> {
    extents: HashMap<(*const OrderTerm, Vec<Step>), (&'a OrderTerm, Rat, Rat)>,
}

impl<'a> CoordCache<'a> {
    fn extent(&mut self, term: &'a OrderTerm, path: &[Step]) -> Option<(&'a OrderTerm, Rat, Rat)> {
        let Some((step, parent)) = path.split_last() else {
            return Some((term, Rat::zero(), Rat::one()));
        };
        let key = (term as *const OrderTerm, path.to_vec());
        if let Some(e) = self.extents.get(&key) {
            return Some(e.clone());
        }
        let (node, lo, hi) = self.extent(term, parent)?;
        let e = step_into(node, lo, hi, step)?;
        self.extents.insert(key, e.clone());
        Some(e)
    }

    pub fn coordinate(&mut self, term: &'a OrderTerm, site: &Site) -> Option<Rat> {
        let (body, last) = split_site(site);
        let (node, a, b) = self.extent(term, body)?;
        leaf_coordinate(node, &a, &b, last)
    }
}

/// Sample points of `term` in term order, unrolling every omega-sequence to
/// `depth` blocks per side.
pub fn realize_points(term: &OrderTerm, lo: &Rat, hi: &Rat, depth: usize) -> Result<Vec<Point>> {
    term.validated()?;
    if lo >= hi {
        return Err(Error::Input("host interval must satisfy lo < hi".into()));
    }
    let mut out = Vec::new();
    emit(term, lo.clone(), hi.clone(), &mut Vec::new(), depth, &mut out);
    Ok(out)
}

fn emit(node: &OrderTerm, lo: Rat, hi: Rat, path: &mut Vec<Step>, d: usize, out: &mut Vec<Point>) {
    match node {
        OrderTerm::Empty => {}
        OrderTerm::Atom(l) => {
            out.push(Point { coord: atom_coord(&lo, &hi), label: *l, site: Site(path.clone()) })
        }
        OrderTerm::Interval(e) => {
            let half = Rat::new(1.into(), 2.into());
            for (t, l) in [(Rat::zero(), e.lo), (half, e.inner), (Rat::one(), e.hi)] {
                path.push(Step::At(t.clone()));
                out.push(Point { coord: &lo + (&hi - &lo) * &t, label: l, site: Site(path.clone()) });
                path.pop();
            }
        }
        OrderTerm::Sum(parts) => {
            for i in 0..parts.len() {
                let (a, b) = sum_part_host(parts, i, lo.clone(), hi.clone());
                path.push(Step::Part(i));
                emit(&parts[i], a, b, path, d, out);
                path.pop();
            }
        }
        OrderTerm::Omega(o) => {
            let (c, (l0, _), (_, r1)) = omega_regions(o, &lo, &hi);
            if let Some(s) = &o.left {
                for n in 0..d {
                    let (a, b) = left_block_host(s.get(n), n, &l0, &c);
                    path.push(Step::Left(n));
                    emit(s.get(n), a, b, path, d, out);
                    path.pop();
                }
            }
            path.push(Step::Center);
            out.push(Point { coord: c.clone(), label: o.center, site: Site(path.clone()) });
            path.pop();
            if let Some(s) = &o.right {
                for n in (0..d).rev() {
                    let (a, b) = right_block_host(s.get(n), n, &c, &r1);
                    path.push(Step::Right(n));
                    emit(s.get(n), a, b, path, d, out);
                    path.pop();
                }
            }
        }
    }
}
