use super::{is_unbounded_sum, OmegaSum, OrderTerm};
use crate::error::{Error, Result};
use crate::qo::{OmegaSeq, QuasiOrder};

/// Upper bound on the hierarchy rank read off the term's shape.
pub fn syntactic_rank(term: &OrderTerm) -> Result<usize> {
    term.validated()?;
    srank(term)
}

fn srank(term: &OrderTerm) -> Result<usize> {
    Ok(match term {
        OrderTerm::Empty | OrderTerm::Atom(_) => 0,
        OrderTerm::Interval(_) => return Err(Error::NotScattered),
        OrderTerm::Sum(parts) => 1 + max_of(parts.iter(), srank)?,
        OrderTerm::Omega(o) => 1 + max_of(o.entries(), srank)?,
    })
}

fn max_of<'a>(
    it: impl Iterator<Item = &'a OrderTerm>,
    f: impl Fn(&OrderTerm) -> Result<usize>,
) -> Result<usize> {
    let mut m = 0;
    for t in it {
        m = m.max(f(t)?);
    }
    Ok(m)
}

/// Removes the isolated points.
pub fn cb_derivative(term: &OrderTerm) -> OrderTerm {
    match term {
        OrderTerm::Empty | OrderTerm::Atom(_) => OrderTerm::Empty,
        OrderTerm::Interval(_) => term.clone(),
        OrderTerm::Sum(parts) => OrderTerm::sum(parts.iter().map(cb_derivative).collect()),
        OrderTerm::Omega(o) => derive_omega(o),
    }
}

/// Derived side: either a live sequence or the finitely many survivors.
enum Derived {
    Live(OmegaSeq<OrderTerm>),
    Dead(Vec<OrderTerm>),
}

fn derive_side(seq: Option<&OmegaSeq<OrderTerm>>) -> Derived {
    let Some(seq) = seq else { return Derived::Dead(Vec::new()) };
    let keep = |v: &[OrderTerm]| -> Vec<OrderTerm> {
        v.iter().map(cb_derivative).filter(|t| !t.is_empty()).collect()
    };
    let prefix = keep(&seq.prefix);
    let cycle = keep(&seq.cycle);
    if cycle.is_empty() {
        Derived::Dead(prefix)
    } else {
        Derived::Live(OmegaSeq { prefix, cycle })
    }
}

fn derive_omega(o: &OmegaSum) -> OrderTerm {
    let left = derive_side(o.left.as_ref());
    let right = derive_side(o.right.as_ref());
    let mut parts = Vec::new();
    let (l, r) = match (left, right) {
        (Derived::Live(l), Derived::Live(r)) => return OrderTerm::omega(Some(l), o.center, Some(r)),
        (Derived::Live(l), Derived::Dead(r)) => {
            parts.push(OrderTerm::omega(Some(l), o.center, None));
            (Vec::new(), r)
        }
        (Derived::Dead(l), Derived::Live(r)) => {
            parts.extend(l);
            parts.push(OrderTerm::omega(None, o.center, Some(r)));
            (Vec::new(), Vec::new())
        }
        (Derived::Dead(l), Derived::Dead(r)) => {
            parts.extend(l);
            parts.push(OrderTerm::Atom(o.center));
            (Vec::new(), r)
        }
    };
    parts.extend(l);
    parts.extend(r.into_iter().rev());
    OrderTerm::sum(parts)
}

/// Cantor-Bendixson rank, computed from the term structure.
pub fn cb_rank(term: &OrderTerm) -> Result<usize> {
    term.validated()?;
    cb_struct(term)
}

fn cb_struct(term: &OrderTerm) -> Result<usize> {
    Ok(match term {
        OrderTerm::Empty | OrderTerm::Atom(_) => 0,
        OrderTerm::Interval(_) => return Err(Error::NotScattered),
        OrderTerm::Sum(parts) => max_of(parts.iter(), cb_struct)?,
        OrderTerm::Omega(o) => {
            let prefix = o.left.iter().chain(o.right.iter()).flat_map(|s| s.prefix.iter());
            max_of(prefix, cb_struct)?.max(1 + max_of(o.cycle_entries(), cb_struct)?)
        }
    })
}

fn is_finite(term: &OrderTerm) -> bool {
    match term {
        OrderTerm::Empty | OrderTerm::Atom(_) => true,
        OrderTerm::Sum(parts) => parts.iter().all(|p| matches!(p, OrderTerm::Atom(_))),
        _ => false,
    }
}

/// Cantor-Bendixson rank by counting derivatives until finitely many points remain.
pub fn cb_rank_iterated(term: &OrderTerm) -> Result<usize> {
    term.validated()?;
    if !term.is_scattered() {
        return Err(Error::NotScattered);
    }
    let mut t = term.clone();
    let mut n = 0;
    while !is_finite(&t) {
        t = cb_derivative(&t);
        n += 1;
    }
    Ok(n)
}

/// Rank within the hierarchy of unbounded sums over singletons.
pub fn rk_prime(term: &OrderTerm, q: &QuasiOrder) -> Result<usize> {
    term.validated()?;
    term.check_labels(q)?;
    rkp(term, q)
}

fn rkp(term: &OrderTerm, q: &QuasiOrder) -> Result<usize> {
    Ok(match term {
        OrderTerm::Empty | OrderTerm::Atom(_) => 0,
        OrderTerm::Interval(_) => return Err(Error::NotScattered),
        OrderTerm::Sum(_) => return Err(Error::NotCPrime("finite sum".into())),
        OrderTerm::Omega(o) => {
            if !is_unbounded_sum(term, q)? {
                return Err(Error::NotCPrime("bounded omega-sum".into()));
            }
            let mut m = 0;
            for e in o.entries() {
                m = m.max(rkp(e, q)?);
            }
            m + 1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qo::Label;

    const P: Label = Label(0);

    fn pt() -> OrderTerm {
        OrderTerm::Atom(P)
    }

    fn w1() -> OrderTerm {
        OrderTerm::omega_left(vec![pt()], P)
    }

    fn w2() -> OrderTerm {
        OrderTerm::omega_left(vec![w1()], P)
    }

    #[test]
    fn syntactic() {
        assert_eq!(syntactic_rank(&pt()).unwrap(), 0);
        assert_eq!(syntactic_rank(&w1()).unwrap(), 1);
        assert_eq!(syntactic_rank(&w2()).unwrap(), 2);
        assert_eq!(syntactic_rank(&OrderTerm::interval(P)), Err(Error::NotScattered));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(cb_derivative(&pt()), OrderTerm::Empty);
        assert_eq!(cb_derivative(&w1()), pt());
        assert_eq!(cb_derivative(&OrderTerm::interval(P)), OrderTerm::interval(P));
        assert_eq!(cb_derivative(&w2()), w1());
    }

    #[test]
    fn cb_examples() {
        let t = OrderTerm::omega(Some(OmegaSeq::new(vec![w2()], vec![pt()]).unwrap()), P, None);
        assert_eq!(cb_rank(&t).unwrap(), 2);
        assert_eq!(cb_rank_iterated(&t).unwrap(), 2);
        assert_eq!(cb_rank(&w1()).unwrap(), 1);
        assert_eq!(cb_rank(&OrderTerm::Empty).unwrap(), 0);
        assert_eq!(cb_rank(&OrderTerm::interval(P)), Err(Error::NotScattered));
    }

    #[test]
    fn one_sided_death() {
        // prefix survivors of a dying side become ordinary parts
        let t = OrderTerm::omega(
            Some(OmegaSeq::new(vec![w1()], vec![pt()]).unwrap()),
            P,
            Some(OmegaSeq::cyclic(vec![w1()])),
        );
        let d = cb_derivative(&t);
        assert_eq!(
            d,
            OrderTerm::sum(vec![pt(), OrderTerm::omega_right(vec![pt()], P)])
        );
    }
}
