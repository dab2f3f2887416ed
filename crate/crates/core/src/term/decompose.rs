use super::{OmegaSum, OrderTerm};
use crate::embed::embed;
use crate::error::{Error, Result};
use crate::qo::{OmegaSeq, QuasiOrder};

/// On each present side every prefix entry embeds into some cycle entry.
pub fn is_unbounded_sum(term: &OrderTerm, q: &QuasiOrder) -> Result<bool> {
    let OrderTerm::Omega(o) = term else {
        return Err(Error::Input("not an omega-sum".into()));
    };
    term.validated()?;
    term.check_labels(q)?;
    for seq in o.left.iter().chain(o.right.iter()) {
        for p in &seq.prefix {
            if !dominated(p, &seq.cycle, q)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn dominated(x: &OrderTerm, cycle: &[OrderTerm], q: &QuasiOrder) -> Result<bool> {
    for c in cycle {
        if embed(x, c, q)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Splits a scattered term into a finite sum of unbounded sums over points.
pub fn decompose_c_prime(term: &OrderTerm, q: &QuasiOrder) -> Result<Vec<OrderTerm>> {
    term.validated()?;
    term.check_labels(q)?;
    if !term.is_scattered() {
        return Err(Error::NotScattered);
    }
    if term.is_empty() {
        return Ok(vec![OrderTerm::Empty]);
    }
    let mut out = Vec::new();
    split(term, q, &mut out)?;
    Ok(out)
}

fn split(term: &OrderTerm, q: &QuasiOrder, out: &mut Vec<OrderTerm>) -> Result<()> {
    match term {
        OrderTerm::Empty | OrderTerm::Interval(_) => unreachable!("checked by caller"),
        OrderTerm::Atom(_) => out.push(term.clone()),
        OrderTerm::Sum(parts) => {
            for p in parts {
                split(p, q, out)?;
            }
        }
        OrderTerm::Omega(o) => split_omega(o, q, out)?,
    }
    Ok(())
}

fn split_omega(o: &OmegaSum, q: &QuasiOrder, out: &mut Vec<OrderTerm>) -> Result<()> {
    // Parts of one entry come out in increasing order; right blocks run from
    // the outside in, so there each entry's parts are reversed.
    let side = |seq: Option<&OmegaSeq<OrderTerm>>,
                right: bool|
     -> Result<(Vec<OrderTerm>, Option<OmegaSeq<OrderTerm>>)> {
        let Some(seq) = seq else { return Ok((Vec::new(), None)) };
        let blocks = |entries: &[OrderTerm]| -> Result<Vec<OrderTerm>> {
            let mut out = Vec::new();
            for e in entries {
                let mut parts = Vec::new();
                split(e, q, &mut parts)?;
                if right {
                    parts.reverse();
                }
                out.extend(parts);
            }
            Ok(out)
        };
        let mut prefix = blocks(&seq.prefix)?;
        let cycle = blocks(&seq.cycle)?;
        let mut k = 0;
        for (i, p) in prefix.iter().enumerate() {
            if !dominated(p, &cycle, q)? {
                k = i + 1;
            }
        }
        let rest = prefix.split_off(k);
        Ok((prefix, Some(OmegaSeq { prefix: rest, cycle })))
    };
    let (outer_left, left) = side(o.left.as_ref(), false)?;
    let (outer_right, right) = side(o.right.as_ref(), true)?;
    out.extend(outer_left);
    out.push(OrderTerm::omega(left, o.center, right));
    out.extend(outer_right.into_iter().rev());
    Ok(())
}

/// The finite sum of `parts`.
pub fn reassemble(parts: &[OrderTerm]) -> OrderTerm {
    OrderTerm::sum(parts.to_vec())
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

    #[test]
    fn unboundedness() {
        let q = QuasiOrder::unlabeled();
        assert!(is_unbounded_sum(&w1(), &q).unwrap());
        let t = OrderTerm::omega(Some(OmegaSeq::new(vec![w1()], vec![pt()]).unwrap()), P, None);
        assert!(!is_unbounded_sum(&t, &q).unwrap());
        let t = OrderTerm::omega(Some(OmegaSeq::new(vec![pt()], vec![w1()]).unwrap()), P, None);
        assert!(is_unbounded_sum(&t, &q).unwrap());
        assert!(is_unbounded_sum(&pt(), &q).is_err());
    }

    #[test]
    fn decompose_examples() {
        let q = QuasiOrder::unlabeled();
        assert_eq!(decompose_c_prime(&w1(), &q).unwrap(), vec![w1()]);
        let t = OrderTerm::omega(Some(OmegaSeq::new(vec![w1()], vec![pt()]).unwrap()), P, None);
        assert_eq!(decompose_c_prime(&t, &q).unwrap(), vec![w1(), w1()]);
        let t = OrderTerm::sum(vec![pt(), pt()]);
        assert_eq!(decompose_c_prime(&t, &q).unwrap(), vec![pt(), pt()]);
    }

    #[test]
    fn right_side_keeps_order() {
        let q = QuasiOrder::unlabeled();
        let outer = OrderTerm::sum(vec![pt(), w1()]);
        let t = OrderTerm::omega(None, P, Some(OmegaSeq::new(vec![outer], vec![pt()]).unwrap()));
        // the point is dominated by the cycle and stays inside
        let down = OrderTerm::omega(None, P, Some(OmegaSeq::new(vec![pt()], vec![pt()]).unwrap()));
        assert_eq!(decompose_c_prime(&t, &q).unwrap(), vec![down, w1()]);
        // a split cycle entry becomes two blocks, greater part outermost
        let t = OrderTerm::omega(None, P, Some(OmegaSeq::cyclic(vec![OrderTerm::sum(vec![pt(), w1()])])));
        let parts = decompose_c_prime(&t, &q).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(embed(&parts[0], &t, &q).unwrap() && embed(&t, &parts[0], &q).unwrap());
    }
}
