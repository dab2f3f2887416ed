use super::*;
use crate::qo::Label;

const P: Label = Label(0);

fn pt() -> OrderTerm {
    OrderTerm::Atom(P)
}

#[test]
fn smoke() {
    let q = QuasiOrder::unlabeled();
    let w1 = OrderTerm::omega_left(vec![pt()], P);
    assert!(embed(&pt(), &w1, &q).unwrap());
    assert!(!embed(&w1, &pt(), &q).unwrap());
}
