//! Finite quasi-orders and the order combinators built on them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element in a [`QuasiOrder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label(pub u32);

impl Label {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite quasi-order. The relation is closed under reflexivity and
/// transitivity on construction. Element 0 is the default label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiOrder {
    names: Vec<String>,
    leq: Vec<bool>,
}

impl QuasiOrder {
    /// Builds the reflexive-transitive closure of `pairs` over `names`.
    pub fn new<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Input("quasi-order needs at least one element".into()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Input(format!("duplicate element `{a}`")));
            }
        }
        let n = names.len();
        let mut q = QuasiOrder { names, leq: vec![false; n * n] };
        for i in 0..n {
            q.leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let a = q.label(a.as_ref())?;
            let b = q.label(b.as_ref())?;
            q.leq[a.index() * n + b.index()] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if q.leq[i * n + k] {
                    for j in 0..n {
                        if q.leq[k * n + j] {
                            q.leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Ok(q)
    }

    /// One-element order named `p`; the setting for unlabeled terms.
    pub fn unlabeled() -> Self {
        Self::single("p")
    }

    pub fn single(name: &str) -> Self {
        QuasiOrder { names: vec![name.to_string()], leq: vec![true] }
    }

    /// The chain `names[0] < names[1] < ...`.
    pub fn chain<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> =
            names.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Self::new(&names, &pairs)
    }

    pub fn antichain<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Self::new::<&str>(&names, &[])
    }

    /// The two-element chain `0 < 1` used for pinned Goedel sets.
    pub fn two_chain() -> Self {
        Self::chain(&["0", "1"]).expect("static chain")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn default_label(&self) -> Label {
        Label(0)
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.names.len() as u32).map(Label)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, name: &str) -> Result<Label> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Label(i as u32))
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn name(&self, l: Label) -> &str {
        &self.names[l.index()]
    }

    pub fn contains(&self, l: Label) -> bool {
        l.index() < self.names.len()
    }

    pub fn check(&self, l: Label) -> Result<()> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(format!("#{}", l.0)))
        }
    }

    /// The stored relation. Labels must belong to this order.
    pub fn leq(&self, a: Label, b: Label) -> bool {
        self.leq[a.index() * self.names.len() + b.index()]
    }

    pub fn equiv(&self, a: Label, b: Label) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    pub fn strict(&self, a: Label, b: Label) -> bool {
        self.leq(a, b) && !self.leq(b, a)
    }

    /// Pairs `a <= b` with `a != b`, in index order.
    pub fn relation_pairs(&self) -> Vec<(Label, Label)> {
        let mut out = Vec::new();
        for a in self.labels() {
            for b in self.labels() {
                if a != b && self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

impl fmt::Display for QuasiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qo {{ elements: [{}]; leq: [", self.names.join(","))?;
        let pairs: Vec<String> = self
            .relation_pairs()
            .into_iter()
            .map(|(a, b)| format!("{}<={}", self.name(a), self.name(b)))
            .collect();
        write!(f, "{}] }}", pairs.join(","))
    }
}

/// `leq` on element names.
pub fn qo_leq(q: &QuasiOrder, a: &str, b: &str) -> Result<bool> {
    Ok(q.leq(q.label(a)?, q.label(b)?))
}

pub fn qo_equiv(q: &QuasiOrder, a: &str, b: &str) -> Result<bool> {
    Ok(q.equiv(q.label(a)?, q.label(b)?))
}

pub fn qo_strict(q: &QuasiOrder, a: &str, b: &str) -> Result<bool> {
    Ok(q.strict(q.label(a)?, q.label(b)?))
}

/// Coordinatewise order on `Q1 x Q2`.
pub fn product_leq(
    q1: &QuasiOrder,
    q2: &QuasiOrder,
    p: (Label, Label),
    r: (Label, Label),
) -> Result<bool> {
    q1.check(p.0)?;
    q1.check(r.0)?;
    q2.check(p.1)?;
    q2.check(r.1)?;
    Ok(q1.leq(p.0, r.0) && q2.leq(p.1, r.1))
}

/// Finite-sequence order: some strictly increasing `h` with `s[i] <= t[h(i)]`.
pub fn higman_leq(q: &QuasiOrder, s: &[Label], t: &[Label]) -> Result<bool> {
    for &l in s.iter().chain(t) {
        q.check(l)?;
    }
    Ok(higman_by(s, t, |a, b| q.leq(*a, *b)))
}

/// Greedy earliest match under an arbitrary base relation.
pub fn higman_by<S, T>(s: &[S], t: &[T], mut base: impl FnMut(&S, &T) -> bool) -> bool {
    let mut j = 0;
    for x in s {
        loop {
            if j >= t.len() {
                return false;
            }
            j += 1;
            if base(x, &t[j - 1]) {
                break;
            }
        }
    }
    true
}

/// An eventually periodic omega-sequence: `prefix` followed by `cycle` repeated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OmegaSeq<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T> OmegaSeq<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Input("omega-sequence cycle is empty".into()));
        }
        Ok(OmegaSeq { prefix, cycle })
    }

    pub fn cyclic(cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "omega-sequence cycle is empty");
        OmegaSeq { prefix: Vec::new(), cycle }
    }

    /// Entry `n` of the denoted sequence.
    pub fn get(&self, n: usize) -> &T {
        &self.cycle_or_prefix(self.normalize(n))
    }

    fn cycle_or_prefix(&self, k: usize) -> &T {
        if k < self.prefix.len() {
            &self.prefix[k]
        } else {
            &self.cycle[k - self.prefix.len()]
        }
    }

    /// Collapses `n` to a representative in `0..prefix.len() + cycle.len()`.
    pub fn normalize(&self, n: usize) -> usize {
        let p = self.prefix.len();
        if n < p {
            n
        } else {
            p + (n - p) % self.cycle.len()
        }
    }

    /// Number of distinct positions: prefix plus one cycle.
    pub fn period_span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.prefix.iter().chain(self.cycle.iter())
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> OmegaSeq<U> {
        OmegaSeq {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }
}

impl<T: Clone> OmegaSeq<T> {
    /// The same sequence starting at entry `n`.
    pub fn skip(&self, n: usize) -> OmegaSeq<T> {
        let p = self.prefix.len();
        if n <= p {
            OmegaSeq { prefix: self.prefix[n..].to_vec(), cycle: self.cycle.clone() }
        } else {
            let r = (n - p) % self.cycle.len();
            let mut cycle = self.cycle[r..].to_vec();
            cycle.extend_from_slice(&self.cycle[..r]);
            OmegaSeq { prefix: Vec::new(), cycle }
        }
    }

    /// Equal sequence whose prefix holds at least `n` entries.
    pub fn unroll(&self, n: usize) -> OmegaSeq<T> {
        let mut prefix = self.prefix.clone();
        while prefix.len() < n {
            prefix.push(self.get(prefix.len()).clone());
        }
        let rest = self.skip(prefix.len());
        OmegaSeq { prefix, cycle: rest.cycle }
    }
}

/// Order on omega-sequences over `Q`.
pub fn omega_seq_leq(q: &QuasiOrder, s: &OmegaSeq<Label>, t: &OmegaSeq<Label>) -> Result<bool> {
    for &l in s.entries().chain(t.entries()) {
        q.check(l)?;
    }
    Ok(omega_seq_by(s, t, |a, b| q.leq(*a, *b)))
}

/// Greedy earliest match between eventually periodic sequences.
///
/// The base relation is queried at most once per pair of normalized positions.
pub fn omega_seq_by<S, T>(
    s: &OmegaSeq<S>,
    t: &OmegaSeq<T>,
    mut base: impl FnMut(&S, &T) -> bool,
) -> bool {
    let mut cache: HashMap<(usize, usize), bool> = HashMap::new();
    let mut rel = |i: usize, j: usize| -> bool {
        *cache.entry((i, j)).or_insert_with(|| base(s.get(i), t.get(j)))
    };
    let ps = s.prefix.len();
    let window = t.prefix.len() + t.cycle.len();
    let mut seen = std::collections::HashSet::new();
    let mut next = 0usize;
    let mut i = 0usize;
    loop {
        let si = s.normalize(i);
        let found = (next..next.max(t.prefix.len()) + window).find(|&j| rel(si, t.normalize(j)));
        let Some(j) = found else { return false };
        if i >= ps && !seen.insert((si, t.normalize(j))) {
            return true;
        }
        next = j + 1;
        i += 1;
    }
}

/// A finite subset of the naturals, kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FinSubset(Vec<u64>);

impl FinSubset {
    pub fn new(items: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FinSubset(v)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn is_subset(&self, other: &FinSubset) -> bool {
        self.0.iter().all(|x| other.0.binary_search(x).is_ok())
    }
}

/// `b1 ◁ b2`: there are `i_1 < ... < i_m` with `b1 = {i_1..i_k}` and
/// `b2 = {i_2..i_m}` for some `1 <= k < m`.
pub fn barrier_precedes(b1: &FinSubset, b2: &FinSubset) -> Result<bool> {
    let (x, y) = (b1.as_slice(), b2.as_slice());
    if x.is_empty() || y.is_empty() {
        return Err(Error::Input("barrier elements must be nonempty".into()));
    }
    let k = x.len();
    // y must be x without its minimum, followed by at least one larger element.
    Ok(y.len() >= k && y[..k - 1] == x[1..] && y[k - 1] > x[k - 1])
}

/// No member of `family` is a subset of another member.
pub fn inclusion_antichain(family: &[FinSubset]) -> bool {
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            if i != j && a.is_subset(b) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> Label {
        Label(i)
    }

    #[test]
    fn closure_is_transitive() {
        let q = QuasiOrder::new(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(q.leq(l(0), l(2)));
        assert!(!q.leq(l(2), l(0)));
        assert!(q.strict(l(0), l(1)));
    }

    #[test]
    fn named_queries() {
        let q = QuasiOrder::two_chain();
        assert!(qo_leq(&q, "0", "1").unwrap());
        assert!(!qo_leq(&q, "1", "0").unwrap());
        assert!(qo_leq(&q, "1", "1").unwrap());
        assert!(matches!(qo_leq(&q, "0", "2"), Err(Error::UnknownLabel(_))));
        let a = QuasiOrder::antichain(&["p", "q"]).unwrap();
        assert!(!qo_leq(&a, "p", "q").unwrap() && !qo_leq(&a, "q", "p").unwrap());
        assert!(!qo_equiv(&a, "p", "q").unwrap());
        assert!(qo_strict(&q, "0", "1").unwrap());
    }

    #[test]
    fn product() {
        let q = QuasiOrder::two_chain();
        assert!(product_leq(&q, &q, (l(0), l(0)), (l(1), l(1))).unwrap());
        assert!(!product_leq(&q, &q, (l(0), l(1)), (l(1), l(0))).unwrap());
        assert!(product_leq(&q, &q, (l(1), l(1)), (l(1), l(1))).unwrap());
        assert!(product_leq(&q, &q, (l(2), l(1)), (l(1), l(1))).is_err());
    }

    #[test]
    fn higman_examples() {
        let q = QuasiOrder::two_chain();
        assert!(higman_leq(&q, &[], &[l(0)]).unwrap());
        assert!(!higman_leq(&q, &[l(0), l(0)], &[l(0)]).unwrap());
        assert!(higman_leq(&q, &[l(1), l(0)], &[l(0), l(1), l(0)]).unwrap());
    }

    #[test]
    fn omega_examples() {
        let q = QuasiOrder::two_chain();
        let s = OmegaSeq::cyclic(vec![l(0)]);
        assert!(omega_seq_leq(&q, &s, &s).unwrap());
        assert!(omega_seq_leq(&q, &s, &OmegaSeq::cyclic(vec![l(1)])).unwrap());
        assert!(!omega_seq_leq(&q, &OmegaSeq::cyclic(vec![l(1)]), &s).unwrap());
        let s = OmegaSeq::new(vec![l(1)], vec![l(0)]).unwrap();
        assert!(!omega_seq_leq(&q, &s, &OmegaSeq::cyclic(vec![l(0)])).unwrap());
    }

    #[test]
    fn seq_helpers() {
        let s = OmegaSeq::new(vec![10, 11], vec![1, 2, 3]).unwrap();
        let got: Vec<i32> = (0..9).map(|n| *s.get(n)).collect();
        assert_eq!(got, vec![10, 11, 1, 2, 3, 1, 2, 3, 1]);
        let k = s.skip(3);
        let got: Vec<i32> = (0..4).map(|n| *k.get(n)).collect();
        assert_eq!(got, vec![2, 3, 1, 2]);
        let u = s.unroll(4);
        assert_eq!(u.prefix, vec![10, 11, 1, 2]);
        assert_eq!(u.cycle, vec![3, 1, 2]);
        assert!(OmegaSeq::<i32>::new(vec![], vec![]).is_err());
    }

    #[test]
    fn barrier_examples() {
        let b = |v: &[u64]| FinSubset::new(v.iter().copied());
        assert!(barrier_precedes(&b(&[1]), &b(&[2])).unwrap());
        assert!(barrier_precedes(&b(&[1, 3]), &b(&[3, 5, 7])).unwrap());
        assert!(!barrier_precedes(&b(&[1, 3]), &b(&[2, 5])).unwrap());
        assert!(!barrier_precedes(&b(&[1, 3]), &b(&[3])).unwrap());
        assert!(barrier_precedes(&b(&[]), &b(&[1])).is_err());
    }

    #[test]
    fn antichain_examples() {
        let b = |v: &[u64]| FinSubset::new(v.iter().copied());
        assert!(inclusion_antichain(&[b(&[1]), b(&[2]), b(&[3])]));
        assert!(!inclusion_antichain(&[b(&[1]), b(&[1, 2])]));
        assert!(inclusion_antichain(&[]));
    }

    #[test]
    fn display_literal() {
        let q = QuasiOrder::two_chain();
        assert_eq!(q.to_string(), "qo { elements: [0,1]; leq: [0<=1] }");
    }
}
