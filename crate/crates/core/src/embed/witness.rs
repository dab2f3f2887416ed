//! Finite descriptions of embeddings and their construction.

use num::{One, Zero};
use serde_json::{json, Value};

use super::greedy::{seq_items, top_items, Cut, Engine, Item, OmegaQuery, Query};
use crate::qo::OmegaSeq;
use crate::term::{coordinate, CoordCache, OmegaSum, OrderTerm, Rat, Side, Site, Step};

/// How one source node is mapped. Target sites inside a [`SideRule`] cycle
/// describe the first copy; later copies shift the anchor's block index.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// An atom onto a point.
    Point(Site),
    /// An interval onto `[lo, hi]` (relative coordinates) of a target interval.
    Affine { leaf: Site, lo: Rat, hi: Rat },
    /// Part-wise, for finite sums.
    Sum(Vec<Rule>),
    /// Center onto `center`, blocks into blocks.
    Omega { center: Site, left: Option<SideRule>, right: Option<SideRule> },
    /// Prefixes part-wise, everything else affinely into one interval. `src`
    /// is measured in the source node's own realization in `[0, 1]`.
    Squeeze {
        leaf: Site,
        left_prefix: Vec<Rule>,
        right_prefix: Vec<Rule>,
        src: (Rat, Rat),
        dst: (Rat, Rat),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideRule {
    pub prefix: Vec<Rule>,
    /// Target omega-sum whose blocks carry the cycle copies.
    pub anchor: Site,
    pub side: Side,
    pub base: usize,
    /// Target blocks per source cycle copy.
    pub stride: usize,
    pub cycle: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingWitness {
    pub root: Rule,
}

impl EmbeddingWitness {
    /// Target site of the source point at `site`.
    pub fn apply(&self, source: &OrderTerm, site: &Site) -> Option<Site> {
        self.root.apply(source, site.steps())
    }

    pub(crate) fn apply_in<'a>(&self, source: &'a OrderTerm, site: &Site, cache: &mut CoordCache<'a>) -> Option<Site> {
        self.root.apply_in(source, site.steps(), cache)
    }

    /// Flat listing: one entry per rule node.
    pub fn entries(&self) -> Value {
        let mut out = Vec::new();
        self.root.entries(&mut Vec::new(), &mut out);
        Value::Array(out)
    }
}

fn affine(x: &Rat, src: &(Rat, Rat), dst: &(Rat, Rat)) -> Rat {
    &dst.0 + (x - &src.0) / (&src.1 - &src.0) * (&dst.1 - &dst.0)
}

impl Rule {
    pub fn apply(&self, node: &OrderTerm, rel: &[Step]) -> Option<Site> {
        self.apply_in(node, rel, &mut CoordCache::default())
    }

    fn apply_in<'a>(&self, node: &'a OrderTerm, rel: &[Step], cache: &mut CoordCache<'a>) -> Option<Site> {
        match (self, node) {
            (Rule::Point(t), OrderTerm::Atom(_)) if rel.is_empty() => Some(t.clone()),
            (Rule::Affine { leaf, lo, hi }, OrderTerm::Interval(_)) => match rel {
                [Step::At(t)] => Some(leaf.child(Step::At(lo + (hi - lo) * t))),
                _ => None,
            },
            (Rule::Sum(rules), OrderTerm::Sum(parts)) => match rel {
                [Step::Part(i), rest @ ..] => rules.get(*i)?.apply_in(parts.get(*i)?, rest, cache),
                _ => None,
            },
            (Rule::Omega { center, left, right }, OrderTerm::Omega(o)) => match rel {
                [Step::Center] => Some(center.clone()),
                [Step::Left(n), rest @ ..] => left.as_ref()?.apply_in(o.left.as_ref()?, *n, rest, cache),
                [Step::Right(n), rest @ ..] => right.as_ref()?.apply_in(o.right.as_ref()?, *n, rest, cache),
                _ => None,
            },
            (Rule::Squeeze { leaf, left_prefix, right_prefix, src, dst }, OrderTerm::Omega(o)) => {
                match rel {
                    [Step::Left(n), rest @ ..] if *n < left_prefix.len() => {
                        left_prefix[*n].apply_in(o.left.as_ref()?.get(*n), rest, cache)
                    }
                    [Step::Right(n), rest @ ..] if *n < right_prefix.len() => {
                        right_prefix[*n].apply_in(o.right.as_ref()?.get(*n), rest, cache)
                    }
                    _ => {
                        let x = cache.coordinate(node, &Site(rel.to_vec()))?;
                        Some(leaf.child(Step::At(affine(&x, src, dst))))
                    }
                }
            }
            _ => None,
        }
    }

    fn entries(&self, src: &mut Vec<Step>, out: &mut Vec<Value>) {
        let site = |s: &[Step]| Site(s.to_vec()).to_string();
        match self {
            Rule::Point(t) => out.push(json!({"source_site": site(src), "rule": "point", "target_site": t.to_string()})),
            Rule::Affine { leaf, lo, hi } => out.push(json!({
                "source_site": site(src),
                "rule": format!("affine [0,1] -> [{lo},{hi}]"),
                "target_site": leaf.to_string(),
            })),
            Rule::Sum(rules) => {
                for (i, r) in rules.iter().enumerate() {
                    src.push(Step::Part(i));
                    r.entries(src, out);
                    src.pop();
                }
            }
            Rule::Omega { center, left, right } => {
                src.push(Step::Center);
                out.push(json!({"source_site": site(src), "rule": "center", "target_site": center.to_string()}));
                src.pop();
                for side in [left, right].into_iter().flatten() {
                    let block = |n| Step::block(side.side, n);
                    for (i, r) in side.prefix.iter().enumerate() {
                        src.push(block(i));
                        r.entries(src, out);
                        src.pop();
                    }
                    let p = side.prefix.len();
                    src.push(block(p));
                    out.push(json!({
                        "source_site": site(src),
                        "rule": "tail",
                        "target_site": side.anchor.child(block(side.base)).to_string(),
                        "cycle_stride": side.stride,
                    }));
                    src.pop();
                    for (j, r) in side.cycle.iter().enumerate() {
                        src.push(block(p + j));
                        r.entries(src, out);
                        src.pop();
                    }
                }
            }
            Rule::Squeeze { leaf, left_prefix, right_prefix, src: s, dst } => {
                for (side, rules) in [(Side::Left, left_prefix), (Side::Right, right_prefix)] {
                    for (i, r) in rules.iter().enumerate() {
                        src.push(Step::block(side, i));
                        r.entries(src, out);
                        src.pop();
                    }
                }
                out.push(json!({
                    "source_site": site(src),
                    "rule": format!("squeeze [{},{}] -> [{},{}]", s.0, s.1, dst.0, dst.1),
                    "target_site": leaf.to_string(),
                }));
            }
        }
    }
}

impl SideRule {
    fn apply_in<'a>(&self, seq: &'a OmegaSeq<OrderTerm>, n: usize, rest: &[Step], cache: &mut CoordCache<'a>) -> Option<Site> {
        if n < self.prefix.len() {
            return self.prefix[n].apply_in(seq.get(n), rest, cache);
        }
        let m = n - self.prefix.len();
        let (copy, e) = (m / self.cycle.len(), m % self.cycle.len());
        let mut site = self.cycle[e].apply_in(seq.get(n), rest, cache)?;
        let k = self.anchor.steps().len();
        let shift = copy * self.stride;
        match site.0.get_mut(k)? {
            Step::Left(b) | Step::Right(b) => *b += shift,
            _ => return None,
        }
        Some(site)
    }
}

/// Builds a witness from the placements of a successful embedding.
pub(crate) struct Builder<'c, 'e, 'a> {
    pub eng: &'e Engine<'c, 'a>,
    pub target: &'a OrderTerm,
}

fn strip_last(s: &Site) -> Site {
    Site(s.steps()[..s.steps().len() - 1].to_vec())
}

fn at_of(s: &Site) -> Option<&Rat> {
    match s.steps().last() {
        Some(Step::At(t)) => Some(t),
        _ => None,
    }
}

/// Relative coordinate of `s` when it lies in the interval leaf `leaf`.
fn t_in_leaf<'s>(s: &'s Site, leaf: &Site) -> Option<&'s Rat> {
    let n = leaf.steps().len();
    if s.steps().len() == n + 1 && s.steps()[..n] == *leaf.steps() {
        at_of(s)
    } else {
        None
    }
}

fn below(s: &Site, hi: Option<&Site>) -> bool {
    hi.map_or(true, |h| s < h)
}

fn regroup(entries: &[OrderTerm], items: &[Item<'_>], rules: Vec<Rule>) -> Vec<Rule> {
    let mut per: Vec<Vec<Rule>> = vec![Vec::new(); entries.len()];
    for (it, r) in items.iter().zip(rules) {
        per[it.entry].push(r);
    }
    per.into_iter()
        .zip(entries)
        .map(|(mut rs, e)| if matches!(e, OrderTerm::Sum(_)) { Rule::Sum(rs) } else { rs.pop().expect("one rule") })
        .collect()
}

impl<'c, 'e, 'a> Builder<'c, 'e, 'a> {
    pub fn build(&self, source: &'a OrderTerm) -> EmbeddingWitness {
        let items = top_items(source);
        let (rules, _) = self.list(&items, &Cut::Start, None);
        let root = match source {
            OrderTerm::Sum(_) | OrderTerm::Empty => Rule::Sum(rules),
            _ => rules.into_iter().next().expect("one item"),
        };
        EmbeddingWitness { root }
    }

    fn omega_at(&self, path: &Site) -> &'a OmegaSum {
        match self.target.node_at(path.steps()) {
            Some(OrderTerm::Omega(o)) => o,
            _ => panic!("no omega-sum at {path}"),
        }
    }

    fn block_site(&self, n: &Site, side: Side, idx: usize, max: bool) -> Site {
        let o = self.omega_at(n);
        let entry = o.side(side).expect("side present").get(idx);
        let rest = if max { entry.max_path() } else { entry.min_path() };
        n.child(Step::block(side, idx)).join(&rest.expect("nonempty entry"))
    }

    /// Concrete images for `items` strictly between `lo` and `hi`. Returns
    /// the rules and the least image point.
    fn list(&self, items: &[Item<'a>], lo: &Cut, hi: Option<&Site>) -> (Vec<Rule>, Option<Site>) {
        let mut cuts = vec![lo.clone()];
        for it in items {
            let s = self.eng.place(it.term, cuts.last().unwrap()).expect("placement exists");
            cuts.push(Cut::After(s));
        }
        if let Some(Cut::After(end)) = cuts.last() {
            assert!(below(end, hi), "placement overruns its region");
        }
        let mut rules = Vec::with_capacity(items.len());
        let mut bound = hi.cloned();
        for (i, it) in items.iter().enumerate().rev() {
            let (r, min) = self.item(it.term, &cuts[i], bound.as_ref());
            rules.push(r);
            bound = Some(min);
        }
        rules.reverse();
        let min = if items.is_empty() { None } else { bound };
        (rules, min)
    }

    fn item(&self, x: &'a OrderTerm, lo: &Cut, hi: Option<&Site>) -> (Rule, Site) {
        match x {
            OrderTerm::Atom(a) => {
                let p = self.point(lo, hi, &Query::Atom(*a));
                (Rule::Point(p.clone()), p)
            }
            OrderTerm::Interval(e) => self.interval(*e, lo, hi),
            OrderTerm::Omega(o) => self.omega(x, o, lo, hi),
            _ => unreachable!("items are flattened"),
        }
    }

    /// A deep right block of the omega-sum at `n` holding an acceptable
    /// position and satisfying `ok`; returns the cut just before it.
    fn deep_cut(&self, n: &Site, q: &Query<'a>, ok: &dyn Fn(&Site) -> bool) -> Cut {
        let o = self.omega_at(n);
        let seq = o.right.as_ref().expect("right side");
        let p = seq.prefix.len();
        for m in p..p + 64 * seq.cycle.len() + 64 {
            let c = Cut::After(self.block_site(n, Side::Right, m + 1, true));
            let block = n.child(Step::Right(m));
            let Some(h) = self.eng.scan(&c, q) else { continue };
            if h.site.steps().starts_with(block.steps()) && ok(&self.block_site(n, Side::Right, m, true)) {
                return c;
            }
        }
        panic!("no deep block found")
    }

    fn point(&self, lo: &Cut, hi: Option<&Site>, q: &Query<'a>) -> Site {
        let mut c = lo.clone();
        loop {
            let h = self.eng.scan(&c, q).expect("position exists");
            if h.attained {
                assert!(below(&h.site, hi));
                return h.site;
            }
            match h.site.steps().last() {
                Some(Step::At(t)) => {
                    let leaf = strip_last(&h.site);
                    let v = hi.and_then(|s| t_in_leaf(s, &leaf)).cloned().unwrap_or_else(Rat::one);
                    return leaf.child(Step::At(t + (&v - t) / Rat::from_integer(3.into())));
                }
                _ => {
                    let n = strip_last(&h.site);
                    c = self.deep_cut(&n, q, &|mx| below(mx, hi));
                }
            }
        }
    }

    fn interval(&self, e: crate::term::Ends, lo: &Cut, hi: Option<&Site>) -> (Rule, Site) {
        let q = Query::Interval(e);
        let mut c = lo.clone();
        loop {
            let h = self.eng.scan(&c, &q).expect("interval exists");
            if matches!(h.site.steps().last(), Some(Step::Center)) {
                let n = strip_last(&h.site);
                c = self.deep_cut(&n, &q, &|mx| below(mx, hi));
                continue;
            }
            let leaf = strip_last(&h.site);
            let OrderTerm::Interval(te) = self.target.node_at(leaf.steps()).expect("leaf") else {
                panic!("not an interval leaf")
            };
            let leq = |a, b| self.eng_leq(a, b);
            let u = match &c {
                Cut::After(s) => t_in_leaf(s, &leaf).cloned().unwrap_or_else(Rat::zero),
                Cut::Start => Rat::zero(),
            };
            let v = hi.and_then(|s| t_in_leaf(s, &leaf)).cloned().unwrap_or_else(Rat::one);
            let w = (&v - &u) / Rat::from_integer(3.into());
            let s0 = if leq(e.lo, te.inner) { &u + &w } else { Rat::zero() };
            let e0 = if leq(e.hi, te.inner) { &u + &w + &w } else { Rat::one() };
            let min = leaf.child(Step::At(s0.clone()));
            return (Rule::Affine { leaf, lo: s0, hi: e0 }, min);
        }
    }

    fn eng_leq(&self, a: crate::qo::Label, b: crate::qo::Label) -> bool {
        self.eng.q().leq(a, b)
    }

    /// Concrete center image for `x` above `k`, leaving room for the right
    /// prefix below `hi`.
    fn center(&self, o: &'a OmegaSum, k: &Cut, hi: Option<&Site>) -> Site {
        let q = Query::Omega(OmegaQuery::new(o));
        let fits_below = |y: &Site| {
            self.eng.right_prefix_end(o, y).is_some_and(|r| below(&r, hi))
        };
        let mut c = k.clone();
        loop {
            let h = self.eng.scan(&c, &q).expect("center exists");
            if h.attained {
                return h.site;
            }
            match h.site.steps().last() {
                Some(Step::At(t)) => {
                    let leaf = strip_last(&h.site);
                    let v = hi.and_then(|s| t_in_leaf(s, &leaf)).cloned().unwrap_or_else(Rat::one);
                    let mut w = (&v - t) / Rat::from_integer(3.into());
                    for _ in 0..64 {
                        let y = leaf.child(Step::At(t + &w));
                        if fits_below(&y) {
                            return y;
                        }
                        w /= Rat::from_integer(3.into());
                    }
                    panic!("no interior center found");
                }
                _ => {
                    let n = strip_last(&h.site);
                    c = self.deep_cut(&n, &q, &fits_below);
                }
            }
        }
    }

    fn omega(&self, x: &'a OrderTerm, o: &'a OmegaSum, lo: &Cut, hi: Option<&Site>) -> (Rule, Site) {
        let k = self.eng.left_prefix_cut(o, lo).expect("left prefix fits");
        let y = self.center(o, &k, hi);
        let (rp_items, rc_items) = match &o.right {
            Some(s) => (seq_items(&s.prefix, Side::Right), seq_items(&s.cycle, Side::Right)),
            None => (Vec::new(), Vec::new()),
        };
        let (lp_items, lc_items) = match &o.left {
            Some(s) => (seq_items(&s.prefix, Side::Left), seq_items(&s.cycle, Side::Left)),
            None => (Vec::new(), Vec::new()),
        };
        let (rp_rules, rp_min) = self.list(&rp_items, &Cut::After(y.clone()), hi);
        let upper = rp_min.clone().or_else(|| hi.cloned());

        if let Some(Step::Center) = y.steps().last() {
            let n = strip_last(&y);
            let no = self.omega_at(&n);
            let right = o.right.as_ref().map(|s| {
                let j = self.eng.fits(o, Side::Right, no, Side::Right).expect("right cycle fits");
                let d = no.right.as_ref().unwrap();
                let (pn, cn) = (d.prefix.len(), d.cycle.len());
                let mut b = pn + cn;
                while !below(&self.block_site(&n, Side::Right, b, true), upper.as_ref()) {
                    b += cn;
                }
                let lo_g = Cut::After(self.block_site(&n, Side::Right, b + j * cn, true));
                let hi_g = self.block_site(&n, Side::Right, b - 1, false);
                let (rules, _) = self.list(&rc_items, &lo_g, Some(&hi_g));
                SideRule {
                    prefix: regroup(&s.prefix, &rp_items, rp_rules.clone()),
                    anchor: n.clone(),
                    side: Side::Right,
                    base: b,
                    stride: j * cn,
                    cycle: regroup(&s.cycle, &rc_items, rules),
                }
            });
            let mut min = y.clone();
            let left = o.left.as_ref().map(|s| {
                let j = self.eng.fits(o, Side::Left, no, Side::Left).expect("left cycle fits");
                let d = no.left.as_ref().unwrap();
                let (pn, cn) = (d.prefix.len(), d.cycle.len());
                let mut b = pn + cn;
                while let Cut::After(ks) = &k {
                    if self.block_site(&n, Side::Left, b, false) > *ks {
                        break;
                    }
                    b += cn;
                }
                let lo_g = Cut::After(self.block_site(&n, Side::Left, b - 1, true));
                let hi_g = self.block_site(&n, Side::Left, b + j * cn, false);
                let (crules, cmin) = self.list(&lc_items, &lo_g, Some(&hi_g));
                let first = self.block_site(&n, Side::Left, b, false);
                let (prules, pmin) = self.list(&lp_items, lo, Some(&first));
                min = pmin.or(cmin).expect("nonempty cycle");
                SideRule {
                    prefix: regroup(&s.prefix, &lp_items, prules),
                    anchor: n.clone(),
                    side: Side::Left,
                    base: b,
                    stride: j * cn,
                    cycle: regroup(&s.cycle, &lc_items, crules),
                }
            });
            return (Rule::Omega { center: y, left, right }, min);
        }

        // center inside an interval leaf
        let leaf = strip_last(&y);
        let ty = at_of(&y).expect("interval point").clone();
        let three = Rat::from_integer(3.into());
        let v = upper.as_ref().and_then(|s| t_in_leaf(s, &leaf)).cloned().unwrap_or_else(Rat::one);
        let u = match &k {
            Cut::After(s) => t_in_leaf(s, &leaf).cloned().unwrap_or_else(Rat::zero),
            Cut::Start => Rat::zero(),
        };
        let lo_t = if o.left.is_some() { &u + (&ty - &u) / &three } else { ty.clone() };
        let hi_t = if o.right.is_some() { &ty + (&v - &ty) / &three } else { ty.clone() };
        let tail_lo = leaf.child(Step::At(lo_t.clone()));
        let (lp_rules, lp_min) = self.list(&lp_items, lo, Some(&tail_lo));
        let (zero, one) = (Rat::zero(), Rat::one());
        let local = |s: Site| coordinate(x, &zero, &one, &s).expect("source site");
        let s_min = match &o.left {
            Some(s) => {
                let p = s.prefix.len();
                local(Site(vec![Step::Left(p)]).join(&s.get(p).min_path().unwrap()))
            }
            None => local(Site(vec![Step::Center])),
        };
        let s_max = match &o.right {
            Some(s) => {
                let p = s.prefix.len();
                local(Site(vec![Step::Right(p)]).join(&s.get(p).max_path().unwrap()))
            }
            None => local(Site(vec![Step::Center])),
        };
        let rule = Rule::Squeeze {
            leaf,
            left_prefix: o.left.as_ref().map_or(Vec::new(), |s| regroup(&s.prefix, &lp_items, lp_rules)),
            right_prefix: o.right.as_ref().map_or(Vec::new(), |s| regroup(&s.prefix, &rp_items, rp_rules)),
            src: (s_min, s_max),
            dst: (lo_t, hi_t),
        };
        (rule, lp_min.unwrap_or(tail_lo))
    }
}
