//! Strictly monotone continuous label-respecting embeddings between terms.

mod greedy;
mod oracle;
mod witness;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qo::{omega_seq_by, OmegaSeq, QuasiOrder};
use crate::term::{realize_points, CoordCache, OmegaSum, OrderTerm, PointKind, Rat, Side, Site, Step};

use greedy::{top_items, Ctx, Cut, Engine, Host};

pub use oracle::{skeleton_oracle, skeleton_oracle_bounded, ORACLE_BOUND};
pub use witness::{EmbeddingWitness, Rule, SideRule};

fn check_inputs(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder) -> Result<()> {
    l.validated()?;
    k.validated()?;
    l.check_labels(q)?;
    k.check_labels(q)
}

/// Whether `l` embeds into `k`.
pub fn embed(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder) -> Result<bool> {
    check_inputs(l, k, q)?;
    Ok(decide(l, k, q))
}

pub(crate) fn decide(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder) -> bool {
    if l.is_empty() {
        return true;
    }
    if k.is_empty() {
        return false;
    }
    let ctx = Ctx::new(q);
    let eng = Engine::new(&ctx, Host::Real(k));
    eng.greedy(&top_items(l), Cut::Start).is_some()
}

/// An embedding of `l` into `k`, if one exists.
pub fn embed_witness(l: &OrderTerm, k: &OrderTerm, q: &QuasiOrder) -> Result<Option<EmbeddingWitness>> {
    check_inputs(l, k, q)?;
    if !decide(l, k, q) {
        return Ok(None);
    }
    let ctx = Ctx::new(q);
    let eng = Engine::new(&ctx, Host::Real(k));
    Ok(Some(witness::Builder { eng: &eng, target: k }.build(l)))
}

/// Pointwise order on omega-sequences of terms, with `embed` as the base relation.
pub fn embed_seq(ls: &OmegaSeq<OrderTerm>, ks: &OmegaSeq<OrderTerm>, q: &QuasiOrder) -> Result<bool> {
    for t in ls.entries().chain(ks.entries()) {
        if t.is_empty() {
            return Err(Error::Input("empty sequence entry".into()));
        }
        t.validated()?;
        t.check_labels(q)?;
    }
    Ok(omega_seq_by(ls, ks, |a, b| decide(a, b, q)))
}

/// The identity map of `l`.
pub fn identity_witness(l: &OrderTerm) -> EmbeddingWitness {
    EmbeddingWitness { root: identity_rule(l, &mut Vec::new()) }
}

fn identity_rule(t: &OrderTerm, path: &mut Vec<Step>) -> Rule {
    match t {
        OrderTerm::Empty => Rule::Sum(Vec::new()),
        OrderTerm::Atom(_) => Rule::Point(Site(path.clone())),
        OrderTerm::Interval(_) => Rule::Affine { leaf: Site(path.clone()), lo: Rat::zero(), hi: Rat::one() },
        OrderTerm::Sum(parts) => Rule::Sum(
            parts
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    path.push(Step::Part(i));
                    let r = identity_rule(p, path);
                    path.pop();
                    r
                })
                .collect(),
        ),
        OrderTerm::Omega(o) => {
            let mut side = |side: Side| {
                o.side(side).map(|seq| {
                    let rule = |n: usize, path: &mut Vec<Step>| {
                        path.push(Step::block(side, n));
                        let r = identity_rule(seq.get(n), path);
                        path.pop();
                        r
                    };
                    let p = seq.prefix.len();
                    SideRule {
                        prefix: (0..p).map(|n| rule(n, path)).collect(),
                        anchor: Site(path.clone()),
                        side,
                        base: p,
                        stride: seq.cycle.len(),
                        cycle: (p..p + seq.cycle.len()).map(|n| rule(n, path)).collect(),
                    }
                })
            };
            let left = side(Side::Left);
            let right = side(Side::Right);
            let mut c = path.clone();
            c.push(Step::Center);
            Rule::Omega { center: Site(c), left, right }
        }
    }
}

/// Checks `w` on realized samples of `l`: strict monotonicity, label
/// domination, and convergence of block images toward center images.
/// Samples are taken at `depth` and `depth + 2`.
pub fn check_witness(
    l: &OrderTerm,
    k: &OrderTerm,
    w: &EmbeddingWitness,
    q: &QuasiOrder,
    depth: usize,
) -> Result<bool> {
    check_witness_depths(l, k, w, q, &[depth])
}

/// `check_witness` at every depth in `depths`, realizing each sample depth once.
pub fn check_witness_depths(
    l: &OrderTerm,
    k: &OrderTerm,
    w: &EmbeddingWitness,
    q: &QuasiOrder,
    depths: &[usize],
) -> Result<bool> {
    check_inputs(l, k, q)?;
    if l.is_empty() {
        return Ok(true);
    }
    let mut samples: Vec<usize> = depths.iter().flat_map(|&d| [d, d + 2]).collect();
    samples.sort_unstable();
    samples.dedup();
    let mut im = Imager { l, k, w, src: CoordCache::default(), dst: CoordCache::default() };
    let (zero, one) = (Rat::zero(), Rat::one());
    for d in samples {
        let pts = realize_points(l, &zero, &one, d)?;
        let mut prev: Option<Rat> = None;
        for p in &pts {
            let (t, c) = im.image(&p.site)?;
            let kind = k.point_at(&t).ok_or_else(|| Error::Structural(format!("dangling target site {t}")))?;
            if !q.leq(p.label, kind.label()) {
                return Ok(false);
            }
            if prev.as_ref().is_some_and(|pc| *pc >= c) {
                return Ok(false);
            }
            if let Some(Step::Center) = p.site.steps().last() {
                let node = &p.site.steps()[..p.site.steps().len() - 1];
                let Some(OrderTerm::Omega(o)) = l.node_at(node) else {
                    return Err(Error::Structural("center outside an omega-sum".into()));
                };
                let (has_l, has_r) = (o.left.is_some(), o.right.is_some());
                let limit_ok = match kind {
                    PointKind::Center(n) => (!has_l || n.left.is_some()) && (!has_r || n.right.is_some()),
                    PointKind::IntervalInner(_) => true,
                    PointKind::IntervalLo(_) => !has_l,
                    PointKind::IntervalHi(_) => !has_r,
                    PointKind::Atom(_) => false,
                };
                if !limit_ok {
                    return Ok(false);
                }
                if depths.contains(&d) && !im.converges(o, node, &c, d)? {
                    return Ok(false);
                }
            }
            prev = Some(c);
        }
    }
    Ok(true)
}

/// Images of source sites with coordinates in the target, memoized.
struct Imager<'a> {
    l: &'a OrderTerm,
    k: &'a OrderTerm,
    w: &'a EmbeddingWitness,
    src: CoordCache<'a>,
    dst: CoordCache<'a>,
}

impl<'a> Imager<'a> {
    fn image(&mut self, s: &Site) -> Result<(Site, Rat)> {
        let t = self
            .w
            .apply_in(self.l, s, &mut self.src)
            .ok_or_else(|| Error::Structural(format!("no rule covers source site {s}")))?;
        let c = self.dst.coordinate(self.k, &t).ok_or_else(|| Error::Structural(format!("dangling target site {t}")))?;
        Ok((t, c))
    }

    /// Images of the block copies `depth` and `depth + 2` next to the center
    /// approach the center's image at least geometrically.
    fn converges(&mut self, o: &OmegaSum, node: &[Step], center: &Rat, depth: usize) -> Result<bool> {
        for side in [Side::Left, Side::Right] {
            let Some(seq) = o.side(side) else { continue };
            let mut gap = |copy: usize| -> Result<Rat> {
                let n = seq.prefix.len() + copy * seq.cycle.len();
                let e = seq.get(n);
                let rest = match side {
                    Side::Left => e.min_path(),
                    Side::Right => e.max_path(),
                }
                .expect("nonempty entry");
                let mut s = node.to_vec();
                s.push(Step::block(side, n));
                s.extend(rest);
                Ok((self.image(&Site(s))?.1 - center).abs())
            };
            let (a, b) = (gap(depth)?, gap(depth + 2)?);
            if a.is_zero() || b.clone() + &b > a {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests;
