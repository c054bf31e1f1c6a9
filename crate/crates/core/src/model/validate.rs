use std::collections::BTreeMap;

use num_traits::{One, Zero};

use serde::Serialize;

use super::{Arrow, Bounds, Coords, ModelKind, Morphism, Obj, Rel3, Shape};
use crate::error::{Error, Result};
use crate::multiset::Point;
use crate::semiring::{RatPos, Semiring};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub valid: bool,
    /// Set when part of the verdict rests on sampled witnesses only.
    pub sound_only: bool,
    pub detail: Option<String>,
}

impl Validity {
    fn ok() -> Validity {
        Validity { valid: true, sound_only: false, detail: None }
    }

    fn fail(detail: String) -> Validity {
        Validity { valid: false, sound_only: false, detail: Some(detail) }
    }
}

fn clique_violation<'a, I>(dom: &Obj, cod: &Obj, entries: I) -> Option<String>
where
    I: Iterator<Item = (&'a Point, &'a Point)>,
{
    let list: Vec<_> = entries.collect();
    for (i, (p, q)) in list.iter().enumerate() {
        for (p2, q2) in &list[i..] {
            if !Rel3::lin(dom.rel(p, p2), cod.rel(q, q2)).coh() {
                return Some(format!("({p}, {q}) and ({p2}, {q2}) are incoherent"));
            }
        }
    }
    None
}

/// Clique check for the coherence models, witness check for PCOH.
pub fn validate<S: Semiring>(f: &Morphism<S>) -> Validity {
    match f.model() {
        ModelKind::Wcs | ModelKind::Coh | ModelKind::Nucs => {
            match clique_violation(f.dom(), f.cod(), f.entries().map(|(p, q, _)| (p, q))) {
                None => Validity::ok(),
                Some(d) => Validity::fail(d),
            }
        }
        ModelKind::Pcoh => pcoh_validate(f),
        _ => Validity::ok(),
    }
}

pub fn validate_arrow<S: Semiring>(f: &Arrow<S>, b: &Bounds) -> Validity {
    validate(&f.materialize(b))
}

/// Partial Σ of a finite family with common dom and cod.
pub fn partial_sum<S: Semiring>(fs: &[Morphism<S>]) -> Result<Morphism<S>> {
    let first = fs.first().ok_or_else(|| Error::Arity("empty sum".into()))?;
    for f in fs {
        if f.dom() != first.dom() || f.cod() != first.cod() || f.bounds() != first.bounds() {
            return Err(Error::ObjectMismatch {
                expected: format!("{} -> {}", first.dom(), first.cod()),
                found: format!("{} -> {}", f.dom(), f.cod()),
            });
        }
    }
    let total = fs[1..].iter().fold(first.clone(), |acc, f| acc.add_unchecked(f));
    let (dom, cod) = (first.dom(), first.cod());
    match first.model() {
        ModelKind::Rel | ModelKind::Wrel(_) => Ok(total),
        ModelKind::Wcs => match validate(&total).detail {
            None => Ok(total),
            Some(d) => Err(Error::NotSummable(d)),
        },
        ModelKind::Coh | ModelKind::Nucs => {
            let strict_cross = first.model() == ModelKind::Nucs;
            for (i, f) in fs.iter().enumerate() {
                for g in &fs[i + 1..] {
                    for (p, q, _) in f.entries() {
                        for (p2, q2, _) in g.entries() {
                            let r = Rel3::lin(dom.rel(p, p2), cod.rel(q, q2));
                            let bad = if strict_cross { r != Rel3::Scoh } else { p == p2 && q == q2 };
                            if bad {
                                return Err(Error::NotSummable(format!(
                                    "({p}, {q}) and ({p2}, {q2}) from distinct summands"
                                )));
                            }
                        }
                    }
                }
            }
            match validate(&total).detail {
                None => Ok(total),
                Some(d) => Err(Error::NotSummable(d)),
            }
        }
        ModelKind::Pcoh => {
            let v = validate(&total);
            if v.valid {
                Ok(total)
            } else {
                Err(Error::NotSummable(v.detail.unwrap_or_default()))
            }
        }
    }
}

// ---------------------------------------------------------------- PCOH

/// Three-valued membership in `P(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

fn mass(v: &Coords) -> RatPos {
    RatPos::sum_iter(v.values().cloned())
}

fn restrict_tag(v: &Coords, i: usize) -> Coords {
    v.iter()
        .filter_map(|(p, c)| match p.as_tag() {
            Some((j, a)) if j == i => Some((a.clone(), c.clone())),
            _ => None,
        })
        .collect()
}

fn below(v: &Coords, w: &Coords) -> bool {
    v.iter().all(|(p, c)| w.get(p).is_some_and(|d| c <= d))
}

/// Decides `v ∈ P(X)` for base, unit, degree, `&` and `⊕` shapes; other
/// shapes are accepted only when dominated by a listed witness.
pub fn pcoh_member(x: &Obj, v: &Coords, b: &Bounds) -> Membership {
    let one = RatPos::one();
    let decide = |ok: bool| if ok { Membership::Yes } else { Membership::No };
    match x.shape() {
        Shape::Base(_) => decide(mass(v) <= one),
        Shape::Unit | Shape::Degrees => decide(v.values().all(|c| c <= &one)),
        Shape::With(xs) => {
            let verdicts: Vec<Membership> = xs
                .iter()
                .enumerate()
                .map(|(i, xi)| pcoh_member(xi, &restrict_tag(v, i), b))
                .collect();
            if verdicts.contains(&Membership::No) {
                Membership::No
            } else if verdicts.contains(&Membership::Unknown) {
                Membership::Unknown
            } else {
                Membership::Yes
            }
        }
        Shape::Plus(xs) if xs.iter().all(|xi| matches!(xi.shape(), Shape::Base(_) | Shape::Unit)) => {
            let total = RatPos::sum_iter((0..xs.len()).map(|i| mass(&restrict_tag(v, i))));
            decide(total <= one)
        }
        _ => {
            if pcoh_witnesses(x, b).iter().any(|w| below(v, w)) {
                Membership::Yes
            } else {
                Membership::Unknown
            }
        }
    }
}

/// Witness vectors known to lie in `P(X)`, built from base witnesses.
pub fn pcoh_witnesses(x: &Obj, b: &Bounds) -> Vec<Coords> {
    let one = RatPos::one();
    match x.shape() {
        Shape::Base(base) => {
            let mut ws = base.witnesses.clone();
            for a in &base.web {
                ws.push(BTreeMap::from([(a.clone(), one.clone())]));
            }
            ws
        }
        Shape::Unit => vec![BTreeMap::from([(Point::Unit, one)])],
        Shape::Degrees => vec![x.web(b).iter().map(|p| (p.clone(), one.clone())).collect()],
        Shape::Tensor(l, r) => {
            let (wl, wr) = (pcoh_witnesses(l, b), pcoh_witnesses(r, b));
            let mut out = Vec::new();
            for u in &wl {
                for v in &wr {
                    let mut t = Coords::new();
                    for (p, c) in u {
                        for (q, d) in v {
                            t.insert(Point::pair(p.clone(), q.clone()), c.clone() * d.clone());
                        }
                    }
                    out.push(t);
                }
            }
            out
        }
        Shape::With(xs) => {
            let per: Vec<Vec<Coords>> = xs.iter().map(|xi| pcoh_witnesses(xi, b)).collect();
            let tag = |i: usize, w: &Coords| -> Coords {
                w.iter().map(|(p, c)| (Point::tag(i, p.clone()), c.clone())).collect()
            };
            let mut out = Vec::new();
            for (i, ws) in per.iter().enumerate() {
                out.extend(ws.iter().map(|w| tag(i, w)));
            }
            let mut joint = Coords::new();
            for (i, ws) in per.iter().enumerate() {
                if let Some(w) = ws.first() {
                    joint.extend(tag(i, w));
                }
            }
            out.push(joint);
            out
        }
        Shape::Plus(xs) => xs
            .iter()
            .enumerate()
            .flat_map(|(i, xi)| {
                pcoh_witnesses(xi, b)
                    .into_iter()
                    .map(move |w| w.into_iter().map(|(p, c)| (Point::tag(i, p), c)).collect())
                    .collect::<Vec<Coords>>()
            })
            .collect(),
        Shape::Bang(inner) => pcoh_witnesses(inner, b)
            .iter()
            .map(|w| promotion(w, &x.web(b)))
            .collect(),
        _ => Vec::new(),
    }
}

/// `x^m` for every bag `m` of the given `!`-web.
pub fn promotion(x: &Coords, bang_web: &[Point]) -> Coords {
    let mut out = Coords::new();
    for p in bang_web {
        let m = p.as_bag().expect("bag point");
        let mut c = RatPos::one();
        for (a, k) in m.iter() {
            let xa = x.get(a).cloned().unwrap_or_else(RatPos::zero);
            c = c * xa.pow(k);
        }
        if !c.is_zero() {
            out.insert(p.clone(), c);
        }
    }
    out
}

/// Applies a matrix to a vector: `(f·x)_b = Σ_a x_a f_{a,b}`.
pub fn apply<S: Semiring>(f: &Morphism<S>, x: &Coords) -> Coords {
    let mut out = Coords::new();
    for (a, xa) in x {
        for (q, c) in f.row(a) {
            let v = xa.clone() * c.to_ratpos();
            let e = out.entry(q).or_insert_with(RatPos::zero);
            *e = e.clone() + v;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn pcoh_validate<S: Semiring>(f: &Morphism<S>) -> Validity {
    let b = f.bounds();
    let mut sound_only = false;
    for x in pcoh_witnesses(f.dom(), &b) {
        let y = apply(f, &x);
        match pcoh_member(f.cod(), &y, &b) {
            Membership::Yes => {}
            Membership::No => {
                let coord = y.iter().max_by(|l, r| l.1.cmp(r.1)).map(|(p, c)| format!("{p} = {c}"));
                return Validity::fail(format!(
                    "image of a witness leaves the codomain bound at {}",
                    coord.unwrap_or_default()
                ));
            }
            Membership::Unknown => sound_only = true,
        }
    }
    Validity { valid: true, sound_only, detail: None }
}
