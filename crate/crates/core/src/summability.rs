//! The summability functor `S X = D ⊸ X`, its bimonad structure, its
//! strengths and distributions, and witnesses of summable families.
//!
//! A point of `S X` is `(i, a)`, built with [`Point::graded`].

use crate::error::{Error, Result};
use crate::model::{add_into, partial_sum, Arrow, Grading, Morphism, Obj, Row, Trend};
use crate::multiset::Point;
use crate::semiring::Semiring;

fn graded(p: &Point) -> (usize, &Point) {
    p.as_graded().expect("S-point")
}

fn pair(p: &Point) -> (&Point, &Point) {
    p.as_pair().expect("pair point")
}

const DEG_UP: Grading = Grading { bag: Trend::Preserve, deg: Trend::Up };
const DEG_DOWN: Grading = Grading { bag: Trend::Preserve, deg: Trend::Down };

/// `S f`, `((i,a),(i,b)) ↦ f_{a,b}`.
pub fn s_map<S: Semiring>(f: &Arrow<S>) -> Arrow<S> {
    let g = f.clone();
    Arrow::new(Obj::s(f.dom()), Obj::s(f.cod()), &format!("S{}", f.name()), f.grading(), move |p| {
        let (i, a) = graded(p);
        g.row(a).into_iter().map(|(b, c)| (Point::graded(i, b), c)).collect()
    })
}

/// `π_i : S X → X`.
pub fn sproj<S: Semiring>(x: &Obj, i: usize) -> Arrow<S> {
    Arrow::function(Obj::s(x), x.clone(), &format!("π{i}"), DEG_DOWN, move |p| {
        let (j, a) = graded(p);
        (j == i).then(|| a.clone())
    })
}

/// `ι_i : X → S X`.
pub fn sinj<S: Semiring>(x: &Obj, i: usize) -> Arrow<S> {
    Arrow::function(x.clone(), Obj::s(x), &format!("ι{i}"), DEG_UP, move |a| {
        Some(Point::graded(i, a.clone()))
    })
}

/// `σ = Σ_i π_i : S X → X`.
pub fn sigma<S: Semiring>(x: &Obj) -> Arrow<S> {
    Arrow::function(Obj::s(x), x.clone(), "σ", DEG_DOWN, |p| Some(graded(p).1.clone()))
}

/// `θ : S² X → S X`, `(i,(j,a)) ↦ (i+j, a)`.
pub fn theta<S: Semiring>(x: &Obj) -> Arrow<S> {
    let sx = Obj::s(x);
    Arrow::function(Obj::s(&sx), sx, "θ", Grading::PRESERVE, |p| {
        let (i, q) = graded(p);
        let (j, a) = graded(q);
        Some(Point::graded(i + j, a.clone()))
    })
}

/// `l : S X → S² X`, `(i,a) ↦ (i,(i,a))`.
pub fn lift<S: Semiring>(x: &Obj) -> Arrow<S> {
    let sx = Obj::s(x);
    Arrow::function(sx.clone(), Obj::s(&sx), "l", DEG_UP, |p| {
        let (i, a) = graded(p);
        Some(Point::graded(i, Point::graded(i, a.clone())))
    })
}

/// `c : S² X → S² X`, `(i,(j,a)) ↦ (j,(i,a))`.
pub fn swap<S: Semiring>(x: &Obj) -> Arrow<S> {
    let ssx = Obj::s(&Obj::s(x));
    Arrow::function(ssx.clone(), ssx, "c", Grading::PRESERVE, |p| {
        let (i, q) = graded(p);
        let (j, a) = graded(q);
        Some(Point::graded(j, Point::graded(i, a.clone())))
    })
}

/// Left strength `S X ⊗ Y → S(X ⊗ Y)`.
pub fn sstr_l<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::s(x), y);
    Arrow::function(dom, Obj::s(&Obj::tensor(x, y)), "strL", Grading::PRESERVE, |p| {
        let (ia, b) = pair(p);
        let (i, a) = graded(ia);
        Some(Point::graded(i, Point::pair(a.clone(), b.clone())))
    })
}

/// Right strength `X ⊗ S Y → S(X ⊗ Y)`.
pub fn sstr_r<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(x, &Obj::s(y));
    Arrow::function(dom, Obj::s(&Obj::tensor(x, y)), "strR", Grading::PRESERVE, |p| {
        let (a, jb) = pair(p);
        let (j, b) = graded(jb);
        Some(Point::graded(j, Point::pair(a.clone(), b.clone())))
    })
}

/// Cauchy product `S X ⊗ S Y → S(X ⊗ Y)`, `((i,a),(j,b)) ↦ (i+j,(a,b))`.
pub fn sdist<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::s(x), &Obj::s(y));
    Arrow::function(dom, Obj::s(&Obj::tensor(x, y)), "Sdist", Grading::PRESERVE, |p| {
        let (ia, jb) = pair(p);
        let ((i, a), (j, b)) = (graded(ia), graded(jb));
        Some(Point::graded(i + j, Point::pair(a.clone(), b.clone())))
    })
}

/// `S(&ᵢ Xᵢ) → &ᵢ S Xᵢ`, `(i,(n,a)) ↦ (n,(i,a))`.
pub fn sproddist<S: Semiring>(xs: &[Obj]) -> Arrow<S> {
    let sxs: Vec<Obj> = xs.iter().map(Obj::s).collect();
    Arrow::function(Obj::s(&Obj::with(xs)), Obj::with(&sxs), "SprodDist", Grading::PRESERVE, |p| {
        let (i, q) = graded(p);
        let (n, a) = q.as_tag().expect("tagged point");
        Some(Point::tag(n, Point::graded(i, a.clone())))
    })
}

/// Inverse of [`sproddist`].
pub fn sproddist_inv<S: Semiring>(xs: &[Obj]) -> Arrow<S> {
    let sxs: Vec<Obj> = xs.iter().map(Obj::s).collect();
    Arrow::function(Obj::with(&sxs), Obj::s(&Obj::with(xs)), "SprodDist⁻¹", Grading::PRESERVE, |p| {
        let (n, q) = p.as_tag().expect("tagged point");
        let (i, a) = graded(q);
        Some(Point::graded(i, Point::tag(n, a.clone())))
    })
}

/// The witness `⟨fᵢ⟩ : X → S Y` of a summable family, entries
/// `(a,(i,b)) = fᵢ(a,b)`. Fails when the family has no sum in the model.
pub fn witness<S: Semiring>(fs: &[Morphism<S>]) -> Result<Morphism<S>> {
    let first = fs.first().ok_or_else(|| Error::Arity("empty family".into()))?;
    let b = first.bounds();
    if fs.len() > b.s + 1 {
        return Err(Error::BoundViolation(format!(
            "{} summands exceed the degree bound {}",
            fs.len(),
            b.s
        )));
    }
    partial_sum(fs)?;
    let mut entries = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        for (p, q, c) in f.entries() {
            entries.push((p.clone(), Point::graded(i, q.clone()), c.clone()));
        }
    }
    Morphism::new(first.dom(), &Obj::s(first.cod()), b, entries)
}

/// The witness as a lazy arrow, without the summability check.
pub fn pairing<S: Semiring>(fs: &[Arrow<S>]) -> Result<Arrow<S>> {
    let first = fs.first().ok_or_else(|| Error::Arity("empty family".into()))?;
    let dom = first.dom().clone();
    let cod = first.cod().clone();
    for f in fs {
        if f.dom() != &dom || f.cod() != &cod {
            return Err(Error::ObjectMismatch {
                expected: format!("{dom} -> {cod}"),
                found: format!("{} -> {}", f.dom(), f.cod()),
            });
        }
    }
    let fs = fs.to_vec();
    Ok(Arrow::new(dom, Obj::s(&cod), "⟨fᵢ⟩", Grading::ANY, move |a| {
        let mut row = Row::new();
        for (i, f) in fs.iter().enumerate() {
            for (q, c) in f.row(a) {
                add_into(&mut row, Point::graded(i, q), c);
            }
        }
        row
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Base, Bounds, ModelKind};
    use crate::semiring::{Bool, RatPos, SemiringId};

    fn x(model: ModelKind) -> Obj {
        Obj::base(model, Base::atoms("X", &["a"]))
    }

    #[test]
    fn proj_inj() {
        let b = Bounds::new(2, 2);
        let o = x(ModelKind::Rel);
        let id = sproj::<Bool>(&o, 1).after(&sinj(&o, 1)).unwrap().materialize(&b);
        assert_eq!(id, Morphism::identity(&o, b));
        let z = sproj::<Bool>(&o, 0).after(&sinj(&o, 1)).unwrap().materialize(&b);
        assert!(z.is_empty());
    }

    #[test]
    fn theta_entry() {
        let o = x(ModelKind::Rel);
        let p = Point::graded(1, Point::graded(1, Point::atom("a")));
        let r = theta::<Bool>(&o).row(&p);
        assert_eq!(r.get(&Point::graded(2, Point::atom("a"))), Some(&Bool(true)));
    }

    #[test]
    fn swap_involutive() {
        let b = Bounds::new(2, 3);
        let o = x(ModelKind::Wcs);
        let s = swap::<Bool>(&o);
        let ss = s.after(&s).unwrap().materialize(&b);
        assert_eq!(ss, Morphism::identity(&Obj::s(&Obj::s(&o)), b));
    }

    #[test]
    fn s_map_diagonal() {
        let m = ModelKind::Wrel(SemiringId::RatPos);
        let (a, y) = (x(m), Obj::base(m, Base::atoms("Y", &["b"])));
        let f = Arrow::<RatPos>::new(a, y, "f", Grading::PRESERVE, |_| {
            Row::from([(Point::atom("b"), RatPos::ratio(1, 2))])
        });
        let sf = s_map(&f).materialize(&Bounds::new(1, 1));
        assert_eq!(sf.len(), 2);
        assert_eq!(
            sf.get(&Point::graded(1, Point::atom("a")), &Point::graded(1, Point::atom("b"))),
            RatPos::ratio(1, 2)
        );
    }

    #[test]
    fn coh_witness_rejects_repeats() {
        let b = Bounds::new(1, 2);
        let o = Obj::base(ModelKind::Coh, Base::atoms("X", &["a"]));
        let f = Morphism::<Bool>::identity(&o, b);
        assert!(matches!(witness(&[f.clone(), f.clone()]), Err(Error::NotSummable(_))));
        let w = witness(&[f.clone(), Morphism::zero(&o, &o, b)]).unwrap();
        let s = sigma::<Bool>(&o).materialize(&b);
        assert_eq!(Morphism::compose(&s, &w).unwrap(), f);
    }
}
