//! 0/1 structural maps of the symmetric monoidal closed and cartesian
//! structure, as lazy arrows over any semiring.

use super::arrow::add_into;
use super::{Arrow, Bounds, Grading, Obj, Row, Trend};
use crate::error::{Error, Result};
use crate::multiset::Point;
use crate::semiring::Semiring;

const P: Grading = Grading::PRESERVE;

fn pair_parts(p: &Point) -> (&Point, &Point) {
    p.as_pair().expect("pair point")
}

pub fn sym<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    Arrow::function(Obj::tensor(x, y), Obj::tensor(y, x), "sym", P, |p| {
        let (a, b) = pair_parts(p);
        Some(Point::pair(b.clone(), a.clone()))
    })
}

pub fn assoc<S: Semiring>(x: &Obj, y: &Obj, z: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::tensor(x, y), z);
    let cod = Obj::tensor(x, &Obj::tensor(y, z));
    Arrow::function(dom, cod, "assoc", P, |p| {
        let (ab, c) = pair_parts(p);
        let (a, b) = pair_parts(ab);
        Some(Point::pair(a.clone(), Point::pair(b.clone(), c.clone())))
    })
}

pub fn assoc_inv<S: Semiring>(x: &Obj, y: &Obj, z: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(x, &Obj::tensor(y, z));
    let cod = Obj::tensor(&Obj::tensor(x, y), z);
    Arrow::function(dom, cod, "assoc⁻¹", P, |p| {
        let (a, bc) = pair_parts(p);
        let (b, c) = pair_parts(bc);
        Some(Point::pair(Point::pair(a.clone(), b.clone()), c.clone()))
    })
}

pub fn lunit<S: Semiring>(x: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::unit(x.model()), x);
    Arrow::function(dom, x.clone(), "lunit", P, |p| Some(pair_parts(p).1.clone()))
}

pub fn lunit_inv<S: Semiring>(x: &Obj) -> Arrow<S> {
    let cod = Obj::tensor(&Obj::unit(x.model()), x);
    Arrow::function(x.clone(), cod, "lunit⁻¹", P, |a| Some(Point::pair(Point::Unit, a.clone())))
}

pub fn runit<S: Semiring>(x: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(x, &Obj::unit(x.model()));
    Arrow::function(dom, x.clone(), "runit", P, |p| Some(pair_parts(p).0.clone()))
}

pub fn runit_inv<S: Semiring>(x: &Obj) -> Arrow<S> {
    let cod = Obj::tensor(x, &Obj::unit(x.model()));
    Arrow::function(x.clone(), cod, "runit⁻¹", P, |a| Some(Point::pair(a.clone(), Point::Unit)))
}

/// Projection `&ᵢ Xᵢ → Xᵢ`.
pub fn proj<S: Semiring>(xs: &[Obj], i: usize) -> Result<Arrow<S>> {
    let target = xs
        .get(i)
        .ok_or_else(|| Error::Arity(format!("projection {i} of a {}-ary product", xs.len())))?;
    Ok(Arrow::function(Obj::with(xs), target.clone(), &format!("proj{i}"), P, move |p| {
        let (j, a) = p.as_tag().expect("tagged point");
        (j == i).then(|| a.clone())
    }))
}

/// Injection `Xᵢ → ⊕ᵢ Xᵢ`.
pub fn inj<S: Semiring>(xs: &[Obj], i: usize) -> Result<Arrow<S>> {
    let source = xs
        .get(i)
        .ok_or_else(|| Error::Arity(format!("injection {i} into a {}-ary sum", xs.len())))?;
    Ok(Arrow::function(source.clone(), Obj::plus(xs), &format!("inj{i}"), P, move |a| {
        Some(Point::tag(i, a.clone()))
    }))
}

fn common_dom<S: Semiring>(fs: &[Arrow<S>]) -> Result<Obj> {
    let first = fs.first().ok_or_else(|| Error::Arity("empty tuple".into()))?;
    for f in fs {
        if f.dom() != first.dom() {
            return Err(Error::ObjectMismatch {
                expected: first.dom().to_string(),
                found: f.dom().to_string(),
            });
        }
    }
    Ok(first.dom().clone())
}

/// `⟨fᵢ⟩ : Z → &ᵢ Yᵢ` with entries `(z, (i, b)) = fᵢ(z, b)`.
pub fn tuple<S: Semiring>(fs: &[Arrow<S>]) -> Result<Arrow<S>> {
    let dom = common_dom(fs)?;
    let cods: Vec<Obj> = fs.iter().map(|f| f.cod().clone()).collect();
    let fs = fs.to_vec();
    Ok(Arrow::new(dom, Obj::with(&cods), "tuple", Grading::ANY, move |z| {
        let mut row = Row::new();
        for (i, f) in fs.iter().enumerate() {
            for (b, c) in f.row(z) {
                add_into(&mut row, Point::tag(i, b), c);
            }
        }
        row
    }))
}

/// `[fᵢ] : ⊕ᵢ Xᵢ → Y`.
pub fn cotuple<S: Semiring>(fs: &[Arrow<S>]) -> Result<Arrow<S>> {
    let first = fs.first().ok_or_else(|| Error::Arity("empty cotuple".into()))?;
    for f in fs {
        if f.cod() != first.cod() {
            return Err(Error::ObjectMismatch {
                expected: first.cod().to_string(),
                found: f.cod().to_string(),
            });
        }
    }
    let doms: Vec<Obj> = fs.iter().map(|f| f.dom().clone()).collect();
    let fs = fs.to_vec();
    Ok(Arrow::new(Obj::plus(&doms), first.cod().clone(), "cotuple", Grading::ANY, move |p| {
        let (i, a) = p.as_tag().expect("tagged point");
        fs[i].row(a)
    }))
}

/// `&ᵢ fᵢ : &ᵢ Xᵢ → &ᵢ Yᵢ`.
pub fn with_map<S: Semiring>(fs: &[Arrow<S>]) -> Arrow<S> {
    let doms: Vec<Obj> = fs.iter().map(|f| f.dom().clone()).collect();
    let cods: Vec<Obj> = fs.iter().map(|f| f.cod().clone()).collect();
    let fs = fs.to_vec();
    Arrow::new(Obj::with(&doms), Obj::with(&cods), "with", Grading::ANY, move |p| {
        let (i, a) = p.as_tag().expect("tagged point");
        fs[i].row(a).into_iter().map(|(b, c)| (Point::tag(i, b), c)).collect()
    })
}

/// `ev : (X ⊸ Y) ⊗ X → Y`.
pub fn ev<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::lin(x, y), x);
    Arrow::function(dom, y.clone(), "ev", Grading::new(Trend::Down, Trend::Down), |p| {
        let (ab, a2) = pair_parts(p);
        let (a, b) = pair_parts(ab);
        (a == a2).then(|| b.clone())
    })
}

/// `curry(f) : Z → X ⊸ Y` for `f : Z ⊗ X → Y`; enumerates the web of `X`.
pub fn curry<S: Semiring>(f: &Arrow<S>, b: &Bounds) -> Result<Arrow<S>> {
    let (z, x) = f.dom().tensor_parts().ok_or_else(|| Error::Type(format!(
        "curry expects a domain of shape Z⊗X, found {}",
        f.dom()
    )))?;
    let xs = x.web(b);
    let g = f.clone();
    Ok(Arrow::new(z.clone(), Obj::lin(x, f.cod()), "curry", Grading::ANY, move |c| {
        let mut row = Row::new();
        for a in xs.iter() {
            for (y, v) in g.row(&Point::pair(c.clone(), a.clone())) {
                add_into(&mut row, Point::pair(a.clone(), y), v);
            }
        }
        row
    }))
}

/// `uncurry(g) : Z ⊗ X → Y` for `g : Z → X ⊸ Y`.
pub fn uncurry<S: Semiring>(g: &Arrow<S>) -> Result<Arrow<S>> {
    let (x, y) = g.cod().lin_parts().ok_or_else(|| Error::Type(format!(
        "uncurry expects a codomain of shape X⊸Y, found {}",
        g.cod()
    )))?;
    let h = g.clone();
    Ok(Arrow::new(Obj::tensor(g.dom(), x), y.clone(), "uncurry", Grading::ANY, move |p| {
        let (c, a) = pair_parts(p);
        let mut row = Row::new();
        for (xy, v) in h.row(c) {
            let (a2, b) = pair_parts(&xy);
            if a2 == a {
                add_into(&mut row, b.clone(), v);
            }
        }
        row
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Base, ModelKind};
    use crate::semiring::Bool;

    fn atoms(name: &str, xs: &[&str]) -> Obj {
        Obj::base(ModelKind::Rel, Base::atoms(name, xs))
    }

    #[test]
    fn sym_example() {
        let (a, b) = (atoms("A", &["a"]), atoms("B", &["b"]));
        let m = sym::<Bool>(&a, &b).materialize(&Bounds::default());
        let ab = Point::pair(Point::atom("a"), Point::atom("b"));
        let ba = Point::pair(Point::atom("b"), Point::atom("a"));
        assert_eq!(m.support().into_iter().collect::<Vec<_>>(), vec![(ab, ba)]);
    }

    #[test]
    fn proj_example() {
        let xs = [atoms("A", &["a"]), atoms("B", &["b"])];
        let m = proj::<Bool>(&xs, 0).unwrap().materialize(&Bounds::default());
        let e = (Point::tag(0, Point::atom("a")), Point::atom("a"));
        assert_eq!(m.support().into_iter().collect::<Vec<_>>(), vec![e]);
        assert!(proj::<Bool>(&xs, 2).is_err());
    }

    #[test]
    fn curry_round_trip() {
        let b = Bounds::default();
        let (z, x, y) = (atoms("Z", &["z1", "z2"]), atoms("X", &["x"]), atoms("Y", &["y1", "y2"]));
        let dom = Obj::tensor(&z, &x);
        let g = Arrow::<Bool>::relation(dom, y, "f", Grading::ANY, |p| {
            let (zp, _) = p.as_pair().unwrap();
            if zp == &Point::atom("z1") {
                vec![Point::atom("y1"), Point::atom("y2")]
            } else {
                vec![Point::atom("y2")]
            }
        });
        let back = uncurry(&curry(&g, &b).unwrap()).unwrap();
        assert_eq!(back.materialize(&b), g.materialize(&b));
    }
}
