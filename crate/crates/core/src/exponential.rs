//! The exponential `!`: action on maps via transports, the comonad
//! structure, the Seely maps, the comonoid on `!X`, lax monoidality and
//! coKleisli composition.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::model::structural::tuple;
use crate::model::{Arrow, Bounds, Grading, ModelKind, Obj, Row, Trend};
use crate::multiset::{
    bounded_compositions, factorial, factorial_u64, block_partitions, transports, Multiset, Point,
};
use crate::semiring::Semiring;

pub(crate) fn bag(p: &Point) -> &Multiset {
    p.as_bag().expect("bag point")
}

fn bang_obj_of(x: &Obj, what: &str) -> Result<Obj> {
    x.bang_inner()
        .cloned()
        .ok_or_else(|| Error::Type(format!("{what} expects a !-object, found {x}")))
}

/// Whether the support of `m` is a clique of `x` (large coherence).
pub fn is_clique(x: &Obj, m: &Multiset) -> bool {
    let sup: Vec<&Point> = m.support().collect();
    sup.iter().enumerate().all(|(i, a)| sup[i..].iter().all(|c| x.rel(a, c).coh()))
}

/// `!f`, with `(!f)_{m,p} = Σ_{r ∈ Mstrans(m,p)} [p r] · f^r`. In COH the
/// targets are kept only when clique-supported.
pub fn bang<S: Semiring>(f: &Arrow<S>) -> Arrow<S> {
    let g = f.clone();
    let cod = f.cod().clone();
    let uniform = cod.model() == ModelKind::Coh;
    let grading = f.grading();
    Arrow::new(
        Obj::bang(f.dom()),
        Obj::bang(f.cod()),
        &format!("!{}", f.name()),
        grading,
        move |p| {
            let m = bag(p);
            let rows: Vec<(usize, Vec<(Point, S)>)> =
                m.iter().map(|(a, k)| (k, g.row(a).into_iter().collect())).collect();
            let mut out = Row::new();
            spread(&rows, 0, Multiset::new(), BigUint::one(), S::one(), &mut |q, den, w| {
                if uniform && !is_clique(&cod, &q) {
                    return;
                }
                let c = S::from_nat(&(factorial(&q) / den)) * w;
                crate::model::add_into(&mut out, Point::bag(q), c);
            });
            out
        },
    )
}

/// Distributes each multiplicity over the row of its point; `den`
/// accumulates `Π r(a,b)!` and `w` the product of the entries.
fn spread<S: Semiring>(
    rows: &[(usize, Vec<(Point, S)>)],
    i: usize,
    acc: Multiset,
    den: BigUint,
    w: S,
    emit: &mut dyn FnMut(Multiset, BigUint, S),
) {
    if i == rows.len() {
        emit(acc, den, w);
        return;
    }
    let (k, targets) = &rows[i];
    let caps = vec![*k; targets.len()];
    for dist in bounded_compositions(*k, &caps) {
        let mut q = acc.clone();
        let mut d = den.clone();
        let mut v = w.clone();
        for ((b, c), &r) in targets.iter().zip(&dist) {
            if r > 0 {
                q.insert(b.clone(), r);
                d *= factorial_u64(r as u64);
                v = v * c.pow(r);
            }
        }
        spread(rows, i + 1, q, d, v, emit);
    }
}

/// `der : !X → X`, `[a] ↦ a`.
pub fn der<S: Semiring>(x: &Obj) -> Arrow<S> {
    Arrow::function(Obj::bang(x), x.clone(), "der", Grading::new(Trend::Down, Trend::Preserve), |p| {
        let m = bag(p);
        (m.size() == 1).then(|| m.support().next().unwrap().clone())
    })
}

/// `dig : !X → !!X`, `m ↦ [m₁,…,mₙ]` for every way of writing `m` as a sum
/// of multisets; up to `b.pad` of the `mᵢ` may be empty.
pub fn dig<S: Semiring>(x: &Obj, b: &Bounds) -> Arrow<S> {
    let pad = b.pad;
    Arrow::relation(
        Obj::bang(x),
        Obj::bang(&Obj::bang(x)),
        "dig",
        Grading::new(Trend::Up, Trend::Preserve),
        move |p| {
            let mut out = Vec::new();
            for blocks in block_partitions(bag(p)) {
                let mut outer = Multiset::new();
                for blk in blocks {
                    outer.insert(Point::bag(blk), 1);
                }
                for k in 0..=pad {
                    let mut o = outer.clone();
                    o.insert(Point::bag(Multiset::new()), k);
                    out.push(Point::bag(o));
                }
            }
            out
        },
    )
}

/// `μ⁰ : 1 → !⊤`.
pub fn seely0<S: Semiring>(model: ModelKind) -> Arrow<S> {
    let top = Obj::top(model);
    Arrow::function(Obj::unit(model), Obj::bang(&top), "seely0", Grading::PRESERVE, |_| {
        Some(Point::bag(Multiset::new()))
    })
}

/// `(μ⁰)⁻¹ : !⊤ → 1`.
pub fn seely0_inv<S: Semiring>(model: ModelKind) -> Arrow<S> {
    let top = Obj::top(model);
    Arrow::function(Obj::bang(&top), Obj::unit(model), "seely0⁻¹", Grading::PRESERVE, |p| {
        bag(p).is_empty().then_some(Point::Unit)
    })
}

/// `μ² : !X ⊗ !Y → !(X & Y)`, `(m₁, m₂) ↦ 0·m₁ + 1·m₂`.
pub fn seely2<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::bang(x), &Obj::bang(y));
    Arrow::function(dom, Obj::bang(&Obj::with2(x, y)), "seely2", Grading::PRESERVE, |p| {
        let (l, r) = p.as_pair().expect("pair point");
        let m = bag(l)
            .map(|a| Point::tag(0, a.clone()))
            .plus(&bag(r).map(|a| Point::tag(1, a.clone())));
        Some(Point::bag(m))
    })
}

/// `(μ²)⁻¹ : !(X & Y) → !X ⊗ !Y`.
pub fn seely2_inv<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let cod = Obj::tensor(&Obj::bang(x), &Obj::bang(y));
    Arrow::function(Obj::bang(&Obj::with2(x, y)), cod, "seely2⁻¹", Grading::PRESERVE, |p| {
        let (mut l, mut r) = (Multiset::new(), Multiset::new());
        for (t, k) in bag(p).iter() {
            let (i, a) = t.as_tag().expect("tagged point");
            if i == 0 { &mut l } else { &mut r }.insert(a.clone(), k);
        }
        Some(Point::pair(Point::bag(l), Point::bag(r)))
    })
}

/// `weak = (μ⁰)⁻¹ ∘ !0 : !X → 1`.
pub fn weak<S: Semiring>(x: &Obj) -> Arrow<S> {
    let top = Obj::top(x.model());
    let zero = bang(&Arrow::<S>::zero(x, &top));
    seely0_inv(x.model()).after(&zero).expect("typed").renamed("weak")
}

/// `contr = (μ²)⁻¹ ∘ !⟨id, id⟩ : !X → !X ⊗ !X`.
pub fn contr<S: Semiring>(x: &Obj) -> Arrow<S> {
    let id = Arrow::<S>::identity(x);
    let diag = tuple(&[id.clone(), id]).expect("common domain");
    seely2_inv(x, x).after(&bang(&diag)).expect("typed").renamed("contr")
}

/// `Ocmon⁰ : 1 → !1`, `* ↦ k·[*]` for `k ≤ b.pad`.
pub fn ocmonz<S: Semiring>(model: ModelKind, b: &Bounds) -> Arrow<S> {
    let pad = b.pad;
    let one = Obj::unit(model);
    Arrow::relation(one.clone(), Obj::bang(&one), "ocmonz", Grading::new(Trend::Up, Trend::Preserve), move |_| {
        (0..=pad).map(|k| Point::bag(Multiset::with(Point::Unit, k))).collect()
    })
}

/// `Ocmon² : !X ⊗ !Y → !(X ⊗ Y)`, `(m, p) ↦ r` for each transport `r`.
pub fn ocmont<S: Semiring>(x: &Obj, y: &Obj) -> Arrow<S> {
    let dom = Obj::tensor(&Obj::bang(x), &Obj::bang(y));
    let cod = Obj::bang(&Obj::tensor(x, y));
    Arrow::relation(dom, cod, "ocmont", Grading::new(Trend::Down, Trend::Preserve), |p| {
        let (m, q) = p.as_pair().expect("pair point");
        transports(bag(m), bag(q)).into_iter().map(Point::bag).collect()
    })
}

/// `g ∘ !f ∘ dig` for `f : !X → Y`, `g : !Y → Z`.
pub fn kleisli<S: Semiring>(g: &Arrow<S>, f: &Arrow<S>, b: &Bounds) -> Result<Arrow<S>> {
    let x = bang_obj_of(f.dom(), "coKleisli composition")?;
    let y = bang_obj_of(g.dom(), "coKleisli composition")?;
    if &y != f.cod() {
        return Err(Error::ObjectMismatch { expected: y.to_string(), found: f.cod().to_string() });
    }
    Ok(Arrow::chain(&[dig(&x, b), bang(f), g.clone()])?.renamed(&format!("{}•{}", g.name(), f.name())))
}

/// The `n`-fold tensor power of `!X`, left nested; `1` for `n = 0`.
pub fn bang_power(x: &Obj, n: usize) -> Obj {
    let bx = Obj::bang(x);
    match n {
        0 => Obj::unit(x.model()),
        _ => (1..n).fold(bx.clone(), |acc, _| Obj::tensor(&acc, &bx)),
    }
}

/// Iterated contraction `!X → (!X)^{⊗n}`.
pub fn contr_n<S: Semiring>(x: &Obj, n: usize) -> Arrow<S> {
    match n {
        0 => weak(x),
        1 => Arrow::identity(&Obj::bang(x)),
        _ => {
            let prev = contr_n::<S>(x, n - 1);
            let step = Arrow::tensor(&prev, &Arrow::identity(&Obj::bang(x)));
            step.after(&contr(x)).expect("typed")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Base;
    use crate::semiring::{Bool, RatPos};

    fn a(s: &str) -> Point {
        Point::atom(s)
    }

    fn bg(xs: &[&str]) -> Point {
        Point::bag_of(xs.iter().map(|s| a(s)))
    }

    fn rel_obj(xs: &[&str]) -> Obj {
        Obj::base(ModelKind::Wrel(crate::semiring::SemiringId::RatPos), Base::atoms("X", xs))
    }

    #[test]
    fn bang_square_weight() {
        let (x, y) = (rel_obj(&["a"]), rel_obj(&["b"]));
        let f = Arrow::<RatPos>::new(x, y, "f", Grading::PRESERVE, |_| {
            Row::from([(a("b"), RatPos::ratio(1, 2))])
        });
        let r = bang(&f).row(&bg(&["a", "a"]));
        assert_eq!(r.get(&bg(&["b", "b"])), Some(&RatPos::ratio(1, 4)));
    }

    #[test]
    fn bang_bool_split() {
        let x = Obj::base(ModelKind::Rel, Base::atoms("X", &["a"]));
        let y = Obj::base(ModelKind::Rel, Base::atoms("Y", &["b", "c"]));
        let f = Arrow::<Bool>::relation(x, y, "f", Grading::PRESERVE, |_| vec![a("b"), a("c")]);
        let r = bang(&f).row(&bg(&["a", "a"]));
        assert_eq!(r.get(&bg(&["b", "c"])), Some(&Bool(true)));
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn der_and_contr() {
        let x = rel_obj(&["a", "b"]);
        let d = der::<RatPos>(&x).materialize(&Bounds::new(2, 2));
        assert_eq!(d.len(), 2);
        let c = contr::<RatPos>(&rel_obj(&["a"])).row(&bg(&["a", "a"]));
        let one = RatPos::ratio(1, 1);
        assert_eq!(c.len(), 3);
        assert!(c.values().all(|v| v == &one));
        assert_eq!(c.get(&Point::pair(bg(&["a"]), bg(&["a"]))), Some(&one));
    }

    #[test]
    fn dig_targets() {
        let x = rel_obj(&["a"]);
        let r = dig::<Bool>(&x, &Bounds::new(2, 2).with_pad(0)).row(&bg(&["a", "a"]));
        let inner = |m: &[&[&str]]| Point::bag_of(m.iter().map(|b| bg(b)));
        assert_eq!(r.len(), 2);
        assert!(r.contains_key(&inner(&[&["a", "a"]])));
        assert!(r.contains_key(&inner(&[&["a"], &["a"]])));
    }

    #[test]
    fn coh_bang_drops_incoherent_targets() {
        let y = Obj::base(ModelKind::Coh, Base::atoms("Y", &["b", "c"]));
        let x = Obj::base(ModelKind::Coh, Base::atoms("X", &["a"]));
        let f = Arrow::<Bool>::relation(x, y, "f", Grading::PRESERVE, |_| vec![a("b"), a("c")]);
        let r = bang(&f).row(&bg(&["a", "a"]));
        assert!(!r.contains_key(&bg(&["b", "c"])));
        assert_eq!(r.len(), 2);
    }
}
