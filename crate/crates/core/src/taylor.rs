//! The object of degrees `D`, its bimonoid and analytic coalgebra, the
//! Taylor distributive law `∂ : !S ⇒ S!` (by a pipeline and in closed form),
//! the Taylor functor, homogeneous components and `!1 ≅ D`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exponential::{bag, bang, bang_power, contr_n, der, ocmont};
use crate::model::structural::{curry, ev};
use crate::model::{Arrow, Bounds, Grading, ModelKind, Obj, Row, Trend};
use crate::multiset::{factorial, mpart, Multiset, Point};
use crate::semiring::Semiring;
use crate::summability::{s_map, sinj, sproj};

const DEG_UP: Grading = Grading { bag: Trend::Preserve, deg: Trend::Up };

/// `wᵢ : 1 → D`.
pub fn w<S: Semiring>(model: ModelKind, i: usize) -> Arrow<S> {
    Arrow::function(Obj::unit(model), Obj::degrees(model), &format!("w{i}"), DEG_UP, move |_| {
        Some(Point::Deg(i))
    })
}

/// `w̄ : 1 → D`, the bimonoid unit, hitting every degree up to `b.s`.
pub fn unit<S: Semiring>(model: ModelKind, b: &Bounds) -> Arrow<S> {
    let top = b.s;
    Arrow::relation(Obj::unit(model), Obj::degrees(model), "w̄", DEG_UP, move |_| {
        (0..=top).map(Point::Deg).collect()
    })
}

/// Bimonoid counit `D → 1`, the projection on degree 0.
pub fn counit<S: Semiring>(model: ModelKind) -> Arrow<S> {
    Arrow::function(Obj::degrees(model), Obj::unit(model), "counit", Grading::PRESERVE, |p| {
        (p.as_deg() == Some(0)).then_some(Point::Unit)
    })
}

/// Bimonoid comultiplication `D → D ⊗ D`, `n ↦ (i, n−i)`.
pub fn comult<S: Semiring>(model: ModelKind) -> Arrow<S> {
    let d = Obj::degrees(model);
    Arrow::relation(d.clone(), Obj::tensor(&d, &d), "comult", Grading::PRESERVE, |p| {
        let n = p.as_deg().expect("degree");
        (0..=n).map(|i| Point::pair(Point::Deg(i), Point::Deg(n - i))).collect()
    })
}

/// Bimonoid multiplication `D ⊗ D → D`, `(i,i) ↦ i`.
pub fn mult<S: Semiring>(model: ModelKind) -> Arrow<S> {
    let d = Obj::degrees(model);
    let g = Grading::new(Trend::Preserve, Trend::Down);
    Arrow::function(Obj::tensor(&d, &d), d, "mult", g, |p| {
        let (i, j) = p.as_pair().expect("pair point");
        (i == j).then(|| i.clone())
    })
}

/// The analytic coalgebra `∂_D : D → !D`, `n ↦ [i₁,…,i_k]` with `Σ iⱼ = n`.
/// At most `b.pad` of the `iⱼ` are zero.
pub fn coalgebra_d<S: Semiring>(model: ModelKind, b: &Bounds) -> Arrow<S> {
    let pad = b.pad;
    let d = Obj::degrees(model);
    let g = Grading::new(Trend::Up, Trend::Preserve);
    Arrow::relation(d.clone(), Obj::bang(&d), "∂D", g, move |p| {
        let n = p.as_deg().expect("degree");
        let mut out = Vec::new();
        for m in mpart(n) {
            for k in 0..=pad {
                let mut m = m.clone();
                m.insert(Point::Deg(0), k);
                out.push(Point::bag(m));
            }
        }
        out
    })
}

/// `∂ = curry(!ev ∘ Ocmon² ∘ (id ⊗ ∂_D)) : !S X → S !X`, assembled from the
/// exponential and monoidal-closed primitives.
pub fn sdl_pipeline<S: Semiring>(x: &Obj, b: &Bounds) -> Result<Arrow<S>> {
    let model = x.model();
    let (d, sx) = (Obj::degrees(model), Obj::s(x));
    let bsx = Obj::bang(&sx);
    let step = Arrow::tensor(&Arrow::identity(&bsx), &coalgebra_d(model, b));
    let body = Arrow::chain(&[step, ocmont(&sx, &d), bang(&ev(&d, x))])?;
    Ok(curry(&body, b)?.renamed("∂").cached())
}

/// The closed-form coefficient of `∂` at `p = [(i₁,a₁),…,(i_k,a_k)]`:
/// target `(Σ iⱼ, [a₁,…,a_k])` with weight `m!/p!`.
pub fn sdl_coefficient(p: &Multiset) -> Result<(usize, Multiset, num_bigint::BigUint)> {
    let mut n = 0;
    let mut m = Multiset::new();
    for (q, k) in p.iter() {
        let (i, a) = q
            .as_graded()
            .ok_or_else(|| Error::Type(format!("{q} is not a point of an S-object")))?;
        n += i * k;
        m.insert(a.clone(), k);
    }
    let (quot, rem) = factorial(&m).div_rem(&factorial(p));
    if rem != num_bigint::BigUint::default() {
        return Err(Error::NonIntegral(format!("m!/p! at p = {}", Point::bag(p.clone()))));
    }
    Ok((n, m, quot))
}

/// `∂` from its closed form.
pub fn sdl_explicit<S: Semiring>(x: &Obj) -> Arrow<S> {
    let g = Grading::PRESERVE;
    Arrow::new(Obj::bang(&Obj::s(x)), Obj::s(&Obj::bang(x)), "∂*", g, |p| {
        let (n, m, c) = sdl_coefficient(bag(p)).expect("integral coefficient");
        Row::from([(Point::graded(n, Point::bag(m)), S::from_nat(&c))])
    })
}

fn kleisli_parts(s: &Arrow<impl Semiring>) -> Result<Obj> {
    s.dom()
        .bang_inner()
        .cloned()
        .ok_or_else(|| Error::Type(format!("Taylor expansion expects a map out of a !-object, found {}", s.dom())))
}

/// `T(s) : !S X → S Y` in closed form,
/// `T(s)_{[(i,a)…],(n,b)} = δ_{n,Σi} · m!/p! · s_{m,b}`.
pub fn taylor<S: Semiring>(s: &Arrow<S>) -> Result<Arrow<S>> {
    let x = kleisli_parts(s)?;
    let f = s.clone();
    Ok(Arrow::new(
        Obj::bang(&Obj::s(&x)),
        Obj::s(s.cod()),
        &format!("T({})", s.name()),
        Grading::new(Trend::Any, Trend::Any),
        move |p| {
            let (n, m, c) = sdl_coefficient(bag(p)).expect("integral coefficient");
            let k = S::from_nat(&c);
            f.row(&Point::bag(m))
                .into_iter()
                .map(|(y, v)| (Point::graded(n, y), k.clone() * v))
                .filter(|(_, v)| !v.is_zero())
                .collect()
        },
    ))
}

/// `T(s) = S(s) ∘ ∂` through the pipeline.
pub fn taylor_composite<S: Semiring>(s: &Arrow<S>, b: &Bounds) -> Result<Arrow<S>> {
    let x = kleisli_parts(s)?;
    s_map(s).after(&sdl_pipeline(&x, b)?)
}

/// `π_n ∘ T(s) ∘ !ι₁`.
pub fn homogeneous<S: Semiring>(s: &Arrow<S>, n: usize) -> Result<Arrow<S>> {
    let x = kleisli_parts(s)?;
    let path = [bang(&sinj(&x, 1)), taylor(s)?, sproj(s.cod(), n)];
    Ok(Arrow::chain(&path)?.renamed(&format!("homog{n}({})", s.name())))
}

/// The object `1^{⊗n}` matching [`bang_power`] on the unit, left nested.
fn unit_power(model: ModelKind, n: usize) -> Obj {
    let one = Obj::unit(model);
    (1..n.max(1)).fold(one.clone(), |acc, _| Obj::tensor(&acc, &one))
}

/// `der^{⊗n} : (!1)^{⊗n} → 1^{⊗n}`.
fn der_power<S: Semiring>(model: ModelKind, n: usize) -> Arrow<S> {
    let one = Obj::unit(model);
    match n {
        0 => Arrow::identity(&one),
        _ => (1..n).fold(der(&one), |acc, _| Arrow::tensor(&acc, &der(&one))),
    }
}

/// The unitor `1^{⊗n} → 1`.
fn collapse<S: Semiring>(model: ModelKind, n: usize) -> Arrow<S> {
    Arrow::function(unit_power(model, n), Obj::unit(model), "λ*", Grading::PRESERVE, |_| Some(Point::Unit))
}

/// `∂deg : !1 → D` as `Σ_k w_k ∘ λ* ∘ der^{⊗k} ∘ contr^k`, and its inverse
/// `!π₁ ∘ ∂_D : D → !1`.
pub fn deg_iso<S: Semiring>(model: ModelKind, b: &Bounds) -> Result<(Arrow<S>, Arrow<S>)> {
    let one = Obj::unit(model);
    let d = Obj::degrees(model);
    let mut terms = Vec::new();
    for k in 0..=b.s {
        debug_assert_eq!(bang_power(&one, k), contr_n::<S>(&one, k).cod().clone());
        let path = [contr_n::<S>(&one, k), der_power(model, k), collapse(model, k), w(model, k)];
        terms.push(Arrow::chain(&path)?);
    }
    let fwd = Arrow::sum_unchecked(&Obj::bang(&one), &d, &terms).renamed("∂deg");
    let pi1 = Arrow::<S>::function(d.clone(), one, "π₁", Grading::ANY, |p| {
        (p.as_deg() == Some(1)).then_some(Point::Unit)
    });
    let back = bang(&pi1).after(&coalgebra_d(model, b))?.renamed("∂deg⁻¹");
    Ok((fwd, back))
}

/// Searches for a bijection between two webs preserving the three-valued
/// coherence. Returns the first one found, in lexicographic order.
pub fn coherence_iso(x: &Obj, xs: &[Point], y: &Obj, ys: &[Point]) -> Option<Vec<(Point, Point)>> {
    if xs.len() != ys.len() {
        return None;
    }
    let mut used = vec![false; ys.len()];
    let mut assign: Vec<usize> = Vec::new();
    fn go(
        x: &Obj,
        xs: &[Point],
        y: &Obj,
        ys: &[Point],
        used: &mut [bool],
        assign: &mut Vec<usize>,
    ) -> bool {
        let i = assign.len();
        if i == xs.len() {
            return true;
        }
        for j in 0..ys.len() {
            if used[j] {
                continue;
            }
            let ok = (0..i).chain(std::iter::once(i)).all(|k| {
                let jk = if k == i { j } else { assign[k] };
                x.rel(&xs[k], &xs[i]) == y.rel(&ys[jk], &ys[j])
            });
            if ok {
                used[j] = true;
                assign.push(j);
                if go(x, xs, y, ys, used, assign) {
                    return true;
                }
                assign.pop();
                used[j] = false;
            }
        }
        false
    }
    go(x, xs, y, ys, &mut used, &mut assign)
        .then(|| assign.iter().enumerate().map(|(i, &j)| (xs[i].clone(), ys[j].clone())).collect())
}

/// The NUCS comparison of `!e 1` and `D` truncated at `k`.
pub fn nucs_bang_e_vs_degrees(k: usize) -> Option<Vec<(Point, Point)>> {
    let model = ModelKind::Nucs;
    let be = Obj::bang_e(&Obj::unit(model));
    let d = Obj::degrees(model);
    let b = Bounds::new(k, k);
    coherence_iso(&be, &be.web(&b), &d, &d.web(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Bool, RatPos, SemiringId};

    fn xa(model: ModelKind) -> Obj {
        Obj::base(model, crate::model::Base::atoms("X", &["a"]))
    }

    fn sp(i: usize) -> Point {
        Point::graded(i, Point::atom("a"))
    }

    fn target(n: usize, k: usize) -> Point {
        Point::graded(n, Point::bag(Multiset::with(Point::atom("a"), k)))
    }

    #[test]
    fn coalgebra_entries() {
        let r = coalgebra_d::<Bool>(ModelKind::Rel, &Bounds::new(2, 2)).row(&Point::Deg(2));
        let bg = |xs: &[usize]| Point::bag_of(xs.iter().map(|&i| Point::Deg(i)));
        for m in [bg(&[1, 1]), bg(&[2]), bg(&[0, 2])] {
            assert!(r.contains_key(&m));
        }
        let r1 = coalgebra_d::<Bool>(ModelKind::Rel, &Bounds::new(2, 2)).row(&Point::Deg(1));
        assert!(!r1.contains_key(&bg(&[1, 1])));
    }

    #[test]
    fn pipeline_examples() {
        let b = Bounds::new(2, 2);
        let x = xa(ModelKind::Rel);
        let p = Point::bag_of([sp(1), sp(1)]);
        assert_eq!(sdl_pipeline::<Bool>(&x, &b).unwrap().row(&p).get(&target(2, 2)), Some(&Bool(true)));
        let x = xa(ModelKind::Wrel(SemiringId::RatPos));
        let p = Point::bag_of([sp(0), sp(1)]);
        let r = sdl_pipeline::<RatPos>(&x, &b).unwrap().row(&p);
        assert_eq!(r.get(&target(1, 2)), Some(&RatPos::ratio(2, 1)));
        assert_eq!(r.len(), 1);
        let r = sdl_pipeline::<RatPos>(&x, &b).unwrap().row(&Point::bag_of([sp(1)]));
        assert_eq!(r.get(&target(0, 1)), None);
    }

    #[test]
    fn explicit_examples() {
        let (n, _, c) = sdl_coefficient(&[sp(0), sp(1)].into_iter().collect()).unwrap();
        assert_eq!((n, c), (1, 2u32.into()));
        let (n, _, c) = sdl_coefficient(&[sp(1), sp(1)].into_iter().collect()).unwrap();
        assert_eq!((n, c), (2, 1u32.into()));
        let pb = Point::graded(1, Point::atom("b"));
        let (_, _, c) = sdl_coefficient(&[sp(0), pb].into_iter().collect()).unwrap();
        assert_eq!(c, 1u32.into());
    }

    #[test]
    fn nucs_negative() {
        assert!(nucs_bang_e_vs_degrees(1).is_some());
        assert!(nucs_bang_e_vs_degrees(2).is_none());
        assert!(nucs_bang_e_vs_degrees(3).is_none());
    }
}
