//! Entire functions over the nonnegative rationals: `Fun t`, iterated
//! derivatives, the functional Taylor expansion and PCOH bound checks.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{pcoh_member, Bounds, Coords, Membership, Morphism, Obj};
use crate::multiset::{factorial, mpart, Multiset, Point};
use crate::semiring::{RatPos, Semiring};
use crate::taylor::taylor;

/// A finitely supported vector over the web of an object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub web: Obj,
    pub coords: Coords,
}

impl Vector {
    pub fn new(web: &Obj, coords: Coords) -> Vector {
        let coords = coords.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Vector { web: web.clone(), coords }
    }

    pub fn zero(web: &Obj) -> Vector {
        Vector { web: web.clone(), coords: Coords::new() }
    }

    /// `q · e_a`.
    pub fn basis(web: &Obj, a: Point, q: RatPos) -> Vector {
        Vector::new(web, Coords::from([(a, q)]))
    }

    pub fn get(&self, p: &Point) -> RatPos {
        self.coords.get(p).cloned().unwrap_or_else(RatPos::zero)
    }

    pub fn scale(&self, q: &RatPos) -> Vector {
        let coords = self.coords.iter().map(|(p, c)| (p.clone(), c.clone() * q.clone())).collect();
        Vector::new(&self.web, coords)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut coords = self.coords.clone();
        add_coords(&mut coords, &other.coords, &RatPos::one());
        Vector::new(&self.web, coords)
    }

    /// Sum of all coordinates.
    pub fn mass(&self) -> RatPos {
        RatPos::sum_iter(self.coords.values().cloned())
    }

    pub fn to_json(&self) -> Value {
        let coords: Vec<Value> =
            self.coords.iter().map(|(p, c)| json!([p.to_json(), c.encode()])).collect();
        json!({ "web": self.web.to_string(), "coords": coords })
    }

    /// Reads `{"coords": [[point, scalar], …]}`; the web is supplied by the
    /// caller and every point must belong to it.
    pub fn from_json(web: &Obj, v: &Value) -> Result<Vector> {
        let list = v
            .get("coords")
            .unwrap_or(v)
            .as_array()
            .ok_or_else(|| Error::Parse("vector: expected a coords array".into()))?;
        let mut coords = Coords::new();
        for item in list {
            let pair = item.as_array().filter(|a| a.len() == 2);
            let pair = pair.ok_or_else(|| Error::Parse(format!("vector entry {item}")))?;
            let p = Point::from_json(&pair[0])?;
            let c = match &pair[1] {
                Value::String(s) => RatPos::decode(s)?,
                Value::Number(n) => RatPos::decode(&n.to_string())?,
                other => return Err(Error::Parse(format!("scalar {other}"))),
            };
            let e = coords.entry(p).or_insert_with(RatPos::zero);
            *e = e.clone() + c;
        }
        Ok(Vector::new(web, coords))
    }
}

fn add_coords(acc: &mut Coords, v: &Coords, k: &RatPos) {
    for (p, c) in v {
        let e = acc.entry(p.clone()).or_insert_with(RatPos::zero);
        *e = e.clone() + k.clone() * c.clone();
    }
}

fn nat(k: &BigUint) -> RatPos {
    RatPos::from_nat(k)
}

/// `x^m = Π_a x_a^{m(a)}`.
fn power(x: &Vector, m: &Multiset) -> RatPos {
    m.iter().fold(RatPos::one(), |acc, (a, k)| acc * x.get(a).pow(k))
}

fn series_input(t: &Morphism<RatPos>) -> Result<Obj> {
    t.dom()
        .bang_inner()
        .cloned()
        .ok_or_else(|| Error::Type(format!("a power series needs a !-domain, found {}", t.dom())))
}

fn check_web(expected: &Obj, v: &Vector) -> Result<()> {
    if &v.web != expected {
        return Err(Error::ObjectMismatch { expected: expected.to_string(), found: v.web.to_string() });
    }
    Ok(())
}

/// `(Fun t(x))_b = Σ_{|m|≤d} t_{m,b} x^m`.
pub fn fun_apply(t: &Morphism<RatPos>, x: &Vector) -> Result<Vector> {
    check_web(&series_input(t)?, x)?;
    let mut out = Coords::new();
    for (p, row) in t.rows() {
        let m = p.as_bag().expect("bag point");
        let xm = power(x, m);
        if xm.is_zero() {
            continue;
        }
        for (b, c) in row {
            let e = out.entry(b.clone()).or_insert_with(RatPos::zero);
            *e = e.clone() + xm.clone() * c.clone();
        }
    }
    Ok(Vector::new(t.cod(), out))
}

/// Ordered tuples drawn from `q` without exceeding multiplicities, with the
/// remainder: every `(ā, m)` with `m + [ā] = q`.
fn ordered_draws(q: &Multiset, n: usize) -> Vec<(Vec<Point>, Multiset)> {
    if n == 0 {
        return vec![(Vec::new(), q.clone())];
    }
    let mut out = Vec::new();
    for a in q.support() {
        let rest = q.minus(&Multiset::singleton(a.clone())).expect("member");
        for (mut tail, m) in ordered_draws(&rest, n - 1) {
            tail.insert(0, a.clone());
            out.push((tail, m));
        }
    }
    out
}

/// `Deriv^n t(x)(u¹…uⁿ)_b = Σ_m Σ_ā ((m+[ā])!/m!) t_{m+[ā],b} x^m u¹_{a₁}…uⁿ_{aₙ}`.
pub fn deriv(t: &Morphism<RatPos>, n: usize, x: &Vector, us: &[Vector]) -> Result<Vector> {
    if us.len() != n {
        return Err(Error::Arity(format!("Deriv^{n} takes {n} directions, got {}", us.len())));
    }
    let input = series_input(t)?;
    check_web(&input, x)?;
    for u in us {
        check_web(&input, u)?;
    }
    let mut out = Coords::new();
    for (p, row) in t.rows() {
        let q = p.as_bag().expect("bag point");
        if q.size() < n {
            continue;
        }
        let qf = factorial(q);
        let mut weight = RatPos::zero();
        for (abar, m) in ordered_draws(q, n) {
            let dirs = abar.iter().zip(us).fold(RatPos::one(), |acc, (a, u)| acc * u.get(a));
            if dirs.is_zero() {
                continue;
            }
            weight = weight + nat(&(&qf / factorial(&m))) * power(x, &m) * dirs;
        }
        if weight.is_zero() {
            continue;
        }
        for (b, c) in row {
            let e = out.entry(b.clone()).or_insert_with(RatPos::zero);
            *e = e.clone() + weight.clone() * c.clone();
        }
    }
    Ok(Vector::new(t.cod(), out))
}

fn check_family(t: &Morphism<RatPos>, xs: &[Vector]) -> Result<Obj> {
    let input = series_input(t)?;
    if xs.len() != t.bounds().s + 1 {
        return Err(Error::Arity(format!(
            "expected {} vectors (degrees 0..={}), got {}",
            t.bounds().s + 1,
            t.bounds().s,
            xs.len()
        )));
    }
    for x in xs {
        check_web(&input, x)?;
    }
    Ok(input)
}

/// Component `n` is `Σ_{μ ∈ mpart(n)} (1/μ!) Deriv^{|μ|}(x(0))(x(i) repeated μ(i) times)`.
pub fn taylor_functional(t: &Morphism<RatPos>, xs: &[Vector]) -> Result<Vec<Vector>> {
    check_family(t, xs)?;
    let mut comps = Vec::with_capacity(xs.len());
    for n in 0..xs.len() {
        let mut acc = Vector::zero(t.cod());
        for mu in mpart(n) {
            let args: Vec<Vector> = mu
                .to_list()
                .iter()
                .map(|d| xs[d.as_deg().expect("degree")].clone())
                .collect();
            let k = RatPos::from_ratio(&BigUint::one(), &factorial(&mu))?;
            acc = acc.add(&deriv(t, args.len(), &xs[0], &args)?.scale(&k));
        }
        comps.push(acc);
    }
    Ok(comps)
}

/// The same components summed directly: over bags `q` of the domain and
/// ways of colouring `q` by degrees `(m₀, m₁, …)` with `Σ j·|m_j| = n`,
/// weighted by `q!/Π m_j!`.
pub fn taylor_functional_closed(t: &Morphism<RatPos>, xs: &[Vector]) -> Result<Vec<Vector>> {
    check_family(t, xs)?;
    let top = xs.len() - 1;
    let mut comps = vec![Coords::new(); xs.len()];
    for (p, row) in t.rows() {
        let q = p.as_bag().expect("bag point");
        let qf = factorial(q);
        for colouring in colourings(q, xs.len()) {
            let n: usize = colouring.iter().enumerate().map(|(j, m)| j * m.size()).sum();
            if n > top {
                continue;
            }
            let den = colouring.iter().fold(BigUint::one(), |acc, m| acc * factorial(m));
            let mut w = nat(&(&qf / den));
            for (j, m) in colouring.iter().enumerate() {
                w = w * power(&xs[j], m);
            }
            if w.is_zero() {
                continue;
            }
            let k = RatPos::one();
            let scaled: Coords = row.iter().map(|(b, c)| (b.clone(), w.clone() * c.clone())).collect();
            add_coords(&mut comps[n], &scaled, &k);
        }
    }
    Ok(comps.into_iter().map(|c| Vector::new(t.cod(), c)).collect())
}

/// Splits of `q` into `k` ordered sub-multisets.
fn colourings(q: &Multiset, k: usize) -> Vec<Vec<Multiset>> {
    let mut out = vec![vec![Multiset::new(); k]];
    for (a, mult) in q.iter() {
        let caps = vec![mult; k];
        let mut next = Vec::new();
        for partial in &out {
            for dist in crate::multiset::bounded_compositions(mult, &caps) {
                let mut c = partial.clone();
                for (j, &r) in dist.iter().enumerate() {
                    if r > 0 {
                        c[j].insert(a.clone(), r);
                    }
                }
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// `Fun(T(t))` at the S-promotion of `xs`, whose coordinate `(i,a)` is `x(i)_a`;
/// returns the components `0..=D`.
pub fn fun_of_taylor(t: &Morphism<RatPos>, xs: &[Vector]) -> Result<Vec<Vector>> {
    let input = check_family(t, xs)?;
    let b = t.bounds();
    let tt = taylor(&t.as_arrow())?.materialize(&b);
    let sx = Obj::s(&input);
    let mut coords = Coords::new();
    for (i, x) in xs.iter().enumerate() {
        for (a, c) in &x.coords {
            coords.insert(Point::graded(i, a.clone()), c.clone());
        }
    }
    let y = fun_apply(&tt, &Vector::new(&sx, coords))?;
    let mut comps = vec![Coords::new(); xs.len()];
    for (p, c) in y.coords {
        let (n, b) = p.as_graded().expect("S-point");
        if n < comps.len() {
            comps[n].insert(b.clone(), c);
        }
    }
    Ok(comps.into_iter().map(|c| Vector::new(t.cod(), c)).collect())
}

/// Outcome of [`witness_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub checked: usize,
    /// Some image could only be bounded by a sampled witness.
    pub sound_only: bool,
}

fn bound(cod: &Obj, b: &Bounds, y: &Vector, what: &str, report: &mut WitnessReport) -> Result<()> {
    report.checked += 1;
    match pcoh_member(cod, &y.coords, b) {
        Membership::Yes => Ok(()),
        Membership::Unknown => {
            report.sound_only = true;
            Ok(())
        }
        Membership::No => {
            let worst = y.coords.iter().max_by(|l, r| l.1.cmp(r.1));
            let at = worst.map(|(p, c)| format!("{p} = {c}")).unwrap_or_default();
            Err(Error::BoundViolation(format!("{what}: image leaves the bound of {cod} at {at} (mass {})", y.mass())))
        }
    }
}

/// Checks `Fun t(x) ∈ P(Y)` for every witness `x`, then the same for the sum
/// of the Taylor components at the families `(x,0,…)`, `(x/2,x/2,0,…)` and
/// `(0,x,0,…)`.
pub fn witness_check(t: &Morphism<RatPos>, witnesses: &[Vector]) -> Result<WitnessReport> {
    let mut report = WitnessReport { checked: 0, sound_only: false };
    let input = series_input(t)?;
    let top = t.bounds().s;
    let half = RatPos::ratio(1, 2);
    for (k, x) in witnesses.iter().enumerate() {
        bound(t.cod(), &t.bounds(), &fun_apply(t, x)?, &format!("witness {k}"), &mut report)?;
        let zero = Vector::zero(&input);
        let mut families = vec![vec![x.clone()], vec![x.scale(&half), x.scale(&half)]];
        if top >= 1 {
            families.push(vec![zero.clone(), x.clone()]);
        }
        for fam in families.iter_mut() {
            fam.truncate(top + 1);
            fam.resize(top + 1, zero.clone());
            let total = taylor_functional(t, fam)?
                .iter()
                .fold(Vector::zero(t.cod()), |acc, c| acc.add(c));
            bound(t.cod(), &t.bounds(), &total, &format!("Taylor components at witness {k}"), &mut report)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Base, ModelKind};
    use crate::semiring::SemiringId;

    const M: ModelKind = ModelKind::Wrel(SemiringId::RatPos);

    fn objs() -> (Obj, Obj) {
        (Obj::base(M, Base::atoms("X", &["a"])), Obj::base(M, Base::atoms("Y", &["b"])))
    }

    fn series(entries: &[(usize, u64)], b: Bounds) -> Morphism<RatPos> {
        let (x, y) = objs();
        let es = entries.iter().map(|&(k, w)| {
            (Point::bag(Multiset::with(Point::atom("a"), k)), Point::atom("b"), RatPos::from_u64(w))
        });
        Morphism::new(&Obj::bang(&x), &y, b, es).unwrap()
    }

    fn e_a(q: RatPos) -> Vector {
        Vector::basis(&objs().0, Point::atom("a"), q)
    }

    fn at_b(v: &Vector) -> RatPos {
        v.get(&Point::atom("b"))
    }

    #[test]
    fn quadratic_values() {
        let b = Bounds::new(3, 3);
        let t = series(&[(2, 1)], b);
        let x = e_a(RatPos::from_u64(3));
        let u = e_a(RatPos::from_u64(5));
        assert_eq!(at_b(&fun_apply(&t, &x).unwrap()), RatPos::from_u64(9));
        assert_eq!(at_b(&deriv(&t, 1, &x, std::slice::from_ref(&u)).unwrap()), RatPos::from_u64(30));
        let z = Vector::zero(&objs().0);
        assert_eq!(at_b(&deriv(&t, 2, &z, &[u.clone(), u]).unwrap()), RatPos::from_u64(50));
        let c = series(&[(0, 1)], b);
        assert!(deriv(&c, 1, &x, &[e_a(RatPos::one())]).unwrap().coords.is_empty());
    }

    #[test]
    fn fun_is_not_injective() {
        let b = Bounds::new(3, 3);
        let inf_series = |k: usize| {
            let (x, y) = objs();
            let m = Point::bag(Multiset::with(Point::atom("a"), k));
            Morphism::new(&Obj::bang(&x), &y, b, [(m, Point::atom("b"), RatPos::Inf)]).unwrap()
        };
        let (s1, s2) = (inf_series(1), inf_series(2));
        assert_ne!(s1, s2);
        for q in [RatPos::zero(), RatPos::ratio(1, 3), RatPos::one(), RatPos::from_u64(7), RatPos::Inf] {
            let x = e_a(q);
            assert_eq!(fun_apply(&s1, &x).unwrap(), fun_apply(&s2, &x).unwrap());
        }
    }

    #[test]
    fn functional_forms_agree() {
        let b = Bounds::new(3, 3);
        let t = series(&[(0, 1), (1, 2), (2, 1), (3, 4)], b);
        let xs = vec![
            e_a(RatPos::ratio(1, 2)),
            e_a(RatPos::ratio(1, 3)),
            e_a(RatPos::from_u64(2)),
            e_a(RatPos::ratio(3, 7)),
        ];
        let f = taylor_functional(&t, &xs).unwrap();
        assert_eq!(f, taylor_functional_closed(&t, &xs).unwrap());
        assert_eq!(f, fun_of_taylor(&t, &xs).unwrap());
    }

    #[test]
    fn quadratic_components() {
        let t = series(&[(2, 1)], Bounds::new(3, 3));
        let z = Vector::zero(&objs().0);
        let xs = vec![z.clone(), e_a(RatPos::one()), z.clone(), z];
        let comps: Vec<RatPos> = taylor_functional(&t, &xs).unwrap().iter().map(at_b).collect();
        assert_eq!(comps, vec![RatPos::zero(), RatPos::zero(), RatPos::one(), RatPos::zero()]);
    }

    #[test]
    fn pcoh_bounds() {
        let p = ModelKind::Pcoh;
        let x = Obj::base(p, Base::atoms("X", &["a"]));
        let y = Obj::base(p, Base::atoms("Y", &["b"]));
        let b = Bounds::new(2, 2);
        let bag = |k| Point::bag(Multiset::with(Point::atom("a"), k));
        let t = Morphism::new(
            &Obj::bang(&x),
            &y,
            b,
            [(bag(1), Point::atom("b"), RatPos::one()), (bag(2), Point::atom("b"), RatPos::one())],
        )
        .unwrap();
        let ea = Vector::basis(&x, Point::atom("a"), RatPos::one());
        assert!(matches!(witness_check(&t, &[ea]), Err(Error::BoundViolation(_))));
        let q = Morphism::new(&Obj::bang(&x), &y, b, [(bag(2), Point::atom("b"), RatPos::one())]).unwrap();
        let half = Vector::basis(&x, Point::atom("a"), RatPos::ratio(1, 2));
        let xs = vec![half.clone(), Vector::zero(&x), Vector::zero(&x)];
        let total = taylor_functional(&q, &xs).unwrap().iter().fold(Vector::zero(&y), |a, c| a.add(c));
        assert_eq!(total.mass(), RatPos::ratio(1, 4));
        assert!(witness_check(&q, &[half]).is_ok());
    }
}
