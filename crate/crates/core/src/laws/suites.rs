use num_traits::{One, Zero};
use rand::Rng;

use super::gen::{gen_base, gen_morphism, gen_scalar, gen_vector, rng};
use super::{max_denominator, CheckReport, Config, Ctx, Job, Params, Suite};
use crate::analytic::{deriv, fun_apply, fun_of_taylor, taylor_functional, taylor_functional_closed, witness_check, Vector};
use crate::error::Result;
use crate::exponential::{bang, contr, der, dig, kleisli, seely0, seely0_inv, seely2, seely2_inv, weak, ocmonz, ocmont};
use crate::model::structural::{assoc_inv, curry, ev, lunit, sym, uncurry};
use crate::model::{partial_sum, pcoh_witnesses, validate, Arrow, Bounds, Grading, ModelKind, Morphism, Obj, Row};
use crate::multiset::{Multiset, Point};
use crate::semiring::{Bool, RatPos, Semiring, SemiringId};
use crate::summability::{lift, s_map, sdist, sigma, sinj, sproddist, sproddist_inv, sproj, sstr_l, sstr_r, swap, theta, witness};
use crate::taylor::{
    coalgebra_d, counit, comult, deg_iso, homogeneous, mult, nucs_bang_e_vs_degrees, sdl_explicit, sdl_pipeline, taylor,
    taylor_composite, unit, w,
};
use crate::with_semiring;

pub(super) fn jobs(suite: Suite, p: &Params) -> Vec<Job> {
    match suite {
        Suite::Semiring => semiring_jobs(p),
        Suite::SigmaMonoid => grid_jobs(suite, p, &p.web_sizes, true, sigma_checks),
        Suite::Category => grid_jobs(suite, p, &p.web_sizes, true, category_checks),
        Suite::Exponential => {
            let mut jobs = grid_jobs(suite, p, &p.web_sizes, false, exponential_structural);
            jobs.extend(grid_jobs(suite, p, &p.web_sizes, true, exponential_checks));
            jobs
        }
        Suite::SBimonad => grid_jobs(suite, p, &p.web_sizes, false, bimonad_checks),
        Suite::SdlAxioms => grid_jobs(suite, p, &p.web_sizes, false, sdl_checks),
        Suite::OracleSdl => {
            let sizes: Vec<usize> = p.web_sizes.iter().copied().filter(|&k| k <= 2).collect();
            let mut jobs = grid_jobs(suite, p, &sizes, false, oracle_checks);
            jobs.extend(contrast_jobs(p));
            jobs
        }
        Suite::FaaDiBruno => {
            let sizes: Vec<usize> = p.web_sizes.iter().copied().filter(|&k| k <= 2).collect();
            grid_jobs(suite, p, &sizes, true, faa_checks)
        }
        Suite::DegIso => deg_iso_jobs(p),
        Suite::Functional => functional_jobs(p),
        Suite::NegativeNucs => vec![negative_job(p)],
    }
}

fn job<F: FnOnce() -> Vec<CheckReport> + Send + 'static>(f: F) -> Job {
    Box::new(f)
}

fn fail_at<T: std::fmt::Display>(what: &str, at: T) -> std::result::Result<Option<String>, String> {
    Err(format!("{what} fails at {at}"))
}

fn ok() -> std::result::Result<Option<String>, String> {
    Ok(None)
}

// ------------------------------------------------------------ SEMIRING

fn semiring_jobs(p: &Params) -> Vec<Job> {
    [SemiringId::Bool, SemiringId::NatInf, SemiringId::RatPos]
        .into_iter()
        .map(|id| {
            let seeds = p.seeds.clone();
            let ctx = Ctx::new(Suite::Semiring, p, Config::new(id.name(), None, None, None));
            job(move || with_semiring!(id, S => semiring_checks::<S>(&ctx, &seeds)))
        })
        .collect()
}

fn samples<S: Semiring>(seeds: &[u64]) -> Vec<S> {
    let mut xs = vec![S::zero(), S::one()];
    if let Ok(inf) = S::decode("inf") {
        xs.push(inf);
    }
    for &s in seeds {
        xs.push(gen_scalar(&mut rng(s, 0x5E)));
    }
    xs
}

fn semiring_checks<S: Semiring>(ctx: &Ctx, seeds: &[u64]) -> Vec<CheckReport> {
    let xs = samples::<S>(seeds);
    let triples = |law: &dyn Fn(&S, &S, &S) -> bool| {
        for a in &xs {
            for b in &xs {
                for c in &xs {
                    if !law(a, b, c) {
                        return fail_at("law", format!("({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(Some(format!("{} triples", xs.len().pow(3))))
    };
    let add = |a: &S, b: &S| a.clone() + b.clone();
    let mul = |a: &S, b: &S| a.clone() * b.clone();
    vec![
        ctx.holds("addition", || {
            triples(&|a, b, c| add(a, &add(b, c)) == add(&add(a, b), c) && add(a, b) == add(b, a))
        }),
        ctx.holds("multiplication", || {
            triples(&|a, b, c| mul(a, &mul(b, c)) == mul(&mul(a, b), c) && mul(a, b) == mul(b, a))
        }),
        ctx.holds("distributivity", || triples(&|a, b, c| mul(a, &add(b, c)) == add(&mul(a, b), &mul(a, c)))),
        ctx.holds("units", || {
            triples(&|a, _, _| add(a, &S::zero()) == *a && mul(a, &S::one()) == *a && mul(a, &S::zero()).is_zero())
        }),
        ctx.holds("naturals", || {
            for m in 0u64..8 {
                for n in 0u64..8 {
                    let (fm, fnn) = (S::from_u64(m), S::from_u64(n));
                    if S::from_u64(m + n) != add(&fm, &fnn) || S::from_u64(m * n) != mul(&fm, &fnn) {
                        return fail_at("the map from the naturals", format!("({m}, {n})"));
                    }
                }
            }
            ok()
        }),
        ctx.holds("encoding", || {
            for a in &xs {
                if S::decode(&a.encode()).as_ref() != Ok(a) {
                    return fail_at("decode ∘ encode", a);
                }
            }
            ok()
        }),
        ctx.holds("inverse-factorials", || {
            for n in 0u64..8 {
                if let Ok(inv) = S::inv_factorial(n) {
                    let f = S::from_nat(&crate::multiset::factorial_u64(n));
                    if mul(&f, &inv) != S::one() {
                        return fail_at("n! · 1/n! = 1", n);
                    }
                }
            }
            ok()
        }),
    ]
}

// ------------------------------------------------------------ grid

/// Objects `X, Y, Z, W` of one size, sampled from `seed`.
struct Objs {
    x: Obj,
    y: Obj,
    z: Obj,
    w: Obj,
}

fn objs(model: ModelKind, size: usize, seed: u64) -> Objs {
    Objs {
        x: gen_base(model, "X", size, seed),
        y: gen_base(model, "Y", size, seed),
        z: gen_base(model, "Z", size, seed),
        w: gen_base(model, "W", size, seed),
    }
}

fn randomized(model: ModelKind) -> bool {
    model.is_coherence() || model == ModelKind::Pcoh
}

type Checks = fn(&Ctx, &Objs, u64, &Bounds) -> Vec<CheckReport>;

/// One job per model, web size, bound and seed. When `per_seed` is false
/// the seed only samples the webs, so seeds giving the same webs are
/// skipped.
fn grid_jobs(suite: Suite, p: &Params, sizes: &[usize], per_seed: bool, checks: Checks) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &model in &p.models {
        for &size in sizes {
            let mut seen: Vec<(Obj, Obj)> = Vec::new();
            let mut seeds = Vec::new();
            for &seed in &p.seeds {
                if per_seed {
                    seeds.push(Some(seed));
                    continue;
                }
                if !randomized(model) {
                    seeds.push(None);
                    break;
                }
                let o = objs(model, size, seed);
                if !seen.contains(&(o.x.clone(), o.y.clone())) {
                    seen.push((o.x, o.y));
                    seeds.push(Some(seed));
                }
            }
            for b in p.bounds() {
                for &seed in &seeds {
                    let cfg = Config::new(model.name(), Some(size), Some(&b), seed);
                    let ctx = Ctx::new(suite, p, cfg);
                    let seed = seed.unwrap_or(0);
                    jobs.push(job(move || checks(&ctx, &objs(model, size, seed), seed, &b)));
                }
            }
        }
    }
    jobs
}

// ------------------------------------------------------------ SIGMA_MONOID

fn sigma_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => sigma_generic::<S>(ctx, o, seed, b))
}

fn split<S: Semiring>(f: &Morphism<S>, parts: usize, seed: u64) -> Vec<Morphism<S>> {
    let mut r = rng(seed, 0x5917);
    let mut buckets: Vec<Vec<(Point, Point, S)>> = vec![Vec::new(); parts];
    for (p, q, c) in f.entries() {
        buckets[r.gen_range(0..parts)].push((p.clone(), q.clone(), c.clone()));
    }
    buckets
        .into_iter()
        .map(|es| Morphism::new(f.dom(), f.cod(), f.bounds(), es).expect("same webs"))
        .collect()
}

fn sigma_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y, z) = (&o.x, &o.y, &o.z);
    let m = x.model();
    let gen = |d: &Obj, c: &Obj, dens: f64, k: u64| gen_morphism::<S>(d, c, dens, seed * 16 + k, b);
    let (f, g, h) = (gen(x, y, 0.3, 1), gen(x, y, 0.3, 2), gen(x, y, 0.3, 3));
    let k = gen(y, z, 0.5, 4);
    let big = gen(x, y, 0.7, 5);
    let kf = gen(&Obj::bang(x), y, 0.5, 6);
    let sum = |fs: &[Morphism<S>]| partial_sum(fs).ok();
    let must_split = m != ModelKind::Nucs;
    let split_check = |h: &Morphism<S>, salt: u64| {
        for parts in 2..=3 {
            match sum(&split(h, parts, seed ^ salt)) {
                Some(s) if &s == h => {}
                Some(_) => return fail_at("Σ of a split", format!("{parts} parts")),
                None if must_split => return fail_at("summability of a split", format!("{parts} parts")),
                None => {}
            }
        }
        ok()
    };
    vec![
        ctx.holds("sum-zero", || {
            let zero = Morphism::zero(x, y, *b);
            if sum(&[f.clone(), zero.clone()]) == Some(f.clone()) && sum(&[zero, f.clone()]) == Some(f.clone()) {
                ok()
            } else {
                fail_at("f + 0 = f", "a sampled f")
            }
        }),
        ctx.holds("sum-comm", || {
            if sum(&[f.clone(), g.clone()]) == sum(&[g.clone(), f.clone()]) {
                ok()
            } else {
                fail_at("f + g = g + f", "a sampled pair")
            }
        }),
        ctx.holds("sum-assoc", || {
            let all = sum(&[f.clone(), g.clone(), h.clone()]);
            let left = sum(&[f.clone(), g.clone()]).and_then(|fg| sum(&[fg, h.clone()]));
            let right = sum(&[g.clone(), h.clone()]).and_then(|gh| sum(&[f.clone(), gh]));
            if all == left && all == right {
                Ok(Some(format!("defined: {}", all.is_some())))
            } else {
                fail_at("associativity of partial sums", "a sampled triple")
            }
        }),
        ctx.holds("split", || split_check(&big, 0x51)),
        ctx.holds("split-kleisli", || split_check(&kf, 0x52)),
        ctx.holds("compose-distributes", || {
            let Some(s) = sum(&[f.clone(), g.clone()]) else { return Ok(Some("f + g undefined".into())) };
            let (kf1, kg1) = (Morphism::compose(&k, &f), Morphism::compose(&k, &g));
            let lhs = Morphism::compose(&k, &s).ok();
            match (kf1, kg1) {
                (Ok(a), Ok(c)) if sum(&[a.clone(), c.clone()]) == lhs => ok(),
                _ => fail_at("k∘(f+g) = k∘f + k∘g", "a sampled pair"),
            }
        }),
        ctx.holds("witness", || {
            let Some(s) = sum(&[f.clone(), g.clone()]) else { return Ok(Some("f + g undefined".into())) };
            let wt = witness(&[f.clone(), g.clone()]).map_err(|e| e.to_string())?;
            let sig = sigma::<S>(y).materialize(b);
            let mut good = Morphism::compose(&sig, &wt).ok() == Some(s);
            for (i, fi) in [&f, &g].into_iter().enumerate() {
                let pi = sproj::<S>(y, i).materialize(b);
                good &= Morphism::compose(&pi, &wt).ok().as_ref() == Some(fi);
            }
            if good {
                ok()
            } else {
                fail_at("σ∘⟨f,g⟩ = f+g and πᵢ∘⟨f,g⟩ = fᵢ", "a sampled pair")
            }
        }),
    ]
}

// ------------------------------------------------------------ CATEGORY

fn category_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => category_generic::<S>(ctx, o, seed, b))
}

fn category_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y, z) = (&o.x, &o.y, &o.z);
    let gen = |d: &Obj, c: &Obj, k: u64| gen_morphism::<S>(d, c, 0.5, seed * 16 + k, b);
    let (f, g, h) = (gen(x, y, 1), gen(y, z, 2), gen(z, x, 3));
    let k = gen(&Obj::tensor(x, y), z, 4);
    let (fa, ga, ha) = (f.as_arrow(), g.as_arrow(), h.as_arrow());
    let mut out = vec![
        ctx.holds("compose-assoc", || {
            let l = Morphism::compose(&h, &Morphism::compose(&g, &f).map_err(|e| e.to_string())?);
            let r = Morphism::compose(&Morphism::compose(&h, &g).map_err(|e| e.to_string())?, &f);
            if l.ok() == r.ok() {
                ok()
            } else {
                fail_at("h∘(g∘f) = (h∘g)∘f", "a sampled triple")
            }
        }),
        ctx.holds("identity", || {
            let l = Morphism::compose(&Morphism::identity(y, *b), &f).ok();
            let r = Morphism::compose(&f, &Morphism::identity(x, *b)).ok();
            if l.as_ref() == Some(&f) && r.as_ref() == Some(&f) {
                ok()
            } else {
                fail_at("id∘f = f = f∘id", "a sampled f")
            }
        }),
        ctx.law("tensor-functor", b, |_| {
            Ok(vec![(
                Arrow::tensor(&ga, &ha).after(&Arrow::tensor(&fa, &ga))?,
                Arrow::tensor(&ga.after(&fa)?, &ha.after(&ga)?),
            )])
        }),
        ctx.law("symmetry", b, |_| {
            Ok(vec![
                (sym::<S>(y, x).after(&sym(x, y))?, Arrow::identity(&Obj::tensor(x, y))),
                (sym::<S>(y, z).after(&Arrow::tensor(&fa, &ga))?, Arrow::tensor(&ga, &fa).after(&sym(x, y))?),
            ])
        }),
        ctx.law("closed", b, |bb| {
            let c = curry(&k.as_arrow(), bb)?;
            Ok(vec![
                (uncurry(&c)?, k.as_arrow()),
                (ev::<S>(y, z).after(&Arrow::tensor(&c, &Arrow::identity(y)))?, k.as_arrow()),
            ])
        }),
    ];
    if randomized(x.model()) {
        out.push(ctx.holds("validity", || {
            let gf = Morphism::compose(&g, &f).map_err(|e| e.to_string())?;
            let fg = Morphism::tensor(&f, &g).map_err(|e| e.to_string())?;
            for (what, m) in [("g∘f", gf), ("f⊗g", fg)] {
                let v = validate(&m);
                if !v.valid {
                    return Err(format!("{what} is not a morphism: {}", v.detail.unwrap_or_default()));
                }
            }
            ok()
        }));
    }
    out
}

// ------------------------------------------------------------ EXPONENTIAL

fn exponential_structural(ctx: &Ctx, o: &Objs, _seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => exponential_structural_generic::<S>(ctx, o, b))
}

fn exponential_structural_generic<S: Semiring>(ctx: &Ctx, o: &Objs, b: &Bounds) -> Vec<CheckReport> {
    let (x, y) = (&o.x, &o.y);
    let (bx, by) = (Obj::bang(x), Obj::bang(y));
    vec![
        ctx.law("comonad", b, |bb| {
            let d = dig::<S>(x, bb);
            Ok(vec![
                (der::<S>(&bx).after(&d)?, Arrow::identity(&bx)),
                (bang(&der::<S>(x)).after(&d)?, Arrow::identity(&bx)),
                (dig::<S>(&bx, bb).after(&d)?, bang(&d).after(&d)?),
            ])
        }),
        ctx.law("seely", b, |_| {
            let m = x.model();
            Ok(vec![
                (seely2::<S>(x, y).after(&seely2_inv(x, y))?, Arrow::identity(&Obj::bang(&Obj::with2(x, y)))),
                (seely2_inv::<S>(x, y).after(&seely2(x, y))?, Arrow::identity(&Obj::tensor(&bx, &by))),
                (seely0::<S>(m).after(&seely0_inv(m))?, Arrow::identity(&Obj::bang(&Obj::top(m)))),
                (seely0_inv::<S>(m).after(&seely0(m))?, Arrow::identity(&Obj::unit(m))),
            ])
        }),
        ctx.law("comonoid", b, |_| {
            let c = contr::<S>(x);
            let id = Arrow::<S>::identity(&bx);
            Ok(vec![
                (Arrow::chain(&[c.clone(), Arrow::tensor(&weak(x), &id), lunit(&bx)])?, id.clone()),
                (
                    Arrow::tensor(&c, &id).after(&c)?,
                    Arrow::chain(&[c.clone(), Arrow::tensor(&id, &c), assoc_inv(&bx, &bx, &bx)])?,
                ),
                (sym::<S>(&bx, &bx).after(&c)?, c.clone()),
            ])
        }),
    ]
}

/// `hg • kf` meets up to d² copies of `kf([])` when the other side meets d
/// blocks of d copies, so its outer digging needs the wider pad.
fn kleisli_bounds<S: Semiring>(kf: &Arrow<S>, b: &Bounds) -> Bounds {
    if kf.row(&Point::bag(Multiset::new())).is_empty() {
        *b
    } else {
        b.with_pad(b.pad.max(b.bang * b.bang))
    }
}

fn exponential_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => exponential_generic::<S>(ctx, o, seed, b))
}

fn exponential_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y, z, wo) = (&o.x, &o.y, &o.z, &o.w);
    let gen = |d: &Obj, c: &Obj, dens: f64, k: u64| gen_morphism::<S>(d, c, dens, seed * 16 + k, b).as_arrow();
    let (f, g) = (gen(x, y, 0.5, 1), gen(y, z, 0.5, 2));
    let (bx, by, bz) = (Obj::bang(x), Obj::bang(y), Obj::bang(z));
    let (kg, kh) = (gen(&by, z, 0.3, 4), gen(&bz, wo, 0.3, 5));
    // at most one target at the empty bag keeps the padded bags uniform
    let kf = {
        let m = gen_morphism::<S>(&bx, y, 0.3, seed * 16 + 3, b);
        let empty = Point::bag(Multiset::new());
        let first = m.row(&empty).into_keys().next();
        m.filter(|p, q| *p != empty || Some(q) == first.as_ref()).as_arrow()
    };
    let mut out = vec![
        ctx.law("functor", b, |_| {
            Ok(vec![
                (bang(&g.after(&f)?), bang(&g).after(&bang(&f))?),
                (bang(&Arrow::<S>::identity(x)), Arrow::identity(&bx)),
            ])
        }),
        ctx.law("der-natural", b, |_| Ok(vec![(der::<S>(y).after(&bang(&f))?, f.after(&der(x))?)])),
        ctx.law("dig-natural", b, |bb| {
            Ok(vec![(dig::<S>(y, bb).after(&bang(&f))?, bang(&bang(&f)).after(&dig(x, bb))?)])
        }),
        ctx.law("kleisli", b, |bb| {
            let gf = kleisli(&kg, &kf, bb)?.cached();
            let hg = kleisli(&kh, &kg, bb)?.cached();
            Ok(vec![
                (kleisli(&kh, &gf, bb)?, kleisli(&hg, &kf, &kleisli_bounds(&kf, bb))?),
                (kleisli(&kf, &der(x), bb)?, kf.clone()),
                (kleisli(&der(y), &kf, bb)?, kf.clone()),
            ])
        }),
    ];
    if randomized(x.model()) {
        out.push(ctx.holds("validity", || {
            let cands = [("!f", bang(&f)), ("kg•kf", kleisli(&kg, &kf, b).map_err(|e| e.to_string())?)];
            for (what, a) in cands {
                let v = validate(&a.materialize(b));
                if !v.valid {
                    return Err(format!("{what} is not a morphism: {}", v.detail.unwrap_or_default()));
                }
            }
            ok()
        }));
    }
    out
}

// ------------------------------------------------------------ S_BIMONAD

fn bimonad_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => bimonad_generic::<S>(ctx, o, seed, b))
}

fn bimonad_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y) = (&o.x, &o.y);
    let (sx, ssx) = (Obj::s(x), Obj::s(&Obj::s(x)));
    let f = gen_morphism::<S>(x, y, 0.5, seed * 16 + 1, b).as_arrow();
    let id = |o: &Obj| Arrow::<S>::identity(o);
    vec![
        ctx.law("monad", b, |_| {
            Ok(vec![
                (theta::<S>(x).after(&sinj(&sx, 0))?, id(&sx)),
                (theta::<S>(x).after(&s_map(&sinj(x, 0)))?, id(&sx)),
                (theta::<S>(x).after(&theta(&sx))?, theta::<S>(x).after(&s_map(&theta(x)))?),
            ])
        }),
        ctx.law("comonad", b, |_| {
            Ok(vec![
                (sigma::<S>(&sx).after(&lift(x))?, id(&sx)),
                (s_map(&sigma::<S>(x)).after(&lift(x))?, id(&sx)),
                (lift::<S>(&sx).after(&lift(x))?, s_map(&lift::<S>(x)).after(&lift(x))?),
            ])
        }),
        ctx.law("mixed", b, |_| {
            let rhs = Arrow::chain(&[
                s_map(&lift::<S>(x)),
                lift(&ssx),
                s_map(&swap(&sx)),
                theta(&ssx),
                s_map(&theta(x)),
            ])?;
            Ok(vec![
                (sigma::<S>(x).after(&theta(x))?, sigma::<S>(x).after(&s_map(&sigma(x)))?),
                (lift::<S>(x).after(&sinj(x, 0))?, s_map(&sinj::<S>(x, 0)).after(&sinj(x, 0))?),
                (sigma::<S>(x).after(&sinj(x, 0))?, id(x)),
                (lift::<S>(x).after(&theta(x))?, rhs),
            ])
        }),
        ctx.law("swap", b, |_| {
            let c = swap::<S>(x);
            Ok(vec![
                (c.after(&c)?, id(&ssx)),
                (c.after(&sinj(&sx, 0))?, s_map(&sinj(x, 0))),
                (sigma::<S>(&sx).after(&c)?, s_map(&sigma(x))),
                (s_map(&sigma::<S>(x)).after(&c)?, sigma(&sx)),
                (c.after(&lift(x))?, lift(x)),
            ])
        }),
        ctx.law("yang-baxter", b, |_| {
            let (sc, cs) = (s_map(&swap::<S>(x)), swap::<S>(&sx));
            Ok(vec![(
                Arrow::chain(&[sc.clone(), cs.clone(), sc.clone()])?,
                Arrow::chain(&[cs.clone(), sc, cs])?,
            )])
        }),
        ctx.law("projections", b, |_| {
            let mut ds = Vec::new();
            for i in 0..=b.s {
                let terms: Vec<Arrow<S>> = (0..=i)
                    .map(|j| sproj::<S>(x, i - j).after(&sproj(&sx, j)))
                    .collect::<Result<_>>()?;
                ds.push((sproj::<S>(x, i).after(&theta(x))?, Arrow::sum_unchecked(&ssx, x, &terms)));
                for j in 0..=b.s {
                    let rhs = if i == j { id(x) } else { Arrow::zero(x, x) };
                    ds.push((sproj::<S>(x, j).after(&sinj(x, i))?, rhs));
                }
            }
            Ok(ds)
        }),
        ctx.law("sdist", b, |_| {
            let sy = Obj::s(y);
            let xy = Obj::tensor(x, y);
            Ok(vec![
                (
                    Arrow::chain(&[sstr_r::<S>(&sx, y), s_map(&sstr_l(x, y)), theta(&xy)])?,
                    sdist(x, y),
                ),
                (
                    Arrow::chain(&[sstr_l::<S>(x, &sy), s_map(&sstr_r(x, y)), theta(&xy)])?,
                    sdist(x, y),
                ),
            ])
        }),
        ctx.law("sproddist", b, |_| {
            let xs = [x.clone(), y.clone()];
            let (sxy, sxsy) = (Obj::s(&Obj::with(&xs)), Obj::with2(&sx, &Obj::s(y)));
            Ok(vec![
                (sproddist::<S>(&xs).after(&sproddist_inv(&xs))?, id(&sxsy)),
                (sproddist_inv::<S>(&xs).after(&sproddist(&xs))?, id(&sxy)),
            ])
        }),
        ctx.law("naturality", b, |_| {
            let (sf, ssf) = (s_map(&f), s_map(&s_map(&f)));
            Ok(vec![
                (sf.after(&sinj(x, 0))?, sinj::<S>(y, 0).after(&f)?),
                (sigma::<S>(y).after(&sf)?, f.after(&sigma(x))?),
                (theta::<S>(y).after(&ssf)?, sf.after(&theta(x))?),
                (lift::<S>(y).after(&sf)?, ssf.after(&lift(x))?),
                (swap::<S>(y).after(&ssf)?, ssf.after(&swap(x))?),
            ])
        }),
    ]
}

// ------------------------------------------------------------ SDL_AXIOMS

fn sdl_checks(ctx: &Ctx, o: &Objs, _seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => sdl_generic::<S>(ctx, &o.x, &o.y, b))
}

/// The seven axioms of a Taylor distributive law and the two corollaries
/// on the comonoid structure.
fn sdl_generic<S: Semiring>(ctx: &Ctx, x: &Obj, y: &Obj, b: &Bounds) -> Vec<CheckReport> {
    let d = |o: &Obj| sdl_explicit::<S>(o).cached();
    let (sx, bx) = (Obj::s(x), Obj::bang(x));
    let dx = d(x);
    let sd = s_map(&dx);
    let s_then = |inner: &Obj| -> Result<Arrow<S>> { sd.after(&d(inner)) };
    vec![
        ctx.law("∂-chain", b, |bb| {
            Ok(vec![
                (s_map(&der::<S>(x)).after(&dx)?, der(&sx)),
                (
                    s_map(&dig::<S>(x, bb)).after(&dx)?,
                    Arrow::chain(&[dig(&sx, bb), bang(&dx), d(&bx)])?,
                ),
            ])
        }),
        ctx.law("∂-local", b, |_| Ok(vec![(sproj::<S>(&bx, 0).after(&dx)?, bang(&sproj(x, 0)))])),
        ctx.law("∂-add", b, |_| {
            Ok(vec![
                (dx.after(&bang(&sinj(x, 0)))?, sinj(&bx, 0)),
                (theta::<S>(&bx).after(&s_then(&sx)?)?, dx.after(&bang(&theta(x)))?),
            ])
        }),
        ctx.law("∂-Schwarz", b, |_| {
            Ok(vec![(swap::<S>(&bx).after(&s_then(&sx)?)?, s_then(&sx)?.after(&bang(&swap(x)))?)])
        }),
        ctx.law("∂-lin", b, |_| Ok(vec![(lift::<S>(&bx).after(&dx)?, s_then(&sx)?.after(&bang(&lift(x)))?)])),
        ctx.law("∂-&", b, |_| {
            let by = Obj::bang(y);
            let xs = [x.clone(), y.clone()];
            let lhs = Arrow::chain(&[Arrow::tensor(&dx, &d(y)), sdist(&bx, &by), s_map(&seely2(x, y))])?;
            let rhs = Arrow::chain(&[
                seely2(&sx, &Obj::s(y)),
                bang(&sproddist_inv(&xs)),
                d(&Obj::with(&xs)),
            ])?;
            Ok(vec![(lhs, rhs)])
        }),
        ctx.law("∂-analytic", b, |_| Ok(vec![(sigma::<S>(&bx).after(&dx)?, bang(&sigma(x)))])),
        ctx.law("weakening", b, |_| {
            Ok(vec![(s_map(&weak::<S>(x)).after(&dx)?, sinj::<S>(&Obj::unit(x.model()), 0).after(&weak(&sx))?)])
        }),
        ctx.law("contraction", b, |_| {
            let rhs = Arrow::chain(&[contr(&sx), Arrow::tensor(&dx, &dx), sdist(&bx, &bx)])?;
            Ok(vec![(s_map(&contr::<S>(x)).after(&dx)?, rhs)])
        }),
    ]
}

// ------------------------------------------------------------ ORACLE_SDL

fn oracle_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => oracle_generic::<S>(ctx, o, seed, b))
}

fn oracle_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y) = (&o.x, &o.y);
    let s = gen_morphism::<S>(&Obj::bang(x), y, 0.4, seed * 16 + 1, b).as_arrow();
    let f = gen_morphism::<S>(x, y, 0.5, seed * 16 + 2, b).as_arrow();
    let mut closed = ctx.law("taylor-closed=composite", b, |bb| Ok(vec![(taylor(&s)?, taylor_composite(&s, bb)?)]));
    if S::ID == SemiringId::RatPos && closed.passed() {
        if let Ok(t) = taylor(&s) {
            closed.note = Some(format!("max denominator {}", max_denominator(&t, b)));
        }
    }
    vec![
        ctx.law("explicit=pipeline", b, |bb| Ok(vec![(sdl_explicit::<S>(x), sdl_pipeline(x, bb)?)])),
        closed,
        ctx.law("∂-natural", b, |_| {
            Ok(vec![(
                s_map(&bang(&f)).after(&sdl_explicit(x))?,
                sdl_explicit::<S>(y).after(&bang(&s_map(&f)))?,
            )])
        }),
    ]
}

/// `T(s)` for `s = {([a,a],b)}`: only equal degrees survive in COH, every
/// pair of degrees in WCS.
fn contrast_jobs(p: &Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for b in p.bounds() {
        for model in [ModelKind::Coh, ModelKind::Wcs] {
            let ctx = Ctx::new(Suite::OracleSdl, p, Config::new(model.name(), Some(1), Some(&b), None));
            jobs.push(job(move || vec![ctx.holds("coh-wcs-quadratic", || quadratic_contrast(model, &b))]));
        }
    }
    jobs
}

fn quadratic_contrast(model: ModelKind, b: &Bounds) -> std::result::Result<Option<String>, String> {
    let (a, bb) = (Point::atom("a"), Point::atom("b"));
    let mut base = crate::model::Base::atoms("X", &["a"]);
    if model == ModelKind::Wcs {
        base = base.reflexive();
    }
    let x = Obj::base(model, base);
    let mut ybase = crate::model::Base::atoms("Y", &["b"]);
    if model == ModelKind::Wcs {
        ybase = ybase.reflexive();
    }
    let y = Obj::base(model, ybase);
    let aa = Point::bag(Multiset::with(a.clone(), 2));
    let s = Morphism::<Bool>::new(&Obj::bang(&x), &y, *b, [(aa, bb.clone(), Bool(true))]).map_err(|e| e.to_string())?;
    let t = taylor(&s.as_arrow()).map_err(|e| e.to_string())?;
    let got: std::collections::BTreeSet<(Point, Point)> = t
        .region_rows(b)
        .into_iter()
        .flat_map(|(p, row)| row.into_keys().map(move |q| (p.clone(), q)))
        .collect();
    let mut want = std::collections::BTreeSet::new();
    for i in 0..=b.s {
        for j in i..=b.s {
            if model == ModelKind::Coh && i != j {
                continue;
            }
            let p = Point::bag(Multiset::from_iter([Point::graded(i, a.clone()), Point::graded(j, a.clone())]));
            let q = Point::graded(i + j, bb.clone());
            if b.in_region(&p) && b.in_region(&q) {
                want.insert((p, q));
            }
        }
    }
    if got == want {
        Ok(Some(format!("{} entries", got.len())))
    } else {
        Err(format!("T(s) has {} entries, expected {}", got.len(), want.len()))
    }
}

// ------------------------------------------------------------ FAA_DI_BRUNO

fn faa_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    with_semiring!(o.x.model().semiring(), S => faa_generic::<S>(ctx, o, seed, b))
}

fn faa_generic<S: Semiring>(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y, z) = (&o.x, &o.y, &o.z);
    let (bx, by) = (Obj::bang(x), Obj::bang(y));
    let f = gen_morphism::<S>(&bx, y, 0.3, seed * 16 + 1, b).as_arrow();
    let g = gen_morphism::<S>(&by, z, 0.3, seed * 16 + 2, b).as_arrow();
    let s = gen_morphism::<S>(&bx, y, 0.5, seed * 16 + 3, b);
    let sa = s.as_arrow();
    vec![
        ctx.law("functoriality", b, |bb| {
            let (tf, tg) = (taylor(&f)?.cached(), taylor(&g)?);
            Ok(vec![(taylor(&kleisli(&g, &f, bb)?)?, kleisli(&tg, &tf, bb)?)])
        }),
        ctx.law("identity", b, |_| Ok(vec![(taylor(&der::<S>(x))?, der(&Obj::s(x)))])),
        ctx.law("homogeneous", b, |_| {
            let mut ds = Vec::new();
            for n in 0..=b.s.min(b.bang) {
                let part = sa.clone();
                let only_n = Arrow::new(bx.clone(), y.clone(), &format!("s|{n}"), Grading::ANY, move |p| {
                    if p.as_bag().is_some_and(|m| m.size() == n) {
                        part.row(p)
                    } else {
                        Row::new()
                    }
                });
                ds.push((homogeneous(&sa, n)?, only_n));
            }
            Ok(ds)
        }),
        ctx.holds("homogeneous-sum", || {
            let wide = Bounds::new(b.bang, b.s.max(b.bang));
            let parts: Vec<Morphism<S>> = (0..=b.bang)
                .map(|n| homogeneous(&sa, n).map(|h| h.materialize(&wide)))
                .collect::<Result<_>>()
                .map_err(|e| e.to_string())?;
            match partial_sum(&parts) {
                Ok(total) if total == sa.materialize(&wide) => ok(),
                Ok(_) => fail_at("Σₙ homogeneous(s, n) = s", "a sampled s"),
                Err(e) => Err(format!("the homogeneous components are not summable: {e}")),
            }
        }),
    ]
}

// ------------------------------------------------------------ DEG_ISO

fn deg_iso_jobs(p: &Params) -> Vec<Job> {
    let top = p.s_degrees.iter().chain(&p.bang_degrees).copied().max().unwrap_or(1).min(4);
    let mut jobs = Vec::new();
    for &model in &p.models {
        for n in 1..=top {
            let b = Bounds::new(n, n);
            let ctx = Ctx::new(Suite::DegIso, p, Config::new(model.name(), None, Some(&b), None));
            jobs.push(job(move || with_semiring!(model.semiring(), S => deg_iso_generic::<S>(&ctx, model, &b))));
        }
    }
    jobs
}

fn deg_iso_generic<S: Semiring>(ctx: &Ctx, model: ModelKind, b: &Bounds) -> Vec<CheckReport> {
    let (one, d) = (Obj::unit(model), Obj::degrees(model));
    vec![
        ctx.law("round-trip", b, |bb| {
            let (fwd, back) = deg_iso::<S>(model, bb)?;
            Ok(vec![(fwd.after(&back)?, Arrow::identity(&d)), (back.after(&fwd)?, Arrow::identity(&Obj::bang(&one)))])
        }),
        ctx.law("coalgebra", b, |bb| {
            let h = coalgebra_d::<S>(model, bb);
            Ok(vec![
                (der::<S>(&d).after(&h)?, Arrow::identity(&d)),
                (dig::<S>(&d, bb).after(&h)?, bang(&h).after(&h)?),
            ])
        }),
        ctx.law("bimonoid-coalgebra", b, |bb| {
            let h = coalgebra_d::<S>(model, bb);
            let hh = ocmont::<S>(&d, &d).after(&Arrow::tensor(&h, &h))?;
            let h1 = ocmonz::<S>(model, bb);
            Ok(vec![
                (hh.after(&comult(model))?, bang(&comult::<S>(model)).after(&h)?),
                (h.after(&mult(model))?, bang(&mult::<S>(model)).after(&hh)?),
                (h1.after(&counit(model))?, bang(&counit::<S>(model)).after(&h)?),
                (h.after(&unit(model, bb))?, bang(&unit::<S>(model, bb)).after(&h1)?),
                (h.after(&w(model, 0))?, bang(&w::<S>(model, 0)).after(&h1)?),
            ])
        }),
    ]
}

// ------------------------------------------------------------ FUNCTIONAL

fn functional_jobs(p: &Params) -> Vec<Job> {
    let mut models: Vec<ModelKind> =
        p.models.iter().copied().filter(|m| m.semiring() == SemiringId::RatPos).collect();
    if !models.contains(&ModelKind::Pcoh) {
        models.push(ModelKind::Pcoh);
    }
    let bounds: Vec<Bounds> = p.bounds().into_iter().filter(|b| b.bang <= 3 && b.s <= 3).collect();
    let sizes: Vec<usize> = p.web_sizes.iter().copied().filter(|&k| k <= 2).collect();
    let mut jobs = Vec::new();
    for &model in &models {
        for &size in &sizes {
            for b in &bounds {
                for &seed in &p.seeds {
                    let ctx = Ctx::new(Suite::Functional, p, Config::new(model.name(), Some(size), Some(b), Some(seed)));
                    let b = *b;
                    jobs.push(job(move || functional_checks(&ctx, &objs(model, size, seed), seed, &b)));
                }
            }
        }
    }
    jobs
}

/// Polynomials in one variable `t`, truncated at a degree.
type Poly = Vec<RatPos>;

fn poly_mul(a: &Poly, b: &Poly, deg: usize) -> Poly {
    let mut out = vec![RatPos::zero(); deg + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j <= deg {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
    }
    out
}

/// `Fun t` on a vector of polynomials, truncated at `deg`.
fn fun_poly(t: &Morphism<RatPos>, x: &std::collections::BTreeMap<Point, Poly>, deg: usize) -> std::collections::BTreeMap<Point, Poly> {
    let mut out: std::collections::BTreeMap<Point, Poly> = std::collections::BTreeMap::new();
    let mut unit_poly = vec![RatPos::zero(); deg + 1];
    unit_poly[0] = RatPos::one();
    for (p, row) in t.rows() {
        let m = p.as_bag().expect("bag point");
        let mut acc = unit_poly.clone();
        for (a, k) in m.iter() {
            let xa = x.get(a).cloned().unwrap_or_else(|| vec![RatPos::zero(); deg + 1]);
            for _ in 0..k {
                acc = poly_mul(&acc, &xa, deg);
            }
        }
        for (q, c) in row {
            let e = out.entry(q.clone()).or_insert_with(|| vec![RatPos::zero(); deg + 1]);
            for (i, v) in acc.iter().enumerate() {
                e[i] = e[i].clone() + v.clone() * c.clone();
            }
        }
    }
    out.retain(|_, p| p.iter().any(|c| !c.is_zero()));
    out
}

fn functional_checks(ctx: &Ctx, o: &Objs, seed: u64, b: &Bounds) -> Vec<CheckReport> {
    let (x, y, z) = (&o.x, &o.y, &o.z);
    let (bx, by) = (Obj::bang(x), Obj::bang(y));
    let t = gen_morphism::<RatPos>(&bx, y, 0.5, seed * 16 + 1, b);
    let g = gen_morphism::<RatPos>(&by, z, 0.5, seed * 16 + 2, b);
    let vec_at = |salt: u64| Vector::new(x, gen_vector(x, b, seed, salt));
    let xs: Vec<Vector> = (0..=b.s as u64).map(vec_at).collect();
    let (x0, u, v) = (vec_at(10), vec_at(11), vec_at(12));
    let e = |r: Result<Vec<Vector>>| r.map_err(|e| e.to_string());
    let mut out = vec![
        ctx.holds("T-functional", || {
            let a = e(taylor_functional(&t, &xs))?;
            if a != e(taylor_functional_closed(&t, &xs))? {
                return fail_at("Faà di Bruno sum = closed T-functional sum", "a sampled family");
            }
            if a != e(fun_of_taylor(&t, &xs))? {
                return fail_at("Faà di Bruno sum = Fun(T(t))", "a sampled family");
            }
            ok()
        }),
        ctx.holds("specialization", || {
            let mut fam = vec![Vector::zero(x); b.s + 1];
            fam[0] = x0.clone();
            if b.s >= 1 {
                fam[1] = u.clone();
            }
            let comps = e(taylor_functional(&t, &fam))?;
            let mut fact = RatPos::one();
            for (n, c) in comps.iter().enumerate() {
                if n > 0 {
                    fact = fact * RatPos::from_u64(n as u64);
                }
                let inv = RatPos::ratio(1, 1) * invert(&fact);
                let dn = deriv(&t, n, &x0, &vec![u.clone(); n]).map_err(|e| e.to_string())?;
                if *c != dn.scale(&inv) {
                    return fail_at("T(t)(x,u,0,…)ₙ = Derivⁿ(x)(u,…,u)/n!", n);
                }
            }
            ok()
        }),
        ctx.holds("deriv-symmetric-additive", || {
            let d2 = |p: &Vector, q: &Vector| deriv(&t, 2, &x0, &[p.clone(), q.clone()]).map_err(|e| e.to_string());
            let d1 = |p: &Vector| deriv(&t, 1, &x0, std::slice::from_ref(p)).map_err(|e| e.to_string());
            if d2(&u, &v)? != d2(&v, &u)? {
                return fail_at("symmetry of Deriv²", "a sampled pair");
            }
            if d1(&u.add(&v))? != d1(&u)?.add(&d1(&v)?) {
                return fail_at("additivity of Deriv¹", "a sampled pair");
            }
            ok()
        }),
        ctx.holds("chain-rule", || {
            let deg = b.bang;
            let lift_vec = |w: &Vector| -> std::collections::BTreeMap<Point, Poly> {
                w.coords
                    .iter()
                    .map(|(p, c)| {
                        let mut poly = vec![RatPos::zero(); deg + 1];
                        if deg >= 1 {
                            poly[1] = c.clone();
                        }
                        (p.clone(), poly)
                    })
                    .collect()
            };
            let gf = kleisli(&g.as_arrow(), &t.as_arrow(), b).map_err(|e| e.to_string())?.materialize(b);
            let xp = lift_vec(&x0);
            if fun_poly(&gf, &xp, deg) != fun_poly(&g, &fun_poly(&t, &xp, deg), deg) {
                return fail_at("Fun(g•f) = Fun g ∘ Fun f up to degree d", "a sampled pair");
            }
            ok()
        }),
    ];
    if x.model() == ModelKind::Pcoh {
        out.push(ctx.holds("boundedness", || {
            let ws: Vec<Vector> = pcoh_witnesses(x, b).into_iter().map(|c| Vector::new(x, c)).collect();
            let r = witness_check(&t, &ws).map_err(|e| e.to_string())?;
            Ok(Some(format!("{} images checked{}", r.checked, if r.sound_only { ", sound only" } else { "" })))
        }));
        out.push(ctx.holds("generating-function", || {
            let model = ModelKind::Pcoh;
            let one = Obj::unit(model);
            let mut r = rng(seed, 0x96F);
            // p_k = (1/3)^k · c_k with c_k ≤ 2/3 keeps the total mass below 1
            let mut es = Vec::new();
            for k in 0..=b.bang {
                let q = RatPos::ratio(r.gen_range(0..=2), 3u64.pow(k as u32 + 1));
                es.push((Point::bag(Multiset::with(Point::Unit, k)), Point::Unit, q));
            }
            let mass = RatPos::sum_iter(es.iter().map(|e| e.2.clone()));
            let t = Morphism::new(&Obj::bang(&one), &one, *b, es).map_err(|e| e.to_string())?;
            let at_one = fun_apply(&t, &Vector::basis(&one, Point::Unit, RatPos::one())).map_err(|e| e.to_string())?;
            if at_one.mass() == mass && mass <= RatPos::one() {
                Ok(Some(format!("mass {mass}")))
            } else {
                fail_at("the generating function at 1", mass)
            }
        }));
    }
    out
}

fn invert(q: &RatPos) -> RatPos {
    RatPos::new(q.as_rational().expect("finite").recip()).expect("positive")
}

// ------------------------------------------------------------ NEGATIVE_NUCS

fn negative_job(p: &Params) -> Job {
    let ctx = Ctx::new(Suite::NegativeNucs, p, Config::new(ModelKind::Nucs.name(), None, None, None));
    job(move || {
        let mut out = vec![ctx.holds("iso-degree-1", || match nucs_bang_e_vs_degrees(1) {
            Some(_) => Ok(Some("a coherence isomorphism exists at degree 1".into())),
            None => Err("no isomorphism even at degree 1".into()),
        })];
        for k in [2, 3] {
            out.push(ctx.holds(&format!("no-iso-degree-{k}"), || match nucs_bang_e_vs_degrees(k) {
                None => Ok(Some("no coherence isomorphism".into())),
                Some(iso) => Err(format!("unexpected isomorphism {iso:?}")),
            }));
        }
        out
    })
}
