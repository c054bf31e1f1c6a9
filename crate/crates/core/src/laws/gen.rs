//! Seeded generation of webs, scalars, vectors and model-legal morphisms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{validate, Base, Bounds, Coords, ModelKind, Morphism, Obj, Rel3};
use crate::multiset::Point;
use crate::semiring::{RatPos, Semiring};

/// The generator for `seed`, split by `salt` so that independent draws from
/// one seed do not overlap.
pub fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt.rotate_left(17))
}

/// A small nonzero scalar `k/l` with `k, l ≤ 3`, rounded up to an integer
/// where the semiring has no fractions.
pub fn gen_scalar<S: Semiring, R: Rng>(rng: &mut R) -> S {
    let num: u64 = rng.gen_range(1..=3);
    let den: u64 = rng.gen_range(1..=3);
    S::from_ratio(&num.into(), &den.into()).unwrap_or_else(|_| S::from_u64(num))
}

fn gen_ratpos<R: Rng>(rng: &mut R, max_den: u64) -> RatPos {
    let den = rng.gen_range(1..=max_den);
    RatPos::ratio(rng.gen_range(0..=den), den)
}

/// A base object with atoms `{prefix}1 … {prefix}k` and a sampled coherence
/// structure: WCS atoms are self-coherent and other pairs coherent with
/// probability 1/2, COH pairs likewise, NUCS pairs (the diagonal included)
/// uniform over the three relations. PCOH atoms get two sampled
/// subprobability witnesses.
pub fn gen_base(model: ModelKind, name: &str, size: usize, seed: u64) -> Obj {
    let prefix = name.to_lowercase();
    let atoms: Vec<String> = (1..=size).map(|i| format!("{prefix}{i}")).collect();
    let refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
    let mut base = Base::atoms(name, &refs);
    let pts = base.web.clone();
    let mut r = rng(seed, 0xBA5E ^ name.len() as u64 ^ (prefix.bytes().map(u64::from).sum::<u64>() << 8));
    match model {
        ModelKind::Wcs | ModelKind::Coh => {
            if model == ModelKind::Wcs {
                base = base.reflexive();
            }
            for (i, a) in pts.iter().enumerate() {
                for c in &pts[i + 1..] {
                    if r.gen_bool(0.5) {
                        base = base.cohere(a, c);
                    }
                }
            }
        }
        ModelKind::Nucs => {
            for (i, a) in pts.iter().enumerate() {
                for c in &pts[i..] {
                    match r.gen_range(0..3) {
                        0 => base = base.cohere(a, c),
                        1 => base = base.incohere(a, c),
                        _ => {}
                    }
                }
            }
        }
        ModelKind::Pcoh => {
            let ws = (0..2)
                .map(|_| {
                    let raw: Vec<RatPos> = pts.iter().map(|_| gen_ratpos(&mut r, 4)).collect();
                    let total = RatPos::sum_iter(raw.iter().cloned());
                    let scale = if total > RatPos::from_u64(1) {
                        invert(&total)
                    } else {
                        RatPos::from_u64(1)
                    };
                    pts.iter()
                        .zip(raw)
                        .map(|(a, c)| (a.clone(), c * scale.clone()))
                        .filter(|(_, c)| *c != RatPos::from_u64(0))
                        .collect::<Coords>()
                })
                .collect();
            base = base.with_witnesses(ws);
        }
        _ => {}
    }
    Obj::base(model, base)
}

fn invert(q: &RatPos) -> RatPos {
    let r = q.as_rational().expect("finite mass");
    RatPos::new(r.recip()).expect("positive")
}

/// A random vector over the web of `x` with coordinates `k/l`, `l ≤ 4`.
pub fn gen_vector(x: &Obj, b: &Bounds, seed: u64, salt: u64) -> Coords {
    let mut r = rng(seed, 0x7EC ^ salt);
    x.web(b)
        .iter()
        .map(|p| (p.clone(), gen_ratpos(&mut r, 4)))
        .filter(|(_, c)| *c != RatPos::from_u64(0))
        .collect()
}

/// A random morphism `dom → cod` within `b` that is legal in the model:
/// each entry is drawn with probability `density`; in the coherence models
/// entries are offered in random order and kept only while the set stays a
/// clique of `dom ⊸ cod`; in PCOH the weights are halved until the witness
/// check passes.
pub fn gen_morphism<S: Semiring>(dom: &Obj, cod: &Obj, density: f64, seed: u64, b: &Bounds) -> Morphism<S> {
    let mut r = rng(seed, 0x6E4);
    let density = density.clamp(0.0, 1.0);
    let mut cands: Vec<(Point, Point)> = Vec::new();
    for p in dom.web(b).iter() {
        for q in cod.web(b).iter() {
            cands.push((p.clone(), q.clone()));
        }
    }
    let model = dom.model();
    if model.is_coherence() {
        cands.shuffle(&mut r);
    }
    let mut chosen: Vec<(Point, Point, S)> = Vec::new();
    for (p, q) in cands {
        if !r.gen_bool(density) {
            continue;
        }
        let w: S = gen_scalar(&mut r);
        if model.is_coherence() {
            let fits = |p2: &Point, q2: &Point| Rel3::lin(dom.rel(&p, p2), cod.rel(&q, q2)).coh();
            if !fits(&p, &q) || !chosen.iter().all(|(p2, q2, _)| fits(p2, q2)) {
                continue;
            }
        }
        chosen.push((p, q, w));
    }
    let mut f = Morphism::new(dom, cod, *b, chosen).expect("points drawn from the webs");
    if model == ModelKind::Pcoh {
        let half = S::from_ratio(&1u32.into(), &2u32.into()).expect("rational semiring");
        for _ in 0..64 {
            if validate(&f).valid {
                break;
            }
            let es: Vec<_> = f.entries().map(|(p, q, c)| (p.clone(), q.clone(), c.clone() * half.clone())).collect();
            f = Morphism::new(dom, cod, *b, es).expect("same support");
        }
        if !validate(&f).valid {
            f = Morphism::zero(dom, cod, *b);
        }
    }
    f
}
