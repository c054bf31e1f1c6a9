use std::collections::{BTreeMap, BTreeSet};

use cohtaylor::exponential::der;
use cohtaylor::laws::{gen_base, gen_morphism};
use cohtaylor::lang::{parse, parse_expr};
use cohtaylor::model::{partial_sum, validate};
use cohtaylor::multiset::{factorial, factorial_u64, mpart, multinom, multinomb, transports};
use cohtaylor::summability::s_map;
use cohtaylor::taylor::{coalgebra_d, taylor};
use cohtaylor::{Arrow, Bool, Bounds, ModelKind, Morphism, Multiset, NatInf, Obj, Point, RatPos, Semiring, SemiringId};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn natinf() -> impl Strategy<Value = NatInf> {
    prop_oneof![9 => (0u64..50).prop_map(|k| NatInf::Fin(k.into())), 1 => Just(NatInf::Inf)]
}

fn ratpos() -> impl Strategy<Value = RatPos> {
    prop_oneof![9 => (0u64..20, 1u64..12).prop_map(|(p, q)| RatPos::ratio(p, q)), 1 => Just(RatPos::Inf)]
}

fn axioms<S: Semiring>(x: &S, y: &S, z: &S) {
    assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
    assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
    assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
    assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
    assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y.clone() + x.clone() * z.clone());
    assert_eq!(x.clone() + S::zero(), x.clone());
    assert_eq!(x.clone() * S::one(), x.clone());
    assert_eq!(x.clone() * S::zero(), S::zero());
    if (x.clone() + y.clone()).is_zero() {
        assert!(x.is_zero() && y.is_zero());
    }
    assert_eq!(&S::decode(&x.encode()).unwrap(), x);
}

#[test]
fn bool_axioms_exhaustive() {
    let all = [Bool(false), Bool(true)];
    for x in &all {
        for y in &all {
            for z in &all {
                axioms(x, y, z);
            }
        }
    }
}

fn atoms(n: usize) -> Vec<Point> {
    ["a", "b", "c"][..n].iter().map(|s| Point::atom(s)).collect()
}

fn multiset_over(n_atoms: usize, max: usize) -> impl Strategy<Value = Multiset> {
    proptest::collection::vec(0..n_atoms, 0..=max).prop_map(move |ix| {
        let pts = atoms(n_atoms);
        let mut m = Multiset::new();
        for i in ix {
            m.insert(pts[i].clone(), 1);
        }
        m
    })
}

/// Distinct orderings of a multiset's elements.
fn arrangements(m: &Multiset) -> BTreeSet<Vec<Point>> {
    fn go(left: &Multiset, acc: &mut Vec<Point>, out: &mut BTreeSet<Vec<Point>>) {
        if left.is_empty() {
            out.insert(acc.clone());
            return;
        }
        for p in left.support().cloned().collect::<Vec<_>>() {
            acc.push(p.clone());
            go(&left.minus(&Multiset::singleton(p)).unwrap(), acc, out);
            acc.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

fn rename(p: &Point) -> Point {
    match p.to_string().as_str() {
        "a" => Point::atom("z"),
        "b" => Point::atom("a"),
        "c" => Point::atom("q"),
        _ => p.clone(),
    }
}

fn mor<S: Semiring>(model: ModelKind, sizes: (usize, usize), seed: u64, b: &Bounds) -> Morphism<S> {
    let x = gen_base(model, "X", sizes.0, seed);
    let y = gen_base(model, "Y", sizes.1, seed);
    gen_morphism(&x, &y, 0.5, seed, b)
}

fn coherence_model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Wcs), Just(ModelKind::Coh), Just(ModelKind::Nucs)]
}

fn all_models() -> impl Strategy<Value = ModelKind> {
    prop_oneof![
        Just(ModelKind::Rel),
        Just(ModelKind::Wrel(SemiringId::Bool)),
        Just(ModelKind::Wcs),
        Just(ModelKind::Coh),
        Just(ModelKind::Nucs)
    ]
}

/// Every way to split `0..n` into an ordered pair of nonempty index sets.
fn splits(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    (1..(1u32 << n) - 1)
        .map(|mask| (0..n).partition(|i| mask & (1 << i) != 0))
        .collect()
}

fn pick<S: Semiring>(fs: &[Morphism<S>], ix: &[usize]) -> Vec<Morphism<S>> {
    ix.iter().map(|&i| fs[i].clone()).collect()
}

const B: Bounds = Bounds { bang: 2, s: 2, pad: 2 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn natinf_axioms(x in natinf(), y in natinf(), z in natinf()) {
        axioms(&x, &y, &z);
    }

    #[test]
    fn ratpos_axioms(x in ratpos(), y in ratpos(), z in ratpos()) {
        axioms(&x, &y, &z);
    }

    #[test]
    fn sum_family_permutation_and_grouping(xs in proptest::collection::vec(ratpos(), 0..8), cut in 0usize..8, seed in any::<u64>()) {
        let total = RatPos::sum_iter(xs.iter().cloned());
        let mut shuffled = xs.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize ^ i.wrapping_mul(2654435761)) % (i + 1));
        }
        prop_assert_eq!(&RatPos::sum_iter(shuffled), &total);
        let cut = cut.min(n);
        let grouped = RatPos::sum_iter(xs[..cut].iter().cloned()) + RatPos::sum_iter(xs[cut..].iter().cloned());
        prop_assert_eq!(grouped, total);
    }

    #[test]
    fn multinom_times_factorials(ms in proptest::collection::vec(multiset_over(3, 4), 0..4)) {
        let prod = ms.iter().fold(BigUint::one(), |acc, m| acc * factorial_u64(m.size() as u64));
        let n: usize = ms.iter().map(Multiset::size).sum();
        prop_assert_eq!(multinom(&ms) * prod, factorial_u64(n as u64));
    }

    #[test]
    fn transports_match_brute_force(m in multiset_over(3, 4), ix in proptest::collection::vec(0usize..3, 0..=4)) {
        let pts = atoms(3);
        let mut p = Multiset::new();
        for &i in ix.iter().take(m.size()) {
            p.insert(pts[i].clone(), 1);
        }
        while p.size() < m.size() {
            p.insert(pts[0].clone(), 1);
        }
        // fix one ordering of m and enumerate the orderings of p
        let left = m.to_list();
        let mut counts: BTreeMap<Multiset, BigUint> = BTreeMap::new();
        for right in arrangements(&p) {
            let mut r = Multiset::new();
            for (a, b) in left.iter().zip(&right) {
                r.insert(Point::pair(a.clone(), b.clone()), 1);
            }
            *counts.entry(r).or_insert_with(BigUint::zero) += 1u32;
        }
        let rs = transports(&m, &p);
        prop_assert_eq!(rs.iter().cloned().collect::<BTreeSet<_>>(), counts.keys().cloned().collect::<BTreeSet<_>>());
        let mut total = BigUint::zero();
        for r in &rs {
            prop_assert_eq!(r.marginals().unwrap(), (m.clone(), p.clone()));
            prop_assert_eq!(&counts[r] * factorial(r), factorial(&m));
            total += multinomb(&p, r).unwrap();
        }
        let n = factorial_u64(m.size() as u64);
        prop_assert_eq!(total * factorial(&m), n);
    }

    #[test]
    fn transports_rename_invariant(m in multiset_over(3, 4), p in multiset_over(3, 4)) {
        prop_assume!(m.size() == p.size());
        let direct: BTreeSet<Multiset> = transports(&m, &p)
            .iter()
            .map(|r| r.map(|x| {
                let (a, b) = x.as_pair().unwrap();
                Point::pair(rename(a), rename(b))
            }))
            .collect();
        let renamed: BTreeSet<Multiset> = transports(&m.map(rename), &p.map(rename)).into_iter().collect();
        prop_assert_eq!(direct, renamed);
    }

    #[test]
    fn category_laws(model in all_models(), seed in 0u64..1000, n in 1usize..=3) {
        let x = gen_base(model, "X", n, seed);
        let y = gen_base(model, "Y", 2, seed);
        let z = gen_base(model, "Z", 2, seed + 1);
        let w = gen_base(model, "W", 1, seed + 2);
        let f: Morphism<Bool> = gen_morphism(&x, &y, 0.5, seed, &B);
        let g: Morphism<Bool> = gen_morphism(&y, &z, 0.5, seed + 1, &B);
        let h: Morphism<Bool> = gen_morphism(&z, &w, 0.5, seed + 2, &B);
        let hg_f = Morphism::compose(&Morphism::compose(&h, &g).unwrap(), &f).unwrap();
        let h_gf = Morphism::compose(&h, &Morphism::compose(&g, &f).unwrap()).unwrap();
        prop_assert_eq!(hg_f, h_gf);
        prop_assert_eq!(&Morphism::compose(&Morphism::identity(&y, B), &f).unwrap(), &f);
        prop_assert_eq!(&Morphism::compose(&f, &Morphism::identity(&x, B)).unwrap(), &f);
        prop_assert_eq!(&f.transpose().transpose(), &f);
        prop_assert_eq!(
            Morphism::compose(&g, &f).unwrap().transpose(),
            Morphism::compose(&f.transpose(), &g.transpose()).unwrap()
        );
    }

    #[test]
    fn weighted_category_laws(seed in 0u64..1000) {
        let model = ModelKind::Wrel(SemiringId::RatPos);
        let f: Morphism<RatPos> = mor(model, (3, 2), seed, &B);
        let y = f.cod().clone();
        let z = gen_base(model, "Z", 3, seed + 1);
        let g: Morphism<RatPos> = gen_morphism(&y, &z, 0.5, seed + 1, &B);
        let h: Morphism<RatPos> = gen_morphism(&z, &y, 0.5, seed + 2, &B);
        prop_assert_eq!(
            Morphism::compose(&Morphism::compose(&h, &g).unwrap(), &f).unwrap(),
            Morphism::compose(&h, &Morphism::compose(&g, &f).unwrap()).unwrap()
        );
        prop_assert_eq!(
            Morphism::compose(&g, &f).unwrap().transpose(),
            Morphism::compose(&f.transpose(), &g.transpose()).unwrap()
        );
    }

    #[test]
    fn generated_morphisms_validate(model in coherence_model(), seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let x = gen_base(model, "X", n, seed);
        let y = gen_base(model, "Y", m, seed);
        let f: Morphism<Bool> = gen_morphism(&Obj::bang(&x), &y, 0.7, seed, &B);
        prop_assert!(validate(&f).valid);
    }

    #[test]
    fn partition_associativity(model in coherence_model(), seed in 0u64..500, k in 1usize..=4) {
        let fs: Vec<Morphism<Bool>> = (0..k as u64).map(|i| mor(model, (2, 2), seed * 7 + i, &B)).collect();
        // gen_base depends on the seed, so put everything on the first family's objects
        let (x, y) = (fs[0].dom().clone(), fs[0].cod().clone());
        let fs: Vec<Morphism<Bool>> = fs
            .iter()
            .enumerate()
            .map(|(i, _)| gen_morphism(&x, &y, 0.4, seed * 7 + i as u64, &B))
            .collect();
        let whole = partial_sum(&fs);
        let mut rev = fs.clone();
        rev.reverse();
        prop_assert_eq!(whole.is_ok(), partial_sum(&rev).is_ok());
        for (l, r) in splits(k) {
            let parts = (partial_sum(&pick(&fs, &l)), partial_sum(&pick(&fs, &r)));
            let regrouped = match parts {
                (Ok(a), Ok(b)) => partial_sum(&[a, b]).ok(),
                _ => None,
            };
            match (&whole, regrouped) {
                (Ok(w), Some(v)) => prop_assert_eq!(w, &v),
                (Err(_), None) => {}
                (w, v) => prop_assert!(false, "split {:?}/{:?}: whole {:?} vs regrouped {:?}", l, r, w.is_ok(), v.is_some()),
            }
        }
        if let Ok(w) = &whole {
            let h: Morphism<Bool> = gen_morphism(&y, &gen_base(model, "Z", 2, seed), 0.5, seed, &B);
            let composed: Vec<_> = fs.iter().map(|f| Morphism::compose(&h, f).unwrap()).collect();
            prop_assert_eq!(partial_sum(&composed).unwrap(), Morphism::compose(&h, w).unwrap());
        }
    }

    #[test]
    fn json_round_trip(model in all_models(), seed in any::<u64>()) {
        let x = gen_base(model, "X", 2, seed);
        let y = gen_base(model, "Y", 2, seed);
        let f: Morphism<Bool> = gen_morphism(&Obj::bang(&Obj::tensor(&x, &y)), &Obj::s(&y), 0.5, seed, &B);
        let back = Morphism::<Bool>::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back.to_json().to_string(), f.to_json().to_string());
        for p in f.dom().web(&B).iter() {
            prop_assert_eq!(&Point::from_json(&p.to_json()).unwrap(), p);
        }
    }

    #[test]
    fn taylor_extends_s_on_linear_maps(seed in 0u64..300) {
        let model = ModelKind::Wrel(SemiringId::RatPos);
        let b = Bounds::new(2, 3);
        let h: Morphism<RatPos> = mor(model, (2, 2), seed, &b);
        let x = h.dom().clone();
        let lhs = taylor(&h.as_arrow().after(&der(&x)).unwrap()).unwrap();
        let rhs = s_map(&h.as_arrow()).after(&der(&Obj::s(&x))).unwrap();
        prop_assert_eq!(lhs.region_rows(&b), rhs.region_rows(&b));
    }

    #[test]
    fn printer_round_trip(src in expr(3)) {
        let e = parse_expr(&src).unwrap();
        let printed = e.to_string();
        prop_assert_eq!(parse_expr(&printed).unwrap().to_string(), printed.clone());
        let squash = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        prop_assert_eq!(squash(&printed), squash(&src));
    }
}

fn obj_src() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("A".to_string()), Just("B".to_string()), Just("one".to_string()), Just("D".to_string())];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|x| if x.starts_with('(') || x == "one" || x == "D" {
                format!("(! {x})")
            } else {
                format!("!{x}")
            }),
            inner.clone().prop_map(|x| format!("(S {x})")),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("(tensor {x} {y})")),
            (inner.clone(), inner).prop_map(|(x, y)| format!("(lin {x} {y})")),
        ]
    })
}

fn expr(depth: u32) -> impl Strategy<Value = String> {
    let gen1 = subsequence(vec!["id", "der", "dig", "contr", "weak", "sigma", "theta", "lift", "swap"], 1)
        .prop_flat_map(|g| obj_src().prop_map(move |x| format!("({} {x})", g[0])));
    let leaf = prop_oneof![
        Just("f".to_string()),
        gen1,
        (obj_src(), 0usize..3).prop_map(|(x, i)| format!("(proj {x} {i})")),
        (obj_src(), obj_src()).prop_map(|(x, y)| format!("(zero {x} {y})")),
        Just("(lit A B ((a b 1/2) (a (bag a a))))".to_string()),
    ];
    leaf.prop_recursive(depth, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(|xs| format!("(compose {})", xs.join(" "))),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| format!("(tensor {x} {y})")),
            proptest::collection::vec(inner.clone(), 1..=3).prop_map(|xs| format!("(sum {})", xs.join(" "))),
            inner.clone().prop_map(|x| format!("(taylor {x})")),
            inner.clone().prop_map(|x| format!("(bang {x})")),
            (inner, 0usize..4).prop_map(|(x, n)| format!("(homog {x} {n})")),
        ]
    })
}

#[test]
fn mpart_sizes() {
    let partition_counts = [1usize, 1, 2, 3, 5, 7, 11, 15, 22];
    for (n, &count) in partition_counts.iter().enumerate() {
        let parts = mpart(n);
        assert_eq!(parts.len(), count, "p({n})");
        for mu in &parts {
            assert!(mu.size() <= n);
            let weight: usize = mu.iter().map(|(d, k)| d.as_deg().unwrap() * k).sum();
            assert_eq!(weight, n);
            assert!(mu.support().all(|d| d.as_deg().unwrap() <= n));
        }
    }
}

#[test]
fn coalgebra_d_is_zero_one() {
    for s in 1..=4 {
        let b = Bounds::new(3, s);
        let d: Arrow<RatPos> = coalgebra_d(ModelKind::Wrel(SemiringId::RatPos), &b);
        for (_, row) in d.region_rows(&b) {
            assert!(row.values().all(|c| *c == RatPos::one()));
        }
        let d: Arrow<Bool> = coalgebra_d(ModelKind::Coh, &b);
        assert!(!d.region_rows(&b).is_empty());
    }
}

#[test]
fn program_round_trip() {
    let src = "(model coh :bang-degree 2 :s-degree 3)\n(obj A (atoms a b) (coh (a b)))\n(let f (lit !A A (((bag a b) a))))\n(taylor f)";
    let p = parse(src).unwrap();
    assert_eq!(parse(&p.to_string()).unwrap().to_string(), p.to_string());
}
