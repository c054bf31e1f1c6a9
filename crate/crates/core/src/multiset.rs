//! Web points, finite multisets and the counting functions of the exponential.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// A web element. The derived order (variant, then fields) is the canonical
/// order used for every sparse map and for JSON output.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Atom(Arc<str>),
    Unit,
    Pair(Arc<(Point, Point)>),
    Tag(usize, Arc<Point>),
    Deg(usize),
    Bag(Arc<Multiset>),
}

impl Point {
    pub fn atom(name: &str) -> Point {
        Point::Atom(Arc::from(name))
    }

    pub fn pair(a: Point, b: Point) -> Point {
        Point::Pair(Arc::new((a, b)))
    }

    pub fn tag(i: usize, a: Point) -> Point {
        Point::Tag(i, Arc::new(a))
    }

    pub fn bag(m: Multiset) -> Point {
        Point::Bag(Arc::new(m))
    }

    pub fn bag_of<I: IntoIterator<Item = Point>>(items: I) -> Point {
        Point::bag(items.into_iter().collect())
    }

    /// The S-point `(i, a)`, a pair whose left side is a degree.
    pub fn graded(i: usize, a: Point) -> Point {
        Point::pair(Point::Deg(i), a)
    }

    pub fn as_pair(&self) -> Option<(&Point, &Point)> {
        match self {
            Point::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_tag(&self) -> Option<(usize, &Point)> {
        match self {
            Point::Tag(i, p) => Some((*i, p)),
            _ => None,
        }
    }

    pub fn as_bag(&self) -> Option<&Multiset> {
        match self {
            Point::Bag(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_deg(&self) -> Option<usize> {
        match self {
            Point::Deg(n) => Some(*n),
            _ => None,
        }
    }

    /// Splits an S-point `(i, a)`.
    pub fn as_graded(&self) -> Option<(usize, &Point)> {
        let (d, a) = self.as_pair()?;
        Some((d.as_deg()?, a))
    }

    /// Sum of every degree index occurring in the point.
    pub fn deg_weight(&self) -> usize {
        match self {
            Point::Atom(_) | Point::Unit => 0,
            Point::Pair(p) => p.0.deg_weight() + p.1.deg_weight(),
            Point::Tag(_, p) => p.deg_weight(),
            Point::Deg(n) => *n,
            Point::Bag(m) => m.iter().map(|(p, k)| k * p.deg_weight()).sum(),
        }
    }

    /// Total number of bag elements at every nesting level.
    pub fn bag_weight(&self) -> usize {
        match self {
            Point::Atom(_) | Point::Unit | Point::Deg(_) => 0,
            Point::Pair(p) => p.0.bag_weight() + p.1.bag_weight(),
            Point::Tag(_, p) => p.bag_weight(),
            Point::Bag(m) => m.iter().map(|(p, k)| k * (1 + p.bag_weight())).sum(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Point::Atom(s) => Value::String(s.to_string()),
            Point::Unit => serde_json::json!(["*"]),
            Point::Pair(p) => serde_json::json!(["pair", p.0.to_json(), p.1.to_json()]),
            Point::Tag(i, p) => serde_json::json!(["in", i, p.to_json()]),
            Point::Deg(n) => serde_json::json!(["deg", n]),
            Point::Bag(m) => {
                let items: Vec<Value> = m.to_list().iter().map(Point::to_json).collect();
                serde_json::json!(["bag", items])
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Point> {
        let bad = || Error::Parse(format!("bad point json: {v}"));
        match v {
            Value::String(s) => Ok(Point::atom(s)),
            Value::Array(xs) => {
                let head = xs.first().and_then(Value::as_str).ok_or_else(bad)?;
                let idx = |k: usize| -> Result<usize> {
                    xs.get(k)
                        .and_then(Value::as_u64)
                        .map(|n| n as usize)
                        .ok_or_else(bad)
                };
                match (head, xs.len()) {
                    ("*", 1) => Ok(Point::Unit),
                    ("pair", 3) => Ok(Point::pair(
                        Point::from_json(&xs[1])?,
                        Point::from_json(&xs[2])?,
                    )),
                    ("in", 3) => Ok(Point::tag(idx(1)?, Point::from_json(&xs[2])?)),
                    ("deg", 2) => Ok(Point::Deg(idx(1)?)),
                    ("bag", 2) => {
                        let items = xs[1].as_array().ok_or_else(bad)?;
                        let pts = items.iter().map(Point::from_json).collect::<Result<Vec<_>>>()?;
                        Ok(Point::bag_of(pts))
                    }
                    _ => Err(bad()),
                }
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Atom(s) => f.write_str(s),
            Point::Unit => f.write_str("*"),
            Point::Pair(p) => write!(f, "(pair {} {})", p.0, p.1),
            Point::Tag(i, p) => write!(f, "(in {i} {p})"),
            Point::Deg(n) => write!(f, "(deg {n})"),
            Point::Bag(m) => {
                f.write_str("(bag")?;
                for p in m.to_list() {
                    write!(f, " {p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        Point::from_json(&v).map_err(de::Error::custom)
    }
}

/// Finite multiset with positive multiplicities.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    entries: BTreeMap<Point, usize>,
}

impl Multiset {
    pub fn new() -> Multiset {
        Multiset::default()
    }

    pub fn singleton(p: Point) -> Multiset {
        Multiset::with(p, 1)
    }

    pub fn with(p: Point, k: usize) -> Multiset {
        let mut m = Multiset::new();
        m.insert(p, k);
        m
    }

    pub fn insert(&mut self, p: Point, k: usize) {
        if k > 0 {
            *self.entries.entry(p).or_insert(0) += k;
        }
    }

    pub fn mult(&self, p: &Point) -> usize {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.entries.keys()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, usize)> {
        self.entries.iter().map(|(p, k)| (p, *k))
    }

    /// Elements repeated by multiplicity, in canonical order.
    pub fn to_list(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.size());
        for (p, k) in self.iter() {
            out.extend(std::iter::repeat_n(p.clone(), k));
        }
        out
    }

    pub fn plus(&self, other: &Multiset) -> Multiset {
        let mut m = self.clone();
        for (p, k) in other.iter() {
            m.insert(p.clone(), k);
        }
        m
    }

    /// `self - other` when `other ≤ self`.
    pub fn minus(&self, other: &Multiset) -> Option<Multiset> {
        let mut m = self.clone();
        for (p, k) in other.iter() {
            let have = m.entries.get_mut(p)?;
            if *have < k {
                return None;
            }
            *have -= k;
            if *have == 0 {
                m.entries.remove(p);
            }
        }
        Some(m)
    }

    pub fn map<F: Fn(&Point) -> Point>(&self, f: F) -> Multiset {
        let mut m = Multiset::new();
        for (p, k) in self.iter() {
            m.insert(f(p), k);
        }
        m
    }

    /// First and second marginals of a multiset of pairs.
    pub fn marginals(&self) -> Option<(Multiset, Multiset)> {
        let mut left = Multiset::new();
        let mut right = Multiset::new();
        for (p, k) in self.iter() {
            let (a, b) = p.as_pair()?;
            left.insert(a.clone(), k);
            right.insert(b.clone(), k);
        }
        Some((left, right))
    }

    /// Every sub-multiset, in a fixed order.
    pub fn submultisets(&self) -> Vec<Multiset> {
        let items: Vec<(&Point, usize)> = self.iter().collect();
        let mut out = vec![Multiset::new()];
        for (p, k) in items {
            let mut next = Vec::with_capacity(out.len() * (k + 1));
            for base in &out {
                for j in 0..=k {
                    let mut m = base.clone();
                    m.insert(p.clone(), j);
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }
}

impl FromIterator<Point> for Multiset {
    fn from_iter<I: IntoIterator<Item = Point>>(it: I) -> Self {
        let mut m = Multiset::new();
        for p in it {
            m.insert(p, 1);
        }
        m
    }
}

impl fmt::Debug for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_list()).finish()
    }
}

impl Serialize for Multiset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let items = self.to_list();
        let mut seq = s.serialize_seq(Some(items.len()))?;
        for p in &items {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

pub fn factorial_u64(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `m! = Π_a m(a)!`.
pub fn factorial(m: &Multiset) -> BigUint {
    m.iter()
        .fold(BigUint::one(), |acc, (_, k)| acc * factorial_u64(k as u64))
}

/// All multisets `r` of pairs whose marginals are `m` and `p`, found by
/// filling the support contingency table row by row.
pub fn transports(m: &Multiset, p: &Multiset) -> Vec<Multiset> {
    if m.size() != p.size() {
        return Vec::new();
    }
    let rows: Vec<(&Point, usize)> = m.iter().collect();
    let cols: Vec<(&Point, usize)> = p.iter().collect();
    let mut remaining: Vec<usize> = cols.iter().map(|c| c.1).collect();
    let mut table = vec![vec![0usize; cols.len()]; rows.len()];
    let mut out = Vec::new();
    fill_row(&rows, &cols, 0, &mut remaining, &mut table, &mut out);
    out
}

fn fill_row(
    rows: &[(&Point, usize)],
    cols: &[(&Point, usize)],
    i: usize,
    remaining: &mut Vec<usize>,
    table: &mut Vec<Vec<usize>>,
    out: &mut Vec<Multiset>,
) {
    if i == rows.len() {
        if remaining.iter().all(|&r| r == 0) {
            let mut r = Multiset::new();
            for (ri, row) in table.iter().enumerate() {
                for (ci, &k) in row.iter().enumerate() {
                    r.insert(Point::pair(rows[ri].0.clone(), cols[ci].0.clone()), k);
                }
            }
            out.push(r);
        }
        return;
    }
    for dist in bounded_compositions(rows[i].1, remaining) {
        for (c, &k) in dist.iter().enumerate() {
            remaining[c] -= k;
            table[i][c] = k;
        }
        fill_row(rows, cols, i + 1, remaining, table, out);
        for (c, &k) in dist.iter().enumerate() {
            remaining[c] += k;
            table[i][c] = 0;
        }
    }
}

/// Vectors `v` with `v[j] ≤ caps[j]` and `Σ v = total`.
pub fn bounded_compositions(total: usize, caps: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; caps.len()];
    fn go(j: usize, left: usize, caps: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if j == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room: usize = caps[j + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        for k in lo..=left.min(caps[j]) {
            cur[j] = k;
            go(j + 1, left - k, caps, cur, out);
        }
        cur[j] = 0;
    }
    go(0, total, caps, &mut cur, &mut out);
    out
}

/// Generalized multinomial `[p r] = Π_b p(b)! / Π_(a,b) r(a,b)!`.
pub fn multinomb(p: &Multiset, r: &Multiset) -> Result<BigUint> {
    let (_, second) = r
        .marginals()
        .ok_or_else(|| Error::MarginalMismatch("transport contains a non-pair".into()))?;
    if &second != p {
        return Err(Error::MarginalMismatch(format!(
            "second marginal {second:?} differs from {p:?}"
        )));
    }
    Ok(factorial(p) / factorial(r))
}

/// `(Σ mᵢ)! / Π mᵢ!`.
pub fn multinom(ms: &[Multiset]) -> BigUint {
    let total: usize = ms.iter().map(Multiset::size).sum();
    let den = ms
        .iter()
        .fold(BigUint::one(), |acc, m| acc * factorial_u64(m.size() as u64));
    factorial_u64(total as u64) / den
}

/// Multisets of positive degrees `μ` with `Σ i·μ(i) = n`.
pub fn mpart(n: usize) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    fn go(left: usize, min: usize, parts: &mut Vec<usize>, out: &mut Vec<Multiset>) {
        if left == 0 {
            out.push(parts.iter().map(|&i| Point::Deg(i)).collect());
            return;
        }
        for i in min..=left {
            parts.push(i);
            go(left - i, i, parts, out);
            parts.pop();
        }
    }
    go(n, 1, &mut parts, &mut out);
    out.sort_by_key(|m| (m.size(), std::cmp::Reverse(m.support().last().and_then(Point::as_deg))));
    out
}

/// Unordered partitions of `m` into nonempty blocks, each block listed once.
pub fn block_partitions(m: &Multiset) -> Vec<Vec<Multiset>> {
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    fn go(rest: &Multiset, blocks: &mut Vec<Multiset>, out: &mut Vec<Vec<Multiset>>) {
        if rest.is_empty() {
            out.push(blocks.clone());
            return;
        }
        for b in rest.submultisets() {
            if b.is_empty() || blocks.last().is_some_and(|last| &b < last) {
                continue;
            }
            let r = rest.minus(&b).expect("sub-multiset");
            blocks.push(b);
            go(&r, blocks, out);
            blocks.pop();
        }
    }
    go(m, &mut blocks, &mut out);
    out
}

/// Multisets of size at most `max_size` over `items`, in canonical order.
pub fn bags_up_to(items: &[Point], max_size: usize) -> Vec<Multiset> {
    let mut out = Vec::new();
    let mut cur = Multiset::new();
    fn go(start: usize, left: usize, items: &[Point], cur: &mut Multiset, out: &mut Vec<Multiset>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in start..items.len() {
            cur.insert(items[i].clone(), 1);
            go(i, left - 1, items, cur, out);
            let one = Multiset::singleton(items[i].clone());
            *cur = cur.minus(&one).expect("just inserted");
        }
    }
    go(0, max_size, items, &mut cur, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> Point {
        Point::atom(s)
    }

    fn ms(xs: &[&str]) -> Multiset {
        xs.iter().map(|s| a(s)).collect()
    }

    fn pairs(xs: &[(&str, &str)]) -> Multiset {
        xs.iter().map(|(x, y)| Point::pair(a(x), a(y))).collect()
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(factorial(&ms(&[])), BigUint::from(1u8));
        assert_eq!(factorial(&ms(&["a", "a", "a", "b"])), BigUint::from(6u8));
        assert_eq!(factorial(&ms(&["a", "a", "b", "b"])), BigUint::from(4u8));
    }

    #[test]
    fn transport_examples() {
        assert_eq!(transports(&ms(&["a"]), &ms(&["b"])), vec![pairs(&[("a", "b")])]);
        assert_eq!(
            transports(&ms(&["a", "a"]), &ms(&["b", "c"])),
            vec![pairs(&[("a", "b"), ("a", "c")])]
        );
        assert_eq!(
            transports(&ms(&["a", "b"]), &ms(&["c", "c"])),
            vec![pairs(&[("a", "c"), ("b", "c")])]
        );
        assert!(transports(&ms(&["a"]), &ms(&["b", "b"])).is_empty());
        assert_eq!(transports(&ms(&["a", "b"]), &ms(&["c", "d"])).len(), 2);
    }

    #[test]
    fn multinomb_examples() {
        let one = BigUint::from(1u8);
        assert_eq!(multinomb(&ms(&["b", "b"]), &pairs(&[("a", "b"), ("a", "b")])).unwrap(), one);
        assert_eq!(multinomb(&ms(&["b", "c"]), &pairs(&[("a", "b"), ("a", "c")])).unwrap(), one);
        assert_eq!(
            multinomb(&ms(&["b", "b"]), &pairs(&[("a", "b"), ("a2", "b")])).unwrap(),
            BigUint::from(2u8)
        );
        assert!(multinomb(&ms(&["b"]), &pairs(&[("a", "c")])).is_err());
    }

    #[test]
    fn multinom_examples() {
        assert_eq!(multinom(&[ms(&["a"]), ms(&["a"])]), BigUint::from(2u8));
        assert_eq!(multinom(&[ms(&["a", "a"])]), BigUint::from(1u8));
        assert_eq!(multinom(&[ms(&["a"]), ms(&["b"])]), BigUint::from(2u8));
    }

    #[test]
    fn mpart_examples() {
        let d = |xs: &[usize]| xs.iter().map(|&i| Point::Deg(i)).collect::<Multiset>();
        assert_eq!(mpart(0), vec![Multiset::new()]);
        assert_eq!(mpart(3), vec![d(&[3]), d(&[1, 2]), d(&[1, 1, 1])]);
        assert_eq!(mpart(4), vec![d(&[4]), d(&[1, 3]), d(&[2, 2]), d(&[1, 1, 2]), d(&[1, 1, 1, 1])]);
    }

    #[test]
    fn block_partition_counts() {
        // Bell numbers for distinct atoms, partition counts for repeats.
        assert_eq!(block_partitions(&ms(&["a", "b", "c"])).len(), 5);
        assert_eq!(block_partitions(&ms(&["a", "b", "c", "d"])).len(), 15);
        assert_eq!(block_partitions(&ms(&["a", "a", "a", "a"])).len(), 5);
        assert_eq!(block_partitions(&ms(&["a", "a", "b"])).len(), 4);
        assert_eq!(block_partitions(&Multiset::new()), vec![Vec::<Multiset>::new()]);
    }

    #[test]
    fn bag_enumeration() {
        let items = [a("a"), a("b")];
        assert_eq!(bags_up_to(&items, 2).len(), 6);
        assert_eq!(bags_up_to(&items[..1], 2), vec![ms(&[]), ms(&["a"]), ms(&["a", "a"])]);
    }

    #[test]
    fn point_json_round_trip() {
        let p = Point::bag_of([
            Point::pair(a("a"), Point::Unit),
            Point::tag(2, Point::Deg(3)),
            Point::pair(a("a"), Point::Unit),
        ]);
        let v = p.to_json();
        assert_eq!(
            v.to_string(),
            r#"["bag",[["pair","a",["*"]],["pair","a",["*"]],["in",2,["deg",3]]]]"#
        );
        assert_eq!(Point::from_json(&v).unwrap(), p);
    }

    #[test]
    fn weights() {
        let p = Point::bag_of([Point::graded(2, a("a")), Point::graded(1, a("b"))]);
        assert_eq!(p.deg_weight(), 3);
        assert_eq!(p.bag_weight(), 2);
        let nested = Point::bag_of([Point::bag_of([a("a"), a("a")]), Point::bag(Multiset::new())]);
        assert_eq!(nested.bag_weight(), 4);
    }
}
