use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Bounds, ModelKind, Rel3};
use crate::multiset::{Multiset, Point};
use crate::semiring::RatPos;

/// A finitely supported nonnegative rational vector over a web.
pub type Coords = BTreeMap<Point, RatPos>;

/// An explicitly listed web with its coherence tables.
///
/// Pairs are stored with the smaller point first. How a missing pair reads
/// depends on the model: WCS and COH default to strict incoherence, NUCS to
/// neutrality. COH points are always neutral with themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Base {
    pub name: String,
    pub web: Vec<Point>,
    pub scoh: BTreeSet<(Point, Point)>,
    pub sincoh: BTreeSet<(Point, Point)>,
    pub witnesses: Vec<Coords>,
}

impl Base {
    pub fn new(name: &str, web: Vec<Point>) -> Base {
        let mut web = web;
        web.sort();
        web.dedup();
        Base {
            name: name.to_string(),
            web,
            scoh: BTreeSet::new(),
            sincoh: BTreeSet::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn atoms(name: &str, atoms: &[&str]) -> Base {
        Base::new(name, atoms.iter().map(|a| Point::atom(a)).collect())
    }

    fn key(a: &Point, b: &Point) -> (Point, Point) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    pub fn cohere(mut self, a: &Point, b: &Point) -> Base {
        self.scoh.insert(Base::key(a, b));
        self
    }

    pub fn incohere(mut self, a: &Point, b: &Point) -> Base {
        self.sincoh.insert(Base::key(a, b));
        self
    }

    /// Marks every point strictly coherent with itself (WCS webs where each
    /// singleton is a clique).
    pub fn reflexive(mut self) -> Base {
        for a in self.web.clone() {
            self.scoh.insert((a.clone(), a));
        }
        self
    }

    pub fn with_witnesses(mut self, ws: Vec<Coords>) -> Base {
        self.witnesses = ws;
        self
    }

    fn rel(&self, model: ModelKind, a: &Point, b: &Point) -> Rel3 {
        let k = Base::key(a, b);
        match model {
            ModelKind::Wcs => {
                if self.scoh.contains(&k) {
                    Rel3::Scoh
                } else {
                    Rel3::Sincoh
                }
            }
            ModelKind::Coh => {
                if a == b {
                    Rel3::Neu
                } else if self.scoh.contains(&k) {
                    Rel3::Scoh
                } else {
                    Rel3::Sincoh
                }
            }
            ModelKind::Nucs => {
                if self.scoh.contains(&k) {
                    Rel3::Scoh
                } else if self.sincoh.contains(&k) {
                    Rel3::Sincoh
                } else {
                    Rel3::Neu
                }
            }
            _ => Rel3::Neu,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Base(Base),
    Unit,
    /// The object of degrees, points `Deg(0..=s)`.
    Degrees,
    Tensor(Obj, Obj),
    Lin(Obj, Obj),
    With(Vec<Obj>),
    Plus(Vec<Obj>),
    Bang(Obj),
    /// The alternative NUCS exponential, object only.
    BangE(Obj),
    /// Linear negation: same web, coherence swapped.
    Dual(Obj),
}

/// Region budget used when enumerating a web.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Budget {
    bag: usize,
    deg: usize,
}

impl Budget {
    const FULL: Budget = Budget { bag: usize::MAX, deg: usize::MAX };

    fn minus(self, p: &Point) -> Option<Budget> {
        Some(Budget {
            bag: self.bag.checked_sub(p.bag_weight())?,
            deg: self.deg.checked_sub(p.deg_weight())?,
        })
    }
}

type WebCache = HashMap<(Bounds, Budget), Arc<Vec<Point>>>;

struct ObjNode {
    model: ModelKind,
    shape: Shape,
    webs: Mutex<WebCache>,
}

/// A semantic object: a type expression over base webs, tagged by model.
/// Webs are enumerated on demand under a [`Bounds`].
#[derive(Clone)]
pub struct Obj(Arc<ObjNode>);

impl PartialEq for Obj {
    fn eq(&self, other: &Obj) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.model == other.0.model && self.0.shape == other.0.shape)
    }
}

impl Eq for Obj {}

impl fmt::Debug for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, op: &str, xs: &[Obj]| {
            write!(f, "({op}")?;
            for x in xs {
                write!(f, " {x}")?;
            }
            write!(f, ")")
        };
        match self.shape() {
            Shape::Base(b) => f.write_str(&b.name),
            Shape::Unit => f.write_str("one"),
            Shape::Degrees => f.write_str("D"),
            Shape::Tensor(a, b) => write!(f, "(tensor {a} {b})"),
            Shape::Lin(a, b) if matches!(a.shape(), Shape::Degrees) => write!(f, "(S {b})"),
            Shape::Lin(a, b) => write!(f, "(lin {a} {b})"),
            Shape::With(xs) => list(f, "with", xs),
            Shape::Plus(xs) => list(f, "plus", xs),
            Shape::Bang(a) => write!(f, "(! {a})"),
            Shape::BangE(a) => write!(f, "(!e {a})"),
            Shape::Dual(a) => write!(f, "(dual {a})"),
        }
    }
}

impl Obj {
    fn make(model: ModelKind, shape: Shape) -> Obj {
        Obj(Arc::new(ObjNode { model, shape, webs: Mutex::new(HashMap::new()) }))
    }

    fn derive(parts: &[&Obj], shape: Shape) -> Obj {
        let model = parts[0].model();
        assert!(
            parts.iter().all(|p| p.model() == model),
            "objects from different models combined"
        );
        Obj::make(model, shape)
    }

    pub fn base(model: ModelKind, b: Base) -> Obj {
        Obj::make(model, Shape::Base(b))
    }

    pub fn unit(model: ModelKind) -> Obj {
        Obj::make(model, Shape::Unit)
    }

    pub fn degrees(model: ModelKind) -> Obj {
        Obj::make(model, Shape::Degrees)
    }

    pub fn top(model: ModelKind) -> Obj {
        Obj::make(model, Shape::With(Vec::new()))
    }

    pub fn tensor(a: &Obj, b: &Obj) -> Obj {
        Obj::derive(&[a, b], Shape::Tensor(a.clone(), b.clone()))
    }

    pub fn lin(a: &Obj, b: &Obj) -> Obj {
        Obj::derive(&[a, b], Shape::Lin(a.clone(), b.clone()))
    }

    pub fn with(xs: &[Obj]) -> Obj {
        assert!(!xs.is_empty(), "use Obj::top for the empty product");
        Obj::derive(&xs.iter().collect::<Vec<_>>(), Shape::With(xs.to_vec()))
    }

    pub fn with2(a: &Obj, b: &Obj) -> Obj {
        Obj::with(&[a.clone(), b.clone()])
    }

    pub fn plus(xs: &[Obj]) -> Obj {
        assert!(!xs.is_empty(), "empty coproduct");
        Obj::derive(&xs.iter().collect::<Vec<_>>(), Shape::Plus(xs.to_vec()))
    }

    pub fn bang(a: &Obj) -> Obj {
        Obj::make(a.model(), Shape::Bang(a.clone()))
    }

    pub fn bang_e(a: &Obj) -> Obj {
        Obj::make(a.model(), Shape::BangE(a.clone()))
    }

    pub fn dual(a: &Obj) -> Obj {
        match a.shape() {
            Shape::Dual(x) => x.clone(),
            _ => Obj::make(a.model(), Shape::Dual(a.clone())),
        }
    }

    /// `S X = D ⊸ X`.
    pub fn s(a: &Obj) -> Obj {
        Obj::lin(&Obj::degrees(a.model()), a)
    }

    pub fn model(&self) -> ModelKind {
        self.0.model
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    pub fn lin_parts(&self) -> Option<(&Obj, &Obj)> {
        match self.shape() {
            Shape::Lin(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn tensor_parts(&self) -> Option<(&Obj, &Obj)> {
        match self.shape() {
            Shape::Tensor(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn bang_inner(&self) -> Option<&Obj> {
        match self.shape() {
            Shape::Bang(a) => Some(a),
            _ => None,
        }
    }

    /// Inner object of `S X`.
    pub fn s_inner(&self) -> Option<&Obj> {
        match self.shape() {
            Shape::Lin(d, x) if matches!(d.shape(), Shape::Degrees) => Some(x),
            _ => None,
        }
    }

    pub fn with_parts(&self) -> Option<&[Obj]> {
        match self.shape() {
            Shape::With(xs) => Some(xs),
            _ => None,
        }
    }

    pub fn plus_parts(&self) -> Option<&[Obj]> {
        match self.shape() {
            Shape::Plus(xs) => Some(xs),
            _ => None,
        }
    }

    /// The web under per-level bounds: every bag has at most `bang`
    /// elements and every degree is at most `s`.
    pub fn web(&self, b: &Bounds) -> Arc<Vec<Point>> {
        self.web_budget(b, Budget::FULL)
    }

    /// The part of the web inside the within-bound region.
    pub fn region(&self, b: &Bounds) -> Arc<Vec<Point>> {
        self.web_budget(b, Budget { bag: b.bang, deg: b.s })
    }

    fn web_budget(&self, b: &Bounds, budget: Budget) -> Arc<Vec<Point>> {
        let key = (*b, budget);
        if let Some(w) = self.0.webs.lock().unwrap().get(&key) {
            return w.clone();
        }
        let mut pts = self.enumerate(b, budget);
        pts.sort();
        pts.dedup();
        let w = Arc::new(pts);
        self.0.webs.lock().unwrap().insert(key, w.clone());
        w
    }

    fn enumerate(&self, b: &Bounds, budget: Budget) -> Vec<Point> {
        let fits = |p: &Point| budget.minus(p).is_some();
        match self.shape() {
            Shape::Base(base) => base.web.iter().filter(|p| fits(p)).cloned().collect(),
            Shape::Dual(x) => x.web_budget(b, budget).to_vec(),
            Shape::Unit => vec![Point::Unit],
            Shape::Degrees => (0..=b.s.min(budget.deg)).map(Point::Deg).collect(),
            Shape::Tensor(x, y) | Shape::Lin(x, y) => {
                let mut out = Vec::new();
                for a in x.web_budget(b, budget).iter() {
                    let rest = budget.minus(a).expect("enumerated within budget");
                    for c in y.web_budget(b, rest).iter() {
                        out.push(Point::pair(a.clone(), c.clone()));
                    }
                }
                out
            }
            Shape::With(xs) | Shape::Plus(xs) => xs
                .iter()
                .enumerate()
                .flat_map(|(i, x)| {
                    x.web_budget(b, budget)
                        .iter()
                        .map(move |a| Point::tag(i, a.clone()))
                        .collect::<Vec<_>>()
                })
                .collect(),
            Shape::Bang(x) | Shape::BangE(x) => {
                let elems = x.web_budget(b, budget);
                let coh_only = self.model() == ModelKind::Coh && matches!(self.shape(), Shape::Bang(_));
                let mut out = Vec::new();
                let mut cur: Vec<usize> = Vec::new();
                bags_in_budget(x, &elems, 0, b.bang, budget, coh_only, &mut cur, &mut out);
                out
            }
        }
    }

    /// Structural membership in the web under `b`.
    pub fn contains(&self, p: &Point, b: &Bounds) -> bool {
        match (self.shape(), p) {
            (Shape::Base(base), _) => base.web.binary_search(p).is_ok(),
            (Shape::Dual(x), _) => x.contains(p, b),
            (Shape::Unit, Point::Unit) => true,
            (Shape::Degrees, Point::Deg(n)) => *n <= b.s,
            (Shape::Tensor(x, y) | Shape::Lin(x, y), Point::Pair(q)) => {
                x.contains(&q.0, b) && y.contains(&q.1, b)
            }
            (Shape::With(xs) | Shape::Plus(xs), Point::Tag(i, a)) => {
                xs.get(*i).is_some_and(|x| x.contains(a, b))
            }
            (Shape::Bang(x) | Shape::BangE(x), Point::Bag(m)) => {
                m.size() <= b.bang
                    && m.support().all(|a| x.contains(a, b))
                    && (self.model() != ModelKind::Coh
                        || matches!(self.shape(), Shape::BangE(_))
                        || is_clique(x, m))
            }
            _ => false,
        }
    }

    /// Three-valued coherence of two points of this object.
    pub fn rel(&self, p: &Point, q: &Point) -> Rel3 {
        let model = self.model();
        match self.shape() {
            Shape::Base(base) => base.rel(model, p, q),
            Shape::Dual(x) => x.rel(p, q).dual(),
            Shape::Unit => unit_rel(model),
            Shape::Degrees => {
                if p == q {
                    unit_rel(model)
                } else {
                    Rel3::Scoh
                }
            }
            Shape::Lin(x, y) | Shape::Tensor(x, y) => {
                let (p0, p1) = p.as_pair().expect("pair point");
                let (q0, q1) = q.as_pair().expect("pair point");
                let (ra, rb) = (x.rel(p0, q0), y.rel(p1, q1));
                if matches!(self.shape(), Shape::Lin(..)) {
                    Rel3::lin(ra, rb)
                } else {
                    Rel3::tensor(ra, rb)
                }
            }
            Shape::With(xs) | Shape::Plus(xs) => {
                let (i, a) = p.as_tag().expect("tagged point");
                let (j, c) = q.as_tag().expect("tagged point");
                if i != j {
                    if matches!(self.shape(), Shape::With(_)) {
                        Rel3::Scoh
                    } else {
                        Rel3::Sincoh
                    }
                } else {
                    xs[i].rel(a, c)
                }
            }
            Shape::Bang(x) => {
                let m = p.as_bag().expect("bag point");
                let n = q.as_bag().expect("bag point");
                bang_rel(model, x, m, n)
            }
            Shape::BangE(x) => {
                let m = p.as_bag().expect("bag point");
                let n = q.as_bag().expect("bag point");
                bang_e_rel(x, m, n)
            }
        }
    }

    /// Explicit base witnesses, empty for composite shapes.
    pub fn base_witnesses(&self) -> &[Coords] {
        match self.shape() {
            Shape::Base(b) => &b.witnesses,
            _ => &[],
        }
    }
}

fn unit_rel(model: ModelKind) -> Rel3 {
    if model == ModelKind::Wcs {
        Rel3::Scoh
    } else {
        Rel3::Neu
    }
}

fn is_clique(x: &Obj, m: &Multiset) -> bool {
    let sup: Vec<&Point> = m.support().collect();
    sup.iter().enumerate().all(|(i, a)| {
        sup[i..].iter().all(|c| x.rel(a, c).coh())
    })
}

#[allow(clippy::too_many_arguments)]
fn bags_in_budget(
    x: &Obj,
    elems: &[Point],
    start: usize,
    size_left: usize,
    budget: Budget,
    coh_only: bool,
    cur: &mut Vec<usize>,
    out: &mut Vec<Point>,
) {
    out.push(Point::bag_of(cur.iter().map(|&i| elems[i].clone())));
    if size_left == 0 || budget.bag == 0 {
        return;
    }
    for i in start..elems.len() {
        let e = &elems[i];
        let Some(rest) = budget.minus(e) else { continue };
        let Some(bag_left) = rest.bag.checked_sub(1) else { continue };
        if coh_only && !cur.iter().all(|&j| x.rel(&elems[j], e).coh()) {
            continue;
        }
        cur.push(i);
        bags_in_budget(
            x,
            elems,
            i,
            size_left - 1,
            Budget { bag: bag_left, deg: rest.deg },
            coh_only,
            cur,
            out,
        );
        cur.pop();
    }
}

fn bang_rel(model: ModelKind, x: &Obj, m: &Multiset, n: &Multiset) -> Rel3 {
    let coherent = m.support().all(|a| n.support().all(|c| x.rel(a, c).coh()));
    if !coherent {
        return Rel3::Sincoh;
    }
    if model == ModelKind::Wcs {
        return Rel3::Scoh;
    }
    if m.size() == n.size() && neutral_matching(x, &m.to_list(), &n.to_list()) {
        Rel3::Neu
    } else {
        Rel3::Scoh
    }
}

/// Whether the two lists admit a bijection pairing neutral elements.
fn neutral_matching(x: &Obj, left: &[Point], right: &[Point]) -> bool {
    let n = right.len();
    let adj: Vec<Vec<bool>> = left
        .iter()
        .map(|a| right.iter().map(|c| x.rel(a, c) == Rel3::Neu).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        adj: &[Vec<bool>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..owner.len() {
            if adj[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..left.len()).all(|i| augment(i, &adj, &mut vec![false; n], &mut owner))
}

fn bang_e_rel(x: &Obj, m: &Multiset, n: &Multiset) -> Rel3 {
    let mut all = m.to_list();
    all.extend(n.to_list());
    let k = all.len();
    let r = |i: usize, j: usize| x.rel(&all[i], &all[j]);
    let coherent = (0..k).all(|i| (0..k).all(|j| i == j || r(i, j).coh()));
    if !coherent {
        return Rel3::Sincoh;
    }
    let strict = (0..k).any(|i| (0..k).all(|j| i == j || r(i, j) == Rel3::Scoh));
    if strict {
        Rel3::Scoh
    } else {
        Rel3::Neu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab(model: ModelKind) -> Obj {
        Obj::base(model, Base::atoms("A", &["a", "b"]))
    }

    #[test]
    fn bang_webs() {
        let b = Bounds::new(2, 2);
        let x = Obj::base(ModelKind::Rel, Base::atoms("X", &["a"]));
        assert_eq!(Obj::bang(&x).web(&b).len(), 3);
        // a and b strictly incoherent in COH: no mixed bag
        let coh = Obj::bang(&ab(ModelKind::Coh));
        let w = coh.web(&b);
        assert_eq!(w.len(), 5);
        assert!(!w.contains(&Point::bag_of([Point::atom("a"), Point::atom("b")])));
        assert_eq!(Obj::bang(&ab(ModelKind::Rel)).web(&b).len(), 6);
    }

    #[test]
    fn s_web_and_region() {
        let b = Bounds::new(2, 2);
        let sx = Obj::s(&ab(ModelKind::Rel));
        assert_eq!(sx.web(&b).len(), 6);
        let ssx = Obj::s(&sx);
        assert_eq!(ssx.web(&b).len(), 18);
        // total degree at most 2: pairs (i,j) with i+j ≤ 2
        assert_eq!(ssx.region(&b).len(), 12);
        let bsx = Obj::bang(&sx);
        assert!(bsx.region(&b).iter().all(|p| b.in_region(p)));
    }

    #[test]
    fn nucs_bang_neutrality() {
        let base = Base::atoms("A", &["a", "b"]);
        let x = Obj::base(ModelKind::Nucs, base.cohere(&Point::atom("a"), &Point::atom("b")));
        let bx = Obj::bang(&x);
        let bag = |xs: &[&str]| Point::bag_of(xs.iter().map(|s| Point::atom(s)));
        assert_eq!(bx.rel(&bag(&["a"]), &bag(&["a"])), Rel3::Neu);
        assert_eq!(bx.rel(&bag(&["a"]), &bag(&["b"])), Rel3::Scoh);
        assert_eq!(bx.rel(&bag(&["a", "b"]), &bag(&["b", "a"])), Rel3::Neu);
        assert_eq!(bx.rel(&bag(&["a"]), &bag(&["a", "a"])), Rel3::Scoh);
    }

    #[test]
    fn degrees_relations() {
        for (model, diag) in [
            (ModelKind::Wcs, Rel3::Scoh),
            (ModelKind::Coh, Rel3::Neu),
            (ModelKind::Nucs, Rel3::Neu),
        ] {
            let d = Obj::degrees(model);
            assert_eq!(d.rel(&Point::Deg(1), &Point::Deg(1)), diag);
            assert_eq!(d.rel(&Point::Deg(1), &Point::Deg(2)), Rel3::Scoh);
        }
    }

    #[test]
    fn coh_s_object() {
        // (i,a) coh (i',a') iff a coh a' and (a = a' ⇒ i = i')
        let x = Obj::base(ModelKind::Coh, Base::atoms("X", &["a"]));
        let sx = Obj::s(&x);
        let p = |i| Point::graded(i, Point::atom("a"));
        assert_eq!(sx.rel(&p(0), &p(0)), Rel3::Neu);
        assert_eq!(sx.rel(&p(0), &p(1)), Rel3::Sincoh);
    }
}
