use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde_json::{json, Value};

use super::arrow::add_into;
use super::{Arrow, Base, Bounds, Grading, ModelKind, Obj, Rel3, Row};
use crate::error::{Error, Result};
use crate::multiset::Point;
use crate::semiring::{RatPos, Semiring};

/// A sparse matrix over `dom × cod` restricted to the webs under `bounds`.
/// Stored row-major with no zero entries.
#[derive(Clone, PartialEq)]
pub struct Morphism<S> {
    dom: Obj,
    cod: Obj,
    bounds: Bounds,
    rows: BTreeMap<Point, Row<S>>,
}

impl<S: Semiring> fmt::Debug for Morphism<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {} [{}]", self.dom, self.cod, self.model())?;
        for (p, q, c) in self.entries() {
            writeln!(f, "  {p}  {q}  {c}")?;
        }
        Ok(())
    }
}

fn check_semiring<S: Semiring>(model: ModelKind) -> Result<()> {
    if model.semiring() != S::ID {
        return Err(Error::SemiringMismatch { left: model.semiring(), right: S::ID });
    }
    Ok(())
}

impl<S: Semiring> Morphism<S> {
    /// Builds from entries, summing duplicates. Every point must lie in the
    /// corresponding web.
    pub fn new<I>(dom: &Obj, cod: &Obj, bounds: Bounds, entries: I) -> Result<Morphism<S>>
    where
        I: IntoIterator<Item = (Point, Point, S)>,
    {
        if dom.model() != cod.model() {
            return Err(Error::ModelMismatch(format!("{} vs {}", dom.model(), cod.model())));
        }
        check_semiring::<S>(dom.model())?;
        let mut rows: BTreeMap<Point, Row<S>> = BTreeMap::new();
        for (p, q, c) in entries {
            for (pt, obj) in [(&p, dom), (&q, cod)] {
                if !obj.contains(pt, &bounds) {
                    return Err(Error::Type(format!("point {pt} is not in the web of {obj}")));
                }
            }
            add_into(rows.entry(p).or_default(), q, c);
        }
        rows.retain(|_, r| !r.is_empty());
        Ok(Morphism { dom: dom.clone(), cod: cod.clone(), bounds, rows })
    }

    pub(crate) fn from_rows_unchecked(
        dom: Obj,
        cod: Obj,
        bounds: Bounds,
        rows: BTreeMap<Point, Row<S>>,
    ) -> Morphism<S> {
        Morphism { dom, cod, bounds, rows }
    }

    pub fn identity(x: &Obj, bounds: Bounds) -> Morphism<S> {
        Arrow::identity(x).materialize(&bounds)
    }

    pub fn zero(dom: &Obj, cod: &Obj, bounds: Bounds) -> Morphism<S> {
        Morphism { dom: dom.clone(), cod: cod.clone(), bounds, rows: BTreeMap::new() }
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn model(&self) -> ModelKind {
        self.dom.model()
    }

    pub fn rows(&self) -> &BTreeMap<Point, Row<S>> {
        &self.rows
    }

    pub fn row(&self, p: &Point) -> Row<S> {
        self.rows.get(p).cloned().unwrap_or_default()
    }

    pub fn get(&self, p: &Point, q: &Point) -> S {
        self.rows
            .get(p)
            .and_then(|r| r.get(q))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Point, &Point, &S)> {
        self.rows
            .iter()
            .flat_map(|(p, r)| r.iter().map(move |(q, c)| (p, q, c)))
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The entry set, forgetting coefficients.
    pub fn support(&self) -> BTreeSet<(Point, Point)> {
        self.entries().map(|(p, q, _)| (p.clone(), q.clone())).collect()
    }

    pub fn as_arrow(&self) -> Arrow<S> {
        let rows = self.rows.clone();
        Arrow::new(self.dom.clone(), self.cod.clone(), "lit", Grading::ANY, move |p| {
            rows.get(p).cloned().unwrap_or_default()
        })
    }

    /// Matrix product `g ∘ f` over the middle web.
    pub fn compose(g: &Morphism<S>, f: &Morphism<S>) -> Result<Morphism<S>> {
        if f.cod != g.dom {
            return Err(Error::ObjectMismatch {
                expected: g.dom.to_string(),
                found: f.cod.to_string(),
            });
        }
        if f.bounds != g.bounds {
            return Err(Error::ObjectMismatch {
                expected: format!("{:?}", g.bounds),
                found: format!("{:?}", f.bounds),
            });
        }
        let mut rows = BTreeMap::new();
        for (p, r) in &f.rows {
            let mut out = Row::new();
            for (m, c) in r {
                if let Some(gr) = g.rows.get(m) {
                    for (q, e) in gr {
                        add_into(&mut out, q.clone(), c.clone() * e.clone());
                    }
                }
            }
            if !out.is_empty() {
                rows.insert(p.clone(), out);
            }
        }
        Ok(Morphism { dom: f.dom.clone(), cod: g.cod.clone(), bounds: f.bounds, rows })
    }

    pub fn tensor(f: &Morphism<S>, g: &Morphism<S>) -> Result<Morphism<S>> {
        if f.model() != g.model() {
            return Err(Error::ModelMismatch(format!("{} vs {}", f.model(), g.model())));
        }
        Ok(Arrow::tensor(&f.as_arrow(), &g.as_arrow()).materialize(&f.bounds))
    }

    /// `fᵀ : cod^⊥ → dom^⊥`.
    pub fn transpose(&self) -> Morphism<S> {
        let mut rows: BTreeMap<Point, Row<S>> = BTreeMap::new();
        for (p, q, c) in self.entries() {
            rows.entry(q.clone()).or_default().insert(p.clone(), c.clone());
        }
        Morphism {
            dom: Obj::dual(&self.cod),
            cod: Obj::dual(&self.dom),
            bounds: self.bounds,
            rows,
        }
    }

    /// Pointwise sum with no summability check.
    pub fn add_unchecked(&self, other: &Morphism<S>) -> Morphism<S> {
        let mut rows = self.rows.clone();
        for (p, q, c) in other.entries() {
            add_into(rows.entry(p.clone()).or_default(), q.clone(), c.clone());
        }
        Morphism { rows, ..self.clone() }
    }

    /// Keeps the entries accepted by `keep`.
    pub fn filter<F: Fn(&Point, &Point) -> bool>(&self, keep: F) -> Morphism<S> {
        let mut rows = BTreeMap::new();
        for (p, r) in &self.rows {
            let r: Row<S> = r.iter().filter(|(q, _)| keep(p, q)).map(|(q, c)| (q.clone(), c.clone())).collect();
            if !r.is_empty() {
                rows.insert(p.clone(), r);
            }
        }
        Morphism { rows, ..self.clone() }
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries()
            .map(|(p, q, c)| json!([p.to_json(), q.to_json(), c.encode()]))
            .collect();
        json!({
            "model": self.model().name(),
            "semiring": S::ID.name(),
            "bounds": {"bang": self.bounds.bang, "s": self.bounds.s, "pad": self.bounds.pad},
            "dom": obj_json(&self.dom, &self.bounds),
            "cod": obj_json(&self.cod, &self.bounds),
            "entries": entries,
        })
    }

    /// Inverse of [`Morphism::to_json`]. Objects come back as explicit webs
    /// named by their printed type, so a second `to_json` is identical.
    pub fn from_json(v: &Value) -> Result<Morphism<S>> {
        let bad = |what: &str| Error::Parse(format!("morphism json: {what}"));
        let model: ModelKind = v["model"].as_str().ok_or_else(|| bad("model"))?.parse()?;
        let bounds: Bounds = serde_json::from_value(v["bounds"].clone())
            .map_err(|e| bad(&format!("bounds: {e}")))?;
        let dom = obj_from_json(model, &v["dom"])?;
        let cod = obj_from_json(model, &v["cod"])?;
        let entries = v["entries"].as_array().ok_or_else(|| bad("entries"))?;
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| bad("entry"))?;
            let c = S::decode(e[2].as_str().ok_or_else(|| bad("scalar"))?)?;
            out.push((Point::from_json(&e[0])?, Point::from_json(&e[1])?, c));
        }
        Morphism::new(&dom, &cod, bounds, out)
    }
}

fn obj_json(x: &Obj, b: &Bounds) -> Value {
    let web = x.web(b);
    let pts: Vec<Value> = web.iter().map(Point::to_json).collect();
    let mut obj = json!({"type": x.to_string(), "web": pts});
    let pairs = |want: Rel3, diag: bool| -> Vec<Value> {
        let mut out = Vec::new();
        for (i, p) in web.iter().enumerate() {
            let start = if diag { i } else { i + 1 };
            for q in &web[start..] {
                if x.rel(p, q) == want {
                    out.push(json!([p.to_json(), q.to_json()]));
                }
            }
        }
        out
    };
    match x.model() {
        ModelKind::Wcs => obj["coh"] = json!({"strict": pairs(Rel3::Scoh, true)}),
        ModelKind::Coh => obj["coh"] = json!({"coherent": pairs(Rel3::Scoh, false)}),
        ModelKind::Nucs => {
            obj["coh"] = json!({
                "strict": pairs(Rel3::Scoh, true),
                "incoherent": pairs(Rel3::Sincoh, true),
            })
        }
        ModelKind::Pcoh => {
            let ws: Vec<Value> = x.base_witnesses().iter().map(coords_json).collect();
            obj["witnesses"] = Value::Array(ws);
        }
        _ => {}
    }
    obj
}

pub(crate) fn coords_json(c: &BTreeMap<Point, RatPos>) -> Value {
    Value::Array(c.iter().map(|(p, s)| json!([p.to_json(), s.encode()])).collect())
}

pub(crate) fn coords_from_json(v: &Value) -> Result<BTreeMap<Point, RatPos>> {
    let bad = || Error::Parse(format!("bad coordinate list: {v}"));
    let mut out = BTreeMap::new();
    for e in v.as_array().ok_or_else(bad)? {
        let e = e.as_array().filter(|e| e.len() == 2).ok_or_else(bad)?;
        let s = RatPos::decode(e[1].as_str().ok_or_else(bad)?)?;
        if !s.is_zero() {
            out.insert(Point::from_json(&e[0])?, s);
        }
    }
    Ok(out)
}

fn obj_from_json(model: ModelKind, v: &Value) -> Result<Obj> {
    let bad = |what: &str| Error::Parse(format!("object json: {what}"));
    let name = v["type"].as_str().unwrap_or("X");
    let web = v["web"]
        .as_array()
        .ok_or_else(|| bad("web"))?
        .iter()
        .map(Point::from_json)
        .collect::<Result<Vec<_>>>()?;
    let mut base = Base::new(name, web);
    let pair_list = |key: &str| -> Result<Vec<(Point, Point)>> {
        let Some(list) = v["coh"][key].as_array() else { return Ok(Vec::new()) };
        list.iter()
            .map(|e| {
                let e = e.as_array().filter(|e| e.len() == 2).ok_or_else(|| bad("pair"))?;
                Ok((Point::from_json(&e[0])?, Point::from_json(&e[1])?))
            })
            .collect()
    };
    match model {
        ModelKind::Wcs | ModelKind::Nucs => {
            for (p, q) in pair_list("strict")? {
                base = base.cohere(&p, &q);
            }
            for (p, q) in pair_list("incoherent")? {
                base = base.incohere(&p, &q);
            }
        }
        ModelKind::Coh => {
            for (p, q) in pair_list("coherent")? {
                base = base.cohere(&p, &q);
            }
        }
        ModelKind::Pcoh => {
            if let Some(ws) = v["witnesses"].as_array() {
                base.witnesses = ws.iter().map(coords_from_json).collect::<Result<_>>()?;
            }
        }
        _ => {}
    }
    Ok(Obj::base(model, base))
}

/// Dispatches a generic computation on the semiring of a model.
#[macro_export]
macro_rules! with_semiring {
    ($id:expr, $S:ident => $body:expr) => {
        match $id {
            $crate::semiring::SemiringId::Bool => {
                type $S = $crate::semiring::Bool;
                $body
            }
            $crate::semiring::SemiringId::NatInf => {
                type $S = $crate::semiring::NatInf;
                $body
            }
            $crate::semiring::SemiringId::RatPos => {
                type $S = $crate::semiring::RatPos;
                $body
            }
        }
    };
}
