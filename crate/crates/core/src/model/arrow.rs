use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use super::{Bounds, Morphism, Obj};
use crate::error::{Error, Result};
use crate::multiset::Point;
use crate::semiring::Semiring;

/// One row of a matrix: target point to nonzero coefficient.
pub type Row<S> = BTreeMap<Point, S>;

/// How a map moves a weight from source point to target point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Preserve,
    Up,
    Down,
    Any,
}

impl Trend {
    pub fn admits(self, from: usize, to: usize) -> bool {
        match self {
            Trend::Preserve => from == to,
            Trend::Up => to >= from,
            Trend::Down => to <= from,
            Trend::Any => true,
        }
    }

    fn then(self, next: Trend) -> Trend {
        use Trend::*;
        match (self, next) {
            (Preserve, t) | (t, Preserve) => t,
            (Up, Up) => Up,
            (Down, Down) => Down,
            _ => Any,
        }
    }
}

/// Declared behaviour on bag weight and degree weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grading {
    pub bag: Trend,
    pub deg: Trend,
}

impl Grading {
    pub const PRESERVE: Grading = Grading { bag: Trend::Preserve, deg: Trend::Preserve };
    pub const ANY: Grading = Grading { bag: Trend::Any, deg: Trend::Any };

    pub fn new(bag: Trend, deg: Trend) -> Grading {
        Grading { bag, deg }
    }

    pub fn then(self, next: Grading) -> Grading {
        Grading { bag: self.bag.then(next.bag), deg: self.deg.then(next.deg) }
    }

    pub fn admits(&self, p: &Point, q: &Point) -> bool {
        self.bag.admits(p.bag_weight(), q.bag_weight())
            && self.deg.admits(p.deg_weight(), q.deg_weight())
    }
}

type RowFn<S> = dyn Fn(&Point) -> Row<S> + Send + Sync;

/// A morphism given by its rows, computed on demand. Rows are exact: no
/// target is dropped except by the padding caps of unbounded generators.
#[derive(Clone)]
pub struct Arrow<S> {
    dom: Obj,
    cod: Obj,
    name: Arc<str>,
    grading: Grading,
    f: Arc<RowFn<S>>,
}

impl<S> fmt::Debug for Arrow<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name, self.dom, self.cod)
    }
}

pub(crate) fn add_into<S: Semiring>(row: &mut Row<S>, q: Point, c: S) {
    if c.is_zero() {
        return;
    }
    match row.get_mut(&q) {
        Some(v) => {
            let sum = v.clone() + c;
            *v = sum;
        }
        None => {
            row.insert(q, c);
        }
    }
}

impl<S: Semiring> Arrow<S> {
    pub fn new<F>(dom: Obj, cod: Obj, name: &str, grading: Grading, f: F) -> Arrow<S>
    where
        F: Fn(&Point) -> Row<S> + Send + Sync + 'static,
    {
        Arrow { dom, cod, name: Arc::from(name), grading, f: Arc::new(f) }
    }

    /// A 0/1 map sending each source point to a list of targets.
    pub fn relation<F>(dom: Obj, cod: Obj, name: &str, grading: Grading, f: F) -> Arrow<S>
    where
        F: Fn(&Point) -> Vec<Point> + Send + Sync + 'static,
    {
        Arrow::new(dom, cod, name, grading, move |p| {
            let mut row = Row::new();
            for q in f(p) {
                add_into(&mut row, q, S::one());
            }
            row
        })
    }

    /// A map sending each source point to at most one target.
    pub fn function<F>(dom: Obj, cod: Obj, name: &str, grading: Grading, f: F) -> Arrow<S>
    where
        F: Fn(&Point) -> Option<Point> + Send + Sync + 'static,
    {
        Arrow::relation(dom, cod, name, grading, move |p| f(p).into_iter().collect())
    }

    pub fn dom(&self) -> &Obj {
        &self.dom
    }

    pub fn cod(&self) -> &Obj {
        &self.cod
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn renamed(mut self, name: &str) -> Arrow<S> {
        self.name = Arc::from(name);
        self
    }

    pub fn row(&self, p: &Point) -> Row<S> {
        (self.f)(p)
    }

    pub fn identity(x: &Obj) -> Arrow<S> {
        Arrow::function(x.clone(), x.clone(), "id", Grading::PRESERVE, |p| Some(p.clone()))
    }

    pub fn zero(dom: &Obj, cod: &Obj) -> Arrow<S> {
        Arrow::new(dom.clone(), cod.clone(), "zero", Grading::ANY, |_| Row::new())
    }

    /// `self ∘ f`, i.e. first `f` then `self`.
    pub fn after(&self, f: &Arrow<S>) -> Result<Arrow<S>> {
        if f.cod != self.dom {
            return Err(Error::ObjectMismatch {
                expected: self.dom.to_string(),
                found: f.cod.to_string(),
            });
        }
        let (g, f2) = (self.clone(), f.clone());
        let name = format!("{}∘{}", self.name, f.name);
        Ok(Arrow::new(
            f.dom.clone(),
            self.cod.clone(),
            &name,
            f.grading.then(self.grading),
            move |p| push(&g, &f2.row(p)),
        ))
    }

    /// Composite of a path listed in application order.
    pub fn chain(path: &[Arrow<S>]) -> Result<Arrow<S>> {
        let mut it = path.iter();
        let first = it.next().ok_or_else(|| Error::Arity("empty composite".into()))?;
        it.try_fold(first.clone(), |acc, g| g.after(&acc))
    }

    /// `f ⊗ g` on pair points.
    pub fn tensor(f: &Arrow<S>, g: &Arrow<S>) -> Arrow<S> {
        let (f2, g2) = (f.clone(), g.clone());
        let name = format!("({}⊗{})", f.name, g.name);
        Arrow::new(
            Obj::tensor(&f.dom, &g.dom),
            Obj::tensor(&f.cod, &g.cod),
            &name,
            combine_grading(f.grading, g.grading),
            move |p| {
                let (a, b) = p.as_pair().expect("tensor point");
                let (ra, rb) = (f2.row(a), g2.row(b));
                let mut row = Row::new();
                for (x, c) in &ra {
                    for (y, e) in &rb {
                        add_into(&mut row, Point::pair(x.clone(), y.clone()), c.clone() * e.clone());
                    }
                }
                row
            },
        )
    }

    /// Memoizes rows; useful for maps evaluated from many source points.
    pub fn cached(&self) -> Arrow<S> {
        let inner = self.clone();
        let memo: Mutex<HashMap<Point, Row<S>>> = Mutex::new(HashMap::new());
        Arrow::new(self.dom.clone(), self.cod.clone(), &self.name, self.grading, move |p| {
            if let Some(r) = memo.lock().unwrap().get(p) {
                return r.clone();
            }
            let r = inner.row(p);
            memo.lock().unwrap().insert(p.clone(), r.clone());
            r
        })
    }

    /// Sum of rows; no summability check (see `partial_sum`).
    pub fn sum_unchecked(dom: &Obj, cod: &Obj, fs: &[Arrow<S>]) -> Arrow<S> {
        let fs = fs.to_vec();
        let grading = fs
            .iter()
            .map(|f| f.grading)
            .reduce(combine_grading)
            .unwrap_or(Grading::ANY);
        Arrow::new(dom.clone(), cod.clone(), "sum", grading, move |p| {
            let mut row = Row::new();
            for f in &fs {
                for (q, c) in f.row(p) {
                    add_into(&mut row, q, c);
                }
            }
            row
        })
    }

    /// Restricts to the web of `dom × cod` under `b`.
    pub fn materialize(&self, b: &Bounds) -> Morphism<S> {
        let mut rows = BTreeMap::new();
        for p in self.dom.web(b).iter() {
            let row: Row<S> = self
                .row(p)
                .into_iter()
                .filter(|(q, _)| self.cod.contains(q, b))
                .collect();
            if !row.is_empty() {
                rows.insert(p.clone(), row);
            }
        }
        Morphism::from_rows_unchecked(self.dom.clone(), self.cod.clone(), *b, rows)
    }

    /// Restriction to the within-bound region of both sides.
    pub fn region_rows(&self, b: &Bounds) -> BTreeMap<Point, Row<S>> {
        self.dom
            .region(b)
            .iter()
            .map(|p| {
                let row: Row<S> = self.row(p).into_iter().filter(|(q, _)| b.in_region(q)).collect();
                (p.clone(), row)
            })
            .collect()
    }
}

fn combine_grading(a: Grading, b: Grading) -> Grading {
    let join = |x: Trend, y: Trend| if x == y { x } else { Trend::Any };
    Grading { bag: join(a.bag, b.bag), deg: join(a.deg, b.deg) }
}

/// Pushes a row vector through `g`.
fn push<S: Semiring>(g: &Arrow<S>, v: &Row<S>) -> Row<S> {
    let mut out = Row::new();
    for (m, c) in v {
        for (q, e) in g.row(m) {
            add_into(&mut out, q, c.clone() * e);
        }
    }
    out
}
