use std::collections::BTreeMap;

use serde_json::Value;

use super::ast::{parse, Entry, Form, Gen, MorExpr, ObjDecl, ObjExpr, Op, PointExpr};
use super::sexp::{ParseError, Pos};
use crate::error::{Error, Result};
use crate::exponential::{bang, contr, der, dig, kleisli, seely2, seely2_inv, weak};
use crate::model::structural::{cotuple, curry, ev, sym, tuple, uncurry};
use crate::model::{partial_sum, validate, Arrow, Base, Bounds, Coords, ModelKind, Morphism, Obj};
use crate::multiset::{Multiset, Point};
use crate::semiring::{Bool, NatInf, RatPos, Semiring};
use crate::summability::{lift, s_map, sdist, sigma, sinj, sproj, swap, theta};
use crate::taylor::{homogeneous, sdl_explicit, taylor, taylor_composite};
use crate::with_semiring;

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Error {
        Error::Parse(e.to_string())
    }
}

/// A morphism over whichever semiring the session model uses.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMorphism {
    Bool(Morphism<Bool>),
    NatInf(Morphism<NatInf>),
    RatPos(Morphism<RatPos>),
}

/// Moves morphisms in and out of [`AnyMorphism`].
pub trait Embed: Semiring {
    fn wrap(m: Morphism<Self>) -> AnyMorphism;
    fn unwrap(m: &AnyMorphism) -> Option<&Morphism<Self>>;
}

macro_rules! embed {
    ($t:ty, $v:ident) => {
        impl Embed for $t {
            fn wrap(m: Morphism<Self>) -> AnyMorphism {
                AnyMorphism::$v(m)
            }
            fn unwrap(m: &AnyMorphism) -> Option<&Morphism<Self>> {
                match m {
                    AnyMorphism::$v(m) => Some(m),
                    _ => None,
                }
            }
        }
    };
}
embed!(Bool, Bool);
embed!(NatInf, NatInf);
embed!(RatPos, RatPos);

macro_rules! each {
    ($m:expr, $f:ident => $body:expr) => {
        match $m {
            AnyMorphism::Bool($f) => $body,
            AnyMorphism::NatInf($f) => $body,
            AnyMorphism::RatPos($f) => $body,
        }
    };
}

impl AnyMorphism {
    pub fn dom(&self) -> &Obj {
        each!(self, m => m.dom())
    }

    pub fn cod(&self) -> &Obj {
        each!(self, m => m.cod())
    }

    pub fn len(&self) -> usize {
        each!(self, m => m.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_json(&self) -> Value {
        each!(self, m => m.to_json())
    }

    /// `(source, target, scalar)` in canonical order, scalars encoded.
    pub fn entries_text(&self) -> Vec<(String, String, String)> {
        each!(self, m => m.entries().map(|(p, q, c)| (p.to_string(), q.to_string(), c.encode())).collect())
    }

    pub fn as_ratpos(&self) -> Option<&Morphism<RatPos>> {
        RatPos::unwrap(self)
    }
}

/// The evaluation context: a model, the truncation bounds, declared
/// objects and named morphisms.
#[derive(Clone, Debug)]
pub struct Session {
    pub model: ModelKind,
    pub bounds: Bounds,
    pub validate: bool,
    /// Settings fixed by the caller that `(model …)` forms leave alone.
    pub pins: Pins,
    objs: BTreeMap<String, Obj>,
    bindings: BTreeMap<String, AnyMorphism>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Pins {
    pub model: bool,
    pub bang_degree: bool,
    pub s_degree: bool,
}

/// A type-checked expression: every node knows its domain and codomain.
#[derive(Clone, Debug)]
pub struct Typed {
    pub node: Node,
    pub dom: Obj,
    pub cod: Obj,
    pub args: Vec<Typed>,
}

#[derive(Clone, Debug)]
pub enum Node {
    Var(String),
    Lit(Vec<(Point, Point, String)>),
    Gen(Gen, Vec<Obj>, Option<usize>),
    Op(Op),
    Homog(usize),
}

fn type_err(pos: Pos, node: &str, msg: impl std::fmt::Display) -> Error {
    Error::Type(format!("{pos}: `{node}`: {msg}"))
}

fn gen_arrow<S: Semiring>(gen: Gen, objs: &[Obj], index: Option<usize>, b: &Bounds) -> Arrow<S> {
    let x = &objs[0];
    let y = objs.get(1);
    let i = index.unwrap_or(0);
    match gen {
        Gen::Id => Arrow::identity(x),
        Gen::Der => der(x),
        Gen::Dig => dig(x, b),
        Gen::Contr => contr(x),
        Gen::Weak => weak(x),
        Gen::Sigma => sigma(x),
        Gen::Theta => theta(x),
        Gen::Lift => lift(x),
        Gen::Swap => swap(x),
        Gen::Sdl => sdl_explicit(x),
        Gen::Proj => sproj(x, i),
        Gen::Inj => sinj(x, i),
        Gen::Seely2 => seely2(x, y.expect("arity")),
        Gen::Seely2Inv => seely2_inv(x, y.expect("arity")),
        Gen::Sym => sym(x, y.expect("arity")),
        Gen::Ev => ev(x, y.expect("arity")),
        Gen::Zero => Arrow::zero(x, y.expect("arity")),
        Gen::Sdist => sdist(x, y.expect("arity")),
    }
}

/// Applies a combinator. `Sum` adds without a summability check; the
/// evaluator checks it separately.
fn op_arrow<S: Semiring>(op: Op, args: &[Arrow<S>], b: &Bounds) -> Result<Arrow<S>> {
    let first = &args[0];
    match op {
        Op::Compose => {
            let path: Vec<Arrow<S>> = args.iter().rev().cloned().collect();
            Arrow::chain(&path)
        }
        Op::Tensor => Ok(Arrow::tensor(first, &args[1])),
        Op::Tuple => tuple(args),
        Op::Cotuple => cotuple(args),
        Op::Curry => curry(first, b),
        Op::Uncurry => uncurry(first),
        Op::Bang => Ok(bang(first)),
        Op::S => Ok(s_map(first)),
        Op::Taylor => taylor(first),
        Op::Sum => {
            for f in args {
                if f.dom() != first.dom() || f.cod() != first.cod() {
                    return Err(Error::ObjectMismatch {
                        expected: format!("{} → {}", first.dom(), first.cod()),
                        found: format!("{} → {}", f.dom(), f.cod()),
                    });
                }
            }
            Ok(Arrow::sum_unchecked(first.dom(), first.cod(), args))
        }
        Op::Kleisli => {
            let mut acc = args.last().expect("arity").clone();
            for g in args.iter().rev().skip(1) {
                acc = kleisli(g, &acc, b)?;
            }
            Ok(acc)
        }
    }
}

fn to_point(p: &PointExpr) -> Point {
    match p {
        PointExpr::Atom(a) => Point::atom(a),
        PointExpr::Unit => Point::Unit,
        PointExpr::Pair(a, b) => Point::pair(to_point(a), to_point(b)),
        PointExpr::In(i, a) => Point::tag(*i, to_point(a)),
        PointExpr::Deg(n) => Point::Deg(*n),
        PointExpr::Bag(xs) => Point::bag(xs.iter().map(to_point).collect::<Multiset>()),
    }
}

impl Session {
    pub fn new(model: ModelKind, bounds: Bounds) -> Session {
        Session { model, bounds, validate: true, pins: Pins::default(), objs: BTreeMap::new(), bindings: BTreeMap::new() }
    }

    pub fn obj(&self, name: &str) -> Option<&Obj> {
        self.objs.get(name)
    }

    pub fn binding(&self, name: &str) -> Option<&AnyMorphism> {
        self.bindings.get(name)
    }

    pub fn bind(&mut self, name: &str, m: AnyMorphism) {
        self.bindings.insert(name.to_string(), m);
    }

    /// Runs every form of `src` and returns the value of the last `let` or
    /// expression.
    pub fn run(&mut self, src: &str) -> Result<Option<AnyMorphism>> {
        let program = parse(src)?;
        let mut last = None;
        for form in &program.forms {
            match form {
                Form::Model { name, options, pos } => self.set_model(name, options, *pos)?,
                Form::Obj(d) => self.declare(d)?,
                Form::Let { name, expr, .. } => {
                    let v = self.eval(expr)?;
                    self.bindings.insert(name.clone(), v.clone());
                    last = Some(v);
                }
                Form::Expr(e) => last = Some(self.eval(e)?),
            }
        }
        Ok(last)
    }

    /// Whether the closed Taylor formula and the composite through the
    /// distributive law agree on the within-bound region, for the binding
    /// `name`.
    pub fn taylor_agrees(&self, name: &str) -> Result<bool> {
        let m = self.bindings.get(name).ok_or_else(|| Error::Type(format!("`{name}` is unbound")))?;
        let b = &self.bounds;
        with_semiring!(self.model.semiring(), S => {
            let s = S::unwrap(m).ok_or_else(|| Error::Type(format!("`{name}` is bound in another model")))?.as_arrow();
            Ok(taylor(&s)?.region_rows(b) == taylor_composite(&s, b)?.region_rows(b))
        })
    }

    /// Parses, checks and evaluates one expression.
    pub fn eval_str(&self, src: &str) -> Result<AnyMorphism> {
        self.eval(&super::ast::parse_expr(src)?)
    }

    fn set_model(&mut self, name: &str, options: &[(String, usize)], pos: Pos) -> Result<()> {
        let model: ModelKind = name.parse().map_err(|e: Error| type_err(pos, "model", e))?;
        if !self.pins.model {
            if model != self.model && !(self.bindings.is_empty() && self.objs.is_empty()) {
                return Err(type_err(pos, "model", "the model must be set before any object or binding"));
            }
            self.model = model;
        }
        for (k, v) in options {
            if *v == 0 {
                return Err(type_err(pos, "model", format!("{k} must be at least 1")));
            }
            match k.as_str() {
                "bang-degree" if !self.pins.bang_degree => self.bounds = Bounds::new(*v, self.bounds.s),
                "s-degree" if !self.pins.s_degree => self.bounds.s = *v,
                _ => {}
            }
        }
        Ok(())
    }

    fn declare(&mut self, d: &ObjDecl) -> Result<()> {
        let node = format!("obj {}", d.name);
        if matches!(d.name.as_str(), "one" | "1" | "top" | "D" | "S") || d.name.starts_with('!') {
            return Err(type_err(d.pos, &node, "the name is reserved"));
        }
        let known = |a: &str| d.atoms.iter().any(|x| x == a);
        let pairs = d.coh.iter().chain(&d.incoh).map(|(a, b)| (a, b));
        for (a, b) in pairs.chain(d.witnesses.iter().flatten().map(|(a, _)| (a, a))) {
            for x in [a, b] {
                if !known(x) {
                    return Err(type_err(d.pos, &node, format!("`{x}` is not an atom of {}", d.name)));
                }
            }
        }
        let m = self.model;
        if !m.is_coherence() && !(d.coh.is_empty() && d.incoh.is_empty()) {
            return Err(type_err(d.pos, &node, format!("{m} has no coherence relation")));
        }
        if m != ModelKind::Nucs && !d.incoh.is_empty() {
            return Err(type_err(d.pos, &node, "only NUCS declares strict incoherence; other pairs default to it"));
        }
        if m != ModelKind::Pcoh && !d.witnesses.is_empty() {
            return Err(type_err(d.pos, &node, "only PCOH objects carry witnesses"));
        }
        let atoms: Vec<&str> = d.atoms.iter().map(String::as_str).collect();
        let mut base = Base::atoms(&d.name, &atoms);
        if m == ModelKind::Wcs {
            base = base.reflexive();
        }
        for (a, b) in &d.coh {
            base = base.cohere(&Point::atom(a), &Point::atom(b));
        }
        for (a, b) in &d.incoh {
            base = base.incohere(&Point::atom(a), &Point::atom(b));
        }
        let mut ws = Vec::new();
        for w in &d.witnesses {
            let mut coords = Coords::new();
            for (a, c) in w {
                let q = RatPos::decode(c).map_err(|e| type_err(d.pos, &node, e))?;
                coords.insert(Point::atom(a), q);
            }
            ws.push(coords);
        }
        if !ws.is_empty() {
            base = base.with_witnesses(ws);
        }
        self.objs.insert(d.name.clone(), Obj::base(m, base));
        Ok(())
    }

    pub fn resolve(&self, o: &ObjExpr) -> Result<Obj> {
        let m = self.model;
        Ok(match o {
            ObjExpr::Name(n, pos) => {
                self.objs.get(n).cloned().ok_or_else(|| type_err(*pos, n, "unknown object"))?
            }
            ObjExpr::One => Obj::unit(m),
            ObjExpr::Top => Obj::top(m),
            ObjExpr::Degrees => Obj::degrees(m),
            ObjExpr::Bang(a) => Obj::bang(&self.resolve(a)?),
            ObjExpr::BangE(a) => Obj::bang_e(&self.resolve(a)?),
            ObjExpr::S(a) => Obj::s(&self.resolve(a)?),
            ObjExpr::Dual(a) => Obj::dual(&self.resolve(a)?),
            ObjExpr::Tensor(a, b) => Obj::tensor(&self.resolve(a)?, &self.resolve(b)?),
            ObjExpr::Lin(a, b) => Obj::lin(&self.resolve(a)?, &self.resolve(b)?),
            ObjExpr::With(xs) => Obj::with(&xs.iter().map(|x| self.resolve(x)).collect::<Result<Vec<_>>>()?),
            ObjExpr::Plus(xs) => Obj::plus(&xs.iter().map(|x| self.resolve(x)).collect::<Result<Vec<_>>>()?),
        })
    }

    /// Infers domain and codomain of every node. Combinators are applied to
    /// zero arrows over BOOL, so the inferred types are the ones evaluation
    /// produces.
    pub fn typecheck(&self, e: &MorExpr) -> Result<Typed> {
        let b = &self.bounds;
        let node = e.head();
        let pos = e.pos();
        let fail = |msg: String| type_err(pos, &node, msg);
        match e {
            MorExpr::Var(v, _) => {
                let m = self.bindings.get(v).ok_or_else(|| fail("unbound name".into()))?;
                Ok(Typed { node: Node::Var(v.clone()), dom: m.dom().clone(), cod: m.cod().clone(), args: vec![] })
            }
            MorExpr::Lit { dom, cod, entries, .. } => {
                let (dom, cod) = (self.resolve(dom)?, self.resolve(cod)?);
                let mut es = Vec::new();
                for Entry { source, target, scalar } in entries {
                    let (p, q) = (to_point(source), to_point(target));
                    for (pt, o, side) in [(&p, &dom, "source"), (&q, &cod, "target")] {
                        if !o.contains(pt, b) {
                            return Err(fail(format!(
                                "{side} {pt} is not in the web of {o} (bang-degree {}, s-degree {})",
                                b.bang, b.s
                            )));
                        }
                    }
                    let c = scalar.clone().unwrap_or_else(|| "1".into());
                    with_semiring!(self.model.semiring(), S => S::decode(&c).map(|_| ()))
                        .map_err(|err| fail(format!("bad scalar `{c}`: {err}")))?;
                    es.push((p, q, c));
                }
                Ok(Typed { node: Node::Lit(es), dom, cod, args: vec![] })
            }
            MorExpr::Gen { gen, objs, index, .. } => {
                let objs: Vec<Obj> = objs.iter().map(|o| self.resolve(o)).collect::<Result<_>>()?;
                if let Some(i) = index {
                    if *i > b.s {
                        return Err(fail(format!("index {i} exceeds the s-degree {}", b.s)));
                    }
                }
                let a = gen_arrow::<Bool>(*gen, &objs, *index, b);
                Ok(Typed { node: Node::Gen(*gen, objs, *index), dom: a.dom().clone(), cod: a.cod().clone(), args: vec![] })
            }
            MorExpr::Op { op, args, .. } => {
                let args: Vec<Typed> = args.iter().map(|a| self.typecheck(a)).collect::<Result<_>>()?;
                if matches!(op, Op::Taylor | Op::Kleisli) {
                    for a in &args {
                        if a.dom.bang_inner().is_none() {
                            return Err(fail(format!(
                                "expected a coKleisli morphism !X → Y, found {} → {}",
                                a.dom, a.cod
                            )));
                        }
                    }
                }
                let zeros: Vec<Arrow<Bool>> = args.iter().map(|a| Arrow::zero(&a.dom, &a.cod)).collect();
                let a = op_arrow(*op, &zeros, b).map_err(|err| fail(err.to_string()))?;
                Ok(Typed { node: Node::Op(*op), dom: a.dom().clone(), cod: a.cod().clone(), args })
            }
            MorExpr::Homog { arg, n, .. } => {
                let t = self.typecheck(arg)?;
                if *n > b.s {
                    return Err(fail(format!("degree {n} exceeds the s-degree {}", b.s)));
                }
                if t.dom.bang_inner().is_none() {
                    return Err(fail(format!("expected a coKleisli morphism !X → Y, found {} → {}", t.dom, t.cod)));
                }
                Ok(Typed { node: Node::Homog(*n), dom: t.dom.clone(), cod: t.cod.clone(), args: vec![t] })
            }
        }
    }

    /// Type checks and evaluates `e`, validating the result unless the
    /// session says otherwise.
    pub fn eval(&self, e: &MorExpr) -> Result<AnyMorphism> {
        let t = self.typecheck(e)?;
        with_semiring!(self.model.semiring(), S => self.eval_typed::<S>(&t))
    }

    fn eval_typed<S: Embed>(&self, t: &Typed) -> Result<AnyMorphism> {
        let m = self.arrow::<S>(t)?.materialize(&self.bounds);
        if self.validate {
            let v = validate(&m);
            if !v.valid {
                return Err(Error::Invalid(v.detail.unwrap_or_else(|| format!("{} → {}", m.dom(), m.cod()))));
            }
        }
        Ok(S::wrap(m))
    }

    fn arrow<S: Embed>(&self, t: &Typed) -> Result<Arrow<S>> {
        let b = &self.bounds;
        let args: Vec<Arrow<S>> = t.args.iter().map(|a| self.arrow(a)).collect::<Result<_>>()?;
        match &t.node {
            Node::Var(v) => {
                let m = self.bindings.get(v).and_then(S::unwrap).ok_or_else(|| {
                    Error::Type(format!("`{v}` is bound in another model"))
                })?;
                Ok(m.as_arrow())
            }
            Node::Lit(es) => {
                let es = es
                    .iter()
                    .map(|(p, q, c)| Ok((p.clone(), q.clone(), S::decode(c)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Morphism::new(&t.dom, &t.cod, *b, es)?.as_arrow())
            }
            Node::Gen(g, objs, i) => Ok(gen_arrow(*g, objs, *i, b)),
            Node::Op(Op::Sum) => {
                let parts: Vec<Morphism<S>> = args.iter().map(|a| a.materialize(b)).collect();
                Ok(partial_sum(&parts)?.as_arrow())
            }
            Node::Op(op) => op_arrow(*op, &args, b),
            Node::Homog(n) => homogeneous(&args[0], *n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD: &str = "(obj A (atoms a)) (obj B (atoms b))
        (let s (lit !A B (((bag a a) b 1/2))))";

    #[test]
    fn homog_reproduces_literal() {
        let mut s = Session::new(ModelKind::Wrel(crate::SemiringId::RatPos), Bounds::new(3, 4));
        let lit = s.run(QUAD).unwrap().unwrap();
        assert_eq!(s.eval_str("(homog s 2)").unwrap(), lit);
        assert!(s.eval_str("(homog s 1)").unwrap().is_empty());
    }

    #[test]
    fn identity_literal() {
        let mut s = Session::new(ModelKind::Rel, Bounds::new(2, 2));
        s.run("(obj A (atoms a b))").unwrap();
        let id = s.eval_str("(id A)").unwrap();
        assert_eq!(id, s.eval_str("(lit A A ((a a) (b b)))").unwrap());
    }

    #[test]
    fn coh_sum_not_summable() {
        let mut s = Session::new(ModelKind::Coh, Bounds::new(2, 2));
        let r = s.run("(obj A (atoms a)) (let f (id A)) (sum f f)");
        assert!(matches!(r, Err(Error::NotSummable(_))), "{r:?}");
    }

    #[test]
    fn type_errors() {
        let mut s = Session::new(ModelKind::Rel, Bounds::new(2, 2));
        s.run("(obj A (atoms a)) (obj B (atoms b))").unwrap();
        for (src, needle) in [
            ("(compose (id A) (id B))", "compose"),
            ("(taylor (id A))", "coKleisli"),
            ("(homog (der A) 3)", "s-degree"),
            ("(lit !A A (((bag a a a) a)))", "not in the web"),
            ("(der C)", "unknown object"),
        ] {
            match s.eval_str(src) {
                Err(Error::Type(m)) => assert!(m.contains(needle), "{src}: {m}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn taylor_types() {
        let mut s = Session::new(ModelKind::Wrel(crate::SemiringId::RatPos), Bounds::new(2, 2));
        s.run(QUAD).unwrap();
        let t = s.typecheck(&super::super::ast::parse_expr("(taylor s)").unwrap()).unwrap();
        assert_eq!(t.dom.to_string(), "(! (S A))");
        assert_eq!(t.cod.to_string(), "(S B)");
    }
}
