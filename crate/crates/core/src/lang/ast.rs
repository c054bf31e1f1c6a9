use std::fmt;

use super::sexp::{read_all, ParseError, Pos, Sexp};

/// A whole source file.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub forms: Vec<Form>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    /// `(model NAME :bang-degree d :s-degree D)`; options keep their order.
    Model { name: String, options: Vec<(String, usize)>, pos: Pos },
    Obj(ObjDecl),
    Let { name: String, expr: MorExpr, pos: Pos },
    Expr(MorExpr),
}

/// `(obj A (atoms a b) (coh (a b)) (incoh (a a)) (witness (a 1/2)))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjDecl {
    pub name: String,
    pub atoms: Vec<String>,
    pub coh: Vec<(String, String)>,
    pub incoh: Vec<(String, String)>,
    pub witnesses: Vec<Vec<(String, String)>>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObjExpr {
    Name(String, Pos),
    One,
    Top,
    Degrees,
    Bang(Box<ObjExpr>),
    BangE(Box<ObjExpr>),
    S(Box<ObjExpr>),
    Dual(Box<ObjExpr>),
    Tensor(Box<ObjExpr>, Box<ObjExpr>),
    Lin(Box<ObjExpr>, Box<ObjExpr>),
    With(Vec<ObjExpr>),
    Plus(Vec<ObjExpr>),
}

/// Web points in the syntax of their display form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointExpr {
    Atom(String),
    Unit,
    Pair(Box<PointExpr>, Box<PointExpr>),
    In(usize, Box<PointExpr>),
    Deg(usize),
    Bag(Vec<PointExpr>),
}

/// Generators named by their objects: `(der A)`, `(proj A 2)`, `(sym A B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    Id,
    Der,
    Dig,
    Contr,
    Weak,
    Sigma,
    Theta,
    Lift,
    Swap,
    Sdl,
    Proj,
    Inj,
    Seely2,
    Seely2Inv,
    Sym,
    Ev,
    Zero,
    Sdist,
}

impl Gen {
    pub const ALL: [Gen; 18] = [
        Gen::Id,
        Gen::Der,
        Gen::Dig,
        Gen::Contr,
        Gen::Weak,
        Gen::Sigma,
        Gen::Theta,
        Gen::Lift,
        Gen::Swap,
        Gen::Sdl,
        Gen::Proj,
        Gen::Inj,
        Gen::Seely2,
        Gen::Seely2Inv,
        Gen::Sym,
        Gen::Ev,
        Gen::Zero,
        Gen::Sdist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gen::Id => "id",
            Gen::Der => "der",
            Gen::Dig => "dig",
            Gen::Contr => "contr",
            Gen::Weak => "weak",
            Gen::Sigma => "sigma",
            Gen::Theta => "theta",
            Gen::Lift => "lift",
            Gen::Swap => "swap",
            Gen::Sdl => "sdl",
            Gen::Proj => "proj",
            Gen::Inj => "inj",
            Gen::Seely2 => "seely2",
            Gen::Seely2Inv => "seely2-inv",
            Gen::Sym => "sym",
            Gen::Ev => "ev",
            Gen::Zero => "zero",
            Gen::Sdist => "sdist",
        }
    }

    /// Number of object arguments.
    pub fn objects(self) -> usize {
        match self {
            Gen::Seely2 | Gen::Seely2Inv | Gen::Sym | Gen::Ev | Gen::Zero | Gen::Sdist => 2,
            _ => 1,
        }
    }

    /// Whether a degree index follows the objects.
    pub fn indexed(self) -> bool {
        matches!(self, Gen::Proj | Gen::Inj)
    }
}

/// Combinators over morphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Compose,
    Tensor,
    Tuple,
    Cotuple,
    Curry,
    Uncurry,
    Bang,
    S,
    Taylor,
    Sum,
    Kleisli,
}

impl Op {
    pub const ALL: [Op; 11] = [
        Op::Compose,
        Op::Tensor,
        Op::Tuple,
        Op::Cotuple,
        Op::Curry,
        Op::Uncurry,
        Op::Bang,
        Op::S,
        Op::Taylor,
        Op::Sum,
        Op::Kleisli,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::Compose => "compose",
            Op::Tensor => "tensor",
            Op::Tuple => "tuple",
            Op::Cotuple => "cotuple",
            Op::Curry => "curry",
            Op::Uncurry => "uncurry",
            Op::Bang => "bang",
            Op::S => "S",
            Op::Taylor => "taylor",
            Op::Sum => "sum",
            Op::Kleisli => "kleisli",
        }
    }

    /// Allowed argument counts, `None` meaning unbounded.
    fn arity(self) -> (usize, Option<usize>) {
        match self {
            Op::Compose | Op::Tuple | Op::Cotuple | Op::Sum => (1, None),
            Op::Kleisli => (2, None),
            Op::Tensor => (2, Some(2)),
            _ => (1, Some(1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MorExpr {
    Var(String, Pos),
    Lit { dom: ObjExpr, cod: ObjExpr, entries: Vec<Entry>, pos: Pos },
    Gen { gen: Gen, objs: Vec<ObjExpr>, index: Option<usize>, pos: Pos },
    Op { op: Op, args: Vec<MorExpr>, pos: Pos },
    Homog { arg: Box<MorExpr>, n: usize, pos: Pos },
}

/// A literal entry; a missing scalar means 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub source: PointExpr,
    pub target: PointExpr,
    pub scalar: Option<String>,
}

impl MorExpr {
    pub fn pos(&self) -> Pos {
        match self {
            MorExpr::Var(_, pos)
            | MorExpr::Lit { pos, .. }
            | MorExpr::Gen { pos, .. }
            | MorExpr::Op { pos, .. }
            | MorExpr::Homog { pos, .. } => *pos,
        }
    }

    /// The head of the node, for error messages.
    pub fn head(&self) -> String {
        match self {
            MorExpr::Var(v, _) => v.clone(),
            MorExpr::Lit { .. } => "lit".into(),
            MorExpr::Gen { gen, .. } => gen.name().into(),
            MorExpr::Op { op, .. } => op.name().into(),
            MorExpr::Homog { .. } => "homog".into(),
        }
    }
}

// ------------------------------------------------------------ parsing

type PResult<T> = Result<T, ParseError>;

pub fn parse(src: &str) -> PResult<Program> {
    let forms = read_all(src)?.iter().map(parse_form).collect::<PResult<_>>()?;
    Ok(Program { forms })
}

/// Parses a single morphism expression.
pub fn parse_expr(src: &str) -> PResult<MorExpr> {
    let xs = read_all(src)?;
    match xs.as_slice() {
        [x] => parse_mor(x),
        [] => Err(ParseError::new(Pos { line: 1, col: 1 }, "empty expression")),
        [_, y, ..] => Err(ParseError::new(y.pos(), "expected a single expression")),
    }
}

fn err<T>(x: &Sexp, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError::new(x.pos(), msg))
}

fn symbol(x: &Sexp, what: &str) -> PResult<String> {
    match x.atom() {
        Some(s) if !s.starts_with(':') => Ok(s.to_string()),
        _ => err(x, format!("expected {what}, found `{x}`")),
    }
}

fn natural(x: &Sexp, what: &str) -> PResult<usize> {
    match x.atom().and_then(|s| s.parse().ok()) {
        Some(n) => Ok(n),
        None => err(x, format!("expected {what} (a natural number), found `{x}`")),
    }
}

fn parse_form(x: &Sexp) -> PResult<Form> {
    match x.call() {
        Some(("model", args)) => {
            let name = symbol(args.first().ok_or_else(|| ParseError::new(x.pos(), "model needs a name"))?, "a model name")?;
            let mut options = Vec::new();
            let mut rest = &args[1..];
            while let [k, v, tail @ ..] = rest {
                let key = match k.atom() {
                    Some(s) if s == ":bang-degree" || s == ":s-degree" => s[1..].to_string(),
                    _ => return err(k, format!("unknown model option `{k}`")),
                };
                options.push((key, natural(v, "a degree")?));
                rest = tail;
            }
            if let [k] = rest {
                return err(k, format!("option `{k}` has no value"));
            }
            Ok(Form::Model { name, options, pos: x.pos() })
        }
        Some(("obj", args)) => parse_obj_decl(x, args).map(Form::Obj),
        Some(("let", args)) => match args {
            [n, e] => Ok(Form::Let { name: symbol(n, "a name")?, expr: parse_mor(e)?, pos: x.pos() }),
            _ => err(x, "let takes a name and an expression"),
        },
        _ => parse_mor(x).map(Form::Expr),
    }
}

fn parse_pair(x: &Sexp) -> PResult<(String, String)> {
    match x.list() {
        Some([a, b]) => Ok((symbol(a, "an atom")?, symbol(b, "an atom")?)),
        _ => err(x, format!("expected a pair `(a b)`, found `{x}`")),
    }
}

fn parse_obj_decl(x: &Sexp, args: &[Sexp]) -> PResult<ObjDecl> {
    let (name, clauses) = args.split_first().ok_or_else(|| ParseError::new(x.pos(), "obj needs a name"))?;
    let mut d = ObjDecl {
        name: symbol(name, "an object name")?,
        atoms: Vec::new(),
        coh: Vec::new(),
        incoh: Vec::new(),
        witnesses: Vec::new(),
        pos: x.pos(),
    };
    for c in clauses {
        match c.call() {
            Some(("atoms", xs)) => {
                for a in xs {
                    d.atoms.push(symbol(a, "an atom")?);
                }
            }
            Some(("coh", xs)) => d.coh.extend(xs.iter().map(parse_pair).collect::<PResult<Vec<_>>>()?),
            Some(("incoh", xs)) => d.incoh.extend(xs.iter().map(parse_pair).collect::<PResult<Vec<_>>>()?),
            Some(("witness", xs)) => d.witnesses.push(xs.iter().map(parse_pair).collect::<PResult<_>>()?),
            _ => return err(c, format!("expected atoms, coh, incoh or witness, found `{c}`")),
        }
    }
    if d.atoms.is_empty() {
        return err(x, format!("object `{}` declares no atoms", d.name));
    }
    Ok(d)
}

pub fn parse_obj(x: &Sexp) -> PResult<ObjExpr> {
    if let Some(s) = x.atom() {
        return Ok(match s {
            "one" | "1" => ObjExpr::One,
            "top" => ObjExpr::Top,
            "D" => ObjExpr::Degrees,
            _ if s.len() > 1 && s.starts_with('!') => {
                let inner = Sexp::Atom(s[1..].to_string(), Pos { col: x.pos().col + 1, ..x.pos() });
                ObjExpr::Bang(Box::new(parse_obj(&inner)?))
            }
            _ => ObjExpr::Name(symbol(x, "an object")?, x.pos()),
        });
    }
    let (head, args) = x.call().ok_or_else(|| ParseError::new(x.pos(), format!("expected an object, found `{x}`")))?;
    let one = |f: fn(Box<ObjExpr>) -> ObjExpr| match args {
        [a] => Ok(f(Box::new(parse_obj(a)?))),
        _ => err(x, format!("`{head}` takes one object")),
    };
    let two = |f: fn(Box<ObjExpr>, Box<ObjExpr>) -> ObjExpr| match args {
        [a, b] => Ok(f(Box::new(parse_obj(a)?), Box::new(parse_obj(b)?))),
        _ => err(x, format!("`{head}` takes two objects")),
    };
    let many = || args.iter().map(parse_obj).collect::<PResult<Vec<_>>>();
    match head {
        "!" => one(ObjExpr::Bang),
        "!e" => one(ObjExpr::BangE),
        "S" => one(ObjExpr::S),
        "dual" => one(ObjExpr::Dual),
        "tensor" => two(ObjExpr::Tensor),
        "lin" => two(ObjExpr::Lin),
        "with" => many().map(ObjExpr::With),
        "plus" => many().map(ObjExpr::Plus),
        _ => err(x, format!("unknown object constructor `{head}`")),
    }
}

pub fn parse_point(x: &Sexp) -> PResult<PointExpr> {
    if let Some(s) = x.atom() {
        return Ok(if s == "*" { PointExpr::Unit } else { PointExpr::Atom(symbol(x, "a point")?) });
    }
    let (head, args) = x.call().ok_or_else(|| ParseError::new(x.pos(), format!("expected a point, found `{x}`")))?;
    match (head, args) {
        ("pair", [a, b]) => Ok(PointExpr::Pair(Box::new(parse_point(a)?), Box::new(parse_point(b)?))),
        ("in", [i, a]) => Ok(PointExpr::In(natural(i, "an index")?, Box::new(parse_point(a)?))),
        ("deg", [n]) => Ok(PointExpr::Deg(natural(n, "a degree")?)),
        ("bag", xs) => Ok(PointExpr::Bag(xs.iter().map(parse_point).collect::<PResult<_>>()?)),
        _ => err(x, format!("malformed point `{x}`")),
    }
}

fn parse_mor(x: &Sexp) -> PResult<MorExpr> {
    let pos = x.pos();
    if x.atom().is_some() {
        return Ok(MorExpr::Var(symbol(x, "a morphism")?, pos));
    }
    let (head, args) = x.call().ok_or_else(|| ParseError::new(pos, format!("expected a morphism, found `{x}`")))?;
    if head == "lit" {
        let [dom, cod, es] = args else { return err(x, "lit takes a domain, a codomain and an entry list") };
        let es = es.list().ok_or_else(|| ParseError::new(es.pos(), "expected a list of entries"))?;
        let entries = es
            .iter()
            .map(|e| match e.list() {
                Some([p, q]) => Ok(Entry { source: parse_point(p)?, target: parse_point(q)?, scalar: None }),
                Some([p, q, c]) => Ok(Entry {
                    source: parse_point(p)?,
                    target: parse_point(q)?,
                    scalar: Some(symbol(c, "a scalar")?),
                }),
                _ => err(e, format!("expected an entry `(source target [scalar])`, found `{e}`")),
            })
            .collect::<PResult<_>>()?;
        return Ok(MorExpr::Lit { dom: parse_obj(dom)?, cod: parse_obj(cod)?, entries, pos });
    }
    if head == "homog" {
        let [f, n] = args else { return err(x, "homog takes a morphism and a degree") };
        return Ok(MorExpr::Homog { arg: Box::new(parse_mor(f)?), n: natural(n, "a degree")?, pos });
    }
    if let Some(gen) = Gen::ALL.into_iter().find(|g| g.name() == head) {
        let k = gen.objects();
        let want = k + usize::from(gen.indexed());
        if args.len() != want {
            let idx = if gen.indexed() { " and an index" } else { "" };
            return err(x, format!("`{head}` takes {k} object(s){idx}"));
        }
        let objs = args[..k].iter().map(parse_obj).collect::<PResult<_>>()?;
        let index = if gen.indexed() { Some(natural(&args[k], "an index")?) } else { None };
        return Ok(MorExpr::Gen { gen, objs, index, pos });
    }
    if let Some(op) = Op::ALL.into_iter().find(|o| o.name() == head) {
        let (lo, hi) = op.arity();
        if args.len() < lo || hi.is_some_and(|h| args.len() > h) {
            let count = match hi {
                Some(h) if h == lo => format!("{lo}"),
                _ => format!("at least {lo}"),
            };
            return err(x, format!("`{head}` takes {count} argument(s), found {}", args.len()));
        }
        let args = args.iter().map(parse_mor).collect::<PResult<_>>()?;
        return Ok(MorExpr::Op { op, args, pos });
    }
    err(x, format!("unknown form `{head}`"))
}

// ------------------------------------------------------------ printing

fn atom(s: impl Into<String>) -> Sexp {
    Sexp::Atom(s.into(), Pos::default())
}

fn list(xs: Vec<Sexp>) -> Sexp {
    Sexp::List(xs, Pos::default())
}

fn call(head: &str, mut args: Vec<Sexp>) -> Sexp {
    args.insert(0, atom(head));
    list(args)
}

impl ObjExpr {
    pub fn to_sexp(&self) -> Sexp {
        match self {
            ObjExpr::Name(n, _) => atom(n),
            ObjExpr::One => atom("one"),
            ObjExpr::Top => atom("top"),
            ObjExpr::Degrees => atom("D"),
            ObjExpr::Bang(a) => match a.to_sexp() {
                Sexp::Atom(s, _) if s != "one" && s != "top" && s != "D" => atom(format!("!{s}")),
                inner => call("!", vec![inner]),
            },
            ObjExpr::BangE(a) => call("!e", vec![a.to_sexp()]),
            ObjExpr::S(a) => call("S", vec![a.to_sexp()]),
            ObjExpr::Dual(a) => call("dual", vec![a.to_sexp()]),
            ObjExpr::Tensor(a, b) => call("tensor", vec![a.to_sexp(), b.to_sexp()]),
            ObjExpr::Lin(a, b) => call("lin", vec![a.to_sexp(), b.to_sexp()]),
            ObjExpr::With(xs) => call("with", xs.iter().map(ObjExpr::to_sexp).collect()),
            ObjExpr::Plus(xs) => call("plus", xs.iter().map(ObjExpr::to_sexp).collect()),
        }
    }
}

impl PointExpr {
    pub fn to_sexp(&self) -> Sexp {
        match self {
            PointExpr::Atom(a) => atom(a),
            PointExpr::Unit => atom("*"),
            PointExpr::Pair(a, b) => call("pair", vec![a.to_sexp(), b.to_sexp()]),
            PointExpr::In(i, a) => call("in", vec![atom(i.to_string()), a.to_sexp()]),
            PointExpr::Deg(n) => call("deg", vec![atom(n.to_string())]),
            PointExpr::Bag(xs) => call("bag", xs.iter().map(PointExpr::to_sexp).collect()),
        }
    }
}

impl MorExpr {
    pub fn to_sexp(&self) -> Sexp {
        match self {
            MorExpr::Var(v, _) => atom(v),
            MorExpr::Lit { dom, cod, entries, .. } => {
                let es = entries
                    .iter()
                    .map(|e| {
                        let mut xs = vec![e.source.to_sexp(), e.target.to_sexp()];
                        xs.extend(e.scalar.as_ref().map(atom));
                        list(xs)
                    })
                    .collect();
                call("lit", vec![dom.to_sexp(), cod.to_sexp(), list(es)])
            }
            MorExpr::Gen { gen, objs, index, .. } => {
                let mut xs: Vec<Sexp> = objs.iter().map(ObjExpr::to_sexp).collect();
                xs.extend(index.map(|i| atom(i.to_string())));
                call(gen.name(), xs)
            }
            MorExpr::Op { op, args, .. } => call(op.name(), args.iter().map(MorExpr::to_sexp).collect()),
            MorExpr::Homog { arg, n, .. } => call("homog", vec![arg.to_sexp(), atom(n.to_string())]),
        }
    }
}

impl Form {
    pub fn to_sexp(&self) -> Sexp {
        match self {
            Form::Model { name, options, .. } => {
                let mut xs = vec![atom(name)];
                for (k, v) in options {
                    xs.push(atom(format!(":{k}")));
                    xs.push(atom(v.to_string()));
                }
                call("model", xs)
            }
            Form::Obj(d) => {
                let pairs = |ps: &[(String, String)]| ps.iter().map(|(a, b)| list(vec![atom(a), atom(b)])).collect();
                let mut xs = vec![atom(&d.name), call("atoms", d.atoms.iter().map(atom).collect())];
                if !d.coh.is_empty() {
                    xs.push(call("coh", pairs(&d.coh)));
                }
                if !d.incoh.is_empty() {
                    xs.push(call("incoh", pairs(&d.incoh)));
                }
                for w in &d.witnesses {
                    xs.push(call("witness", pairs(w)));
                }
                call("obj", xs)
            }
            Form::Let { name, expr, .. } => call("let", vec![atom(name), expr.to_sexp()]),
            Form::Expr(e) => e.to_sexp(),
        }
    }
}

impl fmt::Display for ObjExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

impl fmt::Display for MorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for form in &self.forms {
            writeln!(f, "{}", form.to_sexp())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squash(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn round_trip() {
        let src = "(model wrel-rat :bang-degree 3 :s-degree 4)
            (obj A (atoms a b) (coh (a b)))
            (let f (lit !A A (((bag a a) b 1/2) ((bag) a))))
            (compose (der A) (dig A))
            (homog f 2)
            (kleisli f (S (proj A 1)) (bang (sum f f)))
            (lit (! (tensor A one)) (with A (S D)) (((bag (pair a *)) (in 1 (pair (deg 2) b)))))";
        let p = parse(src).unwrap();
        assert_eq!(squash(&p.to_string()), squash(src));
        assert_eq!(parse(&p.to_string()).unwrap().to_string(), p.to_string());
    }

    #[test]
    fn shapes() {
        let e = parse_expr("(homog f 2)").unwrap();
        assert!(matches!(e, MorExpr::Homog { n: 2, ref arg, .. } if **arg == MorExpr::Var("f".into(), Pos { line: 1, col: 8 })));
        assert!(matches!(parse_expr("(compose (der A) (dig A))").unwrap(), MorExpr::Op { op: Op::Compose, .. }));
        let e = parse_expr("(taylor").unwrap_err();
        assert!(e.msg.contains("unbalanced"), "{e}");
        let e = parse_expr("(tensor f)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        let e = parse_expr("(der\n  (frob A))").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 3 });
    }
}
