//! The morphism expression language: an s-expression reader, the AST with
//! its printer, and a session that type checks and evaluates forms.

mod ast;
mod session;
mod sexp;

pub use ast::{parse, parse_expr, parse_obj, parse_point, Entry, Form, Gen, MorExpr, ObjDecl, ObjExpr, Op, PointExpr, Program};
pub use session::{AnyMorphism, Embed, Node, Pins, Session, Typed};
pub use sexp::{read_all, ParseError, Pos, Sexp};
