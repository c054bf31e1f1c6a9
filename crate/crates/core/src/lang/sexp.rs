use std::fmt;

use thiserror::Error;

/// 1-based line and column of a token.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Clone, Debug)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Sexp) -> bool {
        match (self, other) {
            (Sexp::Atom(a, _), Sexp::Atom(b, _)) => a == b,
            (Sexp::List(a, _), Sexp::List(b, _)) => a == b,
            _ => false,
        }
    }
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs, _) => Some(xs),
            Sexp::Atom(..) => None,
        }
    }

    /// The head symbol and the arguments of a list `(head args…)`.
    pub fn call(&self) -> Option<(&str, &[Sexp])> {
        let xs = self.list()?;
        let (h, rest) = xs.split_first()?;
        Some((h.atom()?, rest))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s, _) => f.write_str(s),
            Sexp::List(xs, _) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Reads every top-level expression. `;` starts a comment running to the
/// end of the line.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut pos = Pos { line: 1, col: 1 };
    let mut chars = src.chars().peekable();
    let mut atom: Option<(String, Pos)> = None;

    fn flush(atom: &mut Option<(String, Pos)>, stack: &mut [(Vec<Sexp>, Pos)], top: &mut Vec<Sexp>) {
        if let Some((s, p)) = atom.take() {
            let x = Sexp::Atom(s, p);
            match stack.last_mut() {
                Some((xs, _)) => xs.push(x),
                None => top.push(x),
            }
        }
    }

    while let Some(c) = chars.next() {
        let here = pos;
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
        match c {
            '(' => {
                flush(&mut atom, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut atom, &mut stack, &mut top);
                let (xs, start) = stack.pop().ok_or_else(|| ParseError::new(here, "unbalanced `)`"))?;
                let x = Sexp::List(xs, start);
                match stack.last_mut() {
                    Some((ys, _)) => ys.push(x),
                    None => top.push(x),
                }
            }
            ';' => {
                flush(&mut atom, &mut stack, &mut top);
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    pos.col += 1;
                }
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack, &mut top),
            c => match &mut atom {
                Some((s, _)) => s.push(c),
                None => atom = Some((c.to_string(), here)),
            },
        }
    }
    flush(&mut atom, &mut stack, &mut top);
    match stack.last() {
        Some((_, start)) => Err(ParseError::new(*start, "unbalanced `(`: list is never closed")),
        None => Ok(top),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions() {
        let xs = read_all("; header\n(a (b 1/2)\n   c)").unwrap();
        assert_eq!(xs.len(), 1);
        assert_eq!(xs[0].pos(), Pos { line: 2, col: 1 });
        let inner = &xs[0].list().unwrap()[1];
        assert_eq!(inner.pos(), Pos { line: 2, col: 4 });
        assert_eq!(xs[0].list().unwrap()[2].pos(), Pos { line: 3, col: 4 });
        assert_eq!(xs[0].to_string(), "(a (b 1/2) c)");
    }

    #[test]
    fn unbalanced() {
        let e = read_all("(taylor").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        assert!(e.msg.contains("unbalanced"));
        assert_eq!(read_all("a)").unwrap_err().pos, Pos { line: 1, col: 2 });
    }
}
