//! S-expression reader with source positions.

use std::fmt;
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sexp {
    pub kind: Kind,
    pub pos: Pos,
    /// File the expression was read from, for diagnostics.
    pub file: Rc<str>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{file}:{pos}: {msg}")]
pub struct ReadError {
    pub file: Rc<str>,
    pub pos: Pos,
    pub msg: String,
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match &self.kind {
            Kind::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            Kind::List(xs) => Some(xs),
            _ => None,
        }
    }

    /// The head atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }

    pub fn location(&self) -> String {
        format!("{}:{}", self.file, self.pos)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Atom(a) => f.write_str(a),
            Kind::Str(s) => write!(f, "{s:?}"),
            Kind::List(xs) => {
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

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
    file: Rc<str>,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> ReadError {
        ReadError { file: self.file.clone(), pos, msg: msg.into() }
    }

    fn skip(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ReadError> {
        self.skip();
        let pos = self.pos;
        let file = self.file.clone();
        let mk = move |kind| Sexp { kind, pos, file: file.clone() };
        match self.chars.peek().copied() {
            None => Ok(None),
            Some(')') => Err(self.err(pos, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut xs = Vec::new();
                loop {
                    self.skip();
                    match self.chars.peek() {
                        None => return Err(self.err(pos, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(mk(Kind::List(xs))));
                        }
                        _ => xs.push(self.read()?.expect("input is not exhausted")),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(pos, "unterminated string")),
                        Some('"') => return Ok(Some(mk(Kind::Str(s)))),
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(c) => s.push(c),
                            None => return Err(self.err(pos, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(mk(Kind::Atom(s))))
            }
        }
    }
}

/// Reads every top-level expression of `src`.
pub fn read_all(file: &str, src: &str) -> Result<Vec<Sexp>, ReadError> {
    let mut r = Reader { chars: src.chars().peekable(), pos: Pos { line: 1, col: 1 }, file: file.into() };
    let mut out = Vec::new();
    while let Some(x) = r.read()? {
        out.push(x);
    }
    Ok(out)
}

/// Replaces atoms by expressions, leaving strings alone.
pub fn substitute(x: &Sexp, map: &[(&str, &Sexp)]) -> Sexp {
    match &x.kind {
        Kind::Atom(a) => match map.iter().find(|(k, _)| *k == a) {
            Some((_, v)) => (*v).clone(),
            None => x.clone(),
        },
        Kind::Str(_) => x.clone(),
        Kind::List(xs) => Sexp {
            kind: Kind::List(xs.iter().map(|y| substitute(y, map)).collect()),
            pos: x.pos,
            file: x.file.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let xs = read_all("t", "; header\n(a (b c)\n  d) e").unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs[0].pos, Pos { line: 2, col: 1 });
        let inner = &xs[0].list().unwrap()[2];
        assert_eq!(inner.atom(), Some("d"));
        assert_eq!(inner.pos, Pos { line: 3, col: 3 });
        assert_eq!(xs[1].to_string(), "e");
        assert_eq!(xs[0].to_string(), "(a (b c) d)");
    }

    #[test]
    fn errors_carry_positions() {
        let e = read_all("f.ifp", "(a\n (b)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
        assert!(e.to_string().starts_with("f.ifp:1:1"));
        let e = read_all("f.ifp", "a )").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 3 });
    }

    #[test]
    fn strings() {
        let xs = read_all("t", r#"(include "x \"y\".ifp")"#).unwrap();
        assert_eq!(xs[0].list().unwrap()[1].kind, Kind::Str("x \"y\".ifp".into()));
    }
}
