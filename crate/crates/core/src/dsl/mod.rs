//! A small text format for manifolds, systems, points and elements.
//!
//! ```text
//! manifold R4 {
//!     coordinates x1 x2 y1 y2;
//! }
//! system lagrangian on R4 {
//!     p = 2;
//!     independence = dx1 dx2;
//!     generator dx1^dy1 + dx2^dy2;
//! }
//! point { x1 = 0; x2 = 0; y1 = 0; y2 = 0; }
//! ```
//!
//! Operators, loosest first: `+ -`, `* /`, `^` (wedge), unary `-`, `**`
//! (integer power of a scalar). `d(...)` is the exterior derivative.

mod build;
mod print;

use num_bigint::BigInt;

use crate::error::{Error, Result};

pub use build::{Document, ElementSpec};
pub use print::print;

/// Parses and builds a document.
pub fn parse(text: &str) -> Result<Document> {
    let items = Parser::new(text)?.file()?;
    build::build(&items)
}

/// Parses a form expression in the names of `m`; `d(...)` is allowed.
pub fn parse_form(m: &crate::coframe::Manifold, text: &str) -> Result<crate::forms::DForm> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.pos().error(format!("unexpected {}", Parser::describe(p.peek()))));
    }
    build::eval_in(m, &e)
}

/// Parses a scalar expression in the names of `m`.
pub fn parse_scalar(m: &crate::coframe::Manifold, text: &str) -> Result<crate::scalar::Scalar> {
    let f = parse_form(m, text)?;
    f.as_scalar()
        .ok_or_else(|| Pos { line: 1, col: 1 }.error(format!("expected a scalar, found a {}-form", f.degree())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub(crate) fn error(self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(&'static str),
    Eof,
}

const PUNCT: [&str; 15] = [
    "**", "{", "}", "(", ")", "[", "]", ";", ",", "=", "+", "-", "*", "/", "^",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) else {
            return Err(pos.error(format!("unexpected character `{c}`")));
        };
        i += p.len();
        col += p.len();
        out.push((Tok::Punct(p), pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Expr {
    Num(BigInt),
    Name(String),
    Neg(Box<Spanned<Expr>>),
    Bin(char, Pos, Box<Spanned<Expr>>, Box<Spanned<Expr>>),
    Pow(Box<Spanned<Expr>>, i32),
    D(Box<Spanned<Expr>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Spanned<T> {
    pub pos: Pos,
    pub node: T,
}

#[derive(Clone, Debug)]
pub(crate) enum MStmt {
    Coframe(Vec<String>),
    Coordinates(Vec<String>),
    Scalar(Vec<String>),
    Free(Vec<String>),
    Const(Vec<String>),
    D(String, Spanned<Expr>),
}

#[derive(Clone, Debug)]
pub(crate) enum SStmt {
    P(usize),
    Independence(Vec<String>),
    Generator(Spanned<Expr>),
}

#[derive(Clone, Debug)]
pub(crate) enum Item {
    Manifold {
        name: String,
        body: Vec<Spanned<MStmt>>,
    },
    System {
        name: String,
        on: Spanned<String>,
        body: Vec<Spanned<SStmt>>,
    },
    Point(Vec<(Spanned<String>, Spanned<Expr>)>),
    Element {
        basis: bool,
        rows: Vec<Vec<Spanned<Expr>>>,
    },
    Seed(u64),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if *self.peek() == Tok::Punct(PUNCT.iter().find(|q| **q == p).expect("known punct")) {
            self.bump();
            Ok(())
        } else {
            Err(self
                .pos()
                .error(format!("expected `{p}`, found {}", Self::describe(self.peek()))))
        }
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self
                .pos()
                .error(format!("expected a name, found {}", Self::describe(&t)))),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == k => {
                self.bump();
                Ok(())
            }
            t => Err(self.pos().error(format!("expected `{k}`, found {}", Self::describe(t)))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            t => Err(self
                .pos()
                .error(format!("expected an integer, found {}", Self::describe(&t)))),
        }
    }

    fn small(&mut self) -> Result<u64> {
        let pos = self.pos();
        let n = self.int()?;
        u64::try_from(n).map_err(|_| pos.error("integer out of range"))
    }

    fn names(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            out.push(self.ident()?);
        }
        if out.is_empty() {
            return Err(self.pos().error("expected at least one name"));
        }
        self.expect(";")?;
        Ok(out)
    }

    fn file(&mut self) -> Result<Vec<Spanned<Item>>> {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            let kw = self.ident()?;
            let node = match kw.as_str() {
                "manifold" => self.manifold()?,
                "system" => self.system()?,
                "point" => self.point()?,
                "element" => self.element()?,
                "seed" => {
                    self.expect("=")?;
                    let s = self.small()?;
                    self.expect(";")?;
                    Item::Seed(s)
                }
                _ => return Err(pos.error(format!("unknown block `{kw}`"))),
            };
            items.push(Spanned { pos, node });
        }
        Ok(items)
    }

    fn manifold(&mut self) -> Result<Item> {
        let name = self.ident()?;
        self.expect("{")?;
        let mut body = Vec::new();
        while !self.eat("}") {
            let pos = self.pos();
            let kw = self.ident()?;
            let node = match kw.as_str() {
                "coframe" => MStmt::Coframe(self.names()?),
                "coordinates" => MStmt::Coordinates(self.names()?),
                "scalar" => MStmt::Scalar(self.names()?),
                "free" => MStmt::Free(self.names()?),
                "const" => MStmt::Const(self.names()?),
                "d" => {
                    let target = self.ident()?;
                    self.expect("=")?;
                    let e = self.expr()?;
                    self.expect(";")?;
                    MStmt::D(target, e)
                }
                _ => return Err(pos.error(format!("unknown manifold statement `{kw}`"))),
            };
            body.push(Spanned { pos, node });
        }
        Ok(Item::Manifold { name, body })
    }

    fn system(&mut self) -> Result<Item> {
        let name = self.ident()?;
        self.keyword("on")?;
        let on_pos = self.pos();
        let on = Spanned {
            pos: on_pos,
            node: self.ident()?,
        };
        self.expect("{")?;
        let mut body = Vec::new();
        while !self.eat("}") {
            let pos = self.pos();
            let kw = self.ident()?;
            let node = match kw.as_str() {
                "p" => {
                    self.expect("=")?;
                    let p = self.small()? as usize;
                    self.expect(";")?;
                    SStmt::P(p)
                }
                "independence" => {
                    self.expect("=")?;
                    if self.eat(";") {
                        SStmt::Independence(Vec::new())
                    } else {
                        SStmt::Independence(self.names()?)
                    }
                }
                "generator" => {
                    let e = self.expr()?;
                    self.expect(";")?;
                    SStmt::Generator(e)
                }
                _ => return Err(pos.error(format!("unknown system statement `{kw}`"))),
            };
            body.push(Spanned { pos, node });
        }
        Ok(Item::System { name, on, body })
    }

    fn point(&mut self) -> Result<Item> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            let pos = self.pos();
            let name = Spanned {
                pos,
                node: self.ident()?,
            };
            self.expect("=")?;
            let e = self.expr()?;
            self.expect(";")?;
            out.push((name, e));
        }
        Ok(Item::Point(out))
    }

    fn element(&mut self) -> Result<Item> {
        self.expect("{")?;
        let pos = self.pos();
        let basis = match self.ident()?.as_str() {
            "a" => false,
            "basis" => true,
            other => return Err(pos.error(format!("expected `a` or `basis`, found `{other}`"))),
        };
        self.expect("=")?;
        self.expect("[")?;
        let mut rows = Vec::new();
        if !self.eat("]") {
            loop {
                self.expect("[")?;
                let mut row = Vec::new();
                if !self.eat("]") {
                    loop {
                        row.push(self.expr()?);
                        if self.eat("]") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                rows.push(row);
                if self.eat("]") {
                    break;
                }
                self.expect(",")?;
            }
        }
        self.expect(";")?;
        self.expect("}")?;
        Ok(Item::Element { basis, rows })
    }

    fn expr(&mut self) -> Result<Spanned<Expr>> {
        let mut lhs = self.term()?;
        loop {
            let at = self.pos();
            let op = if self.eat("+") {
                '+'
            } else if self.eat("-") {
                '-'
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = bin(op, at, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Spanned<Expr>> {
        let mut lhs = self.wedge()?;
        loop {
            let at = self.pos();
            let op = if self.eat("*") {
                '*'
            } else if self.eat("/") {
                '/'
            } else {
                return Ok(lhs);
            };
            let rhs = self.wedge()?;
            lhs = bin(op, at, lhs, rhs);
        }
    }

    fn wedge(&mut self) -> Result<Spanned<Expr>> {
        let mut lhs = self.unary()?;
        loop {
            let at = self.pos();
            if !self.eat("^") {
                break;
            }
            let rhs = self.unary()?;
            lhs = bin('^', at, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Spanned<Expr>> {
        let pos = self.pos();
        if self.eat("-") {
            let e = self.unary()?;
            return Ok(Spanned {
                pos,
                node: Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Spanned<Expr>> {
        let base = self.atom()?;
        if !self.eat("**") {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat("-");
        let n = self.int()?;
        let e = i32::try_from(n).map_err(|_| pos.error("exponent out of range"))?;
        Ok(Spanned {
            pos: base.pos,
            node: Expr::Pow(Box::new(base), if neg { -e } else { e }),
        })
    }

    fn atom(&mut self) -> Result<Spanned<Expr>> {
        let pos = self.pos();
        let node = match self.bump() {
            Tok::Int(n) => Expr::Num(n),
            Tok::Ident(s) if s == "d" && *self.peek() == Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Expr::D(Box::new(e))
            }
            Tok::Ident(s) => Expr::Name(s),
            Tok::Punct("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                e.node
            }
            t => return Err(pos.error(format!("expected an expression, found {}", Self::describe(&t)))),
        };
        Ok(Spanned { pos, node })
    }
}

fn bin(op: char, at: Pos, lhs: Spanned<Expr>, rhs: Spanned<Expr>) -> Spanned<Expr> {
    Spanned {
        pos: lhs.pos,
        node: Expr::Bin(op, at, Box::new(lhs), Box::new(rhs)),
    }
}
