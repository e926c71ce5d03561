//! Small expression language for metric components and connection 1-forms.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | unary)*      juxtaposition multiplies
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Coordinates are `x1 … x4` (aliases `x y z w`), constants `pi` and `e`,
//! functions `sin cos exp ln sqrt pow`. In 1-forms the basis covectors are
//! `dx1 … dx4` (aliases `dx dy dz dw`) and `i` marks the imaginary unit, e.g.
//! `i*0.3*x1 dx2 + i*0.1 dx1`. Connection forms are imaginary-valued, so the
//! `i` may be omitted; either every term carries it or none does.

use std::fmt;

use crate::jets::{Scalar, MAX_CHART_DIM};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Coord(usize),
    Imag,
    Basis(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval<S: Scalar>(&self, x: &[S], basis: Option<usize>) -> S {
        match self {
            Node::Num(v) => S::from_f64(*v),
            Node::Coord(k) => x[*k],
            Node::Imag => S::from_f64(1.0),
            Node::Basis(k) => S::from_f64(if basis == Some(*k) { 1.0 } else { 0.0 }),
            Node::Neg(a) => -a.eval(x, basis),
            Node::Add(a, b) => a.eval(x, basis) + b.eval(x, basis),
            Node::Sub(a, b) => a.eval(x, basis) - b.eval(x, basis),
            Node::Mul(a, b) => a.eval(x, basis) * b.eval(x, basis),
            Node::Div(a, b) => a.eval(x, basis) / b.eval(x, basis),
            Node::Pow(a, b) => match **b {
                Node::Num(e) if e.fract() == 0.0 && e.abs() < 1e6 => {
                    a.eval(x, basis).powi(e as i32)
                }
                _ => a.eval(x, basis).pow(b.eval(x, basis)),
            },
            Node::Call(f, a) => {
                let v = a.eval(x, basis);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Ln => v.ln(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// `(degree in dx, degree in i)` of a monomial-consistent expression.
    fn degree(&self) -> std::result::Result<(u8, u8), String> {
        let scalar = |n: &Node, what: &str| -> std::result::Result<(), String> {
            match n.degree()? {
                (0, 0) => Ok(()),
                _ => Err(format!("{what} must not contain dx or i")),
            }
        };
        match self {
            Node::Num(_) | Node::Coord(_) => Ok((0, 0)),
            Node::Imag => Ok((0, 1)),
            Node::Basis(_) => Ok((1, 0)),
            Node::Neg(a) => a.degree(),
            Node::Add(a, b) | Node::Sub(a, b) => {
                let (da, db) = (a.degree()?, b.degree()?);
                if da == db {
                    Ok(da)
                } else {
                    Err("summands mix different powers of dx or i".into())
                }
            }
            Node::Mul(a, b) => {
                let (da, db) = (a.degree()?, b.degree()?);
                let d = (da.0 + db.0, da.1 + db.1);
                if d.0 > 1 {
                    Err("product of two covectors is not a 1-form".into())
                } else if d.1 > 1 {
                    Err("connection coefficients must be purely imaginary".into())
                } else {
                    Ok(d)
                }
            }
            Node::Div(a, b) => {
                scalar(b, "denominator")?;
                a.degree()
            }
            Node::Pow(a, b) => {
                scalar(a, "power base")?;
                scalar(b, "exponent")?;
                Ok((0, 0))
            }
            Node::Call(_, a) => {
                scalar(a, "function argument")?;
                Ok((0, 0))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Parse {
                offset: start,
                message: format!("malformed number '{text}'"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                offset: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

const FUNCTIONS: [&str; 7] = ["sin", "cos", "exp", "ln", "log", "sqrt", "pow"];

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |(o, _)| *o)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn coord_index(&self, name: &str) -> Option<usize> {
        let k = match name {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            "w" => 3,
            _ => name.strip_prefix('x')?.parse::<usize>().ok()?.checked_sub(1)?,
        };
        Some(k)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Tok::Op(c) => self.err(format!("unexpected '{c}'")),
            Tok::Ident(name) => {
                if FUNCTIONS.contains(&name.as_str())
                    && self.toks.get(self.pos + 1).map(|(_, t)| t) == Some(&Tok::Op('('))
                {
                    return self.call(&name);
                }
                let here = self.offset();
                self.pos += 1;
                let node = match name.as_str() {
                    "pi" => Node::Num(std::f64::consts::PI),
                    "e" => Node::Num(std::f64::consts::E),
                    "i" => Node::Imag,
                    _ => {
                        if let Some(rest) = name.strip_prefix('d') {
                            if let Some(k) = self.coord_index(rest) {
                                self.check_coord(k, here)?;
                                return Ok(Node::Basis(k));
                            }
                        }
                        match self.coord_index(&name) {
                            Some(k) => {
                                self.check_coord(k, here)?;
                                Node::Coord(k)
                            }
                            None => {
                                return Err(Error::Parse {
                                    offset: here,
                                    message: format!("unknown identifier '{name}'"),
                                })
                            }
                        }
                    }
                };
                Ok(node)
            }
        }
    }

    fn check_coord(&self, k: usize, offset: usize) -> Result<()> {
        if k < self.dim {
            Ok(())
        } else {
            Err(Error::Parse {
                offset,
                message: format!("coordinate {} out of range for a {}-dimensional chart", k + 1, self.dim),
            })
        }
    }

    fn call(&mut self, name: &str) -> Result<Node> {
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "ln" | "log" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "pow" => None,
            _ => return self.err(format!("unknown function '{name}'")),
        };
        self.pos += 2;
        let first = self.expr()?;
        let node = match func {
            Some(f) => Node::Call(f, Box::new(first)),
            None => {
                if !self.eat(',') {
                    return self.err("pow expects two arguments");
                }
                Node::Pow(Box::new(first), Box::new(self.expr()?))
            }
        };
        if !self.eat(')') {
            return self.err("expected ')'");
        }
        Ok(node)
    }
}

fn parse_node(src: &str, dim: usize) -> Result<Node> {
    if dim == 0 || dim > MAX_CHART_DIM {
        return Err(Error::InvalidArgument(format!(
            "chart dimension must lie in 1..={MAX_CHART_DIM}, got {dim}"
        )));
    }
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        dim,
        src,
    };
    let node = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(node)
}

/// A real scalar expression over chart coordinates.
#[derive(Clone, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

impl Expr {
    pub fn parse(src: &str, dim: usize) -> Result<Expr> {
        let root = parse_node(src, dim)?;
        if root.degree().map_err(|m| Error::Parse { offset: 0, message: m })? != (0, 0) {
            return Err(Error::Parse {
                offset: 0,
                message: "scalar expressions may not contain dx or i".into(),
            });
        }
        Ok(Expr {
            root,
            source: src.trim().to_string(),
        })
    }

    pub fn constant(v: f64) -> Expr {
        Expr {
            root: Node::Num(v),
            source: format!("{v}"),
        }
    }

    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        self.root.eval(x, None)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

/// An imaginary-valued 1-form `i Σ_k a_k(x) dx^k`; only the real coefficient
/// functions `a_k` are stored.
#[derive(Clone, PartialEq)]
pub struct OneForm {
    dim: usize,
    root: Option<Node>,
    source: String,
}

impl OneForm {
    pub fn parse(src: &str, dim: usize) -> Result<OneForm> {
        if src.trim() == "0" {
            return Ok(OneForm::zero(dim));
        }
        let root = parse_node(src, dim)?;
        match root.degree().map_err(|m| Error::Parse { offset: 0, message: m })? {
            (1, _) => Ok(OneForm {
                dim,
                root: Some(root),
                source: src.trim().to_string(),
            }),
            _ => Err(Error::Parse {
                offset: 0,
                message: "every term of a 1-form needs exactly one dx factor".into(),
            }),
        }
    }

    pub fn zero(dim: usize) -> OneForm {
        OneForm {
            dim,
            root: None,
            source: "0".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.root.is_none()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Real coefficients `a_k(x)`; the form is `i Σ a_k dx^k`.
    pub fn coefficients<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|k| match &self.root {
                Some(r) => r.eval(x, Some(k)),
                None => S::from_f64(0.0),
            })
            .collect()
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({:?})", self.source)
    }
}
