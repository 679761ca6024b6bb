//! User-defined regression functions from arithmetic expressions.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | 'b' digits | func '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'
//! func  := 'exp' | 'log' | 'sin' | 'cos'
//! ```

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::model::{NlsModel, StartGuess};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    /// Zero-based parameter index (`b1` is 0).
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, beta: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Param(i) => beta[*i],
            Expr::Neg(a) => -a.eval(x, beta),
            Expr::Add(a, b) => a.eval(x, beta) + b.eval(x, beta),
            Expr::Sub(a, b) => a.eval(x, beta) - b.eval(x, beta),
            Expr::Mul(a, b) => a.eval(x, beta) * b.eval(x, beta),
            Expr::Div(a, b) => a.eval(x, beta) / b.eval(x, beta),
            Expr::Pow(a, b) => a.eval(x, beta).powf(b.eval(x, beta)),
            Expr::Call(f, a) => {
                let v = a.eval(x, beta);
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                }
            }
        }
    }

    /// One more than the largest parameter index used.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::X => 0,
            Expr::Param(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    fn collect_params(&self, seen: &mut [bool]) {
        match self {
            Expr::Num(_) | Expr::X => {}
            Expr::Param(i) => seen[*i] = true,
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_params(seen),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_params(seen);
                b.collect_params(seen);
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(alloc::format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of expression"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => self.err(alloc::format!("unexpected character '{c}'")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(Expr::Num(v))
            }
            Err(_) => self.err(alloc::format!("malformed number {:?}", &self.src[start..end])),
        }
    }

    fn word(&mut self) -> Result<Expr> {
        let start = self.pos;
        let end = self.src[start..]
            .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
            .map_or(self.src.len(), |i| start + i);
        let word = &self.src[start..end];
        if word == "x" {
            self.pos = end;
            return Ok(Expr::X);
        }
        if let Some(digits) = word.strip_prefix('b') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return match digits.parse::<usize>() {
                    Ok(k) if k >= 1 => {
                        self.pos = end;
                        Ok(Expr::Param(k - 1))
                    }
                    _ => self.err("parameters are numbered from b1"),
                };
            }
        }
        let func = match word {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "pow" => None,
            _ => return self.err(alloc::format!("unknown identifier {word:?}")),
        };
        self.pos = end;
        self.expect('(')?;
        let first = self.expr()?;
        let e = match func {
            Some(f) => Expr::Call(f, Box::new(first)),
            None => {
                self.expect(',')?;
                let second = self.expr()?;
                Expr::Pow(Box::new(first), Box::new(second))
            }
        };
        self.expect(')')?;
        Ok(e)
    }
}

/// Parses an expression over `x` and `b1..bk`.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// A regression function given by an expression, with finite-difference gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprModel {
    id: String,
    source: String,
    expr: Expr,
    arity: usize,
    start: Option<Vec<f64>>,
}

impl ExprModel {
    /// Parses `source`; every parameter `b1..bk` up to the largest one used must appear.
    pub fn new(id: &str, source: &str, start: Option<Vec<f64>>) -> Result<Self> {
        let expr = parse_expr(source)?;
        let arity = expr.arity();
        if arity == 0 {
            return Err(Error::Parse { pos: 0, msg: "expression uses no parameters".to_string() });
        }
        let mut seen = alloc::vec![false; arity];
        expr.collect_params(&mut seen);
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Parse { pos: 0, msg: alloc::format!("parameter b{} is never used", missing + 1) });
        }
        if let Some(s) = &start {
            if s.len() != arity {
                return Err(Error::LengthMismatch(s.len(), arity));
            }
        }
        Ok(Self { id: id.to_string(), source: source.to_string(), expr, arity, start })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl NlsModel for ExprModel {
    fn id(&self) -> &str {
        &self.id
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, x: f64, beta: &[f64]) -> f64 {
        self.expr.eval(x, beta)
    }

    fn start(&self, _x: &[f64], _y: &[f64]) -> StartGuess {
        match &self.start {
            Some(s) => StartGuess::exact(s.clone()),
            None => StartGuess::ones(self.arity),
        }
    }
}
