//! Arithmetic expressions for user-supplied curves, costs and densities:
//! `+ - * / ^`, `exp`, `sqrt`, numbers and the variables `y z1 z2 x1 x2`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Y,
    Z1,
    Z2,
    X1,
    X2,
}

impl Var {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "y" => Var::Y,
            "z1" => Var::Z1,
            "z2" => Var::Z2,
            "x1" => Var::X1,
            "x2" => Var::X2,
            _ => return None,
        })
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::Y => "y",
            Var::Z1 => "z1",
            Var::Z2 => "z2",
            Var::X1 => "x1",
            Var::X2 => "x2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

/// Variable values indexed like [`Var`].
pub type Env = [f64; 5];

pub fn env(pairs: &[(Var, f64)]) -> Env {
    let mut e = [0.0; 5];
    for (v, x) in pairs {
        e[v.index()] = *x;
    }
    e
}

impl Expr {
    /// Parses `src`, accepting only the listed variables.
    pub fn parse(src: &str, allowed: &[Var]) -> Result<Self> {
        let mut p = Parser { src, pos: 0, allowed };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Env) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var(v) => env[v.index()],
            Expr::Neg(a) => -a.eval(env),
            Expr::Add(a, b) => a.eval(env) + b.eval(env),
            Expr::Sub(a, b) => a.eval(env) - b.eval(env),
            Expr::Mul(a, b) => a.eval(env) * b.eval(env),
            Expr::Div(a, b) => a.eval(env) / b.eval(env),
            Expr::Pow(a, b) => pow(a.eval(env), b.eval(env)),
            Expr::Exp(a) => a.eval(env).exp(),
            Expr::Sqrt(a) => a.eval(env).sqrt(),
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sqrt(a) => a.depends_on(v),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
        }
    }

    fn is_const(&self) -> bool {
        [Var::Y, Var::Z1, Var::Z2, Var::X1, Var::X2].iter().all(|v| !self.depends_on(*v))
    }

    /// Symbolic partial derivative. Exponents must not depend on `v`.
    pub fn diff(&self, v: Var) -> Result<Expr> {
        use Expr::*;
        Ok(match self {
            Num(_) => Num(0.0),
            Var(w) => Num(if *w == v { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.diff(v)?),
            Add(a, b) => add(a.diff(v)?, b.diff(v)?),
            Sub(a, b) => sub(a.diff(v)?, b.diff(v)?),
            Mul(a, b) => add(mul(a.diff(v)?, (**b).clone()), mul((**a).clone(), b.diff(v)?)),
            Div(a, b) => div(
                sub(mul(a.diff(v)?, (**b).clone()), mul((**a).clone(), b.diff(v)?)),
                mul((**b).clone(), (**b).clone()),
            ),
            Pow(a, b) => {
                if b.depends_on(v) {
                    return Err(Error::Expression {
                        column: 0,
                        message: format!("cannot differentiate a power whose exponent depends on {v}"),
                    });
                }
                let lowered = Pow(a.clone(), Box::new(sub((**b).clone(), Num(1.0))));
                mul(mul((**b).clone(), lowered), a.diff(v)?)
            }
            Exp(a) => mul(self.clone(), a.diff(v)?),
            Sqrt(a) => div(a.diff(v)?, mul(Num(2.0), self.clone())),
        })
    }
}

/// Integer powers are exact so that `y^2` at 0 and negative bases behave.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

fn num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(x) => Some(*x),
        _ => None,
    }
}

fn neg(a: Expr) -> Expr {
    match num(&a) {
        Some(x) => Expr::Num(-x),
        None => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        (Some(x), Some(y)) => Expr::Num(x + y),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        (Some(x), Some(y)) => Expr::Num(x - y),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        (Some(x), Some(y)) => Expr::Num(x * y),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(0.0), _) => Expr::Num(0.0),
        (_, Some(1.0)) => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Expression { column: self.src[..self.pos].chars().count() + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
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
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let rest = &self.src[self.pos..];
                let mut len = rest.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(rest.len());
                // optional exponent part
                let tail = &rest[len..];
                if tail.starts_with(['e', 'E']) {
                    let t = &tail[1..];
                    let sign = usize::from(t.starts_with(['+', '-']));
                    let digits = t[sign..].find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len() - sign);
                    if digits > 0 {
                        len += 1 + sign + digits;
                    }
                }
                let text = &rest[..len];
                let value = text.parse::<f64>().map_err(|_| self.error(&format!("invalid number '{text}'")))?;
                self.pos += len;
                Ok(Expr::Num(value))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = &self.src[self.pos..];
                let len = rest.find(|c: char| !c.is_ascii_alphanumeric() && c != '_').unwrap_or(rest.len());
                let name = &rest[..len];
                self.pos += len;
                match name {
                    "exp" | "sqrt" => {
                        if !self.eat('(') {
                            return Err(self.error(&format!("expected '(' after {name}")));
                        }
                        let arg = self.expr()?;
                        if !self.eat(')') {
                            return Err(self.error("expected ')'"));
                        }
                        Ok(if name == "exp" { Expr::Exp(Box::new(arg)) } else { Expr::Sqrt(Box::new(arg)) })
                    }
                    _ => match Var::parse(name) {
                        Some(v) if self.allowed.contains(&v) => Ok(Expr::Var(v)),
                        Some(v) => {
                            self.pos = start;
                            Err(self.error(&format!("variable {v} is not allowed here")))
                        }
                        None => {
                            self.pos = start;
                            Err(self.error(&format!("unknown identifier '{name}'")))
                        }
                    },
                }
            }
            Some(c) => Err(self.error(&format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

impl Expr {
    /// Folds constant subtrees.
    pub fn simplified(self) -> Expr {
        if self.is_const() {
            return Expr::Num(self.eval(&[0.0; 5]));
        }
        self
    }
}
