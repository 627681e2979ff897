//! Rational expressions over a prime-power field, parsed from the notation
//! used for the coordinate formulas: juxtaposition multiplies, `^` takes
//! nonnegative integer powers, and `f(x)` is the defining quadratic
//! `x^2 - r x - s`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimePowerField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    R,
    S,
    Mu,
    Psi,
    Kappa1,
    Kappa2,
    Gamma,
    Delta,
    E,
    J,
    G,
    H,
    T,
    V,
    W,
    Z,
}

impl Var {
    pub const COUNT: usize = 16;

    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "r" => Var::R,
            "s" => Var::S,
            "mu" => Var::Mu,
            "psi" => Var::Psi,
            "kappa1" => Var::Kappa1,
            "kappa2" => Var::Kappa2,
            "gamma" => Var::Gamma,
            "delta" => Var::Delta,
            "e" => Var::E,
            "j" => Var::J,
            "g" => Var::G,
            "h" => Var::H,
            "t" => Var::T,
            "v" => Var::V,
            "w" => Var::W,
            "z" => Var::Z,
            _ => return None,
        })
    }
}

/// Values of every variable, indexed by `Var as usize`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Env(pub [Fe; Var::COUNT]);

impl Env {
    pub fn get(&self, v: Var) -> Fe {
        self.0[v as usize]
    }

    pub fn set(&mut self, v: Var, x: Fe) {
        self.0[v as usize] = x;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(Var),
    F(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// A denominator evaluated to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroDenominator(pub String);

impl fmt::Display for ZeroDenominator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "denominator {} vanishes", self.0)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expr(format!("trailing input at token {} in `{src}`", p.pos)));
        }
        Ok(e)
    }

    pub fn eval(&self, field: &PrimePowerField, env: &Env) -> std::result::Result<Fe, ZeroDenominator> {
        Ok(match self {
            Expr::Int(n) => field.from_int(*n),
            Expr::Var(v) => env.get(*v),
            Expr::F(x) => {
                let x = x.eval(field, env)?;
                let (r, s) = (env.get(Var::R), env.get(Var::S));
                field.sub(field.sub(field.mul(x, x), field.mul(r, x)), s)
            }
            Expr::Neg(a) => field.neg(a.eval(field, env)?),
            Expr::Add(a, b) => field.add(a.eval(field, env)?, b.eval(field, env)?),
            Expr::Sub(a, b) => field.sub(a.eval(field, env)?, b.eval(field, env)?),
            Expr::Mul(a, b) => field.mul(a.eval(field, env)?, b.eval(field, env)?),
            Expr::Div(a, b) => {
                let d = b.eval(field, env)?;
                let n = a.eval(field, env)?;
                field.div(n, d).ok_or_else(|| ZeroDenominator(b.to_string()))?
            }
            Expr::Pow(a, k) => field.pow(a.eval(field, env)?, *k as u64),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Var(v) => write!(f, "{}", format!("{v:?}").to_lowercase()),
            Expr::F(x) => write!(f, "f({x})"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a} {b}"),
            Expr::Div(a, b) => write!(f, "({a})/({b})"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut n = 0i64;
            while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                n = n * 10 + d as i64;
                chars.next();
            }
            out.push(Tok::Int(n));
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric()) {
                s.push(c);
                chars.next();
            }
            out.push(Tok::Ident(s));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            chars.next();
        } else {
            return Err(Error::Expr(format!("unexpected character `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Div(Box::new(e), Box::new(self.unary()?));
            } else if matches!(self.peek(), Some(Tok::Int(_) | Tok::Ident(_) | Tok::Op('('))) {
                e = Expr::Mul(Box::new(e), Box::new(self.power()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), k as u32))
                }
                other => Err(Error::Expr(format!("expected integer exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Int(n)) => Ok(Expr::Int(n)),
            Some(Tok::Ident(name)) if name == "f" => {
                if !self.eat('(') {
                    return Err(Error::Expr("f must be applied to a parenthesised argument".into()));
                }
                let arg = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Expr("unclosed f(".into()));
                }
                Ok(Expr::F(Box::new(arg)))
            }
            Some(Tok::Ident(name)) => Var::parse(&name)
                .map(Expr::Var)
                .ok_or_else(|| Error::Expr(format!("unknown variable `{name}`"))),
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Expr("unbalanced parenthesis".into()));
                }
                Ok(e)
            }
            other => Err(Error::Expr(format!("unexpected token {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, env: &Env) -> std::result::Result<Fe, ZeroDenominator> {
        Expr::parse(src).unwrap().eval(&PrimePowerField::new(7, 1).unwrap(), env)
    }

    #[test]
    fn precedence_and_juxtaposition() {
        let mut env = Env::default();
        env.set(Var::V, 3);
        env.set(Var::H, 2);
        assert_eq!(eval("2 v h", &env), Ok(5));
        assert_eq!(eval("2v^2 - h", &env), Ok(2));
        assert_eq!(eval("-v^2", &env), Ok(5));
        assert_eq!(eval("v / h 2", &env), Ok(3));
        assert_eq!(eval("(v - h)(v + h)", &env), Ok(5));
        assert_eq!(eval("- (1 - v) h", &env), Ok(4));
    }

    #[test]
    fn defining_quadratic() {
        let mut env = Env::default();
        env.set(Var::R, 1);
        env.set(Var::S, 3);
        env.set(Var::Mu, 2);
        // 4 - 2 - 3 = -1
        assert_eq!(eval("f(mu)", &env), Ok(6));
    }

    #[test]
    fn zero_denominator_is_reported() {
        let mut env = Env::default();
        env.set(Var::V, 1);
        assert!(eval("mu/(1 - v)", &env).is_err());
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(Expr::parse("2 + ").is_err());
        assert!(Expr::parse("(v").is_err());
        assert!(Expr::parse("rh").is_err());
        assert!(Expr::parse("v^h").is_err());
    }
}
