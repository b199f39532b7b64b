//! A small arithmetic expression language over complex numbers.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | number 'i' | 'i' | 'pi' | variable | func '(' args ')' | '(' expr ')'
//! func    := exp | sin | cos | pow
//! ```
//!
//! Variables are supplied by the caller, for example `z` for complex maps or
//! `x1 .. x{n+1}` for densities on the sphere.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Exp(Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
    vars: usize,
}

impl Expr {
    /// Parses `src`, resolving identifiers against `vars` (in order).
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self> {
        let mut p = Parser {
            chars: src.char_indices().collect(),
            pos: 0,
            src,
            vars,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: src.trim().to_string(),
            root,
            vars: vars.len(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates with the variables bound to `values`.
    pub fn eval(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.vars);
        eval(&self.root, values)
    }

    /// Real evaluation; the imaginary part of the result is discarded.
    pub fn eval_real(&self, values: &[f64]) -> f64 {
        let vals: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.eval(&vals).re
    }
}

fn eval(n: &Node, v: &[Complex64]) -> Complex64 {
    match n {
        Node::Const(c) => *c,
        Node::Var(i) => v[*i],
        Node::Neg(a) => -eval(a, v),
        Node::Add(a, b) => eval(a, v) + eval(b, v),
        Node::Sub(a, b) => eval(a, v) - eval(b, v),
        Node::Mul(a, b) => eval(a, v) * eval(b, v),
        Node::Div(a, b) => eval(a, v) / eval(b, v),
        Node::Pow(a, b) => power(eval(a, v), eval(b, v)),
        Node::Exp(a) => eval(a, v).exp(),
        Node::Sin(a) => eval(a, v).sin(),
        Node::Cos(a) => eval(a, v).cos(),
    }
}

/// Integer exponents use repeated multiplication so that `z^2` is exact
/// and `0^k` is defined.
fn power(base: Complex64, e: Complex64) -> Complex64 {
    if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
        let k = e.re as i32;
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..k.unsigned_abs() {
            acc *= base;
        }
        if k < 0 {
            acc.inv()
        } else {
            acc
        }
    } else {
        base.powc(e)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let offset = self.chars.get(self.pos).map_or(self.src.len(), |c| c.0);
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
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
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() => self.identifier(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        let v = text.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.error(&format!("invalid number '{text}'"))
        })?;
        let next = self.chars.get(self.pos + 1).map(|c| c.1);
        if self.peek() == Some('i') && !next.is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
            return Ok(Node::Const(Complex64::new(0.0, v)));
        }
        Ok(Node::Const(Complex64::new(v, 0.0)))
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        match name.as_str() {
            "i" => Ok(Node::Const(Complex64::new(0.0, 1.0))),
            "pi" => Ok(Node::Const(Complex64::new(std::f64::consts::PI, 0.0))),
            "exp" | "sin" | "cos" => {
                self.expect('(')?;
                let a = Box::new(self.expr()?);
                self.expect(')')?;
                Ok(match name.as_str() {
                    "exp" => Node::Exp(a),
                    "sin" => Node::Sin(a),
                    _ => Node::Cos(a),
                })
            }
            "pow" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(')')?;
                Ok(Node::Pow(Box::new(a), Box::new(b)))
            }
            _ => {
                self.pos = start;
                Err(self.error(&format!("unknown identifier '{name}'")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic_and_precedence() {
        let e = Expr::parse("1 + 2*z^2 - z/2", &["z"]).unwrap();
        assert_eq!(e.eval(&[c(2.0, 0.0)]), c(8.0, 0.0));
        let e = Expr::parse("-z^2", &["z"]).unwrap();
        assert_eq!(e.eval(&[c(3.0, 0.0)]), c(-9.0, 0.0));
        let e = Expr::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval(&[]), c(512.0, 0.0));
    }

    #[test]
    fn complex_constants_and_functions() {
        let e = Expr::parse("exp(i*pi)", &[]).unwrap();
        assert!((e.eval(&[]) - c(-1.0, 0.0)).norm() < 1e-15);
        let e = Expr::parse("pow(z, 2) + sin(0) + cos(0)", &["z"]).unwrap();
        assert_eq!(e.eval(&[c(1.0, 1.0)]), c(1.0, 2.0));
        let e = Expr::parse("z^-1", &["z"]).unwrap();
        assert_eq!(e.eval(&[c(0.0, 2.0)]), c(0.0, -0.5));
    }

    #[test]
    fn imaginary_literals() {
        let e = Expr::parse("0.3 - 0.4i + 2i*z", &["z"]).unwrap();
        assert_eq!(e.eval(&[c(1.0, 0.0)]), c(0.3, 1.6));
        assert!(Expr::parse("2in", &[]).is_err());
    }

    #[test]
    fn real_variables() {
        let e = Expr::parse("1 + 0.5*x1*x3 + 1e-1", &["x1", "x2", "x3"]).unwrap();
        assert!((e.eval_real(&[1.0, 0.0, 2.0]) - 2.1).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        match Expr::parse("1 +\n  foo(z)", &["z"]) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match Expr::parse("(1 + z", &["z"]) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("1 2", &[]).is_err());
        assert!(Expr::parse("", &[]).is_err());
    }
}
