//! Polynomial outcome functions `b = f(b1, ..., bk)`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'b' uint | number | '(' expr ')'
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Zero-based variable index (`b1` is `Var(0)`).
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Var(_) | Expr::Const(_) => 4,
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Pow(a, _) => a.max_var(),
        }
    }

    fn eval(&self, args: &[f64]) -> f64 {
        match self {
            Expr::Var(i) => args[*i],
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval(args) + b.eval(args),
            Expr::Sub(a, b) => a.eval(args) - b.eval(args),
            Expr::Mul(a, b) => a.eval(args) * b.eval(args),
            Expr::Pow(a, n) => a.eval(args).powi(*n as i32),
        }
    }

    fn eval_matrix(&self, args: &[&CMatrix], dim: usize) -> CMatrix {
        match self {
            Expr::Var(i) => args[*i].clone(),
            Expr::Const(c) => CMatrix::identity(dim, dim).scale(*c),
            Expr::Add(a, b) => a.eval_matrix(args, dim) + b.eval_matrix(args, dim),
            Expr::Sub(a, b) => a.eval_matrix(args, dim) - b.eval_matrix(args, dim),
            Expr::Mul(a, b) => a.eval_matrix(args, dim) * b.eval_matrix(args, dim),
            Expr::Pow(a, n) => {
                let base = a.eval_matrix(args, dim);
                (0..*n).fold(CMatrix::identity(dim, dim), |acc, _| acc * &base)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parenthesize: bool) -> fmt::Result {
    if parenthesize {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical form: minimal parentheses that preserve the tree exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(i) => write!(f, "b{}", i + 1),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                write_operand(f, a, a.precedence() < 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                write_operand(f, b, b.precedence() <= 1)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, a.precedence() < 2)?;
                f.write_str("*")?;
                write_operand(f, b, b.precedence() <= 2)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, a.precedence() < 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

/// A parsed outcome function of fixed arity.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeFunction {
    pub expr: Expr,
    pub arity: usize,
}

impl OutcomeFunction {
    /// `f(b1) = b1`
    pub fn identity() -> Self {
        OutcomeFunction {
            expr: Expr::Var(0),
            arity: 1,
        }
    }

    pub fn evaluate(&self, args: &[f64]) -> Result<f64> {
        if args.len() != self.arity {
            return Err(Error::InvalidOutcomeFunction(format!(
                "expected {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        let v = self.expr.eval(args);
        if !v.is_finite() {
            return Err(Error::InvalidOutcomeFunction(format!(
                "'{}' is not finite at {args:?}",
                self.expr
            )));
        }
        Ok(v)
    }

    /// Evaluates the polynomial on pairwise commuting operators.
    pub fn evaluate_operators(&self, ops: &[&CMatrix]) -> Result<CMatrix> {
        let dim = ops.first().map_or(0, |m| m.nrows());
        if ops.len() != self.arity || ops.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::DimensionMismatch(
                "outcome function arguments must be equal-size square operators".into(),
            ));
        }
        Ok(self.expr.eval_matrix(ops, dim))
    }
}

impl fmt::Display for OutcomeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ParseError {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let at = self.pos;
        let d = self.digits();
        if d.is_empty() {
            return Err(Error::ParseError {
                offset: at,
                message: "expected an unsigned integer".into(),
            });
        }
        std::str::from_utf8(d)
            .unwrap()
            .parse()
            .map_err(|_| Error::ParseError {
                offset: at,
                message: "integer out of range".into(),
            })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let n = self.uint()?;
            let n = u32::try_from(n).map_err(|_| Error::ParseError {
                offset: at,
                message: "exponent too large".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'b') => {
                self.pos += 1;
                let at = self.pos;
                let n = self.uint()?;
                if n == 0 {
                    return Err(Error::ParseError {
                        offset: at,
                        message: "variables are numbered from b1".into(),
                    });
                }
                Ok(Expr::Var(n as usize - 1))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(ch) if ch.is_ascii_digit() => {
                let start = self.pos;
                self.digits();
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    if self.digits().is_empty() {
                        return Err(self.err("expected digits after '.'"));
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Const(text.parse().expect("digits form a valid float")))
            }
            Some(_) => Err(self.err("expected a variable, number or '('")),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}

/// Parses `expr` as a function of `arity` variables.
pub fn parse_f(expr: &str, arity: usize) -> Result<OutcomeFunction> {
    let mut p = Parser {
        src: expr.as_bytes(),
        pos: 0,
    };
    let tree = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    if let Some(max) = tree.max_var() {
        if max >= arity {
            return Err(Error::ArityError {
                index: max + 1,
                arity,
            });
        }
    }
    Ok(OutcomeFunction { expr: tree, arity })
}
