//! Coefficient expressions: a small arithmetic language over chart
//! coordinates `x1..x9`, parsed into an AST that evaluates on [`Jet`]s.
//!
//! ```text
//! expr    := term (("+"|"-") term)*
//! term    := factor (("*"|"/") factor)*
//! factor  := "-" factor | power
//! power   := atom ("^" factor)?
//! atom    := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
//! ident   := "x1".."x9" | "sin"|"cos"|"exp"|"log"|"sqrt"|"tanh"
//! number  := decimal literal with optional exponent
//! ```

use alloc::{
    borrow::ToOwned,
    boxed::Box,
    format,
    string::{String, ToString},
    sync::Arc,
    vec::Vec,
};
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetLayout, JetMatrix, UnivariateFn};

/// Integer exponents up to this magnitude are unrolled into products.
pub const MAX_UNROLLED_EXPONENT: i32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "exp" => Self::Exp,
            "log" => Self::Log,
            "sqrt" => Self::Sqrt,
            "tanh" => Self::Tanh,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        self.univariate().name()
    }

    fn univariate(self) -> UnivariateFn {
        match self {
            Self::Sin => UnivariateFn::Sin,
            Self::Cos => UnivariateFn::Cos,
            Self::Exp => UnivariateFn::Exp,
            Self::Log => UnivariateFn::Log,
            Self::Sqrt => UnivariateFn::Sqrt,
            Self::Tanh => UnivariateFn::Tanh,
        }
    }
}

/// Parsed coefficient expression. Variables are stored zero-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power, unrolled to repeated multiplication.
    PowInt(Box<Expr>, i32),
    /// Real power; evaluated as `exp(e2 · log e1)` unless the exponent is constant.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parses `source` for a chart of dimension `dim`.
pub fn parse_expr(source: &str, dim: usize) -> Result<Expr> {
    let mut p = Parser {
        src: source.as_bytes(),
        pos: 0,
        dim,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exponent = self.factor()?;
        let integer = match &exponent {
            Expr::Const(c) => Some(*c),
            Expr::Neg(inner) => match **inner {
                Expr::Const(c) => Some(-c),
                _ => None,
            },
            _ => None,
        }
        .filter(|c| libm::trunc(*c) == *c && libm::fabs(*c) <= MAX_UNROLLED_EXPONENT as f64);
        Ok(match integer {
            Some(k) => Expr::PowInt(Box::new(base), k as i32),
            None => Expr::Pow(Box::new(base), Box::new(exponent)),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("expected a number, identifier, or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return Err(self.error("malformed exponent"));
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Const).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if let Some(func) = Func::from_name(name) {
            if !self.eat(b'(') {
                return Err(self.error("expected `(` after function name"));
            }
            let mut args = Vec::new();
            args.push(self.expr()?);
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            if args.len() != 1 {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("{name} takes one argument, got {}", args.len()),
                });
            }
            return Ok(Expr::Call(func, Box::new(args.pop().expect("one argument"))));
        }
        let bytes = name.as_bytes();
        if bytes.len() == 2 && bytes[0] == b'x' && (b'1'..=b'9').contains(&bytes[1]) {
            let index = (bytes[1] - b'0') as usize;
            if index > self.dim {
                return Err(Error::VariableOutOfRange { index, dim: self.dim });
            }
            return Ok(Expr::Var(index - 1));
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            offset: start,
        })
    }
}

impl Expr {
    /// Plain scalar evaluation.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Self::Const(c) => *c,
            Self::Var(i) => x[*i],
            Self::Neg(a) => -a.eval(x)?,
            Self::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Self::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Self::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Self::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Domain { func: "recip", value: d });
                }
                a.eval(x)? / d
            }
            Self::PowInt(a, k) => {
                let base = a.eval(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(Error::Domain { func: "recip", value: base });
                }
                libm::pow(base, *k as f64)
            }
            Self::Pow(a, b) => {
                let base = a.eval(x)?;
                let e = b.eval(x)?;
                match **b {
                    Expr::Const(p) => UnivariateFn::PowConst(p).derivatives(base, 0)?[0],
                    _ => libm::exp(e * UnivariateFn::Log.derivatives(base, 0)?[0]),
                }
            }
            Self::Call(f, a) => f.univariate().derivatives(a.eval(x)?, 0)?[0],
        })
    }

    /// Exact jet of the expression at `x`.
    pub fn eval_jet(&self, layout: &Arc<JetLayout>, x: &Arc<[f64]>, order: usize) -> Result<Jet> {
        Ok(match self {
            Self::Const(c) => Jet::constant(layout, order, x.clone(), *c)?,
            Self::Var(i) => Jet::coordinate(layout, order, x.clone(), *i)?,
            Self::Neg(a) => a.eval_jet(layout, x, order)?.neg(),
            Self::Add(a, b) => a.eval_jet(layout, x, order)?.checked_add(&b.eval_jet(layout, x, order)?)?,
            Self::Sub(a, b) => a.eval_jet(layout, x, order)?.checked_sub(&b.eval_jet(layout, x, order)?)?,
            Self::Mul(a, b) => a.eval_jet(layout, x, order)?.checked_mul(&b.eval_jet(layout, x, order)?)?,
            Self::Div(a, b) => a.eval_jet(layout, x, order)?.checked_div(&b.eval_jet(layout, x, order)?)?,
            Self::PowInt(a, k) => a.eval_jet(layout, x, order)?.powi(*k)?,
            Self::Pow(a, b) => {
                let base = a.eval_jet(layout, x, order)?;
                match **b {
                    Expr::Const(p) => base.compose(UnivariateFn::PowConst(p))?,
                    _ => b
                        .eval_jet(layout, x, order)?
                        .checked_mul(&base.compose(UnivariateFn::Log)?)?
                        .compose(UnivariateFn::Exp)?,
                }
            }
            Self::Call(f, a) => a.eval_jet(layout, x, order)?.compose(f.univariate())?,
        })
    }

    /// True when the expression is the literal `0` (possibly negated).
    pub fn is_zero_literal(&self) -> bool {
        match self {
            Self::Const(c) => *c == 0.0,
            Self::Neg(a) => a.is_zero_literal(),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Self::Add(..) | Self::Sub(..) => 1,
            Self::Mul(..) | Self::Div(..) => 2,
            Self::Neg(..) => 3,
            Self::PowInt(..) | Self::Pow(..) => 4,
            Self::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_precedence: u8) -> fmt::Result {
    if e.precedence() < min_precedence {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in the input grammar; the output reparses to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Const(c) => {
                if *c < 0.0 {
                    write!(f, "-{:?}", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Self::Var(i) => write!(f, "x{}", i + 1),
            Self::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Self::Add(a, b) | Self::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(if matches!(self, Self::Add(..)) { " + " } else { " - " })?;
                write_operand(f, b, 2)
            }
            Self::Mul(a, b) | Self::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(if matches!(self, Self::Mul(..)) { "*" } else { "/" })?;
                write_operand(f, b, 3)
            }
            Self::PowInt(a, k) => {
                write_operand(f, a, 5)?;
                write!(f, "^{k}")
            }
            Self::Pow(a, b) => {
                write_operand(f, a, 5)?;
                f.write_str("^")?;
                write_operand(f, b, 3)
            }
            Self::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Scalar coefficient field (for example `log ρ`).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub dim: usize,
    pub expr: Expr,
}

impl ScalarField {
    pub fn parse(source: &str, dim: usize) -> Result<Self> {
        Ok(Self {
            dim,
            expr: parse_expr(source, dim)?,
        })
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self { dim, expr: Expr::Const(c) }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.expr.eval(x)
    }

    pub fn jet(&self, layout: &Arc<JetLayout>, x: &Arc<[f64]>, order: usize) -> Result<Jet> {
        self.expr.eval_jet(layout, x, order)
    }
}

/// Vector of `n` coefficient expressions (drift `b^i`, or map components).
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub dim: usize,
    pub components: Vec<Expr>,
}

impl VectorField {
    pub fn parse<S: AsRef<str>>(sources: &[S], dim: usize) -> Result<Self> {
        let components = sources
            .iter()
            .map(|s| parse_expr(s.as_ref(), dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim, components })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            components: (0..dim).map(|_| Expr::Const(0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.components.iter().map(|e| e.eval(x)).collect()
    }

    pub fn jets(&self, layout: &Arc<JetLayout>, x: &Arc<[f64]>, order: usize) -> Result<Vec<Jet>> {
        self.components.iter().map(|e| e.eval_jet(layout, x, order)).collect()
    }

    pub fn sources(&self) -> Vec<String> {
        self.components.iter().map(|e| e.to_string()).collect()
    }
}

/// Symmetric `n×n` field stored as its upper triangle, row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricField {
    pub dim: usize,
    upper: Vec<Expr>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymmetricField {
    /// Parses a full `n×n` grid of sources, reading only the upper triangle.
    pub fn parse_rows<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("symmetric field needs a square grid, got {n} rows")));
        }
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            for src in &row[i..] {
                upper.push(parse_expr(src.as_ref(), n)?);
            }
        }
        Ok(Self { dim: n, upper })
    }

    /// Diagonal field from `n` diagonal sources.
    pub fn parse_diagonal<S: AsRef<str>>(diagonal: &[S]) -> Result<Self> {
        let n = diagonal.len();
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for (i, src) in diagonal.iter().enumerate() {
            upper.push(parse_expr(src.as_ref(), n)?);
            upper.extend((i + 1..n).map(|_| Expr::Const(0.0)));
        }
        Ok(Self { dim: n, upper })
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.upper[upper_index(self.dim, i, j)]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(f).collect(),
        }
    }

    /// True when every off-diagonal entry is the literal zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j).is_zero_literal()))
    }

    pub fn eval(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let n = self.dim;
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j).eval(x)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    pub fn jets(&self, layout: &Arc<JetLayout>, x: &Arc<[f64]>, order: usize) -> Result<JetMatrix> {
        let upper = self
            .upper
            .iter()
            .map(|e| e.eval_jet(layout, x, order))
            .collect::<Result<Vec<_>>>()?;
        let n = self.dim;
        JetMatrix::from_fn(n, n, |i, j| Ok(upper[upper_index(n, i, j)].clone()))
    }

    /// Full grid of printed sources.
    pub fn sources(&self) -> Vec<Vec<String>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}
