//! Closed-form expressions in one variable and their Taylor-jet evaluation.
//!
//! The grammar (whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := ('-')? power
//! power   := primary ('^' exponent)?
//! primary := number | 'x' | '(' expr ')' | func '(' expr ')'
//! func    := 'exp' | 'log' | 'sqrt'
//! ```
//!
//! An exponent is a real literal, optionally signed and optionally
//! parenthesized: `x^2`, `x^-0.5`, `x^(1.5)` all parse.
//!
//! A [`Jet`] carries f(x0), f'(x0), …, f^(N)(x0): derivatives, not Taylor
//! coefficients; the n! conversion happens inside the evaluator.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::measure::{check_lambda, check_positive_x, MeasureSpec};
use crate::real::Real;
use crate::series::Series;

/// Expression tree over the single variable `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a fixed real exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
}

/// Parses an expression string; errors carry the byte position.
pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(Error::Syntax {
            pos: p.pos,
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Syntax {
                pos: self.pos,
                msg: format!("expected '{}'", ch as char),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    /// A real literal, optionally signed, optionally wrapped in parentheses.
    fn exponent(&mut self) -> Result<f64> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let v = self.signed_number()?;
            self.expect(b')')?;
            return Ok(v);
        }
        self.signed_number()
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            false
        };
        let v = self.number()?;
        Ok(if neg { -v } else { v })
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos == start {
            return Err(Error::Syntax {
                pos: start,
                msg: "expected a number".into(),
            });
        }
        // optional e/E exponent, only when followed by a well-formed tail
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                probe += 1;
                while probe < self.src.len() && self.src[probe].is_ascii_digit() {
                    probe += 1;
                }
                self.pos = probe;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("invalid number '{text}'"),
        })
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(Error::Syntax {
                pos: self.pos,
                msg: "unexpected end of input".into(),
            }),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "x" => Ok(Expr::Var),
                    "exp" | "log" | "sqrt" => {
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(match name {
                            "exp" => Expr::Exp(Box::new(arg)),
                            "log" => Expr::Log(Box::new(arg)),
                            _ => Expr::Sqrt(Box::new(arg)),
                        })
                    }
                    _ => Err(Error::UnknownFunction {
                        pos: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(c) => Err(Error::Syntax {
                pos: self.pos,
                msg: format!("unexpected character '{}'", c as char),
            }),
        }
    }
}

impl std::fmt::Display for Expr {
    /// Prints a form that re-parses to the same tree: every binary node and
    /// negation is parenthesized, powers wrap their base when needed.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(b, e) => {
                let needs_parens = matches!(**b, Expr::Pow(..)) ||
                    matches!(**b, Expr::Const(c) if c < 0.0);
                if needs_parens {
                    write!(f, "({b})^({e})")
                } else {
                    write!(f, "{b}^({e})")
                }
            }
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Log(e) => write!(f, "log({e})"),
            Expr::Sqrt(e) => write!(f, "sqrt({e})"),
        }
    }
}

/// Derivatives f(x0), f'(x0), …, f^(N)(x0) at an expansion point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<R: Real> {
    x0: R,
    derivs: Vec<R>,
}

impl<R: Real> Jet<R> {
    pub fn new(x0: R, derivs: Vec<R>) -> Result<Self> {
        if derivs.is_empty() {
            return Err(Error::BadSpec {
                msg: "jet needs at least the order-0 entry".into(),
            });
        }
        for d in &derivs {
            if !d.is_finite() {
                return Err(Error::Domain {
                    msg: "non-finite derivative in jet".into(),
                });
            }
        }
        Ok(Jet { x0, derivs })
    }

    pub(crate) fn from_series(x0: R, s: &Series<R>) -> Result<Self> {
        let mut derivs = Vec::with_capacity(s.c.len());
        let mut fact = R::one();
        for (n, coeff) in s.c.iter().enumerate() {
            if n > 0 {
                fact = fact * R::from_usize(n);
            }
            derivs.push(coeff.clone() * &fact);
        }
        Jet::new(x0, derivs)
    }

    pub fn x0(&self) -> &R {
        &self.x0
    }

    /// Highest derivative order stored.
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn deriv(&self, n: usize) -> Result<&R> {
        self.derivs.get(n).ok_or(Error::InsufficientOrder {
            needed: n,
            available: self.order(),
        })
    }

    pub fn derivs(&self) -> &[R] {
        &self.derivs
    }

    /// The Taylor coefficients f^(n)/n!, the form the recurrences use.
    pub(crate) fn to_series(&self) -> Series<R> {
        let mut c = Vec::with_capacity(self.derivs.len());
        let mut fact = R::one();
        for (n, d) in self.derivs.iter().enumerate() {
            if n > 0 {
                fact = fact * R::from_usize(n);
            }
            c.push(d.clone() / &fact);
        }
        Series { c }
    }
}

fn build_series<R: Real>(ast: &Expr, x0: &R, order: usize) -> Result<Series<R>> {
    match ast {
        Expr::Const(c) => Ok(Series::constant(R::from_f64(*c), order)),
        Expr::Var => Ok(Series::variable(x0.clone(), order)),
        Expr::Neg(e) => Ok(build_series(e, x0, order)?.neg()),
        Expr::Add(a, b) => Ok(build_series(a, x0, order)?.add(&build_series(b, x0, order)?)),
        Expr::Sub(a, b) => Ok(build_series(a, x0, order)?.sub(&build_series(b, x0, order)?)),
        Expr::Mul(a, b) => Ok(build_series(a, x0, order)?.mul(&build_series(b, x0, order)?)),
        Expr::Div(a, b) => build_series(a, x0, order)?.div(&build_series(b, x0, order)?),
        Expr::Pow(b, alpha) => {
            let base = build_series(b, x0, order)?;
            // integer exponents use the direct recurrence, which tolerates a
            // vanishing base value; real exponents need base > 0
            if alpha.fract() == 0.0 && alpha.abs() < 9.0e15 {
                base.powi(*alpha as i64)
            } else {
                base.powf(&R::from_f64(*alpha))
            }
        }
        Expr::Exp(e) => Ok(build_series(e, x0, order)?.exp()),
        Expr::Log(e) => build_series(e, x0, order)?.ln(),
        Expr::Sqrt(e) => build_series(e, x0, order)?.sqrt(),
    }
}

/// Evaluates `ast` and its derivatives to order `n_max` at `x`.
pub fn jet_eval<R: Real>(ast: &Expr, x: &R, n_max: usize) -> Result<Jet<R>> {
    let s = build_series(ast, x, n_max)?;
    Jet::from_series(x.clone(), &s)
}

/// Evaluates `ast` at a complex point, principal branches throughout.
pub fn eval_complex_ast(ast: &Expr, z: Complex64) -> Result<Complex64> {
    let v = eval_complex_inner(ast, z);
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain {
            msg: format!("expression not finite at {z}"),
        });
    }
    Ok(v)
}

fn eval_complex_inner(ast: &Expr, z: Complex64) -> Complex64 {
    match ast {
        Expr::Const(c) => Complex64::new(*c, 0.0),
        Expr::Var => z,
        Expr::Neg(e) => -eval_complex_inner(e, z),
        Expr::Add(a, b) => eval_complex_inner(a, z) + eval_complex_inner(b, z),
        Expr::Sub(a, b) => eval_complex_inner(a, z) - eval_complex_inner(b, z),
        Expr::Mul(a, b) => eval_complex_inner(a, z) * eval_complex_inner(b, z),
        Expr::Div(a, b) => eval_complex_inner(a, z) / eval_complex_inner(b, z),
        Expr::Pow(b, alpha) => eval_complex_inner(b, z).powf(*alpha),
        Expr::Exp(e) => eval_complex_inner(e, z).exp(),
        Expr::Log(e) => eval_complex_inner(e, z).ln(),
        Expr::Sqrt(e) => eval_complex_inner(e, z).sqrt(),
    }
}

/// A function to classify: either a parsed expression or a measure together
/// with the order λ of its kernel representation.
#[derive(Clone, Debug)]
pub enum FunctionSpec {
    Expr { src: String, ast: Expr },
    Measure { measure: MeasureSpec, lambda: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    expr: Option<String>,
    measure: Option<serde_json::Value>,
    lambda: Option<f64>,
}

impl FunctionSpec {
    pub fn from_expr(src: &str) -> Result<Self> {
        let ast = parse(src)?;
        Ok(FunctionSpec::Expr {
            src: src.to_string(),
            ast,
        })
    }

    pub fn from_measure(measure: MeasureSpec, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(FunctionSpec::Measure { measure, lambda })
    }

    /// Parses `{"expr": "…"}` or `{"measure": {…}, "lambda": λ}`.
    pub fn from_json(src: &str) -> Result<Self> {
        let raw: RawFunction = serde_json::from_str(src).map_err(|e| Error::BadSpec {
            msg: format!("function JSON: {e}"),
        })?;
        match (raw.expr, raw.measure) {
            (Some(e), None) => {
                if raw.lambda.is_some() {
                    return Err(Error::BadSpec {
                        msg: "'lambda' belongs to measure-backed specs only".into(),
                    });
                }
                FunctionSpec::from_expr(&e)
            }
            (None, Some(m)) => {
                let lambda = raw.lambda.ok_or_else(|| Error::BadSpec {
                    msg: "measure-backed spec needs 'lambda'".into(),
                })?;
                FunctionSpec::from_measure(MeasureSpec::from_value(m)?, lambda)
            }
            (Some(_), Some(_)) => Err(Error::BadSpec {
                msg: "give either 'expr' or 'measure', not both".into(),
            }),
            (None, None) => Err(Error::BadSpec {
                msg: "need 'expr' or 'measure'".into(),
            }),
        }
    }

    /// Derivatives to order `n_max` at `x > 0`.
    pub fn jet<R: Real>(&self, x: &R, n_max: usize) -> Result<Jet<R>> {
        check_positive_x(x)?;
        match self {
            FunctionSpec::Expr { ast, .. } => jet_eval(ast, x, n_max),
            FunctionSpec::Measure { measure, lambda } => {
                let derivs = measure.eval_derivs(*lambda, x, n_max)?;
                Jet::new(x.clone(), derivs)
            }
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            FunctionSpec::Expr { ast, .. } => eval_complex_ast(ast, z),
            FunctionSpec::Measure { measure, lambda } => measure.eval_complex(*lambda, z),
        }
    }

    /// The backing measure and its representation order, when there is one.
    pub fn measure_ref(&self) -> Option<(&MeasureSpec, f64)> {
        match self {
            FunctionSpec::Expr { .. } => None,
            FunctionSpec::Measure { measure, lambda } => Some((measure, *lambda)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FunctionSpec::Expr { src, .. } => format!("expr {src}"),
            FunctionSpec::Measure { measure, lambda } => {
                format!("measure[lambda={lambda}] {}", measure.describe())
            }
        }
    }
}
