//! One-variable arithmetic expressions used to describe curvature relations.
//!
//! An [`Expr`] is a small immutable tree over the variable `x`, named
//! parameters and real constants. Expressions can be parsed from text,
//! printed back, evaluated in double precision and differentiated
//! symbolically. Evaluation never returns a silent NaN: every operation
//! outside its domain is reported as an [`EvalError`].

mod diff;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

pub use parse::{parse, parse_with_params, ParseError};

/// Parameter bindings used during evaluation.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
    Abs,
    /// Derivative of `abs`; undefined at the kink `0`.
    Sign,
}

impl UnaryOp {
    pub(crate) fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Log => Some("log"),
            UnaryOp::Sqrt => Some("sqrt"),
            UnaryOp::Abs => Some("abs"),
            UnaryOp::Sign => Some("sign"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("{op} is undefined for argument {arg} (at x = {x})")]
    Domain { op: &'static str, arg: f64, x: f64 },
    #[error("non-finite result at x = {x}")]
    NonFinite { x: f64 },
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
}

impl EvalError {
    /// The value of `x` at which evaluation failed, if known.
    pub fn x(&self) -> Option<f64> {
        match *self {
            EvalError::DivisionByZero { x }
            | EvalError::Domain { x, .. }
            | EvalError::NonFinite { x } => Some(x),
            EvalError::UnboundParameter(_) => None,
        }
    }
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    /// Evaluates the expression at `x` with the given parameter bindings.
    pub fn eval(&self, x: f64, params: &Params) -> Result<f64, EvalError> {
        let v = self.eval_inner(x, params)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x })
        }
    }

    /// Evaluates an expression that has no free parameters.
    pub fn eval_at(&self, x: f64) -> Result<f64, EvalError> {
        self.eval(x, &Params::new())
    }

    fn eval_inner(&self, x: f64, params: &Params) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Param(name) => *params
                .get(name)
                .ok_or_else(|| EvalError::UnboundParameter(name.clone()))?,
            Expr::Unary(op, arg) => {
                let a = arg.eval_inner(x, params)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain { op: "log", arg: a, x });
                        }
                        a.ln()
                    }
                    UnaryOp::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain { op: "sqrt", arg: a, x });
                        }
                        a.sqrt()
                    }
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sign => {
                        if a == 0.0 {
                            return Err(EvalError::Domain { op: "sign", arg: a, x });
                        }
                        a.signum()
                    }
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_inner(x, params)?;
                let b = rhs.eval_inner(x, params)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, n) => {
                let a = base.eval_inner(x, params)?;
                pow_checked(a, *n, x)?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x })
        }
    }

    /// Replaces bound parameters by constants.
    pub fn bind(&self, params: &Params) -> Expr {
        match self {
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Const(*v),
                None => self.clone(),
            },
            Expr::Const(_) | Expr::Var => self.clone(),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.bind(params))),
            Expr::Binary(op, a, b) => {
                Expr::Binary(*op, Box::new(a.bind(params)), Box::new(b.bind(params)))
            }
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.bind(params)), *n),
        }
    }

    /// Names of the parameters occurring in the expression, sorted.
    pub fn free_params(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Param(n) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                Expr::Const(_) | Expr::Var => {}
                Expr::Unary(_, a) | Expr::Pow(a, _) => walk(a, out),
                Expr::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out
    }

    /// True when the expression does not depend on `x` or on parameters.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var | Expr::Param(_) => false,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var | Expr::Param(_) => 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn pow_checked(a: f64, n: f64, x: f64) -> Result<f64, EvalError> {
    if a == 0.0 && n < 0.0 {
        return Err(EvalError::DivisionByZero { x });
    }
    if a < 0.0 && n.fract() != 0.0 {
        return Err(EvalError::Domain { op: "pow", arg: a, x });
    }
    if n == 2.0 {
        Ok(a * a)
    } else if n.fract() == 0.0 && n.abs() <= 64.0 {
        Ok(a.powi(n as i32))
    } else {
        Ok(a.powf(n))
    }
}

fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // `{:?}` gives the shortest representation that round-trips.
    if v < 0.0 {
        write!(f, "(-{:?})", -v)
    } else {
        write!(f, "{v:?}")
    }
}

fn fmt_child(e: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_number(*c, f),
            Expr::Var => write!(f, "x"),
            Expr::Param(name) => write!(f, "{name}"),
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                fmt_child(a, 3, f)
            }
            Expr::Unary(op, a) => {
                write!(f, "{}({a})", op.function_name().unwrap_or("?"))
            }
            Expr::Binary(op, a, b) => {
                let (sym, prec) = match op {
                    BinaryOp::Add => (" + ", 1),
                    BinaryOp::Sub => (" - ", 1),
                    BinaryOp::Mul => ("*", 2),
                    BinaryOp::Div => ("/", 2),
                };
                fmt_child(a, prec, f)?;
                write!(f, "{sym}")?;
                fmt_child(b, prec + 1, f)
            }
            Expr::Pow(a, n) => {
                fmt_child(a, 5, f)?;
                write!(f, "^")?;
                fmt_number(*n, f)
            }
        }
    }
}

// Smart constructors with constant folding. Used by the differentiator and
// by code that assembles relations programmatically.

pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (Expr::Const(z), _) if *z == 0.0 => b,
        (_, Expr::Const(z)) if *z == 0.0 => a,
        _ => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (_, Expr::Const(z)) if *z == 0.0 => a,
        (Expr::Const(z), _) if *z == 0.0 => neg(b),
        _ => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (Expr::Const(z), _) | (_, Expr::Const(z)) if *z == 0.0 => Expr::Const(0.0),
        (Expr::Const(o), _) if *o == 1.0 => b,
        (_, Expr::Const(o)) if *o == 1.0 => a,
        (Expr::Const(m), _) if *m == -1.0 => neg(b),
        (_, Expr::Const(m)) if *m == -1.0 => neg(a),
        _ => Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => Expr::Const(x / y),
        (Expr::Const(z), _) if *z == 0.0 => Expr::Const(0.0),
        (_, Expr::Const(o)) if *o == 1.0 => a,
        _ => Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Unary(UnaryOp::Neg, inner) => *inner,
        other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
    }
}

pub fn pow(a: Expr, n: f64) -> Expr {
    if n == 0.0 {
        return Expr::Const(1.0);
    }
    if n == 1.0 {
        return a;
    }
    match a {
        Expr::Const(c) if c > 0.0 || n.fract() == 0.0 => {
            let v = c.powf(n);
            if v.is_finite() {
                Expr::Const(v)
            } else {
                Expr::Pow(Box::new(Expr::Const(c)), n)
            }
        }
        other => Expr::Pow(Box::new(other), n),
    }
}

pub fn unary(op: UnaryOp, a: Expr) -> Expr {
    if op == UnaryOp::Neg {
        return neg(a);
    }
    if let Expr::Const(c) = a {
        let folded = match op {
            UnaryOp::Exp => Some(c.exp()),
            UnaryOp::Log if c > 0.0 => Some(c.ln()),
            UnaryOp::Sqrt if c >= 0.0 => Some(c.sqrt()),
            UnaryOp::Abs => Some(c.abs()),
            UnaryOp::Sign if c != 0.0 => Some(c.signum()),
            _ => None,
        };
        if let Some(v) = folded.filter(|v| v.is_finite()) {
            return Expr::Const(v);
        }
    }
    Expr::Unary(op, Box::new(a))
}
