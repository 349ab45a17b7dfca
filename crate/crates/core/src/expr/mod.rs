//! Univariate real expressions: parsing, evaluation and symbolic derivatives.
//!
//! The free variable is always spelled `x`; the consumer decides what it
//! stands for. Grammar, lowest precedence first:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 'x' | 'pi' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`. Implicit multiplication
//! is rejected.

mod diff;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::jet::Jet;

pub use parser::{parse, parse_number, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Cot,
    Sec,
    Csc,
    Exp,
    Ln,
    Sqrt,
    Abs,
    /// Sign function with `sgn(0) = 0`; closes the node set under differentiation of `abs`.
    Sgn,
}

impl UnaryOp {
    pub const FUNCTIONS: [UnaryOp; 11] = [
        UnaryOp::Sin,
        UnaryOp::Cos,
        UnaryOp::Tan,
        UnaryOp::Cot,
        UnaryOp::Sec,
        UnaryOp::Csc,
        UnaryOp::Exp,
        UnaryOp::Ln,
        UnaryOp::Sqrt,
        UnaryOp::Abs,
        UnaryOp::Sgn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Cot => "cot",
            UnaryOp::Sec => "sec",
            UnaryOp::Csc => "csc",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
            UnaryOp::Sgn => "sgn",
        }
    }

    pub fn from_name(name: &str) -> Option<UnaryOp> {
        UnaryOp::FUNCTIONS.iter().copied().find(|op| op.name() == name)
    }

    /// Value and first two derivatives of the operator at `a`, or the reason it is undefined there.
    fn jet_at(self, a: f64) -> Result<(f64, f64, f64), &'static str> {
        let out = match self {
            UnaryOp::Neg => (-a, -1.0, 0.0),
            UnaryOp::Sin => (a.sin(), a.cos(), -a.sin()),
            UnaryOp::Cos => (a.cos(), -a.sin(), -a.cos()),
            UnaryOp::Tan => {
                let c = a.cos();
                if c == 0.0 {
                    return Err("pole of tan");
                }
                let t = a.tan();
                let s2 = 1.0 / (c * c);
                (t, s2, 2.0 * s2 * t)
            }
            UnaryOp::Cot => {
                let s = a.sin();
                if s == 0.0 {
                    return Err("pole of cot");
                }
                let ct = a.cos() / s;
                let c2 = 1.0 / (s * s);
                (ct, -c2, 2.0 * c2 * ct)
            }
            UnaryOp::Sec => {
                let c = a.cos();
                if c == 0.0 {
                    return Err("pole of sec");
                }
                let sec = 1.0 / c;
                let t = a.sin() / c;
                (sec, sec * t, sec * (t * t + sec * sec))
            }
            UnaryOp::Csc => {
                let s = a.sin();
                if s == 0.0 {
                    return Err("pole of csc");
                }
                let csc = 1.0 / s;
                let ct = a.cos() / s;
                (csc, -csc * ct, csc * (ct * ct + csc * csc))
            }
            UnaryOp::Exp => {
                let e = a.exp();
                (e, e, e)
            }
            UnaryOp::Ln => {
                if a <= 0.0 {
                    return Err("ln of non-positive argument");
                }
                (a.ln(), 1.0 / a, -1.0 / (a * a))
            }
            UnaryOp::Sqrt => {
                if a < 0.0 {
                    return Err("sqrt of negative argument");
                }
                let s = a.sqrt();
                // derivatives are infinite at 0; the value alone is still defined
                (s, 0.5 / s, -0.25 / (s * s * s))
            }
            UnaryOp::Abs => (a.abs(), sgn(a), 0.0),
            UnaryOp::Sgn => (sgn(a), 0.0, 0.0),
        };
        Ok(out)
    }
}

fn sgn(a: f64) -> f64 {
    if a > 0.0 {
        1.0
    } else if a < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Expression>),
    Binary(BinaryOp, Box<Expression>, Box<Expression>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{node}` at argument {arg} (x = {x}): {reason}")]
pub struct EvalError {
    pub node: String,
    pub arg: f64,
    pub x: f64,
    pub reason: String,
}

impl Expression {
    pub fn constant(c: f64) -> Self {
        Expression::Const(c)
    }

    pub fn zero() -> Self {
        Expression::Const(0.0)
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Expression::Const(_) => false,
            Expression::Var => true,
            Expression::Unary(_, a) => a.contains_var(),
            Expression::Binary(_, a, b) => a.contains_var() || b.contains_var(),
        }
    }

    /// The value of a variable-free expression.
    pub fn constant_value(&self) -> Option<f64> {
        if self.contains_var() {
            return None;
        }
        self.evaluate(0.0).ok()
    }

    /// True when the expression is the constant zero.
    pub fn is_identically_zero(&self) -> bool {
        self.constant_value() == Some(0.0)
    }

    pub fn depth(&self) -> usize {
        match self {
            Expression::Const(_) | Expression::Var => 1,
            Expression::Unary(_, a) => 1 + a.depth(),
            Expression::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        self.eval_at(x, x)
    }

    fn eval_at(&self, x: f64, root_x: f64) -> Result<f64, EvalError> {
        let fail = |node: &Expression, arg: f64, reason: &str| EvalError {
            node: node.to_string(),
            arg,
            x: root_x,
            reason: reason.to_string(),
        };
        let value = match self {
            Expression::Const(c) => *c,
            Expression::Var => x,
            Expression::Unary(op, a) => {
                let av = a.eval_at(x, root_x)?;
                let v = match op {
                    UnaryOp::Neg => -av,
                    UnaryOp::Sin => av.sin(),
                    UnaryOp::Cos => av.cos(),
                    UnaryOp::Abs => av.abs(),
                    UnaryOp::Sgn => sgn(av),
                    UnaryOp::Exp => av.exp(),
                    _ => op.jet_at(av).map_err(|r| fail(self, av, r))?.0,
                };
                if !v.is_finite() && av.is_finite() {
                    return Err(fail(self, av, "non-finite result"));
                }
                v
            }
            Expression::Binary(op, a, b) => {
                let av = a.eval_at(x, root_x)?;
                let bv = b.eval_at(x, root_x)?;
                let v = match op {
                    BinaryOp::Add => av + bv,
                    BinaryOp::Sub => av - bv,
                    BinaryOp::Mul => av * bv,
                    BinaryOp::Div => {
                        if bv == 0.0 {
                            return Err(fail(self, bv, "division by zero"));
                        }
                        av / bv
                    }
                    BinaryOp::Pow => pow_checked(av, bv).map_err(|r| fail(self, av, r))?,
                };
                if !v.is_finite() && av.is_finite() && bv.is_finite() {
                    return Err(fail(self, av, "non-finite result"));
                }
                v
            }
        };
        Ok(value)
    }

    /// Evaluates the expression together with its first two derivatives
    /// with respect to whatever `x` depends on.
    pub fn evaluate_jet(&self, x: Jet) -> Result<Jet, EvalError> {
        self.jet_at(x, x.v)
    }

    fn jet_at(&self, x: Jet, root_x: f64) -> Result<Jet, EvalError> {
        let fail = |node: &Expression, arg: f64, reason: &str| EvalError {
            node: node.to_string(),
            arg,
            x: root_x,
            reason: reason.to_string(),
        };
        let out = match self {
            Expression::Const(c) => Jet::constant(*c),
            Expression::Var => x,
            Expression::Unary(op, a) => {
                let aj = a.jet_at(x, root_x)?;
                let (g, g1, g2) = op.jet_at(aj.v).map_err(|r| fail(self, aj.v, r))?;
                if aj.is_constant() {
                    Jet::constant(g)
                } else {
                    aj.chain(g, g1, g2)
                }
            }
            Expression::Binary(op, a, b) => {
                let aj = a.jet_at(x, root_x)?;
                let bj = b.jet_at(x, root_x)?;
                match op {
                    BinaryOp::Add => aj + bj,
                    BinaryOp::Sub => aj - bj,
                    BinaryOp::Mul => aj * bj,
                    BinaryOp::Div => {
                        if bj.v == 0.0 {
                            return Err(fail(self, bj.v, "division by zero"));
                        }
                        aj / bj
                    }
                    BinaryOp::Pow => {
                        let v = pow_checked(aj.v, bj.v).map_err(|r| fail(self, aj.v, r))?;
                        if bj.is_constant() {
                            let n = bj.v;
                            let g1 = if n == 0.0 { 0.0 } else { n * aj.v.powf(n - 1.0) };
                            let g2 = if n == 0.0 || n == 1.0 {
                                0.0
                            } else {
                                n * (n - 1.0) * aj.v.powf(n - 2.0)
                            };
                            aj.chain(v, g1, g2)
                        } else {
                            if aj.v <= 0.0 {
                                return Err(fail(self, aj.v, "variable exponent needs a positive base"));
                            }
                            (bj * aj.ln()).exp()
                        }
                    }
                }
            }
        };
        if !out.v.is_finite() {
            return Err(fail(self, root_x, "non-finite result"));
        }
        Ok(out)
    }

    pub fn differentiate(&self) -> Expression {
        diff::derivative(self)
    }
}

fn pow_checked(base: f64, exponent: f64) -> Result<f64, &'static str> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err("negative base with non-integer exponent");
    }
    if base == 0.0 && exponent < 0.0 {
        return Err("zero raised to a negative power");
    }
    Ok(base.powf(exponent))
}

fn write_const(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    if c.is_sign_negative() && c != 0.0 {
        write!(f, "(-{})", -c)
    } else {
        write!(f, "{}", c.abs())
    }
}

/// Fully parenthesized; re-parsing the output gives an evaluation-equivalent tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Const(c) => write_const(f, *c),
            Expression::Var => write!(f, "x"),
            Expression::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expression::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expression::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl serde::Serialize for Expression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
