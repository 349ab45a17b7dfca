//! Symbolic differentiation with light constant folding.

use super::{BinaryOp, Expression, UnaryOp};

fn c(v: f64) -> Expression {
    Expression::Const(v)
}

fn un(op: UnaryOp, a: Expression) -> Expression {
    if let Expression::Const(v) = a {
        if let Ok(out) = Expression::Unary(op, Box::new(c(v))).evaluate(0.0) {
            return c(out);
        }
    }
    if op == UnaryOp::Neg {
        if let Expression::Unary(UnaryOp::Neg, inner) = a {
            return *inner;
        }
    }
    Expression::Unary(op, Box::new(a))
}

fn neg(a: Expression) -> Expression {
    un(UnaryOp::Neg, a)
}

fn add(a: Expression, b: Expression) -> Expression {
    match (&a, &b) {
        (Expression::Const(x), Expression::Const(y)) => c(x + y),
        (Expression::Const(x), _) if *x == 0.0 => b,
        (_, Expression::Const(y)) if *y == 0.0 => a,
        _ => Expression::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expression, b: Expression) -> Expression {
    match (&a, &b) {
        (Expression::Const(x), Expression::Const(y)) => c(x - y),
        (Expression::Const(x), _) if *x == 0.0 => neg(b),
        (_, Expression::Const(y)) if *y == 0.0 => a,
        _ => Expression::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expression, b: Expression) -> Expression {
    match (&a, &b) {
        (Expression::Const(x), Expression::Const(y)) => c(x * y),
        (Expression::Const(x), _) | (_, Expression::Const(x)) if *x == 0.0 => c(0.0),
        (Expression::Const(x), _) if *x == 1.0 => b,
        (_, Expression::Const(y)) if *y == 1.0 => a,
        (Expression::Const(x), _) if *x == -1.0 => neg(b),
        (_, Expression::Const(y)) if *y == -1.0 => neg(a),
        _ => Expression::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Expression, b: Expression) -> Expression {
    match (&a, &b) {
        (Expression::Const(x), Expression::Const(y)) if *y != 0.0 => c(x / y),
        (Expression::Const(x), _) if *x == 0.0 => c(0.0),
        (_, Expression::Const(y)) if *y == 1.0 => a,
        _ => Expression::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expression, b: Expression) -> Expression {
    match (&a, &b) {
        (_, Expression::Const(y)) if *y == 1.0 => a,
        (_, Expression::Const(y)) if *y == 0.0 => c(1.0),
        _ => Expression::Binary(BinaryOp::Pow, Box::new(a), Box::new(b)),
    }
}

pub(super) fn derivative(e: &Expression) -> Expression {
    match e {
        Expression::Const(_) => c(0.0),
        Expression::Var => c(1.0),
        Expression::Unary(op, a) => {
            let da = derivative(a);
            let a = (**a).clone();
            let outer = match op {
                UnaryOp::Neg => return neg(da),
                UnaryOp::Sin => un(UnaryOp::Cos, a),
                UnaryOp::Cos => neg(un(UnaryOp::Sin, a)),
                UnaryOp::Tan => pow(un(UnaryOp::Sec, a), c(2.0)),
                UnaryOp::Cot => neg(pow(un(UnaryOp::Csc, a), c(2.0))),
                UnaryOp::Sec => mul(un(UnaryOp::Sec, a.clone()), un(UnaryOp::Tan, a)),
                UnaryOp::Csc => neg(mul(un(UnaryOp::Csc, a.clone()), un(UnaryOp::Cot, a))),
                UnaryOp::Exp => un(UnaryOp::Exp, a),
                UnaryOp::Ln => return div(da, a),
                UnaryOp::Sqrt => return div(da, mul(c(2.0), un(UnaryOp::Sqrt, a))),
                // abs'(0) := 0 through sgn(0) = 0
                UnaryOp::Abs => un(UnaryOp::Sgn, a),
                UnaryOp::Sgn => return c(0.0),
            };
            mul(outer, da)
        }
        Expression::Binary(op, a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinaryOp::Add => add(da, db),
                BinaryOp::Sub => sub(da, db),
                BinaryOp::Mul => add(mul(da, b.clone()), mul(a, db)),
                BinaryOp::Div => div(
                    sub(mul(da, b.clone()), mul(a, db)),
                    pow(b, c(2.0)),
                ),
                BinaryOp::Pow => {
                    if !b.contains_var() {
                        let lowered = sub(b.clone(), c(1.0));
                        mul(mul(b, pow(a, lowered)), da)
                    } else if !a.contains_var() {
                        mul(mul(pow(a.clone(), b), un(UnaryOp::Ln, a)), db)
                    } else {
                        let e = pow(a.clone(), b.clone());
                        let inner = add(
                            mul(db, un(UnaryOp::Ln, a.clone())),
                            div(mul(b, da), a),
                        );
                        mul(e, inner)
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn d_at(src: &str, x: f64) -> f64 {
        parse(src).unwrap().differentiate().evaluate(x).unwrap()
    }

    #[test]
    fn cube_rule() {
        for x in [0.5, 1.0, 2.0, -3.0] {
            assert!((d_at("x^3", x) - 3.0 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn tan_minus_cot() {
        for x in [0.3f64, 0.7, 1.2] {
            let expected = 1.0 / x.cos().powi(2) + 1.0 / x.sin().powi(2);
            assert!((d_at("tan(x) - cot(x)", x) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn product_against_central_difference() {
        let e = parse("sin(x)*cos(x)").unwrap();
        let x = 0.7;
        let h = 1e-6;
        let fd = (e.evaluate(x + h).unwrap() - e.evaluate(x - h).unwrap()) / (2.0 * h);
        assert!((e.differentiate().evaluate(x).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn abs_derivative_at_zero_is_zero() {
        assert_eq!(d_at("abs(x)", 0.0), 0.0);
        assert_eq!(d_at("abs(x)", -2.0), -1.0);
        assert_eq!(d_at("abs(x)", 2.0), 1.0);
    }

    #[test]
    fn variable_exponent() {
        let x: f64 = 1.3;
        let expected = x.powf(x) * (x.ln() + 1.0);
        assert!((d_at("x^x", x) - expected).abs() < 1e-12);
        assert!((d_at("2^x", x) - 2f64.powf(x) * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn constants_fold_away() {
        assert_eq!(parse("3").unwrap().differentiate().to_string(), "0");
        assert_eq!(parse("x").unwrap().differentiate().to_string(), "1");
        assert_eq!(parse("2*x").unwrap().differentiate().to_string(), "2");
    }
}
