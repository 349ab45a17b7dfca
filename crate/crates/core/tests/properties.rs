use approx::assert_relative_eq;
use ermakov_audit::expr::{parse, BinaryOp, Expression, UnaryOp};
use ermakov_audit::systems::{from_polar, to_polar, CartesianState, ErmakovSystem};
use proptest::prelude::*;

fn leaf(nonneg: bool) -> BoxedStrategy<Expression> {
    let c = if nonneg { (0.0..10.0f64).boxed() } else { (-10.0..10.0f64).boxed() };
    prop_oneof![Just(Expression::Var), c.prop_map(Expression::Const)].boxed()
}

/// Any expression of depth at most 8 over the full node set.
fn any_expr(nonneg: bool) -> impl Strategy<Value = Expression> {
    leaf(nonneg).prop_recursive(7, 64, 2, |inner| {
        let unary = prop::sample::select(
            [&[UnaryOp::Neg][..], &UnaryOp::FUNCTIONS[..]].concat(),
        );
        let binary = prop::sample::select(vec![BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow]);
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, a)| Expression::Unary(op, Box::new(a))),
            (binary, inner.clone(), inner).prop_map(|(op, a, b)| Expression::Binary(op, Box::new(a), Box::new(b))),
        ]
    })
}

/// Smooth expressions on the whole real line, kept shallow so derivatives stay moderate.
fn smooth_expr() -> impl Strategy<Value = Expression> {
    let leaf = prop_oneof![Just(Expression::Var), (-2.0..2.0f64).prop_map(Expression::Const)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let unary = prop::sample::select(vec![UnaryOp::Neg, UnaryOp::Sin, UnaryOp::Cos]);
        let binary = prop::sample::select(vec![BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul]);
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, a)| Expression::Unary(op, Box::new(a))),
            (binary, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expression::Binary(op, Box::new(a), Box::new(b))),
            (inner, 0u8..4).prop_map(|(a, n)| Expression::Binary(BinaryOp::Pow, Box::new(a), Box::new(Expression::Const(n as f64)))),
        ]
    })
}

fn same_value(a: &Expression, b: &Expression, x: f64) -> bool {
    match (a.evaluate(x), b.evaluate(x)) {
        (Ok(p), Ok(q)) => p == q || (p.is_nan() && q.is_nan()),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

fn five_point(e: &Expression, x: f64, h: f64) -> f64 {
    let f = |t: f64| e.evaluate(t).unwrap();
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

proptest! {
    #[test]
    fn display_parse_round_trip(e in any_expr(true)) {
        prop_assert!(e.depth() <= 8);
        let back = parse(&e.to_string()).unwrap();
        prop_assert_eq!(&back, &e);
    }

    #[test]
    fn round_trip_preserves_values(e in any_expr(false), x in -3.0..3.0f64) {
        let back = parse(&e.to_string()).unwrap();
        prop_assert!(same_value(&back, &e, x));
        prop_assert_eq!(parse(&back.to_string()).unwrap(), back);
    }

    #[test]
    fn derivative_matches_finite_difference(e in smooth_expr(), x in -1.5..1.5f64) {
        let d = e.differentiate().evaluate(x).unwrap();
        let fd = five_point(&e, x, 1e-3);
        let scale = 1.0 + d.abs() + e.evaluate(x).unwrap().abs();
        prop_assert!((d - fd).abs() < 1e-6 * scale, "{} at {}: {} vs {}", e, x, d, fd);
    }

    #[test]
    fn polar_round_trip(
        r in 0.1..10.0f64,
        quadrant in 0u8..4,
        offset in 0.05..(std::f64::consts::FRAC_PI_2 - 0.05),
        vx in -5.0..5.0f64,
        vy in -5.0..5.0f64,
    ) {
        let theta = quadrant as f64 * std::f64::consts::FRAC_PI_2 + offset;
        let st = CartesianState::new(0.3, r * theta.cos(), r * theta.sin(), vx, vy);
        let back = from_polar(&to_polar(&st).unwrap());
        assert_relative_eq!(back.x, st.x, epsilon = 1e-12, max_relative = 1e-12);
        assert_relative_eq!(back.y, st.y, epsilon = 1e-12, max_relative = 1e-12);
        assert_relative_eq!(back.vx, st.vx, epsilon = 1e-12, max_relative = 1e-12);
        assert_relative_eq!(back.vy, st.vy, epsilon = 1e-12, max_relative = 1e-12);
        prop_assert_eq!(back.t, st.t);
    }
}

#[test]
fn polar_identity_on_thousand_states() {
    let toy = ErmakovSystem::toy();
    for st in ermakov_audit::systems::random_states(1000, 7) {
        let polar = to_polar(&st).unwrap();
        assert_relative_eq!(polar.angular_momentum(), st.angular_momentum(), max_relative = 1e-12);
        let (a, b) = toy.polar_identity_residual(&st).unwrap();
        assert!(a < 1e-10 && b < 1e-10);
    }
}
