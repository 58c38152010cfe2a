use proptest::prelude::*;
use szabo_core::symexpr::{Atom, Bindings, Expr, ParseContext};

// Small polynomials over x1..x3, a1 and the opaque atoms f(x1), g(x2, x3).
fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..=5).prop_map(Expr::int),
        (-4i64..=4, 1i64..=3).prop_map(|(p, q)| Expr::ratio(p, q)),
        (0usize..3).prop_map(Expr::var),
        Just(Expr::dir(0)),
        Just(Expr::func("f", &[0]).unwrap()),
        Just(Expr::func("g", &[1, 2]).unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner).prop_map(|(a, b)| a * b),
        ]
    })
}

// Polynomials in the chart variables only, for numeric checks.
fn plain_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-3i64..=3).prop_map(Expr::int), (0usize..3).prop_map(Expr::var)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner).prop_map(|(a, b)| a * b),
        ]
    })
}

fn context() -> ParseContext {
    let mut ctx = ParseContext::standard(3);
    ctx.declare("f", &[0]).unwrap();
    ctx.declare("g", &[1, 2]).unwrap();
    ctx
}

fn eval_at(e: &Expr, p: [f64; 3]) -> f64 {
    e.eval(|a| match a {
        Atom::Var(i) => p.get(*i as usize).copied(),
        _ => None,
    })
    .unwrap()
}

proptest! {
    #[test]
    fn addition_is_commutative_and_associative(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
    }

    #[test]
    fn multiplication_is_commutative_and_associative(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
    }

    #[test]
    fn multiplication_distributes(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
    }

    #[test]
    fn additive_inverse_and_units(a in expr()) {
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Expr::one(), a.clone());
        prop_assert!((&a * &Expr::zero()).is_zero());
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr(), v in 0usize..3) {
        prop_assert_eq!((&a * &b).diff(v), a.diff(v) * &b + &a * b.diff(v));
    }

    #[test]
    fn mixed_partials_commute(a in expr(), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(a.diff(i).diff(j), a.diff(j).diff(i));
    }

    #[test]
    fn print_parse_round_trip(a in expr()) {
        let ctx = context();
        let text = a.to_string();
        prop_assert_eq!(ctx.parse(&text).unwrap(), a);
    }

    #[test]
    fn derivative_matches_central_difference(
        a in plain_expr(),
        v in 0usize..3,
        p in prop::array::uniform3(-1.5f64..1.5),
    ) {
        let h = 1e-4;
        let mut lo = p;
        let mut hi = p;
        lo[v] -= h;
        hi[v] += h;
        let fd = (eval_at(&a, hi) - eval_at(&a, lo)) / (2.0 * h);
        let exact = eval_at(&a.diff(v), p);
        let scale = exact.abs().max(1.0);
        prop_assert!((fd - exact).abs() / scale < 1e-5, "fd {} exact {}", fd, exact);
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in plain_expr(), b in plain_expr(), p in prop::array::uniform3(-2.0f64..2.0)) {
        let (ea, eb) = (eval_at(&a, p), eval_at(&b, p));
        let prod = eval_at(&(&a * &b), p);
        prop_assert!((prod - ea * eb).abs() <= 1e-9 * (1.0 + prod.abs()));
        let zero = (&a + &b) * (&a - &b) - (a.pow(2) - b.pow(2));
        prop_assert!(zero.is_zero());
        prop_assert_eq!(eval_at(&zero, p), 0.0);
    }

    #[test]
    fn substitution_commutes_with_evaluation(a in plain_expr(), s in plain_expr(), p in prop::array::uniform3(-1.0f64..1.0)) {
        // Replace x1 by s, then evaluate; equals evaluating a with x1 := s(p).
        let sub = a.substitute(&Bindings::new().with(Atom::var(0), s.clone())).unwrap();
        let q = [eval_at(&s, p), p[1], p[2]];
        let lhs = eval_at(&sub, p);
        let rhs = eval_at(&a, q);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()), "{} vs {}", lhs, rhs);
    }
}

#[test]
fn substituting_an_opaque_function_resolves_its_derivatives() {
    let ctx = context();
    let e = ctx.parse("d2(f)(x1) * x2 + f(x1)").unwrap();
    let f = Atom::Func(ctx.function("f").unwrap());
    let out = e.substitute(&Bindings::new().with(f, ctx.parse("x1^3").unwrap())).unwrap();
    assert_eq!(out, ctx.parse("6*x1*x2 + x1^3").unwrap());
}
