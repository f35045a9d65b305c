use involute_core::expr::{eval_numeric, parse, Elementary, Expr, FunctionTable, NumericPoint, Symbol};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::integer),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Expr::symbol),
        Just(Expr::apply_symbols("F", &["x", "y"])),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.checked_div(&b).unwrap_or(a)),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| a.pow(k)),
            (inner.clone(), prop::sample::select(vec![Elementary::Sin, Elementary::Exp, Elementary::Tanh]))
                .prop_map(|(a, k)| Expr::elementary(k, a)),
        ]
    })
}

/// Polynomial-ish expressions that evaluate without poles near the origin.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    prop::sample::select(vec!["x", "y"]).prop_map(Expr::symbol).boxed().prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 1i64..=3).prop_map(|(a, k)| a * Expr::integer(k)),
            inner.clone().prop_map(|a| Expr::elementary(Elementary::Sin, a)),
            inner.prop_map(|a| Expr::elementary(Elementary::Exp, a * Expr::ratio(1, 4))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn print_parse_round_trip(a in expr()) {
        let shown = a.to_string();
        prop_assert_eq!(parse(&shown).unwrap(), a, "{}", shown);
    }

    #[test]
    fn mixed_partials_commute(a in expr()) {
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        prop_assert_eq!(a.diff(&x).diff(&y), a.diff(&y).diff(&x));
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr()) {
        let x = Symbol::new("x");
        prop_assert_eq!((&a * &b).diff(&x), a.diff(&x) * &b + &a * b.diff(&x));
    }

    #[test]
    fn derivative_matches_finite_difference(a in smooth_expr(), x0 in -0.5f64..0.5, y0 in -0.5f64..0.5) {
        let x = Symbol::new("x");
        let table = FunctionTable::new();
        let at = |xv: f64| -> NumericPoint {
            [(x.clone(), xv), (Symbol::new("y"), y0)].into_iter().collect()
        };
        let h = 1e-4;
        let fd = (eval_numeric(&a, &at(x0 + h), &table).unwrap() - eval_numeric(&a, &at(x0 - h), &table).unwrap()) / (2.0 * h);
        let exact = eval_numeric(&a.diff(&x), &at(x0), &table).unwrap();
        prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{} vs {}", fd, exact);
    }
}
