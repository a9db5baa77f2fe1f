use affine_qe::expr::{integer, parse_scalar, Expr, ZeroTest};
use proptest::prelude::*;

fn xs() -> Vec<String> {
    vec!["x1".into(), "x2".into(), "x3".into()]
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(0usize..3).prop_map(Expr::coord), (-5i64..=5).prop_map(Expr::int)]
}

/// Polynomials built from sums, products and small powers.
fn poly() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner, 0i32..3).prop_map(|(a, n)| a.powi(n).unwrap()),
        ]
    })
}

/// Rational functions with a denominator that stays away from zero on the positive box.
fn ratfunc() -> impl Strategy<Value = Expr> {
    (poly(), poly()).prop_map(|(a, b)| {
        let den = Expr::int(2).add(&b.mul(&b));
        a.checked_div(&den).unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..1.4, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixed_partials_commute(e in ratfunc(), i in 0usize..3, j in 0usize..3) {
        let d = e.diff(i).diff(j).sub(&e.diff(j).diff(i));
        prop_assert_eq!(d.zero_test(), ZeroTest::Zero);
    }

    #[test]
    fn derivative_matches_central_difference(e in poly(), i in 0usize..3, p in point()) {
        let h = 1e-5;
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus[i] += h;
        minus[i] -= h;
        let fd = (e.eval_float(&plus).unwrap() - e.eval_float(&minus).unwrap()) / (2.0 * h);
        let exact = e.diff(i).eval_float(&p).unwrap();
        let scale = exact.abs().max(1.0);
        prop_assert!((fd - exact).abs() <= 1e-5 * scale, "fd {} exact {}", fd, exact);
    }

    #[test]
    fn print_parse_round_trip(e in ratfunc()) {
        let back = parse_scalar(&e.to_string(), &xs()).unwrap();
        prop_assert_eq!(e.sub(&back).zero_test(), ZeroTest::Zero);
    }

    #[test]
    fn transcendental_round_trip(e in poly(), k in -3i64..=3) {
        let t = Expr::exp(&e.scale(&integer(k)).checked_div(&Expr::int(7)).unwrap())
            .mul(&Expr::log(&Expr::int(3).add(&e.mul(&e))));
        let back = parse_scalar(&t.to_string(), &xs()).unwrap();
        prop_assert!(t.sub(&back).zero_test().is_zero());
    }

    #[test]
    fn exact_and_float_evaluation_agree(e in ratfunc(), p in prop::collection::vec(-20i64..20, 3)) {
        let exact: Vec<_> = p.iter().map(|&v| integer(v) / integer(7)).collect();
        let float: Vec<f64> = p.iter().map(|&v| v as f64 / 7.0).collect();
        let a = num_traits::ToPrimitive::to_f64(&e.eval_exact(&exact).unwrap()).unwrap();
        let b = e.eval_float(&float).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
