use proptest::prelude::*;

use weingarten_core::expr::{self, parse, Expr, UnaryOp};
use weingarten_core::phase::{Component, PhaseMap, PhasePoint, Sign};
use weingarten_core::profile::{integrate_profile, ProfileOptions};
use weingarten_core::wclass::WeingartenClass;

/// Expressions that are smooth and finite for every real `x`.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::var()),
        (-3.0f64..3.0).prop_map(|c| Expr::constant((c * 100.0).round() / 100.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let one_plus_sq = |e: Expr| expr::add(Expr::constant(1.0), expr::mul(e.clone(), e));
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| expr::div(a, one_plus_sq(b))),
            inner.clone().prop_map(move |a| expr::unary(UnaryOp::Log, one_plus_sq(a))),
            inner.clone().prop_map(move |a| expr::unary(UnaryOp::Sqrt, one_plus_sq(a))),
            inner
                .clone()
                .prop_map(move |a| expr::unary(UnaryOp::Exp, expr::div(a.clone(), one_plus_sq(a)))),
            (inner.clone(), 2u32..4).prop_map(|(a, n)| expr::pow(a, n as f64)),
            inner.prop_map(expr::neg),
        ]
    })
}

fn richardson(e: &Expr, x: f64) -> Option<f64> {
    let d = |h: f64| -> Option<f64> { Some((e.eval_at(x + h).ok()? - e.eval_at(x - h).ok()?) / (2.0 * h)) };
    let (d1, d2) = (d(1e-3)?, d(5e-4)?);
    Some((4.0 * d2 - d1) / 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn derivative_matches_finite_differences(e in smooth_expr(), x in 0.5f64..2.0) {
        let exact = e.differentiate().eval_at(x);
        let fd = richardson(&e, x);
        prop_assume!(exact.is_ok() && fd.is_some());
        let (exact, fd) = (exact.unwrap(), fd.unwrap());
        prop_assume!(exact.is_finite() && exact.abs() < 1e6);
        prop_assert!((exact - fd).abs() <= 1e-5 * (1.0 + exact.abs()), "{e}: {exact} vs {fd}");
    }

    #[test]
    fn print_then_parse_is_a_fixed_point(e in smooth_expr(), x in -2.0f64..2.0) {
        let first = parse(&e.to_string()).unwrap();
        let text = first.to_string();
        let second = parse(&text).unwrap();
        prop_assert_eq!(&second, &first);
        prop_assert_eq!(second.to_string(), text);
        if let (Ok(a), Ok(b)) = (e.eval_at(x), first.eval_at(x)) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}

fn presets() -> Vec<WeingartenClass> {
    [
        ("cmc", vec![1.0]),
        ("cgc", vec![1.0]),
        ("linear", vec![-0.5]),
        ("linear", vec![-2.0]),
        ("two_h_eq_k", vec![]),
        ("minimal", vec![]),
    ]
    .into_iter()
    .map(|(n, p)| WeingartenClass::preset(n, &p).unwrap())
    .collect()
}

/// A point of the open interval `(b, +inf)` from `u` in `(0, 1)`.
fn lambda_in_domain(c: &WeingartenClass, u: f64) -> f64 {
    let alpha = c.alpha();
    let b = c.b().value();
    if u < 0.5 {
        let t = u / 0.5;
        if b.is_finite() {
            b + (alpha - b) * (0.02 + 0.96 * t)
        } else {
            alpha - 20.0 * (1.0 - t) - 1e-2
        }
    } else {
        alpha + 1e-2 + 20.0 * (u - 0.5)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extended_f_is_an_involution(k in 0usize..6, u in 0.01f64..0.99) {
        let c = &presets()[k];
        let pm = PhaseMap::new(c);
        let l = lambda_in_domain(c, u);
        let back = pm.f(pm.f(l).unwrap()).unwrap();
        prop_assert!((back - l).abs() <= 1e-9 * (1.0 + l.abs()), "{}: {l} -> {back}", c.label());
    }

    #[test]
    fn g_inverse_inverts(k in 0usize..6, u in 0.01f64..0.49) {
        let c = &presets()[k];
        let y = lambda_in_domain(c, u);
        let x = c.g_inverse(y).unwrap();
        prop_assert!(x >= c.alpha());
        prop_assert!((c.g(x).unwrap() - y).abs() <= 1e-9 * (1.0 + y.abs()));
    }

    #[test]
    fn orbits_are_monotone_graphs(k in 0usize..6, u in 0.01f64..0.99, v in 0.05f64..0.95, w in 0.01f64..0.99) {
        let c = &presets()[k];
        let pm = PhaseMap::new(c);
        let l0 = lambda_in_domain(c, u);
        let x0 = v / l0.abs().max(1e-3);
        let comp = pm.component(l0).unwrap();
        let l1 = lambda_in_domain(c, w);
        prop_assume!(pm.component(l1).unwrap() == comp && (l1 - l0).abs() > 1e-6);
        let x1 = pm.x_of_lambda(x0, l0, l1).unwrap();
        let increasing = (x1 - x0) * (l1 - l0) > 0.0;
        match comp {
            Component::Upper => prop_assert!(!increasing),
            Component::Lower => prop_assert!(increasing),
        }
    }
}

fn interp(samples: &[(f64, f64, f64)], s: f64) -> (f64, f64) {
    let k = samples.partition_point(|q| q.0 < s).clamp(1, samples.len() - 1);
    let (a, b) = (samples[k - 1], samples[k]);
    let t = (s - a.0) / (b.0 - a.0);
    (a.1 + t * (b.1 - a.1), a.2 + t * (b.2 - a.2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The generating curve is symmetric under reflection in the horizontal
    /// plane through a point of vertical tangency.
    #[test]
    fn profile_reflects_at_vertical_tangents(k in 0usize..3, u in 0.0f64..1.0, d in 0.05f64..0.4) {
        let (c, lambda) = match k {
            0 => (WeingartenClass::preset("cmc", &[1.0]).unwrap(), 2.1 + 2.0 * u),
            1 => (WeingartenClass::preset("cgc", &[1.0]).unwrap(), 1.2 + 2.0 * u),
            _ => (WeingartenClass::preset("linear", &[-0.5]).unwrap(), 0.3 + 2.0 * u),
        };
        let start = PhasePoint::on_gamma(lambda, Sign::Plus).unwrap();
        let opts = ProfileOptions { s_max: 4.0, ..Default::default() };
        let p = integrate_profile(&c, start, 0.0, &opts).unwrap();
        let pts: Vec<(f64, f64, f64)> = p.samples.iter().map(|q| (q.s, q.x, q.z)).collect();
        let s_lo = pts.first().unwrap().0;
        let s_hi = pts.last().unwrap().0;
        let d = d * s_hi.min(-s_lo);
        prop_assume!(d > 1e-3);
        let (xa, za) = interp(&pts, d);
        let (xb, zb) = interp(&pts, -d);
        prop_assert!((xa - xb).abs() < 1e-4, "x {xa} vs {xb}");
        prop_assert!((za + zb).abs() < 1e-4, "z {za} vs {zb}");
    }
}
