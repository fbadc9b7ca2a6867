use super::{add, div, mul, neg, pow, sub, unary, BinaryOp, Expr, UnaryOp};

impl Expr {
    /// Symbolic derivative with respect to `x`.
    ///
    /// Only constant folding is applied to the result. `abs` differentiates to
    /// `sign`, which fails to evaluate at its kink.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Unary(op, u) => {
                let du = u.differentiate();
                let u = (**u).clone();
                match op {
                    UnaryOp::Neg => neg(du),
                    UnaryOp::Exp => mul(unary(UnaryOp::Exp, u), du),
                    UnaryOp::Log => div(du, u),
                    UnaryOp::Sqrt => div(du, mul(Expr::Const(2.0), unary(UnaryOp::Sqrt, u))),
                    UnaryOp::Abs => mul(unary(UnaryOp::Sign, u), du),
                    UnaryOp::Sign => Expr::Const(0.0),
                }
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate();
                let db = b.differentiate();
                let a = (**a).clone();
                let b = (**b).clone();
                match op {
                    BinaryOp::Add => add(da, db),
                    BinaryOp::Sub => sub(da, db),
                    BinaryOp::Mul => add(mul(da, b), mul(a, db)),
                    BinaryOp::Div => {
                        if db == Expr::Const(0.0) {
                            return div(da, b);
                        }
                        div(sub(mul(da, b.clone()), mul(a, db)), pow(b, 2.0))
                    }
                }
            }
            Expr::Pow(u, n) => {
                let du = u.differentiate();
                mul(mul(Expr::Const(*n), pow((**u).clone(), n - 1.0)), du)
            }
        }
    }

    /// The `n`-th derivative, obtained by repeated differentiation.
    pub fn nth_derivative(&self, n: usize) -> Expr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.differentiate();
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn d_at(text: &str, x: f64) -> f64 {
        parse(text).unwrap().differentiate().eval_at(x).unwrap()
    }

    fn central_difference(text: &str, x: f64) -> f64 {
        let e = parse(text).unwrap();
        let h = 1e-5;
        (e.eval_at(x + h).unwrap() - e.eval_at(x - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn linear_relation_has_constant_slope() {
        for x in [-3.0, 0.0, 0.5, 10.0] {
            assert_eq!(d_at("2 - x", x), -1.0);
        }
    }

    #[test]
    fn reciprocal_power_rule() {
        assert!((d_at("1/x", 2.0) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_h_equals_k_slope_at_origin() {
        let v = d_at("-x/(x+1)", 0.0);
        assert!((v + 1.0).abs() < 1e-15);
        assert!((v - central_difference("-x/(x+1)", 0.0)).abs() < 1e-9);
    }

    #[test]
    fn abs_kink_is_a_domain_error() {
        let d = parse("abs(x)").unwrap().differentiate();
        assert_eq!(d.eval_at(-2.0).unwrap(), -1.0);
        assert_eq!(d.eval_at(3.0).unwrap(), 1.0);
        assert!(d.eval_at(0.0).is_err());
    }

    #[test]
    fn higher_derivatives_of_cubic() {
        let e = parse("-x - x^3").unwrap();
        assert_eq!(e.nth_derivative(1).eval_at(0.0).unwrap(), -1.0);
        assert_eq!(e.nth_derivative(2).eval_at(0.0).unwrap(), 0.0);
        assert_eq!(e.nth_derivative(3).eval_at(0.0).unwrap(), -6.0);
        assert_eq!(e.nth_derivative(4).eval_at(0.3).unwrap(), 0.0);
    }

    #[test]
    fn composite_functions_match_finite_differences() {
        for (text, x) in [
            ("exp(-x)*sqrt(x)", 1.3),
            ("log(1 + x^2)/x", 0.7),
            ("abs(x - 2)^1.5", 0.4),
            ("(x + 1)^(-0.5) - 3*x", 2.0),
        ] {
            let sym = d_at(text, x);
            let fd = central_difference(text, x);
            assert!((sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()), "{text}: {sym} vs {fd}");
        }
    }
}
