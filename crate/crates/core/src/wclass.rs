//! Elliptic Weingarten classes `k2 = g(k1)` with `g' < 0`.
//!
//! A [`WeingartenClass`] is always stored in the half-line normal form where
//! `g` is defined on `[alpha, +inf)`, `g(alpha) = alpha` and `g` decreases to
//! the end value `b = g(+inf) < alpha`. Relations entered on a bounded
//! interval `[alpha, b_hat)` with `g -> -inf` at `b_hat` are re-oriented by
//! `x -> -g^{-1}(-x)`.

use serde::{Serialize, Serializer};

use crate::expr::{self, EvalError, Expr, Params};
use crate::numeric::roots::{bisect, newton_bracketed, RootError};

/// Value of `g` at `+inf`: finite or `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndValue {
    Finite(f64),
    NegInfinity,
}

impl EndValue {
    pub fn is_finite(self) -> bool {
        matches!(self, EndValue::Finite(_))
    }

    /// The value as an `f64`, with `-inf` for [`EndValue::NegInfinity`].
    pub fn value(self) -> f64 {
        match self {
            EndValue::Finite(b) => b,
            EndValue::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

impl Serialize for EndValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            EndValue::Finite(b) => s.serialize_f64(b),
            EndValue::NegInfinity => s.serialize_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TriState {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassError {
    #[error("relation is not elliptic: g'({x}) = {slope} is not negative")]
    NotElliptic { x: f64, slope: f64 },
    #[error("g(x) - x has no sign change on the search bracket")]
    NoFixedPoint,
    #[error(
        "g appears to blow up between x = {lo} and x = {hi}; \
         if the relation lives on [alpha, b) with g -> -inf at b, pass that b as `blowup`"
    )]
    SuspectedBlowup { lo: f64, hi: f64 },
    #[error("could not decide whether g(+inf) is finite; supply `b_hint`")]
    EndValueUndetermined,
    #[error("{y} is outside the range (b, alpha] of g")]
    OutOfRange { y: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn root_err(e: RootError<ClassError>) -> ClassError {
    match e {
        RootError::NoSignChange { .. } => ClassError::NoFixedPoint,
        RootError::Eval(e) => e,
    }
}

/// User-facing construction options.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassOptions {
    /// Exclusive lower bound of the domain of `g` (e.g. `0` for `1/x`).
    pub domain_min: Option<f64>,
    /// Finite blow-up point `b_hat` of a relation given on `[alpha, b_hat)`.
    pub blowup: Option<f64>,
    /// Analytic end value, overriding the numeric estimate.
    pub b_hint: Option<EndValue>,
    /// Exponent `p` of the tail `g(x) ~ C x^p` (of `g - b` when `b` is finite).
    pub tail_exponent: Option<f64>,
    /// Sampling horizon for the ellipticity and tail checks.
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Relation {
    Direct { g: Expr, dg: Expr },
    /// `x -> -h^{-1}(-x)` for `h` on `[h_alpha, blowup)`.
    Reoriented {
        h: Expr,
        dh: Expr,
        h_alpha: f64,
        blowup: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeingartenClass {
    relation: Relation,
    alpha: f64,
    b: EndValue,
    tail_exponent: Option<f64>,
    lambda_max: f64,
    uniformly_elliptic: TriState,
    label: String,
}

impl WeingartenClass {
    /// Builds a class from an expression with all parameters already bound.
    pub fn build(g: Expr, opts: &ClassOptions) -> Result<Self, ClassError> {
        if let Some(name) = g.free_params().into_iter().next() {
            return Err(EvalError::UnboundParameter(name).into());
        }
        let label = g.to_string();
        let (relation, alpha, b_numeric) = match opts.blowup {
            None => {
                let alpha = fixed_point(&g, opts.domain_min, None)?;
                let dg = g.differentiate();
                (Relation::Direct { g, dg }, alpha, None)
            }
            Some(blowup) => {
                let h_alpha = fixed_point(&g, opts.domain_min, Some(blowup))?;
                if h_alpha >= blowup {
                    return Err(ClassError::InvalidParameter(format!(
                        "blow-up point {blowup} must exceed the fixed point {h_alpha}"
                    )));
                }
                let dh = g.differentiate();
                let rel = Relation::Reoriented {
                    h: g,
                    dh,
                    h_alpha,
                    blowup,
                };
                (rel, -h_alpha, Some(EndValue::Finite(-blowup)))
            }
        };
        let lambda_max = opts.lambda_max.unwrap_or(alpha + 2f64.powi(40));
        if !(lambda_max > alpha + 1.0) {
            return Err(ClassError::InvalidParameter(format!(
                "lambda_max = {lambda_max} must exceed alpha + 1"
            )));
        }
        let mut class = WeingartenClass {
            relation,
            alpha,
            b: EndValue::NegInfinity,
            tail_exponent: opts.tail_exponent,
            lambda_max,
            uniformly_elliptic: TriState::Undetermined,
            label,
        };
        let samples = class.check_ellipticity()?;
        class.b = match (opts.b_hint, b_numeric) {
            (Some(hint), _) => hint,
            (None, Some(b)) => b,
            (None, None) => estimate_end_value(alpha, &samples)?,
        };
        if class.b.value() >= alpha {
            return Err(ClassError::InvalidParameter(format!(
                "end value {} must be below alpha = {alpha}",
                class.b.value()
            )));
        }
        class.uniformly_elliptic = class.classify_uniformity(&samples);
        Ok(class)
    }

    /// Parses and builds in one go.
    pub fn from_text(text: &str, opts: &ClassOptions) -> Result<Self, ClassError> {
        let g = expr::parse(text).map_err(|e| ClassError::InvalidParameter(e.to_string()))?;
        Self::build(g, opts)
    }

    /// Named preset with analytic `alpha`, `b` and tail exponent.
    pub fn preset(name: &str, params: &[f64]) -> Result<Self, ClassError> {
        let want = |n: usize| -> Result<(), ClassError> {
            if params.len() != n {
                return Err(ClassError::InvalidParameter(format!(
                    "preset `{name}` takes {n} parameter(s), got {}",
                    params.len()
                )));
            }
            Ok(())
        };
        let parse_bound = |text: &str, a: f64| -> Expr {
            let e = expr::parse_with_params(text, &["a"]).expect("preset expression parses");
            let mut p = Params::new();
            p.insert("a".into(), a);
            e.bind(&p)
        };
        let (g, alpha, b, p, label) = match name {
            "cmc" => {
                want(1)?;
                let a = params[0];
                if !(a > 0.0) {
                    return Err(ClassError::InvalidParameter("cmc needs alpha > 0".into()));
                }
                (parse_bound("2*a - x", a), a, EndValue::NegInfinity, 1.0, format!("cmc({a})"))
            }
            "cgc" => {
                want(1)?;
                let a = params[0];
                if !(a > 0.0) {
                    return Err(ClassError::InvalidParameter("cgc needs alpha > 0".into()));
                }
                (parse_bound("a^2/x", a), a, EndValue::Finite(0.0), -1.0, format!("cgc({a})"))
            }
            "linear" => {
                want(1)?;
                let a = params[0];
                if !(a < 0.0) {
                    return Err(ClassError::InvalidParameter("linear needs a < 0".into()));
                }
                (parse_bound("a*x", a), 0.0, EndValue::NegInfinity, 1.0, format!("linear({a})"))
            }
            "two_h_eq_k" => {
                want(0)?;
                let g = expr::parse("-x/(x+1)").expect("preset expression parses");
                (g, 0.0, EndValue::Finite(-1.0), -1.0, "two_h_eq_k".to_string())
            }
            "minimal" => {
                want(0)?;
                let g = expr::parse("-x").expect("preset expression parses");
                (g, 0.0, EndValue::NegInfinity, 1.0, "minimal".to_string())
            }
            _ => {
                return Err(ClassError::InvalidParameter(format!(
                    "unknown preset `{name}` (expected cmc, cgc, linear, two_h_eq_k, minimal)"
                )))
            }
        };
        let dg = g.differentiate();
        let mut class = WeingartenClass {
            relation: Relation::Direct { g, dg },
            alpha,
            b,
            tail_exponent: Some(p),
            lambda_max: alpha + 2f64.powi(40),
            uniformly_elliptic: TriState::Undetermined,
            label,
        };
        let samples = class.check_ellipticity()?;
        class.uniformly_elliptic = class.classify_uniformity(&samples);
        Ok(class)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn b(&self) -> EndValue {
        self.b
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn is_uniformly_elliptic(&self) -> TriState {
        self.uniformly_elliptic
    }

    /// Human-readable description of the relation.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The expression for `g` when the relation is stored directly.
    pub fn g_expr(&self) -> Option<&Expr> {
        match &self.relation {
            Relation::Direct { g, .. } => Some(g),
            Relation::Reoriented { .. } => None,
        }
    }

    /// The expression for `g'` when the relation is stored directly.
    pub fn g_prime_expr(&self) -> Option<&Expr> {
        match &self.relation {
            Relation::Direct { dg, .. } => Some(dg),
            Relation::Reoriented { .. } => None,
        }
    }

    pub fn is_reoriented(&self) -> bool {
        matches!(self.relation, Relation::Reoriented { .. })
    }

    pub fn g(&self, x: f64) -> Result<f64, ClassError> {
        match &self.relation {
            Relation::Direct { g, .. } => Ok(g.eval_at(x)?),
            Relation::Reoriented { .. } => Ok(-self.h_inverse(-x)?),
        }
    }

    pub fn g_prime(&self, x: f64) -> Result<f64, ClassError> {
        match &self.relation {
            Relation::Direct { dg, .. } => Ok(dg.eval_at(x)?),
            Relation::Reoriented { dh, .. } => {
                let u = self.h_inverse(-x)?;
                Ok(1.0 / dh.eval_at(u)?)
            }
        }
    }

    /// `g` and `g'` together (one inversion for re-oriented relations).
    pub fn g_and_prime(&self, x: f64) -> Result<(f64, f64), ClassError> {
        match &self.relation {
            Relation::Direct { g, dg } => Ok((g.eval_at(x)?, dg.eval_at(x)?)),
            Relation::Reoriented { dh, .. } => {
                let u = self.h_inverse(-x)?;
                Ok((-u, 1.0 / dh.eval_at(u)?))
            }
        }
    }

    /// The unique `x >= alpha` with `g(x) = y`, for `y` in `(b, alpha]`.
    pub fn g_inverse(&self, y: f64) -> Result<f64, ClassError> {
        if !(y <= self.alpha && y > self.b.value()) {
            return Err(ClassError::OutOfRange { y });
        }
        if y == self.alpha {
            return Ok(self.alpha);
        }
        if let Relation::Reoriented { h, .. } = &self.relation {
            // g^{-1}(y) = -h(-y) for the re-oriented form.
            return Ok(-h.eval_at(-y)?);
        }
        let alpha = self.alpha;
        let gap = alpha - y;
        // Bracket within a factor of two of the root, starting from the gap.
        let mut d = gap;
        while self.g(alpha + d)? < y {
            d *= 0.5;
            if alpha + d == alpha {
                break;
            }
        }
        let mut lo = if alpha + d == alpha { alpha } else { alpha + d };
        let hi = loop {
            let cand = alpha + d;
            if !cand.is_finite() {
                return Err(ClassError::OutOfRange { y });
            }
            if self.g(cand)? < y {
                break cand;
            }
            lo = cand;
            d *= 2.0;
        };
        // Relative to the gap so that values of y close to alpha keep their digits.
        let tol = (1e-13 * gap).max(4.0 * f64::EPSILON * (y.abs() + alpha.abs())).max(f64::MIN_POSITIVE);
        newton_bracketed(|x| Ok(self.g_and_prime(x).map(|(v, d)| (v - y, d))?), lo, hi, tol)
            .map_err(root_err)
    }

    /// Inverse of the user relation `h` on `[h_alpha, blowup)`.
    fn h_inverse(&self, y: f64) -> Result<f64, ClassError> {
        let Relation::Reoriented {
            h,
            dh,
            h_alpha,
            blowup,
        } = &self.relation
        else {
            unreachable!("h_inverse on a direct relation")
        };
        if y > *h_alpha {
            return Err(ClassError::OutOfRange { y: -y });
        }
        if y == *h_alpha {
            return Ok(*h_alpha);
        }
        let width = blowup - h_alpha;
        let mut hi = None;
        for k in 1..=60 {
            let cand = blowup - width * 2f64.powi(-k);
            if cand <= *h_alpha {
                break;
            }
            match h.eval_at(cand) {
                Ok(v) if v < y => {
                    hi = Some(cand);
                    break;
                }
                Ok(_) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let hi = hi.ok_or(ClassError::OutOfRange { y: -y })?;
        let tol = 1e-13 * (1.0 + y.abs());
        newton_bracketed(
            |x| Ok((h.eval_at(x)? - y, dh.eval_at(x)?)),
            *h_alpha,
            hi,
            tol,
        )
        .map_err(root_err)
    }

    /// Samples `(x, g(x), g'(x))` on a geometric grid over `[alpha, lambda_max]`
    /// and rejects non-elliptic or discontinuous relations.
    fn check_ellipticity(&self) -> Result<Vec<(f64, f64, f64)>, ClassError> {
        let alpha = self.alpha;
        let span = self.lambda_max - alpha;
        let top = span.log2().floor() as i32;
        let mut xs: Vec<f64> = (-20..=top).map(|j| alpha + 2f64.powi(j)).collect();
        if (alpha + 2f64.powi(top)) < self.lambda_max {
            xs.push(self.lambda_max);
        }
        let mut out = Vec::with_capacity(xs.len() + 1);
        let mut prev: Option<(f64, f64)> = None;
        for x in std::iter::once(alpha).chain(xs) {
            let sample = self.g_and_prime(x);
            let (v, d) = match sample {
                Ok(s) => s,
                Err(ClassError::Eval(e)) => {
                    if let Some((px, _)) = prev {
                        return Err(ClassError::SuspectedBlowup { lo: px, hi: x });
                    }
                    return Err(e.into());
                }
                Err(e) => return Err(e),
            };
            if !(d < 0.0) {
                if x == alpha {
                    // One-sided derivative at alpha may be undefined.
                    continue;
                }
                return Err(ClassError::NotElliptic { x, slope: d });
            }
            if let Some((px, pv)) = prev {
                if v >= pv {
                    return Err(ClassError::SuspectedBlowup { lo: px, hi: x });
                }
            }
            prev = Some((x, v));
            out.push((x, v, d));
        }
        let g_alpha = self.g(alpha)?;
        if (g_alpha - alpha).abs() > 1e-10 * (1.0 + alpha.abs()) {
            return Err(ClassError::NoFixedPoint);
        }
        Ok(out)
    }

    fn classify_uniformity(&self, samples: &[(f64, f64, f64)]) -> TriState {
        if self.b.is_finite() {
            // Bounded decreasing g forces g' -> 0 along a sequence.
            return TriState::No;
        }
        if let Some(p) = self.tail_exponent {
            if p != 1.0 {
                return TriState::No;
            }
        }
        let slopes: Vec<f64> = samples.iter().map(|s| s.2.abs()).collect();
        let n = slopes.len();
        if n < 12 {
            return TriState::Undetermined;
        }
        let tail = &slopes[n - 10..];
        let (lo, hi) = tail
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
        let first = slopes[0];
        if tail[9] < 1e-6 * first || tail[9] > 1e6 * first {
            return TriState::No;
        }
        if hi <= 1.01 * lo {
            return TriState::Yes;
        }
        if self.tail_exponent == Some(1.0) {
            return TriState::Yes;
        }
        TriState::Undetermined
    }
}

/// Unique root of `g(x) - x` on the open interval `(lo, hi)`.
fn fixed_point(g: &Expr, lo: Option<f64>, hi: Option<f64>) -> Result<f64, ClassError> {
    let h = |x: f64| -> Result<f64, ClassError> { Ok(g.eval_at(x)? - x) };
    let anchor = match (lo, hi) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) => a + 1.0,
        (None, Some(b)) => b - 1.0,
        (None, None) => 0.0,
    };
    let probe = |k: i32, toward_lo: bool| -> f64 {
        match (toward_lo, lo, hi) {
            (true, Some(a), _) => a + (anchor - a) * 2f64.powi(-k),
            (true, None, _) => anchor - 2f64.powi(k),
            (false, _, Some(b)) => b - (b - anchor) * 2f64.powi(-k),
            (false, _, None) => anchor + 2f64.powi(k),
        }
    };
    let h0 = h(anchor)?;
    if h0 == 0.0 {
        return Ok(anchor);
    }
    let toward_lo = h0 < 0.0;
    for k in 0..=60 {
        let x = probe(k, toward_lo);
        let v = h(x)?;
        if v == 0.0 {
            return Ok(x);
        }
        if (v > 0.0) != (h0 > 0.0) {
            let (a, b) = if toward_lo { (x, anchor) } else { (anchor, x) };
            return bisect(h, a, b).map_err(root_err);
        }
    }
    Err(ClassError::NoFixedPoint)
}

/// Estimates `g(+inf)` from samples on the geometric grid.
fn estimate_end_value(alpha: f64, samples: &[(f64, f64, f64)]) -> Result<EndValue, ClassError> {
    let vals: Vec<f64> = samples
        .iter()
        .filter(|s| s.0 >= alpha + 1.0)
        .map(|s| s.1)
        .collect();
    let n = vals.len();
    if n < 8 {
        return Err(ClassError::EndValueUndetermined);
    }
    let diffs: Vec<f64> = vals.windows(2).map(|w| w[0] - w[1]).collect();
    let m = diffs.len();
    let last = vals[n - 1];
    let snap = |b: f64| if b.abs() <= 1e-9 * (1.0 + alpha.abs()) { 0.0 } else { b };
    if diffs[m - 1] < 1e-9 * (1.0 + last.abs()) {
        let (d1, d2) = (diffs[m - 2], diffs[m - 1]);
        let b = if d1 > d2 && d2 > 0.0 {
            last - d2 * d2 / (d1 - d2)
        } else {
            last
        };
        return Ok(EndValue::Finite(snap(b)));
    }
    let ratios: Vec<f64> = diffs[m - 6..].windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|&r| r >= 0.999) {
        return Ok(EndValue::NegInfinity);
    }
    let r_max = ratios.iter().cloned().fold(0.0, f64::max);
    let r_min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    if r_max < 0.95 && r_max - r_min < 0.05 {
        let r = ratios[ratios.len() - 1];
        return Ok(EndValue::Finite(snap(last - diffs[m - 1] * r / (1.0 - r))));
    }
    Err(ClassError::EndValueUndetermined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> WeingartenClass {
        WeingartenClass::from_text(text, &ClassOptions::default()).unwrap()
    }

    #[test]
    fn cmc_from_expression() {
        let c = build("2 - x");
        assert!((c.alpha() - 1.0).abs() < 1e-12);
        assert_eq!(c.b(), EndValue::NegInfinity);
        assert_eq!(c.is_uniformly_elliptic(), TriState::Yes);
    }

    #[test]
    fn cgc_needs_positive_domain() {
        let opts = ClassOptions {
            domain_min: Some(0.0),
            ..Default::default()
        };
        let c = WeingartenClass::from_text("1/x", &opts).unwrap();
        assert!((c.alpha() - 1.0).abs() < 1e-12);
        assert_eq!(c.b(), EndValue::Finite(0.0));
        assert_eq!(c.is_uniformly_elliptic(), TriState::No);
    }

    #[test]
    fn two_h_equals_k_end_value() {
        let c = build("-x/(x+1)");
        assert!(c.alpha().abs() < 1e-12);
        match c.b() {
            EndValue::Finite(b) => assert!((b + 1.0).abs() < 1e-9, "{b}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inverse_examples() {
        let cmc = WeingartenClass::preset("cmc", &[1.0]).unwrap();
        assert!((cmc.g_inverse(0.0).unwrap() - 2.0).abs() < 1e-12);
        let k = WeingartenClass::preset("two_h_eq_k", &[]).unwrap();
        assert!((k.g_inverse(-0.5).unwrap() - 1.0).abs() < 1e-12);
        let cgc = WeingartenClass::preset("cgc", &[1.0]).unwrap();
        assert!(matches!(cgc.g_inverse(-1.0), Err(ClassError::OutOfRange { .. })));
        assert!(matches!(cgc.g_inverse(1.5), Err(ClassError::OutOfRange { .. })));
        assert!((cgc.g_inverse(1e-6).unwrap() - 1e6).abs() < 1e-4);
    }

    #[test]
    fn inverse_keeps_relative_accuracy_near_alpha() {
        let c = build("-x - x^3");
        for y in [-1e-9, -1e-15, -1e-40, -1e-200] {
            let x = c.g_inverse(y).unwrap();
            assert!((x / -y - 1.0).abs() < 1e-12, "{y}: {x}");
        }
    }

    #[test]
    fn uniformity_of_linear_and_cubic() {
        assert_eq!(build("-2*x").is_uniformly_elliptic(), TriState::Yes);
        assert_eq!(build("-x - x^3").is_uniformly_elliptic(), TriState::No);
    }

    #[test]
    fn presets_carry_exact_data() {
        let c = WeingartenClass::preset("linear", &[-0.5]).unwrap();
        assert_eq!(c.alpha(), 0.0);
        assert_eq!(c.g(2.0).unwrap(), -1.0);
        let m = WeingartenClass::preset("minimal", &[]).unwrap();
        assert_eq!(m.g(-3.0).unwrap(), 3.0);
        assert!(WeingartenClass::preset("linear", &[1.0]).is_err());
        assert!(WeingartenClass::preset("cgc", &[-1.0]).is_err());
        assert!(WeingartenClass::preset("cmc", &[]).is_err());
        assert!(WeingartenClass::preset("helicoid", &[]).is_err());
    }

    #[test]
    fn increasing_relation_is_rejected() {
        let e = WeingartenClass::from_text("x/2 + 1", &ClassOptions::default()).unwrap_err();
        assert!(matches!(e, ClassError::NotElliptic { .. }), "{e:?}");
    }

    #[test]
    fn blowup_without_hint_is_flagged() {
        let e = WeingartenClass::from_text("1/(x - 2)", &ClassOptions::default()).unwrap_err();
        assert!(matches!(e, ClassError::SuspectedBlowup { .. }), "{e:?}");
    }

    #[test]
    fn blowup_relation_is_reoriented() {
        // h = 1/(x-2) on [1 - sqrt 2, 2) has fixed point 1 - sqrt 2.
        let opts = ClassOptions {
            blowup: Some(2.0),
            ..Default::default()
        };
        let c = WeingartenClass::from_text("1/(x - 2)", &opts).unwrap();
        assert!((c.alpha() - (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert_eq!(c.b(), EndValue::Finite(-2.0));
        assert!(c.is_reoriented());
        // g(x) = -h^{-1}(-x) = -(2 - 1/x) for x > 0.
        for x in [0.5, 1.0, 3.0, 100.0] {
            let want = -(2.0 - 1.0 / x);
            assert!((c.g(x).unwrap() - want).abs() < 1e-11, "{x}");
            assert!((c.g_prime(x).unwrap() + 1.0 / (x * x)).abs() < 1e-9);
        }
        assert!((c.g_inverse(-1.5).unwrap() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn unbound_parameters_are_rejected() {
        let g = expr::parse_with_params("a - x", &["a"]).unwrap();
        assert!(matches!(
            WeingartenClass::build(g, &ClassOptions::default()),
            Err(ClassError::Eval(EvalError::UnboundParameter(_)))
        ));
    }
}
