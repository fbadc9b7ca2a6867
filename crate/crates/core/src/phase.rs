//! Phase space of rotational solutions.
//!
//! The extended curvature map `f` equals `g` on `[alpha, inf)` and `g^{-1}` on
//! `(b, alpha)`. Orbits in the `(x, lambda)` half-plane satisfy
//! `x(lambda) = x0 exp int_{lambda0}^{lambda} dt / (f(t) - t)`, and the
//! classifying function `G(lambda) = lambda exp F(lambda)` decides which
//! orbits reach a singularity.
//!
//! Every integral is taken in a logarithmic variable: `t = alpha + e^s` on the
//! upper component, and `t = g(u)`, `u = alpha + e^s` on the lower one, so the
//! inverse `g^{-1}` never appears inside an integrand.

use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::numeric::quad::{integrate, QuadOptions};
use crate::wclass::{ClassError, EndValue, WeingartenClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.value() as i8)
    }
}

/// A point `(x, lambda)` of the phase region with the sign of `x'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub lambda: f64,
    pub epsilon: Sign,
}

impl PhasePoint {
    /// Validates `x > 0` and `lambda^2 x^2 <= 1` (up to rounding).
    pub fn new(x: f64, lambda: f64, epsilon: Sign) -> Result<Self, PhaseError> {
        if !(x > 0.0) || !x.is_finite() || !lambda.is_finite() || (lambda * x).powi(2) > 1.0 + 1e-12 {
            return Err(PhaseError::OutsideRegion { x, lambda });
        }
        Ok(PhasePoint { x, lambda, epsilon })
    }

    /// The point of the boundary `lambda x = +-1` at height `lambda`.
    pub fn on_gamma(lambda: f64, epsilon: Sign) -> Result<Self, PhaseError> {
        Self::new(1.0 / lambda.abs(), lambda, epsilon)
    }

    pub fn on_boundary(&self) -> bool {
        (self.lambda * self.x).abs() >= 1.0 - 1e-12
    }
}

/// The two connected components of `(b, inf) \ {alpha}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    /// `(alpha, inf)`
    Upper,
    /// `(b, alpha)`
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum End {
    PlusInfinity,
    AtB,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GLimit {
    /// `value` is the limit of the normalised `G`; `ln_abs = ln |value|`.
    Finite { value: f64, ln_abs: f64 },
    Infinite,
    Undetermined,
}

impl GLimit {
    pub fn is_finite(&self) -> bool {
        matches!(self, GLimit::Finite { .. })
    }
}

impl Serialize for GLimit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            GLimit::Finite { value, .. } => s.serialize_f64(value),
            GLimit::Infinite => s.serialize_str("inf"),
            GLimit::Undetermined => s.serialize_str("undetermined"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Membership {
    Regular,
    SingPlus,
    SingMinus,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhaseError {
    #[error("lambda = {lambda} is outside (b, inf)")]
    OutOfDomain { lambda: f64 },
    #[error("lambda = alpha is a singular point of 1/(f(t) - t)")]
    IntegrandBlowup,
    #[error("{l1} and {l2} lie in different components of (b, inf) minus alpha")]
    ComponentsMixed { l1: f64, l2: f64 },
    #[error("point (x = {x}, lambda = {lambda}) is outside the phase region")]
    OutsideRegion { x: f64, lambda: f64 },
    #[error("could not decide whether the limit of G at {end:?} is finite")]
    UndeterminedLimit { end: End },
    #[error("the orbit does not end at an isolated singularity")]
    NotSingular,
    #[error("quadrature did not converge (estimate {value}, error {error})")]
    Quadrature { value: f64, error: f64 },
    #[error(transparent)]
    Class(#[from] ClassError),
}

/// Equality slack in the singular-set inequality (logarithmic scale).
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Extended curvature map and the quantities derived from it.
#[derive(Debug)]
pub struct PhaseMap<'a> {
    class: &'a WeingartenClass,
    quad: QuadOptions,
    upper_limit: OnceLock<Result<GLimit, PhaseError>>,
    lower_limit: OnceLock<Result<GLimit, PhaseError>>,
}

impl<'a> PhaseMap<'a> {
    pub fn new(class: &'a WeingartenClass) -> Self {
        PhaseMap {
            class,
            quad: QuadOptions::default(),
            upper_limit: OnceLock::new(),
            lower_limit: OnceLock::new(),
        }
    }

    pub fn class(&self) -> &'a WeingartenClass {
        self.class
    }

    pub fn alpha(&self) -> f64 {
        self.class.alpha()
    }

    pub fn b(&self) -> EndValue {
        self.class.b()
    }

    pub fn component(&self, lambda: f64) -> Result<Component, PhaseError> {
        let alpha = self.alpha();
        if lambda.is_nan() || lambda <= self.b().value() {
            return Err(PhaseError::OutOfDomain { lambda });
        }
        if lambda == alpha {
            Err(PhaseError::IntegrandBlowup)
        } else if lambda > alpha {
            Ok(Component::Upper)
        } else {
            Ok(Component::Lower)
        }
    }

    /// `f(lambda)`: `g` on `[alpha, inf)`, `g^{-1}` on `(b, alpha)`.
    pub fn f(&self, lambda: f64) -> Result<f64, PhaseError> {
        if lambda.is_nan() || lambda <= self.b().value() || lambda == f64::INFINITY {
            return Err(PhaseError::OutOfDomain { lambda });
        }
        if lambda >= self.alpha() {
            Ok(self.class.g(lambda)?)
        } else {
            Ok(self.class.g_inverse(lambda)?)
        }
    }

    /// `rho = f(0)`, the curvature of the cylinder, when `0` is in the domain.
    pub fn rho(&self) -> Result<Option<f64>, PhaseError> {
        if self.b().value() >= 0.0 {
            return Ok(None);
        }
        self.f(0.0).map(Some)
    }

    /// The cylinder orbit `(1/|rho|, rho)`, present when `alpha != 0` and `b < 0`.
    pub fn cylinder_point(&self) -> Result<Option<PhasePoint>, PhaseError> {
        if self.alpha() == 0.0 {
            return Ok(None);
        }
        match self.rho()? {
            Some(rho) => Ok(Some(PhasePoint::on_gamma(rho, Sign::Plus)?)),
            None => Ok(None),
        }
    }

    /// Normalisation point of `F` on a component.
    pub fn lambda_ref(&self, comp: Component) -> f64 {
        let alpha = self.alpha();
        match comp {
            Component::Upper => alpha + 1.0,
            Component::Lower => alpha - (0.5 * (alpha - self.b().value())).min(1.0),
        }
    }

    /// Logarithmic coordinate of `lambda` on its component.
    fn s_of(&self, comp: Component, lambda: f64) -> Result<f64, PhaseError> {
        let alpha = self.alpha();
        Ok(match comp {
            Component::Upper => (lambda - alpha).ln(),
            Component::Lower => (self.class.g_inverse(lambda)? - alpha).ln(),
        })
    }

    /// `dF/ds` in the logarithmic coordinate of the component.
    fn df_ds(&self, comp: Component, s: f64) -> Result<f64, PhaseError> {
        let e = s.exp();
        let x = self.alpha() + e;
        Ok(match comp {
            Component::Upper => e / (self.class.g(x)? - x),
            Component::Lower => {
                let (g, dg) = self.class.g_and_prime(x)?;
                dg * e / (x - g)
            }
        })
    }

    /// `d ln|G| / ds`, used for the tails of `G`.
    fn dlng_ds(&self, comp: Component, s: f64) -> Result<f64, PhaseError> {
        let e = s.exp();
        let x = self.alpha() + e;
        Ok(match comp {
            Component::Upper => {
                let f = self.class.g(x)?;
                e * f / (x * (f - x))
            }
            Component::Lower => {
                let (g, dg) = self.class.g_and_prime(x)?;
                e * dg * x / (g * (x - g))
            }
        })
    }

    fn integrate_s(
        &self,
        integrand: impl Fn(f64) -> Result<f64, PhaseError>,
        s0: f64,
        s1: f64,
        abs_tol: f64,
    ) -> Result<f64, PhaseError> {
        let opts = QuadOptions {
            abs_tol,
            ..self.quad
        };
        let est = integrate(integrand, s0, s1, opts)?;
        if !est.converged && est.error > 1e-6 * (1.0 + est.value.abs()) {
            return Err(PhaseError::Quadrature {
                value: est.value,
                error: est.error,
            });
        }
        Ok(est.value)
    }

    /// `int_{lambda1}^{lambda2} dt / (f(t) - t)` within one component.
    pub fn f_integral(&self, lambda1: f64, lambda2: f64) -> Result<f64, PhaseError> {
        let comp = self.component(lambda1)?;
        if self.component(lambda2)? != comp {
            return Err(PhaseError::ComponentsMixed { l1: lambda1, l2: lambda2 });
        }
        if lambda1 == lambda2 {
            return Ok(0.0);
        }
        let s1 = self.s_of(comp, lambda1)?;
        let s2 = self.s_of(comp, lambda2)?;
        self.integrate_s(|s| self.df_ds(comp, s), s1, s2, self.quad.abs_tol)
    }

    /// Primitive `F` of `1/(f(t) - t)` with `F(lambda_ref) = 0`.
    pub fn f_primitive(&self, lambda: f64) -> Result<f64, PhaseError> {
        let comp = self.component(lambda)?;
        self.f_integral(self.lambda_ref(comp), lambda)
    }

    /// `ln |G(lambda)|`; `-inf` at `lambda = 0`.
    pub fn ln_abs_g(&self, lambda: f64) -> Result<f64, PhaseError> {
        Ok(lambda.abs().ln() + self.f_primitive(lambda)?)
    }

    /// `G(lambda) = lambda exp F(lambda)` under the fixed normalisation, extended
    /// by its limit `0` at `lambda = alpha = 0`.
    pub fn g_value(&self, lambda: f64) -> Result<f64, PhaseError> {
        if lambda == 0.0 && self.alpha() == 0.0 {
            // F ~ -c ln|t| with 0 < c < 1 near the umbilic value, so G -> 0.
            return Ok(0.0);
        }
        Ok(lambda * self.f_primitive(lambda)?.exp())
    }

    /// `G(lambda1) / G(lambda2)`, independent of the normalisation.
    pub fn g_ratio(&self, lambda1: f64, lambda2: f64) -> Result<f64, PhaseError> {
        Ok(lambda1 / lambda2 * self.f_integral(lambda2, lambda1)?.exp())
    }

    /// `x` along the orbit through `(x0, lambda0)`, as a graph over `lambda`.
    pub fn x_of_lambda(&self, x0: f64, lambda0: f64, lambda: f64) -> Result<f64, PhaseError> {
        Ok(x0 * self.f_integral(lambda0, lambda)?.exp())
    }

    /// Radius at which the orbit through `(x0, lambda0)` reaches `lambda = b`
    /// (finite `b`, lower component): the singular circle.
    pub fn x_at_b(&self, x0: f64, lambda0: f64) -> Result<f64, PhaseError> {
        if self.component(lambda0)? != Component::Lower || !self.b().is_finite() {
            return Err(PhaseError::NotSingular);
        }
        let s0 = self.s_of(Component::Lower, lambda0)?;
        let ln2 = std::f64::consts::LN_2;
        let block = |k: i32| -> Result<f64, PhaseError> {
            let a = s0 + f64::from(k - 4) * ln2;
            self.integrate_s(|s| self.df_ds(Component::Lower, s), a, a + ln2, 1e-15)
        };
        match tail_sum(block, 4, Some(true))? {
            Tail::Converged(sum) => Ok(x0 * sum.exp()),
            _ => Err(PhaseError::UndeterminedLimit { end: End::AtB }),
        }
    }

    /// Values of `lambda` where the orbit through `p` meets the boundary
    /// `|lambda| x = 1`: the nearest crossing below and above `lambda0` (in
    /// `lambda`). `None` on a side where the orbit runs into the end of its
    /// component instead.
    pub fn gamma_crossings(&self, p: &PhasePoint) -> Result<(Option<f64>, Option<f64>), PhaseError> {
        let comp = self.check_point(p)?;
        let c = self.orbit_constant(p)?;
        let alpha = self.alpha();
        let lambda_at = |s: f64| -> Result<f64, PhaseError> {
            let x = alpha + s.exp();
            Ok(match comp {
                Component::Upper => x,
                Component::Lower => self.class.g(x)?,
            })
        };
        // h = ln|lambda x| along the orbit; zero on the boundary.
        let h = |s: f64, f_val: f64| -> Result<f64, PhaseError> {
            Ok(lambda_at(s)?.abs().ln() + f_val + c)
        };
        let s0 = self.s_of(comp, p.lambda)?;
        let f0 = self.f_primitive(p.lambda)?;
        let mut found = [None, None];
        for (slot, dir) in [(0usize, 1.0f64), (1, -1.0)] {
            let (mut s, mut fv) = (s0, f0);
            let step = 0.125;
            let mut hit = None;
            while (s - s0).abs() < 80.0 {
                let s1 = s + dir * step;
                let f1 = fv + self.integrate_s(|t| self.df_ds(comp, t), s, s1, self.quad.abs_tol)?;
                if h(s1, f1)? >= 0.0 {
                    hit = Some((s, fv, s1));
                    break;
                }
                s = s1;
                fv = f1;
            }
            let Some((s_lo, f_lo, s_hi)) = hit else { continue };
            let (mut lo, mut hi) = (s_lo, s_hi);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let f_mid = f_lo + self.integrate_s(|t| self.df_ds(comp, t), s_lo, mid, self.quad.abs_tol)?;
                if h(mid, f_mid)? >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            found[slot] = Some(lambda_at(0.5 * (lo + hi))?);
        }
        // Increasing s raises lambda on the upper component and lowers it on
        // the lower one.
        let (up_s, down_s) = (found[0], found[1]);
        Ok(match comp {
            Component::Upper => (down_s, up_s),
            Component::Lower => (up_s, down_s),
        })
    }

    /// `d(lambda x)/d lambda = x f / (f - lambda)` along an orbit.
    pub fn d_lambda_x(&self, x: f64, lambda: f64) -> Result<f64, PhaseError> {
        let f = self.f(lambda)?;
        Ok(x * f / (f - lambda))
    }

    /// Limit of `G` at `+inf` or at `b`. Cached per map.
    pub fn g_limit(&self, end: End) -> Result<GLimit, PhaseError> {
        let cell = match end {
            End::PlusInfinity => &self.upper_limit,
            End::AtB => &self.lower_limit,
        };
        cell.get_or_init(|| match end {
            End::PlusInfinity => self.upper_tail(),
            End::AtB => self.lower_tail(),
        })
        .clone()
    }

    fn upper_tail(&self) -> Result<GLimit, PhaseError> {
        let hint = match (self.b(), self.class.tail_exponent()) {
            (EndValue::Finite(_), _) => Some(true),
            (EndValue::NegInfinity, Some(p)) => Some(p < 1.0),
            (EndValue::NegInfinity, None) => None,
        };
        if hint == Some(false) {
            return Ok(GLimit::Infinite);
        }
        let alpha = self.alpha();
        let scale = alpha.abs() + 1.0;
        let k0 = 4;
        let lam0 = 2f64.powi(k0) * scale;
        let base = self.ln_abs_g(lam0)?;
        let block = |k: i32| -> Result<f64, PhaseError> {
            let lo = 2f64.powi(k) * scale;
            let s0 = (lo - alpha).ln();
            let s1 = (2.0 * lo - alpha).ln();
            self.integrate_s(|s| self.dlng_ds(Component::Upper, s), s0, s1, 1e-15)
        };
        Ok(match tail_sum(block, k0, hint)? {
            Tail::Converged(sum) => {
                let ln_abs = base + sum;
                GLimit::Finite {
                    value: ln_abs.exp(),
                    ln_abs,
                }
            }
            Tail::Divergent => GLimit::Infinite,
            Tail::Unknown => GLimit::Undetermined,
        })
    }

    fn lower_tail(&self) -> Result<GLimit, PhaseError> {
        let alpha = self.alpha();
        let scale = alpha.abs() + 1.0;
        let b = self.b();
        if b == EndValue::Finite(0.0) {
            return Ok(GLimit::Finite {
                value: 0.0,
                ln_abs: f64::NEG_INFINITY,
            });
        }
        let hint = match (b, self.class.tail_exponent()) {
            (EndValue::Finite(_), _) => Some(true),
            (EndValue::NegInfinity, Some(p)) => Some(p > 1.0),
            (EndValue::NegInfinity, None) => None,
        };
        if hint == Some(false) {
            return Ok(GLimit::Infinite);
        }
        // Start beyond the zero of g, where G vanishes on the lower component.
        let mut k0 = 4;
        if alpha > 0.0 {
            if let Some(rho) = self.rho()? {
                while 2f64.powi(k0) * scale < 2.0 * rho {
                    k0 += 1;
                }
            }
        }
        let u0 = 2f64.powi(k0) * scale;
        let s_ref = self.s_of(Component::Lower, self.lambda_ref(Component::Lower))?;
        let s0 = (u0 - alpha).ln();
        let f0 = self.integrate_s(|s| self.df_ds(Component::Lower, s), s_ref, s0, self.quad.abs_tol)?;
        let finite_b = b.is_finite();
        let base = if finite_b {
            b.value().abs().ln() + f0
        } else {
            self.class.g(u0)?.abs().ln() + f0
        };
        let block = |k: i32| -> Result<f64, PhaseError> {
            let lo = 2f64.powi(k) * scale;
            let s0 = (lo - alpha).ln();
            let s1 = (2.0 * lo - alpha).ln();
            if finite_b {
                self.integrate_s(|s| self.df_ds(Component::Lower, s), s0, s1, 1e-15)
            } else {
                self.integrate_s(|s| self.dlng_ds(Component::Lower, s), s0, s1, 1e-15)
            }
        };
        let sign = if finite_b { b.value().signum() } else { -1.0 };
        Ok(match tail_sum(block, k0, hint)? {
            Tail::Converged(sum) => {
                let ln_abs = base + sum;
                GLimit::Finite {
                    value: sign * ln_abs.exp(),
                    ln_abs,
                }
            }
            Tail::Divergent => GLimit::Infinite,
            Tail::Unknown => GLimit::Undetermined,
        })
    }

    /// `ln(|lambda0 x0| / |G(lambda0)|) = ln x0 - F(lambda0)`, well defined at `lambda0 = 0`.
    fn orbit_constant(&self, p: &PhasePoint) -> Result<f64, PhaseError> {
        Ok(p.x.ln() - self.f_primitive(p.lambda)?)
    }

    fn check_point(&self, p: &PhasePoint) -> Result<Component, PhaseError> {
        if (p.lambda * p.x).powi(2) > 1.0 + 1e-12 || !(p.x > 0.0) {
            return Err(PhaseError::OutsideRegion { x: p.x, lambda: p.lambda });
        }
        self.component(p.lambda)
    }

    /// Log-scale margin `ln(|lambda0 x0| |G(end)| / |G(lambda0)|)` of the
    /// singular-set inequality; `None` when the relevant limit is infinite.
    pub fn membership_margin(&self, p: &PhasePoint) -> Result<Option<f64>, PhaseError> {
        let comp = self.check_point(p)?;
        let end = match comp {
            Component::Upper => End::PlusInfinity,
            Component::Lower => End::AtB,
        };
        match self.g_limit(end)? {
            GLimit::Infinite => Ok(None),
            GLimit::Undetermined => Err(PhaseError::UndeterminedLimit { end }),
            GLimit::Finite { ln_abs, .. } => Ok(Some(self.orbit_constant(p)? + ln_abs)),
        }
    }

    /// Whether the orbit through `p` ends at a singularity.
    pub fn sing_membership(&self, p: &PhasePoint) -> Result<Membership, PhaseError> {
        let comp = self.check_point(p)?;
        match self.membership_margin(p)? {
            Some(m) if m <= MEMBERSHIP_SLACK => Ok(match comp {
                Component::Upper => Membership::SingPlus,
                Component::Lower => Membership::SingMinus,
            }),
            _ => Ok(Membership::Regular),
        }
    }

    /// Limit angle `nu0` of the normal at the isolated singularity reached by
    /// the orbit through `p` (the `x -> 0` end).
    pub fn limit_angle(&self, p: &PhasePoint) -> Result<f64, PhaseError> {
        let comp = self.check_point(p)?;
        if comp == Component::Lower && self.b().is_finite() {
            return Err(PhaseError::NotSingular);
        }
        match self.membership_margin(p)? {
            Some(m) if m <= MEMBERSHIP_SLACK => {
                let q = (2.0 * m.min(0.0)).exp();
                Ok(p.epsilon.value() * (1.0 - q).max(0.0).sqrt())
            }
            _ => Err(PhaseError::NotSingular),
        }
    }
}

enum Tail {
    Converged(f64),
    Divergent,
    Unknown,
}

/// Sums block integrals `I_k`, `k >= k0`, deciding convergence from their
/// decay. `hint` short-circuits the divergence test when known.
fn tail_sum(
    mut block: impl FnMut(i32) -> Result<f64, PhaseError>,
    k0: i32,
    hint: Option<bool>,
) -> Result<Tail, PhaseError> {
    let k_check = k0.max(30);
    let k_last = k_check.max(60);
    let mut blocks = Vec::new();
    let mut sum = 0.0;
    for k in k0..=k_last {
        let v = block(k)?;
        blocks.push(v);
        sum += v;
        if k < k0 + 8 {
            continue;
        }
        let n = blocks.len();
        if n < 7 {
            continue;
        }
        let last = &blocks[n - 6..];
        if last.iter().all(|&v| v == 0.0) {
            return Ok(Tail::Converged(sum));
        }
        let ratios: Vec<f64> = last.windows(2).map(|w| w[1] / w[0]).collect();
        let r = ratios[ratios.len() - 1];
        let decaying = ratios.iter().all(|&q| q.is_finite() && q > 0.0 && q < 0.9);
        if decaying {
            let tail = blocks[n - 1] * r / (1.0 - r);
            if tail.abs() < 1e-10 {
                return Ok(Tail::Converged(sum + tail));
            }
        }
        if k >= k_check && hint.is_none() && ratios.iter().all(|&q| q >= 0.9) {
            return Ok(Tail::Divergent);
        }
    }
    let n = blocks.len();
    let r = blocks[n - 1] / blocks[n - 2];
    if hint == Some(true) {
        let tail = if r.is_finite() && r.abs() < 1.0 {
            blocks[n - 1] * r / (1.0 - r)
        } else {
            0.0
        };
        return Ok(Tail::Converged(sum + tail));
    }
    Ok(Tail::Unknown)
}

impl From<std::convert::Infallible> for PhaseError {
    fn from(e: std::convert::Infallible) -> Self {
        match e {}
    }
}
