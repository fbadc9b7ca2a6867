//! Generating curves `(x(s), z(s))` of rotational surfaces in a class.
//!
//! The profile is integrated in arc length with the tangent angle `theta` as
//! state: `x' = cos theta`, `z' = sin theta`, `theta' = f(sin theta / x)`.
//! Then `lambda = sin theta / x`, `mu = theta'` and `epsilon = sign cos theta`.
//! Crossings of the boundary `lambda^2 x^2 = 1` are ordinary points of this
//! system; they are located as sign changes of `cos theta`. Near `lambda = b`
//! the curve is continued as a graph over `lambda`, and catenoid-like ends
//! as graphs over `ln x`.

pub mod io;
pub mod mesh;

use serde::Serialize;

use crate::numeric::fd;
use crate::numeric::ode::{dp_step, OdeError, OdeOptions, Stepper};
use crate::phase::{PhaseError, PhaseMap, PhasePoint, Sign};
use crate::wclass::{ClassError, EndValue, TriState, WeingartenClass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub lambda: f64,
    pub mu: f64,
    pub epsilon: Sign,
}

impl Sample {
    /// Unit tangent `(x', z')`.
    pub fn tangent(&self) -> (f64, f64) {
        let sin = (self.lambda * self.x).clamp(-1.0, 1.0);
        (self.epsilon.value() * (1.0 - sin * sin).sqrt(), sin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum EndpointKind {
    RegularContinuation,
    AxisSingularity { nu0: f64, z_limit: f64 },
    CircleSingularity { radius: f64, z_limit: f64 },
    Truncated { reason: String },
}

impl EndpointKind {
    pub fn is_singular(&self) -> bool {
        matches!(
            self,
            EndpointKind::AxisSingularity { .. } | EndpointKind::CircleSingularity { .. }
        )
    }
}

/// A point where the profile has a vertical tangent (`lambda x = +-1`); the
/// curve is symmetric about the plane `z = z` through it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaEvent {
    pub s: f64,
    pub x: f64,
    pub z: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCurve {
    pub samples: Vec<Sample>,
    pub left_end: EndpointKind,
    pub right_end: EndpointKind,
    pub period_z: Option<f64>,
    pub events: Vec<GammaEvent>,
}

impl ProfileCurve {
    pub fn min_x(&self) -> f64 {
        self.samples.iter().map(|p| p.x).fold(f64::INFINITY, f64::min)
    }

    pub fn z_extent(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.z), b.max(p.z)));
        hi - lo
    }

    pub fn has_singular_end(&self) -> bool {
        self.left_end.is_singular() || self.right_end.is_singular()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    pub rtol: f64,
    pub atol: f64,
    pub s_max: f64,
    pub x_min_stop: f64,
    /// Relative distance to `b` at which integration stops.
    pub lambda_b_stop: f64,
    /// Largest arc-length step, which also bounds the sample spacing.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            rtol: 1e-10,
            atol: 1e-12,
            s_max: 1e3,
            x_min_stop: 1e-8,
            lambda_b_stop: 1e-8,
            h_max: 0.01,
            max_steps: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("start (x = {x}, lambda = {lambda}) is outside the phase region")]
    StartOutsideRegion { x: f64, lambda: f64 },
    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

impl From<ClassError> for ProfileError {
    fn from(e: ClassError) -> Self {
        ProfileError::Phase(e.into())
    }
}

/// Integrates the profile through `start`, placed at height `z0` and `s = 0`.
pub fn integrate_profile(
    class: &WeingartenClass,
    start: PhasePoint,
    z0: f64,
    opts: &ProfileOptions,
) -> Result<ProfileCurve, ProfileError> {
    integrate_profile_with(&PhaseMap::new(class), start, z0, opts)
}

/// As [`integrate_profile`], reusing the caches of an existing phase map.
pub fn integrate_profile_with(
    pm: &PhaseMap<'_>,
    start: PhasePoint,
    z0: f64,
    opts: &ProfileOptions,
) -> Result<ProfileCurve, ProfileError> {
    for (name, v) in [
        ("rtol", opts.rtol),
        ("atol", opts.atol),
        ("s_max", opts.s_max),
        ("x_min_stop", opts.x_min_stop),
        ("lambda_b_stop", opts.lambda_b_stop),
        ("h_max", opts.h_max),
    ] {
        if !(v > 0.0) {
            return Err(ProfileError::InvalidOption(format!("{name} must be positive")));
        }
    }
    let (x0, l0) = (start.x, start.lambda);
    if !(x0 > 0.0) || (l0 * x0).powi(2) > 1.0 + 1e-12 || l0 <= pm.b().value() || !l0.is_finite() {
        return Err(ProfileError::StartOutsideRegion { x: x0, lambda: l0 });
    }
    let alpha = pm.alpha();
    if (l0 - alpha).abs() <= 1e-12 * (1.0 + alpha.abs()) {
        return Ok(umbilic(alpha, start, z0, opts));
    }
    if let Some(c) = pm.cylinder_point()? {
        if (l0 - c.lambda).abs() <= 1e-12 * (1.0 + c.lambda.abs()) && (x0 - c.x).abs() <= 1e-12 * c.x {
            return Ok(cylinder(c, z0, opts));
        }
    }
    Tracer::new(pm, start, z0, opts).trace()
}

fn umbilic(alpha: f64, p: PhasePoint, z0: f64, opts: &ProfileOptions) -> ProfileCurve {
    let n = 1024;
    let mut samples = Vec::with_capacity(n + 1);
    if alpha == 0.0 {
        // Horizontal plane, from the axis outwards.
        let c = p.epsilon.value();
        let (s_lo, s_hi) = if c > 0.0 { (-p.x, opts.s_max) } else { (-opts.s_max, p.x) };
        for i in 0..=n {
            let s = s_lo + (s_hi - s_lo) * i as f64 / n as f64;
            samples.push(Sample {
                s,
                x: (p.x + c * s).max(0.0),
                z: z0,
                lambda: 0.0,
                mu: 0.0,
                epsilon: p.epsilon,
            });
        }
    } else {
        // Round sphere of radius 1/|alpha|.
        let sin0 = (alpha * p.x).clamp(-1.0, 1.0);
        let cos0 = p.epsilon.value() * (1.0 - sin0 * sin0).sqrt();
        let th0 = sin0.atan2(cos0);
        let r1 = -th0 / alpha;
        let r2 = (alpha.signum() * std::f64::consts::PI - th0) / alpha;
        let (s_lo, s_hi) = (r1.min(r2), r1.max(r2));
        for i in 0..=n {
            let s = s_lo + (s_hi - s_lo) * i as f64 / n as f64;
            let th = th0 + alpha * s;
            samples.push(Sample {
                s,
                x: (th.sin() / alpha).max(0.0),
                z: z0 - (th.cos() - cos0) / alpha,
                lambda: alpha,
                mu: alpha,
                epsilon: Sign::of(th.cos()),
            });
        }
    }
    ProfileCurve {
        samples,
        left_end: EndpointKind::RegularContinuation,
        right_end: EndpointKind::RegularContinuation,
        period_z: None,
        events: Vec::new(),
    }
}

fn cylinder(c: PhasePoint, z0: f64, opts: &ProfileOptions) -> ProfileCurve {
    let n = 256;
    let half = opts.s_max.min(4.0 * c.x);
    let dir = c.lambda.signum();
    let samples = (0..=n)
        .map(|i| {
            let s = -half + 2.0 * half * i as f64 / n as f64;
            Sample {
                s,
                x: c.x,
                z: z0 + dir * s,
                lambda: c.lambda,
                mu: 0.0,
                epsilon: Sign::Plus,
            }
        })
        .collect();
    ProfileCurve {
        samples,
        left_end: EndpointKind::RegularContinuation,
        right_end: EndpointKind::RegularContinuation,
        period_z: None,
        events: Vec::new(),
    }
}

struct Branch {
    samples: Vec<Sample>,
    events: Vec<GammaEvent>,
    end: EndpointKind,
    period_z: Option<f64>,
}

struct Tracer<'a, 'b> {
    pm: &'a PhaseMap<'b>,
    start: PhasePoint,
    z0: f64,
    opts: ProfileOptions,
    theta0: f64,
    on_gamma: bool,
}

type State = [f64; 3];

impl<'a, 'b> Tracer<'a, 'b> {
    fn new(pm: &'a PhaseMap<'b>, start: PhasePoint, z0: f64, opts: &ProfileOptions) -> Self {
        let sin = (start.lambda * start.x).clamp(-1.0, 1.0);
        let on_gamma = sin.abs() >= 1.0 - 1e-12;
        let theta0 = if on_gamma {
            sin.signum() * std::f64::consts::FRAC_PI_2
        } else {
            sin.atan2(start.epsilon.value() * (1.0 - sin * sin).sqrt())
        };
        Tracer {
            pm,
            start,
            z0,
            opts: *opts,
            theta0,
            on_gamma,
        }
    }

    fn ode_options(&self, h_max: f64) -> OdeOptions {
        OdeOptions {
            rtol: self.opts.rtol,
            atol: self.opts.atol,
            h_min: 1e-15,
            h_max,
        }
    }

    fn rhs(&self, y: &State) -> Result<State, PhaseError> {
        let x = y[0];
        let (sin, cos) = y[2].sin_cos();
        if !(x > 0.0) {
            return Err(PhaseError::OutsideRegion { x, lambda: f64::NAN });
        }
        let mu = self.pm.f(sin / x)?;
        Ok([cos, sin, mu])
    }

    fn sample(&self, s: f64, y: &State) -> Result<Sample, PhaseError> {
        let lambda = y[2].sin() / y[0];
        Ok(Sample {
            s,
            x: y[0],
            z: y[1],
            lambda,
            mu: self.pm.f(lambda)?,
            epsilon: Sign::of(y[2].cos()),
        })
    }

    fn trace(&self) -> Result<ProfileCurve, ProfileError> {
        let y0 = [self.start.x, self.z0, self.theta0];
        let first = self.sample(0.0, &y0)?;
        let start_event = self.on_gamma.then(|| GammaEvent {
            s: 0.0,
            x: first.x,
            z: first.z,
            lambda: first.lambda,
        });
        let forward = self.run(1.0, y0, start_event)?;
        if forward.period_z.is_some() {
            let mut samples = vec![first];
            samples.extend(forward.samples);
            let mut events: Vec<GammaEvent> = start_event.into_iter().collect();
            events.extend(forward.events);
            return Ok(ProfileCurve {
                samples,
                left_end: EndpointKind::RegularContinuation,
                right_end: forward.end,
                period_z: forward.period_z,
                events,
            });
        }
        let backward = self.run(-1.0, y0, start_event)?;
        let mut samples: Vec<Sample> = backward.samples.into_iter().rev().collect();
        samples.push(first);
        samples.extend(forward.samples);
        let mut events: Vec<GammaEvent> = backward.events.into_iter().rev().collect();
        events.extend(start_event);
        events.extend(forward.events);
        Ok(ProfileCurve {
            samples,
            left_end: backward.end,
            right_end: forward.end,
            period_z: backward.period_z,
            events,
        })
    }

    /// Integrates in the direction `dir` (+1 or -1 in `s`) until an end.
    fn run(&self, dir: f64, y0: State, start_event: Option<GammaEvent>) -> Result<Branch, ProfileError> {
        let opts = &self.opts;
        let alpha = self.pm.alpha();
        let b = self.pm.b();
        let s_lim = dir * opts.s_max;
        let mut rhs = |_: f64, y: &State| self.rhs(y);
        let mut stepper = Stepper::new(self.ode_options(opts.h_max), 1e-3);
        let mut out = Branch {
            samples: Vec::new(),
            events: Vec::new(),
            end: EndpointKind::RegularContinuation,
            period_z: None,
        };
        let mut first_event = start_event;
        let mut prev_cos = if self.on_gamma { None } else { Some(y0[2].cos()) };
        let far_scale = 16.0 * self.start.x.max(1.0);
        let (mut s, mut y) = (0.0, y0);
        for _ in 0..opts.max_steps {
            if s == s_lim {
                return Ok(out);
            }
            let (s1, y1) = match stepper.advance(&mut rhs, s, &y, s_lim) {
                Ok(step) => step,
                Err(e) => {
                    if out.samples.is_empty() {
                        return Err(ProfileError::StepUnderflow { s });
                    }
                    let reason = match e {
                        OdeError::StepUnderflow { t } => format!("step size underflow at s = {t}"),
                        OdeError::Rhs(e) => e.to_string(),
                    };
                    out.end = EndpointKind::Truncated { reason };
                    return Ok(out);
                }
            };
            let c1 = y1[2].cos();
            if let Some(c0) = prev_cos {
                if c0 != 0.0 && c1 != 0.0 && (c0 > 0.0) != (c1 > 0.0) {
                    let (se, ye) = self.polish_event(&mut rhs, s, &y, s1 - s, c0)?;
                    let ev = self.sample(se, &ye)?;
                    let event = GammaEvent {
                        s: se,
                        x: ev.x,
                        z: ev.z,
                        lambda: ev.lambda,
                    };
                    out.samples.push(ev);
                    out.events.push(event);
                    match first_event {
                        None => first_event = Some(event),
                        Some(f0) => {
                            let same_x = (event.x - f0.x).abs() <= 1e-8 * (1.0 + f0.x);
                            let same_side = (event.lambda > 0.0) == (f0.lambda > 0.0);
                            if same_x && same_side && (event.s - f0.s).abs() > 1e-9 {
                                out.period_z = Some(dir * (event.z - f0.z));
                                out.end = EndpointKind::RegularContinuation;
                                return Ok(out);
                            }
                        }
                    }
                }
            }
            if c1 != 0.0 {
                prev_cos = Some(c1);
            }
            s = s1;
            y = y1;
            let smp = self.sample(s, &y)?;
            out.samples.push(smp);

            if y[0] < opts.x_min_stop {
                out.end = EndpointKind::AxisSingularity {
                    nu0: self.axis_angle(c1),
                    z_limit: y[1],
                };
                return Ok(out);
            }
            if let EndValue::Finite(bv) = b {
                let near_b = smp.lambda < alpha && smp.lambda - bv < 1e-3 * (1.0 + bv.abs());
                if near_b && dir * c1 < 0.0 && c1.abs() > 1e-6 {
                    self.lambda_leg(&mut out, s, &y, bv)?;
                    return Ok(out);
                }
            }
            if alpha == 0.0 && y[0] > far_scale && dir * c1 > 0.5 {
                self.far_field_leg(&mut out, s, &y, dir)?;
                return Ok(out);
            }
        }
        out.end = EndpointKind::Truncated {
            reason: "step budget exhausted".into(),
        };
        Ok(out)
    }

    /// Locates the zero of `cos theta` inside the step `[s, s + h]` by
    /// re-stepping from `(s, y)` (secant with bisection safeguard).
    fn polish_event(
        &self,
        rhs: &mut impl FnMut(f64, &State) -> Result<State, PhaseError>,
        s: f64,
        y: &State,
        h: f64,
        c0: f64,
    ) -> Result<(f64, State), ProfileError> {
        let (mut lo, mut hi) = (0.0, h);
        let mut flo = c0;
        let y_hi = dp_step(rhs, s, y, hi)?.0;
        let mut fhi = y_hi[2].cos();
        let mut best = (hi, y_hi);
        for i in 0..200 {
            if (hi - lo).abs() <= 1e-12 {
                break;
            }
            let secant = lo - flo * (hi - lo) / (fhi - flo);
            let inside = secant.is_finite() && (secant - lo) * (secant - hi) < 0.0;
            let t = if inside && i % 3 != 2 { secant } else { 0.5 * (lo + hi) };
            let yt = dp_step(rhs, s, y, t)?.0;
            let ft = yt[2].cos();
            best = (t, yt);
            if ft == 0.0 {
                break;
            }
            if (ft > 0.0) == (flo > 0.0) {
                lo = t;
                flo = ft;
            } else {
                hi = t;
                fhi = ft;
            }
        }
        Ok((s + best.0, best.1))
    }

    fn axis_angle(&self, cos_end: f64) -> f64 {
        let magnitude = match self.pm.limit_angle(&self.start) {
            Ok(v) if v != 0.0 => v.abs(),
            _ => cos_end.abs(),
        };
        cos_end.signum() * magnitude
    }

    /// Continues the curve as a graph over `lambda` down to `b`.
    fn lambda_leg(&self, out: &mut Branch, s: f64, y: &State, b: f64) -> Result<(), ProfileError> {
        let lam1 = y[2].sin() / y[0];
        let eps = y[2].cos().signum();
        let lam_end = b + self.opts.lambda_b_stop * (1.0 + b.abs());
        if lam1 <= lam_end {
            out.end = self.circle_end(y[0], y[1]);
            return Ok(());
        }
        let pm = self.pm;
        let mut rhs = |lam: f64, v: &State| -> Result<State, PhaseError> {
            let (x, _, _) = (v[0], v[1], v[2]);
            let f = pm.f(lam)?;
            let w2 = 1.0 - lam * lam * x * x;
            if !(w2 > 0.0) {
                return Err(PhaseError::OutsideRegion { x, lambda: lam });
            }
            let w = eps * w2.sqrt();
            let d = f - lam;
            Ok([x / d, lam * x * x / (w * d), x / (w * d)])
        };
        let h_max = (lam1 - lam_end) / 64.0;
        let mut stepper = Stepper::new(self.ode_options(h_max), h_max * 1e-3);
        let (mut lam, mut v) = (lam1, [y[0], y[1], s]);
        while lam != lam_end {
            match stepper.advance(&mut rhs, lam, &v, lam_end) {
                Ok((l, nv)) => {
                    lam = l;
                    v = nv;
                    out.samples.push(Sample {
                        s: v[2],
                        x: v[0],
                        z: v[1],
                        lambda: lam,
                        mu: pm.f(lam)?,
                        epsilon: Sign::of(eps),
                    });
                }
                Err(e) => {
                    out.end = EndpointKind::Truncated {
                        reason: format!("near lambda = b: {e:?}"),
                    };
                    return Ok(());
                }
            }
        }
        out.end = self.circle_end(v[0], v[1]);
        Ok(())
    }

    fn circle_end(&self, x_observed: f64, z: f64) -> EndpointKind {
        let radius = self
            .pm
            .x_at_b(self.start.x, self.start.lambda)
            .unwrap_or(x_observed);
        EndpointKind::CircleSingularity { radius, z_limit: z }
    }

    /// Continues an outgoing end (`alpha = 0`) as a graph over `t = ln x`,
    /// carrying `q = lambda x^2` so that `lambda ~ x^-2` may underflow.
    fn far_field_leg(&self, out: &mut Branch, s: f64, y: &State, dir: f64) -> Result<(), ProfileError> {
        let eps = y[2].cos().signum();
        let pm = self.pm;
        // f(lambda) / lambda, frozen at a representable lambda near 0.
        let ratio = |lam: f64, q: f64| -> Result<f64, PhaseError> {
            let l = if lam.abs() > 1e-150 { lam } else { 1e-150 * q.signum() };
            Ok(pm.f(l)? / l)
        };
        let mut rhs = |t: f64, v: &State| -> Result<State, PhaseError> {
            let x = t.exp();
            let q = v[0];
            let sin = q / x;
            let w2 = 1.0 - sin * sin;
            if !(w2 > 0.0) {
                return Err(PhaseError::OutsideRegion { x, lambda: q / (x * x) });
            }
            let w = eps * w2.sqrt();
            Ok([q * (1.0 + ratio(q / (x * x), q)?), q / w, x / w])
        };
        let t_cap = 700.0;
        let mut stepper = Stepper::new(self.ode_options(0.05), 1e-3);
        let (mut t, mut v) = (y[0].ln(), [y[2].sin() * y[0], y[1], s]);
        loop {
            if dir * v[2] >= self.opts.s_max {
                out.end = EndpointKind::RegularContinuation;
                return Ok(());
            }
            if t >= t_cap {
                out.end = EndpointKind::Truncated {
                    reason: "radius exceeds floating-point range".into(),
                };
                return Ok(());
            }
            match stepper.advance(&mut rhs, t, &v, t_cap) {
                Ok((nt, nv)) => {
                    t = nt;
                    v = nv;
                    let x = t.exp();
                    let lambda = v[0] / (x * x);
                    out.samples.push(Sample {
                        s: v[2],
                        x,
                        z: v[1],
                        lambda,
                        mu: pm.f(lambda)?,
                        epsilon: Sign::of(eps),
                    });
                }
                Err(e) => {
                    out.end = EndpointKind::Truncated {
                        reason: format!("far field: {e:?}"),
                    };
                    return Ok(());
                }
            }
        }
    }
}

/// Side of the phase plane for the height predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LambdaSide {
    LambdaPositive,
    LambdaNegative,
}

/// Whether the ends with `lambda` of the given sign have bounded height,
/// from the slope `m = g'(0)` of a class with `alpha = 0`. Returns
/// `TriState::Yes` for bounded, `No` for unbounded.
pub fn bounded_height(class: &WeingartenClass, side: LambdaSide) -> Result<TriState, ProfileError> {
    if class.alpha() != 0.0 {
        return Err(ProfileError::InvalidOption(
            "the height predicate needs alpha = 0".into(),
        ));
    }
    let m = match class.g_prime(0.0) {
        Ok(m) if m.is_finite() => m,
        _ => return Ok(TriState::Undetermined),
    };
    let m = if (m + 1.0).abs() <= 1e-9 { -1.0 } else { m };
    let unbounded = match side {
        LambdaSide::LambdaPositive => (-1.0..0.0).contains(&m),
        LambdaSide::LambdaNegative => m <= -1.0,
    };
    Ok(if unbounded { TriState::No } else { TriState::Yes })
}

/// Largest mismatch `|mu - f(lambda)|` with `mu` and `lambda` recomputed from
/// finite differences of `(x, z)` on five-point stencils. Stencils with gaps
/// below `1e-3` or with strongly uneven spacing are skipped.
pub fn curvature_residual(pm: &PhaseMap<'_>, p: &ProfileCurve) -> Result<f64, ProfileError> {
    let n = p.samples.len();
    if n < 5 {
        return Err(ProfileError::InvalidOption("need at least 5 samples".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 2..n - 2 {
        let win = &p.samples[i - 2..=i + 2];
        let ss: Vec<f64> = win.iter().map(|q| q.s).collect();
        let gaps: Vec<f64> = ss.windows(2).map(|w| w[1] - w[0]).collect();
        let (gmin, gmax) = gaps
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &g| (a.min(g), b.max(g)));
        // Tiny or very uneven gaps (event insertions, stops) amplify rounding.
        if !(gmin >= 1e-3) || gmin < 0.05 * gmax {
            continue;
        }
        let xs: Vec<f64> = win.iter().map(|q| q.x).collect();
        let zs: Vec<f64> = win.iter().map(|q| q.z).collect();
        let dx = fd::derivatives(ss[2], &ss, &xs, 2);
        let dz = fd::derivatives(ss[2], &ss, &zs, 2);
        let speed = (dx[1] * dx[1] + dz[1] * dz[1]).sqrt();
        let mu = (dx[1] * dz[2] - dz[1] * dx[2]) / speed.powi(3);
        let lambda = dz[1] / (speed * xs[2]);
        let f = match pm.f(lambda) {
            Ok(f) => f,
            Err(_) => return Ok(f64::INFINITY),
        };
        worst = worst.max((mu - f).abs());
    }
    Ok(worst)
}
