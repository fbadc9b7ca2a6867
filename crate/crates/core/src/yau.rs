//! A compact, non-ellipsoidal `C^2` surface of revolution with
//! `k_2 = k_1^3 / c^3`: a flat unit disk capped by the graph `z = u(r)`,
//! doubled by reflection across the plane of its vertical equator.
//!
//! On `1 <= r < r0 = (1 + 1/c)^{3/2}`, with `w = c (r^{2/3} - 1)`,
//! `u'(r) = -sqrt(w^3 / (1 - w^3))`, the parallel curvature is
//! `lambda = (c - c r^{-2/3})^{3/2}` and the meridian curvature is
//! `mu = c lambda^{1/3}`.

use std::io::{self, Write};

use serde::Serialize;

use crate::numeric::fd;
use crate::numeric::quad::{integrate, Estimate, QuadOptions};
use crate::profile::io::fmt17;
use crate::profile::mesh::{Mesh, MeshError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum YauError {
    #[error("c must be positive, got {0}")]
    NonPositiveC(f64),
    #[error("need at least 16 samples, got {0}")]
    TooFewSamples(usize),
    #[error("r = {r} is outside [0, r0 = {r0}]")]
    OutOfRange { r: f64, r0: f64 },
    #[error("quadrature did not converge on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn check_c(c: f64) -> Result<(), YauError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(YauError::NonPositiveC(c))
    }
}

/// Radius of the vertical equator.
pub fn r0(c: f64) -> f64 {
    (1.0 + 1.0 / c).powf(1.5)
}

pub fn lambda_of(c: f64, r: f64) -> f64 {
    if r <= 1.0 {
        return 0.0;
    }
    (c - c * r.powf(-2.0 / 3.0)).max(0.0).powf(1.5)
}

pub fn mu_of(c: f64, r: f64) -> f64 {
    c * lambda_of(c, r).cbrt()
}

/// `-u'(r)` for `1 <= r < r0`.
pub fn slope(c: f64, r: f64) -> f64 {
    if r <= 1.0 {
        return 0.0;
    }
    let w = c * (r.ln() * 2.0 / 3.0).exp_m1();
    let one_minus_w = c * (r0(c).powf(2.0 / 3.0) - r.powf(2.0 / 3.0));
    (w.powi(3) / (one_minus_w * (1.0 + w + w * w))).sqrt()
}

/// `-u'` written in `tau = sqrt(r0 - r)` and multiplied by `dr/dtau`, which
/// stays bounded as `tau -> 0`.
fn tau_integrand(c: f64, tau: f64) -> f64 {
    let r0 = r0(c);
    let r = r0 - tau * tau;
    if r <= 1.0 {
        return 0.0;
    }
    let w = c * (r.ln() * 2.0 / 3.0).exp_m1();
    let gap = -r0.powf(2.0 / 3.0) * ((2.0 / 3.0) * (-tau * tau / r0).ln_1p()).exp_m1();
    let one_minus_w = c * gap;
    2.0 * tau * (w.powi(3) / (one_minus_w * (1.0 + w + w * w))).sqrt()
}

const QUAD: QuadOptions = QuadOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-13,
    max_intervals: 4000,
};

/// `u(b) - u(a)` for `1 <= a <= b <= r0`.
fn rise(c: f64, a: f64, b: f64) -> Result<f64, YauError> {
    let r0 = r0(c);
    let (a1, b1) = (a.max(1.0), b.max(1.0));
    if b1 <= a1 {
        return Ok(0.0);
    }
    // Plain r away from the equator, tau = sqrt(r0 - r) near it.
    let split = r0 - 0.25 * (r0 - 1.0);
    let mut total = 0.0;
    if a1 < split {
        let hi = b1.min(split);
        total += checked(integrate(|t| Ok::<f64, std::convert::Infallible>(slope(c, t)), a1, hi, QUAD), a, b)?;
    }
    if b1 > split {
        let lo = a1.max(split);
        let (ta, tb) = ((r0 - lo).max(0.0).sqrt(), (r0 - b1).max(0.0).sqrt());
        total += checked(integrate(|t| Ok::<f64, std::convert::Infallible>(tau_integrand(c, t)), tb, ta, QUAD), a, b)?;
    }
    Ok(-total)
}

fn checked(
    est: Result<Estimate, std::convert::Infallible>,
    a: f64,
    b: f64,
) -> Result<f64, YauError> {
    let est = est.unwrap_or_else(|e| match e {});
    if !est.converged && est.error > 1e-10 * est.value.abs() {
        return Err(YauError::Quadrature { a, b });
    }
    Ok(est.value)
}

/// Height `u(r)` of the upper cap, `0 <= r <= r0`.
pub fn height(c: f64, r: f64) -> Result<f64, YauError> {
    check_c(c)?;
    let r0 = r0(c);
    if !(0.0..=r0).contains(&r) {
        return Err(YauError::OutOfRange { r, r0 });
    }
    rise(c, 1.0, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YauSample {
    pub r: f64,
    pub u: f64,
    /// `u'(r)`; `-inf` at `r0`.
    pub du: f64,
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YauProfile {
    pub c: f64,
    pub r0: f64,
    pub samples: Vec<YauSample>,
}

/// Samples of the upper cap on `[0, r0]`: `n/4` points on the disk, the rest
/// on the cap clustered at both ends, plus a geometric refinement towards
/// `r = 1`.
pub fn yau_profile(c: f64, n: usize) -> Result<YauProfile, YauError> {
    check_c(c)?;
    if n < 16 {
        return Err(YauError::TooFewSamples(n));
    }
    let r0 = r0(c);
    let n_disk = n / 4;
    let n_cap = n - n_disk;
    let mut rs: Vec<f64> = (0..n_disk).map(|i| i as f64 / n_disk as f64).collect();
    for i in 0..=n_cap {
        let t = i as f64 / n_cap as f64;
        rs.push(1.0 + (r0 - 1.0) * t * t * (3.0 - 2.0 * t));
    }
    let first_cap = 1.0 + (r0 - 1.0) * {
        let t = 1.0 / n_cap as f64;
        t * t * (3.0 - 2.0 * t)
    };
    let mut k = 1;
    while 1.0 + (first_cap - 1.0) * 0.5f64.powi(k) > 1.0 + 1e-9 && k < 30 {
        rs.push(1.0 + (first_cap - 1.0) * 0.5f64.powi(k));
        k += 1;
    }
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut samples = Vec::with_capacity(rs.len());
    let mut u = 0.0;
    let mut prev = 0.0;
    for &r in &rs {
        u += rise(c, prev, r)?;
        prev = r;
        let du = if r >= r0 { f64::NEG_INFINITY } else { -slope(c, r) };
        samples.push(YauSample {
            r,
            u,
            du,
            lambda: lambda_of(c, r),
            mu: mu_of(c, r),
        });
    }
    Ok(YauProfile { c, r0, samples })
}

/// The closed surface: disk and cap, reflected across `z = u(r0)`, with the
/// two centres as apex vertices.
pub fn yau_surface(c: f64, n_profile: usize, n_angular: usize) -> Result<Mesh, YauError> {
    let p = yau_profile(c, n_profile)?;
    let z_eq = p.samples.last().map(|s| s.u).unwrap_or(0.0);
    let mut rings: Vec<(f64, f64)> = p.samples.iter().map(|s| (s.r, s.u)).collect();
    let mirrored: Vec<(f64, f64)> = p.samples.iter().rev().skip(1).map(|s| (s.r, 2.0 * z_eq - s.u)).collect();
    rings.extend(mirrored);
    Ok(Mesh::from_rings(&rings, n_angular)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionSample {
    pub delta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub u2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YauCheck {
    /// Largest `|lambda - mu^3 / c^3|` over the grid, both curvatures taken
    /// from finite differences of `u`.
    pub residual: f64,
    /// Finite-difference curvatures at `r = 1 + delta`.
    pub junction: Vec<JunctionSample>,
    /// `lambda`, `mu` and `u''` decrease to `0` as `delta -> 0` at the
    /// expected rates `delta^{3/2}`, `delta^{1/2}`, `delta^{1/2}`.
    pub c2_at_disk_edge: bool,
}

/// `(u', u'')` at `r` from a 9-point stencil on differences of `u`.
fn fd_derivatives(c: f64, r: f64, h: f64) -> Result<(f64, f64), YauError> {
    let nodes: Vec<f64> = (-4..=4).map(|k| r + k as f64 * h).collect();
    let mut values = Vec::with_capacity(9);
    for &t in &nodes {
        let v = if t >= r { rise(c, r, t)? } else { -rise(c, t, r)? };
        values.push(v);
    }
    let d = fd::derivatives(r, &nodes, &values, 2);
    Ok((d[1], d[2]))
}

fn fd_curvatures(c: f64, r: f64) -> Result<(f64, f64, f64), YauError> {
    let r0 = r0(c);
    let h = 1e-3f64.min((r0 - r) / 20.0).min((r - 1.0) / 20.0);
    let (du, d2u) = fd_derivatives(c, r, h)?;
    let q = 1.0 + du * du;
    let lambda = -du / (r * q.sqrt());
    let mu = -d2u / q.powf(1.5);
    Ok((lambda, mu, d2u))
}

/// Checks the curvature relation on `grid` (points of `(1, r0)`) and the
/// `C^2` matching with the flat disk.
pub fn verify_yau(c: f64, grid: &[f64]) -> Result<YauCheck, YauError> {
    check_c(c)?;
    let r0 = r0(c);
    let mut residual: f64 = 0.0;
    for &r in grid {
        if !(r > 1.0 && r < r0) {
            return Err(YauError::OutOfRange { r, r0 });
        }
        let (lambda, mu, _) = fd_curvatures(c, r)?;
        residual = residual.max((lambda - mu.powi(3) / c.powi(3)).abs());
    }
    let mut junction = Vec::new();
    for delta in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let (lambda, mu, u2) = fd_curvatures(c, 1.0 + delta)?;
        junction.push(JunctionSample { delta, lambda, mu, u2 });
    }
    let rate = |a: f64, b: f64, da: f64, db: f64| (a / b).ln() / (da / db).ln();
    let c2_at_disk_edge = junction.windows(2).all(|w| {
        let (p, q) = (&w[0], &w[1]);
        let ok = |x: f64, y: f64, expect: f64| x > y && y >= 0.0 && (rate(x, y, p.delta, q.delta) - expect).abs() < 0.05;
        ok(p.lambda, q.lambda, 1.5) && ok(p.mu, q.mu, 0.5) && ok(-p.u2, -q.u2, 0.5)
    });
    Ok(YauCheck {
        residual,
        junction,
        c2_at_disk_edge,
    })
}

/// Writes `r,u,du,lambda,mu`.
pub fn write_yau_csv(p: &YauProfile, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "r,u,du,lambda,mu")?;
    for s in &p.samples {
        writeln!(w, "{},{},{},{},{}", fmt17(s.r), fmt17(s.u), fmt17(s.du), fmt17(s.lambda), fmt17(s.mu))?;
    }
    Ok(())
}
