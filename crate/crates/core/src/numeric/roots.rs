//! Bracketing root finders for monotone scalar functions.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError<E> {
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error(transparent)]
    Eval(E),
}

/// Bisection on a bracket `[lo, hi]` where `f(lo)` and `f(hi)` differ in
/// sign (or one is zero). Runs until the bracket stops shrinking.
pub fn bisect<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64, RootError<E>> {
    let mut flo = f(lo).map_err(RootError::Eval)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi).map_err(RootError::Eval)?;
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid).map_err(RootError::Eval)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-change bracket; falls back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// `fdf` returns the value and derivative. Stops when `|f| <= ftol`.
pub fn newton_bracketed<E>(
    mut fdf: impl FnMut(f64) -> Result<(f64, f64), E>,
    mut lo: f64,
    mut hi: f64,
    ftol: f64,
) -> Result<f64, RootError<E>> {
    let (flo, _) = fdf(lo).map_err(RootError::Eval)?;
    if flo.abs() <= ftol {
        return Ok(lo);
    }
    let (fhi, _) = fdf(hi).map_err(RootError::Eval)?;
    if fhi.abs() <= ftol {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NoSignChange { lo, hi });
    }
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    let mut last_width = (hi - lo).abs();
    let mut stalls = 0;
    for _ in 0..500 {
        let (fx, dfx) = fdf(x).map_err(RootError::Eval)?;
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let width = (hi - lo).abs();
        if width > 0.5 * last_width {
            stalls += 1;
        } else {
            stalls = 0;
        }
        last_width = width;
        let newton = x - fx / dfx;
        let inside = newton.is_finite() && newton > lo.min(hi) && newton < lo.max(hi);
        let next = if inside && stalls < 3 {
            newton
        } else {
            stalls = 0;
            0.5 * (lo + hi)
        };
        if next == x || width <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
