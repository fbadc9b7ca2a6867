//! Dormand–Prince 5(4) embedded Runge–Kutta stepping with adaptive control.
//!
//! The stepper only advances one accepted step at a time; event handling and
//! termination logic live with the caller.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the 5th and 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_min: 1e-14,
            h_max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError<E> {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error(transparent)]
    Rhs(E),
}

/// A single Dormand–Prince step of size `h` from `(t, y)`. Returns the
/// fifth-order solution and the embedded error vector.
pub fn dp_step<const N: usize, E>(
    f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N]), E> {
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y)?;
    for stage in 1..7 {
        let mut ys = *y;
        for (i, v) in ys.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(stage) {
                acc += A[stage][j] * kj[i];
            }
            *v += h * acc;
        }
        k[stage] = f(t + C[stage] * h, &ys)?;
    }
    let mut out = *y;
    let mut err = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        let mut eacc = 0.0;
        for j in 0..7 {
            acc += B[j] * k[j][i];
            eacc += E[j] * k[j][i];
        }
        out[i] += h * acc;
        err[i] = h * eacc;
    }
    Ok((out, err))
}

/// Adaptive stepper. `h` carries the suggested size (sign gives direction).
#[derive(Debug, Clone)]
pub struct Stepper {
    pub opts: OdeOptions,
    pub h: f64,
}

impl Stepper {
    pub fn new(opts: OdeOptions, h0: f64) -> Self {
        Stepper { opts, h: h0 }
    }

    /// Takes one accepted step, never stepping past `t_limit`. Returns the new
    /// time and state. A right-hand side error inside a trial step is treated
    /// as a rejection (the step is retried smaller) until `h_min` is reached.
    pub fn advance<const N: usize, E>(
        &mut self,
        f: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
        t: f64,
        y: &[f64; N],
        t_limit: f64,
    ) -> Result<(f64, [f64; N]), OdeError<E>> {
        let dir = if t_limit >= t { 1.0 } else { -1.0 };
        let mut h = self.h.abs().min(self.opts.h_max) * dir;
        loop {
            let remaining = t_limit - t;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            if h.abs() < self.opts.h_min && !last {
                return Err(OdeError::StepUnderflow { t });
            }
            match dp_step(f, t, y, h) {
                Ok((y_new, err)) => {
                    let norm = error_norm(y, &y_new, &err, &self.opts);
                    if norm <= 1.0 {
                        let factor = if norm == 0.0 {
                            5.0
                        } else {
                            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                        };
                        if !last || h.abs() > 0.5 * self.h.abs() {
                            self.h = (h * factor).abs().max(self.opts.h_min);
                        }
                        let t_new = if last { t_limit } else { t + h };
                        return Ok((t_new, y_new));
                    }
                    let factor = if norm.is_finite() {
                        (0.9 * norm.powf(-0.2)).clamp(0.2, 1.0)
                    } else {
                        0.2
                    };
                    h *= factor;
                }
                Err(e) => {
                    if h.abs() <= self.opts.h_min {
                        return Err(OdeError::Rhs(e));
                    }
                    h *= 0.25;
                }
            }
            if h.abs() < self.opts.h_min {
                return Err(OdeError::StepUnderflow { t });
            }
        }
    }
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], o: &OdeOptions) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let scale = o.atol + o.rtol * y[i].abs().max(y_new[i].abs());
        let r = err[i] / scale;
        sum += r * r;
    }
    let n = (sum / N as f64).sqrt();
    if n.is_nan() {
        f64::INFINITY
    } else {
        n
    }
}

/// Integrates from `t0` to `t1` and returns the final state.
pub fn solve_to<const N: usize, E>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N], E>,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: OdeOptions,
) -> Result<[f64; N], OdeError<E>> {
    let mut stepper = Stepper::new(opts, ((t1 - t0).abs() * 1e-3).max(opts.h_min));
    let (mut t, mut y) = (t0, y0);
    while t != t1 {
        (t, y) = stepper.advance(&mut f, t, &y, t1)?;
    }
    Ok(y)
}
