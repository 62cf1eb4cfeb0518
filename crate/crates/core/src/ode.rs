//! Adaptive Dormand–Prince 5(4) stepping for small fixed-size systems.
//!
//! The driver supports one scalar event function per run. When an accepted step
//! changes the event sign, the step is shortened by bisection on its length so that
//! the run stops just past the crossing; the caller then decides how to continue
//! (switch right-hand side, record the seam, ...).

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

/// Pure relative control by default: the radius ODE spans many decades and stays positive.
impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 0.0 }
    }
}

impl Tolerances {
    pub fn halved(self) -> Self {
        Self {
            rtol: self.rtol / 2.0,
            atol: self.atol / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// Reached the requested end time.
    End,
    /// Stopped just past a sign change of the event function.
    Event,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub t: f64,
    pub h: f64,
    pub reason: String,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// One Dormand–Prince step of length `h` from `(t, y)` with `k1 = f(t, y)`.
/// Returns the fifth-order solution, the error vector and `f` at the new point.
fn dp_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, err, k7)
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], tol: &Tolerances) -> f64 {
    (0..N)
        .map(|i| err[i].abs() / (tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs())))
        .fold(0.0, f64::max)
}

/// Adaptive integrator state. `t` and `y` always hold the last accepted point.
#[derive(Debug, Clone)]
pub struct Stepper<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h: f64,
    pub tol: Tolerances,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> Stepper<N> {
    pub fn new(t0: f64, y0: [f64; N], h0: f64, tol: Tolerances) -> Self {
        Self {
            t: t0,
            y: y0,
            h: h0,
            tol,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances to `t_end` or to the first sign change of `event`.
    ///
    /// `on_accept` sees every accepted point, including the one just past an event.
    /// `event_tol` bounds the width of the time bracket around the crossing.
    pub fn run<F, E, C>(
        &mut self,
        f: F,
        t_end: f64,
        event: E,
        event_tol: f64,
        mut on_accept: C,
    ) -> Result<Stop, StepFailure>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        E: Fn(f64, &[f64; N]) -> f64,
        C: FnMut(f64, &[f64; N]),
    {
        let mut k1 = f(self.t, &self.y);
        let mut g0 = event(self.t, &self.y);
        while self.t < t_end {
            let min_h = 1e-14 * self.t.abs().max(1.0);
            let remaining = t_end - self.t;
            let mut h = self.h.min(remaining);
            if h < min_h && h < remaining {
                return Err(StepFailure {
                    t: self.t,
                    h,
                    reason: "step size collapsed".into(),
                });
            }
            let (y_new, err, k_new) = dp_step(&f, self.t, &self.y, &k1, h);
            let norm = error_norm(&self.y, &y_new, &err, &self.tol);
            if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                self.rejected += 1;
                self.h = h * 0.1;
                if self.h < min_h {
                    return Err(StepFailure {
                        t: self.t,
                        h: self.h,
                        reason: "non-finite state".into(),
                    });
                }
                continue;
            }
            if norm > 1.0 {
                self.rejected += 1;
                self.h = h * (0.9 * norm.powf(-0.2)).max(0.2);
                if self.h < min_h {
                    return Err(StepFailure {
                        t: self.t,
                        h: self.h,
                        reason: "step size collapsed".into(),
                    });
                }
                continue;
            }

            let g1 = event(self.t + h, &y_new);
            let crossed = g0 != 0.0 && (g1 == 0.0 || g1.signum() != g0.signum());
            let (t_acc, y_acc, k_acc) = if crossed {
                // Bisect on the step length: lo keeps the starting sign, hi has crossed.
                let (mut lo, mut hi) = (0.0, h);
                let mut best = (y_new, k_new);
                while hi - lo > event_tol && hi - lo > f64::EPSILON * (self.t + hi).abs() {
                    let mid = 0.5 * (lo + hi);
                    let (ym, _, km) = dp_step(&f, self.t, &self.y, &k1, mid);
                    let gm = event(self.t + mid, &ym);
                    if gm != 0.0 && gm.signum() == g0.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                        best = (ym, km);
                    }
                }
                h = hi;
                (self.t + hi, best.0, best.1)
            } else {
                (self.t + h, y_new, k_new)
            };

            self.t = if crossed || h < remaining { t_acc } else { t_end };
            self.y = y_acc;
            k1 = k_acc;
            self.accepted += 1;
            on_accept(self.t, &self.y);
            let growth = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if !crossed {
                self.h = h * growth;
            }
            if crossed {
                return Ok(Stop::Event);
            }
            g0 = g1;
        }
        Ok(Stop::End)
    }
}
