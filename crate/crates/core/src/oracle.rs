//! Brute-force validators for the closed-form solvers.
//!
//! Nothing else in the crate calls into this module. Each oracle reaches its answer
//! through a different route from the solver it checks: free boundaries come from a
//! grid scan of the derivative jump across a trial sphere, or from shooting on the
//! radial ODE. Eigenvalues come from Funk–Hecke quadrature of the kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Stepper, Stop, Tolerances};
use crate::params::ModelParams;
use crate::spectral::legendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Uniform grid size for sign-change scans of `(0, R)`.
    pub grid_points: usize,
    /// Bracket width, relative to `R`, at which bisection stops.
    pub bisect_tol: f64,
    /// Accuracy target for shooting: event bracket, relative to `R`, and `|u(R) − u_inf|`.
    pub shoot_tol: f64,
    /// Absolute tolerance of the adaptive quadrature.
    pub quad_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_points: 100_000,
            bisect_tol: 1e-12,
            shoot_tol: 1e-10,
            quad_tol: 1e-8,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 100 {
            return Err(Error::invalid(format!("grid_points must be ≥ 100, got {}", self.grid_points)));
        }
        for (name, v) in [
            ("bisect_tol", self.bisect_tol),
            ("shoot_tol", self.shoot_tol),
            ("quad_tol", self.quad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `u'(r⁻) − u'(r⁺)` for the piecewise solution that equals `μ` on the sphere `|x| = r`:
/// `λ(ε − 1)r/3 − C·R/(r(r − R))` with `C = μ − u_inf − λ(r² − R²)/6`.
///
/// Vanishes exactly at the free boundaries.
pub fn derivative_jump(r: f64, p: &ModelParams) -> f64 {
    let big_r = p.radius;
    let c = p.mu - p.u_inf - p.lambda * (r * r - big_r * big_r) / 6.0;
    p.lambda * (p.eps - 1.0) * r / 3.0 - c * big_r / (r * (r - big_r))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, width: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scan_roots<F: Fn(f64) -> f64>(f: F, big_r: f64, n: usize, width: f64) -> Vec<f64> {
    let h = big_r / n as f64;
    let mut out = Vec::new();
    let mut prev = f(h);
    for i in 2..n {
        let r = h * i as f64;
        let v = f(r);
        if prev == 0.0 {
            out.push(r - h);
        } else if v != 0.0 && v.signum() != prev.signum() {
            out.push(bisect(&f, r - h, r, width));
        }
        prev = v;
    }
    out
}

/// All free boundaries in `(0, R)` by a uniform sign-change scan and bisection, ascending.
pub fn roots_by_bisection(p: &ModelParams, cfg: &OracleConfig) -> Result<Vec<f64>> {
    p.validate()?;
    cfg.validate()?;
    Ok(scan_roots(
        |r| derivative_jump(r, p),
        p.radius,
        cfg.grid_points,
        cfg.bisect_tol * p.radius,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shot {
    /// `u(R)` of the initial-value solution.
    pub u_at_boundary: f64,
    /// Where `u` rises through `μ`, if it does.
    pub crossing: Option<f64>,
}

/// Integrates `u'' + 2u'/r = λ(ε + (1 − ε)H(u − μ))` outward from `u(0) = u0`, `u'(0) = 0`.
pub fn shoot_radial(p: &ModelParams, u0: f64, cfg: &OracleConfig) -> Result<Shot> {
    p.validate()?;
    cfg.validate()?;
    if !u0.is_finite() {
        return Err(Error::invalid(format!("u0 must be finite, got {u0}")));
    }
    let big_r = p.radius;
    if (u0 - p.mu).abs() <= cfg.shoot_tol * p.mu.abs().max(1.0) {
        return Err(Error::DegenerateEvent(format!(
            "u(0) = {u0} sits on the threshold μ = {}",
            p.mu
        )));
    }
    let rate_in = p.lambda * p.eps;
    let rate_out = p.lambda;
    let mut rate = if u0 < p.mu { rate_in } else { rate_out };

    // Series start: constant right-hand side near the origin gives u = u0 + rate·r²/6 exactly.
    let r_start = 1e-6 * big_r;
    let y0 = [u0 + rate * r_start * r_start / 6.0, rate * r_start / 3.0];
    let tol = Tolerances { rtol: 1e-13, atol: 1e-15 };
    let mut stepper = Stepper::new(r_start, y0, 1e-3 * big_r, tol);
    let mut crossing = None;
    loop {
        let k = rate;
        let f = move |r: f64, y: &[f64; 2]| [y[1], k - 2.0 * y[1] / r];
        let mu = p.mu;
        let event = move |_: f64, y: &[f64; 2]| y[0] - mu;
        let stop = stepper
            .run(f, big_r, event, cfg.shoot_tol * big_r, |_, _| {})
            .map_err(|e| Error::Integration {
                t: e.t,
                reason: format!("shooting: {}", e.reason),
                partial: Box::new(crate::dynamics::Trajectory {
                    samples: vec![],
                    params: *p,
                    initial_radius: big_r,
                }),
            })?;
        match stop {
            Stop::End => break,
            Stop::Event => {
                if crossing.is_some() || stepper.y[1] <= 0.0 {
                    return Err(Error::DegenerateEvent(format!(
                        "u re-crosses μ at r = {}",
                        stepper.t
                    )));
                }
                crossing = Some(stepper.t);
                rate = rate_out;
            }
        }
    }
    Ok(Shot {
        u_at_boundary: stepper.y[0],
        crossing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingSolution {
    pub center: f64,
    pub crossing: Option<f64>,
    pub iterations: usize,
}

/// Secant iteration on `u(0)` until `|u(R) − u_inf| ≤ shoot_tol`, starting from `u0_guess`.
pub fn shoot_to_boundary(p: &ModelParams, u0_guess: f64, cfg: &OracleConfig) -> Result<ShootingSolution> {
    let miss = |u0: f64| -> Result<(f64, Shot)> {
        let s = shoot_radial(p, u0, cfg)?;
        Ok((s.u_at_boundary - p.u_inf, s))
    };
    let step = 1e-4 * p.drop();
    let (mut x0, mut x1) = (u0_guess, u0_guess + step);
    let (mut f0, _) = miss(x0)?;
    let (mut f1, mut s1) = miss(x1)?;
    for it in 0..100 {
        if f1.abs() <= cfg.shoot_tol * p.u_inf.abs().max(1.0) {
            return Ok(ShootingSolution {
                center: x1,
                crossing: s1.crossing,
                iterations: it,
            });
        }
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        (x0, f0) = (x1, f1);
        x1 = x2;
        (f1, s1) = miss(x1)?;
    }
    Err(Error::internal(format!(
        "shooting secant did not converge from u0 = {u0_guess} (last miss {f1:e})"
    )))
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

struct Adaptive {
    budget: usize,
    err: f64,
}

impl Adaptive {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        &mut self,
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || self.budget == 0 || delta.abs() <= 15.0 * tol {
            if delta.abs() > 15.0 * tol {
                self.err += delta.abs() / 15.0;
            }
            return left + right + delta / 15.0;
        }
        self.budget -= 1;
        self.step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + self.step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fb) = (f(a), f(b));
    // Split into panels first so that oscillatory integrands are resolved before refinement.
    let panels = 16;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    let mut state = Adaptive { budget: 200_000, err: 0.0 };
    let mut left = (a, fa);
    for i in 1..=panels {
        let x = if i == panels { b } else { a + h * i as f64 };
        let fx = if i == panels { fb } else { f(x) };
        let (m, fm, whole) = simpson(&f, left.0, left.1, x, fx);
        total += state.step(&f, left.0, left.1, x, fx, m, fm, whole, tol / panels as f64, 50);
        left = (x, fx);
    }
    if state.err > tol || !total.is_finite() {
        return Err(Error::Quadrature {
            estimate: total,
            error_bound: state.err,
        });
    }
    Ok(total)
}

/// `σ_l = 2π ∫₋₁¹ k(t) P_l(t) dt` for the closed-form kernel `k` on the sphere `|x| = r0`.
///
/// With `t = 1 − s²` the `1/√(1 − t)` singularity at `t = 1` becomes a constant.
pub fn quad_sigma(l: usize, r0: f64, radius: f64, cfg: &OracleConfig) -> Result<f64> {
    cfg.validate()?;
    if !(radius > 0.0 && r0 > 0.0 && r0 < radius) {
        return Err(Error::domain(format!("quad_sigma needs 0 < r0 < R, got r0 = {r0}, R = {radius}")));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let rho2 = (r0 / radius).powi(2);
    let integrand = |s: f64| {
        let t = 1.0 - s * s;
        // 2s·(−1/(4π r0 √(2 s²))) = −√2/(4π r0)
        let near = -std::f64::consts::SQRT_2 / (four_pi * r0);
        let image = 2.0 * s / (four_pi * radius * (1.0 + rho2 * rho2 - 2.0 * rho2 * t).sqrt());
        (near + image) * legendre(l, t)
    };
    let two_pi = 0.5 * four_pi;
    let tol = cfg.quad_tol / two_pi;
    Ok(two_pi * integrate_adaptive(integrand, 0.0, std::f64::consts::SQRT_2, tol)?)
}

/// Free-boundary fraction `r₀/R` of the ε < 1 problem in a ball of radius `radius`, by bisection
/// of the derivative jump. Zero when there is no interior root.
pub fn rho_by_bisection(radius: f64, p: &ModelParams, cfg: &OracleConfig) -> Result<f64> {
    let q = p.with_radius(radius);
    q.validate()?;
    let roots = scan_roots(|r| derivative_jump(r, &q), radius, 1000, cfg.bisect_tol * radius);
    match roots.as_slice() {
        [] => Ok(0.0),
        [r] => Ok(r / radius),
        _ => Err(Error::internal(format!("{} free boundaries for eps < 1", roots.len()))),
    }
}

/// Root of `H(R) = λ(ε − 1)ρ³/3 + (λ − η)/3` by bracketing bisection, with `ρ` from
/// [`rho_by_bisection`]. `None` unless λε < η < λ.
pub fn steady_radius_bisection(p: &ModelParams, cfg: &OracleConfig) -> Result<Option<f64>> {
    p.validate()?;
    if !(p.eps < 1.0) {
        return Err(Error::invalid("steady radius needs eps < 1"));
    }
    if !(p.lambda * p.eps < p.eta && p.eta < p.lambda) {
        return Ok(None);
    }
    let h = |big_r: f64| -> Result<f64> {
        let r = rho_by_bisection(big_r, p, cfg)?;
        Ok(p.lambda * (p.eps - 1.0) * r.powi(3) / 3.0 + (p.lambda - p.eta) / 3.0)
    };
    let mut lo = p.radius;
    while h(lo)? <= 0.0 {
        lo *= 0.5;
    }
    let mut hi = lo * 2.0;
    while h(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::internal("H has no sign change"));
        }
    }
    while hi - lo > cfg.bisect_tol * hi {
        let mid = 0.5 * (lo + hi);
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
