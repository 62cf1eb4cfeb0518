//! Quasi-static radius dynamics `R' = R·H(R)` for ε ∈ (0, 1).
//!
//! The nutrient field is slaved to the current radius, so `H` only needs the
//! free-boundary ratio `ρ(R) = r₀/R` of the stationary problem posed in a ball of
//! radius `R`. Below the seam `R* = √(6(u_inf − μ)/λ)` there is no quiescent core
//! and `H = (λ − η)/3`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{Stepper, Stop, Tolerances};
use crate::params::ModelParams;
use crate::stationary::{phase_radius, trig_root};

/// Width of the time bracket around the seam crossing `R = R*`.
pub const SEAM_EVENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub radius: f64,
    /// Free-boundary radius `r₀ = ρ(R)·R`, zero in phase 1.
    pub free_boundary: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Accepted points in strictly increasing `t`, starting at `t = 0`.
    pub samples: Vec<Sample>,
    pub params: ModelParams,
    pub initial_radius: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds the initial sample")
    }

    /// `(R₀e^{(λε−η)t/3}, R₀e^{(λ−η)t/3})`.
    pub fn envelope(&self, t: f64) -> (f64, f64) {
        envelope(&self.params, self.initial_radius, t)
    }
}

/// Exponential bounds `(R₀e^{(λε−η)t/3}, R₀e^{(λ−η)t/3})` on any trajectory from `R₀`.
pub fn envelope(p: &ModelParams, r0: f64, t: f64) -> (f64, f64) {
    (
        r0 * ((p.lambda * p.eps - p.eta) * t / 3.0).exp(),
        r0 * ((p.lambda - p.eta) * t / 3.0).exp(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticClass {
    /// η > λ: `R(t) → 0`.
    ShrinksToZero,
    /// The limit radius. For λε < η < λ this is the root of `H`; for η = λ it is `R*`,
    /// the limit of every trajectory that starts in phase 2.
    ConvergesTo(f64),
    /// η ≤ λε: `H` stays positive and `R(t)` grows without bound.
    UnboundedGrowth,
}

impl AsymptoticClass {
    pub fn name(&self) -> &'static str {
        match self {
            AsymptoticClass::ShrinksToZero => "ShrinksToZero",
            AsymptoticClass::ConvergesTo(_) => "ConvergesTo",
            AsymptoticClass::UnboundedGrowth => "UnboundedGrowth",
        }
    }
}

fn require_sub_one(p: &ModelParams) -> Result<()> {
    p.validate()?;
    if !(p.eps < 1.0) {
        return Err(Error::invalid(format!(
            "radius dynamics need 0 < eps < 1, got eps = {}",
            p.eps
        )));
    }
    Ok(())
}

/// `ρ(R) = r₀/R ∈ [0, 1)`: the free boundary of the stationary problem in a ball of radius `R`,
/// as a fraction of `R`. Zero for `R ≤ R*`.
pub fn rho(radius: f64, p: &ModelParams) -> Result<f64> {
    require_sub_one(p)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("radius must be positive and finite, got {radius}")));
    }
    if radius <= phase_radius(p)? {
        return Ok(0.0);
    }
    let r0 = trig_root(p.eps, radius, p.drop(), p.lambda, 4.0 * PI / 3.0)?;
    Ok((r0 / radius).clamp(0.0, 1.0))
}

/// `H(R) = λ(ε − 1)ρ(R)³/3 + (λ − η)/3`.
pub fn growth_rate(radius: f64, p: &ModelParams) -> Result<f64> {
    let r = rho(radius, p)?;
    Ok(p.lambda * (p.eps - 1.0) * r.powi(3) / 3.0 + (p.lambda - p.eta) / 3.0)
}

fn sample(t: f64, radius: f64, p: &ModelParams) -> Result<Sample> {
    Ok(Sample {
        t,
        radius,
        free_boundary: rho(radius, p)? * radius,
    })
}

/// Integrates `R' = R·H(R)` from `R(0) = r0` to `t_end` with an adaptive 5(4) pair.
///
/// The seam `R = R*` is located as an event so that no step straddles the
/// `(R − R*)^{3/2}` kink of `H`.
pub fn integrate(r0: f64, p: &ModelParams, t_end: f64, tol: Tolerances) -> Result<Trajectory> {
    require_sub_one(p)?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::invalid(format!("R0 must be positive and finite, got {r0}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid(format!("t_end must be positive and finite, got {t_end}")));
    }
    if !(tol.rtol > 0.0 && tol.atol >= 0.0) {
        return Err(Error::invalid("tolerances must satisfy rtol > 0, atol ≥ 0"));
    }
    let r_star = phase_radius(p)?;
    let mut traj = Trajectory {
        samples: vec![sample(0.0, r0, p)?],
        params: *p,
        initial_radius: r0,
    };

    // ρ is evaluated on the validated parameters, so only the radius can fail; a
    // non-positive radius is reported as NaN and rejected by the stepper.
    let rhs = |_: f64, y: &[f64; 1]| [y[0] * growth_rate(y[0], p).unwrap_or(f64::NAN)];
    let seam = |_: f64, y: &[f64; 1]| y[0] - r_star;
    let h0 = (t_end * 1e-3).min(0.1 / (p.lambda + p.eta).max(1e-300));
    let mut stepper = Stepper::new(0.0, [r0], h0, tol);
    let mut pending: Option<Error> = None;
    loop {
        let res = stepper.run(rhs, t_end, seam, SEAM_EVENT_TOL, |t, y| {
            if pending.is_some() {
                return;
            }
            match sample(t, y[0], p) {
                Ok(s) => traj.samples.push(s),
                Err(e) => pending = Some(e),
            }
        });
        if let Some(e) = pending.take() {
            return Err(e);
        }
        match res {
            Ok(Stop::End) => return Ok(traj),
            Ok(Stop::Event) => continue,
            Err(fail) => {
                return Err(Error::Integration {
                    t: fail.t,
                    reason: format!("{} (h = {:e})", fail.reason, fail.h),
                    partial: Box::new(traj),
                })
            }
        }
    }
}

/// The radius `R_s > R*` with `H(R_s) = 0`; exists iff λε < η < λ.
pub fn steady_radius(p: &ModelParams) -> Result<Option<f64>> {
    require_sub_one(p)?;
    if !(p.lambda * p.eps < p.eta && p.eta < p.lambda) {
        return Ok(None);
    }
    let lo0 = phase_radius(p)?;
    let mut hi = 2.0 * lo0;
    while growth_rate(hi, p)? >= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::internal("no sign change of H found while bracketing R_s"));
        }
    }
    let mut lo = lo0;
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if growth_rate(mid, p)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Long-time behaviour of every trajectory for `p`.
pub fn classify(p: &ModelParams) -> Result<AsymptoticClass> {
    require_sub_one(p)?;
    if p.eta > p.lambda {
        Ok(AsymptoticClass::ShrinksToZero)
    } else if p.eta <= p.lambda * p.eps {
        Ok(AsymptoticClass::UnboundedGrowth)
    } else if p.eta == p.lambda {
        Ok(AsymptoticClass::ConvergesTo(phase_radius(p)?))
    } else {
        let rs = steady_radius(p)?.ok_or_else(|| Error::internal("steady radius missing for λε < η < λ"))?;
        Ok(AsymptoticClass::ConvergesTo(rs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::{solve_stationary, transmission_residual};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn desk(lambda: f64, eps: f64, eta: f64) -> ModelParams {
        ModelParams::new(lambda, eps, 0.5, 1.0, 1.0, eta).unwrap()
    }

    #[test]
    fn rho_phase_one_and_seam() {
        let p = desk(6.0, 0.5, 0.0);
        let rs = phase_radius(&p).unwrap();
        assert_eq!(rho(0.5 * rs, &p).unwrap(), 0.0);
        assert_eq!(rho(rs, &p).unwrap(), 0.0);
        assert!(rho(rs * (1.0 + 1e-6), &p).unwrap() < 1e-2);
        assert!(rho(-1.0, &p).is_err());
        assert!(rho(1.0, &desk(6.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn rho_matches_stationary_solution() {
        let p = desk(6.0, 0.5, 0.0);
        for big_r in [0.8, 1.0, 2.0, 7.5] {
            let q = p.with_radius(big_r);
            let sols = solve_stationary(&q).unwrap();
            let fb = sols[0].free_boundary.unwrap().radius;
            assert_relative_eq!(rho(big_r, &p).unwrap() * big_r, fb, max_relative = 1e-9);
            assert!(transmission_residual(fb, &q).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn steady_radius_example() {
        let p = desk(6.0, 0.5, 4.0);
        let rs = steady_radius(&p).unwrap().unwrap();
        assert!((rs - 1.887).abs() < 1e-3, "R_s = {rs}");
        assert_relative_eq!(rho(rs, &p).unwrap().powi(3), 2.0 / 3.0, max_relative = 1e-12);
        assert!(growth_rate(rs, &p).unwrap().abs() < 1e-14);
    }

    #[test]
    fn steady_radius_absent() {
        assert_eq!(steady_radius(&desk(6.0, 0.5, 7.0)).unwrap(), None);
        assert_eq!(steady_radius(&desk(6.0, 0.5, 2.0)).unwrap(), None);
        assert_eq!(steady_radius(&desk(6.0, 0.5, 6.0)).unwrap(), None);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&desk(6.0, 0.5, 7.0)).unwrap(), AsymptoticClass::ShrinksToZero);
        assert_eq!(classify(&desk(6.0, 0.5, 1.0)).unwrap(), AsymptoticClass::UnboundedGrowth);
        let rs = steady_radius(&desk(6.0, 0.5, 4.0)).unwrap().unwrap();
        assert_eq!(classify(&desk(6.0, 0.5, 4.0)).unwrap(), AsymptoticClass::ConvergesTo(rs));
        assert_eq!(
            classify(&desk(6.0, 0.5, 6.0)).unwrap(),
            AsymptoticClass::ConvergesTo(phase_radius(&desk(6.0, 0.5, 6.0)).unwrap())
        );
    }

    #[test]
    fn constant_radius_when_rates_balance_in_phase_one() {
        let p = desk(6.0, 0.5, 6.0);
        let traj = integrate(0.3, &p, 10.0, Tolerances::default()).unwrap();
        assert!(traj.samples.iter().all(|s| s.radius == 0.3));
    }

    #[test]
    fn decays_for_high_mortality() {
        let p = desk(6.0, 0.5, 7.0);
        let traj = integrate(1.0, &p, 60.0, Tolerances::default()).unwrap();
        let last = traj.last();
        assert!(last.radius < 1e-6);
        assert!(last.radius <= traj.envelope(last.t).1 * (1.0 + 1e-7));
    }

    #[test]
    fn converges_to_steady_radius() {
        let p = desk(6.0, 0.5, 4.0);
        let rs = steady_radius(&p).unwrap().unwrap();
        for r0 in [0.2, 5.0] {
            let traj = integrate(r0, &p, 200.0, Tolerances::default()).unwrap();
            assert_relative_eq!(traj.last().radius, rs, max_relative = 1e-6);
            let dist: Vec<f64> = traj.samples.iter().map(|s| (s.radius - rs).abs()).collect();
            let slack = 10.0 * Tolerances::default().rtol * rs;
            assert!(dist.windows(2).all(|w| w[1] <= w[0] + slack));
            let side = (r0 - rs).signum();
            assert!(traj
                .samples
                .iter()
                .all(|s| (s.radius - rs).abs() <= slack || (s.radius - rs).signum() == side));
        }
    }

    #[test]
    fn samples_ordered_and_consistent() {
        let p = desk(6.0, 0.5, 2.5);
        let traj = integrate(0.1, &p, 30.0, Tolerances::default()).unwrap();
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t));
        for s in &traj.samples {
            assert!(s.radius > 0.0);
            assert!(s.free_boundary >= 0.0 && s.free_boundary < s.radius);
            let (lo, hi) = traj.envelope(s.t);
            assert!(s.radius >= lo * (1.0 - 1e-7) && s.radius <= hi * (1.0 + 1e-7));
        }
    }

    #[test]
    fn tolerance_halving_is_stable() {
        let p = desk(6.0, 0.5, 3.5);
        let tol = Tolerances::default();
        let a = integrate(0.2, &p, 5.0, tol).unwrap().last().radius;
        let b = integrate(0.2, &p, 5.0, tol.halved()).unwrap().last().radius;
        assert!((a - b).abs() <= tol.rtol * a);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = desk(6.0, 0.5, 1.0);
        assert!(integrate(0.0, &p, 1.0, Tolerances::default()).is_err());
        assert!(integrate(1.0, &p, -1.0, Tolerances::default()).is_err());
        assert!(integrate(1.0, &desk(6.0, 1.5, 1.0), 1.0, Tolerances::default()).is_err());
    }

    proptest! {
        #[test]
        fn growth_rate_bounds_and_monotone(
            eps in 0.01f64..0.99,
            lambda in 0.5f64..20.0,
            eta in 0.0f64..20.0,
            x in 0.05f64..20.0,
        ) {
            let p = desk(lambda, eps, eta);
            let h = growth_rate(x, &p).unwrap();
            let tol = 1e-12 * lambda;
            prop_assert!(h >= (lambda * eps - eta) / 3.0 - tol);
            prop_assert!(h <= (lambda - eta) / 3.0 + tol);
            let rs = phase_radius(&p).unwrap();
            if x > rs {
                prop_assert!(growth_rate(x * 1.01, &p).unwrap() < h);
            }
        }
    }
}
