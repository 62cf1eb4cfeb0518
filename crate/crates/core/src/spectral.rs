//! Eigenvalues of the Green kernel restricted to the free-boundary sphere and the
//! invertibility condition of the linearised free-boundary map.
//!
//! The kernel is zonal, so degree-`l` spherical harmonics are eigenfunctions and
//! every quantity reduces to Legendre polynomials of `c = cos γ`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::stationary::{lambda2_formula, transmission_residual};

/// The constant degree-zero eigenfunction on the unit sphere.
pub const PHI_00: f64 = -1.0 / (4.0 * PI);

/// Default highest degree in an [`SpectralReport`].
pub const DEFAULT_L_MAX: usize = 32;

/// `|condition_0| ≤ DEGENERACY_REL · ε/3` counts as degenerate.
pub const DEGENERACY_REL: f64 = 1e-8;

/// Transmission residual allowed on the radius passed to [`invertibility_report`].
pub const REPORT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub l: usize,
    pub sigma_l: f64,
    pub condition_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub r0: f64,
    pub radius: f64,
    pub eps: f64,
    pub rows: Vec<SpectralRow>,
    pub invertible: bool,
    pub degenerate_l0: bool,
    pub phi00: f64,
}

fn check_radii(r0: f64, radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!("R must be positive and finite, got {radius}")));
    }
    if !(r0 > 0.0 && r0 < radius) {
        return Err(Error::domain(format!("r0 must lie in (0, {radius}), got {r0}")));
    }
    Ok(())
}

/// `σ_l = (1/r0)·((r0/R)^{2l+1} − 1)/(2l + 1)`.
pub fn sigma(l: usize, r0: f64, radius: f64) -> Result<f64> {
    check_radii(r0, radius)?;
    let n = (2 * l + 1) as f64;
    Ok(((r0 / radius).powf(n) - 1.0) / (n * r0))
}

/// `ε/3 − (1 − ε)·r0·σ_l`; the linearised map is invertible when this is nonzero for every `l`.
pub fn condition(l: usize, eps: f64, r0: f64, radius: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite() && eps != 1.0) {
        return Err(Error::invalid(format!("eps must be positive, finite and ≠ 1, got {eps}")));
    }
    Ok(eps / 3.0 - (1.0 - eps) * r0 * sigma(l, r0, radius)?)
}

/// Conditions for `l = 0..=l_max` at the free boundary `r0` of `p`.
pub fn invertibility_report(p: &ModelParams, r0: f64, l_max: usize) -> Result<SpectralReport> {
    p.validate()?;
    if l_max < 1 {
        return Err(Error::invalid("l_max must be at least 1"));
    }
    check_radii(r0, p.radius).map_err(|e| Error::invalid(e.to_string()))?;
    let res = transmission_residual(r0, p)?;
    if res > REPORT_RESIDUAL_TOL {
        return Err(Error::invalid(format!(
            "r0 = {r0} is not a free boundary (transmission residual {res:e})"
        )));
    }
    let rows = (0..=l_max)
        .into_par_iter()
        .map(|l| {
            Ok(SpectralRow {
                l,
                sigma_l: sigma(l, r0, p.radius)?,
                condition_l: condition(l, p.eps, r0, p.radius)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = DEGENERACY_REL * p.eps / 3.0;
    Ok(SpectralReport {
        r0,
        radius: p.radius,
        eps: p.eps,
        invertible: rows.iter().all(|r| r.condition_l.abs() > tol),
        degenerate_l0: rows[0].condition_l.abs() <= tol,
        rows,
        phi00: PHI_00,
    })
}

/// `μ* = u_inf − ε²R²(4ε/3 − 3/2)λ/(27(ε − 1)²)`: the threshold at which `λ` equals `λ₂`.
pub fn mu_star(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if lambda2_formula(1.0, p.eps, p.radius).is_none() {
        return Err(Error::invalid("mu* is undefined at eps = 9/8"));
    }
    let m = p.u_inf
        - p.eps * p.eps * p.radius * p.radius * (4.0 * p.eps / 3.0 - 1.5) * p.lambda
            / (27.0 * (p.eps - 1.0).powi(2));
    if !(m > 0.0) {
        return Err(Error::domain(format!("mu* = {m} is not positive")));
    }
    Ok(m)
}

/// Green kernel of the ball restricted to the sphere `|x| = r0`, as a function of `c = cos γ`:
/// `−1/(4π r0 √(2(1−c))) + 1/(4π R √(1 + ρ⁴ − 2ρ²c))` with `ρ = r0/R`.
pub fn kernel_closed(r0: f64, radius: f64, c: f64) -> Result<f64> {
    check_radii(r0, radius)?;
    if !(-1.0..1.0).contains(&c) {
        return Err(Error::domain(format!("kernel needs -1 ≤ c < 1, got {c}")));
    }
    let rho = r0 / radius;
    let near = -1.0 / (4.0 * PI * r0 * (2.0 * (1.0 - c)).sqrt());
    let image = 1.0 / (4.0 * PI * radius * (1.0 + rho.powi(4) - 2.0 * rho * rho * c).sqrt());
    Ok(near + image)
}

/// Partial sum `(1/(4π r0)) Σ_{l=0}^{L} (ρ^{2l+1} − 1) P_l(c)` of the kernel's Legendre expansion.
pub fn kernel_series(r0: f64, radius: f64, c: f64, l_trunc: usize) -> Result<f64> {
    check_radii(r0, radius)?;
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::domain(format!("kernel series needs |c| ≤ 1, got {c}")));
    }
    let rho = r0 / radius;
    let rho2 = rho * rho;
    let (mut p_prev, mut p_cur) = (0.0, 1.0);
    let mut geo = rho;
    let mut sum = 0.0;
    for l in 0..=l_trunc {
        sum += (geo - 1.0) * p_cur;
        let lf = l as f64;
        let p_next = ((2.0 * lf + 1.0) * c * p_cur - lf * p_prev) / (lf + 1.0);
        p_prev = p_cur;
        p_cur = p_next;
        geo *= rho2;
    }
    Ok(sum / (4.0 * PI * r0))
}

/// `P_l(t)` by the three-term recurrence `(l+1)P_{l+1} = (2l+1)tP_l − lP_{l−1}`.
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p_prev, mut p_cur) = (0.0, 1.0);
    for k in 0..l {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * t * p_cur - kf * p_prev) / (kf + 1.0);
        p_prev = p_cur;
        p_cur = p_next;
    }
    p_cur
}
