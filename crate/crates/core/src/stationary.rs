//! Radial stationary solutions and their free boundaries.
//!
//! Inside a ball of radius `R` the concentration solves
//! `(1/r²)(r²u')' = λ(ε + (1 − ε)H(u − μ))`, `u(R) = u_inf`, `u'(0) = 0`.
//! Either `u(0) > μ` and there is no interior switch, or a sphere `r = r_λ`
//! separates the quiescent core (`u < μ`, rate `λε`) from the proliferating shell.
//! Matching `u'` across the sphere gives the scalar condition `g(r_λ) = λ`, which
//! is equivalent to the cubic
//! `−(ε − 1)/R · r³ + (ε − 3/2) r² + R²/2 − 3(u_inf − μ)/λ = 0`.
//!
//! Each branch has a closed form (trigonometric or Cardano); every closed-form root
//! is cross-checked against the generic cubic solver and against the transmission
//! residual before it is returned.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{self, clamp_unit, Cubic, DepressedCubic};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Relative tolerance for deciding that λ sits exactly on a threshold.
const THRESHOLD_TOL: f64 = 1e-12;

/// Roots below this fraction of `R` are ignored when comparing closed forms with Cardano.
const CROSS_CHECK_FLOOR: f64 = 1e-6;

/// Relative distance allowed between a closed-form root and the matching Cardano root.
const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `λ₁ = 6(u_inf − μ)/R²`: below it the solution has no free boundary.
    pub lambda1: f64,
    /// `λ₂`, the minimum of `g` when ε > 3/2. `None` at ε = 9/8 where the formula divides by zero.
    pub lambda2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpsRegime {
    /// ε ∈ (0, 1)
    LowSubOne,
    /// ε ∈ (1, 9/8]
    LowSuperOne,
    /// ε ∈ (9/8, 3/2)
    Mid,
    /// ε = 3/2
    Critical,
    /// ε > 3/2
    High,
}

impl EpsRegime {
    pub const ALL: [EpsRegime; 5] = [
        EpsRegime::LowSubOne,
        EpsRegime::LowSuperOne,
        EpsRegime::Mid,
        EpsRegime::Critical,
        EpsRegime::High,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EpsRegime::LowSubOne => "low_sub_one",
            EpsRegime::LowSuperOne => "low_super_one",
            EpsRegime::Mid => "mid",
            EpsRegime::Critical => "critical",
            EpsRegime::High => "high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// The only free boundary for these parameters.
    Unique,
    /// Larger of the two roots when ε > 3/2 and λ ∈ (λ₂, λ₁].
    Upper,
    /// Smaller of the two roots when ε > 3/2 and λ ∈ (λ₂, λ₁).
    Lower,
    /// The double root `r_{λ₂}` at λ = λ₂.
    CriticalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundary {
    pub radius: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionKind {
    NoFreeBoundary,
    WithFreeBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarySolution {
    pub params: ModelParams,
    pub free_boundary: Option<FreeBoundary>,
    /// `u(0)`, the minimum of the profile.
    pub center: f64,
}

impl StationarySolution {
    pub fn kind(&self) -> SolutionKind {
        match self.free_boundary {
            None => SolutionKind::NoFreeBoundary,
            Some(_) => SolutionKind::WithFreeBoundary,
        }
    }

    pub fn label(&self) -> BranchLabel {
        match self.free_boundary {
            None => BranchLabel::NoFreeBoundary,
            Some(fb) => BranchLabel::from(fb.branch),
        }
    }
}

/// Branch identity used in bifurcation diagrams. Stable across a λ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchLabel {
    NoFreeBoundary,
    Unique,
    Upper,
    Lower,
    CriticalPoint,
}

impl BranchLabel {
    pub fn id(self) -> &'static str {
        match self {
            BranchLabel::NoFreeBoundary => "no_free_boundary",
            BranchLabel::Unique => "unique",
            BranchLabel::Upper => "upper",
            BranchLabel::Lower => "lower",
            BranchLabel::CriticalPoint => "critical_point",
        }
    }
}

impl From<Branch> for BranchLabel {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Unique => BranchLabel::Unique,
            Branch::Upper => BranchLabel::Upper,
            Branch::Lower => BranchLabel::Lower,
            Branch::CriticalPoint => BranchLabel::CriticalPoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Bound on `|g(r) − λ| / λ` for every returned free boundary.
    pub residual_tol: f64,
    /// Relative tolerance for the discriminant classification in the Cardano cross-check.
    pub cubic_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            cubic_tol: cubic::DEFAULT_TOL,
        }
    }
}

/// `λ₂ = 27(u_inf − μ)(ε − 1)² / (ε² R² (4ε/3 − 3/2))`, `None` when ε = 9/8.
pub fn lambda2_formula(drop: f64, eps: f64, radius: f64) -> Option<f64> {
    let denom = eps * eps * radius * radius * (4.0 * eps / 3.0 - 1.5);
    if denom.abs() <= 1e-15 * eps * eps * radius * radius {
        return None;
    }
    Some(27.0 * drop * (eps - 1.0).powi(2) / denom)
}

pub fn thresholds(p: &ModelParams) -> Result<Thresholds> {
    p.validate()?;
    Ok(Thresholds {
        lambda1: 6.0 * p.drop() / (p.radius * p.radius),
        lambda2: lambda2_formula(p.drop(), p.eps, p.radius),
    })
}

/// `r_{λ₂} = (2ε − 3)R / (3(ε − 1))`, the minimiser of `g`. Inside `(0, R)` only for ε > 3/2.
pub fn critical_radius(eps: f64, radius: f64) -> f64 {
    (2.0 * eps - 3.0) * radius / (3.0 * (eps - 1.0))
}

fn g_denominator(r: f64, p: &ModelParams) -> f64 {
    let big_r = p.radius;
    (p.eps - 1.0) * r * r * (big_r - r) / big_r + 0.5 * (big_r * big_r - r * r)
}

/// The transmission function `g(r) = 3(u_inf − μ) / ((ε − 1) r² (R − r)/R + (R² − r²)/2)`.
///
/// A sphere of radius `r` is a free boundary exactly when `g(r) = λ`.
pub fn g(r: f64, p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if !(r > 0.0 && r < p.radius) {
        return Err(Error::domain(format!("g needs 0 < r < R = {}, got r = {r}", p.radius)));
    }
    let den = g_denominator(r, p);
    if !(den > 0.0) {
        return Err(Error::domain(format!("g denominator {den} is not positive at r = {r}")));
    }
    Ok(3.0 * p.drop() / den)
}

/// `|g(r) − λ| / λ`.
pub fn transmission_residual(r: f64, p: &ModelParams) -> Result<f64> {
    Ok((g(r, p)? - p.lambda).abs() / p.lambda)
}

pub fn classify_regime(eps: f64) -> Result<EpsRegime> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(format!("eps must be positive and finite, got {eps}")));
    }
    if eps == 1.0 {
        return Err(Error::invalid("eps = 1 has no free-boundary regime"));
    }
    Ok(if eps < 1.0 {
        EpsRegime::LowSubOne
    } else if eps <= 1.125 {
        EpsRegime::LowSuperOne
    } else if eps < 1.5 {
        EpsRegime::Mid
    } else if eps == 1.5 {
        EpsRegime::Critical
    } else {
        EpsRegime::High
    })
}

/// The cubic whose roots in `(0, R)` are the free boundaries.
pub fn transmission_cubic(p: &ModelParams) -> Result<Cubic> {
    p.validate()?;
    let r = p.radius;
    Cubic::new(
        -(p.eps - 1.0) / r,
        p.eps - 1.5,
        0.0,
        0.5 * r * r - 3.0 * p.drop() / p.lambda,
    )
}

/// Discriminant of the transmission cubic in factored form,
/// `(R²d / (ε−1)²) · (d + 4(ε − 3/2)³R² / (27(ε−1)²))` with `d = R²/2 − 3(u_inf − μ)/λ`.
///
/// The second factor vanishes at λ = λ₂, the first at λ = λ₁.
pub fn transmission_discriminant_factored(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let r2 = p.radius * p.radius;
    let d = 0.5 * r2 - 3.0 * p.drop() / p.lambda;
    let e1 = (p.eps - 1.0).powi(2);
    Ok((r2 * d / e1) * (d + 4.0 * (p.eps - 1.5).powi(3) * r2 / (27.0 * e1)))
}

/// `A(λ) = 1 + 27(ε − 1)²(R²/2 − 3(u_inf − μ)/λ) / (2(ε − 3/2)³R²)`, the `arccos`
/// argument of the trigonometric root formulas, written in domain-radius units.
pub(crate) fn trig_argument(eps: f64, radius: f64, drop: f64, lambda: f64) -> f64 {
    let r2 = radius * radius;
    1.0 + 27.0 * (eps - 1.0).powi(2) * (0.5 * r2 - 3.0 * drop / lambda)
        / (2.0 * (eps - 1.5).powi(3) * r2)
}

/// `(ε − 3/2)R/(3(ε − 1)) · [1 + 2cos(arccos(A)/3 + phase)]`.
pub(crate) fn trig_root(eps: f64, radius: f64, drop: f64, lambda: f64, phase: f64) -> Result<f64> {
    let a = clamp_unit(trig_argument(eps, radius, drop, lambda))?;
    let k = (eps - 1.5) * radius / (3.0 * (eps - 1.0));
    Ok(k * (1.0 + 2.0 * (a.acos() / 3.0 + phase).cos()))
}

/// Cardano form `(ε − 3/2)R/(3(ε − 1)) + ∛((−q+√Δ)/2) + ∛((−q−√Δ)/2)`.
fn cardano_root(p: &ModelParams) -> Result<f64> {
    let c = transmission_cubic(p)?;
    let d: DepressedCubic = cubic::depress(&c)?;
    Ok(c.shift() + cubic::cardano_single_root(&d))
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= THRESHOLD_TOL * y.abs()
}

/// Closed-form free boundaries by regime, before validation.
fn closed_form_roots(p: &ModelParams, th: &Thresholds) -> Result<Vec<FreeBoundary>> {
    let lam = p.lambda;
    let l1 = th.lambda1;
    let above_l1 = lam > l1 && !near(lam, l1);
    let (eps, big_r, drop) = (p.eps, p.radius, p.drop());
    let fb = |radius, branch| FreeBoundary { radius, branch };

    let roots = match classify_regime(eps)? {
        EpsRegime::High => {
            let l2 = th
                .lambda2
                .ok_or_else(|| Error::internal("λ₂ undefined for ε > 3/2"))?;
            if near(lam, l2) {
                vec![fb(critical_radius(eps, big_r), Branch::CriticalPoint)]
            } else if lam < l2 {
                vec![]
            } else if !above_l1 {
                let upper = trig_root(eps, big_r, drop, lam, 0.0)?;
                if near(lam, l1) {
                    vec![fb(upper, Branch::Upper)]
                } else {
                    let lower = trig_root(eps, big_r, drop, lam, 4.0 * PI / 3.0)?;
                    vec![fb(lower, Branch::Lower), fb(upper, Branch::Upper)]
                }
            } else {
                vec![fb(cardano_root(p)?, Branch::Unique)]
            }
        }
        EpsRegime::LowSubOne if above_l1 => {
            vec![fb(trig_root(eps, big_r, drop, lam, 4.0 * PI / 3.0)?, Branch::Unique)]
        }
        EpsRegime::LowSuperOne if above_l1 => {
            vec![fb(trig_root(eps, big_r, drop, lam, 2.0 * PI / 3.0)?, Branch::Unique)]
        }
        EpsRegime::Mid if above_l1 => {
            let l2 = th
                .lambda2
                .ok_or_else(|| Error::internal("λ₂ undefined for 9/8 < ε < 3/2"))?;
            if lam < l2 && !near(lam, l2) {
                vec![fb(trig_root(eps, big_r, drop, lam, 2.0 * PI / 3.0)?, Branch::Unique)]
            } else {
                vec![fb(cardano_root(p)?, Branch::Unique)]
            }
        }
        EpsRegime::Critical if above_l1 => {
            let r = (big_r * (big_r * big_r - 6.0 * drop / lam)).cbrt();
            vec![fb(r, Branch::Unique)]
        }
        _ => vec![],
    };
    Ok(roots)
}

/// All free boundaries for `p`, ascending.
///
/// Fails with an internal-consistency error if the closed forms and the generic
/// Cardano solve disagree, or if a root misses the transmission condition.
pub fn free_boundaries(p: &ModelParams, opts: &SolveOptions) -> Result<Vec<FreeBoundary>> {
    let th = thresholds(p)?;
    let roots = closed_form_roots(p, &th)?;
    let big_r = p.radius;

    for fb in &roots {
        if !(fb.radius > 0.0 && fb.radius < big_r) {
            return Err(Error::internal(format!(
                "closed-form free boundary {} outside (0, {big_r}) for {p:?}",
                fb.radius
            )));
        }
        let res = transmission_residual(fb.radius, p)?;
        if res > opts.residual_tol {
            return Err(Error::internal(format!(
                "free boundary {} has transmission residual {res:e} for {p:?}",
                fb.radius
            )));
        }
    }

    let floor = CROSS_CHECK_FLOOR * big_r;
    let cardano: Vec<f64> = cubic::solve_cubic(&transmission_cubic(p)?, opts.cubic_tol)?
        .values()
        .into_iter()
        .filter(|&r| r > floor && r < big_r)
        .filter(|&r| transmission_residual(r, p).is_ok_and(|res| res <= 1e-6))
        .collect();
    let closed: Vec<f64> = roots.iter().map(|f| f.radius).filter(|&r| r > floor).collect();
    let covered = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| (x - y).abs() <= CROSS_CHECK_TOL * big_r))
    };
    if !covered(&closed, &cardano) || !covered(&cardano, &closed) {
        return Err(Error::internal(format!(
            "closed-form roots {closed:?} disagree with Cardano roots {cardano:?} for {p:?}"
        )));
    }
    Ok(roots)
}

/// Every stationary solution for `p`: the no-free-boundary solution when λ < λ₁,
/// followed by free-boundary solutions in ascending order of radius.
pub fn solve_stationary(p: &ModelParams) -> Result<Vec<StationarySolution>> {
    solve_stationary_with(p, &SolveOptions::default())
}

pub fn solve_stationary_with(p: &ModelParams, opts: &SolveOptions) -> Result<Vec<StationarySolution>> {
    let th = thresholds(p)?;
    let mut out = Vec::new();
    if p.lambda < th.lambda1 && !near(p.lambda, th.lambda1) {
        out.push(StationarySolution {
            params: *p,
            free_boundary: None,
            center: -p.lambda * p.radius * p.radius / 6.0 + p.u_inf,
        });
    }
    for fb in free_boundaries(p, opts)? {
        out.push(StationarySolution {
            params: *p,
            free_boundary: Some(fb),
            center: -p.lambda * p.eps * fb.radius * fb.radius / 6.0 + p.mu,
        });
    }
    Ok(out)
}

/// `u(r)` for a stationary solution, `r ∈ [0, R]`.
pub fn profile(s: &StationarySolution, r: f64) -> Result<f64> {
    let p = &s.params;
    let big_r = p.radius;
    if !(0.0..=big_r).contains(&r) {
        return Err(Error::domain(format!("profile needs 0 ≤ r ≤ {big_r}, got {r}")));
    }
    let lam = p.lambda;
    Ok(match s.free_boundary {
        None => lam * (r * r - big_r * big_r) / 6.0 + p.u_inf,
        Some(fb) => {
            let rf = fb.radius;
            if r <= rf {
                lam * p.eps * (r * r - rf * rf) / 6.0 + p.mu
            } else {
                let jump = p.mu - p.u_inf - lam * (rf * rf - big_r * big_r) / 6.0;
                p.u_inf + lam * (r * r - big_r * big_r) / 6.0 + (r - big_r) * rf / ((rf - big_r) * r) * jump
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub lambda: f64,
    pub branch: BranchLabel,
    /// `u(0)` on this branch.
    pub center: f64,
    pub free_boundary: Option<f64>,
    /// `|g(r) − λ|/λ` for free-boundary branches, zero otherwise.
    pub residual: f64,
}

/// One point per stationary solution for every λ of the (ascending) grid.
pub fn bifurcation_diagram(base: &ModelParams, lambda_grid: &[f64]) -> Result<Vec<BifurcationPoint>> {
    if lambda_grid.is_empty() {
        return Err(Error::invalid("λ grid is empty"));
    }
    if lambda_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("λ grid must be strictly ascending"));
    }
    let per_lambda: Vec<Vec<BifurcationPoint>> = lambda_grid
        .par_iter()
        .map(|&lambda| {
            let p = base.with_lambda(lambda);
            solve_stationary(&p)?
                .into_iter()
                .map(|s| {
                    let residual = match s.free_boundary {
                        Some(fb) => transmission_residual(fb.radius, &p)?,
                        None => 0.0,
                    };
                    Ok(BifurcationPoint {
                        lambda,
                        branch: s.label(),
                        center: s.center,
                        free_boundary: s.free_boundary.map(|f| f.radius),
                        residual,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_lambda.into_iter().flatten().collect())
}

/// `R* = √(6(u_inf − μ)/λ)`: balls smaller than this have no free boundary.
pub fn phase_radius(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    Ok((6.0 * p.drop() / p.lambda).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn desk(lambda: f64, eps: f64) -> ModelParams {
        ModelParams::new(lambda, eps, 0.5, 1.0, 1.0, 0.0).unwrap()
    }

    /// Sign-change scan of `g − λ` followed by bisection; the test-local oracle.
    fn scan_roots(p: &ModelParams, n: usize) -> Vec<f64> {
        let f = |r: f64| g(r, p).unwrap() - p.lambda;
        let mut out = vec![];
        let h = p.radius / n as f64;
        let mut prev = f(h);
        for i in 2..n {
            let r = h * i as f64;
            let v = f(r);
            if prev.signum() != v.signum() {
                let (mut lo, mut hi) = (r - h, r);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid).signum() == f(lo).signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = v;
        }
        out
    }

    #[test]
    fn threshold_examples() {
        let th = thresholds(&desk(1.0, 2.0)).unwrap();
        assert_relative_eq!(th.lambda1, 3.0, max_relative = 1e-15);
        assert_relative_eq!(th.lambda2.unwrap(), 40.5 / 14.0, max_relative = 1e-14);
        assert!(thresholds(&desk(1.0, 1.125)).unwrap().lambda2.is_none());
    }

    #[test]
    fn g_limits() {
        let p = desk(1.0, 2.0);
        assert_relative_eq!(g(1e-9, &p).unwrap(), 3.0, max_relative = 1e-8);
        let rc = critical_radius(2.0, 1.0);
        assert_relative_eq!(g(rc, &p).unwrap(), 40.5 / 14.0, max_relative = 1e-14);
        assert!(g(0.0, &p).is_err());
        assert!(g(1.0, &p).is_err());
    }

    #[test]
    fn g_two_ways() {
        // Expanded denominator: R²/2 + (ε − 3/2) r² − (ε − 1) r³/R.
        let p = desk(1.0, 0.5);
        let r = 0.5f64;
        let expanded = 3.0 * 0.5 / (0.5 + (0.5 - 1.5) * r * r - (0.5 - 1.0) * r * r * r);
        assert_relative_eq!(g(r, &p).unwrap(), expanded, max_relative = 1e-15);
        assert_relative_eq!(expanded, 1.5 / 0.3125, max_relative = 1e-15);
    }

    #[test]
    fn regimes() {
        assert_eq!(classify_regime(2.0).unwrap(), EpsRegime::High);
        assert_eq!(classify_regime(0.5).unwrap(), EpsRegime::LowSubOne);
        assert_eq!(classify_regime(1.5).unwrap(), EpsRegime::Critical);
        assert_eq!(classify_regime(1.125).unwrap(), EpsRegime::LowSuperOne);
        assert_eq!(classify_regime(1.2).unwrap(), EpsRegime::Mid);
        assert!(classify_regime(1.0).is_err());
        assert!(classify_regime(0.0).is_err());
        assert!(classify_regime(-2.0).is_err());
    }

    #[test]
    fn no_free_boundary_below_lambda2() {
        let sols = solve_stationary(&desk(2.0, 2.0)).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].kind(), SolutionKind::NoFreeBoundary);
        assert_relative_eq!(sols[0].center, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn critical_eps_closed_form() {
        let sols = solve_stationary(&desk(6.0, 1.5)).unwrap();
        assert_eq!(sols.len(), 1);
        let fb = sols[0].free_boundary.unwrap();
        assert_relative_eq!(fb.radius, 0.5f64.cbrt(), max_relative = 1e-14);
    }

    #[test]
    fn two_roots_between_thresholds() {
        let p = desk(2.95, 2.0);
        let fbs = free_boundaries(&p, &SolveOptions::default()).unwrap();
        assert_eq!(fbs.len(), 2);
        assert_eq!(fbs[0].branch, Branch::Lower);
        assert_eq!(fbs[1].branch, Branch::Upper);
        assert!(fbs[0].radius < fbs[1].radius);
        let oracle = scan_roots(&p, 100_000);
        assert_eq!(oracle.len(), 2);
        for (fb, o) in fbs.iter().zip(&oracle) {
            assert!(transmission_residual(fb.radius, &p).unwrap() <= 1e-9);
            assert_relative_eq!(fb.radius, *o, max_relative = 1e-9);
        }
    }

    #[test]
    fn critical_point_at_lambda2() {
        let l2 = thresholds(&desk(1.0, 2.0)).unwrap().lambda2.unwrap();
        let sols = solve_stationary(&desk(l2, 2.0)).unwrap();
        assert_eq!(sols.len(), 2);
        let fb = sols[1].free_boundary.unwrap();
        assert_eq!(fb.branch, Branch::CriticalPoint);
        assert_relative_eq!(fb.radius, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn lambda1_boundary_excludes_origin() {
        // ε > 3/2: only the upper root survives at λ = λ₁ and there is no NoFB solution.
        let sols = solve_stationary(&desk(3.0, 2.0)).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].free_boundary.unwrap().branch, Branch::Upper);
        assert_relative_eq!(sols[0].free_boundary.unwrap().radius, 0.5, max_relative = 1e-12);
        // ε < 1: the root at λ₁ is r = 0, not a free boundary.
        assert!(solve_stationary(&desk(3.0, 0.5)).unwrap().is_empty());
    }

    #[test]
    fn every_regime_matches_scan() {
        for &(eps, lambda) in &[
            (0.5, 4.0),
            (0.5, 10.0),
            (0.9, 50.0),
            (1.05, 4.0),
            (1.1, 10.0),
            (1.125, 5.0),
            (1.3, 3.05),
            (1.3, 3.5),
            (1.3, 20.0),
            (1.4, 3.002),
            (1.4, 10.0),
            (1.5, 3.5),
            (2.0, 5.0),
            (5.0, 2.0),
        ] {
            let p = desk(lambda, eps);
            let got: Vec<f64> = free_boundaries(&p, &SolveOptions::default())
                .unwrap()
                .iter()
                .map(|f| f.radius)
                .collect();
            let want = scan_roots(&p, 100_000);
            assert_eq!(got.len(), want.len(), "eps={eps} lambda={lambda}");
            for (a, b) in got.iter().zip(&want) {
                assert_relative_eq!(*a, *b, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn discriminant_factored_form() {
        for &(eps, lambda) in &[(0.5, 4.0), (1.3, 3.05), (2.0, 2.95), (2.0, 5.0), (7.0, 0.3)] {
            let p = desk(lambda, eps);
            let d = cubic::depress(&transmission_cubic(&p).unwrap()).unwrap();
            let assembled = cubic::discriminant(&d);
            let factored = transmission_discriminant_factored(&p).unwrap();
            assert_relative_eq!(assembled, factored, max_relative = 1e-10);
            // A variant with an extra 1/2 in the first factor is off by exactly 2.
            let r2 = 1.0;
            let dd = 0.5 * r2 - 1.5 / lambda;
            let e1 = (eps - 1.0f64).powi(2);
            let halved = (r2 * dd / (2.0 * e1)) * (dd + 4.0 * (eps - 1.5f64).powi(3) * r2 / (27.0 * e1));
            assert_relative_eq!(assembled, 2.0 * halved, max_relative = 1e-10);
        }
    }

    #[test]
    fn profile_boundary_and_continuity() {
        for &(eps, lambda) in &[(0.5, 6.0), (2.0, 2.95), (1.5, 6.0), (1.3, 20.0)] {
            for s in solve_stationary(&desk(lambda, eps)).unwrap() {
                assert_relative_eq!(profile(&s, 1.0).unwrap(), 1.0, epsilon = 1e-14);
                if let Some(fb) = s.free_boundary {
                    let rf = fb.radius;
                    assert_relative_eq!(profile(&s, rf).unwrap(), 0.5, epsilon = 1e-14);
                    let outer = profile(&s, rf * (1.0 + 1e-15)).unwrap();
                    assert!((outer - 0.5).abs() < 1e-12);
                    // One-sided finite differences around the free boundary.
                    let h = 1e-6 * rf;
                    let left = (3.0 * profile(&s, rf).unwrap() - 4.0 * profile(&s, rf - h).unwrap()
                        + profile(&s, rf - 2.0 * h).unwrap())
                        / (2.0 * h);
                    let right = (-3.0 * profile(&s, rf).unwrap() + 4.0 * profile(&s, rf + h).unwrap()
                        - profile(&s, rf + 2.0 * h).unwrap())
                        / (2.0 * h);
                    assert!((left - right).abs() <= 1e-6, "derivative jump {}", left - right);
                    // Analytic derivatives: λεr/3 inside, λr/3 + C R/(r(r − R)) outside.
                    let inner = lambda * eps * rf / 3.0;
                    let c = 0.5 - 1.0 - lambda * (rf * rf - 1.0) / 6.0;
                    let outer = lambda * rf / 3.0 + c / (rf * (rf - 1.0));
                    assert!((inner - outer).abs() <= 1e-9);
                }
                assert!(profile(&s, -0.1).is_err());
                assert!(profile(&s, 1.1).is_err());
            }
        }
    }

    #[test]
    fn profile_sign_structure_and_laplacian() {
        for &(eps, lambda) in &[(0.5, 6.0), (2.0, 2.95), (1.2, 9.0)] {
            for s in solve_stationary(&desk(lambda, eps)).unwrap() {
                let Some(fb) = s.free_boundary else { continue };
                let rf = fb.radius;
                for i in 1..200 {
                    let r = i as f64 / 200.0;
                    if (r - rf).abs() < 1e-9 {
                        continue;
                    }
                    let u = profile(&s, r).unwrap();
                    if r < rf {
                        assert!(u < 0.5);
                    } else {
                        assert!(u > 0.5);
                    }
                    // (1/r²)(r²u')' = u'' + 2u'/r by centered differences, away from the seam.
                    let h = 1e-4;
                    if (r - rf).abs() > 2.0 * h && r + h < 1.0 {
                        let (um, u0, up) = (
                            profile(&s, r - h).unwrap(),
                            u,
                            profile(&s, r + h).unwrap(),
                        );
                        let lap = (up - 2.0 * u0 + um) / (h * h) + (up - um) / (h * r);
                        let want = if r < rf { lambda * eps } else { lambda };
                        assert!((lap - want).abs() <= 1e-5 * want.max(1.0), "lap {lap} want {want}");
                    }
                }
            }
        }
    }

    #[test]
    fn bifurcation_counts_for_high_eps() {
        let base = desk(1.0, 2.0);
        let th = thresholds(&base).unwrap();
        let (l1, l2) = (th.lambda1, th.lambda2.unwrap());
        let grid = [0.5 * l2, l2, 0.5 * (l1 + l2), 1.5 * l1];
        let pts = bifurcation_diagram(&base, &grid).unwrap();
        let counts: Vec<usize> = grid
            .iter()
            .map(|l| pts.iter().filter(|p| p.lambda == *l).count())
            .collect();
        assert_eq!(counts, vec![1, 2, 3, 1]);
        let nofb: Vec<f64> = pts
            .iter()
            .filter(|p| p.branch == BranchLabel::NoFreeBoundary)
            .map(|p| p.center)
            .collect();
        assert!(nofb.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn bifurcation_rejects_bad_grid() {
        let base = desk(1.0, 2.0);
        assert!(bifurcation_diagram(&base, &[]).is_err());
        assert!(bifurcation_diagram(&base, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn phase_radius_examples() {
        assert_relative_eq!(phase_radius(&desk(3.0, 0.5)).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(phase_radius(&desk(6.0, 0.5)).unwrap(), 0.5f64.sqrt(), max_relative = 1e-15);
        let p = desk(4.2, 0.5);
        let rs = phase_radius(&p).unwrap();
        let l1 = thresholds(&p.with_radius(rs)).unwrap().lambda1;
        assert_relative_eq!(l1, 4.2, max_relative = 1e-14);
    }

    #[test]
    fn critical_point_is_minimum() {
        for eps in [1.6, 2.0, 3.5, 9.0] {
            let p = desk(1.0, eps);
            let rc = critical_radius(eps, 1.0);
            let h = 1e-6;
            let slope = (g(rc + h, &p).unwrap() - g(rc - h, &p).unwrap()) / (2.0 * h);
            assert!(slope.abs() <= 1e-6);
        }
    }

    proptest! {
        #[test]
        fn denominator_positive_below_one(eps in 1e-6f64..0.999_999, x in 1e-9f64..(1.0 - 1e-9)) {
            let p = desk(1.0, eps);
            prop_assert!(g_denominator(x, &p) > 0.0);
        }

        #[test]
        fn returned_roots_satisfy_transmission(
            eps in prop_oneof![0.01f64..0.99, 1.01f64..1.125, 1.13f64..1.49, 1.51f64..12.0],
            scale in 0.05f64..3.0,
            radius in 0.2f64..5.0,
        ) {
            let base = ModelParams::new(1.0, eps, 0.5, 1.0, radius, 0.0).unwrap();
            let l1 = thresholds(&base).unwrap().lambda1;
            let p = base.with_lambda(scale * l1);
            let fbs = free_boundaries(&p, &SolveOptions::default()).unwrap();
            for w in fbs.windows(2) {
                prop_assert!(w[0].radius < w[1].radius);
            }
            for fb in fbs {
                prop_assert!(fb.radius > 0.0 && fb.radius < radius);
                prop_assert!(transmission_residual(fb.radius, &p).unwrap() <= 1e-9);
            }
        }
    }
}
