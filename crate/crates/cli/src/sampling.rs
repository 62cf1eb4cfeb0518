//! Seeded random parameter draws per ε-regime, shared by `verify` and the test suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tumorfb::cubic::Cubic;
use tumorfb::stationary::{thresholds, EpsRegime};
use tumorfb::ModelParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn eps_in<R: Rng>(regime: EpsRegime, rng: &mut R) -> f64 {
    match regime {
        EpsRegime::LowSubOne => rng.gen_range(0.02..0.98),
        EpsRegime::LowSuperOne => rng.gen_range(1.002..=1.125),
        EpsRegime::Mid => rng.gen_range(1.126..1.498),
        EpsRegime::Critical => 1.5,
        EpsRegime::High => rng.gen_range(1.502..10.0),
    }
}

/// Desk-scale parameters with ε from `regime` and λ uniform on `(0, 3λ₁)`.
pub fn stationary_params<R: Rng>(regime: EpsRegime, rng: &mut R) -> ModelParams {
    let eps = eps_in(regime, rng);
    let mu = rng.gen_range(0.1..0.9);
    let u_inf = mu + rng.gen_range(0.1..1.0);
    let radius = rng.gen_range(0.5..2.0);
    let base = ModelParams::new(1.0, eps, mu, u_inf, radius, 0.0).expect("sampled parameters are valid");
    let l1 = thresholds(&base).expect("valid").lambda1;
    base.with_lambda(rng.gen_range(1e-3..3.0) * l1)
}

/// Which long-time regime a dynamics draw should land in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MortalityCase {
    Decay,
    Steady,
    Unbounded,
}

/// ε ∈ (0, 1) parameters with η placed in the requested band relative to `λε` and `λ`.
pub fn dynamics_params<R: Rng>(case: MortalityCase, rng: &mut R) -> ModelParams {
    let eps = rng.gen_range(0.05..0.95);
    let lambda = rng.gen_range(1.0..12.0);
    let mu = rng.gen_range(0.1..0.9);
    let u_inf = mu + rng.gen_range(0.1..1.0);
    let eta = match case {
        MortalityCase::Decay => lambda * rng.gen_range(1.05..2.0),
        MortalityCase::Steady => lambda * (eps + (1.0 - eps) * rng.gen_range(0.05..0.95)),
        MortalityCase::Unbounded => lambda * eps * rng.gen_range(0.0..0.95),
    };
    ModelParams::new(lambda, eps, mu, u_inf, 1.0, eta).expect("sampled parameters are valid")
}

/// A cubic built from its factorisation, with well-separated roots.
#[derive(Debug, Clone)]
pub struct PlantedCubic {
    pub cubic: Cubic,
    /// The real roots, ascending.
    pub roots: Vec<f64>,
}

/// `a(x − r₁)(x − r₂)(x − r₃)` or `a(x − r₁)((x − m)² + w²)` with root gaps and `w` at least 0.05.
pub fn planted_cubic<R: Rng>(rng: &mut R) -> PlantedCubic {
    let a = rng.gen_range(0.5..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let r1 = rng.gen_range(-5.0..5.0);
    let (b2, c2, mut roots) = if rng.gen_bool(0.5) {
        let r2 = r1 + rng.gen_range(0.05..3.0);
        let r3 = r2 + rng.gen_range(0.05..3.0);
        (-(r2 + r3), r2 * r3, vec![r1, r2, r3])
    } else {
        let m: f64 = rng.gen_range(-5.0..5.0);
        let w: f64 = rng.gen_range(0.05..3.0);
        (-2.0 * m, m * m + w * w, vec![r1])
    };
    roots.sort_by(f64::total_cmp);
    // a(x − r₁)(x² + b₂x + c₂)
    let cubic = Cubic::new(a, a * (b2 - r1), a * (c2 - r1 * b2), -a * r1 * c2).expect("finite coefficients");
    PlantedCubic { cubic, roots }
}

/// ε > 3/2 parameters with λ small enough that μ* stays positive.
pub fn mu_star_params<R: Rng>(rng: &mut R) -> ModelParams {
    let eps = eps_in(EpsRegime::High, rng);
    let u_inf = rng.gen_range(0.5..2.0);
    let radius = rng.gen_range(0.5..2.0);
    let lambda_max = u_inf * 27.0 * (eps - 1.0).powi(2) / (eps * eps * radius * radius * (4.0 * eps / 3.0 - 1.5));
    let lambda = rng.gen_range(0.1..0.9) * lambda_max;
    ModelParams::new(lambda, eps, 0.5 * u_inf, u_inf, radius, 0.0).expect("sampled parameters are valid")
}
