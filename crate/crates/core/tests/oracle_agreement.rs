//! Solvers against the brute-force oracles over random desk-scale parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tumorfb::oracle::{self, OracleConfig};
use tumorfb::stationary::{free_boundaries, thresholds, SolveOptions};
use tumorfb::{dynamics, ModelParams};

fn draw(rng: &mut ChaCha8Rng) -> ModelParams {
    let eps = match rng.gen_range(0..4) {
        0 => rng.gen_range(0.05..0.95),
        1 => rng.gen_range(1.01..1.49),
        2 => 1.5,
        _ => rng.gen_range(1.51..8.0),
    };
    let mu = rng.gen_range(0.1..0.9);
    let base = ModelParams::new(1.0, eps, mu, mu + rng.gen_range(0.1..1.0), rng.gen_range(0.5..2.0), 0.0).unwrap();
    let l1 = thresholds(&base).unwrap().lambda1;
    base.with_lambda(rng.gen_range(0.01..3.0) * l1)
}

#[test]
fn shooting_and_bisection_agree() {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    while compared < 200 {
        let p = draw(&mut rng);
        let roots = oracle::roots_by_bisection(&p, &cfg).unwrap();
        let Some(&r) = roots.last() else { continue };
        let guess = -p.lambda * p.eps * r * r / 6.0 + p.mu + 1e-4 * p.drop();
        let sol = oracle::shoot_to_boundary(&p, guess, &cfg).unwrap();
        let crossing = sol.crossing.unwrap();
        let nearest = roots
            .iter()
            .map(|o| (o - crossing).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest <= 1e-8, "{p:?}: shooting {crossing} vs {roots:?}");
        compared += 1;
    }
}

#[test]
fn closed_forms_match_bisection() {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..400 {
        let p = draw(&mut rng);
        let got = free_boundaries(&p, &SolveOptions::default()).unwrap();
        let want = oracle::roots_by_bisection(&p, &cfg).unwrap();
        assert_eq!(got.len(), want.len(), "{p:?}");
        for (a, b) in got.iter().zip(&want) {
            assert!((a.radius - b).abs() <= 1e-9 * b, "{p:?}: {} vs {b}", a.radius);
        }
    }
}

#[test]
fn oracles_are_deterministic() {
    let cfg = OracleConfig::default();
    let p = ModelParams::new(2.95, 2.0, 0.5, 1.0, 1.0, 0.0).unwrap();
    let a = oracle::roots_by_bisection(&p, &cfg).unwrap();
    let b = oracle::roots_by_bisection(&p, &cfg).unwrap();
    assert_eq!(a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
}

#[test]
fn steady_radius_matches_oracle() {
    let cfg = OracleConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let eps = rng.gen_range(0.05..0.95);
        let lambda = rng.gen_range(1.0..12.0);
        let eta = lambda * (eps + (1.0 - eps) * rng.gen_range(0.05..0.95));
        let p = ModelParams::new(lambda, eps, 0.5, 1.0, 1.0, eta).unwrap();
        let a = dynamics::steady_radius(&p).unwrap().unwrap();
        let b = oracle::steady_radius_bisection(&p, &cfg).unwrap().unwrap();
        assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }
}
