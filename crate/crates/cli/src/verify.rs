//! Seeded cross-checks of every solver against the independent oracles.

use tumorfb::cubic::{self, DiscriminantBranch};
use tumorfb::oracle::{self, OracleConfig};
use tumorfb::spectral::{self, sigma};
use tumorfb::stationary::{self, critical_radius, free_boundaries, g, lambda2_formula, EpsRegime, SolveOptions};
use tumorfb::{dynamics, Error};

use crate::output::{Cell, Table};
use crate::sampling::{self, MortalityCase};
use crate::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub skipped: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            cases: 0,
            skipped: 0,
            max_error: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, err: f64) {
        self.cases += 1;
        // NaN must fail the check.
        if !(err <= self.max_error) {
            self.max_error = if err.is_nan() { f64::INFINITY } else { err };
        }
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.max_error <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn table(&self, seed: u64) -> Table {
        let mut t = Table::new(&["check", "cases", "skipped", "max_error", "tolerance", "status"]);
        for c in &self.checks {
            t.push(vec![
                c.name.into(),
                c.cases.into(),
                c.skipped.into(),
                c.max_error.into(),
                c.tolerance.into(),
                Cell::from(if c.passed() { "PASS" } else { "FAIL" }),
            ]);
        }
        t.meta("seed", seed);
        t.meta("passed", self.all_passed());
        t.trailer
            .push(("result".into(), if self.all_passed() { "PASS" } else { "FAIL" }.into()));
        t
    }
}

/// Runs the oracle suite with `draws` random parameter sets per check (per regime where relevant).
pub fn run_checks(seed: u64, draws: usize) -> CliResult<Report> {
    let cfg = OracleConfig::default();
    let opts = SolveOptions::default();
    let mut rng = sampling::rng(seed);

    let mut count = Check::new("branch_count_mismatches", 0.0);
    let mut position = Check::new("fb_position_rel", 1e-9);
    let mut residual = Check::new("transmission_residual_rel", 1e-9);
    let mut shooting = Check::new("shooting_crossing_rel_R", 1e-8);
    for regime in EpsRegime::ALL {
        for _ in 0..draws {
            let p = sampling::stationary_params(regime, &mut rng);
            let fbs = free_boundaries(&p, &opts)?;
            let truth = oracle::roots_by_bisection(&p, &cfg)?;
            count.record(if fbs.len() == truth.len() { 0.0 } else { 1.0 });
            for fb in &fbs {
                residual.record(stationary::transmission_residual(fb.radius, &p)?);
                let nearest = nearest(&truth, fb.radius);
                position.record(nearest.map_or(f64::INFINITY, |o| (fb.radius - o).abs() / o));
            }
            if let Some(fb) = fbs.last() {
                let center = -p.lambda * p.eps * fb.radius * fb.radius / 6.0 + p.mu;
                match oracle::shoot_to_boundary(&p, center + 1e-4 * p.drop(), &cfg) {
                    Ok(sol) => {
                        let err = match (sol.crossing, nearest(&truth, sol.crossing.unwrap_or(f64::NAN))) {
                            (Some(c), Some(o)) => (c - o).abs() / p.radius,
                            _ => f64::INFINITY,
                        };
                        shooting.record(err);
                    }
                    Err(Error::DegenerateEvent(_)) => shooting.skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }

    let mut cubic_res = Check::new("cubic_root_residual", 1e-9);
    let mut cubic_law = Check::new("cubic_count_law_mismatches", 0.0);
    for _ in 0..draws * 50 {
        let planted = sampling::planted_cubic(&mut rng);
        let set = cubic::solve_cubic(&planted.cubic, cubic::DEFAULT_TOL)?;
        for x in set.values() {
            cubic_res.record(planted.cubic.relative_residual(x));
        }
        let expected = if planted.roots.len() == 3 {
            DiscriminantBranch::NegativeDelta
        } else {
            DiscriminantBranch::PositiveDelta
        };
        let ok = set.branch == expected && set.values().len() == planted.roots.len();
        cubic_law.record(if ok { 0.0 } else { 1.0 });
    }

    let mut quad = Check::new("sigma_vs_quadrature_abs", 1e-6);
    for frac in [0.25, 0.5, 0.9] {
        for l in 0..=10 {
            let q = oracle::quad_sigma(l, frac, 1.0, &cfg)?;
            quad.record((q - sigma(l, frac, 1.0)?).abs());
        }
    }

    let mut critical = Check::new("g_at_critical_radius_rel", 1e-10);
    let mut roundtrip = Check::new("mu_star_roundtrip_rel", 1e-12);
    for _ in 0..draws {
        let p = sampling::mu_star_params(&mut rng);
        let m = spectral::mu_star(&p)?;
        let l2 = lambda2_formula(p.u_inf - m, p.eps, p.radius).unwrap_or(f64::NAN);
        roundtrip.record((l2 - p.lambda).abs() / p.lambda);
        let th = stationary::thresholds(&p)?;
        let want = th.lambda2.unwrap_or(f64::NAN);
        critical.record((g(critical_radius(p.eps, p.radius), &p)? - want).abs() / want);
    }

    let mut steady = Check::new("steady_radius_rel", 1e-9);
    for _ in 0..draws.div_ceil(4) {
        let p = sampling::dynamics_params(MortalityCase::Steady, &mut rng);
        let a = dynamics::steady_radius(&p)?;
        let b = oracle::steady_radius_bisection(&p, &cfg)?;
        steady.record(match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() / b,
            _ => f64::INFINITY,
        });
    }

    Ok(Report {
        checks: vec![
            count, position, residual, shooting, cubic_res, cubic_law, quad, critical, roundtrip, steady,
        ],
    })
}

fn nearest(xs: &[f64], x: f64) -> Option<f64> {
    xs.iter()
        .copied()
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
}
