use serde_json::{json, Value};
use tumorfb::dynamics::{self, AsymptoticClass};
use tumorfb::ode::Tolerances;
use tumorfb::spectral;
use tumorfb::stationary::{self, classify_regime, thresholds, transmission_residual};
use tumorfb::ModelParams;

use crate::output::{num, Table};
use crate::{verify, CliError, CliResult, Command, OutputArgs};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    let (table, out) = match cmd {
        Command::Stationary { params, out } => (stationary_table(&params.params()?)?, out),
        Command::Bifurcation {
            params,
            lambda_min,
            lambda_max,
            points,
            no_thresholds,
            out,
        } => {
            let p = params.params()?;
            let grid = lambda_grid(&p, lambda_min, lambda_max, points, !no_thresholds)?;
            (bifurcation_table(&p, &grid)?, out)
        }
        Command::Simulate {
            params,
            r0,
            t_end,
            rtol,
            atol,
            out,
        } => (simulate_table(&params.params()?, r0, t_end, Tolerances { rtol, atol })?, out),
        Command::Spectral { params, r0, l_max, out } => (spectral_table(&params.params()?, r0, l_max)?, out),
        Command::Verify { seed, draws, out } => {
            let report = verify::run_checks(seed, draws)?;
            let table = report.table(seed);
            emit(&table, &out)?;
            return if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::VerifyFailed(format!(
                    "verify: {} check(s) failed",
                    report.failures()
                )))
            };
        }
    };
    emit(&table, &out)
}

fn emit(table: &Table, out: &OutputArgs) -> CliResult<()> {
    table.emit(out.format, out.output.as_deref())?;
    Ok(())
}

fn params_json(p: &ModelParams) -> Value {
    json!({
        "lambda": num(p.lambda),
        "eps": num(p.eps),
        "mu": num(p.mu),
        "u_inf": num(p.u_inf),
        "R": num(p.radius),
        "eta": num(p.eta),
    })
}

fn threshold_meta(table: &mut Table, p: &ModelParams) -> CliResult<()> {
    let th = thresholds(p)?;
    table.meta("params", params_json(p));
    table.meta("lambda1", num(th.lambda1));
    table.meta("lambda2", th.lambda2.map_or(Value::Null, num));
    table.meta("regime", classify_regime(p.eps)?.name());
    Ok(())
}

pub fn stationary_table(p: &ModelParams) -> CliResult<Table> {
    let mut t = Table::new(&["index", "kind", "branch_id", "r_fb", "u0", "residual"]);
    let sols = stationary::solve_stationary(p)?;
    for (i, s) in sols.iter().enumerate() {
        let (r_fb, residual) = match s.free_boundary {
            Some(fb) => (Some(fb.radius), transmission_residual(fb.radius, p)? * p.lambda),
            None => (None, 0.0),
        };
        let kind = match s.kind() {
            stationary::SolutionKind::NoFreeBoundary => "no_free_boundary",
            stationary::SolutionKind::WithFreeBoundary => "with_free_boundary",
        };
        t.push(vec![
            i.into(),
            kind.into(),
            s.label().id().into(),
            r_fb.into(),
            s.center.into(),
            residual.into(),
        ]);
    }
    threshold_meta(&mut t, p)?;
    t.meta("solutions", sols.len());
    Ok(t)
}

/// Uniform grid on `[lambda_min, lambda_max]`, optionally with λ₁ (and λ₂ for ε > 3/2) inserted.
pub fn lambda_grid(
    p: &ModelParams,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    points: usize,
    with_thresholds: bool,
) -> CliResult<Vec<f64>> {
    let th = thresholds(p)?;
    let lo = lambda_min.unwrap_or(0.01 * th.lambda1);
    let hi = lambda_max.unwrap_or(3.0 * th.lambda1);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Input(format!(
            "need 0 < lambda-min < lambda-max, got [{lo}, {hi}]"
        )));
    }
    if points < 2 {
        return Err(CliError::Input("points must be at least 2".into()));
    }
    let mut grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    if with_thresholds {
        let mut marks = vec![th.lambda1];
        if p.eps > 1.5 {
            marks.extend(th.lambda2);
        }
        for m in marks {
            if (lo..=hi).contains(&m) {
                grid.retain(|x| (x - m).abs() > 1e-12 * m);
                grid.push(m);
            }
        }
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid)
}

pub fn bifurcation_table(p: &ModelParams, grid: &[f64]) -> CliResult<Table> {
    let mut t = Table::new(&["lambda", "branch_id", "u0", "r_fb", "residual"]);
    for pt in stationary::bifurcation_diagram(p, grid)? {
        t.push(vec![
            pt.lambda.into(),
            pt.branch.id().into(),
            pt.center.into(),
            pt.free_boundary.into(),
            (pt.residual * pt.lambda).into(),
        ]);
    }
    threshold_meta(&mut t, p)?;
    t.meta("points", grid.len());
    Ok(t)
}

pub fn simulate_table(p: &ModelParams, r0: f64, t_end: f64, tol: Tolerances) -> CliResult<Table> {
    let class = dynamics::classify(p)?;
    let traj = dynamics::integrate(r0, p, t_end, tol)?;
    let mut t = Table::new(&["t", "R", "r0", "H", "lower", "upper"]);
    for s in &traj.samples {
        let (lo, hi) = traj.envelope(s.t);
        t.push(vec![
            s.t.into(),
            s.radius.into(),
            s.free_boundary.into(),
            dynamics::growth_rate(s.radius, p)?.into(),
            lo.into(),
            hi.into(),
        ]);
    }
    let limit = match class {
        AsymptoticClass::ConvergesTo(r) => Some(r),
        _ => None,
    };
    t.meta("params", params_json(p));
    t.meta("R0", num(r0));
    t.meta("t_end", num(t_end));
    t.meta("R_star", num(stationary::phase_radius(p)?));
    t.meta("classification", class.name());
    t.meta("limit_radius", limit.map_or(Value::Null, num));
    let label = match limit {
        Some(r) => format!("{}({})", class.name(), crate::output::fmt_num(r)),
        None => class.name().to_owned(),
    };
    t.trailer.push(("classification".into(), label));
    Ok(t)
}

pub fn spectral_table(p: &ModelParams, r0: Option<f64>, l_max: usize) -> CliResult<Table> {
    let r0 = match r0 {
        Some(r) => r,
        None => stationary::solve_stationary(p)?
            .iter()
            .filter_map(|s| s.free_boundary)
            .map(|f| f.radius)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
            .ok_or_else(|| CliError::Input("no free boundary for these parameters; pass --r0".into()))?,
    };
    let rep = spectral::invertibility_report(p, r0, l_max)?;
    let mut t = Table::new(&["l", "sigma_l", "condition_l"]);
    for row in &rep.rows {
        t.push(vec![row.l.into(), row.sigma_l.into(), row.condition_l.into()]);
    }
    t.meta("params", params_json(p));
    t.meta("r0", num(rep.r0));
    t.meta("R", num(rep.radius));
    t.meta("eps", num(rep.eps));
    t.meta("invertible", rep.invertible);
    t.meta("degenerate_l0", rep.degenerate_l0);
    t.meta("phi00", num(rep.phi00));
    match spectral::mu_star(p) {
        Ok(m) => t.meta("mu_star", num(m)),
        Err(e) => {
            t.meta("mu_star", Value::Null);
            t.meta("mu_star_error", e.to_string());
        }
    }
    t.trailer.push(("degenerate_l0".into(), rep.degenerate_l0.to_string()));
    t.trailer.push(("invertible".into(), rep.invertible.to_string()));
    Ok(t)
}
