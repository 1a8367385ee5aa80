use std::path::Path;
use std::time::Instant;

use fracdiff::expansion::{fit_rate, RateSeries};
use fracdiff::field::{lq_norm, weighted_l1, Domain, Exponent};
use fracdiff::kernel::KernelSpec;
use fracdiff::moments::PsiProfile;
use fracdiff::nonlinear::{build_hierarchy, predicted_decay_slope, solve_mild, verify_decay, write_checkpoint, NonlinearProblem, SolverOptions};
use fracdiff::semigroup::SemigroupPlan;
use fracdiff::Result;

use crate::config::{Config, Suite};
use crate::data;
use crate::report::{csv, Check, Report};

pub fn run(cfg: &Config) -> Result<Report> {
    run_in(cfg, None)
}

/// As [`run`], writing a checkpoint of the trajectory below `out` when enabled.
pub fn run_in(cfg: &Config, out: Option<&Path>) -> Result<Report> {
    let mut report = Report::new(Suite::Nonlinear);
    let start = Instant::now();
    let spec = KernelSpec::new(cfg.spec.dim, cfg.spec.theta)?;
    let domain = Domain::new(cfg.spec.dim, cfg.grid.halfwidth, cfg.grid.points)?;
    let plan = SemigroupPlan::new(spec, domain)?;
    decay(cfg, &plan, out, &mut report)?;
    convergence(cfg, &plan, &mut report)?;
    report.push(Check::at_most("nonlinear.runtime_s", 8, start.elapsed().as_secs_f64(), cfg.tolerances.nonlinear_runtime));
    blow_up(cfg, &plan, &mut report)?;
    Ok(report)
}

fn decay(cfg: &Config, plan: &SemigroupPlan, out: Option<&Path>, report: &mut Report) -> Result<()> {
    let spec = plan.spec();
    let (theta, k, p) = (spec.theta(), cfg.nonlinear.k, cfg.nonlinear.p);
    let tol = &cfg.tolerances;
    let window = (cfg.time.window[0], cfg.time.window[1]);
    let phi = data::build(&cfg.data, *plan.domain());
    let problem = NonlinearProblem::new(spec, p, phi)?;
    let traj = solve_mild(plan, &problem, &SolverOptions::new(cfg.time.dt, cfg.time.t_end))?;
    if cfg.nonlinear.checkpoint {
        if let Some(dir) = out {
            write_checkpoint(&dir.join("checkpoint"), &traj, spec, p, k)?;
        }
    }
    report.push(Check::finite("decay.monitor_max", 8, traj.monitor_max()));

    let a_p = problem.a_p();
    let up: Vec<f64> = traj.snapshots.iter().map(|u| weighted_l1(&problem.nonlinearity(u), k)).collect::<Result<_>>()?;
    let in_window: Vec<usize> = (0..traj.times.len()).filter(|&i| traj.times[i] >= window.0 && traj.times[i] <= window.1 * (1.0 + 1e-12)).collect();
    let series = RateSeries::new("u^p", in_window.iter().map(|&i| traj.times[i]).collect(), in_window.iter().map(|&i| up[i]).collect())?;
    let up_fit = fit_rate(&series, window)?;
    report.push(Check::not_above("decay.up_weighted_slope", 8, up_fit.slope, -a_p + k / theta, tol.slope));

    let levels = build_hierarchy(plan, &problem, &traj, &PsiProfile::gaussian(spec), k, 1)?;
    let r0 = verify_decay(&traj, &levels[0], Exponent::Infinity, 0.0, window)?;
    let r1 = verify_decay(&traj, &levels[1], Exponent::Infinity, 0.0, window)?;
    let s0 = r0.lq_fit.map_or(f64::NAN, |f| f.slope);
    let s1 = r1.lq_fit.map_or(f64::NAN, |f| f.slope);
    report.push(Check::near("decay.u0_slope", 8, s0, predicted_decay_slope(&problem, 0, k, Exponent::Infinity), tol.u0_slope));
    report.push(Check::near("decay.u1_steepening", 8, s0 - s1, a_p - 1.0, tol.u1_steepening));

    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let u = &traj.snapshots[i];
            let d0 = u.sub(&levels[0][i]).map(|d| d.max_abs()).unwrap_or(f64::NAN);
            let d1 = u.sub(&levels[1][i]).map(|d| d.max_abs()).unwrap_or(f64::NAN);
            vec![t, u.max_abs(), lq_norm(u, Exponent::Finite(1.0)), d0, d1, up[i]]
        })
        .collect();
    report.table("decay.csv", csv(&["t", "sup_u", "l1_u", "sup_u_minus_u0", "sup_u_minus_u1", "weighted_up"], &rows));
    let monitor: Vec<Vec<f64>> = traj.step_times.iter().zip(&traj.sup_history).map(|(&t, &m)| vec![t, m]).collect();
    report.table("monitor.csv", csv(&["t", "monitor"], &monitor));
    Ok(())
}

/// Fixed-step self-convergence at halving step sizes.
fn convergence(cfg: &Config, plan: &SemigroupPlan, report: &mut Report) -> Result<()> {
    let c = &cfg.nonlinear;
    let mut data = cfg.data.clone();
    data.amplitude = c.convergence_amplitude;
    let problem = NonlinearProblem::new(plan.spec(), c.p, data::build(&data, *plan.domain()))?;
    let mut finals = Vec::new();
    for &dt in &c.convergence_steps {
        let mut opts = SolverOptions::new(dt, c.convergence_horizon);
        opts.growth = 0.0;
        opts.nonlinear_cfl = f64::INFINITY;
        opts.first_output = c.convergence_horizon;
        finals.push(solve_mild(plan, &problem, &opts)?.final_field().clone());
    }
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    let diffs: Vec<f64> = finals.windows(2).map(|w| w[0].sub(&w[1]).map(|d| d.max_abs())).collect::<Result<_>>()?;
    for i in 0..diffs.len() {
        let ratio = c.convergence_steps[i] / c.convergence_steps[i + 1];
        let order = if i + 1 < diffs.len() { (diffs[i] / diffs[i + 1]).ln() / ratio.ln() } else { f64::NAN };
        if order.is_finite() {
            orders.push(order);
        }
        rows.push(vec![c.convergence_steps[i], diffs[i], order]);
    }
    let order = *orders.last().unwrap_or(&f64::NAN);
    report.push(Check::near("integrator.order", 8, order, 2.0, cfg.tolerances.order));
    report.table("convergence.csv", csv(&["dt", "sup_difference", "observed_order"], &rows));
    Ok(())
}

/// `p = 1 + θ/N - offset` with positive data.
fn blow_up(cfg: &Config, plan: &SemigroupPlan, report: &mut Report) -> Result<()> {
    let spec = plan.spec();
    let c = &cfg.nonlinear;
    let p = 1.0 + spec.theta() / spec.dim() as f64 - c.blow_up_offset;
    let mut data = cfg.data.clone();
    data.amplitude = c.blow_up_amplitude;
    let phi = data::build(&data, *plan.domain()).map(f64::abs);
    let problem = NonlinearProblem::blow_up_demo(spec, p, phi)?;
    let traj = solve_mild(plan, &problem, &SolverOptions::new(cfg.time.dt, c.blow_up_horizon))?;
    let exit = if traj.blew_up { *traj.step_times.last().unwrap_or(&f64::NAN) } else { f64::INFINITY };
    let mut check = Check::at_most("blowup.exit_time", 9, exit, c.blow_up_horizon);
    check.pass &= traj.blew_up && exit < c.blow_up_horizon;
    report.push(check);
    let rows: Vec<Vec<f64>> = traj.step_times.iter().zip(&traj.sup_history).map(|(&t, &m)| vec![t, m]).collect();
    report.table("blowup.csv", csv(&["t", "monitor"], &rows));
    Ok(())
}
