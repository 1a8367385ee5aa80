use fracdiff::expansion::{build_w2, duhamel};
use fracdiff::field::{Domain, Exponent, Field, MultiIndex};
use fracdiff::kernel::KernelSpec;
use fracdiff::moments::PsiProfile;
use fracdiff::nonlinear::{e_functional, pulse, solve_inhomogeneous, SeparableSource, Side, SolverOptions};
use fracdiff::semigroup::SemigroupPlan;
use fracdiff::Result;

use crate::config::{Config, Suite};
use crate::data;
use crate::report::{csv, Check, Report};

pub fn run(cfg: &Config) -> Result<Report> {
    let mut report = Report::new(Suite::Inhomogeneous);
    let spec = KernelSpec::new(cfg.spec.dim, cfg.spec.theta)?;
    let domain = Domain::new(cfg.spec.dim, cfg.grid.halfwidth, cfg.grid.points)?;
    let plan = SemigroupPlan::new(spec, domain)?;
    let phi = data::build(&cfg.data, domain);
    pulse_oracle(cfg, &plan, &phi, &mut report)?;
    w2_bound(cfg, &plan, &phi, &mut report)?;
    Ok(report)
}

/// Composite Simpson in `s` of `S(t-s) f` over `[a, b]`.
fn simpson(plan: &SemigroupPlan, f: &Field, t: f64, a: f64, b: f64, panels: usize) -> Result<Field> {
    let zero = MultiIndex::zero(plan.domain().dim());
    let h = (b - a) / panels as f64;
    let mut acc = Field::zeros(*plan.domain());
    for i in 0..=panels {
        let w = match i {
            0 => 1.0,
            _ if i == panels => 1.0,
            _ if i % 2 == 1 => 4.0,
            _ => 2.0,
        };
        let s = a + h * i as f64;
        let v = if t - s > 0.0 { plan.apply(f, t - s, &zero)? } else { f.clone() };
        acc = acc.axpy(w * h / 3.0, &v)?;
    }
    Ok(acc)
}

/// Solver against `S(t)φ + ∫ S(t-s) f ds` over the pulse.
fn pulse_oracle(cfg: &Config, plan: &SemigroupPlan, phi: &Field, report: &mut Report) -> Result<()> {
    let c = &cfg.inhomogeneous;
    let [on, off] = c.pulse;
    let source = phi.map(|v| v.abs());
    let opts = SolverOptions::new(c.pulse_dt, c.pulse_end);
    let traj = solve_inhomogeneous(plan, phi, &pulse(source.clone(), on, off), &opts)?;
    let zero = MultiIndex::zero(plan.domain().dim());
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (&t, u) in traj.times.iter().zip(&traj.snapshots).skip(1) {
        let mut oracle = plan.apply(phi, t, &zero)?;
        if t > on {
            oracle = oracle.axpy(1.0, &simpson(plan, &source, t, on, t.min(off), c.simpson_panels)?)?;
        }
        let e = u.sub(&oracle)?.max_abs() / oracle.max_abs();
        worst = worst.max(e);
        rows.push(vec![t, e]);
    }
    report.push(Check::at_most("duhamel.pulse_rel_error", 7, worst, cfg.tolerances.duhamel));
    report.table("pulse.csv", csv(&["t", "rel_sup_error"], &rows));
    Ok(())
}

/// `‖∫S(t-s)F ds - w₂(t)‖_∞ / ∫_0^t E_{K,∞}[F](s) ds` for a decaying source.
fn w2_bound(cfg: &Config, plan: &SemigroupPlan, phi: &Field, report: &mut Report) -> Result<()> {
    let spec = plan.spec();
    let k = cfg.expansion.w_order;
    let decay = cfg.inhomogeneous.decay;
    let source = SeparableSource { profile: phi.clone(), amplitude: move |s: f64, _: Side| (1.0 + s).powf(-decay), breakpoints: Vec::new() };
    let zero_data = Field::zeros(*plan.domain());
    let traj = solve_inhomogeneous(plan, &zero_data, &source, &SolverOptions::new(cfg.time.dt, cfg.time.t_end))?;
    let profile = PsiProfile::gaussian(spec);
    let w2 = build_w2(plan, &profile, &traj.sources, k)?;
    let full = duhamel(plan, &traj.sources)?;
    let h = &traj.sources;
    let e = |f: &Field, t: f64| e_functional(spec, f, t, k, Exponent::Infinity);
    let mut integral = 0.0;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for n in 0..h.steps() {
        let (t0, t1) = (h.times[n], h.times[n + 1]);
        integral += 0.5 * (t1 - t0) * (e(&h.left[n], t0)? + e(&h.right[n], t1)?);
        if traj.output_nodes.contains(&(n + 1)) {
            let err = full[n + 1].sub(&w2[n + 1])?.max_abs();
            let ratio = err / integral;
            worst = worst.max(ratio);
            rows.push(vec![t1, err, integral, ratio]);
        }
    }
    report.push(Check::finite("w2.bound_ratio_max", 7, worst));
    report.table("w2.csv", csv(&["t", "sup_error", "integrated_e", "ratio"], &rows));
    Ok(())
}
