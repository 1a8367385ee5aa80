//! Mild solutions of `∂_t u + (-Δ)^{θ/2} u = F` for the power nonlinearity
//! `F(u) = |u|^{p-1}u` and for prescribed sources, the functional `E_{K,q}`,
//! and the expansion hierarchy `U_0, U_1, …` of the nonlinear problem.
//!
//! Time stepping is exponential (integrating factor) with Heun's corrector:
//!
//! ```text
//! ū      = S(Δ)[uⁿ + Δ F(uⁿ)]
//! uⁿ⁺¹   = S(Δ)[uⁿ + Δ/2 F(uⁿ)] + Δ/2 F(ū)
//! ```
//!
//! which is the trapezoid rule for the Duhamel integral over each step. The
//! pair `(F(uⁿ), F(ū))` is kept per step so that later Duhamel integrals over
//! the same grid reproduce the solver exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expansion::{duhamel, fit_rate, projection, RateFit, RateSeries, SourceHistory};
use crate::field::{lq_norm, weighted_l1, Domain, Exponent, Field, MultiIndex};
use crate::kernel::KernelSpec;
use crate::moments::PsiProfile;
use crate::semigroup::SemigroupPlan;

/// Semilinear problem with `F(u) = |u|^{p-1} u`.
#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    spec: KernelSpec,
    p: f64,
    phi: Field,
    a_p: f64,
    nonlinear: bool,
    subcritical: bool,
}

impl NonlinearProblem {
    /// Requires `A_p = N(p-1)/θ > 1`.
    pub fn new(spec: KernelSpec, p: f64, phi: Field) -> Result<Self> {
        let problem = Self::unchecked(spec, p, phi)?;
        if problem.a_p <= 1.0 {
            return Err(Error::InvalidArgument(format!("p = {p} gives A_p = {:.4} <= 1; global solutions need p > 1 + theta/N", problem.a_p)));
        }
        Ok(problem)
    }

    /// Any `p > 1`; used to exhibit blow-up for `A_p ≤ 1`.
    pub fn blow_up_demo(spec: KernelSpec, p: f64, phi: Field) -> Result<Self> {
        let mut problem = Self::unchecked(spec, p, phi)?;
        problem.subcritical = problem.a_p <= 1.0;
        Ok(problem)
    }

    fn unchecked(spec: KernelSpec, p: f64, phi: Field) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponent p must exceed 1, got {p}")));
        }
        if phi.domain().dim() != spec.dim() {
            return Err(Error::DomainMismatch);
        }
        let a_p = spec.dim() as f64 * (p - 1.0) / spec.theta();
        Ok(Self { spec, p, phi, a_p, nonlinear: true, subcritical: false })
    }

    /// The same data with the nonlinearity switched off.
    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn phi(&self) -> &Field {
        &self.phi
    }

    pub fn a_p(&self) -> f64 {
        self.a_p
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    /// `K + N < p(N + θ)`, the moment condition of the expansion theorem.
    pub fn check_moment_order(&self, k: f64) -> Result<()> {
        let n = self.spec.dim() as f64;
        if k + n < self.p * (n + self.spec.theta()) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("K + N = {} must be below p(N + theta) = {}", k + n, self.p * (n + self.spec.theta()))))
        }
    }

    /// `F(u) = |u|^{p-1} u`, or zero in linear mode.
    pub fn nonlinearity(&self, u: &Field) -> Field {
        if !self.nonlinear {
            return Field::zeros(*u.domain());
        }
        let p = self.p;
        u.map(|v| v.abs().powf(p - 1.0) * v)
    }
}

/// Step-size and output controls of the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// base step; the step at time `t` is `dt (1+t)^growth`
    pub dt: f64,
    pub growth: f64,
    pub t_end: f64,
    /// first positive output time
    pub first_output: f64,
    pub outputs_per_decade: usize,
    /// bound on `‖u‖_∞^{p-1} Δ`
    pub nonlinear_cfl: f64,
    /// blow-up is declared when `‖u‖_∞` exceeds this multiple of `‖φ‖_∞`
    pub blow_up_factor: f64,
    /// abort when the monitor `(1+t)^{N/θ}‖u‖_∞` exceeds this multiple of its linear bound
    pub drift_factor: f64,
}

impl SolverOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, growth: 1.0, t_end, first_output: 0.1, outputs_per_decade: 14, nonlinear_cfl: 0.1, blow_up_factor: 1e6, drift_factor: 10.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_end > 0.0 && self.first_output > 0.0 && self.growth >= 0.0) {
            return Err(Error::InvalidArgument("solver steps and horizons must be positive".into()));
        }
        if self.outputs_per_decade == 0 {
            return Err(Error::InvalidArgument("at least one output per decade".into()));
        }
        Ok(())
    }

    /// `0`, then log-spaced times from `first_output` up to and including `t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        if self.first_output >= self.t_end {
            out.push(self.t_end);
            return out;
        }
        let decades = (self.t_end / self.first_output).log10();
        let n = (decades * self.outputs_per_decade as f64).ceil() as usize;
        for i in 0..=n {
            let t = self.first_output * (self.t_end / self.first_output).powf(i as f64 / n as f64);
            out.push(t);
        }
        *out.last_mut().unwrap() = self.t_end;
        out
    }
}

/// Which one-sided value of a time-discontinuous source is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `F(t⁻)`, the value closing a step that ends at `t`
    Before,
    /// `F(t⁺)`, the value opening a step that starts at `t`
    After,
}

/// Prescribed source `F(x, t)`.
pub trait Source: Sync {
    fn sample(&self, domain: Domain, t: f64, side: Side) -> Field;

    /// Times where `F` may jump; the solver steps onto them.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `F(x, t) = f(x) a(t)` with `a` piecewise continuous between `breakpoints`.
pub struct SeparableSource<A: Fn(f64, Side) -> f64 + Sync> {
    pub profile: Field,
    pub amplitude: A,
    pub breakpoints: Vec<f64>,
}

impl<A: Fn(f64, Side) -> f64 + Sync> Source for SeparableSource<A> {
    fn sample(&self, domain: Domain, t: f64, side: Side) -> Field {
        debug_assert_eq!(domain, *self.profile.domain());
        self.profile.scaled((self.amplitude)(t, side))
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// `f(x) 1_{[t_on, t_off)}(t)`.
pub fn pulse(profile: Field, t_on: f64, t_off: f64) -> SeparableSource<impl Fn(f64, Side) -> f64 + Sync> {
    SeparableSource {
        profile,
        amplitude: move |t: f64, side: Side| {
            let inside = match side {
                Side::After => t >= t_on && t < t_off,
                Side::Before => t > t_on && t <= t_off,
            };
            if inside {
                1.0
            } else {
                0.0
            }
        },
        breakpoints: vec![t_on, t_off],
    }
}

/// A computed mild solution.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// output schedule, starting at 0
    pub times: Vec<f64>,
    pub snapshots: Vec<Field>,
    /// every step node
    pub step_times: Vec<f64>,
    /// `(1+t)^{N/θ} ‖u(t)‖_∞` at every step node
    pub sup_history: Vec<f64>,
    /// the per-step trapezoid samples of the Duhamel integrand used by the solver
    pub sources: SourceHistory,
    /// step-node index of each output
    pub output_nodes: Vec<usize>,
    pub blew_up: bool,
}

impl Trajectory {
    pub fn final_field(&self) -> &Field {
        self.snapshots.last().expect("a trajectory holds at least the initial data")
    }

    /// Largest value of the decay monitor.
    pub fn monitor_max(&self) -> f64 {
        self.sup_history.iter().cloned().fold(0.0, f64::max)
    }

    /// `∫ u(t)` at each output.
    pub fn masses(&self) -> Vec<f64> {
        let zero = MultiIndex::zero(self.snapshots[0].domain().dim());
        self.snapshots.iter().map(|f| crate::field::moment(f, &zero)).collect()
    }

    /// `m_u = lim ∫u(t)` from a least-squares fit `m(t) = m_u + c/t` over the
    /// last `n` outputs.
    pub fn mass_limit(&self, n: usize) -> f64 {
        let masses = self.masses();
        let k = n.min(self.times.len() - 1).max(2);
        let start = self.times.len() - k;
        let xs: Vec<f64> = self.times[start..].iter().map(|t| 1.0 / t).collect();
        let ys = &masses[start..];
        let mx = xs.iter().sum::<f64>() / k as f64;
        let my = ys.iter().sum::<f64>() / k as f64;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        my - sxy / sxx * mx
    }
}

fn step_times(opts: &SolverOptions, t: f64, next_stop: f64, cfl_step: f64) -> f64 {
    let dt = (opts.dt * (1.0 + t).powf(opts.growth)).min(cfl_step);
    // avoid a sliver step right before a stop
    if t + 1.5 * dt >= next_stop {
        if t + dt >= next_stop {
            next_stop - t
        } else {
            0.5 * (next_stop - t)
        }
    } else {
        dt
    }
}

fn stops(opts: &SolverOptions, breakpoints: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = opts.output_times().into_iter().skip(1).collect();
    s.extend(breakpoints.iter().cloned().filter(|&b| b > 0.0 && b < opts.t_end));
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    s.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    s
}

fn monitor(spec: KernelSpec, t: f64, u: &Field) -> f64 {
    (1.0 + t).powf(spec.dim() as f64 / spec.theta()) * u.max_abs()
}

/// Solves the mild equation of `problem` on the periodic grid of `plan`.
pub fn solve_mild(plan: &SemigroupPlan, problem: &NonlinearProblem, opts: &SolverOptions) -> Result<Trajectory> {
    opts.validate()?;
    if problem.phi.domain() != plan.domain() {
        return Err(Error::DomainMismatch);
    }
    plan.check_horizon(opts.t_end)?;
    let spec = problem.spec;
    let zero = MultiIndex::zero(spec.dim());
    let u0 = problem.phi.clone();
    let initial_sup = u0.max_abs();
    // linear-flow bound on the monitor: 2^{N/θ} max(‖φ‖_∞, G_θ(0,1)‖φ‖₁)
    let g0 = crate::kernel::Kernel::shared(spec)?.eval_kernel(&vec![0.0; spec.dim()], 1.0)?;
    let linear_bound = 2f64.powf(spec.dim() as f64 / spec.theta()) * initial_sup.max(g0 * lq_norm(&u0, Exponent::Finite(1.0)));
    let mut traj = new_trajectory(&u0, spec);
    let mut u = u0;
    let mut t = 0.0;
    let mut f_now = problem.nonlinearity(&u);
    for stop in stops(opts, &[]) {
        while t < stop {
            let level = u.max_abs();
            let cfl = if problem.nonlinear && level > 0.0 { opts.nonlinear_cfl / level.powf(problem.p - 1.0) } else { f64::INFINITY };
            let dt = step_times(opts, t, stop, cfl);
            let predictor = plan.apply(&u.axpy(dt, &f_now)?, dt, &zero)?;
            let f_pred = problem.nonlinearity(&predictor);
            let next = plan.apply(&u.axpy(0.5 * dt, &f_now)?, dt, &zero)?.axpy(0.5 * dt, &f_pred)?;
            let t_next = if t + dt >= stop { stop } else { t + dt };
            let f_next = problem.nonlinearity(&next);
            traj.sources.left.push(f_now);
            traj.sources.right.push(f_pred);
            traj.sources.times.push(t_next);
            traj.step_times.push(t_next);
            let m = monitor(spec, t_next, &next);
            traj.sup_history.push(m);
            u = next;
            f_now = f_next;
            t = t_next;
            let sup = u.max_abs();
            if !sup.is_finite() || sup > opts.blow_up_factor * initial_sup {
                traj.blew_up = true;
                traj.times.push(t);
                traj.snapshots.push(sanitize(&u));
                traj.output_nodes.push(traj.step_times.len() - 1);
                return Ok(traj);
            }
            if problem.nonlinear && !problem.subcritical && m > opts.drift_factor * linear_bound {
                return Err(Error::InvalidArgument(format!(
                    "decay monitor drifted to {m:.3e} at t = {t:.4} (limit {:.3e}); data not small enough",
                    opts.drift_factor * linear_bound
                )));
            }
        }
        if is_output(opts, stop) {
            traj.times.push(stop);
            traj.snapshots.push(u.clone());
            traj.output_nodes.push(traj.step_times.len() - 1);
        }
    }
    Ok(traj)
}

fn sanitize(u: &Field) -> Field {
    u.map(|v| if v.is_finite() { v } else { f64::MAX.copysign(v) })
}

fn is_output(opts: &SolverOptions, t: f64) -> bool {
    opts.output_times().iter().any(|&o| (o - t).abs() <= 1e-12 * t.max(1.0))
}

fn new_trajectory(u0: &Field, spec: KernelSpec) -> Trajectory {
    Trajectory {
        times: vec![0.0],
        snapshots: vec![u0.clone()],
        step_times: vec![0.0],
        sup_history: vec![monitor(spec, 0.0, u0)],
        sources: SourceHistory { times: vec![0.0], left: Vec::new(), right: Vec::new() },
        output_nodes: vec![0],
        blew_up: false,
    }
}

/// Solves `∂_t u + (-Δ)^{θ/2} u = F`, `u(0) = φ`, with the same scheme.
pub fn solve_inhomogeneous(plan: &SemigroupPlan, phi: &Field, source: &dyn Source, opts: &SolverOptions) -> Result<Trajectory> {
    opts.validate()?;
    if phi.domain() != plan.domain() {
        return Err(Error::DomainMismatch);
    }
    plan.check_horizon(opts.t_end)?;
    let spec = plan.spec();
    let domain = *plan.domain();
    let zero = MultiIndex::zero(spec.dim());
    let mut traj = new_trajectory(phi, spec);
    let mut u = phi.clone();
    let mut t = 0.0;
    for stop in stops(opts, &source.breakpoints()) {
        while t < stop {
            let dt = step_times(opts, t, stop, f64::INFINITY);
            let t_next = if t + dt >= stop { stop } else { t + dt };
            let dt = t_next - t;
            let f_left = source.sample(domain, t, Side::After);
            let f_right = source.sample(domain, t_next, Side::Before);
            u = plan.apply(&u.axpy(0.5 * dt, &f_left)?, dt, &zero)?.axpy(0.5 * dt, &f_right)?;
            traj.sources.left.push(f_left);
            traj.sources.right.push(f_right);
            traj.sources.times.push(t_next);
            traj.step_times.push(t_next);
            traj.sup_history.push(monitor(spec, t_next, &u));
            t = t_next;
        }
        if is_output(opts, stop) {
            traj.times.push(stop);
            traj.snapshots.push(u.clone());
            traj.output_nodes.push(traj.step_times.len() - 1);
        }
    }
    Ok(traj)
}

/// `E_{K,q}[F](t) = (1+t)^{K/θ}[(1+t)^{N/θ(1-1/q)}‖F‖_q + ‖F‖₁] + |||F|||_K`.
pub fn e_functional(spec: KernelSpec, f: &Field, t: f64, k: f64, q: Exponent) -> Result<f64> {
    let n = spec.dim() as f64;
    let theta = spec.theta();
    let one = 1.0 + t;
    let bracket = one.powf(n / theta * (1.0 - q.reciprocal())) * lq_norm(f, q) + lq_norm(f, Exponent::Finite(1.0));
    Ok(one.powf(k / theta) * bracket + weighted_l1(f, k)?)
}

/// `U_0, …, U_n` at the output times of a global trajectory:
/// `U_0 = S(t)φ + w₂[F(u)]` and `U_m = U_0 + ∫S(t-s)(I - P_s)F(U_{m-1}(s)) ds`,
/// with every time integral on the solver's step grid and trapezoid rule.
pub fn build_hierarchy(
    plan: &SemigroupPlan,
    problem: &NonlinearProblem,
    traj: &Trajectory,
    profile: &PsiProfile,
    k: f64,
    n: usize,
) -> Result<Vec<Vec<Field>>> {
    if traj.blew_up {
        return Err(Error::InvalidArgument("expansion of a trajectory that blew up".into()));
    }
    problem.check_moment_order(k)?;
    let zero = MultiIndex::zero(plan.domain().dim());
    let times = &traj.step_times;
    let steps = times.len() - 1;
    let mut out: Vec<Vec<Field>> = vec![Vec::with_capacity(traj.times.len()); n + 1];
    let mut next_output = 0;
    let mut record = |node: usize, levels: &[Field], out: &mut Vec<Vec<Field>>| {
        if next_output < traj.output_nodes.len() && traj.output_nodes[next_output] == node {
            for (o, l) in out.iter_mut().zip(levels) {
                o.push(l.clone());
            }
            next_output += 1;
        }
    };
    let project = |f: &Field, s: f64| projection(profile, f, s, k);
    let remainder = |f: &Field, s: f64| f.sub(&project(f, s));
    // state at the current node
    let mut free = problem.phi.clone();
    let mut w2 = Field::zeros(*plan.domain());
    let mut acc: Vec<Field> = vec![Field::zeros(*plan.domain()); n];
    let mut levels: Vec<Field> = vec![free.clone(); n + 1];
    // (I - P_s) F(U_{m-1}) at the current node, per level m ≥ 1
    // every level starts from φ
    let mut rem_now: Vec<Field> = vec![remainder(&problem.nonlinearity(&levels[0]), 0.0)?; n];
    record(0, &levels, &mut out);
    for step in 0..steps {
        let (t0, t1) = (times[step], times[step + 1]);
        let dt = t1 - t0;
        free = plan.apply(&free, dt, &zero)?;
        let pl = project(&traj.sources.left[step], t0);
        let pr = project(&traj.sources.right[step], t1);
        w2 = plan.apply(&w2.axpy(0.5 * dt, &pl)?, dt, &zero)?.axpy(0.5 * dt, &pr)?;
        let mut new_levels = Vec::with_capacity(n + 1);
        new_levels.push(free.axpy(1.0, &w2)?);
        for m in 1..=n {
            let rem_next = remainder(&problem.nonlinearity(&new_levels[m - 1]), t1)?;
            acc[m - 1] = plan.apply(&acc[m - 1].axpy(0.5 * dt, &rem_now[m - 1])?, dt, &zero)?.axpy(0.5 * dt, &rem_next)?;
            rem_now[m - 1] = rem_next;
            new_levels.push(new_levels[0].axpy(1.0, &acc[m - 1])?);
        }
        levels = new_levels;
        record(step + 1, &levels, &mut out);
    }
    Ok(out)
}

/// `U_0` at the output times.
pub fn build_u0(plan: &SemigroupPlan, problem: &NonlinearProblem, traj: &Trajectory, profile: &PsiProfile, k: f64) -> Result<Vec<Field>> {
    Ok(build_hierarchy(plan, problem, traj, profile, k, 0)?.remove(0))
}

/// `U_n` at the output times.
pub fn build_un(plan: &SemigroupPlan, problem: &NonlinearProblem, traj: &Trajectory, profile: &PsiProfile, k: f64, n: usize) -> Result<Vec<Field>> {
    if n == 0 {
        return Err(Error::InvalidArgument("U_n is defined for n >= 1; use build_u0".into()));
    }
    Ok(build_hierarchy(plan, problem, traj, profile, k, n)?.pop().unwrap())
}

/// `∫_0^t S(t-s)F(s) ds` at the output times of a trajectory, from its own
/// source samples.
pub fn trajectory_duhamel(plan: &SemigroupPlan, traj: &Trajectory) -> Result<Vec<Field>> {
    let all = duhamel(plan, &traj.sources)?;
    Ok(traj.output_nodes.iter().map(|&i| all[i].clone()).collect())
}

/// Expected slope of `‖u - U_n‖_q`: `-N/θ(1-1/q) - min(K/θ, (n+1)(A_p-1))`.
pub fn predicted_decay_slope(problem: &NonlinearProblem, n: usize, k: f64, q: Exponent) -> f64 {
    let spec = problem.spec;
    let dim = spec.dim() as f64;
    let theta = spec.theta();
    -dim / theta * (1.0 - q.reciprocal()) - (k / theta).min((n as f64 + 1.0) * (problem.a_p - 1.0))
}

/// Decay of `u - U` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    /// the difference sat at rounding level at every sample
    pub exact: bool,
    pub lq: Option<RateSeries>,
    pub weighted: Option<RateSeries>,
    pub lq_fit: Option<RateFit>,
    pub weighted_fit: Option<RateFit>,
}

pub fn verify_decay(traj: &Trajectory, approx: &[Field], q: Exponent, ell: f64, window: (f64, f64)) -> Result<DecayReport> {
    if approx.len() != traj.snapshots.len() {
        return Err(Error::InvalidArgument("one approximation per output time".into()));
    }
    let mut times = Vec::new();
    let mut lq = Vec::new();
    let mut weighted = Vec::new();
    let mut negligible = true;
    for ((t, u), a) in traj.times.iter().zip(&traj.snapshots).zip(approx) {
        if *t < window.0 || *t > window.1 * (1.0 + 1e-12) {
            continue;
        }
        let d = u.sub(a)?;
        negligible &= d.max_abs() <= 64.0 * f64::EPSILON * u.max_abs();
        times.push(*t);
        lq.push(lq_norm(&d, q));
        weighted.push(weighted_l1(&d, ell)?);
    }
    if negligible {
        return Ok(DecayReport { exact: true, lq: None, weighted: None, lq_fit: None, weighted_fit: None });
    }
    let lq = RateSeries::new(format!("|u-U|_{q}"), times.clone(), lq)?;
    let weighted = RateSeries::new(format!("|||u-U|||_{ell}"), times, weighted)?;
    let lq_fit = fit_rate(&lq, window)?;
    let weighted_fit = fit_rate(&weighted, window)?;
    Ok(DecayReport { exact: false, lq: Some(lq), weighted: Some(weighted), lq_fit: Some(lq_fit), weighted_fit: Some(weighted_fit) })
}

/// Writes one binary field dump per output and a plain-text manifest.
pub fn write_checkpoint(dir: &Path, traj: &Trajectory, spec: KernelSpec, p: f64, k: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let d = traj.snapshots[0].domain();
    let mut manifest = String::new();
    writeln!(manifest, "dim = {}", d.dim()).unwrap();
    writeln!(manifest, "halfwidth = {:?}", d.halfwidth()).unwrap();
    writeln!(manifest, "points_per_dim = {}", d.points_per_dim()).unwrap();
    writeln!(manifest, "theta = {:?}", spec.theta()).unwrap();
    writeln!(manifest, "p = {p:?}").unwrap();
    writeln!(manifest, "K = {k:?}").unwrap();
    writeln!(manifest, "blew_up = {}", traj.blew_up).unwrap();
    for (i, (t, f)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
        let name = format!("snapshot_{i:04}.bin");
        f.write_to(BufWriter::new(fs::File::create(dir.join(&name))?))?;
        writeln!(manifest, "snapshot {t:?} {name}").unwrap();
    }
    fs::write(dir.join("manifest.txt"), manifest)?;
    Ok(())
}

/// Reads back the output times and snapshots of a checkpoint.
pub fn read_checkpoint(dir: &Path) -> Result<(Vec<f64>, Vec<Field>)> {
    let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
    let mut times = Vec::new();
    let mut fields = Vec::new();
    for line in manifest.lines() {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("snapshot") {
            continue;
        }
        let (t, name) = match (parts.next(), parts.next()) {
            (Some(t), Some(n)) => (t, n),
            _ => return Err(Error::Format(format!("bad manifest line: {line}"))),
        };
        times.push(t.parse::<f64>().map_err(|e| Error::Format(e.to_string()))?);
        fields.push(Field::read_from(std::io::BufReader::new(fs::File::open(dir.join(name))?))?);
    }
    Ok((times, fields))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_schedule_is_log_spaced_and_ends_at_t_end() {
        let o = SolverOptions::new(0.01, 100.0).output_times();
        assert_eq!(o[0], 0.0);
        assert_eq!(*o.last().unwrap(), 100.0);
        assert_eq!(o.len(), 2 + 3 * 14);
        let r1 = o[2] / o[1];
        let r2 = o[20] / o[19];
        assert!((r1 - r2).abs() < 1e-12);
    }

    #[test]
    fn problem_validation() {
        let spec = KernelSpec::new(1, 1.0).unwrap();
        let d = Domain::new(1, 32.0, 64).unwrap();
        let phi = Field::zeros(d);
        assert!(NonlinearProblem::new(spec, 1.9, phi.clone()).is_err());
        assert!(NonlinearProblem::blow_up_demo(spec, 1.9, phi.clone()).is_ok());
        let pr = NonlinearProblem::new(spec, 3.0, phi).unwrap();
        assert!((pr.a_p() - 2.0).abs() < 1e-15);
        assert!(pr.check_moment_order(2.0).is_ok());
        assert!(pr.check_moment_order(5.0).is_err());
    }

    #[test]
    fn e_functional_collapses_at_time_zero() {
        let spec = KernelSpec::new(1, 1.0).unwrap();
        let d = Domain::new(1, 8.0, 64).unwrap();
        let f = Field::from_fn(d, |x| (-x[0] * x[0]).exp() * x[0]);
        let e = e_functional(spec, &f, 0.0, 0.0, Exponent::Finite(1.0)).unwrap();
        let l1 = lq_norm(&f, Exponent::Finite(1.0));
        assert!((e - 3.0 * l1).abs() < 1e-14, "{e} {l1}");
        assert_eq!(e_functional(spec, &Field::zeros(d), 3.0, 2.0, Exponent::Infinity).unwrap(), 0.0);
    }
}
