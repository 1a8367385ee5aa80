use std::f64::consts::PI;
use std::time::Instant;

use fracdiff::field::{multi_indices_up_to, MultiIndex};
use fracdiff::kernel::{BoundSamples, DerivOrder, Kernel, KernelSpec};
use fracdiff::quad::adaptive_gk;
use fracdiff::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Config, Suite};
use crate::report::{csv, Check, Report};

pub fn run(cfg: &Config) -> Result<Report> {
    let mut report = Report::new(Suite::Kernel);
    oracle(cfg, &mut report)?;
    structure(cfg, &mut report)?;
    biorthogonality(cfg, &mut report)?;
    Ok(report)
}

/// Cauchy kernel `t/(π(t²+x²))` and its x-derivative.
fn oracle(cfg: &Config, report: &mut Report) -> Result<()> {
    let start = Instant::now();
    let kernel = Kernel::new(KernelSpec::new(1, 1.0)?)?;
    let d1 = kernel.derivative(DerivOrder::spatial(MultiIndex::new(&[1])))?;
    let extent = cfg.kernel.oracle_extent;
    let n = 1000;
    let mut rows = Vec::new();
    let (mut worst, mut worst_d) = (0.0f64, 0.0f64);
    for &t in &cfg.kernel.oracle_times {
        for i in -n..=n {
            let x = extent * i as f64 / n as f64;
            let exact = t / (PI * (t * t + x * x));
            let dexact = -2.0 * x * t / (PI * (t * t + x * x).powi(2));
            let v = kernel.eval_kernel(&[x], t)?;
            let dv = d1.eval(&[x], t)?;
            let e = (v - exact).abs() / exact;
            let de = if dexact == 0.0 { dv.abs() } else { (dv - dexact).abs() / dexact.abs() };
            worst = worst.max(e);
            worst_d = worst_d.max(de);
            rows.push(vec![t, x, v, exact, e, dv, dexact, de]);
        }
    }
    let tol = &cfg.tolerances;
    report.push(Check::at_most("oracle.value_rel_error", 1, worst, tol.kernel_value));
    report.push(Check::at_most("oracle.derivative_rel_error", 1, worst_d, tol.kernel_derivative));
    report.push(Check::at_most("oracle.runtime_s", 1, start.elapsed().as_secs_f64(), tol.kernel_runtime));
    report.table("oracle.csv", csv(&["t", "x", "value", "oracle", "rel_error", "derivative", "derivative_oracle", "derivative_rel_error"], &rows));
    Ok(())
}

/// `∫ G(x-y, t) G(y, s) dy`: adaptive Gauss–Kronrod on `[-B, B]` plus the two
/// tails mapped onto `(0, 1]` by `y = ±B/u`.
fn composition(kernel: &Kernel, x: f64, t: f64, s: f64) -> Result<f64> {
    let f = |y: f64| -> f64 {
        match (kernel.eval_kernel(&[x - y], t), kernel.eval_kernel(&[y], s)) {
            (Ok(a), Ok(b)) => a * b,
            _ => f64::NAN,
        }
    };
    let b = 50.0 * (1.0 + x.abs());
    let (core, _) = adaptive_gk(f, -b, b, 1e-14, 0.0);
    let tail = |side: f64| adaptive_gk(|u: f64| if u == 0.0 { 0.0 } else { f(side * b / u) * b / (u * u) }, 0.0, 1.0, 1e-14, 0.0).0;
    let total = core + tail(1.0) + tail(-1.0);
    if total.is_finite() {
        Ok(total)
    } else {
        Err(fracdiff::Error::InvalidArgument(format!("kernel evaluation failed in composition at x={x}")))
    }
}

fn structure(cfg: &Config, report: &mut Report) -> Result<()> {
    let tol = &cfg.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut similarity = 0.0f64;
    let mut semigroup = 0.0f64;
    let mut spread = 0.0f64;
    let mut smallest_tail = f64::INFINITY;
    let mut violations = 0usize;
    let mut mass_rows = Vec::new();
    let mut bound_rows = Vec::new();
    let mut worst_bound = 0.0f64;
    let mut finite_c = true;
    let mut tail_inf = f64::INFINITY;
    for &theta in &cfg.kernel.thetas {
        for &dim in &cfg.kernel.dims {
            let kernel = Kernel::new(KernelSpec::new(dim, theta)?)?;
            let nd = dim as f64;
            for _ in 0..cfg.kernel.random_points {
                let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-20.0..20.0)).collect();
                let t = 10f64.powf(rng.gen_range(-2.0..2.0));
                let scaled: Vec<f64> = x.iter().map(|v| v * t.powf(-1.0 / theta)).collect();
                let direct = kernel.eval_kernel(&x, t)?;
                let via = t.powf(-nd / theta) * kernel.eval_kernel(&scaled, 1.0)?;
                similarity = similarity.max((direct - via).abs() / direct);
            }
            // strictly decreasing along a radius
            let mut last = f64::INFINITY;
            for i in 0..=400 {
                let r = 100.0 * (i as f64 / 400.0).powi(2);
                let mut x = vec![0.0; dim];
                x[0] = r;
                let v = kernel.eval_kernel(&x, 1.0)?;
                if !(v < last) || !(v > 0.0) {
                    violations += 1;
                }
                last = v;
            }
            // tail mass (1 - m(L)) L^θ should settle to a constant
            let mut cs = Vec::new();
            for l in [10.0, 100.0, 1000.0] {
                let tail = 1.0 - kernel.box_mass(l, 1.0)?;
                smallest_tail = smallest_tail.min(tail);
                cs.push(tail * l.powf(theta));
                mass_rows.push(vec![theta, nd, l, tail, tail * l.powf(theta)]);
            }
            let (lo, hi) = cs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
            spread = spread.max(hi / lo);
            if dim == 1 {
                for (x, t, s) in [(0.0, 0.6, 1.1), (0.7, 1.0, 1.0), (3.0, 0.4, 2.0)] {
                    let lhs = composition(&kernel, x, t, s)?;
                    let rhs = kernel.eval_kernel(&[x], t + s)?;
                    semigroup = semigroup.max((lhs - rhs).abs() / rhs);
                }
                let orders = [
                    DerivOrder::spatial(MultiIndex::new(&[0])),
                    DerivOrder::spatial(MultiIndex::new(&[1])),
                    DerivOrder::spatial(MultiIndex::new(&[2])),
                    DerivOrder::new(MultiIndex::new(&[0]), 1),
                ];
                for d in orders {
                    let b = kernel.verify_pointwise_bound(d, &BoundSamples::default())?;
                    finite_c &= b.fitted_c.is_finite() && b.fitted_c > 0.0;
                    worst_bound = worst_bound.max(b.max_violation_ratio);
                    if let Some(inf) = b.tail_infimum {
                        tail_inf = tail_inf.min(inf);
                    }
                    bound_rows.push(vec![
                        theta,
                        d.alpha.order() as f64,
                        d.m as f64,
                        b.fitted_c,
                        b.max_violation_ratio,
                        b.argmax.0,
                        b.argmax.1,
                        b.tail_infimum.unwrap_or(f64::NAN),
                    ]);
                }
            }
        }
    }
    report.push(Check::at_most("structure.self_similarity", 2, similarity, tol.structure));
    report.push(Check::at_most("structure.semigroup", 2, semigroup, tol.structure));
    report.push(Check::at_least("structure.tail_mass_positive", 2, smallest_tail, 0.0));
    report.push(Check::at_most("structure.tail_constant_spread", 2, spread, tol.mass_spread));
    report.push(Check::at_most("structure.monotonicity_violations", 2, violations as f64, 0.0));
    report.push(Check::holds("structure.bound_constants_finite", 2, finite_c));
    report.push(Check::not_above("structure.bound_violation_ratio", 2, worst_bound, 1.0, tol.bound_violation));
    report.push(Check::at_least("structure.lower_bound_infimum", 2, tail_inf, f64::MIN_POSITIVE));
    report.table("mass.csv", csv(&["theta", "dim", "halfwidth", "tail", "tail_times_L_theta"], &mass_rows));
    report.table("bounds.csv", csv(&["theta", "alpha", "m", "fitted_c", "max_violation_ratio", "argmax_r", "argmax_t", "tail_infimum"], &bound_rows));
    Ok(())
}

fn biorthogonality(cfg: &Config, report: &mut Report) -> Result<()> {
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for &theta in &cfg.kernel.thetas {
        for &dim in &cfg.kernel.dims {
            let kernel = Kernel::new(KernelSpec::new(dim, theta)?)?;
            let idx = multi_indices_up_to(2.0, dim);
            for a in &idx {
                for b in &idx {
                    if b.order() > a.order() {
                        continue;
                    }
                    let v = kernel.g_alpha_moment(a, b, 1.0)?;
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((v - target).abs());
                    let comp = |m: &MultiIndex, i: usize| if i < dim { m.get(i) as f64 } else { 0.0 };
                    rows.push(vec![theta, dim as f64, comp(a, 0), comp(a, 1), comp(b, 0), comp(b, 1), v, target]);
                }
            }
        }
    }
    report.push(Check::at_most("biorthogonality.max_error", 3, worst, cfg.tolerances.biorthogonality));
    report.table("biorthogonality.csv", csv(&["theta", "dim", "alpha1", "alpha2", "beta1", "beta2", "moment", "target"], &rows));
    Ok(())
}
