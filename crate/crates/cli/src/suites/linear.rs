use fracdiff::expansion::{fit_rate, log_times, sup_search, verify_remainder_rates, w1_remainder, RateSeries};
use fracdiff::field::{moment, multi_indices_up_to, weighted_l1, Domain, Exponent, Field};
use fracdiff::kernel::{Kernel, KernelSpec};
use fracdiff::moments::{compute_m, PsiProfile};
use fracdiff::semigroup::{DiscreteMeasure, SupportBox};
use fracdiff::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Config, Suite};
use crate::data::{self, bump};
use crate::report::{csv, Check, Report};

pub fn run(cfg: &Config) -> Result<Report> {
    let mut report = Report::new(Suite::Linear);
    let spec = KernelSpec::new(cfg.spec.dim, cfg.spec.theta)?;
    let kernel = Kernel::shared(spec)?;
    let domain = Domain::new(cfg.spec.dim, cfg.grid.halfwidth, cfg.grid.points)?;
    let phi = data::build(&cfg.data, domain);
    let support = SupportBox::of(&phi).ok_or_else(|| Error::InvalidArgument("initial data vanishes".into()))?;
    remainder_rates(cfg, &kernel, &phi, &support, &mut report)?;
    recursion(cfg, spec, domain, &mut report)?;
    corrected_expansion(cfg, &kernel, &phi, &support, &mut report)?;
    Ok(report)
}

fn remainder_rates(cfg: &Config, kernel: &Kernel, phi: &Field, support: &SupportBox, report: &mut Report) -> Result<()> {
    let theta = cfg.spec.theta;
    let tol = &cfg.tolerances;
    let times = log_times(cfg.time.window[0], cfg.time.window[1], cfg.time.samples);
    let mut ks = cfg.expansion.k.clone();
    ks.sort_by(f64::total_cmp);
    let mut summary = Vec::new();
    for &j in &cfg.expansion.j {
        let mut previous: Option<(f64, f64)> = None;
        for &k in &ks {
            let sup = verify_remainder_rates(kernel, phi, support, k, j, Exponent::Infinity, 0.0, &times)?;
            let l1 = verify_remainder_rates(kernel, phi, support, k, j, Exponent::Finite(1.0), k, &times)?;
            let tag = format!("remainder.K{k}.j{j}");
            report.push(Check::not_above(format!("{tag}.sup_slope"), 4, sup.lq_fit.slope, sup.predicted_bound_slope, tol.slope));
            report.push(Check::at_most(format!("{tag}.moment_residual"), 4, sup.moment_residual.max(l1.moment_residual), tol.moment_residual));
            // t^0 |||r|||_0 is the L¹ norm; t^{-K/θ}|||r|||_K must follow it
            report.push(Check::near(format!("{tag}.weighted0_slope"), 4, sup.weighted_fit.slope, l1.lq_fit.slope, tol.slope));
            report.push(Check::near(format!("{tag}.weightedK_slope"), 4, l1.weighted_fit.slope, l1.lq_fit.slope, tol.slope));
            if let Some((k0, s0)) = previous {
                report.push(Check::near(format!("{tag}.steepening"), 4, sup.lq_fit.slope - s0, -(k - k0) / theta, tol.slope * (k - k0).max(1.0)));
            }
            previous = Some((k, sup.lq_fit.slope));
            summary.push(vec![
                k,
                j as f64,
                sup.lq_fit.slope,
                sup.predicted_bound_slope,
                sup.sharp_slope.unwrap_or(f64::NAN),
                l1.lq_fit.slope,
                sup.weighted_fit.slope,
                l1.weighted_fit.slope,
                sup.moment_residual,
            ]);
            report.table(format!("remainder_K{k}_j{j}_sup.csv"), sup.to_csv());
            report.table(format!("remainder_K{k}_j{j}_l1.csv"), l1.to_csv());
        }
    }
    report.table(
        "remainder_summary.csv",
        csv(&["K", "j", "sup_slope", "bound_slope", "sharp_slope", "l1_slope", "weighted0_slope", "weightedK_slope", "moment_residual"], &summary),
    );
    Ok(())
}

/// Moments of `f - Σ M_α ψ_α(·, s)` up to order `K`, relative to `1 + |||f|||_{|β|}`.
fn residual(f: &Field, s: f64, k: f64, profile: &PsiProfile) -> Result<f64> {
    let table = compute_m(f, s, k, profile);
    let mut worst = 0.0f64;
    for beta in multi_indices_up_to(k, f.domain().dim()) {
        let mut r = moment(f, &beta);
        for (alpha, m) in table.entries() {
            r -= m * profile.cross_moment(&beta, alpha, s);
        }
        worst = worst.max(r.abs() / (1.0 + weighted_l1(f, beta.order() as f64)?));
    }
    Ok(worst)
}

fn recursion(cfg: &Config, spec: KernelSpec, domain: Domain, report: &mut Report) -> Result<()> {
    let profile = PsiProfile::gaussian(spec);
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for i in 0..cfg.expansion.random_fields {
        let pieces: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..=3))
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.5..2.0)))
            .collect();
        let k = rng.gen_range(0..=2) as f64;
        let s = rng.gen_range(0.0..3.0);
        let f = Field::from_fn(domain, |x| {
            pieces.iter().map(|&(w, cx, cy, width)| w * bump(x[0], cx, width) * if dim == 1 { 1.0 } else { bump(x[1], cy, width) }).sum()
        });
        let r = residual(&f, s, k, &profile)?;
        worst = worst.max(r);
        rows.push(vec![i as f64, k, s, r]);
    }
    report.push(Check::at_most("recursion.residual_moments", 5, worst, cfg.tolerances.recursion));
    report.table("recursion.csv", csv(&["field", "K", "s", "relative_residual"], &rows));
    let mut tri = 0.0f64;
    for s in [0.0, 1.5] {
        for gamma in multi_indices_up_to(2.0, dim) {
            let f = profile.sample(domain, &gamma, s);
            let table = compute_m(&f, s, 2.0, &profile);
            for (alpha, m) in table.entries() {
                let target = if *alpha == gamma { 1.0 } else { 0.0 };
                tri = tri.max((m - target).abs());
            }
        }
    }
    report.push(Check::at_most("recursion.triangularity", 5, tri, cfg.tolerances.recursion));
    Ok(())
}

/// `(1+t)^{(N+K)/θ} ‖S(t)φ - w₁(t)‖_∞` over the configured window.
fn corrected_expansion(cfg: &Config, kernel: &Kernel, phi: &Field, support: &SupportBox, report: &mut Report) -> Result<()> {
    let spec = kernel.spec();
    let (dim, theta) = (spec.dim(), spec.theta());
    let k = cfg.expansion.w_order;
    let profile = PsiProfile::gaussian(spec);
    let mu = DiscreteMeasure::from_field(phi, support)?;
    let total: f64 = mu.weights.iter().map(|w| w.abs()).sum();
    let mut center = [0.0; 2];
    for (p, w) in mu.points.iter().zip(&mu.weights) {
        for a in 0..dim {
            center[a] += p[a] * w.abs() / total;
        }
    }
    let radius = support.radius(dim);
    let [t0, t1] = cfg.expansion.w1_window;
    let times = log_times(t0, t1, 2 * cfg.time.samples);
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for &t in &times {
        let scale = t.powf(1.0 / theta).max(radius);
        let (sup, _) = sup_search(dim, center, scale, |pts| w1_remainder(kernel, &profile, &mu, k, t, pts))?;
        let v = (1.0 + t).powf((dim as f64 + k) / theta) * sup;
        scaled.push(v);
        rows.push(vec![t, sup, v]);
    }
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    report.push(Check::finite("w1.scaled_max_over_min", 6, hi / lo));
    let series = RateSeries::new("w1", times.clone(), scaled)?;
    let window = (cfg.time.window[0].max(t0), cfg.time.window[1].min(t1));
    let fit = fit_rate(&series, window)?;
    report.push(Check::not_above("w1.scaled_slope", 6, fit.slope, 0.0, cfg.tolerances.slope));
    report.table("w1.csv", csv(&["t", "sup_error", "scaled_error"], &rows));
    Ok(())
}
