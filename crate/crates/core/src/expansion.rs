//! The moment expansion of `S_θ(t)φ`, its remainder, the ψ-corrected
//! expansions `w₁`, `w₂`, and the slope-fitting harness that measures their
//! decay.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{floor_bracket, moments as grid_moments, multi_indices_up_to, Exponent, Field, MultiIndex};
use crate::kernel::{tensor_components, Kernel};
use crate::moments::{compute_m, compute_m_measure, CoefficientTable, PsiProfile};
use crate::quad::SinhSinh;
use crate::semigroup::{convolve_measure, DiscreteMeasure, SemigroupPlan, SupportBox};

/// Default fit window and sampling of the rate studies.
pub const DEFAULT_WINDOW: (f64, f64) = (10.0, 100.0);
pub const DEFAULT_SAMPLES: usize = 12;
pub const SLOPE_TOLERANCE: f64 = 0.15;

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `n` log-spaced times from `t0` to `t1` inclusive.
pub fn log_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t0];
    }
    let (a, b) = (t0.ln(), t1.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// A decaying quantity sampled in time.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub label: String,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl RateSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument("times and values differ in length".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidArgument("times must be positive and strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("rate series values must be positive, got {v}")));
        }
        Ok(Self { label: label.into(), times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Least-squares line through `(log t, log value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

pub fn fit_rate(series: &RateSeries, window: (f64, f64)) -> Result<RateFit> {
    let eps = 1e-12 * window.1.abs();
    let pts: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(t, _)| **t >= window.0 - eps && **t <= window.1 + eps)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::InvalidArgument(format!("rate fit needs at least 5 samples in [{}, {}], got {}", window.0, window.1, pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy <= 1e-30 * n { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(RateFit { slope, intercept, r_squared, window, samples: pts.len() })
}

/// `Σ_{|α|≤K} (∫ y^α dμ) g_{α,θ}(x, t)` at each point.
pub fn linear_expansion_measure(kernel: &Kernel, mu: &DiscreteMeasure, k: f64, t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let dim = kernel.spec().dim();
    let indices = multi_indices_up_to(k, dim);
    let moments: Vec<f64> = indices.iter().map(|a| mu.moment(a)).collect();
    expansion_from_moments(kernel, &indices, &moments, t, eval_points)
}

/// The expansion with the moments of the grid function `φ`.
pub fn linear_expansion(kernel: &Kernel, phi: &Field, k: f64, t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let dim = kernel.spec().dim();
    if phi.domain().dim() != dim {
        return Err(Error::DomainMismatch);
    }
    let indices = multi_indices_up_to(k, dim);
    let moments = grid_moments(phi, &indices);
    expansion_from_moments(kernel, &indices, &moments, t, eval_points)
}

fn expansion_from_moments(kernel: &Kernel, indices: &[MultiIndex], moments: &[f64], t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let dim = kernel.spec().dim();
    eval_points
        .par_iter()
        .map(|x| {
            let mut s = 0.0;
            for (a, m) in indices.iter().zip(moments) {
                if *m != 0.0 {
                    s += m * kernel.eval_g_alpha(a, &x[..dim], t)?;
                }
            }
            Ok(s)
        })
        .collect()
}

/// The expansion on the periodic grid of `plan`, band-limited like
/// [`SemigroupPlan::apply`]; `S_θ(t)φ` minus this is the spectral remainder.
pub fn linear_expansion_periodic(plan: &SemigroupPlan, phi: &Field, k: f64, t: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let dim = plan.domain().dim();
    if phi.domain() != plan.domain() {
        return Err(Error::DomainMismatch);
    }
    let indices = multi_indices_up_to(k, dim);
    let moments = grid_moments(phi, &indices);
    let theta = plan.spec().theta();
    let m = plan.domain().points_per_dim();
    Ok(plan.synthesize(|kk| {
        let xi: Vec<f64> = kk.iter().map(|&i| plan.frequency(i)).collect();
        let rho = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut c = Complex64::new(0.0, 0.0);
        for (a, mom) in indices.iter().zip(&moments) {
            // ĝ_α = (-iξ)^α / α! · e^{-t|ξ|^θ}
            let mut term = Complex64::new(mom / a.factorial(), 0.0);
            for (axis, &order) in a.components().iter().enumerate() {
                if order % 2 == 1 && kk[axis] == m / 2 {
                    term = Complex64::new(0.0, 0.0);
                }
                term *= Complex64::new(0.0, -xi[axis]).powu(order);
            }
            c += term;
        }
        c * (-t * rho.powf(theta)).exp()
    }))
}

/// `∇^j v(x, t) = Σ_i w_i H^j_K(x, y_i, t)`: the remainder of the `K`-th
/// expansion of a discrete measure, one tensor per point.
pub fn remainder_measure(kernel: &Kernel, mu: &DiscreteMeasure, k: f64, j: usize, t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<Vec<f64>>> {
    let rk = kernel.remainder_kernel(j, k)?;
    let dim = mu.dim;
    eval_points
        .par_iter()
        .map(|x| {
            let mut acc = vec![0.0; rk.len()];
            let mut buf = vec![0.0; rk.len()];
            for (y, w) in mu.points.iter().zip(&mu.weights) {
                rk.eval_into(&x[..dim], &y[..dim], t, &mut buf)?;
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += w * b;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// [`remainder_measure`] for a compactly supported grid function.
pub fn remainder_v(kernel: &Kernel, phi: &Field, support: &SupportBox, k: f64, j: usize, t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<Vec<f64>>> {
    if kernel.spec().dim() != phi.domain().dim() {
        return Err(Error::DomainMismatch);
    }
    let mu = DiscreteMeasure::from_field(phi, support)?;
    remainder_measure(kernel, &mu, k, j, t, eval_points)
}

/// `Σ_α M_α ψ_α(·, s)` sampled on a domain.
pub fn project(profile: &PsiProfile, table: &CoefficientTable, domain: crate::field::Domain) -> Field {
    let dim = profile.dim();
    let s = table.s;
    Field::from_fn(domain, |x| table.entries().iter().map(|(a, m)| m * profile.psi_alpha(a, s, &x[..dim])).sum())
}

/// `P_s f = Σ_{|α|≤K} M_α(f, s) ψ_α(·, s)` on the grid of `f`.
pub fn projection(profile: &PsiProfile, f: &Field, s: f64, k: f64) -> Field {
    project(profile, &compute_m(f, s, k, profile), *f.domain())
}

/// `w₁(t) = Σ_α M_α(φ, 0) Ψ_{α,θ}(·, t : 0)` on the periodic grid.
pub fn build_w1(plan: &SemigroupPlan, profile: &PsiProfile, phi: &Field, k: f64, t: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let p = projection(profile, phi, 0.0, k);
    plan.apply(&p, t, &MultiIndex::zero(plan.domain().dim()))
}

/// `μ − Σ_α M_α(μ, 0) ψ_α(·, 0)` as one discrete measure; its moments through
/// order `[K]` vanish up to quadrature error.
pub fn w1_residual_measure(profile: &PsiProfile, mu: &DiscreteMeasure, k: f64) -> DiscreteMeasure {
    let table = compute_m_measure(mu, 0.0, k, profile);
    let mut out = mu.clone();
    let dim = profile.dim();
    for (p, node_weight) in profile.quadrature_nodes(0.0) {
        let v: f64 = table.entries().iter().map(|(a, m)| m * profile.psi_alpha(a, 0.0, &p[..dim])).sum();
        out.points.push(p);
        out.weights.push(-v * node_weight);
    }
    out
}

/// `S_θ(t)φ − w₁(t)` at arbitrary points, as the order-`[K]` remainder of the
/// residual measure; no heavy-tailed difference is formed.
pub fn w1_remainder(kernel: &Kernel, profile: &PsiProfile, mu: &DiscreteMeasure, k: f64, t: f64, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    let rho = w1_residual_measure(profile, mu, k);
    Ok(remainder_measure(kernel, &rho, k, 0, t, eval_points)?.into_iter().map(|v| v[0]).collect())
}

/// `S_θ(t)` applied to the `w₁` residual measure, by direct convolution.
pub fn w1_remainder_direct(
    kernel: &Kernel,
    profile: &PsiProfile,
    mu: &DiscreteMeasure,
    k: f64,
    t: f64,
    eval_points: &[[f64; 2]],
) -> Result<Vec<f64>> {
    let rho = w1_residual_measure(profile, mu, k);
    convolve_measure(kernel, &rho, t, &MultiIndex::zero(profile.dim()), eval_points)
}

/// Source samples of a Duhamel integral on a time grid. Step `n` covers
/// `[times[n], times[n+1]]`; `left[n]` and `right[n]` are the integrand's
/// values at its two ends (they differ from neighbouring steps when the source
/// jumps or is a predictor value).
#[derive(Debug, Clone, Default)]
pub struct SourceHistory {
    pub times: Vec<f64>,
    pub left: Vec<Field>,
    pub right: Vec<Field>,
}

impl SourceHistory {
    /// History of a source sampled at the grid nodes.
    pub fn from_nodes(times: Vec<f64>, nodes: Vec<Field>) -> Result<Self> {
        if times.len() != nodes.len() || times.is_empty() {
            return Err(Error::InvalidArgument("one source sample per time node".into()));
        }
        let left = nodes[..nodes.len() - 1].to_vec();
        let right = nodes[1..].to_vec();
        let h = Self { times, left, right };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        let steps = self.times.len().saturating_sub(1);
        if self.left.len() != steps || self.right.len() != steps {
            return Err(Error::InvalidArgument("one left and one right sample per step".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }

    /// The history of `g(f, s)` applied sample by sample.
    pub fn map<G: Fn(&Field, f64) -> Field + Sync>(&self, g: G) -> Self {
        let left = self.left.par_iter().enumerate().map(|(n, f)| g(f, self.times[n])).collect();
        let right = self.right.par_iter().enumerate().map(|(n, f)| g(f, self.times[n + 1])).collect();
        Self { times: self.times.clone(), left, right }
    }
}

/// `D(t_n) = ∫_0^{t_n} S_θ(t_n − s) F(s) ds` at every node by the trapezoid
/// rule per step, `D_{n+1} = S(Δ)[D_n + Δ/2 F_n^+] + Δ/2 F_{n+1}^-`.
pub fn duhamel(plan: &SemigroupPlan, history: &SourceHistory) -> Result<Vec<Field>> {
    history.validate()?;
    let zero = MultiIndex::zero(plan.domain().dim());
    let mut out = Vec::with_capacity(history.times.len());
    let mut d = Field::zeros(*plan.domain());
    out.push(d.clone());
    for n in 0..history.steps() {
        let dt = history.times[n + 1] - history.times[n];
        let pre = d.axpy(0.5 * dt, &history.left[n])?;
        d = plan.apply(&pre, dt, &zero)?.axpy(0.5 * dt, &history.right[n])?;
        out.push(d.clone());
    }
    Ok(out)
}

/// `w₂(t_n) = Σ_α ∫_0^{t_n} M_α(F(s), s) Ψ_{α,θ}(·, t_n − s : s) ds` at every
/// node, with the same trapezoid rule as [`duhamel`]; the `s = t` end uses
/// `Ψ(·, 0 : s) = ψ_α(·, s)`.
pub fn build_w2(plan: &SemigroupPlan, profile: &PsiProfile, history: &SourceHistory, k: f64) -> Result<Vec<Field>> {
    let projected = history.map(|f, s| projection(profile, f, s, k));
    duhamel(plan, &projected)
}

/// Quadrature nodes on `R^N` for norms of remainders at scale `σ` around `c`.
fn norm_nodes(dim: usize, center: [f64; 2], scale: f64) -> Vec<([f64; 2], f64)> {
    let step = if dim == 1 { 1.0 / 64.0 } else { 1.0 / 16.0 };
    let rule = SinhSinh::new(scale, step, 4.5);
    match dim {
        1 => rule.points.iter().map(|&(x, w)| ([center[0] + x, 0.0], w)).collect(),
        _ => {
            let mut out = Vec::with_capacity(rule.points.len().pow(2));
            for &(x, wx) in &rule.points {
                for &(y, wy) in &rule.points {
                    out.push(([center[0] + x, center[1] + y], wx * wy));
                }
            }
            out
        }
    }
}

/// Maximum of `|f|` by a coarse scan over `±20σ` followed by repeated local
/// zooming around the best sample.
pub fn sup_search<F>(dim: usize, center: [f64; 2], scale: f64, f: F) -> Result<(f64, [f64; 2])>
where
    F: Fn(&[[f64; 2]]) -> Result<Vec<f64>>,
{
    let (n, half) = if dim == 1 { (321, 20.0) } else { (41, 10.0) };
    let spacing = 2.0 * half * scale / (n - 1) as f64;
    let mut pts = Vec::new();
    for i in 0..n {
        let x = center[0] - half * scale + i as f64 * spacing;
        if dim == 1 {
            pts.push([x, 0.0]);
        } else {
            for k in 0..n {
                pts.push([x, center[1] - half * scale + k as f64 * spacing]);
            }
        }
    }
    let vals = f(&pts)?;
    let (mut best_val, mut best) = best_of(&pts, &vals);
    let mut h = spacing;
    for _ in 0..20 {
        h *= 0.5;
        let mut local = Vec::new();
        for a in -2i32..=2 {
            if dim == 1 {
                local.push([best[0] + a as f64 * h, 0.0]);
            } else {
                for b in -2i32..=2 {
                    local.push([best[0] + a as f64 * h, best[1] + b as f64 * h]);
                }
            }
        }
        let vals = f(&local)?;
        let (v, p) = best_of(&local, &vals);
        if v >= best_val {
            best_val = v;
            best = p;
        }
    }
    Ok((best_val, best))
}

fn best_of(pts: &[[f64; 2]], vals: &[f64]) -> (f64, [f64; 2]) {
    let mut bi = 0;
    for (i, v) in vals.iter().enumerate() {
        if v.abs() > vals[bi].abs() {
            bi = i;
        }
    }
    (vals[bi].abs(), pts[bi])
}

/// Outcome of [`verify_remainder_rates`].
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderRateReport {
    pub k: f64,
    pub j: usize,
    pub q: Exponent,
    pub ell: f64,
    /// `‖∇^j v(t)‖_q`
    pub lq: RateSeries,
    /// `t^{-ℓ/θ} |||∇^j v(t)|||_ℓ`
    pub weighted: RateSeries,
    pub lq_fit: RateFit,
    pub weighted_fit: RateFit,
    /// `-N/θ (1 - 1/q) - (K + j)/θ`
    pub predicted_bound_slope: f64,
    /// `-N/θ (1 - 1/q) - ([K] + 1 + j)/θ` for integer `K`
    pub sharp_slope: Option<f64>,
    pub bound_holds: bool,
    /// largest `|∫ x^α ∇^j v| / ∫ |x^α| |∇^j v|` over `α ∈ M_K` and all times
    pub moment_residual: f64,
}

impl RemainderRateReport {
    pub fn to_csv(&self) -> String {
        rate_csv(&self.lq, &self.weighted, &self.lq_fit, &self.weighted_fit)
    }
}

/// Rate report: `t, lq_value, weighted_value` rows, then the fitted slopes and `r²`.
pub fn rate_csv(lq: &RateSeries, weighted: &RateSeries, lq_fit: &RateFit, weighted_fit: &RateFit) -> String {
    let mut s = String::from("t,lq_value,weighted_value\n");
    for i in 0..lq.len() {
        s += &format!("{},{},{}\n", fmt17(lq.times[i]), fmt17(lq.values[i]), fmt17(weighted.values[i]));
    }
    s += &format!("slope,{},{}\n", fmt17(lq_fit.slope), fmt17(weighted_fit.slope));
    s += &format!("r_squared,{},{}\n", fmt17(lq_fit.r_squared), fmt17(weighted_fit.r_squared));
    s
}

/// Norms of a tensor-valued remainder at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderNorms {
    pub lq: f64,
    pub weighted: f64,
    pub moment_residual: f64,
}

/// `‖·‖_q`, `|||·|||_ℓ` and the moment residual through order `[K]` of a
/// tensor field given pointwise by `eval`, whose natural scale is `σ` around `c`.
pub fn remainder_norms<F>(dim: usize, center: [f64; 2], scale: f64, q: Exponent, ell: f64, k: f64, eval: F) -> Result<RemainderNorms>
where
    F: Fn(&[[f64; 2]]) -> Result<Vec<Vec<f64>>>,
{
    let nodes = norm_nodes(dim, center, scale);
    let pts: Vec<[f64; 2]> = nodes.iter().map(|n| n.0).collect();
    let vals = eval(&pts)?;
    let mag: Vec<f64> = vals.iter().map(|v| v.iter().map(|a| a * a).sum::<f64>().sqrt()).collect();
    let mut weighted = 0.0;
    let mut finite_q = 0.0;
    for ((p, w), m) in nodes.iter().zip(&mag) {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        weighted += w * if ell == 0.0 { *m } else { r.powf(ell) * m };
        if let Exponent::Finite(qq) = q {
            finite_q += w * m.powf(qq);
        }
    }
    let lq = match q {
        Exponent::Finite(qq) => finite_q.powf(1.0 / qq),
        Exponent::Infinity => {
            sup_search(dim, center, scale, |pts| Ok(eval(pts)?.iter().map(|v| v.iter().map(|a| a * a).sum::<f64>().sqrt()).collect()))?.0
        }
    };
    let mut residual = 0.0f64;
    let ncomp = vals.first().map_or(0, |v| v.len());
    for a in multi_indices_up_to(floor_bracket(k)? as f64, dim) {
        for c in 0..ncomp {
            let mut signed = 0.0;
            let mut abs = 0.0;
            for (((p, w), v), _) in nodes.iter().zip(&vals).zip(&mag) {
                let x = a.monomial(&p[..dim]);
                signed += w * x * v[c];
                abs += w * (x * v[c]).abs();
            }
            if abs > 0.0 {
                residual = residual.max(signed.abs() / abs);
            }
        }
    }
    Ok(RemainderNorms { lq, weighted, moment_residual: residual })
}

/// Rate study of the remainder `∇^j v` of the `K`-th expansion of a compactly
/// supported `φ`, by the exact-convolution path.
#[allow(clippy::too_many_arguments)]
pub fn verify_remainder_rates(
    kernel: &Kernel,
    phi: &Field,
    support: &SupportBox,
    k: f64,
    j: usize,
    q: Exponent,
    ell: f64,
    times: &[f64],
) -> Result<RemainderRateReport> {
    let dim = kernel.spec().dim();
    let theta = kernel.spec().theta();
    let mu = DiscreteMeasure::from_field(phi, support)?;
    if mu.is_empty() {
        return Err(Error::InvalidArgument("remainder study needs nonzero data".into()));
    }
    let mass: f64 = mu.weights.iter().map(|w| w.abs()).sum();
    let mut center = [0.0; 2];
    for (p, w) in mu.points.iter().zip(&mu.weights) {
        for a in 0..dim {
            center[a] += p[a] * w.abs() / mass;
        }
    }
    let radius = support.radius(dim);
    let norms: Vec<RemainderNorms> = times
        .par_iter()
        .map(|&t| {
            let scale = t.powf(1.0 / theta).max(radius);
            remainder_norms(dim, center, scale, q, ell, k, |pts| remainder_measure(kernel, &mu, k, j, t, pts))
        })
        .collect::<Result<_>>()?;
    let label = format!("q={q} ell={ell} j={j} K={k}");
    let lq = RateSeries::new(format!("lq {label}"), times.to_vec(), norms.iter().map(|n| n.lq).collect())?;
    let weighted = RateSeries::new(
        format!("weighted {label}"),
        times.to_vec(),
        norms.iter().zip(times).map(|(n, t)| n.weighted * t.powf(-ell / theta)).collect(),
    )?;
    let window = (times[0], times[times.len() - 1]);
    let lq_fit = fit_rate(&lq, window)?;
    let weighted_fit = fit_rate(&weighted, window)?;
    let n = dim as f64;
    let spatial = n / theta * (1.0 - q.reciprocal());
    let predicted_bound_slope = -spatial - (k + j as f64) / theta;
    let sharp_slope = (k.fract() == 0.0).then(|| -spatial - (k + 1.0 + j as f64) / theta);
    let moment_residual = norms.iter().map(|n| n.moment_residual).fold(0.0, f64::max);
    Ok(RemainderRateReport {
        k,
        j,
        q,
        ell,
        bound_holds: lq_fit.slope <= predicted_bound_slope + SLOPE_TOLERANCE,
        lq,
        weighted,
        lq_fit,
        weighted_fit,
        predicted_bound_slope,
        sharp_slope,
        moment_residual,
    })
}

/// Tensor components of `∇^j` in the order used by remainder values.
pub fn remainder_components(dim: usize, j: usize) -> Vec<MultiIndex> {
    tensor_components(dim, j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_of_exact_power_law() {
        let t = log_times(10.0, 100.0, 12);
        let s = RateSeries::new("x", t.clone(), t.iter().map(|t| 3.0 * t.powf(-2.0)).collect()).unwrap();
        let f = fit_rate(&s, DEFAULT_WINDOW).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let c = RateSeries::new("c", t.clone(), vec![0.5; 12]).unwrap();
        assert!(fit_rate(&c, DEFAULT_WINDOW).unwrap().slope.abs() < 1e-12);
        assert!(fit_rate(&s, (10.0, 12.0)).is_err());
        assert!(RateSeries::new("bad", t, vec![0.0; 12]).is_err());
    }

    #[test]
    fn duhamel_of_zero_source_vanishes() {
        let spec = crate::kernel::KernelSpec::new(1, 1.0).unwrap();
        let d = crate::field::Domain::new(1, 16.0, 64).unwrap();
        let plan = SemigroupPlan::new(spec, d).unwrap();
        let h = SourceHistory::from_nodes(vec![0.0, 0.5, 1.0], vec![Field::zeros(d); 3]).unwrap();
        let out = build_w2(&plan, &PsiProfile::gaussian(spec), &h, 2.0).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|f| f.max_abs() == 0.0));
    }
}
