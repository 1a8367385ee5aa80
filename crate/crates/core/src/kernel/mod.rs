//! The fundamental solution `G_θ` of `∂_t u + (-Δ)^{θ/2} u = 0`, its space-time
//! derivatives, the expansion atoms `g_{α,θ}` and the Taylor-remainder kernel
//! `H^j_ℓ`.
//!
//! `G_θ(x, t) = (2π)^{-N} ∫ e^{ix·ξ} e^{-t|ξ|^θ} dξ` is evaluated on its `t = 1`
//! radial profile (see [`subordinator`]) and rescaled by self-similarity.

pub mod deriv;
pub mod fourier;
pub mod subordinator;
pub mod table;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::{factorial, floor_bracket, multi_indices_up_to, MultiIndex};
use crate::quad::GaussLegendre;
use deriv::RadialExpansion;
use subordinator::RadialProfiles;
use table::ProfileTable;

pub const DEFAULT_DERIV_CAP: f64 = 6.0;
const TABLE_KMAX: usize = 10;
const TABLE_RADIUS: f64 = 1e5;
const TABLE_STEP: f64 = 0.005;
/// Core scales tried in turn; the profiles sharpen at the origin as θ decreases.
const TABLE_CORES: [f64; 3] = [0.02, 0.004, 0.0008];
const REMAINDER_NODES: usize = 24;

/// Dimension `N` and order `θ` of the kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    dim: usize,
    theta: f64,
}

impl KernelSpec {
    pub fn new(dim: usize, theta: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(theta > 0.0 && theta < 2.0) {
            return Err(Error::InvalidArgument(format!("theta must lie in (0,2), got {theta}")));
        }
        Ok(Self { dim, theta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// `∂_t^m ∂_x^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DerivOrder {
    pub alpha: MultiIndex,
    pub m: u32,
}

impl DerivOrder {
    pub fn new(alpha: MultiIndex, m: u32) -> Self {
        Self { alpha, m }
    }

    pub fn spatial(alpha: MultiIndex) -> Self {
        Self { alpha, m: 0 }
    }

    /// `|α| + θm`.
    pub fn weight(&self, theta: f64) -> f64 {
        self.alpha.order() as f64 + theta * self.m as f64
    }
}

/// Outcome of [`Kernel::verify_pointwise_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub deriv: DerivOrder,
    /// smallest `C` making the bound hold on the fitting samples
    pub fitted_c: f64,
    /// largest ratio on an extended check set, relative to `fitted_c`
    pub max_violation_ratio: f64,
    /// sample `(|x|, t)` attaining `fitted_c`
    pub argmax: (f64, f64),
    /// infimum of the ratio over `|x| ≥ 10 t^{1/θ}` (only for `α = 0, m = 0`)
    pub tail_infimum: Option<f64>,
}

/// Radii and times for [`Kernel::verify_pointwise_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSamples {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
}

impl Default for BoundSamples {
    fn default() -> Self {
        let mut radii: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
        radii.extend((1..=60).map(|i| 2.0 * 50f64.powf(i as f64 / 60.0)));
        Self { radii, times: vec![0.5, 1.0, 2.0] }
    }
}

/// Evaluator for `G_θ` and its derivatives, with a memoized profile table.
#[derive(Debug)]
pub struct Kernel {
    spec: KernelSpec,
    profiles: RadialProfiles,
    /// `None` when no table passed its spot check; evaluation is then direct
    table: Option<ProfileTable>,
    deriv_cap: f64,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        let profiles = RadialProfiles::new(spec.dim, spec.theta)?;
        let mut table = None;
        for core in TABLE_CORES {
            match ProfileTable::build(&profiles, TABLE_KMAX, TABLE_RADIUS, TABLE_STEP, core) {
                Ok(t) => {
                    table = Some(t);
                    break;
                }
                Err(Error::TableCheck(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok(Self { spec, profiles, table, deriv_cap: DEFAULT_DERIV_CAP })
    }

    /// Reuses a previously dumped table; it must match `spec`.
    pub fn with_table(spec: KernelSpec, table: ProfileTable) -> Result<Self> {
        if table.dim() != spec.dim || table.theta() != spec.theta {
            return Err(Error::Format("table was built for a different kernel".into()));
        }
        let profiles = RadialProfiles::new(spec.dim, spec.theta)?;
        Ok(Self { spec, profiles, table: Some(table), deriv_cap: DEFAULT_DERIV_CAP })
    }

    /// Process-wide instance per `(N, θ)`, built on first use.
    pub fn shared(spec: KernelSpec) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<Kernel>>>> = OnceLock::new();
        let key = (spec.dim, spec.theta.to_bits());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(k) = cache.lock().unwrap().get(&key) {
            return Ok(k.clone());
        }
        let k = Arc::new(Self::new(spec)?);
        Ok(cache.lock().unwrap().entry(key).or_insert(k).clone())
    }

    pub fn with_deriv_cap(mut self, cap: f64) -> Self {
        self.deriv_cap = cap;
        self
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn table(&self) -> Option<&ProfileTable> {
        self.table.as_ref()
    }

    pub fn profiles(&self) -> &RadialProfiles {
        &self.profiles
    }

    /// `h_0(r), ..., h_{out.len()-1}(r)` of the `t = 1` profile.
    pub fn radial_into(&self, r: f64, out: &mut [f64]) {
        match &self.table {
            Some(t) if t.eval_into(r, out) => {}
            _ => self.profiles.eval_into(r, out),
        }
    }

    fn check_deriv(&self, d: &DerivOrder) -> Result<()> {
        if d.alpha.dim() != self.spec.dim {
            return Err(Error::InvalidArgument(format!("multi-index {} does not match dimension {}", d.alpha, self.spec.dim)));
        }
        if d.weight(self.spec.theta) > self.deriv_cap + 1e-12 {
            return Err(Error::DerivativeCap);
        }
        Ok(())
    }

    /// Precomputed evaluator for one derivative order.
    pub fn derivative(&self, d: DerivOrder) -> Result<Derivative<'_>> {
        self.check_deriv(&d)?;
        let expansion = RadialExpansion::for_derivative(&d.alpha, d.m, self.spec.theta);
        let theta = self.spec.theta;
        Ok(Derivative {
            kernel: self,
            kmax: expansion.max_k(),
            expansion,
            power: -(self.spec.dim as f64 + d.alpha.order() as f64) / theta - d.m as f64,
        })
    }

    /// `G_θ(x, t)`.
    pub fn eval_kernel(&self, x: &[f64], t: f64) -> Result<f64> {
        self.eval_kernel_deriv(&DerivOrder::spatial(MultiIndex::zero(self.spec.dim)), x, t)
    }

    /// `(∂_t^m ∂_x^α G_θ)(x, t)`.
    pub fn eval_kernel_deriv(&self, d: &DerivOrder, x: &[f64], t: f64) -> Result<f64> {
        self.derivative(*d)?.eval(x, t)
    }

    /// `g_{α,θ}(x, t) = ((-1)^{|α|}/α!) (∂^α G_θ)(x, t)`.
    pub fn eval_g_alpha(&self, alpha: &MultiIndex, x: &[f64], t: f64) -> Result<f64> {
        Ok(alpha.sign_over_factorial() * self.eval_kernel_deriv(&DerivOrder::spatial(*alpha), x, t)?)
    }

    /// `∫ x^β g_{α,θ}(x, t) dx`.
    ///
    /// The integrand decays only like `|x|^{|β|-|α|-N-θ}`, so no finite box
    /// is used: polar coordinates, an exp–sinh rule in the radius (step halved
    /// until two levels agree to `1e-11`) and the trapezoid rule in the angle,
    /// exact here because the angular dependence is a trigonometric polynomial
    /// of degree `|α| + |β|`.
    pub fn g_alpha_moment(&self, alpha: &MultiIndex, beta: &MultiIndex, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let der = self.derivative(DerivOrder::spatial(*alpha))?;
        let scale = t.powf(1.0 / self.spec.theta);
        let dirs: Vec<([f64; 2], f64)> = match self.spec.dim {
            1 => vec![([1.0, 0.0], 1.0), ([-1.0, 0.0], 1.0)],
            _ => {
                let n = 2 * (alpha.order() + beta.order()) as usize + 2;
                let w = 2.0 * std::f64::consts::PI / n as f64;
                (0..n).map(|i| ([(i as f64 * w).cos(), (i as f64 * w).sin()], w)).collect()
            }
        };
        let dim = self.spec.dim;
        let level = |step: f64| -> Result<f64> {
            let n = (4.5 / step).ceil() as i64;
            let mut sum = 0.0;
            for k in -n..=n {
                let u = k as f64 * step;
                let e = std::f64::consts::FRAC_PI_2 * u.sinh();
                let r = scale * e.exp();
                let jac = r * std::f64::consts::FRAC_PI_2 * u.cosh() * step * r.powi(dim as i32 - 1);
                if !(r.is_finite() && jac.is_finite()) || jac == 0.0 {
                    continue;
                }
                for (d, w) in &dirs {
                    let x = [r * d[0], r * d[1]];
                    sum += jac * w * beta.monomial(&x[..dim]) * der.eval(&x[..dim], t)?;
                }
            }
            Ok(sum)
        };
        let mut step = 1.0 / 16.0;
        let mut prev = level(step)?;
        loop {
            step *= 0.5;
            let next = level(step)?;
            if (next - prev).abs() <= 1e-11 * next.abs().max(1.0) || step < 1.0 / 2048.0 {
                return Ok(alpha.sign_over_factorial() * next);
            }
            prev = next;
        }
    }

    /// Precomputed evaluator of `H^j_ℓ`.
    pub fn remainder_kernel(&self, j: usize, ell: f64) -> Result<RemainderKernel<'_>> {
        RemainderKernel::new(self, j, ell)
    }

    /// `H^j_ℓ(x, y, t)` as a flat row-major tensor of length `N^j`.
    #[allow(non_snake_case)]
    pub fn eval_H(&self, j: usize, ell: f64, x: &[f64], y: &[f64], t: f64) -> Result<Vec<f64>> {
        self.remainder_kernel(j, ell)?.eval(x, y, t)
    }

    /// Fits `C` in `|∂_t^m ∂^α G_θ| ≤ C t^{-(N+|α|)/θ-m} (1+t^{-1/θ}|x|)^{-e}`
    /// with `e = N+θ+|α|` for `m = 0` and `e = N+θm+|α|` otherwise.
    pub fn verify_pointwise_bound(&self, d: DerivOrder, samples: &BoundSamples) -> Result<BoundReport> {
        let der = self.derivative(d)?;
        let theta = self.spec.theta;
        let n = self.spec.dim as f64;
        let a = d.alpha.order() as f64;
        let e = if d.m == 0 { n + theta + a } else { n + theta * d.m as f64 + a };
        let dir = self.sample_direction();
        let ratio = |r: f64, t: f64| -> Result<f64> {
            let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
            let v = der.eval(&x, t)?;
            let shape = t.powf(der.power) * (1.0 + t.powf(-1.0 / theta) * r).powf(-e);
            Ok(v.abs() / shape)
        };
        let mut fitted_c = 0.0;
        let mut argmax = (0.0, 0.0);
        for &t in &samples.times {
            for &r in &samples.radii {
                let q = ratio(r, t)?;
                if q > fitted_c {
                    fitted_c = q;
                    argmax = (r, t);
                }
            }
        }
        let r_top = samples.radii.iter().cloned().fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for &t in &samples.times {
            for i in 0..=200 {
                let r = r_top * 10f64.powf(i as f64 / 200.0 * 3.0) / 10.0;
                worst = worst.max(ratio(r, t)?);
            }
            for w in samples.radii.windows(2) {
                worst = worst.max(ratio(0.5 * (w[0] + w[1]), t)?);
            }
        }
        let tail_infimum = if d.m == 0 && d.alpha.is_zero() {
            let mut inf = f64::INFINITY;
            for &t in &samples.times {
                let scale = t.powf(1.0 / theta);
                for &r in samples.radii.iter().filter(|&&r| r >= 10.0 * scale) {
                    inf = inf.min(ratio(r, t)?);
                }
                inf = inf.min(ratio(1e3 * r_top, t)?);
            }
            Some(inf)
        } else {
            None
        };
        Ok(BoundReport { deriv: d, fitted_c, max_violation_ratio: worst / fitted_c, argmax, tail_infimum })
    }

    fn sample_direction(&self) -> Vec<f64> {
        match self.spec.dim {
            1 => vec![1.0],
            // off-axis so mixed derivatives are not sampled on their zero set
            _ => vec![0.8, 0.6],
        }
    }

    /// `∫_{[-L,L]^N} G_θ(x, t) dx`, by Gauss–Legendre panels in `asinh x`.
    pub fn box_mass(&self, halfwidth: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let s = t.powf(1.0 / self.spec.theta);
        let z_max = (halfwidth / s).asinh();
        let panels = (z_max / 0.1).ceil().max(1.0) as usize;
        let gl = GaussLegendre::new(12);
        let mut nodes = Vec::new();
        for p in 0..panels {
            let a = z_max * p as f64 / panels as f64;
            let b = z_max * (p + 1) as f64 / panels as f64;
            nodes.extend(gl.mapped(a, b).map(|(z, w)| (z.sinh(), w * z.cosh())));
        }
        let mut h = [0.0];
        let total = match self.spec.dim {
            1 => {
                let mut sum = 0.0;
                for &(x, w) in &nodes {
                    self.radial_into(x, &mut h);
                    sum += w * h[0];
                }
                2.0 * sum
            }
            _ => {
                use rayon::prelude::*;
                let sum: f64 = nodes
                    .par_iter()
                    .map(|&(x, wx)| {
                        let mut h = [0.0];
                        let mut row = 0.0;
                        for &(y, wy) in &nodes {
                            self.radial_into((x * x + y * y).sqrt(), &mut h);
                            row += wy * h[0];
                        }
                        wx * row
                    })
                    .sum();
                4.0 * sum
            }
        };
        Ok(total)
    }
}

/// Evaluator of one fixed `∂_t^m ∂_x^α G_θ`.
#[derive(Debug, Clone)]
pub struct Derivative<'a> {
    kernel: &'a Kernel,
    expansion: RadialExpansion,
    kmax: usize,
    /// `-(N+|α|)/θ - m`
    power: f64,
}

impl Derivative<'_> {
    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        if x.len() != self.kernel.spec.dim {
            return Err(Error::DomainMismatch);
        }
        let theta = self.kernel.spec.theta;
        let scale = t.powf(-1.0 / theta);
        Ok(t.powf(self.power) * self.eval_scaled(x, scale))
    }

    /// Profile value at `scale·x`, without the time prefactor.
    fn eval_scaled(&self, x: &[f64], scale: f64) -> f64 {
        let dim = self.kernel.spec.dim;
        let mut xs = [0.0; 2];
        for i in 0..dim {
            xs[i] = scale * x[i];
        }
        let r = xs[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        if self.kmax < 16 {
            let mut h = [0.0; 16];
            let h = &mut h[..=self.kmax];
            self.kernel.radial_into(r, h);
            self.expansion.evaluate(&xs[..dim], h)
        } else {
            let mut h = vec![0.0; self.kmax + 1];
            self.kernel.radial_into(r, &mut h);
            self.expansion.evaluate(&xs[..dim], &h)
        }
    }

    pub fn time_power(&self) -> f64 {
        self.power
    }
}

/// Evaluator of `H^j_ℓ(x, y, t)`.
///
/// For `|y|` small against `max(t^{1/θ}, |x|)` the defining difference cancels,
/// so the integral form of the Taylor remainder of order `k = [ℓ]` is used:
/// `H = ∫_0^1 (1-τ)^k/k! Σ_{|β|=k+1} ((k+1)!/β!) (-y)^β ∂^β ∇^j G(x-τy) dτ`.
#[derive(Debug, Clone)]
pub struct RemainderKernel<'a> {
    kernel: &'a Kernel,
    j: usize,
    k: u32,
    /// per tensor component: the direct Taylor terms `(α, ∂^α ∇^j G)`
    taylor: Vec<Vec<(MultiIndex, Derivative<'a>)>>,
    /// per tensor component: the top-order terms `(β, ∂^β ∇^j G)`
    top: Vec<Vec<(MultiIndex, Derivative<'a>)>>,
    gl: GaussLegendre,
}

impl<'a> RemainderKernel<'a> {
    fn new(kernel: &'a Kernel, j: usize, ell: f64) -> Result<Self> {
        if j > 2 {
            return Err(Error::InvalidArgument(format!("derivative tensors of order {j} are not supported (j <= 2)")));
        }
        let k = floor_bracket(ell)?;
        let dim = kernel.spec.dim;
        let components = tensor_components(dim, j);
        let mut taylor = Vec::with_capacity(components.len());
        let mut top = Vec::with_capacity(components.len());
        let top_order: Vec<MultiIndex> = multi_indices_up_to(k as f64 + 1.0, dim).into_iter().filter(|b| b.order() == k + 1).collect();
        for c in &components {
            let mut row = Vec::new();
            for a in multi_indices_up_to(k as f64, dim) {
                row.push((a, kernel.derivative(DerivOrder::spatial(a.add(c)))?));
            }
            taylor.push(row);
            let mut row = Vec::new();
            for b in &top_order {
                row.push((*b, kernel.derivative(DerivOrder::spatial(b.add(c)))?));
            }
            top.push(row);
        }
        Ok(Self { kernel, j, k, taylor, top, gl: GaussLegendre::new(REMAINDER_NODES) })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    /// Number of tensor components, `N^j`.
    pub fn len(&self) -> usize {
        self.taylor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taylor.is_empty()
    }

    pub fn eval(&self, x: &[f64], y: &[f64], t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(x, y, t, &mut out)?;
        Ok(out)
    }

    pub fn eval_into(&self, x: &[f64], y: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        let dim = self.kernel.spec.dim;
        let theta = self.kernel.spec.theta;
        let ynorm = norm(&y[..dim]);
        if ynorm == 0.0 {
            out.iter_mut().for_each(|o| *o = 0.0);
            return Ok(());
        }
        let scale = t.powf(-1.0 / theta);
        let t_scale = t.powf(1.0 / theta);
        // each ∂^γ G carries t^{-(N+|γ|)/θ}; factor out the common part
        let base = t.powf(-(dim as f64 + self.j as f64) / theta);
        let mut shifted = [0.0; 2];
        for i in 0..dim {
            shifted[i] = x[i] - y[i];
        }
        if ynorm < 0.5 * t_scale.max(norm(&x[..dim])) {
            let kf = self.k as f64;
            let fact_k = factorial(self.k);
            let fact_k1 = factorial(self.k + 1);
            // top-order weights ((k+1)!/β!) (-y)^β t^{-(k+1)/θ}
            let yscale = t.powf(-(kf + 1.0) / theta);
            for (o, row) in out.iter_mut().zip(&self.top) {
                let weights: Vec<f64> = row
                    .iter()
                    .map(|(b, _)| {
                        let neg: Vec<f64> = y[..dim].iter().map(|v| -v).collect();
                        fact_k1 / b.factorial() * b.monomial(&neg) * yscale
                    })
                    .collect();
                let mut acc = 0.0;
                for (z, w) in self.gl.nodes.iter().zip(&self.gl.weights) {
                    let tau = 0.5 * (1.0 + z);
                    let mut p = [0.0; 2];
                    for i in 0..dim {
                        p[i] = x[i] - tau * y[i];
                    }
                    let mut s = 0.0;
                    for ((_, d), wb) in row.iter().zip(&weights) {
                        s += wb * d.eval_scaled(&p[..dim], scale);
                    }
                    acc += 0.5 * w * (1.0 - tau).powi(self.k as i32) / fact_k * s;
                }
                *o = base * acc;
            }
        } else {
            for (o, row) in out.iter_mut().zip(&self.taylor) {
                let mut v = row[0].1.eval_scaled(&shifted[..dim], scale);
                for (a, d) in row {
                    let ya = a.monomial(&y[..dim]) * t.powf(-(a.order() as f64) / theta);
                    v -= a.sign_over_factorial() * d.eval_scaled(&x[..dim], scale) * ya;
                }
                *o = base * v;
            }
        }
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Multi-indices of the components of `∇^j`, row-major over `(i_1, ..., i_j)`.
pub fn tensor_components(dim: usize, j: usize) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::zero(dim)];
    for _ in 0..j {
        out = out.iter().flat_map(|c| (0..dim).map(move |i| c.add(&MultiIndex::unit(dim, i)))).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cauchy() -> Arc<Kernel> {
        Kernel::shared(KernelSpec::new(1, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(1, 0.0).is_err());
        assert!(KernelSpec::new(1, 2.0).is_err());
        assert!(KernelSpec::new(3, 1.0).is_err());
        assert!(cauchy().eval_kernel(&[0.0], 0.0).is_err());
    }

    #[test]
    fn cauchy_values() {
        let k = cauchy();
        assert!((k.eval_kernel(&[0.0], 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((k.eval_kernel(&[2.0], 1.0).unwrap() - 1.0 / (5.0 * PI)).abs() < 1e-15);
        let v = k.eval_kernel(&[3.0], 0.5).unwrap();
        assert!((v - 0.5 / (PI * 9.25)).abs() < 1e-14);
    }

    #[test]
    fn odd_derivatives_vanish_at_origin() {
        let k = Kernel::shared(KernelSpec::new(2, 1.3).unwrap()).unwrap();
        for a in [[1, 0], [0, 1], [2, 1], [1, 2]] {
            let d = DerivOrder::spatial(MultiIndex::new(&a));
            assert_eq!(k.eval_kernel_deriv(&d, &[0.0, 0.0], 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn cap_and_tensor_order_enforced() {
        let k = cauchy();
        assert_eq!(k.eval_kernel_deriv(&DerivOrder::new(MultiIndex::new(&[5]), 2), &[0.0], 1.0), Err(Error::DerivativeCap));
        assert!(k.eval_H(3, 0.0, &[1.0], &[0.1], 1.0).is_err());
    }

    #[test]
    fn remainder_vanishes_at_zero_shift_and_switches_smoothly() {
        let k = Kernel::shared(KernelSpec::new(2, 0.8).unwrap()).unwrap();
        for j in 0..=2 {
            let h = k.eval_H(j, 1.5, &[0.3, -0.2], &[0.0, 0.0], 1.0).unwrap();
            assert_eq!(h.len(), 2usize.pow(j as u32));
            assert!(h.iter().all(|v| *v == 0.0));
        }
        // on both sides of the switch between the two forms
        let rk = k.remainder_kernel(1, 1.0).unwrap();
        let x = [1.0, 0.5];
        let tsc: f64 = 1.0;
        let edge = 0.5 * tsc.max(norm(&x));
        let dir = [0.6, 0.8];
        let below = rk.eval(&x, &[dir[0] * edge * (1.0 - 1e-12), dir[1] * edge * (1.0 - 1e-12)], 1.0).unwrap();
        let above = rk.eval(&x, &[dir[0] * edge * (1.0 + 1e-12), dir[1] * edge * (1.0 + 1e-12)], 1.0).unwrap();
        for (a, b) in below.iter().zip(&above) {
            assert!((a - b).abs() < 1e-10 * a.abs(), "{a} {b}");
        }
    }

    #[test]
    fn atom_moments_are_biorthogonal() {
        let k = Kernel::new(KernelSpec::new(1, 0.5).unwrap()).unwrap();
        let m = |a: u32, b: u32| k.g_alpha_moment(&MultiIndex::new(&[a]), &MultiIndex::new(&[b]), 2.0).unwrap();
        assert!((m(2, 2) - 1.0).abs() < 1e-9);
        assert!(m(2, 0).abs() < 1e-9 && m(2, 1).abs() < 1e-9);
    }

    #[test]
    fn tensor_components_are_row_major() {
        let c = tensor_components(2, 2);
        let expect: Vec<MultiIndex> = [[2, 0], [1, 1], [1, 1], [0, 2]].iter().map(|a| MultiIndex::new(a)).collect();
        assert_eq!(c, expect);
    }
}
