//! `S_θ(t)` on grid functions: a discrete Fourier multiplier on the periodic
//! box, and an exact convolution against the kernel for compactly supported data.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{lq_norm_values, Domain, Exponent, Field, MultiIndex};
use crate::kernel::{tensor_components, DerivOrder, Kernel, KernelSpec};

/// Values outside a declared support must not exceed this.
pub const SUPPORT_TOLERANCE: f64 = 1e-14;

/// Spectral evaluator of `∂^α S_θ(t)` on one domain.
pub struct SemigroupPlan {
    spec: KernelSpec,
    domain: Domain,
    /// `ξ_k = πk/L` in transform order
    freqs: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SemigroupPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SemigroupPlan").field("spec", &self.spec).field("domain", &self.domain).finish()
    }
}

impl SemigroupPlan {
    pub fn new(spec: KernelSpec, domain: Domain) -> Result<Self> {
        if spec.dim() != domain.dim() {
            return Err(Error::DomainMismatch);
        }
        let m = domain.points_per_dim();
        let l = domain.halfwidth();
        let freqs = (0..m)
            .map(|k| {
                let k = if k < m / 2 { k as f64 } else { k as f64 - m as f64 };
                std::f64::consts::PI * k / l
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self { spec, domain, freqs, forward: planner.plan_fft_forward(m), inverse: planner.plan_fft_inverse(m) })
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Rejects times at which the diffusing profile reaches the box wall,
    /// `t^{1/θ} > L/8`.
    pub fn check_horizon(&self, t: f64) -> Result<()> {
        let scale = t.powf(1.0 / self.spec.theta());
        let limit = self.domain.halfwidth() / 8.0;
        if scale > limit {
            return Err(Error::BoxTooSmall { scale, limit });
        }
        Ok(())
    }

    /// `∂^α S_θ(t) φ` by the multiplier `(iξ)^α e^{-t|ξ|^θ}`.
    pub fn apply(&self, phi: &Field, t: f64, alpha: &MultiIndex) -> Result<Field> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
        }
        if alpha.dim() != self.domain.dim() {
            return Err(Error::DomainMismatch);
        }
        if t == 0.0 && alpha.is_zero() {
            self.check_domain(phi)?;
            return Ok(phi.clone());
        }
        let theta = self.spec.theta();
        let m = self.domain.points_per_dim();
        let a = alpha.components().to_vec();
        self.apply_multiplier(phi, |k| {
            let mut rho2 = 0.0;
            let mut factor = Complex64::new(1.0, 0.0);
            for (axis, &ki) in k.iter().enumerate() {
                let xi = self.freqs[ki];
                rho2 += xi * xi;
                let order = a[axis];
                if order > 0 {
                    // the Nyquist mode has no real-symmetric partner for odd orders
                    if ki == m / 2 && order % 2 == 1 {
                        return Complex64::new(0.0, 0.0);
                    }
                    factor *= Complex64::new(0.0, xi).powu(order);
                }
            }
            factor * (-t * rho2.powf(0.5 * theta)).exp()
        })
    }

    /// Applies a general Fourier multiplier given per multi-dimensional mode index.
    pub fn apply_multiplier<M>(&self, phi: &Field, multiplier: M) -> Result<Field>
    where
        M: Fn(&[usize]) -> Complex64 + Sync,
    {
        self.check_domain(phi)?;
        let m = self.domain.points_per_dim();
        let mut buf: Vec<Complex64> = phi.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        match self.domain.dim() {
            1 => buf.par_iter_mut().enumerate().for_each(|(k, c)| *c *= multiplier(&[k])),
            _ => buf.par_chunks_mut(m).enumerate().for_each(|(k0, row)| {
                for (k1, c) in row.iter_mut().enumerate() {
                    *c *= multiplier(&[k0, k1]);
                }
            }),
        }
        self.transform(&mut buf, &self.inverse);
        let norm = 1.0 / self.domain.len() as f64;
        Ok(Field::from_raw(self.domain, buf.iter().map(|c| c.re * norm).collect()))
    }

    /// The real trigonometric sum `(2L)^{-N} Σ_k c(k) e^{iξ_k·x}` over the
    /// resolved modes, sampled on the grid. With `c = ĝ` this is the periodized,
    /// band-limited `g`, the counterpart of what [`apply`](Self::apply) does to data.
    pub fn synthesize<M>(&self, coeffs: M) -> Field
    where
        M: Fn(&[usize]) -> Complex64 + Sync,
    {
        let m = self.domain.points_per_dim();
        let x0 = self.domain.coord(0);
        let phase: Vec<Complex64> = self.freqs.iter().map(|&xi| Complex64::from_polar(1.0, xi * x0)).collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.domain.len()];
        match self.domain.dim() {
            1 => buf.par_iter_mut().enumerate().for_each(|(k, c)| *c = coeffs(&[k]) * phase[k]),
            _ => buf.par_chunks_mut(m).enumerate().for_each(|(k0, row)| {
                for (k1, c) in row.iter_mut().enumerate() {
                    *c = coeffs(&[k0, k1]) * phase[k0] * phase[k1];
                }
            }),
        }
        self.transform(&mut buf, &self.inverse);
        let norm = (2.0 * self.domain.halfwidth()).powi(-(self.domain.dim() as i32));
        Field::from_raw(self.domain, buf.iter().map(|c| c.re * norm).collect())
    }

    /// `ξ_k` for transform index `k` along one axis.
    pub fn frequency(&self, k: usize) -> f64 {
        self.freqs[k]
    }

    fn check_domain(&self, phi: &Field) -> Result<()> {
        if *phi.domain() != self.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.domain.points_per_dim();
        match self.domain.dim() {
            1 => fft.process(buf),
            _ => {
                buf.par_chunks_mut(m).for_each(|row| fft.process(row));
                transpose(buf, m);
                buf.par_chunks_mut(m).for_each(|row| fft.process(row));
                transpose(buf, m);
            }
        }
    }

    /// `max_t ‖∇^j S_θ(t)φ‖_r t^{N/θ(1/q-1/r)+j/θ} / ‖φ‖_q`, with `|∇^j u|` the
    /// Euclidean norm of the derivative tensor at each point.
    pub fn verify_smoothing(&self, phi: &Field, q: Exponent, r: Exponent, j: usize, times: &[f64]) -> Result<SmoothingReport> {
        if q.reciprocal() < r.reciprocal() {
            return Err(Error::InvalidArgument("smoothing estimate needs q <= r".into()));
        }
        if j > 2 {
            return Err(Error::InvalidArgument(format!("derivative tensors of order {j} are not supported (j <= 2)")));
        }
        let n = self.domain.dim() as f64;
        let theta = self.spec.theta();
        let base = lq_norm_values(phi.values(), self.domain.cell_volume(), q);
        if base == 0.0 {
            return Err(Error::InvalidArgument("smoothing ratio undefined for zero data".into()));
        }
        let comps = tensor_components(self.domain.dim(), j);
        let mut ratios = Vec::with_capacity(times.len());
        for &t in times {
            self.check_horizon(t)?;
            let mut sq = vec![0.0; self.domain.len()];
            for c in &comps {
                let d = self.apply(phi, t, c)?;
                for (s, v) in sq.iter_mut().zip(d.values()) {
                    *s += v * v;
                }
            }
            let mag: Vec<f64> = sq.into_iter().map(f64::sqrt).collect();
            let value = lq_norm_values(&mag, self.domain.cell_volume(), r);
            let power = n / theta * (q.reciprocal() - r.reciprocal()) + j as f64 / theta;
            ratios.push(value * t.powf(power) / base);
        }
        let fitted = ratios.iter().cloned().fold(0.0, f64::max);
        Ok(SmoothingReport { times: times.to_vec(), ratios, fitted })
    }
}

/// Outcome of [`SemigroupPlan::verify_smoothing`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingReport {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub fitted: f64,
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// Axis-aligned box `[lo_i, hi_i]` declared to contain the support of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl SupportBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Self {
        let mut b = Self { lo: [0.0; 2], hi: [0.0; 2] };
        b.lo[..lo.len()].copy_from_slice(lo);
        b.hi[..hi.len()].copy_from_slice(hi);
        b
    }

    /// Smallest box containing every cell whose value exceeds the tolerance.
    pub fn of(f: &Field) -> Option<Self> {
        let d = f.domain();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let mut any = false;
        for (i, v) in f.values().iter().enumerate() {
            if v.abs() > SUPPORT_TOLERANCE {
                any = true;
                let p = d.point(i);
                for a in 0..d.dim() {
                    lo[a] = lo[a].min(p[a]);
                    hi[a] = hi[a].max(p[a]);
                }
            }
        }
        if !any {
            return None;
        }
        for a in d.dim()..2 {
            lo[a] = 0.0;
            hi[a] = 0.0;
        }
        Some(Self { lo, hi })
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(a, &x)| x >= self.lo[a] && x <= self.hi[a])
    }

    /// Largest distance of a box point from the origin.
    pub fn radius(&self, dim: usize) -> f64 {
        (0..dim).map(|a| self.lo[a].abs().max(self.hi[a].abs()).powi(2)).sum::<f64>().sqrt()
    }
}

/// Support of a grid function as a discrete measure: cell centres and
/// weights `φ(y_i) h^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Collects the cells inside `support`; rejects fields that are not
    /// negligible outside it.
    pub fn from_field(f: &Field, support: &SupportBox) -> Result<Self> {
        let d = f.domain();
        let cell = d.cell_volume();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (i, &v) in f.values().iter().enumerate() {
            let p = d.point(i);
            if support.contains(&p[..d.dim()]) {
                if v != 0.0 {
                    points.push(p);
                    weights.push(v * cell);
                }
            } else if v.abs() > SUPPORT_TOLERANCE {
                return Err(Error::SupportViolation { index: i, value: v });
            }
        }
        Ok(Self { dim: d.dim(), points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_i w_i y_i^α`.
    pub fn moment(&self, alpha: &MultiIndex) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * alpha.monomial(&p[..self.dim])).sum()
    }
}

/// `∂^α S_θ(t) φ` at arbitrary points by direct summation of the kernel
/// against the cells of `φ` inside `support`.
pub fn convolve_exact(kernel: &Kernel, phi: &Field, support: &SupportBox, t: f64, alpha: &MultiIndex, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if kernel.spec().dim() != phi.domain().dim() {
        return Err(Error::DomainMismatch);
    }
    let measure = DiscreteMeasure::from_field(phi, support)?;
    convolve_measure(kernel, &measure, t, alpha, eval_points)
}

/// As [`convolve_exact`] for an already extracted measure.
pub fn convolve_measure(kernel: &Kernel, measure: &DiscreteMeasure, t: f64, alpha: &MultiIndex, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let der = kernel.derivative(DerivOrder::spatial(*alpha))?;
    let dim = measure.dim;
    eval_points
        .par_iter()
        .map(|x| {
            let mut s = 0.0;
            for (y, w) in measure.points.iter().zip(&measure.weights) {
                let mut z = [0.0; 2];
                for a in 0..dim {
                    z[a] = x[a] - y[a];
                }
                s += w * der.eval(&z[..dim], t)?;
            }
            Ok(s)
        })
        .collect()
}
