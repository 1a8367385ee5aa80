//! The reference profile `ψ`, its scaled derivative family `ψ_α(·, s)`, the
//! corrected atoms `Ψ_{α,θ}`, the coefficient recursion `M_α` and the
//! vanishing-moment predicate.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{factorial, moments as grid_moments, multi_indices_up_to, weighted_l1, Field, MultiIndex};
use crate::kernel::{Kernel, KernelSpec};
use crate::quad::{GaussLegendre, SinhSinh};
use crate::semigroup::{convolve_measure, DiscreteMeasure, SemigroupPlan};

/// Evaluator of `∂^α ψ` for an unnormalized custom profile.
pub type PsiDerivative = Arc<dyn Fn(&MultiIndex, &[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiKind {
    Gaussian,
    Custom,
}

/// Radial reference profile with `∫ψ = 1`.
#[derive(Clone)]
pub struct PsiProfile {
    spec: KernelSpec,
    kind: PsiKind,
    custom: Option<PsiDerivative>,
    /// largest derivative order the evaluator supports
    cap: u32,
    normalization: f64,
    /// truncation radius of the quadrature measures, in units of `(1+s)^{1/θ}`
    radius: f64,
}

impl std::fmt::Debug for PsiProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PsiProfile")
            .field("spec", &self.spec)
            .field("kind", &self.kind)
            .field("cap", &self.cap)
            .field("normalization", &self.normalization)
            .finish()
    }
}

const GAUSSIAN_RADIUS: f64 = 7.5;
const MEASURE_PANEL: f64 = 0.5;
const MEASURE_ORDER: usize = 10;

impl PsiProfile {
    /// `ψ(x) = π^{-N/2} e^{-|x|²}`.
    pub fn gaussian(spec: KernelSpec) -> Self {
        Self { spec, kind: PsiKind::Gaussian, custom: None, cap: u32::MAX, normalization: 1.0, radius: GAUSSIAN_RADIUS }
    }

    /// A radial profile given by its derivatives up to order `cap`; the mass
    /// is normalized to one by quadrature. `radius` is where the quadrature
    /// measures of `ψ_α` are truncated.
    pub fn custom(spec: KernelSpec, cap: u32, radius: f64, deriv: PsiDerivative) -> Result<Self> {
        let mut p = Self { spec, kind: PsiKind::Custom, custom: Some(deriv), cap, normalization: 1.0, radius };
        let zero = MultiIndex::zero(spec.dim());
        let mass = p.whole_space_integral(|x| p.deriv(&zero, x));
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidArgument(format!("profile mass must be positive, got {mass}")));
        }
        p.normalization = 1.0 / mass;
        let check = p.whole_space_integral(|x| p.deriv(&zero, x));
        if (check - 1.0).abs() > 1e-10 {
            return Err(Error::Quadrature { residual: (check - 1.0).abs(), tolerance: 1e-10 });
        }
        if spec.dim() == 2 {
            for (r, a) in [(0.3, 0.4), (1.1, 1.9), (2.5, 2.2)] {
                let v0 = p.deriv(&zero, &[r, 0.0]);
                let v1 = p.deriv(&zero, &[r * f64::cos(a), r * f64::sin(a)]);
                if (v0 - v1).abs() > 1e-10 * v0.abs().max(1e-300) {
                    return Err(Error::InvalidArgument("profile is not radially symmetric".into()));
                }
            }
        } else {
            for x in [0.3, 1.7, 4.0] {
                let (a, b) = (p.deriv(&zero, &[x]), p.deriv(&zero, &[-x]));
                if (a - b).abs() > 1e-12 * a.abs().max(1e-300) {
                    return Err(Error::InvalidArgument("profile is not even".into()));
                }
            }
        }
        Ok(p)
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn kind(&self) -> PsiKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// `(1+s)^{1/θ}`.
    pub fn dilation(&self, s: f64) -> f64 {
        (1.0 + s).powf(1.0 / self.spec.theta())
    }

    /// `∂^α ψ(z)` of the normalized profile.
    pub fn deriv(&self, alpha: &MultiIndex, z: &[f64]) -> f64 {
        assert!(alpha.order() <= self.cap, "derivative order beyond the profile's cap");
        match self.kind {
            PsiKind::Gaussian => {
                let mut v = std::f64::consts::PI.powf(-0.5 * self.dim() as f64);
                for i in 0..self.dim() {
                    let a = alpha.get(i);
                    let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
                    v *= sign * hermite(a, z[i]) * (-z[i] * z[i]).exp();
                }
                v
            }
            PsiKind::Custom => self.normalization * (self.custom.as_ref().unwrap())(alpha, z),
        }
    }

    /// `ψ_α(x, s) = (1+s)^{-(N+|α|)/θ} ((-1)^{|α|}/α!) (∂^α ψ)((1+s)^{-1/θ} x)`.
    pub fn psi_alpha(&self, alpha: &MultiIndex, s: f64, x: &[f64]) -> f64 {
        let lam = self.dilation(s);
        let dim = self.dim();
        let mut z = [0.0; 2];
        for i in 0..dim {
            z[i] = x[i] / lam;
        }
        lam.powi(-((dim as u32 + alpha.order()) as i32)) * alpha.sign_over_factorial() * self.deriv(alpha, &z[..dim])
    }

    /// `ψ_α(·, s)` sampled on the grid of `domain`.
    pub fn sample(&self, domain: crate::field::Domain, alpha: &MultiIndex, s: f64) -> Field {
        Field::from_fn(domain, |x| self.psi_alpha(alpha, s, &x[..self.dim()]))
    }

    /// `∫ x^β ψ_α(x, s) dx`: closed form for the Gaussian, quadrature otherwise.
    pub fn cross_moment(&self, beta: &MultiIndex, alpha: &MultiIndex, s: f64) -> f64 {
        match self.kind {
            PsiKind::Gaussian => self.cross_moment_gaussian(beta, alpha, s),
            PsiKind::Custom => self.cross_moment_quadrature(beta, alpha, s),
        }
    }

    /// `λ^{|β|-|α|} Π_i [β_i ≥ α_i] C(β_i, α_i) m_{β_i-α_i}` by `|α|`-fold
    /// integration by parts, with `m_n` the moments of `e^{-z²}/√π`.
    fn cross_moment_gaussian(&self, beta: &MultiIndex, alpha: &MultiIndex, s: f64) -> f64 {
        if !alpha.le(beta) {
            return 0.0;
        }
        let lam = self.dilation(s);
        let mut v = lam.powi(beta.order() as i32 - alpha.order() as i32);
        for i in 0..self.dim() {
            let (b, a) = (beta.get(i), alpha.get(i));
            v *= factorial(b) / (factorial(a) * factorial(b - a)) * gaussian_moment(b - a);
        }
        v
    }

    /// `∫ x^β ψ_α(x, s) dx` by double-exponential quadrature.
    pub fn cross_moment_quadrature(&self, beta: &MultiIndex, alpha: &MultiIndex, s: f64) -> f64 {
        let lam = self.dilation(s);
        self.whole_space_integral_scaled(lam, |x| beta.monomial(x) * self.psi_alpha(alpha, s, x))
    }

    fn whole_space_integral<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.whole_space_integral_scaled(1.0, f)
    }

    fn whole_space_integral_scaled<F: Fn(&[f64]) -> f64>(&self, scale: f64, f: F) -> f64 {
        let rule = SinhSinh::standard(scale);
        match self.dim() {
            1 => rule.integrate(|x| f(&[x])),
            _ => rule.integrate(|x| rule.integrate(|y| f(&[x, y]))),
        }
    }

    /// Gauss–Legendre nodes and weights covering the truncated support of
    /// `ψ_α(·, s)`; the same for every `α`.
    pub fn quadrature_nodes(&self, s: f64) -> Vec<([f64; 2], f64)> {
        let lam = self.dilation(s);
        let r = self.radius * lam;
        let panels = (2.0 * self.radius / MEASURE_PANEL).ceil() as usize;
        let gl = GaussLegendre::new(MEASURE_ORDER);
        let width = 2.0 * r / panels as f64;
        let axis: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let a = -r + p as f64 * width;
                gl.mapped(a, a + width).collect::<Vec<_>>()
            })
            .collect();
        match self.dim() {
            1 => axis.iter().map(|&(x, w)| ([x, 0.0], w)).collect(),
            _ => axis.iter().flat_map(|&(x, wx)| axis.iter().map(move |&(y, wy)| ([x, y], wx * wy))).collect(),
        }
    }

    /// `ψ_α(·, s)` as a Gauss–Legendre quadrature measure on its truncated support.
    pub fn measure(&self, alpha: &MultiIndex, s: f64) -> DiscreteMeasure {
        let dim = self.dim();
        let (points, weights) = self.quadrature_nodes(s).into_iter().map(|(p, w)| (p, w * self.psi_alpha(alpha, s, &p[..dim]))).unzip();
        DiscreteMeasure { dim, points, weights }
    }

    /// `Ψ_{α,θ}(·, t : s) = S_θ(t) ψ_α(·, s)` on the grid of `plan`.
    pub fn capital_psi(&self, plan: &SemigroupPlan, alpha: &MultiIndex, t: f64, s: f64) -> Result<Field> {
        let sampled = self.sample(*plan.domain(), alpha, s);
        plan.apply(&sampled, t, &MultiIndex::zero(self.dim()))
    }

    /// `Ψ_{α,θ}(x, t : s)` at arbitrary points by convolution with the kernel.
    pub fn capital_psi_exact(&self, kernel: &Kernel, alpha: &MultiIndex, t: f64, s: f64, eval_points: &[[f64; 2]]) -> Result<Vec<f64>> {
        convolve_measure(kernel, &self.measure(alpha, s), t, &MultiIndex::zero(self.dim()), eval_points)
    }
}

/// Physicists' Hermite polynomial `H_n`.
fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `∫ z^n e^{-z²} dz / √π`: zero for odd `n`, `(n-1)!!/2^{n/2}` for even `n`.
fn gaussian_moment(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    (1..n).step_by(2).map(|k| k as f64 / 2.0).product()
}

/// `α ↦ M_α(f, s)` on `M_K`, in `(|α|, lexicographic)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub s: f64,
    entries: Vec<(MultiIndex, f64)>,
}

impl CoefficientTable {
    pub fn new(s: f64, entries: Vec<(MultiIndex, f64)>) -> Self {
        Self { s, entries }
    }

    pub fn entries(&self) -> &[(MultiIndex, f64)] {
        &self.entries
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.entries.iter().find(|(a, _)| a == alpha).map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One line per `α`: components, then the value; preceded by `# s = ...`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# s = {:.17e}\n", self.s);
        for (a, v) in &self.entries {
            let comps: Vec<String> = a.components().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{} {:.17e}", comps.join(" "), v);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut s = None;
        let mut entries = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("s =") {
                    s = Some(v.trim().parse::<f64>().map_err(|e| Error::Format(e.to_string()))?);
                }
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() < 2 || parts.len() > 3 {
                return Err(Error::Format(format!("bad coefficient line: {line}")));
            }
            let comps: std::result::Result<Vec<u32>, _> = parts[..parts.len() - 1].iter().map(|p| p.parse()).collect();
            let comps = comps.map_err(|e| Error::Format(e.to_string()))?;
            let value: f64 = parts[parts.len() - 1].parse().map_err(|e: std::num::ParseFloatError| Error::Format(e.to_string()))?;
            entries.push((MultiIndex::new(&comps), value));
        }
        Ok(Self { s: s.ok_or_else(|| Error::Format("missing s header".into()))?, entries })
    }
}

/// `M_α` from precomputed moments `∫ x^α f` listed in `multi_indices_up_to(K)` order.
pub fn coefficients_from_moments(moments: &[f64], s: f64, k: f64, profile: &PsiProfile) -> CoefficientTable {
    let indices = multi_indices_up_to(k, profile.dim());
    assert_eq!(indices.len(), moments.len(), "one moment per multi-index");
    let mut entries: Vec<(MultiIndex, f64)> = Vec::with_capacity(indices.len());
    for (alpha, &m) in indices.iter().zip(moments) {
        let mut v = m;
        for (beta, mb) in &entries {
            if beta.le(alpha) && beta != alpha {
                v -= mb * profile.cross_moment(alpha, beta, s);
            }
        }
        entries.push((*alpha, v));
    }
    CoefficientTable { s, entries }
}

/// `M_α(f, s)` for `|α| ≤ K`.
pub fn compute_m(f: &Field, s: f64, k: f64, profile: &PsiProfile) -> CoefficientTable {
    let indices = multi_indices_up_to(k, profile.dim());
    coefficients_from_moments(&grid_moments(f, &indices), s, k, profile)
}

/// `M_α` of a discrete measure.
pub fn compute_m_measure(mu: &DiscreteMeasure, s: f64, k: f64, profile: &PsiProfile) -> CoefficientTable {
    let indices = multi_indices_up_to(k, profile.dim());
    let moments: Vec<f64> = indices.iter().map(|a| mu.moment(a)).collect();
    coefficients_from_moments(&moments, s, k, profile)
}

/// Outcome of [`membership_l0`].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// the multi-index with the largest normalized moment, and that value
    pub worst: Option<(MultiIndex, f64)>,
}

/// Whether `∫ x^α f = 0` for all `α ∈ M_{K-j-θ}`, judged by
/// `|∫ x^α f| ≤ tol (1 + |||f|||_{|α|})`.
pub fn membership_l0(f: &Field, k: f64, j: u32, theta: f64, tol: f64) -> Result<Membership> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let indices = multi_indices_up_to(k - j as f64 - theta, f.domain().dim());
    let moms = grid_moments(f, &indices);
    let mut worst: Option<(MultiIndex, f64)> = None;
    let mut member = true;
    for (a, m) in indices.iter().zip(moms) {
        let scale = 1.0 + weighted_l1(f, a.order() as f64)?;
        let normalized = m.abs() / scale;
        if normalized > tol {
            member = false;
        }
        if worst.is_none_or(|w| normalized > w.1) {
            worst = Some((*a, normalized));
        }
    }
    Ok(Membership { member, worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Domain;

    fn gauss(dim: usize, theta: f64) -> PsiProfile {
        PsiProfile::gaussian(KernelSpec::new(dim, theta).unwrap())
    }

    #[test]
    fn hermite_and_gaussian_moments() {
        assert_eq!(hermite(3, 2.0), 8.0 * 8.0 - 12.0 * 2.0);
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(2), 0.5);
        assert_eq!(gaussian_moment(4), 0.75);
        assert_eq!(gaussian_moment(3), 0.0);
    }

    #[test]
    fn analytic_and_quadrature_cross_moments_agree() {
        for (dim, theta) in [(1, 1.0), (1, 0.6), (2, 1.4)] {
            let p = gauss(dim, theta);
            for s in [0.0, 0.7, 3.0] {
                for beta in multi_indices_up_to(3.0, dim) {
                    for alpha in multi_indices_up_to(3.0, dim) {
                        let a = p.cross_moment_gaussian(&beta, &alpha, s);
                        let q = p.cross_moment_quadrature(&beta, &alpha, s);
                        assert!((a - q).abs() < 1e-10 * (1.0 + a.abs()), "{dim} {s} {beta} {alpha}: {a} {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn unit_diagonal() {
        let p = gauss(2, 0.8);
        for a in multi_indices_up_to(3.0, 2) {
            assert!((p.cross_moment(&a, &a, 1.3) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficient_table_text_round_trip() {
        let d = Domain::new(2, 6.0, 32).unwrap();
        let f = Field::from_fn(d, |x| (-(x[0] - 0.5).powi(2) - x[1] * x[1]).exp());
        let t = compute_m(&f, 0.5, 2.0, &gauss(2, 1.0));
        assert_eq!(t.len(), 6);
        let back = CoefficientTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
        assert!(CoefficientTable::from_text("1 2 3 4\n").is_err());
    }

    #[test]
    fn custom_profile_is_normalized() {
        let spec = KernelSpec::new(1, 1.0).unwrap();
        let p = PsiProfile::custom(spec, 0, 30.0, Arc::new(|_a: &MultiIndex, x: &[f64]| 3.0 / (1.0 + x[0] * x[0]).powi(2))).unwrap();
        let v = p.deriv(&MultiIndex::zero(1), &[0.0]);
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        let odd = PsiProfile::custom(spec, 0, 30.0, Arc::new(|_a: &MultiIndex, x: &[f64]| (-(x[0] - 1.0).powi(2)).exp()));
        assert!(odd.is_err());
    }
}
