//! Radial profiles of the fractional heat kernel through Gaussian subordination.
//!
//! With `β = θ/2`, `e^{-|ξ|^θ} = E[e^{-τ|ξ|²}]` where `τ` follows the one-sided
//! stable law with Laplace transform `e^{-λ^β}`. Hence
//!
//! ```text
//! G_θ(x, 1) = ∫_0^∞ (4πτ)^{-N/2} e^{-|x|²/(4τ)} η_β(τ) dτ
//! ```
//!
//! and every Cartesian derivative is a polynomial combination of the radial
//! family `h_k(r) = (d/ds)^k G` with `s = r²/2`, i.e.
//!
//! ```text
//! h_k(r) = (4π)^{-N/2} (-1/2)^k ∫_0^∞ τ^{-N/2-k} e^{-r²/(4τ)} η_β(τ) dτ.
//! ```
//!
//! The integrands are sign-definite, so each `h_k` is computed without
//! cancellation, including in the algebraic tail.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::{adaptive_gk, GaussLegendre};

const PANEL_WIDTH: f64 = 0.25;
const PANEL_ORDER: usize = 16;
/// Below this τ the density is evaluated by the Zolotarev integral, above it by its series.
const SERIES_FROM: f64 = 16.0;
/// Largest `r` supported by the precomputed nodes (`r² ≤ e^{U_TOP}`).
const U_TOP: f64 = 34.0;
/// Radius from which the far-field series is tried first.
const ASYMPTOTIC_FROM: f64 = 1e3;
const SERIES_TERMS: usize = 80;

/// Density of the one-sided stable law with Laplace transform `exp(-λ^β)`.
#[derive(Debug, Clone)]
pub struct StableSubordinator {
    beta: f64,
    /// coefficients `a_n` of `η(τ) = Σ_n a_n τ^{-nβ-1}`
    series: Vec<f64>,
    /// `|a_n|` without the factor `sin(nπβ)`, which may vanish for isolated `n`
    envelope: Vec<f64>,
}

impl StableSubordinator {
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0 && beta < 1.0, "stable index must be in (0,1)");
        let (series, envelope) = (1..=SERIES_TERMS)
            .map(|n| {
                let nf = n as f64;
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                // Γ(nβ+1)/n! via log-gamma to stay finite for large n
                let lg = statrs::function::gamma::ln_gamma(nf * beta + 1.0) - statrs::function::gamma::ln_gamma(nf + 1.0);
                let env = lg.exp() / PI;
                (sign * env * (nf * PI * beta).sin(), env)
            })
            .unzip();
        Self { beta, series, envelope }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `η_β(τ)`.
    pub fn density(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if tau >= SERIES_FROM {
            self.density_series(tau)
        } else {
            self.density_zolotarev(tau)
        }
    }

    fn density_series(&self, tau: f64) -> f64 {
        let q = tau.powf(-self.beta);
        let mut pow = q;
        let mut sum = 0.0;
        // sin(nπβ) vanishes for isolated n, so stop only after two small terms in a row
        let mut small = 0;
        for a in &self.series {
            let term = a * pow;
            sum += term;
            small = if term.abs() < 1e-18 * sum.abs() { small + 1 } else { 0 };
            if small == 2 {
                break;
            }
            pow *= q;
        }
        sum / tau
    }

    fn density_zolotarev(&self, tau: f64) -> f64 {
        let b = self.beta;
        let e = 1.0 / (1.0 - b);
        let big_x = tau.powf(-b * e);
        let a = |phi: f64| -> f64 {
            if phi < 1e-8 {
                return b.powf(e) * (1.0 - b) / b;
            }
            ((b * phi).sin() / phi.sin()).powf(e) * ((1.0 - b) * phi).sin() / (b * phi).sin()
        };
        let (val, _) = adaptive_gk(
            |phi| {
                let ap = a(phi);
                if !ap.is_finite() {
                    return 0.0;
                }
                ap * (-ap * big_x).exp()
            },
            0.0,
            PI,
            1e-14,
            1e-300,
        );
        b * e * tau.powf(-e) * val / PI
    }

    /// `∫_T^∞ τ^{-a} e^{-c/τ} η(τ) dτ` for `T ≥ 16` and `c/T ≤ 1/4`, termwise in the series.
    fn tail_moment(&self, a: f64, c: f64, big_t: f64) -> f64 {
        let z = c / big_t;
        let mut total = 0.0;
        let mut small = 0;
        for (n, coef) in self.series.iter().enumerate() {
            let s = a + (n as f64 + 1.0) * self.beta;
            // ∫_T^∞ τ^{-s-1} e^{-c/τ} dτ = T^{-s} Σ_m (-z)^m / (m! (s+m))
            let mut term = 1.0;
            let mut inner = 0.0;
            for m in 0..60 {
                let mf = m as f64;
                if m > 0 {
                    term *= -z / mf;
                }
                let add = term / (s + mf);
                inner += add;
                if add.abs() < 1e-18 * inner.abs() {
                    break;
                }
            }
            let contrib = coef * big_t.powf(-s) * inner;
            total += contrib;
            small = if contrib.abs() < 1e-18 * total.abs() { small + 1 } else { 0 };
            if small == 2 {
                break;
            }
        }
        total
    }
}

/// Precomputed subordination nodes for one `(N, θ)`.
#[derive(Debug, Clone)]
pub struct RadialProfiles {
    dim: usize,
    theta: f64,
    sub: StableSubordinator,
    /// (τ, w·τ·η(τ)) on Gauss–Legendre panels in `u = ln τ`
    nodes: Vec<(f64, f64)>,
    /// first node index of each panel, plus the end
    panel_start: Vec<usize>,
    /// `u` coordinate of the left edge of panel 0
    u_first: f64,
}

impl RadialProfiles {
    pub fn new(dim: usize, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 2.0) {
            return Err(Error::InvalidArgument(format!("theta must be in (0,2), got {theta}")));
        }
        let sub = StableSubordinator::new(theta / 2.0);
        let gl = GaussLegendre::new(PANEL_ORDER);
        let u_series = SERIES_FROM.ln();
        // walk left from ln 16 until the density underflows completely
        let mut lower_panels = Vec::new();
        let mut right = u_series;
        loop {
            let left = right - PANEL_WIDTH;
            let pts: Vec<(f64, f64)> = gl
                .mapped(left, right)
                .map(|(u, w)| {
                    let tau = u.exp();
                    (tau, w * tau * sub.density(tau))
                })
                .collect();
            let negligible = pts.iter().all(|p| p.1 < 1e-300);
            lower_panels.push(pts);
            right = left;
            if negligible || right < -80.0 {
                break;
            }
        }
        lower_panels.reverse();
        let u_first = right;
        let mut nodes = Vec::new();
        let mut panel_start = Vec::new();
        for p in lower_panels {
            panel_start.push(nodes.len());
            nodes.extend(p);
        }
        let mut left = u_series;
        while left < U_TOP {
            panel_start.push(nodes.len());
            nodes.extend(gl.mapped(left, left + PANEL_WIDTH).map(|(u, w)| {
                let tau = u.exp();
                (tau, w * tau * sub.density(tau))
            }));
            left += PANEL_WIDTH;
        }
        panel_start.push(nodes.len());
        Ok(Self { dim, theta, sub, nodes, panel_start, u_first })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Largest radius the node set covers.
    pub fn max_radius(&self) -> f64 {
        (0.5 * U_TOP).exp()
    }

    /// Writes `h_0(r), ..., h_{kmax}(r)` into `out`.
    pub fn eval_into(&self, r: f64, out: &mut [f64]) {
        let r = r.abs();
        if r > self.max_radius() {
            self.asymptotic_into(r, out);
            return;
        }
        if r > ASYMPTOTIC_FROM && self.asymptotic_into(r, out) {
            return;
        }
        self.quadrature_into(r, out);
    }

    fn quadrature_into(&self, r: f64, out: &mut [f64]) {
        let c = 0.25 * r * r;
        let big_t_target = SERIES_FROM.max(4.0 * c);
        // panel edge at or above ln T
        let u_t = big_t_target.ln();
        let panels_below = ((u_t - self.u_first) / PANEL_WIDTH).ceil() as usize;
        let panel_count = self.panel_start.len() - 1;
        let panels_below = panels_below.min(panel_count);
        let u_edge = self.u_first + panels_below as f64 * PANEL_WIDTH;
        let big_t = u_edge.exp();
        let end = self.panel_start[panels_below];
        let half_n = 0.5 * self.dim as f64;
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(tau, w) in &self.nodes[..end] {
            if w == 0.0 {
                continue;
            }
            let inv = 1.0 / tau;
            let mut v = w * (-c * inv).exp() * inv.powf(half_n);
            if v == 0.0 {
                continue;
            }
            for o in out.iter_mut() {
                *o += v;
                v *= inv;
            }
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o += self.sub.tail_moment(half_n + k as f64, c, big_t);
        }
        let mut pref = (4.0 * PI).powf(-half_n);
        for o in out.iter_mut() {
            *o *= pref;
            pref *= -0.5;
        }
    }

    /// Far field: integrating the density series termwise over all of `(0, ∞)`
    /// gives `Σ_n a_n Γ(s_n) c^{-s_n}`, `s_n = N/2 + k + nβ`, `c = r²/4`.
    /// Truncated at the smallest term; returns whether that term fell below
    /// round-off for every profile.
    fn asymptotic_into(&self, r: f64, out: &mut [f64]) -> bool {
        let c = 0.25 * r * r;
        let lc = c.ln();
        let half_n = 0.5 * self.dim as f64;
        let b = self.sub.beta();
        let mut pref = (4.0 * PI).powf(-half_n);
        let mut converged = true;
        for (k, o) in out.iter_mut().enumerate() {
            let mut sum = 0.0f64;
            let mut last = f64::INFINITY;
            let mut done = false;
            for (n, (a, env)) in self.sub.series.iter().zip(&self.sub.envelope).enumerate() {
                let s = half_n + k as f64 + (n as f64 + 1.0) * b;
                let size = env * (statrs::function::gamma::ln_gamma(s) - s * lc).exp();
                if size > last {
                    done = last < 1e-16 * sum.abs();
                    break;
                }
                last = size;
                sum += a / env * size;
                if size < 1e-17 * sum.abs() {
                    done = true;
                    break;
                }
            }
            converged &= done;
            *o = pref * sum;
            pref *= -0.5;
        }
        converged
    }

    pub fn eval(&self, r: f64, kmax: usize) -> Vec<f64> {
        let mut out = vec![0.0; kmax + 1];
        self.eval_into(r, &mut out);
        out
    }

    /// Closed form of `h_k(0)`: `(4π)^{-N/2} (-1/2)^k Γ(1+s/β)/Γ(1+s)` with `s = N/2 + k`.
    pub fn value_at_origin(&self, k: usize) -> f64 {
        let s = 0.5 * self.dim as f64 + k as f64;
        let b = self.sub.beta();
        (4.0 * PI).powf(-0.5 * self.dim as f64) * (-0.5f64).powi(k as i32) * gamma(1.0 + s / b) / gamma(1.0 + s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levy_density_matches_closed_form() {
        let sub = StableSubordinator::new(0.5);
        for tau in [0.01f64, 0.1, 1.0, 7.0, 16.0, 40.0, 1e3] {
            let exact = (-0.25 / tau).exp() / (2.0 * PI.sqrt()) * tau.powf(-1.5);
            let v = sub.density(tau);
            assert!((v - exact).abs() <= 1e-12 * exact, "{tau}: {v} vs {exact}");
        }
    }

    #[test]
    fn series_and_integral_agree_at_the_switch() {
        for beta in [0.25, 0.5, 0.75] {
            let sub = StableSubordinator::new(beta);
            for tau in [16.0, 20.0] {
                let a = sub.density_series(tau);
                let b = sub.density_zolotarev(tau);
                assert!((a - b).abs() < 1e-12 * a.abs(), "{beta} {tau}: {a} {b}");
            }
        }
    }

    #[test]
    fn origin_values_match_gamma_moments() {
        for theta in [0.5, 1.0, 1.5] {
            for dim in [1, 2] {
                let p = RadialProfiles::new(dim, theta).unwrap();
                let h = p.eval(0.0, 4);
                for (k, v) in h.iter().enumerate() {
                    let exact = p.value_at_origin(k);
                    assert!((v - exact).abs() < 1e-12 * exact.abs(), "{theta} {dim} {k}: {v} {exact}");
                }
            }
        }
    }

    #[test]
    fn cauchy_profile() {
        let p = RadialProfiles::new(1, 1.0).unwrap();
        for r in [0.0, 0.3, 1.0, 2.0, 7.5, 50.0, 400.0, 1e4] {
            let h = p.eval(r, 1);
            let g = 1.0 / (PI * (1.0 + r * r));
            assert!((h[0] - g).abs() < 1e-12 * g, "{r}: {} {g}", h[0]);
            // h_1 = (1/r) dG/dr = -2 / (π (1+r²)²)
            let d = -2.0 / (PI * (1.0 + r * r).powi(2));
            assert!((h[1] - d).abs() < 1e-11 * d.abs(), "{r}: {} {d}", h[1]);
        }
    }

    #[test]
    fn far_field_series_continues_the_quadrature() {
        let p = RadialProfiles::new(1, 1.0).unwrap();
        for r in [3e7, 1e9] {
            let h = p.eval(r, 2);
            let q = 1.0 + r * r;
            let g = 1.0 / (PI * q);
            assert!((h[0] - g).abs() < 1e-12 * g, "{r}: {} {g}", h[0]);
            let d2 = 8.0 / (PI * q.powi(3));
            assert!((h[2] - d2).abs() < 1e-11 * d2, "{r}");
        }
        for (dim, theta) in [(2, 0.6), (1, 0.3), (1, 1.0), (2, 1.5), (1, 1.9)] {
            let p = RadialProfiles::new(dim, theta).unwrap();
            for r in [1.5e3, 2e4, 1e6] {
                let mut quad = [0.0; 4];
                p.quadrature_into(r, &mut quad);
                let mut far = [0.0; 4];
                let converged = p.asymptotic_into(r, &mut far);
                if converged || r > 1e4 {
                    for k in 0..4 {
                        assert!((far[k] - quad[k]).abs() < 1e-10 * quad[k].abs(), "{theta} {r} {k}: {} {}", far[k], quad[k]);
                    }
                }
                assert!(converged || theta < 0.5, "{theta} {r}");
            }
        }
    }
}
