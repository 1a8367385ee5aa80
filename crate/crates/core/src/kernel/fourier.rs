//! One-dimensional Fourier inversion of the kernel multipliers.
//!
//! `(∂_t^m ∂_x^a G_θ)(x, 1) = (1/π) Re ∫_0^∞ (iρ)^a (-ρ^θ)^m e^{iρx} e^{-ρ^θ} dρ`
//! for `x ≥ 0`. The integrand is entire away from the origin and decays in the
//! upper half plane, so the path is rotated onto the ray `ρ = u e^{iφ}` with
//! `θφ < π/2`; the rotated integrand decays like `e^{-u x sin φ}` and stops
//! oscillating, which removes the cancellation of the real-axis integral at
//! large `|x|`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::quad::GaussLegendre;

/// `(∂_t^m ∂_x^a G_θ)(x, t)` in one dimension.
pub fn derivative_1d(theta: f64, a: u32, m: u32, x: f64, t: f64) -> f64 {
    let scale = t.powf(-1.0 / theta);
    let pref = t.powf(-(1.0 + a as f64) / theta - m as f64);
    pref * profile_1d(theta, a, m, x * scale)
}

/// The `t = 1` profile.
pub fn profile_1d(theta: f64, a: u32, m: u32, x: f64) -> f64 {
    let parity = if x < 0.0 && a % 2 == 1 { -1.0 } else { 1.0 };
    parity * profile_nonneg(theta, a, m, x.abs())
}

fn profile_nonneg(theta: f64, a: u32, m: u32, x: f64) -> f64 {
    let phi = FRAC_PI_2.min(PI / (3.0 * theta));
    let dir = Complex64::from_polar(1.0, phi);
    let dir_theta = Complex64::from_polar(1.0, theta * phi);
    let i = Complex64::i();
    let i_pow_a = i.powu(a);
    let sign_m = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let power = a as f64 + theta * m as f64;
    let integrand = |u: f64| -> Complex64 {
        let ut = u.powf(theta);
        let poly = i_pow_a * dir.powu(a) * u.powi(a as i32) * sign_m * (dir_theta * ut).powu(m);
        let expo = i * dir * (u * x) - dir_theta * ut;
        dir * poly * expo.exp()
    };
    let decay_rate = x * phi.sin();
    let damping = dir_theta.re;
    // stop once the integrand is far below the expected size of the result
    let target = 60.0 + (1.0 + theta + a as f64) * x.max(1.0).ln();
    let exponent = |u: f64| decay_rate * u + damping * u.powf(theta) - power * u.max(1.0).ln();
    let mut u_end = 1.0;
    while exponent(u_end) < target {
        u_end *= 1.25;
    }
    let gl = GaussLegendre::new(20);
    let mut total = Complex64::new(0.0, 0.0);
    // geometric grading towards the branch point at the origin
    let first = (u_end * 1e-14).min(1e-14);
    total += integrate_c(&gl, 0.0, first, &integrand);
    let mut left = first;
    while left < u_end {
        let freq = x * phi.cos() + theta * left.powf(theta - 1.0).min(1e6) + decay_rate + 1.0;
        let width = left.min(0.5 / freq).max(1e-300);
        let right = (left + width).min(u_end);
        total += integrate_c(&gl, left, right, &integrand);
        left = right;
    }
    total.re / PI
}

fn integrate_c<F: Fn(f64) -> Complex64>(gl: &GaussLegendre, a: f64, b: f64, f: &F) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = Complex64::new(0.0, 0.0);
    for (z, w) in gl.nodes.iter().zip(&gl.weights) {
        s += f(mid + half * z) * *w;
    }
    s * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_kernel_and_its_derivatives() {
        for x in [0.0, 0.2, 1.0, 4.0, 60.0, -3.0] {
            let q = 1.0 + x * x;
            let g = profile_1d(1.0, 0, 0, x);
            assert!((g - 1.0 / (PI * q)).abs() < 1e-13 * (1.0 / q), "{x}");
            let d = profile_1d(1.0, 1, 0, x);
            let exact = -2.0 * x / (PI * q * q);
            assert!((d - exact).abs() < 1e-12 / (q * q), "{x}: {d} {exact}");
            let dt = profile_1d(1.0, 0, 1, x);
            let exact = (x * x - 1.0) / (PI * q * q);
            assert!((dt - exact).abs() < 1e-12 / q, "{x}: {dt} {exact}");
        }
    }

    #[test]
    fn gaussian_limit_shape_at_origin() {
        // G_θ(0,1) = Γ(1+1/θ)/π
        for theta in [0.5, 1.5] {
            let v = profile_1d(theta, 0, 0, 0.0);
            let exact = statrs::function::gamma::gamma(1.0 + 1.0 / theta) / PI;
            assert!((v - exact).abs() < 1e-12 * exact, "{theta}: {v} {exact}");
        }
    }
}
