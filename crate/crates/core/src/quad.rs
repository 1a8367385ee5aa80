//! One-dimensional quadrature rules shared by the kernel and the rate harnesses.

use std::f64::consts::{FRAC_PI_2, PI};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(mid + half * z)).sum::<f64>() * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&z, &w)| (mid + half * z, w * half))
    }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration by interval bisection.
///
/// Returns the estimate and the accumulated error estimate; the caller
/// decides whether the residual is acceptable.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> (f64, f64) {
    let mut intervals = vec![(a, b, gk15(&mut f, a, b))];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return (total, err);
        }
        let (idx, _) = intervals.iter().enumerate().max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1)).unwrap();
        let (lo, hi, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        intervals.push((lo, mid, gk15(&mut f, lo, mid)));
        intervals.push((mid, hi, gk15(&mut f, mid, hi)));
    }
    let total = intervals.iter().map(|iv| iv.2 .0).sum();
    let err = intervals.iter().map(|iv| iv.2 .1).sum();
    (total, err)
}

/// Double-exponential (sinh–sinh) rule for integrals over the whole real line.
///
/// The substitution `x = scale * sinh(pi/2 * sinh(u))` turns algebraic decay
/// into double-exponential decay in `u`; the trapezoid rule in `u` then
/// converges geometrically for integrands analytic in a strip.
#[derive(Debug, Clone)]
pub struct SinhSinh {
    pub points: Vec<(f64, f64)>,
}

impl SinhSinh {
    pub fn new(scale: f64, step: f64, u_max: f64) -> Self {
        let n = (u_max / step).ceil() as i64;
        let mut points = Vec::with_capacity(2 * n as usize + 1);
        for k in -n..=n {
            let u = k as f64 * step;
            let s = FRAC_PI_2 * u.sinh();
            let x = scale * s.sinh();
            let w = scale * step * FRAC_PI_2 * u.cosh() * s.cosh();
            if x.is_finite() && w.is_finite() {
                points.push((x, w));
            }
        }
        Self { points }
    }

    /// Default accuracy rule: step 1/32 out to |u| = 4.5 (|x| up to ~1e30 scales).
    pub fn standard(scale: f64) -> Self {
        Self::new(scale, 1.0 / 32.0, 4.5)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// Composite Gauss–Legendre over `[a, b]` split into `panels` equal pieces.
pub fn composite_gl<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels).map(|i| rule.integrate(a + i as f64 * w, a + (i + 1) as f64 * w, &mut f)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(10);
        let v = gl.integrate(0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn kronrod_handles_peaks() {
        let (v, err) = adaptive_gk(|x| 1.0 / (1e-4 + (x - 0.3).powi(2)), 0.0, 1.0, 1e-12, 0.0);
        let exact = 100.0 * ((0.7f64 / 1e-2).atan() + (0.3f64 / 1e-2).atan());
        assert!((v - exact).abs() / exact < 1e-10, "{v} {exact} {err}");
    }

    #[test]
    fn sinh_sinh_handles_algebraic_tails() {
        let rule = SinhSinh::standard(1.0);
        let v = rule.integrate(|x| 1.0 / (1.0 + x * x));
        assert!((v - PI).abs() < 1e-12);
        let v = rule.integrate(|x| (1.0 + x * x).powf(-0.75));
        // B(1/2, 1/4)
        let exact = 5.244_115_108_584_239;
        assert!((v - exact).abs() < 1e-9, "{v}");
    }
}
