use std::f64::consts::PI;

use fracdiff::field::MultiIndex;
use fracdiff::kernel::{DerivOrder, Kernel, KernelSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

#[test]
fn planar_cauchy_kernel() {
    let k = Kernel::new(KernelSpec::new(2, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let x = [rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)];
        let t = 10f64.powf(rng.gen_range(-1.0..1.0));
        let exact = t / (2.0 * PI * (t * t + x[0] * x[0] + x[1] * x[1]).powf(1.5));
        let v = k.eval_kernel(&x, t).unwrap();
        assert!((v - exact).abs() <= 1e-8 * exact, "{x:?} {t}: {v} vs {exact}");
    }
}

#[test]
fn time_derivative_of_the_line_kernel() {
    let k = Kernel::new(KernelSpec::new(1, 1.0).unwrap()).unwrap();
    let d = k.derivative(DerivOrder::new(MultiIndex::zero(1), 1)).unwrap();
    for x in [0.0f64, 0.3, 1.0, 4.0, 25.0] {
        let t = 0.8f64;
        let exact = (x * x - t * t) / (PI * (t * t + x * x).powi(2));
        let v = d.eval(&[x], t).unwrap();
        assert!((v - exact).abs() <= 1e-6 * exact.abs().max(1e-3), "{x}: {v} vs {exact}");
    }
}

#[test]
fn value_at_the_origin() {
    for dim in [1, 2] {
        for theta in [0.5, 0.9, 1.3, 1.8] {
            let k = Kernel::new(KernelSpec::new(dim, theta).unwrap()).unwrap();
            let n = dim as f64;
            let sphere = 2.0 * PI.powf(n / 2.0) / gamma(n / 2.0);
            let exact = sphere * gamma(n / theta) / (theta * (2.0 * PI).powf(n));
            let v = k.eval_kernel(&vec![0.0; dim], 1.0).unwrap();
            assert!((v - exact).abs() <= 1e-9 * exact, "N={dim} θ={theta}: {v} vs {exact}");
        }
    }
}

#[test]
fn algebraic_tail_constant() {
    for dim in [1, 2] {
        for theta in [0.5, 1.0, 1.5] {
            let k = Kernel::new(KernelSpec::new(dim, theta).unwrap()).unwrap();
            let n = dim as f64;
            let c = theta * 2f64.powf(theta - 1.0) * gamma((n + theta) / 2.0) / (PI.powf(n / 2.0) * gamma(1.0 - theta / 2.0));
            // the first correction is relative O(r^{-θ})
            let r = 1e12;
            let mut x = vec![0.0; dim];
            x[0] = r;
            let scaled = k.eval_kernel(&x, 1.0).unwrap() * r.powf(n + theta);
            assert!((scaled - c).abs() <= 1e-4 * c, "N={dim} θ={theta}: {scaled} vs {c}");
        }
    }
}

#[test]
fn self_similarity_and_isotropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for theta in [0.4, 1.1, 1.9] {
        let k = Kernel::new(KernelSpec::new(2, theta).unwrap()).unwrap();
        for _ in 0..50 {
            let r: f64 = rng.gen_range(0.0..40.0);
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            let t = 10f64.powf(rng.gen_range(-2.0..2.0));
            let v = k.eval_kernel(&[r * a.cos(), r * a.sin()], t).unwrap();
            let axis = k.eval_kernel(&[r, 0.0], t).unwrap();
            let s = t.powf(-1.0 / theta);
            let unit = t.powf(-2.0 / theta) * k.eval_kernel(&[r * s, 0.0], 1.0).unwrap();
            assert!((v - axis).abs() <= 1e-12 * axis, "θ={theta}");
            assert!((v - unit).abs() <= 1e-10 * v, "θ={theta} r={r} t={t}");
        }
    }
}

#[test]
fn spatial_derivatives_match_differences() {
    let k = Kernel::new(KernelSpec::new(2, 0.7).unwrap()).unwrap();
    let dx = k.derivative(DerivOrder::spatial(MultiIndex::new(&[1, 0]))).unwrap();
    let dxy = k.derivative(DerivOrder::spatial(MultiIndex::new(&[1, 1]))).unwrap();
    let h = 1e-4;
    for p in [[0.4, -0.2], [1.5, 2.0], [-3.0, 0.7]] {
        let fd = (k.eval_kernel(&[p[0] + h, p[1]], 1.0).unwrap() - k.eval_kernel(&[p[0] - h, p[1]], 1.0).unwrap()) / (2.0 * h);
        let v = dx.eval(&p, 1.0).unwrap();
        assert!((v - fd).abs() <= 1e-6 * v.abs().max(1e-4), "{p:?}: {v} vs {fd}");
        let fdy = (dx.eval(&[p[0], p[1] + h], 1.0).unwrap() - dx.eval(&[p[0], p[1] - h], 1.0).unwrap()) / (2.0 * h);
        let w = dxy.eval(&p, 1.0).unwrap();
        assert!((w - fdy).abs() <= 1e-6 * w.abs().max(1e-4), "{p:?}: {w} vs {fdy}");
    }
}

#[test]
fn invalid_arguments_are_rejected() {
    assert!(KernelSpec::new(1, 0.0).is_err());
    assert!(KernelSpec::new(1, 2.0).is_err());
    assert!(KernelSpec::new(3, 1.0).is_err());
    let k = Kernel::new(KernelSpec::new(1, 1.0).unwrap()).unwrap();
    assert!(k.eval_kernel(&[0.0], 0.0).is_err());
    assert!(k.eval_kernel(&[0.0, 1.0], 1.0).is_err());
}
