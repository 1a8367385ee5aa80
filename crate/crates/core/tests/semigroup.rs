use fracdiff::field::{Domain, Field, MultiIndex};
use fracdiff::kernel::{Kernel, KernelSpec};
use fracdiff::semigroup::{convolve_exact, SemigroupPlan, SupportBox};

fn bump(x: f64, c: f64, w: f64) -> f64 {
    let u = (x - c) / w;
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - u * u).powi(2)
    }
}

#[test]
fn spectral_path_is_the_periodized_exact_convolution() {
    let spec = KernelSpec::new(1, 1.5).unwrap();
    let d = Domain::new(1, 64.0, 2048).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let phi = Field::from_fn(d, |x| bump(x[0], 0.3, 1.0) + 0.5 * bump(x[0], -1.0, 0.5));
    let support = SupportBox::new(&[-1.5], &[1.3]);
    let zero = MultiIndex::zero(1);
    let period = 2.0 * d.halfwidth();
    let idx: Vec<usize> = (0..d.len()).filter(|&i| d.coord(i).abs() <= 8.0).step_by(16).collect();
    for t in [0.5, 2.0, 8.0] {
        let u = plan.apply(&phi, t, &zero).unwrap();
        let mut periodic = vec![0.0; idx.len()];
        // images decay like |k|^{-N-θ}; 200 on each side leave ~1e-9 of the peak
        for image in -200..=200 {
            let pts: Vec<[f64; 2]> = idx.iter().map(|&i| [d.coord(i) + image as f64 * period, 0.0]).collect();
            for (acc, v) in periodic.iter_mut().zip(convolve_exact(&kernel, &phi, &support, t, &zero, &pts).unwrap()) {
                *acc += v;
            }
        }
        let scale = u.max_abs();
        for (k, &i) in idx.iter().enumerate() {
            assert!((u.values()[i] - periodic[k]).abs() <= 1e-7 * scale, "t={t} x={}: {} vs {}", d.coord(i), u.values()[i], periodic[k]);
        }
    }
}

#[test]
fn composition_on_the_grid() {
    for (dim, m) in [(1, 512), (2, 64)] {
        let spec = KernelSpec::new(dim, 0.8).unwrap();
        let d = Domain::new(dim, 32.0, m).unwrap();
        let plan = SemigroupPlan::new(spec, d).unwrap();
        let phi = Field::from_fn(d, |x| bump(x[0], 0.0, 2.0) * if dim == 2 { bump(x[1], 1.0, 3.0) } else { 1.0 });
        let zero = MultiIndex::zero(dim);
        let two_steps = plan.apply(&plan.apply(&phi, 0.4, &zero).unwrap(), 1.1, &zero).unwrap();
        let one_step = plan.apply(&phi, 1.5, &zero).unwrap();
        assert!(two_steps.sub(&one_step).unwrap().max_abs() <= 1e-12 * one_step.max_abs());
    }
}

#[test]
fn derivative_commutes_with_the_flow() {
    let spec = KernelSpec::new(1, 1.2).unwrap();
    let d = Domain::new(1, 32.0, 1024).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| (-x[0] * x[0]).exp());
    let dphi = Field::from_fn(d, |x| -2.0 * x[0] * (-x[0] * x[0]).exp());
    let a = plan.apply(&phi, 0.9, &MultiIndex::new(&[1])).unwrap();
    let b = plan.apply(&dphi, 0.9, &MultiIndex::zero(1)).unwrap();
    assert!(a.sub(&b).unwrap().max_abs() <= 1e-10 * a.max_abs());
}

#[test]
fn flow_is_positive_and_contracts_the_sup_norm() {
    let spec = KernelSpec::new(1, 0.6).unwrap();
    let d = Domain::new(1, 128.0, 2048).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| bump(x[0], 0.0, 1.0));
    let zero = MultiIndex::zero(1);
    let mut last = phi.max_abs();
    for t in [0.1, 1.0, 5.0, 20.0] {
        let u = plan.apply(&phi, t, &zero).unwrap();
        assert!(u.max_abs() < last);
        assert!(u.values().iter().all(|&v| v > -1e-12 * u.max_abs()));
        last = u.max_abs();
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let plan = SemigroupPlan::new(spec, Domain::new(1, 16.0, 128).unwrap()).unwrap();
    let other = Field::zeros(Domain::new(1, 16.0, 256).unwrap());
    assert!(plan.apply(&other, 1.0, &MultiIndex::zero(1)).is_err());
    let own = Field::zeros(*plan.domain());
    assert!(plan.apply(&own, -1.0, &MultiIndex::zero(1)).is_err());
    assert!(plan.apply(&own, 1.0, &MultiIndex::zero(2)).is_err());
}
