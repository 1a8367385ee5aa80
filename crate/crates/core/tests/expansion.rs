use fracdiff::expansion::*;
use fracdiff::field::{moment, Domain, Exponent, Field, MultiIndex};
use fracdiff::kernel::{Kernel, KernelSpec};
use fracdiff::moments::PsiProfile;
use fracdiff::semigroup::{DiscreteMeasure, SemigroupPlan, SupportBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bump(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo || x >= hi {
        return 0.0;
    }
    let u = (x - lo) / (hi - lo);
    (u * (1.0 - u)).powi(2) * 30.0 / (hi - lo)
}

/// Asymmetric compact data of unit mass on `[-1, 2]`.
fn asymmetric(d: Domain) -> Field {
    Field::from_fn(d, |x| 0.7 * bump(x[0], -1.0, 1.0) + 0.3 * bump(x[0], 0.5, 2.0))
}

fn support() -> SupportBox {
    SupportBox::new(&[-1.0], &[2.0])
}

#[test]
fn remainder_agrees_with_spectral_subtraction() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 256.0, 4096).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = asymmetric(d);
    let zero = MultiIndex::zero(1);
    let idx: Vec<usize> = (0..d.len()).filter(|&i| d.coord(i).abs() <= 12.0).step_by(7).collect();
    let pts: Vec<[f64; 2]> = idx.iter().map(|&i| d.point(i)).collect();
    for t in [1.0, 2.0] {
        let spectral = plan.apply(&phi, t, &zero).unwrap();
        for k in [0.0, 1.0, 2.0] {
            let periodic = linear_expansion_periodic(&plan, &phi, k, t).unwrap();
            let exact = remainder_v(&kernel, &phi, &support(), k, 0, t, &pts).unwrap();
            let scale = exact.iter().fold(0.0f64, |m, v| m.max(v[0].abs()));
            let worst = idx.iter().zip(&exact).map(|(&i, v)| (spectral.values()[i] - periodic.values()[i] - v[0]).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-6 * scale, "t={t} K={k}: {worst} vs {scale}");
        }
    }
}

#[test]
fn remainder_is_expansion_subtracted_from_the_solution() {
    let spec = KernelSpec::new(1, 0.7).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 8.0, 128).unwrap();
    let phi = asymmetric(d);
    let pts: Vec<[f64; 2]> = [-4.0, -0.3, 0.9, 3.0, 11.0].iter().map(|&x| [x, 0.0]).collect();
    let t = 1.5;
    let mu = DiscreteMeasure::from_field(&phi, &support()).unwrap();
    let full = fracdiff::semigroup::convolve_measure(&kernel, &mu, t, &MultiIndex::zero(1), &pts).unwrap();
    let lin = linear_expansion(&kernel, &phi, 2.0, t, &pts).unwrap();
    let rem = remainder_v(&kernel, &phi, &support(), 2.0, 0, t, &pts).unwrap();
    for i in 0..pts.len() {
        let diff = full[i] - lin[i];
        assert!((diff - rem[i][0]).abs() <= 1e-9 * full[i].abs(), "{i}: {diff} {}", rem[i][0]);
    }
}

#[test]
fn point_mass_has_no_remainder_and_mass_one_gives_the_kernel() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let mu = DiscreteMeasure { dim: 1, points: vec![[0.0, 0.0]], weights: vec![1.0] };
    let pts = [[0.3, 0.0], [5.0, 0.0]];
    for k in [0.0, 1.0, 2.5] {
        let v = remainder_measure(&kernel, &mu, k, 1, 2.0, &pts).unwrap();
        assert!(v.iter().all(|v| v[0] == 0.0));
    }
    let lin = linear_expansion_measure(&kernel, &mu, 0.0, 2.0, &pts).unwrap();
    for (p, l) in pts.iter().zip(lin) {
        let exact = 2.0 / (std::f64::consts::PI * (4.0 + p[0] * p[0]));
        assert!((l - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn rate_study_for_mass_one_data() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 8.0, 64).unwrap();
    let phi = asymmetric(d);
    let times = log_times(10.0, 100.0, DEFAULT_SAMPLES);
    let r0 = verify_remainder_rates(&kernel, &phi, &support(), 0.0, 0, Exponent::Infinity, 0.0, &times).unwrap();
    assert!((r0.lq_fit.slope + 2.0).abs() < 0.1, "{:?}", r0.lq_fit);
    assert!(r0.bound_holds);
    assert!(r0.moment_residual < 1e-6, "{}", r0.moment_residual);
    let r1 = verify_remainder_rates(&kernel, &phi, &support(), 1.0, 0, Exponent::Infinity, 0.0, &times).unwrap();
    assert!((r1.lq_fit.slope - r0.lq_fit.slope + 1.0).abs() < 0.15, "{} {}", r0.lq_fit.slope, r1.lq_fit.slope);
    let csv = r1.to_csv();
    assert!(csv.starts_with("t,lq_value,weighted_value\n"));
    assert_eq!(csv.lines().count(), DEFAULT_SAMPLES + 3);
}

#[test]
fn data_without_low_moments_decays_fast_without_subtraction() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 8.0, 64).unwrap();
    // second difference of a bump: zero mass and zero first moment
    let phi = Field::from_fn(d, |x| bump(x[0] - 0.5, -1.0, 1.0) - 2.0 * bump(x[0], -1.0, 1.0) + bump(x[0] + 0.5, -1.0, 1.0));
    let sup = SupportBox::new(&[-1.5], &[1.5]);
    assert!(moment(&phi, &MultiIndex::zero(1)).abs() < 1e-14);
    assert!(moment(&phi, &MultiIndex::new(&[1])).abs() < 1e-14);
    let mu = DiscreteMeasure::from_field(&phi, &sup).unwrap();
    let times = log_times(10.0, 100.0, DEFAULT_SAMPLES);
    let values: Vec<f64> = times
        .iter()
        .map(|&t| {
            let pts: Vec<[f64; 2]> = (0..201).map(|i| [-10.0 * t + 0.1 * t * i as f64, 0.0]).collect();
            let v = fracdiff::semigroup::convolve_measure(&kernel, &mu, t, &MultiIndex::zero(1), &pts).unwrap();
            v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .collect();
    let fit = fit_rate(&RateSeries::new("plain", times, values).unwrap(), DEFAULT_WINDOW).unwrap();
    assert!((fit.slope + 3.0).abs() < 0.1, "{fit:?}");
}

#[test]
fn fit_tolerates_small_multiplicative_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let times = log_times(10.0, 100.0, DEFAULT_SAMPLES);
    for a in [0.5, 2.0, 3.3] {
        let values = times.iter().map(|t| 4.0 * t.powf(-a) * (1.0 + rng.gen_range(-0.01..0.01))).collect();
        let fit = fit_rate(&RateSeries::new("noisy", times.clone(), values).unwrap(), DEFAULT_WINDOW).unwrap();
        assert!((fit.slope + a).abs() < 0.02, "{a}: {}", fit.slope);
    }
}

#[test]
fn w1_of_the_profile_is_its_evolution() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let d = Domain::new(1, 64.0, 1024).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let profile = PsiProfile::gaussian(spec);
    let zero = MultiIndex::zero(1);
    let psi = profile.sample(d, &zero, 0.0);
    let w1 = build_w1(&plan, &profile, &psi, 2.0, 1.5).unwrap();
    let direct = plan.apply(&psi, 1.5, &zero).unwrap();
    assert!(w1.sub(&direct).unwrap().max_abs() < 1e-12);
    let phi = asymmetric(d);
    let w1 = build_w1(&plan, &profile, &phi, 2.0, 0.7).unwrap();
    assert!((moment(&w1, &zero) - moment(&phi, &zero)).abs() < 1e-12);
}

#[test]
fn w1_remainder_paths_agree_and_decay() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let profile = PsiProfile::gaussian(spec);
    let d = Domain::new(1, 8.0, 64).unwrap();
    let mu = DiscreteMeasure::from_field(&asymmetric(d), &support()).unwrap();
    let pts: Vec<[f64; 2]> = [-3.0, 0.2, 1.1, 7.0].iter().map(|&x| [x, 0.0]).collect();
    let a = w1_remainder(&kernel, &profile, &mu, 2.0, 0.8, &pts).unwrap();
    let b = w1_remainder_direct(&kernel, &profile, &mu, 2.0, 0.8, &pts).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10, "{x} {y}");
    }
    let rho = w1_residual_measure(&profile, &mu, 2.0);
    for n in 0..=2 {
        let m = rho.moment(&MultiIndex::new(&[n]));
        assert!(m.abs() < 1e-13, "{n}: {m}");
    }
}

#[test]
fn w2_triangularity_and_duhamel_linearity() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let d = Domain::new(1, 64.0, 512).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let profile = PsiProfile::gaussian(spec);
    let zero = MultiIndex::zero(1);
    let times: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
    let rho = |s: f64| 1.0 + s * s;
    let nodes: Vec<Field> = times.iter().map(|&s| profile.sample(d, &zero, s).scaled(rho(s))).collect();
    let h = SourceHistory::from_nodes(times.clone(), nodes).unwrap();
    let w2 = build_w2(&plan, &profile, &h, 2.0).unwrap();
    let full = duhamel(&plan, &h).unwrap();
    for (a, b) in w2.iter().zip(&full) {
        assert!(a.sub(b).unwrap().max_abs() < 1e-12);
    }
    // trapezoid mass: ∫ρ ds by the trapezoid rule
    let last = w2.last().unwrap();
    let trap: f64 = times.windows(2).map(|w| 0.5 * (w[1] - w[0]) * (rho(w[0]) + rho(w[1]))).sum();
    assert!((moment(last, &zero) - trap).abs() < 1e-10);
}

#[test]
fn remainder_rejects_data_outside_the_support() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 8.0, 64).unwrap();
    let phi = asymmetric(d);
    let narrow = SupportBox::new(&[-1.0], &[1.0]);
    assert!(remainder_v(&kernel, &phi, &narrow, 0.0, 0, 1.0, &[[0.0, 0.0]]).is_err());
}
