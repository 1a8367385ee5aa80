use fracdiff::field::{moment, multi_indices_up_to, Domain, Field};
use fracdiff::kernel::KernelSpec;
use fracdiff::moments::{compute_m, PsiProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn coefficients_of_a_combination_of_atoms_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in [1, 2] {
        let spec = KernelSpec::new(dim, 1.0).unwrap();
        let profile = PsiProfile::gaussian(spec);
        let d = Domain::new(dim, 16.0, if dim == 1 { 2048 } else { 256 }).unwrap();
        let idx = multi_indices_up_to(2.0, dim);
        for _ in 0..5 {
            let s: f64 = rng.gen_range(0.0..2.0);
            let coeffs: Vec<f64> = idx.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut f = Field::zeros(d);
            for (a, &c) in idx.iter().zip(&coeffs) {
                f = f.axpy(c, &profile.sample(d, a, s)).unwrap();
            }
            let table = compute_m(&f, s, 2.0, &profile);
            for (a, &c) in idx.iter().zip(&coeffs) {
                let got = table.get(a).unwrap();
                assert!((got - c).abs() <= 1e-9, "N={dim} {a:?}: {got} vs {c}");
            }
        }
    }
}

#[test]
fn profile_moments_match_sampled_moments() {
    let spec = KernelSpec::new(1, 1.3).unwrap();
    let profile = PsiProfile::gaussian(spec);
    let d = Domain::new(1, 24.0, 4096).unwrap();
    let idx = multi_indices_up_to(3.0, 1);
    for s in [0.0, 0.7] {
        for a in &idx {
            let f = profile.sample(d, a, s);
            for b in &idx {
                let sampled = moment(&f, b);
                let analytic = profile.cross_moment(b, a, s);
                assert!((sampled - analytic).abs() <= 1e-9 * (1.0 + analytic.abs()), "s={s} {a:?} {b:?}");
            }
        }
    }
}
