use fracdiff::expansion::log_times;
use fracdiff::field::{moment, Domain, Field, MultiIndex};
use fracdiff::hotspot::*;
use fracdiff::kernel::{Kernel, KernelSpec};
use fracdiff::semigroup::{DiscreteMeasure, SemigroupPlan, SupportBox};

fn bump(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo || x >= hi {
        return 0.0;
    }
    let u = (x - lo) / (hi - lo);
    (u * (1.0 - u)).powi(2) * 30.0 / (hi - lo)
}

fn two_bump(d: Domain) -> Field {
    Field::from_fn(d, |x| 0.7 * bump(x[0], -2.0, 0.0) + 0.3 * bump(x[0], 0.0, 2.0))
}

#[test]
fn sampled_kernel_peaks_at_its_centre() {
    for theta in [0.5, 1.0, 1.7] {
        let spec = KernelSpec::new(1, theta).unwrap();
        let kernel = Kernel::shared(spec).unwrap();
        let d = Domain::new(1, 16.0, 256).unwrap();
        let a = 0.3;
        let f = Field::from_fn(d, |x| kernel.eval_kernel(&[x[0] - a], 1.0).unwrap());
        let h = locate(&f).unwrap();
        assert!((h.point[0] - a).abs() <= d.spacing().powi(2), "θ={theta}: {}", h.point[0]);
        assert!(h.unique);
    }
}

#[test]
fn symmetric_data_keeps_its_hot_spot_at_the_centre() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 256.0, 2048).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| bump(x[0], -1.0, 1.0) + 0.5 * bump(x[0], -3.0, -1.0) + 0.5 * bump(x[0], 1.0, 3.0));
    let tr = track(&kernel, &plan, &phi, &SupportBox::new(&[-3.0], &[3.0]), &log_times(0.1, 30.0, 12)).unwrap();
    let h2 = d.spacing().powi(2);
    assert!(tr.locations.iter().all(|x| x[0].abs() <= h2));
    assert!(tr.center[0].abs() < 1e-15);
}

#[test]
fn grid_aligned_translation_moves_the_track() {
    let spec = KernelSpec::new(1, 0.8).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 128.0, 1024).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let shift = 12.0 * d.spacing();
    let times = log_times(1.0, 20.0, 6);
    let base = two_bump(d);
    let moved = Field::from_fn(d, |x| 0.7 * bump(x[0] - shift, -2.0, 0.0) + 0.3 * bump(x[0] - shift, 0.0, 2.0));
    let a = track(&kernel, &plan, &base, &SupportBox::new(&[-2.0], &[2.0]), &times).unwrap();
    let b = track(&kernel, &plan, &moved, &SupportBox::new(&[-2.0 + shift], &[2.0 + shift]), &times).unwrap();
    assert!((b.center[0] - a.center[0] - shift).abs() < 1e-12);
    for (x, y) in a.locations.iter().zip(&b.locations) {
        assert!((y[0] - x[0] - shift).abs() < 1e-9, "{} {}", x[0], y[0]);
    }
}

#[test]
fn two_bump_hot_spot_converges_to_the_centre_of_mass() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 1024.0, 8192).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = two_bump(d);
    let sup = SupportBox::new(&[-2.0], &[2.0]);
    let c = moment(&phi, &MultiIndex::new(&[1])) / moment(&phi, &MultiIndex::zero(1));
    assert!((c + 0.4).abs() < 1e-12);
    let tr = track(&kernel, &plan, &phi, &sup, &log_times(1.0, 100.0, 25)).unwrap();
    assert!((tr.center[0] - c).abs() < 1e-12);
    assert!(tr.first_unique_time().is_some());
    let (e10, e100) = (tr.center_error_at(10.0).unwrap(), tr.center_error_at(100.0).unwrap());
    assert!(e100 < e10 && e100 <= 0.05, "{e10} {e100}");
    let (_, fit) = hessian_decay(&kernel, &phi, &sup, &tr, (10.0, 100.0)).unwrap();
    assert!((fit.slope + 3.0).abs() <= 0.2, "{fit:?}");
    let mu = DiscreteMeasure::from_field(&phi, &sup).unwrap();
    let last = *tr.locations.last().unwrap();
    assert!(check_concavity(&kernel, &mu, 100.0, last, 5.0).unwrap());
    // two separated maxima early on
    assert!(!check_concavity(&kernel, &mu, 0.01, [-0.4, 0.0], 0.6).unwrap());
}

#[test]
fn equal_far_bumps_are_ambiguous() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let d = Domain::new(1, 64.0, 512).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| bump(x[0], -9.0, -7.0) + bump(x[0], 7.0, 9.0));
    let u = plan.apply(&phi, 0.5, &MultiIndex::zero(1)).unwrap();
    let h = locate(&u).unwrap();
    assert!(!h.unique);
    assert!(h.point[0] < 0.0);
}

#[test]
fn planar_hot_spot_moves_towards_the_centre() {
    let spec = KernelSpec::new(2, 1.5).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(2, 32.0, 128).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| 0.6 * bump(x[0], -2.0, 0.0) * bump(x[1], -1.0, 1.0) + 0.4 * bump(x[0], 0.0, 2.0) * bump(x[1], 0.0, 2.0));
    let sup = SupportBox::new(&[-2.0, -1.0], &[2.0, 2.0]);
    let tr = track(&kernel, &plan, &phi, &sup, &[1.0, 2.0, 4.0, 8.0]).unwrap();
    let e = tr.center_errors();
    assert!(e.windows(2).all(|w| w[1] < w[0]), "{e:?}");
    let mu = DiscreteMeasure::from_field(&phi, &sup).unwrap();
    assert!(check_concavity(&kernel, &mu, 8.0, tr.locations[3], 1.0).unwrap());
    let csv = tr.to_csv();
    assert!(csv.starts_with("t,x1,x2,max_value,unique\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn negative_mass_is_rejected() {
    let spec = KernelSpec::new(1, 1.0).unwrap();
    let kernel = Kernel::shared(spec).unwrap();
    let d = Domain::new(1, 32.0, 256).unwrap();
    let plan = SemigroupPlan::new(spec, d).unwrap();
    let phi = Field::from_fn(d, |x| -bump(x[0], -1.0, 1.0));
    assert!(track(&kernel, &plan, &phi, &SupportBox::new(&[-1.0], &[1.0]), &[1.0]).is_err());
}
