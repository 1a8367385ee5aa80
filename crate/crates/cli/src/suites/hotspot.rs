use fracdiff::expansion::log_times;
use fracdiff::field::Domain;
use fracdiff::hotspot::{check_concavity, hessian_decay, track};
use fracdiff::kernel::{Kernel, KernelSpec};
use fracdiff::semigroup::{DiscreteMeasure, SemigroupPlan, SupportBox};
use fracdiff::{Error, Result};

use crate::config::{Config, Suite};
use crate::data;
use crate::report::{csv, Check, Report};

pub fn run(cfg: &Config) -> Result<Report> {
    let mut report = Report::new(Suite::Hotspot);
    let spec = KernelSpec::new(cfg.spec.dim, cfg.spec.theta)?;
    let kernel = Kernel::shared(spec)?;
    let domain = Domain::new(cfg.spec.dim, cfg.grid.halfwidth, cfg.grid.points)?;
    let plan = SemigroupPlan::new(spec, domain)?;
    let times = log_times(cfg.hotspot.first_time, cfg.time.window[1], cfg.time.samples);
    let tol = &cfg.tolerances;
    let h2 = domain.spacing().powi(2);

    // symmetric data: the maximum never leaves the centre
    let sym = data::symmetric(domain);
    let support = SupportBox::of(&sym).ok_or_else(|| Error::InvalidArgument("symmetric data vanishes".into()))?;
    let pinned = track(&kernel, &plan, &sym, &support, &times)?;
    let drift = pinned.center_errors().into_iter().fold(0.0f64, f64::max);
    report.push(Check::at_most("hotspot.symmetric_drift", 10, drift, h2));

    let phi = data::build(&cfg.data, domain);
    let support = SupportBox::of(&phi).ok_or_else(|| Error::InvalidArgument("initial data vanishes".into()))?;
    let tr = track(&kernel, &plan, &phi, &support, &times)?;
    let first = tr.first_unique_time();
    report.push(Check::holds("hotspot.unique_eventually", 10, first.is_some()));
    let [t0, t1] = cfg.time.window;
    let e0 = tr.center_error_at(t0).unwrap_or(f64::NAN);
    let e1 = tr.center_error_at(t1).unwrap_or(f64::NAN);
    report.push(Check::holds("hotspot.distance_decreases", 10, e1 < e0));
    report.push(Check::at_most("hotspot.distance_at_end", 10, e1, tol.hotspot_distance));

    let (series, fit) = hessian_decay(&kernel, &phi, &support, &tr, (t0, t1))?;
    let predicted = -(cfg.spec.dim as f64 + 2.0) / cfg.spec.theta;
    report.push(Check::near("hotspot.hessian_slope", 10, fit.slope, predicted, tol.hessian_slope));

    let mu = DiscreteMeasure::from_field(&phi, &support)?;
    let last = tr.times.len() - 1;
    let concave = check_concavity(&kernel, &mu, tr.times[last], tr.locations[last], cfg.hotspot.concavity_radius)?;
    report.push(Check::holds("hotspot.concave_at_end", 10, concave));

    report.table("track.csv", tr.to_csv());
    report.table("symmetric_track.csv", pinned.to_csv());
    let errors = tr.center_errors();
    let rows: Vec<Vec<f64>> = (0..tr.times.len()).map(|i| vec![tr.times[i], errors[i], series.values[i]]).collect();
    report.table("hessian.csv", csv(&["t", "center_distance", "hessian_max_abs_eigenvalue"], &rows));
    let summary = vec![vec![first.unwrap_or(f64::NAN), tr.mass, tr.center[0], e0, e1, fit.slope, predicted]];
    report.table(
        "hotspot_summary.csv",
        csv(&["first_unique_time", "mass", "center_x1", "distance_start", "distance_end", "hessian_slope", "predicted_slope"], &summary),
    );
    Ok(report)
}
