//! Built-in initial data.

use fracdiff::field::{Domain, Field};

use crate::config::{DataKind, DataSection};

/// Unit-mass smooth bump `(15/16w)(1 - ((x-c)/w)²)²` on `|x - c| < w`.
pub fn bump(x: f64, c: f64, w: f64) -> f64 {
    let u = (x - c) / w;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    let v = 1.0 - u * u;
    15.0 / (16.0 * w) * v * v
}

fn bump_slope(x: f64, c: f64, w: f64) -> f64 {
    let u = (x - c) / w;
    if u.abs() >= 1.0 {
        return 0.0;
    }
    -15.0 / (4.0 * w * w) * u * (1.0 - u * u)
}

/// Samples the configured data on `domain`.
///
/// * `gaussian-bump`: `π^{-N/2} e^{-|x|²}`
/// * `asymmetric-bump`: `0.7 b(x; 0, 1) + 0.3 b(x; 1.25, 0.75)`
/// * `two-bump`: `w₁ b(x; -a, a) + w₂ b(x; a, a)`
/// * `zero-mass-dipole`: `-b'(x; 0, 1)`, zero mass and unit first moment
///
/// In 2D each profile is multiplied by a unit bump in the second coordinate,
/// and everything is scaled by the amplitude.
pub fn build(data: &DataSection, domain: Domain) -> Field {
    let dim = domain.dim();
    let amp = data.amplitude;
    let a = data.separation;
    let [w1, w2] = data.weights;
    let profile = move |x: f64| -> f64 {
        match data.kind {
            DataKind::GaussianBump => (-x * x).exp() / std::f64::consts::PI.sqrt(),
            DataKind::AsymmetricBump => 0.7 * bump(x, 0.0, 1.0) + 0.3 * bump(x, 1.25, 0.75),
            DataKind::TwoBump => w1 * bump(x, -a, a) + w2 * bump(x, a, a),
            DataKind::ZeroMassDipole => -bump_slope(x, 0.0, 1.0),
        }
    };
    let transverse = move |y: f64| -> f64 {
        match data.kind {
            DataKind::GaussianBump => (-y * y).exp() / std::f64::consts::PI.sqrt(),
            DataKind::TwoBump => bump(y, 0.0, a),
            _ => bump(y, 0.0, 1.0),
        }
    };
    Field::from_fn(domain, |x| {
        let v = profile(x[0]);
        amp * if dim == 1 { v } else { v * transverse(x[1]) }
    })
}

/// `b(x; 0, 1) + b(x; ∓2, 1)/2`, symmetric about the origin.
pub fn symmetric(domain: Domain) -> Field {
    let dim = domain.dim();
    Field::from_fn(domain, |x| {
        let v = bump(x[0], 0.0, 1.0) + 0.5 * (bump(x[0], -2.0, 1.0) + bump(x[0], 2.0, 1.0));
        if dim == 1 {
            v
        } else {
            v * bump(x[1], 0.0, 1.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Config, Suite};
    use fracdiff::field::{moment, MultiIndex};

    #[test]
    fn masses_and_moments() {
        let d = Domain::new(1, 4.0, 4096).unwrap();
        let mut data = Config::defaults(Suite::Linear).data;
        let zero = MultiIndex::zero(1);
        let one = MultiIndex::new(&[1]);
        for kind in [DataKind::GaussianBump, DataKind::AsymmetricBump, DataKind::TwoBump] {
            data.kind = kind;
            assert!((moment(&build(&data, d), &zero) - 1.0).abs() < 1e-5, "{kind:?}");
        }
        data.kind = DataKind::TwoBump;
        assert!((moment(&build(&data, d), &one) + 0.4).abs() < 1e-5);
        data.kind = DataKind::ZeroMassDipole;
        let f = build(&data, d);
        assert!(moment(&f, &zero).abs() < 1e-12);
        assert!((moment(&f, &one) - 1.0).abs() < 1e-5, "{}", moment(&f, &one));
    }
}
