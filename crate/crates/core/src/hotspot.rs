//! Maximizers of `S_θ(t)φ` and their drift towards the centre of mass.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion::{fit_rate, fmt17, RateFit, RateSeries};
use crate::field::{Field, MultiIndex};
use crate::kernel::Kernel;
use crate::semigroup::{convolve_measure, DiscreteMeasure, SemigroupPlan, SupportBox};

/// Relative band below the global maximum in which a second strict local
/// maximum makes the hot spot ambiguous.
pub const UNIQUENESS_BAND: f64 = 1e-3;

const NEWTON_STEPS: usize = 30;

/// A located maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hotspot {
    pub point: [f64; 2],
    pub value: f64,
    pub unique: bool,
}

/// Grid argmax refined by a quadratic fit on the `3^N` stencil.
///
/// Ties go to the smallest flat index. A maximum on the outermost ring of
/// cells is rejected.
pub fn locate(field: &Field) -> Result<Hotspot> {
    let d = *field.domain();
    let v = field.values();
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    if v.iter().all(|&x| x == v[best]) {
        return Err(Error::InvalidArgument("constant field has no isolated maximum".into()));
    }
    if d.on_boundary(best) {
        return Err(Error::MaximumOnBoundary);
    }
    let top = v[best];
    let band = top - UNIQUENESS_BAND * top.abs();
    let mut strict = 0;
    for (i, &x) in v.iter().enumerate() {
        if x >= band && !d.on_boundary(i) && neighbours(d.dim(), d.unravel(i)).all(|n| v[d.ravel(n)] < x) {
            strict += 1;
        }
    }
    let (point, value) = quadratic_refine(field, best);
    Ok(Hotspot { point, value, unique: strict == 1 })
}

fn neighbours(dim: usize, idx: [usize; 2]) -> impl Iterator<Item = [usize; 2]> {
    let span: &[isize] = &[-1, 0, 1];
    let second: &[isize] = if dim == 1 { &[0] } else { span };
    span.iter()
        .flat_map(move |&a| second.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| a != 0 || b != 0)
        .map(move |(a, b)| [(idx[0] as isize + a) as usize, (idx[1] as isize + b) as usize])
}

fn quadratic_refine(field: &Field, flat: usize) -> ([f64; 2], f64) {
    let d = *field.domain();
    let h = d.spacing();
    let idx = d.unravel(flat);
    let at = |a: isize, b: isize| field.values()[d.ravel([(idx[0] as isize + a) as usize, (idx[1] as isize + b) as usize])];
    let f0 = at(0, 0);
    let mut point = d.point(flat);
    if d.dim() == 1 {
        let g = (at(1, 0) - at(-1, 0)) / (2.0 * h);
        let c = (at(1, 0) - 2.0 * f0 + at(-1, 0)) / (h * h);
        if c >= 0.0 {
            return (point, f0);
        }
        let s = (-g / c).clamp(-h, h);
        point[0] += s;
        return (point, f0 + g * s + 0.5 * c * s * s);
    }
    let g = [(at(1, 0) - at(-1, 0)) / (2.0 * h), (at(0, 1) - at(0, -1)) / (2.0 * h)];
    let hxx = (at(1, 0) - 2.0 * f0 + at(-1, 0)) / (h * h);
    let hyy = (at(0, 1) - 2.0 * f0 + at(0, -1)) / (h * h);
    let hxy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
    match newton_step(g, [hxx, hxy, hyy], 2) {
        Some(mut s) => {
            s[0] = s[0].clamp(-h, h);
            s[1] = s[1].clamp(-h, h);
            point[0] += s[0];
            point[1] += s[1];
            let q = g[0] * s[0] + g[1] * s[1] + 0.5 * (hxx * s[0] * s[0] + 2.0 * hxy * s[0] * s[1] + hyy * s[1] * s[1]);
            (point, f0 + q)
        }
        None => (point, f0),
    }
}

/// `-H⁻¹g` when `H = [[a, b], [b, c]]` is negative definite.
fn newton_step(g: [f64; 2], hess: [f64; 3], dim: usize) -> Option<[f64; 2]> {
    let [a, b, c] = hess;
    if dim == 1 {
        return (a < 0.0).then(|| [-g[0] / a, 0.0]);
    }
    let det = a * c - b * b;
    if !(a < 0.0 && det > 0.0) {
        return None;
    }
    Some([-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det])
}

/// Eigenvalues of a symmetric `N × N` matrix stored as `[a, b, c]`, ascending.
fn eigenvalues(hess: [f64; 3], dim: usize) -> Vec<f64> {
    let [a, b, c] = hess;
    if dim == 1 {
        return vec![a];
    }
    let m = 0.5 * (a + c);
    let r = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    vec![m - r, m + r]
}

/// Value, gradient and Hessian of `S_θ(t)μ` at `x` by direct summation.
fn local_jet(kernel: &Kernel, mu: &DiscreteMeasure, t: f64, x: [f64; 2]) -> Result<(f64, [f64; 2], [f64; 3])> {
    let dim = mu.dim;
    let eval = |c: &[u32]| -> Result<f64> { Ok(convolve_measure(kernel, mu, t, &MultiIndex::new(c), &[x])?[0]) };
    if dim == 1 {
        return Ok((eval(&[0])?, [eval(&[1])?, 0.0], [eval(&[2])?, 0.0, 0.0]));
    }
    Ok((eval(&[0, 0])?, [eval(&[1, 0])?, eval(&[0, 1])?], [eval(&[2, 0])?, eval(&[1, 1])?, eval(&[0, 2])?]))
}

/// Newton iteration for `∇S_θ(t)μ = 0` from `start`, on exact derivatives.
///
/// Returns `None` if the Hessian stops being negative definite or the
/// iterate leaves the ball of radius `reach` around `start`.
pub fn refine(kernel: &Kernel, mu: &DiscreteMeasure, t: f64, start: [f64; 2], reach: f64) -> Result<Option<([f64; 2], f64)>> {
    let dim = mu.dim;
    let mut x = start;
    for _ in 0..NEWTON_STEPS {
        let (_, g, hess) = local_jet(kernel, mu, t, x)?;
        let Some(s) = newton_step(g, hess, dim) else {
            return Ok(None);
        };
        for a in 0..dim {
            x[a] += s[a];
        }
        let off: f64 = (0..dim).map(|a| (x[a] - start[a]).powi(2)).sum::<f64>().sqrt();
        if off > reach {
            return Ok(None);
        }
        let size: f64 = (0..dim).map(|a| s[a] * s[a]).sum::<f64>().sqrt();
        if size <= 1e-13 * (1.0 + x[0].abs().max(x[1].abs())) {
            break;
        }
    }
    let value = convolve_measure(kernel, mu, t, &MultiIndex::zero(dim), &[x])?[0];
    Ok(Some((x, value)))
}

/// Hessian eigenvalues of `S_θ(t)μ` at `x`, ascending.
///
/// Direct summation of `∂²G_θ` against the cells equals the second-order
/// expansion of the Hessian plus its `H²` remainder.
pub fn hessian_eigenvalues(kernel: &Kernel, mu: &DiscreteMeasure, t: f64, x: [f64; 2]) -> Result<Vec<f64>> {
    let (_, _, hess) = local_jet(kernel, mu, t, x)?;
    Ok(eigenvalues(hess, mu.dim))
}

/// Whether the Hessian is negative definite at `x` and at the `2N` points
/// at distance `radius` along the axes.
pub fn check_concavity(kernel: &Kernel, mu: &DiscreteMeasure, t: f64, x: [f64; 2], radius: f64) -> Result<bool> {
    let mut probes = vec![x];
    for a in 0..mu.dim {
        for s in [-1.0, 1.0] {
            let mut p = x;
            p[a] += s * radius;
            probes.push(p);
        }
    }
    for p in probes {
        if hessian_eigenvalues(kernel, mu, t, p)?.iter().any(|&e| !(e < 0.0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hot-spot positions over time.
#[derive(Debug, Clone, PartialEq)]
pub struct HotspotTrack {
    pub dim: usize,
    pub times: Vec<f64>,
    pub locations: Vec<[f64; 2]>,
    pub max_values: Vec<f64>,
    pub unique_flags: Vec<bool>,
    /// `M(φ)`
    pub mass: f64,
    /// `C(φ)`
    pub center: [f64; 2],
}

impl HotspotTrack {
    /// First time from which every later sample is unique.
    pub fn first_unique_time(&self) -> Option<f64> {
        let last_ambiguous = self.unique_flags.iter().rposition(|&u| !u);
        match last_ambiguous {
            None => self.times.first().copied(),
            Some(i) => self.times.get(i + 1).copied(),
        }
    }

    /// `|x(t) - C(φ)|` per sample.
    pub fn center_errors(&self) -> Vec<f64> {
        self.locations.iter().map(|x| (0..self.dim).map(|a| (x[a] - self.center[a]).powi(2)).sum::<f64>().sqrt()).collect()
    }

    /// Linear interpolation of the error series at `t`.
    pub fn center_error_at(&self, t: f64) -> Option<f64> {
        let e = self.center_errors();
        let i = self.times.iter().position(|&s| s >= t)?;
        if self.times[i] == t || i == 0 {
            return Some(e[i]);
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        Some(e[i - 1] + (e[i] - e[i - 1]) * (t - t0) / (t1 - t0))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.dim == 1 { "t,x1,max_value,unique\n" } else { "t,x1,x2,max_value,unique\n" });
        for i in 0..self.times.len() {
            let x = self.locations[i];
            let coords: Vec<String> = (0..self.dim).map(|a| fmt17(x[a])).collect();
            let _ = writeln!(s, "{},{},{},{}", fmt17(self.times[i]), coords.join(","), fmt17(self.max_values[i]), self.unique_flags[i]);
        }
        s
    }
}

/// Locates the hot spot of `S_θ(t)φ` at each time.
///
/// The spectral solution gives the grid maximum and its uniqueness; the
/// location is then polished by Newton's method on the exact convolution of
/// the cells of `φ`, falling back to the quadratic fit if that fails.
pub fn track(kernel: &Kernel, plan: &SemigroupPlan, phi: &Field, support: &SupportBox, times: &[f64]) -> Result<HotspotTrack> {
    if kernel.spec() != plan.spec() {
        return Err(Error::InvalidArgument("kernel and plan disagree".into()));
    }
    let mu = DiscreteMeasure::from_field(phi, support)?;
    let dim = mu.dim;
    let mass = mu.moment(&MultiIndex::zero(dim));
    if !(mass > 0.0) {
        return Err(Error::InvalidArgument(format!("hot-spot tracking needs positive mass, got {mass:.3e}")));
    }
    let mut center = [0.0; 2];
    for (a, c) in center.iter_mut().enumerate().take(dim) {
        *c = mu.moment(&MultiIndex::unit(dim, a)) / mass;
    }
    let h = plan.domain().spacing();
    let zero = MultiIndex::zero(dim);
    let found: Vec<Hotspot> = times
        .par_iter()
        .map(|&t| {
            let u = plan.apply(phi, t, &zero)?;
            let coarse = locate(&u)?;
            Ok(match refine(kernel, &mu, t, coarse.point, 2.0 * h)? {
                Some((point, value)) => Hotspot { point, value, unique: coarse.unique },
                None => coarse,
            })
        })
        .collect::<Result<_>>()?;
    Ok(HotspotTrack {
        dim,
        times: times.to_vec(),
        locations: found.iter().map(|f| f.point).collect(),
        max_values: found.iter().map(|f| f.value).collect(),
        unique_flags: found.iter().map(|f| f.unique).collect(),
        mass,
        center,
    })
}

/// Largest Hessian eigenvalue magnitude at the tracked hot spot, with its
/// power-law fit over `window`.
pub fn hessian_decay(kernel: &Kernel, phi: &Field, support: &SupportBox, track: &HotspotTrack, window: (f64, f64)) -> Result<(RateSeries, RateFit)> {
    let mu = DiscreteMeasure::from_field(phi, support)?;
    let values: Vec<f64> = track
        .times
        .par_iter()
        .zip(&track.locations)
        .map(|(&t, &x)| Ok(hessian_eigenvalues(kernel, &mu, t, x)?.iter().fold(0.0f64, |m, e| m.max(e.abs()))))
        .collect::<Result<_>>()?;
    let series = RateSeries::new("hessian", track.times.clone(), values)?;
    let fit = fit_rate(&series, window)?;
    Ok((series, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Domain;

    #[test]
    fn quadratic_is_recovered_exactly() {
        let d = Domain::new(2, 4.0, 32).unwrap();
        let x0 = [0.37, -0.81];
        let f = Field::from_fn(d, |x| 5.0 - (x[0] - x0[0]).powi(2) - 2.0 * (x[1] - x0[1]).powi(2) - 0.5 * (x[0] - x0[0]) * (x[1] - x0[1]));
        let h = locate(&f).unwrap();
        assert!((h.point[0] - x0[0]).abs() < 1e-12 && (h.point[1] - x0[1]).abs() < 1e-12, "{:?}", h.point);
        assert!((h.value - 5.0).abs() < 1e-12);
        assert!(h.unique);
    }

    #[test]
    fn ties_go_to_the_lower_index_and_are_not_unique() {
        let d = Domain::new(1, 16.0, 64).unwrap();
        let f = Field::from_fn(d, |x| (-(x[0] - 4.25).powi(2)).exp() + (-(x[0] + 4.25).powi(2)).exp());
        let h = locate(&f).unwrap();
        assert!(!h.unique);
        assert!(h.point[0] < 0.0);
    }

    #[test]
    fn boundary_and_constant_fields_are_rejected() {
        let d = Domain::new(1, 4.0, 16).unwrap();
        assert_eq!(locate(&Field::from_fn(d, |x| x[0])), Err(Error::MaximumOnBoundary));
        assert!(locate(&Field::zeros(d)).is_err());
    }

    #[test]
    fn eigenvalues_of_a_symmetric_pair() {
        let e = eigenvalues([2.0, 1.0, 2.0], 2);
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
    }
}
