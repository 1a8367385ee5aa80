//! Uniform box grids, sampled functions, multi-indices and the norm and
//! moment functionals built on midpoint quadrature.

use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::table::{read_f64, read_f64s, read_u64, write_f64s};

/// Cell-centred uniform grid on `[-L, L]^N`, symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    dim: usize,
    halfwidth: f64,
    points_per_dim: usize,
}

impl Domain {
    pub fn new(dim: usize, halfwidth: f64, points_per_dim: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(halfwidth > 0.0 && halfwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!("halfwidth must be positive, got {halfwidth}")));
        }
        if points_per_dim < 16 || !points_per_dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("points per dimension must be even and >= 16, got {points_per_dim}")));
        }
        Ok(Self { dim, halfwidth, points_per_dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.halfwidth / self.points_per_dim as f64
    }

    /// Volume element `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of grid index `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.halfwidth + (i as f64 + 0.5) * self.spacing()
    }

    /// Axis coordinates.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.points_per_dim).map(|i| self.coord(i)).collect()
    }

    /// Splits a flat lexicographic index into per-axis indices (last axis fastest).
    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points_per_dim, flat % self.points_per_dim],
        }
    }

    pub fn ravel(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.points_per_dim + idx[1],
        }
    }

    /// Physical point of a flat index; unused trailing components are zero.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let idx = self.unravel(flat);
        match self.dim {
            1 => [self.coord(idx[0]), 0.0],
            _ => [self.coord(idx[0]), self.coord(idx[1])],
        }
    }

    /// Iterator over all grid points, in storage order.
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Whether a flat index lies on the outermost ring of cells.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.unravel(flat);
        let last = self.points_per_dim - 1;
        idx[..self.dim].iter().any(|&i| i == 0 || i == last)
    }
}

/// A real function sampled on a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    domain: Domain,
    values: Vec<f64>,
}

impl Field {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidArgument(format!("expected {} values, got {}", domain.len(), values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite value at index {i}")));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: Domain) -> Self {
        Self { domain, values: vec![0.0; domain.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F: Fn([f64; 2]) -> f64>(domain: Domain, f: F) -> Self {
        let values = domain.points().map(f).collect();
        Self { domain, values }
    }

    pub(crate) fn from_raw(domain: Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self { domain, values }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_raw(self.domain, self.values.iter().map(|v| c * v).collect())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self::from_raw(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Self::from_raw(self.domain, values))
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Binary dump in the layout of the kernel tables: version byte, N (u64),
    /// L (f64), M (u64), then the values, all little-endian.
    pub fn write_to<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&[FIELD_FORMAT_VERSION])?;
        w.write_all(&(self.domain.dim as u64).to_le_bytes())?;
        w.write_all(&self.domain.halfwidth.to_le_bytes())?;
        w.write_all(&(self.domain.points_per_dim as u64).to_le_bytes())?;
        write_f64s(&mut w, &self.values)
    }

    pub fn read_from<R: std::io::Read>(mut r: R) -> Result<Self> {
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != FIELD_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported field version {}", version[0])));
        }
        let dim = read_u64(&mut r)? as usize;
        let halfwidth = read_f64(&mut r)?;
        let m = read_u64(&mut r)? as usize;
        let domain = Domain::new(dim, halfwidth, m).map_err(|e| Error::Format(e.to_string()))?;
        let values = read_f64s(&mut r, domain.len())?;
        Field::new(domain, values).map_err(|e| Error::Format(e.to_string()))
    }
}

const FIELD_FORMAT_VERSION: u8 = 1;

/// Multi-index `(α_1, ..., α_N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: usize,
    comps: [u32; 2],
}

impl MultiIndex {
    pub fn new(comps: &[u32]) -> Self {
        assert!((1..=2).contains(&comps.len()), "multi-indices have 1 or 2 components");
        let mut c = [0; 2];
        c[..comps.len()].copy_from_slice(comps);
        Self { dim: comps.len(), comps: c }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(&vec![0; dim])
    }

    /// Unit vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut c = vec![0; dim];
        c[i] = 1;
        Self::new(&c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[u32] {
        &self.comps[..self.dim]
    }

    pub fn get(&self, i: usize) -> u32 {
        self.comps[i]
    }

    pub fn order(&self) -> u32 {
        self.components().iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.order() == 0
    }

    /// `α!`
    pub fn factorial(&self) -> f64 {
        self.components().iter().map(|&a| factorial(a)).product()
    }

    /// `x^α`
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.components().iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }

    /// Componentwise partial order `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.dim == other.dim && self.components().iter().zip(other.components()).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let c: Vec<u32> = self.components().iter().zip(other.components()).map(|(a, b)| a + b).collect();
        MultiIndex::new(&c)
    }

    /// `(-1)^{|α|} / α!`
    pub fn sign_over_factorial(&self) -> f64 {
        let s = if self.order().is_multiple_of(2) { 1.0 } else { -1.0 };
        s / self.factorial()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `[k]`: the unique integer `b` with `k - 1 < b <= k`.
pub fn floor_bracket(k: f64) -> Result<u32> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("bracket needs k >= 0, got {k}")));
    }
    Ok(k.floor() as u32)
}

/// All multi-indices with `|α| <= k`, ordered by `(|α|, lexicographic)`.
///
/// Any `β <= α` with `β != α` has a smaller order, so it precedes `α`.
pub fn multi_indices_up_to(k: f64, dim: usize) -> Vec<MultiIndex> {
    assert!((1..=2).contains(&dim), "dimension must be 1 or 2");
    if k < 0.0 {
        return Vec::new();
    }
    let kmax = k.floor() as u32;
    let mut out = Vec::new();
    for order in 0..=kmax {
        match dim {
            1 => out.push(MultiIndex::new(&[order])),
            _ => {
                for a in (0..=order).rev() {
                    out.push(MultiIndex::new(&[a, order - a]));
                }
            }
        }
    }
    out
}

/// Exponent `q` of an `L^q` norm, with infinity kept distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_infinite() && q > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!("norm exponent must be >= 1, got {q}")));
        }
        Ok(Exponent::Finite(q))
    }

    /// `1/q`, zero for infinity.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Exponent::Finite(q) => 1.0 / q,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Discrete `L^q` norm of a set of samples with volume element `cell`.
pub fn lq_norm_values(values: &[f64], cell: f64, q: Exponent) -> f64 {
    match q {
        Exponent::Infinity => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(q) if q == 1.0 => values.iter().map(|v| v.abs()).sum::<f64>() * cell,
        Exponent::Finite(q) if q == 2.0 => (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt(),
        Exponent::Finite(q) => {
            // scale by the max to avoid overflow for large q
            let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                return 0.0;
            }
            let s: f64 = values.iter().map(|v| (v.abs() / m).powf(q)).sum();
            m * (s * cell).powf(1.0 / q)
        }
    }
}

/// `‖f‖_q` by midpoint quadrature.
pub fn lq_norm(f: &Field, q: Exponent) -> f64 {
    lq_norm_values(f.values(), f.domain().cell_volume(), q)
}

/// `|||f|||_ℓ = ∫ |x|^ℓ |f(x)| dx` over the box.
pub fn weighted_l1(f: &Field, ell: f64) -> Result<f64> {
    if !(ell >= 0.0) {
        return Err(Error::InvalidArgument(format!("weight exponent must be >= 0, got {ell}")));
    }
    let d = f.domain();
    let s: f64 = d
        .points()
        .zip(f.values())
        .map(|(p, v)| {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            weight(r, ell) * v.abs()
        })
        .sum();
    Ok(s * d.cell_volume())
}

pub(crate) fn weight(r: f64, ell: f64) -> f64 {
    if ell == 0.0 {
        1.0
    } else {
        r.powf(ell)
    }
}

/// Both norms in one report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub q: Exponent,
    pub ell: f64,
    pub lq_value: f64,
    pub weighted_value: f64,
}

pub fn norm_report(f: &Field, q: Exponent, ell: f64) -> Result<NormReport> {
    Ok(NormReport { q, ell, lq_value: lq_norm(f, q), weighted_value: weighted_l1(f, ell)? })
}

/// `∫ x^α f(x) dx` by midpoint quadrature.
pub fn moment(f: &Field, alpha: &MultiIndex) -> f64 {
    let d = f.domain();
    debug_assert_eq!(alpha.dim(), d.dim());
    let s: f64 = d.points().zip(f.values()).map(|(p, v)| alpha.monomial(&p[..d.dim()]) * v).sum();
    s * d.cell_volume()
}

/// Moments for a whole list of multi-indices, sharing the pass over the grid.
pub fn moments(f: &Field, alphas: &[MultiIndex]) -> Vec<f64> {
    let d = f.domain();
    let mut out = vec![0.0; alphas.len()];
    for (p, v) in d.points().zip(f.values()) {
        if *v == 0.0 {
            continue;
        }
        for (o, a) in out.iter_mut().zip(alphas) {
            *o += a.monomial(&p[..d.dim()]) * v;
        }
    }
    let cell = d.cell_volume();
    out.iter_mut().for_each(|o| *o *= cell);
    out
}
