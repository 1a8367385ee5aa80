//! Memoized radial profiles `h_k` on a dense `z = asinh(r/a)` grid.
//!
//! Each profile is stored tail-normalized, `f_k(z) = h_k(r) (1+r²)^{(N+θ+2k)/2}`,
//! which is bounded and slowly varying in `z`; values and exact first and
//! second `z`-derivatives (from `h_k' = r h_{k+1}`) feed a quintic Hermite
//! interpolant. The core scale
//! `a` resolves the sharp peak of the profiles at the origin for small θ; the
//! grid is geometric in `r` beyond it.

use std::io::{Read, Write};

use super::subordinator::RadialProfiles;
use crate::error::{Error, Result};

const FORMAT_VERSION: u8 = 1;
const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    dim: usize,
    theta: f64,
    step: f64,
    /// core scale `a` of the `asinh(r/a)` variable
    core: f64,
    radii: Vec<f64>,
    /// `values[k][i]`, `slopes[k][i]`, `curvatures[k][i]` of the normalized profile
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
    curvatures: Vec<Vec<f64>>,
}

fn tail_power(dim: usize, theta: f64, k: usize) -> f64 {
    0.5 * (dim as f64 + theta + 2.0 * k as f64)
}

impl ProfileTable {
    /// Builds profiles `h_0..=h_kmax` for `r ≤ r_max` and spot-checks them
    /// against direct evaluation at cell midpoints.
    pub fn build(profiles: &RadialProfiles, kmax: usize, r_max: f64, step: f64, core: f64) -> Result<Self> {
        use rayon::prelude::*;
        let dim = profiles.dim();
        let theta = profiles.theta();
        let z_max = (r_max / core).asinh();
        let n = (z_max / step).ceil() as usize + 1;
        let radii: Vec<f64> = (0..n).map(|i| core * (i as f64 * step).sinh()).collect();
        let raw: Vec<Vec<f64>> = radii.par_iter().map(|&r| profiles.eval(r, kmax + 2)).collect();
        let mut values = vec![vec![0.0; n]; kmax + 1];
        let mut slopes = vec![vec![0.0; n]; kmax + 1];
        let mut curvatures = vec![vec![0.0; n]; kmax + 1];
        for (i, (&r, h)) in radii.iter().zip(&raw).enumerate() {
            let q = 1.0 + r * r;
            let dr_dz = (core * core + r * r).sqrt();
            for k in 0..=kmax {
                let p = tail_power(dim, theta, k);
                let w = q.powf(p);
                let dw = 2.0 * p * r * q.powf(p - 1.0);
                let ddw = 2.0 * p * q.powf(p - 1.0) + 4.0 * p * (p - 1.0) * r * r * q.powf(p - 2.0);
                let dh = r * h[k + 1];
                let ddh = h[k + 1] + r * r * h[k + 2];
                let dg = dh * w + h[k] * dw;
                let ddg = ddh * w + 2.0 * dh * dw + h[k] * ddw;
                values[k][i] = h[k] * w;
                // r(z) = a sinh z: r' = sqrt(a² + r²), r'' = r
                slopes[k][i] = dg * dr_dz;
                curvatures[k][i] = ddg * dr_dz * dr_dz + dg * r;
            }
        }
        let table = Self { dim, theta, step, core, radii, values, slopes, curvatures };
        table.spot_check(profiles)?;
        Ok(table)
    }

    fn spot_check(&self, profiles: &RadialProfiles) -> Result<()> {
        let n = self.radii.len();
        let kmax = self.values.len() - 1;
        let stride = (n / 60).max(1);
        let mut worst = 0.0f64;
        for i in (0..n - 1).step_by(stride) {
            let z = (i as f64 + 0.5) * self.step;
            let r = self.core * z.sinh();
            let direct = profiles.eval(r, kmax);
            for (k, d) in direct.iter().enumerate() {
                let v = self.eval_k(r, k).unwrap();
                worst = worst.max((v - d).abs() / d.abs());
            }
        }
        if worst > CHECK_TOLERANCE {
            return Err(Error::TableCheck(worst));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn kmax(&self) -> usize {
        self.values.len() - 1
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Interpolated `h_k(r)`, or `None` outside the tabulated range.
    pub fn eval_k(&self, r: f64, k: usize) -> Option<f64> {
        let r = r.abs();
        if r > self.max_radius() || k > self.kmax() {
            return None;
        }
        let z = (r / self.core).asinh();
        let (i, s) = self.locate(z);
        let f = self.interpolate(k, i, s);
        Some(f * (1.0 + r * r).powf(-tail_power(self.dim, self.theta, k)))
    }

    /// Interpolated `h_0..h_{out.len()-1}`; returns false outside the range.
    pub fn eval_into(&self, r: f64, out: &mut [f64]) -> bool {
        let r = r.abs();
        if r > self.max_radius() || out.len() > self.kmax() + 1 {
            return false;
        }
        let z = (r / self.core).asinh();
        let (i, s) = self.locate(z);
        let q = 1.0 + r * r;
        let lq = q.ln();
        for (k, o) in out.iter_mut().enumerate() {
            let f = self.interpolate(k, i, s);
            *o = f * (-tail_power(self.dim, self.theta, k) * lq).exp();
        }
        true
    }

    fn interpolate(&self, k: usize, i: usize, s: f64) -> f64 {
        let (v, d, c) = (&self.values[k], &self.slopes[k], &self.curvatures[k]);
        let h = self.step;
        hermite5(s, [v[i], h * d[i], h * h * c[i]], [v[i + 1], h * d[i + 1], h * h * c[i + 1]])
    }

    fn locate(&self, z: f64) -> (usize, f64) {
        let n = self.radii.len();
        let i = ((z / self.step) as usize).min(n - 2);
        (i, z / self.step - i as f64)
    }

    /// Binary dump: version byte, N (u64), θ (f64), profile count (u64),
    /// length (u64), z-step (f64), core scale (f64), then radii and per-profile
    /// values, slopes and curvatures, all little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&[FORMAT_VERSION])?;
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        w.write_all(&self.theta.to_le_bytes())?;
        w.write_all(&(self.values.len() as u64).to_le_bytes())?;
        w.write_all(&(self.radii.len() as u64).to_le_bytes())?;
        w.write_all(&self.step.to_le_bytes())?;
        w.write_all(&self.core.to_le_bytes())?;
        write_f64s(&mut w, &self.radii)?;
        for k in 0..self.values.len() {
            write_f64s(&mut w, &self.values[k])?;
            write_f64s(&mut w, &self.slopes[k])?;
            write_f64s(&mut w, &self.curvatures[k])?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut version = [0u8; 1];
        r.read_exact(&mut version)?;
        if version[0] != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported table version {}", version[0])));
        }
        let dim = read_u64(&mut r)? as usize;
        let theta = read_f64(&mut r)?;
        let count = read_u64(&mut r)? as usize;
        let len = read_u64(&mut r)? as usize;
        let step = read_f64(&mut r)?;
        let core = read_f64(&mut r)?;
        if !(1..=2).contains(&dim) || !(theta > 0.0 && theta < 2.0) || count == 0 || len < 2 || !(step > 0.0) || !(core > 0.0) {
            return Err(Error::Format("corrupt table header".into()));
        }
        let radii = read_f64s(&mut r, len)?;
        let mut values = Vec::with_capacity(count);
        let mut slopes = Vec::with_capacity(count);
        let mut curvatures = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(read_f64s(&mut r, len)?);
            slopes.push(read_f64s(&mut r, len)?);
            curvatures.push(read_f64s(&mut r, len)?);
        }
        Ok(Self { dim, theta, step, core, radii, values, slopes, curvatures })
    }
}

/// Quintic Hermite on the unit interval from `[f, h f', h² f'']` at both ends.
fn hermite5(s: f64, left: [f64; 3], right: [f64; 3]) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * left[0]
        + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * left[1]
        + 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5) * left[2]
        + 0.5 * (s3 - 2.0 * s4 + s5) * right[2]
        + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * right[1]
        + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * right[0]
}

pub(crate) fn write_f64s<W: Write>(w: &mut W, xs: &[f64]) -> Result<()> {
    for x in xs {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub(crate) fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; 8 * n];
    r.read_exact(&mut buf)?;
    Ok(buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}
