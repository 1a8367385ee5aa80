//! Symbolic expansion of `∂_t^m ∂_x^α` applied to a radial profile.
//!
//! A radial function `g(|x|)` is written as `h_0(s)` with `s = |x|²/2`, so
//! `∂_i (x^γ h_k) = γ_i x^{γ-e_i} h_k + x^{γ+e_i} h_{k+1}`. Time derivatives at
//! `t = 1` follow from self-similarity: on the profile of a function
//! homogeneous of degree `-d`, `t ∂_t` acts as `-(d + E/θ)` with the Euler
//! operator `E = x·∇`, and `E (x^γ h_k) = |γ| x^γ h_k + |x|² x^γ h_{k+1}`.

use std::collections::BTreeMap;

use crate::field::MultiIndex;

/// `coef · x^γ · h_k(|x|)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub mono: [u32; 2],
    pub k: usize,
}

/// Linear combination of [`Term`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialExpansion {
    dim: usize,
    terms: Vec<Term>,
}

impl RadialExpansion {
    /// The profile itself, `h_0`.
    pub fn identity(dim: usize) -> Self {
        Self { dim, terms: vec![Term { coef: 1.0, mono: [0, 0], k: 0 }] }
    }

    /// Expansion of `(∂_t^m ∂_x^α G_θ)(x, 1)`.
    pub fn for_derivative(alpha: &MultiIndex, m: u32, theta: f64) -> Self {
        let dim = alpha.dim();
        let mut e = Self::identity(dim);
        for i in 0..dim {
            for _ in 0..alpha.get(i) {
                e = e.partial(i);
            }
        }
        let d = (dim as f64 + alpha.order() as f64) / theta;
        // ∂_t^m = Π_{i<m} (t∂_t - i) at t = 1
        for i in 0..m {
            let euler = e.euler();
            let shift = -d - i as f64;
            let mut next = e.scale(shift);
            next.terms.extend(euler.scale(-1.0 / theta).terms);
            e = next.collect();
        }
        e
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn max_k(&self) -> usize {
        self.terms.iter().map(|t| t.k).max().unwrap_or(0)
    }

    fn scale(&self, c: f64) -> Self {
        Self { dim: self.dim, terms: self.terms.iter().map(|t| Term { coef: c * t.coef, ..*t }).collect() }
    }

    fn partial(&self, i: usize) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.mono[i] > 0 {
                let mut mono = t.mono;
                mono[i] -= 1;
                out.push(Term { coef: t.coef * t.mono[i] as f64, mono, k: t.k });
            }
            let mut mono = t.mono;
            mono[i] += 1;
            out.push(Term { coef: t.coef, mono, k: t.k + 1 });
        }
        Self { dim: self.dim, terms: out }.collect()
    }

    fn euler(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            let deg: u32 = t.mono[..self.dim].iter().sum();
            if deg > 0 {
                out.push(Term { coef: t.coef * deg as f64, ..*t });
            }
            for i in 0..self.dim {
                let mut mono = t.mono;
                mono[i] += 2;
                out.push(Term { coef: t.coef, mono, k: t.k + 1 });
            }
        }
        Self { dim: self.dim, terms: out }.collect()
    }

    fn collect(self) -> Self {
        let mut map: BTreeMap<([u32; 2], usize), f64> = BTreeMap::new();
        for t in self.terms {
            *map.entry((t.mono, t.k)).or_insert(0.0) += t.coef;
        }
        let terms = map.into_iter().filter(|(_, c)| *c != 0.0).map(|((mono, k), coef)| Term { coef, mono, k }).collect();
        Self { dim: self.dim, terms }
    }

    /// Evaluates the expansion given the radial values `h[k]`.
    pub fn evaluate(&self, x: &[f64], h: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = t.coef * h[t.k];
                for i in 0..self.dim {
                    if t.mono[i] > 0 {
                        v *= x[i].powi(t.mono[i] as i32);
                    }
                }
                v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_derivative_structure() {
        let e = RadialExpansion::for_derivative(&MultiIndex::new(&[2]), 0, 1.0);
        // ∂² h_0 = h_1 + x² h_2
        assert_eq!(e.terms().len(), 2);
        assert!(e.terms().contains(&Term { coef: 1.0, mono: [0, 0], k: 1 }));
        assert!(e.terms().contains(&Term { coef: 1.0, mono: [2, 0], k: 2 }));
    }

    #[test]
    fn mixed_partials_commute() {
        let a = RadialExpansion::for_derivative(&MultiIndex::new(&[1, 2]), 0, 1.3);
        let mut b = RadialExpansion::identity(2);
        b = b.partial(1).partial(0).partial(1);
        assert_eq!(a, b);
    }

    #[test]
    fn time_derivative_of_cauchy_kernel() {
        // G = 1/(π(1+x²)) has h_1 = -2/(π(1+x²)²) and ∂_t G(x,1) = (x²-1)/(π(1+x²)²)
        let e = RadialExpansion::for_derivative(&MultiIndex::new(&[0]), 1, 1.0);
        for x in [0.0, 0.5, 3.0] {
            let q = 1.0 + x * x;
            let h = [1.0 / (std::f64::consts::PI * q), -2.0 / (std::f64::consts::PI * q * q)];
            let v = e.evaluate(&[x], &h);
            let exact = (x * x - 1.0) / (std::f64::consts::PI * q * q);
            assert!((v - exact).abs() < 1e-15, "{x}: {v} {exact}");
        }
    }
}
