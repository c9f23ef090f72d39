//! The frame operator in Walnut form,
//! `Sf(t) = Σ_j G_j(t) f(t - j/β)` with
//! `G_j(t) = β⁻¹ Σ_k conj(ψ(t - j/β - αk)) ψ(t - αk)`,
//! sampled on `Δℤ` with `Δ = 1/(βq)` so that shifts by `j/β` are index
//! shifts by `jq`. The frequency sum is exact; `k` may be truncated.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GaborError, Result};
use crate::model::{IndexRange, Window};

/// Relative envelope level below which window values are dropped.
const WINDOW_EPS: f64 = 1e-17;

#[derive(Debug, Clone)]
pub struct WalnutOperator {
    m_lo: i64,
    len: usize,
    step: f64,
    q: usize,
    bands: Vec<(i64, Vec<Complex64>)>,
}

/// Smallest `q` with `1/(βq) ≤ α/16`.
pub fn samples_per_period(alpha: f64, beta: f64) -> usize {
    (16.0 / (alpha * beta) - 1e-12).ceil().max(1.0) as usize
}

impl WalnutOperator {
    /// Operator compressed to samples in `[lo, hi]`; `k_range = None` keeps
    /// every translate that reaches the domain.
    pub fn new(
        psi: &Window,
        alpha: f64,
        beta: f64,
        k_range: Option<IndexRange>,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        let q = samples_per_period(alpha, beta);
        let step = 1.0 / (beta * q as f64);
        let m_lo = (lo / step).ceil() as i64;
        let m_hi = (hi / step).floor() as i64;
        if m_hi < m_lo + 1 {
            return Err(GaborError::Config(format!(
                "operator domain [{lo}, {hi}] holds fewer than two samples"
            )));
        }
        let len = (m_hi - m_lo + 1) as usize;
        let (w_lo, w_hi) = psi.support_offsets(WINDOW_EPS, 0.0)?;
        let radius = w_lo.abs().max(w_hi.abs());
        let j_max = (2.0 * radius * beta).floor() as i64 + 1;
        let bands = (-j_max..=j_max)
            .into_par_iter()
            .map(|j| {
                let shift = j as f64 / beta;
                let values: Vec<Complex64> = (0..len)
                    .map(|i| {
                        let t = (m_lo + i as i64) as f64 * step;
                        // Both t - αk and t - shift - αk must lie in [w_lo, w_hi].
                        let k_from = ((t - w_hi).max(t - shift - w_hi) / alpha).floor() as i64;
                        let k_to = ((t - w_lo).min(t - shift - w_lo) / alpha).ceil() as i64;
                        let (k_from, k_to) = match k_range {
                            Some(r) => (k_from.max(r.lo), k_to.min(r.hi)),
                            None => (k_from, k_to),
                        };
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in k_from..=k_to {
                            let u = t - alpha * k as f64;
                            acc += psi.eval(u - shift).conj() * psi.eval(u);
                        }
                        acc / beta
                    })
                    .collect();
                (j, values)
            })
            .filter(|(_, v)| v.iter().any(|c| c.norm() > 0.0))
            .collect();
        Ok(WalnutOperator {
            m_lo,
            len,
            step,
            q,
            bands,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples_per_period(&self) -> usize {
        self.q
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        (self.m_lo + i as i64) as f64 * self.step
    }

    pub fn abscissae(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.abscissa(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..self.len).map(|i| f(self.abscissa(i))).collect()
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(f.len(), self.len);
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        for (j, g) in &self.bands {
            let off = j * self.q as i64;
            for (i, slot) in out.iter_mut().enumerate() {
                let src = i as i64 - off;
                if src >= 0 && (src as usize) < self.len {
                    *slot += g[i] * f[src as usize];
                }
            }
        }
        out
    }

    /// `Δ Σ a_i conj(b_i)`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<Complex64>() * self.step
    }

    pub fn norm_sq(&self, a: &[Complex64]) -> f64 {
        a.iter().map(|x| x.norm_sqr()).sum::<f64>() * self.step
    }

    /// `⟨Sf, f⟩ / ⟨f, f⟩`, or `None` for a numerically zero vector.
    pub fn rayleigh(&self, f: &[Complex64]) -> Option<f64> {
        let nf = self.norm_sq(f);
        if !(nf > 1e-280) {
            return None;
        }
        Some(self.inner(&self.apply(f), f).re / nf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_respects_alpha_over_sixteen() {
        for (a, b) in [(0.5, 0.5), (0.99, 0.99), (2.0, 0.49), (1.0, 1.0)] {
            let q = samples_per_period(a, b);
            assert!(1.0 / (b * q as f64) <= a / 16.0 + 1e-15);
        }
    }

    #[test]
    fn operator_is_hermitian() {
        let op = WalnutOperator::new(&Window::gaussian(), 0.5, 0.5, None, -6.0, 6.0).unwrap();
        let f = op.sample(|t| Complex64::new((-(t - 0.3) * (t - 0.3)).exp(), 0.2 * t));
        let g = op.sample(|t| Complex64::new((-t * t / 3.0).exp() * t.cos(), 0.0));
        let lhs = op.inner(&op.apply(&f), &g);
        let rhs = op.inner(&op.apply(&g), &f).conj();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
