//! Composite 16-point Gauss–Legendre rule with global panel halving for
//! oscillatory integrands `g(t)e^{-2πiξt}` over a whole progression of `ξ`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

const ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub panel_width: f64,
    pub tail_tol: f64,
    pub max_halvings: u32,
    /// Fixed window cutoff radius; derived from the window envelope when absent.
    pub support_cutoff: Option<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panel_width: 0.5,
            tail_tol: 1e-10,
            max_halvings: 8,
            support_cutoff: None,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.panel_width > 0.0 && self.panel_width.is_finite()) {
            return Err(GaborError::Config("panel_width must be positive".into()));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol.is_finite()) {
            return Err(GaborError::Config("tail_tol must be positive".into()));
        }
        if let Some(r) = self.support_cutoff {
            if !(r > 0.0 && r.is_finite()) {
                return Err(GaborError::Config("support_cutoff must be positive".into()));
            }
        }
        Ok(())
    }

    /// Relative envelope level at which the window is truncated.
    pub(crate) fn envelope_eps(&self) -> f64 {
        (self.tail_tol * 1e-6).max(1e-300)
    }
}

/// Nodes and weights on `[-1, 1]`.
pub fn gauss_legendre_16() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER / 2 {
            let mut z = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for j in 2..=ORDER {
                    let j = j as f64;
                    let p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[ORDER - 1 - i] = z;
            weights[i] = w;
            weights[ORDER - 1 - i] = w;
        }
        (nodes, weights)
    })
}

/// Arithmetic progression `ξ_j = start + j·step`, `j < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequencies {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Frequencies {
    pub fn single(xi: f64) -> Self {
        Frequencies {
            start: xi,
            step: 0.0,
            count: 1,
        }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    fn max_abs(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.start.abs().max(self.get(self.count - 1).abs())
    }
}

/// One pass of the composite rule: returns per-frequency sums and `∫|g|`.
fn composite_pass(
    segments: &[(f64, f64)],
    panel: f64,
    g: &dyn Fn(f64) -> Complex64,
    freqs: &Frequencies,
) -> (Vec<Complex64>, f64) {
    let (nodes, weights) = gauss_legendre_16();
    let mut acc = vec![Complex64::new(0.0, 0.0); freqs.count];
    let mut l1 = 0.0;
    for &(a, b) in segments {
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let panels = (len / panel).ceil().max(1.0) as usize;
        let h = len / panels as f64;
        for p in 0..panels {
            let left = a + h * p as f64;
            for (u, w) in nodes.iter().zip(weights.iter()) {
                let t = left + 0.5 * h * (u + 1.0);
                let gv = g(t) * (0.5 * h * w);
                if gv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                l1 += gv.norm();
                let mut phase = Complex64::from_polar(1.0, -2.0 * PI * freqs.start * t);
                let rot = Complex64::from_polar(1.0, -2.0 * PI * freqs.step * t);
                for slot in acc.iter_mut() {
                    *slot += gv * phase;
                    phase *= rot;
                }
            }
        }
    }
    (acc, l1)
}

/// `∫ g(t) e^{-2πiξt} dt` over the union of `segments` for every `ξ` in
/// `freqs`, halving panels until successive estimates agree to
/// `tail_tol · ∫|g|`. `x` only labels errors.
pub fn integrate_oscillatory(
    segments: &[(f64, f64)],
    g: &dyn Fn(f64) -> Complex64,
    freqs: &Frequencies,
    spec: &QuadratureSpec,
    x: f64,
) -> Result<Vec<Complex64>> {
    let base = spec.panel_width.min(0.25 / (1.0 + freqs.max_abs()));
    let (mut prev, _) = composite_pass(segments, base, g, freqs);
    for level in 1..=spec.max_halvings.max(1) {
        let panel = base / f64::powi(2.0, level as i32);
        let (next, l1) = composite_pass(segments, panel, g, freqs);
        let bound = spec.tail_tol * l1;
        let Some(failing) = prev.iter().zip(next.iter()).position(|(p, q)| (p - q).norm() > bound) else {
            return Ok(next);
        };
        if level == spec.max_halvings.max(1) {
            return Err(GaborError::Quadrature {
                x,
                xi: freqs.get(failing),
                previous: prev[failing],
                last: next[failing],
            });
        }
        prev = next;
    }
    unreachable!("loop returns on its final level")
}

/// Splits `[a, b]` at the sorted interior points.
pub fn split_segments(a: f64, b: f64, mut points: Vec<f64>) -> Vec<(f64, f64)> {
    if !(b > a) {
        return Vec::new();
    }
    points.retain(|&t| t > a && t < b);
    points.sort_by(|p, q| p.partial_cmp(q).expect("finite breakpoints"));
    points.dedup();
    let mut out = Vec::with_capacity(points.len() + 1);
    let mut left = a;
    for t in points {
        out.push((left, t));
        left = t;
    }
    out.push((left, b));
    out
}
