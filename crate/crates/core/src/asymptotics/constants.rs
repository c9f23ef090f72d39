use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::growth::fit::fit_quadratic;
use crate::model::Window;
use crate::stft::quadrature::{integrate_oscillatory, split_segments};
use crate::stft::{Frequencies, QuadratureSpec};

/// `ψ̂(ξ + ib/2π) = ∫ψ(t)e^{bt}e^{-2πiξt}dt` by quadrature, for a whole
/// progression of `ξ`.
pub fn window_ft_quadrature(psi: &Window, freqs: &Frequencies, b: f64, q: &QuadratureSpec) -> Result<Vec<Complex64>> {
    q.validate()?;
    let (lo, hi) = psi.support_offsets(q.envelope_eps(), b.abs())?;
    let mut points = Vec::new();
    psi.breakpoints(0.0, lo, hi, &mut points);
    let segments = split_segments(lo, hi, points);
    let g = |t: f64| psi.eval(t) * (b * t).exp();
    integrate_oscillatory(&segments, &g, freqs, q, 0.0)
}

fn closed_form(psi: &Window, xi: f64, b: f64) -> Option<Complex64> {
    let v = psi.complex_ft(Complex64::new(xi, b / (2.0 * PI)))?;
    // `complex_ft` describes the unconjugated shape; real windows are their own conjugate.
    psi.is_real().then_some(v)
}

/// `ψ̂(ξ + ib/2π)` for every `ξ` of the progression: closed form when the
/// window has one, quadrature otherwise. Non-integrable `ψe^{bt}` is a
/// capability error.
pub fn window_ft_row(psi: &Window, freqs: &Frequencies, b: f64, q: &QuadratureSpec) -> Result<Vec<Complex64>> {
    if b != 0.0 && matches!(psi.decay_class(), crate::model::DecayClass::SPolynomial) {
        return Err(GaborError::Capability(format!(
            "`{}` decays polynomially, so ψ(t)e^{{bt}} is not integrable for b = {b}",
            psi.name()
        )));
    }
    if closed_form(psi, 0.0, b).is_some() {
        return Ok((0..freqs.count)
            .map(|j| closed_form(psi, freqs.get(j), b).expect("closed form available"))
            .collect());
    }
    window_ft_quadrature(psi, freqs, b, q)
}

pub fn window_ft_complex(psi: &Window, xi: f64, b: f64) -> Result<Complex64> {
    Ok(window_ft_row(psi, &Frequencies::single(xi), b, &QuadratureSpec::default())?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    pub b_max: f64,
    pub b_step: f64,
    pub b_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            b_max: 8.0,
            b_step: 0.05,
            b_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsFit {
    #[serde(rename = "C")]
    pub c: Complex64,
    pub b: f64,
    /// `(Σ|a_n − C·m_n(b)|² / Σ|a_n|²)^{1/2}`.
    pub residual: f64,
    /// `max_n |a_n − C·m_n(b)|`.
    pub max_deviation: f64,
}

/// `m_n(b) = conj(ψ̂(−βn + ib/2π))`, the shape the limits must take.
pub fn predicted_shape(psi: &Window, beta: f64, ns: &[i64], b: f64, q: &QuadratureSpec) -> Result<Vec<Complex64>> {
    ns.iter()
        .map(|&n| Ok(window_ft_row(psi, &Frequencies::single(-beta * n as f64), b, q)?[0].conj()))
        .collect()
}

struct Objective<'a> {
    psi: &'a Window,
    beta: f64,
    ns: Vec<i64>,
    a: Vec<Complex64>,
    a0: Complex64,
    norm: f64,
    q: &'a QuadratureSpec,
}

impl Objective<'_> {
    /// `(C(b), residual, max deviation)`; `None` where `ψe^{bt}` is not integrable.
    fn eval(&self, b: f64) -> Option<(Complex64, f64, f64)> {
        let shape = predicted_shape(self.psi, self.beta, &self.ns, b, self.q).ok()?;
        let denom = window_ft_row(self.psi, &Frequencies::single(0.0), b, self.q).ok()?[0].conj();
        if denom.norm() == 0.0 {
            return None;
        }
        let c = self.a0 / denom;
        let (mut ss, mut worst) = (0.0, 0.0f64);
        for (a, m) in self.a.iter().zip(&shape) {
            let d = (a - c * m).norm();
            ss += d * d;
            worst = worst.max(d);
        }
        Some((c, (ss / self.norm).sqrt(), worst))
    }

    fn residual(&self, b: f64) -> f64 {
        self.eval(b).map_or(f64::INFINITY, |r| r.1)
    }
}

/// Golden-section minimization of `f` on `[lo, hi]` down to width `tol`.
fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Residual gap below which two candidate `b` count as equally good.
const TIE: f64 = 1e-9;

/// Fits `a_n ≈ C·conj(ψ̂(−βn + ib/2π))` with `C = a_0/conj(ψ̂(ib/2π))`: a
/// scan of `b` over the bracket, golden-section refinement of every local
/// minimum, and the smallest `|b|` among tied minima (the phases of the
/// Gaussian model repeat with period `2π/β`).
pub fn solve_asymptote_constants(
    a_n: &BTreeMap<i64, Complex64>,
    psi: &Window,
    beta: f64,
    opts: &SolveOptions,
    q: &QuadratureSpec,
) -> Result<ConstantsFit> {
    let Some(&a0) = a_n.get(&0) else {
        return Err(GaborError::Precondition("the constants solve needs the n = 0 limit".into()));
    };
    let scale = a_n.values().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(ConstantsFit {
            c: Complex64::new(0.0, 0.0),
            b: 0.0,
            residual: 0.0,
            max_deviation: 0.0,
        });
    }
    if a_n.len() < 2 {
        return Err(GaborError::Precondition("the constants solve needs at least two limits".into()));
    }
    if a0.norm() <= 1e-12 * scale {
        return Err(GaborError::Inconsistent(format!(
            "a_0 vanishes while max |a_n| = {scale:e}; no C e^{{bx}} matches these limits"
        )));
    }
    if !(opts.b_max > 0.0 && opts.b_step > 0.0 && opts.b_tol > 0.0) {
        return Err(GaborError::Config(format!("invalid solve options {opts:?}")));
    }
    let obj = Objective {
        psi,
        beta,
        ns: a_n.keys().copied().collect(),
        a: a_n.values().copied().collect(),
        a0,
        norm: a_n.values().map(|v| v.norm_sqr()).sum(),
        q,
    };
    let steps = (opts.b_max / opts.b_step).floor() as i64;
    let grid: Vec<f64> = (-steps..=steps).map(|i| i as f64 * opts.b_step).collect();
    let values: Vec<f64> = grid.iter().map(|&b| obj.residual(b)).collect();
    let mut candidates = Vec::new();
    for i in 0..grid.len() {
        let left = if i > 0 { values[i - 1] } else { f64::INFINITY };
        let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if values[i].is_finite() && values[i] <= left && values[i] <= right {
            let lo = (grid[i] - opts.b_step).max(-opts.b_max);
            let hi = (grid[i] + opts.b_step).min(opts.b_max);
            let refined = golden(|b| obj.residual(b), lo, hi, opts.b_tol);
            let r = obj.residual(refined);
            candidates.push(if r <= values[i] { (refined, r) } else { (grid[i], values[i]) });
        }
    }
    let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    // Near an exact fit the relative residual grows like |b − b*| with slope
    // at most β·max|n|, so refined aliases only agree to that times b_tol.
    let n_max = obj.ns.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0) as f64;
    let tie = TIE + 2.0 * beta * n_max * opts.b_tol;
    let Some(&(b, _)) = candidates
        .iter()
        .filter(|c| c.1 <= best + tie)
        .min_by(|x, y| x.0.abs().total_cmp(&y.0.abs()))
    else {
        return Err(GaborError::Capability(format!(
            "ψ(t)e^{{bt}} is not integrable anywhere on [-{0}, {0}]",
            opts.b_max
        )));
    };
    let (c, residual, max_deviation) = obj.eval(b).expect("candidate is evaluable");
    Ok(ConstantsFit {
        c,
        b,
        residual,
        max_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum WienerVerdict {
    Holds { min_ratio: f64 },
    /// `|ψ̂(ξ+ib/2π)|` dips below the envelope threshold at `witness`.
    Fails { witness: f64, ratio: f64 },
}

impl WienerVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, WienerVerdict::Holds { .. })
    }
}

/// Envelope-relative level below which the transform counts as vanishing.
pub const WIENER_THRESHOLD: f64 = 1e-6;

/// Relative envelope level where the default grid stops.
pub const WIENER_EXTENT: f64 = 1e-12;

const WIENER_STEP: f64 = 0.01;

fn symmetric_grid(half: f64) -> Vec<f64> {
    let n = (half / WIENER_STEP).round() as i64;
    (-n..=n).map(|i| i as f64 * WIENER_STEP).collect()
}

fn modulus_on(psi: &Window, b: f64, xs: &[f64], q: &QuadratureSpec) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    // The grid may be arbitrary; evaluate as one progression when it is uniform.
    let step = if xs.len() > 1 { xs[1] - xs[0] } else { 0.0 };
    let uniform = xs.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-12 * (1.0 + step.abs()));
    if uniform {
        let freqs = Frequencies {
            start: xs[0],
            step,
            count: xs.len(),
        };
        return Ok(window_ft_row(psi, &freqs, b, q)?.iter().map(|v| v.norm()).collect());
    }
    xs.iter()
        .map(|&x| Ok(window_ft_row(psi, &Frequencies::single(x), b, q)?[0].norm()))
        .collect()
}

/// Symmetric `ξ` grid of step 0.01, doubled outward until the transform
/// modulus at both ends is below `WIENER_EXTENT` of its peak (at most 64).
pub fn default_wiener_grid(psi: &Window, b: f64, q: &QuadratureSpec) -> Result<Vec<f64>> {
    let mut half = 1.0;
    loop {
        let grid = symmetric_grid(half);
        let m = modulus_on(psi, b, &grid, q)?;
        let peak = m.iter().cloned().fold(0.0, f64::max);
        let edge = m[0].max(m[m.len() - 1]);
        if edge <= WIENER_EXTENT * peak || half >= 64.0 {
            return Ok(grid);
        }
        half *= 2.0;
    }
}

/// `|ψ̂(ξ+ib/2π)| ≥ 1e-6·E(ξ)` on the grid, with `E` the decay envelope
/// fitted (quadratic in `|ξ|`, in log scale) on the outer third and capped
/// at the peak. Every local minimum of the modulus is refined by golden
/// section between its neighbours so sign changes between grid points are
/// not missed.
pub fn wiener_condition_check(psi: &Window, b: f64, xi_grid: &[f64], q: &QuadratureSpec) -> Result<WienerVerdict> {
    if xi_grid.len() < 3 {
        return Err(GaborError::Usage("the Wiener check needs at least three frequencies".into()));
    }
    let mut xs = xi_grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = modulus_on(psi, b, &xs, q)?;
    let peak = m.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(WienerVerdict::Fails {
            witness: xs[0],
            ratio: 0.0,
        });
    }
    let extent = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let (ox, oy): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(&m)
        .filter(|&(x, &v)| x.abs() >= 2.0 * extent / 3.0 && v > 0.0)
        .map(|(x, v)| (x.abs(), v.ln()))
        .unzip();
    let fit = fit_quadratic(&ox, &oy).map(|(c, _)| c);
    let envelope = |x: f64| match fit {
        Some(c) => (c[0] + c[1] * x.abs() + c[2] * x * x).exp().min(peak),
        None => peak,
    };
    let one = |x: f64| -> f64 {
        modulus_on(psi, b, &[x], q).map_or(f64::INFINITY, |v| v[0])
    };

    let mut worst = (f64::INFINITY, xs[0]);
    let mut consider = |x: f64, v: f64| {
        let r = v / envelope(x);
        if r < worst.0 {
            worst = (r, x);
        }
    };
    for (i, (&x, &v)) in xs.iter().zip(&m).enumerate() {
        consider(x, v);
        let interior = i > 0 && i + 1 < xs.len();
        if interior && v < m[i - 1] && v <= m[i + 1] {
            let t = golden(one, xs[i - 1], xs[i + 1], 1e-12 * (1.0 + x.abs()));
            consider(t, one(t));
        }
    }
    let (ratio, witness) = worst;
    Ok(if ratio >= WIENER_THRESHOLD {
        WienerVerdict::Holds { min_ratio: ratio }
    } else {
        WienerVerdict::Fails { witness, ratio }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_values() {
        let g = Window::gaussian();
        assert!((window_ft_complex(&g, 0.0, 0.0).unwrap() - 1.0).norm() < 1e-15);
        assert!((window_ft_complex(&g, 0.0, 1.0).unwrap().re - 1.0828294447511205).abs() < 1e-14);
        let q = QuadratureSpec::default();
        for xi in [-1.0, 0.0, 1.0] {
            for b in [0.0, 1.0, -2.0] {
                let closed = window_ft_complex(&g, xi, b).unwrap();
                let quad = window_ft_quadrature(&g, &Frequencies::single(xi), b, &q).unwrap()[0];
                assert!((closed - quad).norm() < 1e-10, "xi={xi} b={b}");
            }
        }
    }

    #[test]
    fn lorentzian_needs_b_zero() {
        let l = Window::lorentzian();
        assert!((window_ft_complex(&l, 0.0, 0.0).unwrap().re - PI).abs() < 1e-15);
        assert!(matches!(window_ft_complex(&l, 0.0, 0.5), Err(GaborError::Capability(_))));
    }

    fn manufactured(c: Complex64, b: f64, beta: f64) -> BTreeMap<i64, Complex64> {
        let g = Window::gaussian();
        (-4..=4)
            .map(|n| (n, c * window_ft_complex(&g, -beta * n as f64, b).unwrap().conj()))
            .collect()
    }

    #[test]
    fn recovers_manufactured_constants() {
        let q = QuadratureSpec::default();
        for beta in [0.5, 1.0] {
            let a = manufactured(Complex64::new(1.0, 0.0), 1.0, beta);
            let fit = solve_asymptote_constants(&a, &Window::gaussian(), beta, &SolveOptions::default(), &q).unwrap();
            assert!((fit.b - 1.0).abs() < 1e-6, "beta={beta}: b={}", fit.b);
            assert!((fit.c - 1.0).norm() < 1e-6);
            assert!(fit.residual < 1e-10);
        }
    }

    #[test]
    fn zero_and_inconsistent_limits() {
        let q = QuadratureSpec::default();
        let g = Window::gaussian();
        let zeros: BTreeMap<i64, Complex64> = (-2..=2).map(|n| (n, Complex64::new(0.0, 0.0))).collect();
        let fit = solve_asymptote_constants(&zeros, &g, 0.5, &SolveOptions::default(), &q).unwrap();
        assert_eq!((fit.c, fit.b, fit.residual), (Complex64::new(0.0, 0.0), 0.0, 0.0));
        let mut bad = zeros.clone();
        bad.insert(1, Complex64::new(0.3, 0.0));
        assert!(matches!(
            solve_asymptote_constants(&bad, &g, 0.5, &SolveOptions::default(), &q),
            Err(GaborError::Inconsistent(_))
        ));
    }

    #[test]
    fn wiener_gaussian_holds_and_two_gaussian_fails() {
        let q = QuadratureSpec::default();
        for b in [0.0, 1.0, 2.0] {
            let g = Window::gaussian();
            let grid = default_wiener_grid(&g, b, &q).unwrap();
            assert!(wiener_condition_check(&g, b, &grid, &q).unwrap().holds());
        }
        let w = Window::two_gaussian();
        let grid = default_wiener_grid(&w, 0.0, &q).unwrap();
        match wiener_condition_check(&w, 0.0, &grid, &q).unwrap() {
            WienerVerdict::Fails { witness, .. } => {
                assert!((witness.abs() - 0.81357654861601977).abs() < 1e-6, "witness {witness}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
