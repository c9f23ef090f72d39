//! Short-time Fourier transform, lattice sampling, synthesis and the
//! coefficient-level pairing.

pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::growth::{classify_grid_growth, GrowthClass};
use crate::model::{CoefficientGrid, Lattice, SignalModel, Window};
pub use quadrature::{Frequencies, QuadratureSpec};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `V_ψf(x, ξ)` for every `ξ` of a progression at fixed `x`.
pub fn stft_row(
    f: &SignalModel,
    psi: &Window,
    x: f64,
    freqs: &Frequencies,
    q: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    if let Some(masses) = f.masses() {
        return Ok((0..freqs.count)
            .map(|j| {
                let xi = freqs.get(j);
                masses
                    .iter()
                    .map(|m| {
                        m.weight
                            * psi.eval(m.location - x).conj()
                            * Complex64::from_polar(1.0, -2.0 * PI * xi * m.location)
                    })
                    .sum()
            })
            .collect());
    }
    q.validate()?;
    let (lo, hi) = match (q.support_cutoff, psi.table()) {
        (Some(r), None) => (-r, r),
        _ => psi.support_offsets(q.envelope_eps(), f.growth_rate())?,
    };
    let support = f.support();
    let a = (x + lo).max(support.lo);
    let b = (x + hi).min(support.hi);
    if !(b > a) {
        return Ok(vec![zero(); freqs.count]);
    }
    let mut points = f.breakpoints(a, b);
    psi.breakpoints(x, a, b, &mut points);
    let segments = quadrature::split_segments(a, b, points);
    let expr = f.expr().expect("function-like signal");
    let integrand = |t: f64| expr.eval(t) * psi.eval(t - x).conj();
    quadrature::integrate_oscillatory(&segments, &integrand, freqs, q, x)
}

/// `V_ψf(x, ξ) = ∫ f(t) conj(ψ(t-x)) e^{-2πiξt} dt`; exact for point masses.
pub fn stft_point(f: &SignalModel, psi: &Window, x: f64, xi: f64, q: &QuadratureSpec) -> Result<Complex64> {
    Ok(stft_row(f, psi, x, &Frequencies::single(xi), q)?[0])
}

fn lattice_frequencies(lat: &Lattice) -> Frequencies {
    Frequencies {
        start: lat.beta * lat.n_range.lo as f64,
        step: lat.beta,
        count: lat.n_range.len(),
    }
}

/// `c_{k,n} = V_ψf(αk, βn)` over the lattice ranges, rows in parallel.
pub fn gabor_coefficients(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    q: &QuadratureSpec,
) -> Result<CoefficientGrid> {
    lat.validate()?;
    let freqs = lattice_frequencies(lat);
    let rows: Vec<Vec<Complex64>> = lat
        .k_range
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            stft_row(f, psi, lat.alpha * k as f64, &freqs, q).map_err(|e| {
                let n = match &e {
                    GaborError::Quadrature { xi, .. } => format!("{}", (xi / lat.beta).round() as i64),
                    _ => "*".into(),
                };
                e.at(format!("lattice node (k={k}, n={n})"))
            })
        })
        .collect::<Result<_>>()?;
    CoefficientGrid::new(*lat, rows.concat(), f.id(), psi.name())
}

/// Magnitudes of the outermost index shells in a synthesized sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// `sup_t` of the `k ∈ {k_min, k_max}` terms.
    pub k_shell: f64,
    /// `sup_t` of the `n ∈ {n_min, n_max}` terms with interior `k`.
    pub n_shell: f64,
    /// `sup_t` of the whole outermost shell.
    pub outer_shell: f64,
    /// `outer_shell / sup_t |full sum|` (absolute when the sum vanishes).
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub samples: Vec<Complex64>,
    pub tail: TailEstimate,
}

/// `Σ_{k,n} c_{k,n} e^{2πiβnt} γ(t - αk)` at each point, with the outer-shell
/// contribution reported separately.
pub fn synthesize(grid: &CoefficientGrid, gamma: &Window, eval_points: &[f64]) -> Result<SynthesisResult> {
    let lat = *grid.lattice();
    if lat.k_range.shell_count() >= 8 && lat.n_range.shell_count() >= 8 && !grid.is_all_zero() {
        if let Ok(est) = classify_grid_growth(grid) {
            if est.class == GrowthClass::Unclassified {
                return Err(GaborError::Precondition(
                    "grid grows faster than exponential-polynomial; synthesis refused".into(),
                ));
            }
        }
    }
    let (lo, hi) = gamma.support_offsets(1e-20, 0.0)?;
    let (k_lo, k_hi) = (lat.k_range.lo, lat.k_range.hi);
    let (n_lo, n_hi) = (lat.n_range.lo, lat.n_range.hi);
    let width = lat.n_range.len();
    let per_point: Vec<(Complex64, Complex64, Complex64)> = eval_points
        .par_iter()
        .map(|&t| {
            let mut phases = Vec::with_capacity(width);
            let mut ph = Complex64::from_polar(1.0, 2.0 * PI * lat.beta * n_lo as f64 * t);
            let rot = Complex64::from_polar(1.0, 2.0 * PI * lat.beta * t);
            for _ in 0..width {
                phases.push(ph);
                ph *= rot;
            }
            let k_first = (((t - hi) / lat.alpha).floor() as i64).max(k_lo);
            let k_last = (((t - lo) / lat.alpha).ceil() as i64).min(k_hi);
            let (mut total, mut k_shell, mut n_shell) = (zero(), zero(), zero());
            for k in k_first..=k_last {
                let g = gamma.eval(t - lat.alpha * k as f64);
                if g == zero() {
                    continue;
                }
                let row = grid.row(k);
                let s: Complex64 = row.iter().zip(&phases).map(|(c, p)| c * p).sum();
                total += g * s;
                if k == k_lo || k == k_hi {
                    k_shell += g * s;
                } else {
                    let mut edge = row[0] * phases[0];
                    if n_hi != n_lo {
                        edge += row[width - 1] * phases[width - 1];
                    }
                    n_shell += g * edge;
                }
            }
            (total, k_shell, n_shell)
        })
        .collect();
    let samples: Vec<Complex64> = per_point.iter().map(|p| p.0).collect();
    let sup = |f: &dyn Fn(&(Complex64, Complex64, Complex64)) -> f64| {
        per_point.iter().map(f).fold(0.0, f64::max)
    };
    let k_shell = sup(&|p| p.1.norm());
    let n_shell = sup(&|p| p.2.norm());
    let outer_shell = sup(&|p| (p.1 + p.2).norm());
    let scale = sup(&|p| p.0.norm());
    Ok(SynthesisResult {
        samples,
        tail: TailEstimate {
            k_shell,
            n_shell,
            outer_shell,
            relative: if scale > 0.0 { outer_shell / scale } else { outer_shell },
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub value: Complex64,
    /// Largest `|c^f|` on the outermost shell of `grid_f`.
    pub tail_f: f64,
    /// Largest `|c^φ|` on the outermost shell of `grid_phi`.
    pub tail_phi: f64,
    /// `|Σ|` restricted to the outermost shell.
    pub shell_contribution: f64,
}

/// `Σ_{k,n} c^ψ_{k,n}(f) · V_{conj γ}φ(αk, -βn)`; `grid_phi` holds
/// `V_{conj γ}φ(αk, βn)` on the same lattice and is reflected here.
pub fn dual_pairing(grid_f: &CoefficientGrid, grid_phi: &CoefficientGrid) -> Result<PairingResult> {
    let lat = grid_f.lattice();
    if lat != grid_phi.lattice() {
        return Err(GaborError::Usage("pairing grids must share one lattice".into()));
    }
    if lat.n_range.lo != -lat.n_range.hi {
        return Err(GaborError::Usage(
            "pairing needs a symmetric frequency range for the index reflection".into(),
        ));
    }
    let on_shell = |k: i64, n: i64| {
        k == lat.k_range.lo || k == lat.k_range.hi || n == lat.n_range.lo || n == lat.n_range.hi
    };
    let (mut value, mut shell) = (zero(), zero());
    let (mut tail_f, mut tail_phi) = (0.0f64, 0.0f64);
    for (k, n, c) in grid_f.iter() {
        let term = c * grid_phi.get(k, -n);
        value += term;
        if on_shell(k, n) {
            shell += term;
            tail_f = tail_f.max(c.norm());
            tail_phi = tail_phi.max(grid_phi.get(k, n).norm());
        }
    }
    Ok(PairingResult {
        value,
        tail_f,
        tail_phi,
        shell_contribution: shell.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_self_stft_at_origin() {
        let g = SignalModel::gaussian();
        let v = stft_point(&g, &Window::gaussian(), 0.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert!((v.re - 0.707_106_781_186_547_5).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn point_mass_is_exact() {
        let d = SignalModel::dirac(0.0);
        let v = stft_point(&d, &Window::gaussian(), 0.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn zero_signal_gives_zero_grid() {
        let lat = Lattice::symmetric(1.0, 1.0, 3, 3).unwrap();
        let grid =
            gabor_coefficients(&SignalModel::zero(), &Window::gaussian(), &lat, &QuadratureSpec::default())
                .unwrap();
        assert!(grid.is_all_zero());
    }

    #[test]
    fn single_coefficient_reproduces_window() {
        let lat = Lattice::symmetric(0.5, 0.5, 2, 2).unwrap();
        let grid = CoefficientGrid::from_fn(lat, "unit", |k, n| {
            Complex64::new(if k == 0 && n == 0 { 1.0 } else { 0.0 }, 0.0)
        })
        .unwrap();
        let pts = [-1.0, -0.2, 0.0, 0.7];
        let out = synthesize(&grid, &Window::gaussian(), &pts).unwrap();
        for (t, v) in pts.iter().zip(&out.samples) {
            assert!((v - Window::gaussian().eval(*t)).norm() < 1e-15);
        }
    }

    #[test]
    fn pairing_rejects_mismatched_lattices() {
        let a = CoefficientGrid::zeros(Lattice::symmetric(1.0, 1.0, 2, 2).unwrap());
        let b = CoefficientGrid::zeros(Lattice::symmetric(0.5, 1.0, 2, 2).unwrap());
        assert!(matches!(dual_pairing(&a, &b), Err(GaborError::Usage(_))));
        assert_eq!(dual_pairing(&a, &a).unwrap().value, zero());
    }
}
