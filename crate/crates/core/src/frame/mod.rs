//! Gabor frames: lattice admissibility, the frame operator, bound estimates,
//! the canonical dual window and roundtrip reconstruction.

pub mod bounds;
pub mod dual;
pub mod walnut;

pub use bounds::{estimate_frame_bounds, probe_signals, BoundsMethod, BoundsOptions, FrameBounds};
pub use dual::{
    compute_dual_window, verify_dual_decay, verify_table_decay, DecayFit, DecayFlag, DualConfig, DualWindow,
};
pub use walnut::WalnutOperator;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::model::{DecayClass, Lattice, SignalModel, Window};
use crate::stft::{gabor_coefficients, synthesize, QuadratureSpec, TailEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "kebab-case")]
pub enum LatticeVerdict {
    Ok,
    OkWithWarning(String),
    Rejected(String),
}

impl LatticeVerdict {
    pub fn is_rejected(&self) -> bool {
        matches!(self, LatticeVerdict::Rejected(_))
    }
}

/// Density test: Gaussians generate frames iff `αβ < 1`; for other windows
/// `αβ ≥ 1` is excluded and `αβ < 1` is only necessary.
pub fn validate_lattice(psi: &Window, lat: &Lattice) -> LatticeVerdict {
    let d = lat.density_product();
    if psi.gaussian_rate().is_some() {
        return if d < 1.0 {
            LatticeVerdict::Ok
        } else {
            LatticeVerdict::Rejected(format!(
                "Gaussian windows generate a frame only when alpha*beta < 1 (Balian-Low); got {d}"
            ))
        };
    }
    if d >= 1.0 {
        let what = match psi.decay_class() {
            DecayClass::NumericOnly => "tabulated",
            _ => "smooth, decaying",
        };
        return LatticeVerdict::Rejected(format!(
            "a {what} window cannot generate a frame at alpha*beta = {d} >= 1 (Balian-Low)"
        ));
    }
    LatticeVerdict::OkWithWarning(format!(
        "alpha*beta = {d} < 1 is necessary but not sufficient for `{}`; rely on the bound estimate",
        psi.name()
    ))
}

/// Truncated `Sf = Σ V_ψf(αk,βn) M_{βn}T_{αk}ψ` at the given points.
pub fn frame_operator_apply(
    psi: &Window,
    lat: &Lattice,
    f: &SignalModel,
    q: &QuadratureSpec,
    eval_points: &[f64],
) -> Result<Vec<Complex64>> {
    let grid = gabor_coefficients(f, psi, lat, q)?;
    Ok(synthesize(&grid, psi, eval_points)?.samples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub samples: Vec<Complex64>,
    pub reference: Vec<Complex64>,
    /// `sup|D − f| / sup|f|`, absolute when `f` vanishes on the points.
    pub relative_error: f64,
    pub tail: TailEstimate,
}

fn compare(samples: Vec<Complex64>, f: &SignalModel, points: &[f64], tail: TailEstimate) -> Result<ReconstructionResult> {
    let reference: Vec<Complex64> = points
        .iter()
        .map(|&t| {
            f.eval(t)
                .ok_or_else(|| GaborError::Capability("point masses have no pointwise reference".into()))
        })
        .collect::<Result<_>>()?;
    let diff = samples.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = reference.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(ReconstructionResult {
        samples,
        reference,
        relative_error: if scale > 0.0 { diff / scale } else { diff },
        tail,
    })
}

fn check_dual(dual: &DualWindow, lat: &Lattice) -> Result<()> {
    if !dual.matches(lat) {
        return Err(GaborError::Usage(format!(
            "dual window was computed for (alpha, beta) = ({}, {}), lattice has ({}, {})",
            dual.alpha, dual.beta, lat.alpha, lat.beta
        )));
    }
    Ok(())
}

/// `D_γ C_ψ f` at the points, against direct evaluation of `f`.
pub fn reconstruct(
    f: &SignalModel,
    psi: &Window,
    dual: &DualWindow,
    lat: &Lattice,
    eval_points: &[f64],
    q: &QuadratureSpec,
) -> Result<ReconstructionResult> {
    check_dual(dual, lat)?;
    let grid = gabor_coefficients(f, psi, lat, q)?;
    let out = synthesize(&grid, &dual.gamma, eval_points)?;
    compare(out.samples, f, eval_points, out.tail)
}

/// The other half of the expansion: `D_ψ C_γ f`.
pub fn reconstruct_mixed(
    f: &SignalModel,
    psi: &Window,
    dual: &DualWindow,
    lat: &Lattice,
    eval_points: &[f64],
    q: &QuadratureSpec,
) -> Result<ReconstructionResult> {
    check_dual(dual, lat)?;
    let grid = gabor_coefficients(f, &dual.gamma, lat, q)?;
    let out = synthesize(&grid, psi, eval_points)?;
    compare(out.samples, f, eval_points, out.tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_density_rule() {
        let g = Window::gaussian();
        let lat = |a, b| Lattice::symmetric(a, b, 4, 4).unwrap();
        assert_eq!(validate_lattice(&g, &lat(0.7, 0.7)), LatticeVerdict::Ok);
        assert!(validate_lattice(&g, &lat(1.0, 1.0)).is_rejected());
        assert_eq!(validate_lattice(&g, &lat(2.0, 0.49)), LatticeVerdict::Ok);
    }

    #[test]
    fn other_windows_get_warnings() {
        let w = Window::two_gaussian();
        let lat = Lattice::symmetric(0.5, 0.5, 4, 4).unwrap();
        assert!(matches!(validate_lattice(&w, &lat), LatticeVerdict::OkWithWarning(_)));
        let crit = Lattice::symmetric(1.0, 1.0, 4, 4).unwrap();
        assert!(validate_lattice(&w, &crit).is_rejected());
    }
}
