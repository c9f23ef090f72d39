use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bounds::FrameBounds;
use super::walnut::WalnutOperator;
use super::{validate_lattice, LatticeVerdict};
use crate::error::{GaborError, Result};
use crate::growth::fit::{fit_line, fit_quadratic};
use crate::model::{Lattice, UniformTable, Window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DualConfig {
    /// Sup-norm target for `ψ − Sγ` on the sample grid.
    pub tol: f64,
    pub max_iterations: usize,
    /// Run even when the lattice is rejected for the window.
    pub force: bool,
    /// Required `|γ|` at the table edges, relative to its peak.
    pub edge_tol: f64,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig {
            tol: 1e-8,
            max_iterations: 200,
            force: false,
            edge_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualWindow {
    pub base: Window,
    /// `γ` as a tabulated window.
    pub gamma: Window,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub bounds: FrameBounds,
    /// Geometric-mean residual ratio over the run.
    pub contraction: f64,
    /// `max |γ|` at the two table ends over `max |γ|`.
    pub edge_ratio: f64,
}

impl DualWindow {
    pub fn table(&self) -> &UniformTable {
        self.gamma.table().expect("dual windows are tabulated")
    }

    pub fn matches(&self, lat: &Lattice) -> bool {
        self.alpha == lat.alpha && self.beta == lat.beta
    }
}

struct Solve {
    gamma: Vec<Complex64>,
    iterations: usize,
    history: Vec<f64>,
}

/// Frame algorithm `γ ← γ + λ(ψ − Sγ)`, `λ = 2/(A+B)`.
fn richardson(op: &WalnutOperator, psi: &[Complex64], bounds: &FrameBounds, cfg: &DualConfig) -> Result<Solve> {
    let relax = 2.0 / (bounds.a + bounds.b);
    let mut gamma: Vec<Complex64> = psi.iter().map(|p| p * relax).collect();
    let mut history = Vec::new();
    for it in 0..=cfg.max_iterations {
        let s = op.apply(&gamma);
        let r: Vec<Complex64> = psi.iter().zip(&s).map(|(p, s)| p - s).collect();
        let res = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        history.push(res);
        if !res.is_finite() {
            return Err(GaborError::Numeric("dual iteration diverged".into()));
        }
        if res <= cfg.tol {
            return Ok(Solve {
                gamma,
                iterations: it,
                history,
            });
        }
        if it == cfg.max_iterations {
            break;
        }
        gamma.iter_mut().zip(&r).for_each(|(g, r)| *g += r * relax);
    }
    Err(GaborError::NonConvergence {
        iterations: cfg.max_iterations,
        last_residual: *history.last().expect("at least one residual"),
        residual_history: history,
    })
}

/// Canonical dual `γ = S⁻¹ψ`, tabulated with step `≤ α/16` on a symmetric
/// interval grown until `|γ|` is negligible at the edges.
pub fn compute_dual_window(psi: &Window, lat: &Lattice, bounds: &FrameBounds, cfg: &DualConfig) -> Result<DualWindow> {
    lat.validate()?;
    if let LatticeVerdict::Rejected(reason) = validate_lattice(psi, lat) {
        if !cfg.force {
            return Err(GaborError::Precondition(reason));
        }
    }
    if !(bounds.a > 0.0 && bounds.b >= bounds.a) {
        return Err(GaborError::Precondition(format!(
            "frame bounds must satisfy 0 < A <= B, got A={}, B={}",
            bounds.a, bounds.b
        )));
    }
    let (lo, hi) = psi.support_offsets(1e-17, 0.0)?;
    let rho = lo.abs().max(hi.abs());
    let mut half = (3.0 * rho).max(8.0);
    let mut attempt = 0;
    loop {
        let op = WalnutOperator::new(psi, lat.alpha, lat.beta, None, -half, half)?;
        let psi_s = op.sample(|t| psi.eval(t));
        let solve = richardson(&op, &psi_s, bounds, cfg)?;
        let peak = solve.gamma.iter().map(|g| g.norm()).fold(0.0, f64::max);
        let edge = solve.gamma[0].norm().max(solve.gamma[solve.gamma.len() - 1].norm());
        let edge_ratio = if peak > 0.0 { edge / peak } else { 0.0 };
        attempt += 1;
        if edge_ratio <= cfg.edge_tol || attempt >= 6 {
            let h = &solve.history;
            let contraction = if h.len() > 1 && h[0] > 0.0 && *h.last().unwrap() > 0.0 {
                (h.last().unwrap() / h[0]).powf(1.0 / (h.len() - 1) as f64)
            } else {
                0.0
            };
            let table = UniformTable::new(op.abscissa(0), op.step(), solve.gamma)?;
            return Ok(DualWindow {
                base: psi.clone(),
                gamma: Window::tabulated(format!("dual({})", psi.name()), table)?,
                alpha: lat.alpha,
                beta: lat.beta,
                iterations: solve.iterations,
                residual: *h.last().unwrap(),
                residual_history: solve.history,
                bounds: *bounds,
                contraction,
                edge_ratio,
            });
        }
        half *= 1.5;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayFlag {
    Exponential,
    SuperExponential,
    PolynomialOnly,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// `-slope` of `log|γ|` against `|t|`; positive means exponential decay.
    pub rate: f64,
    pub flag: DecayFlag,
    pub rms: f64,
    pub points: usize,
}

/// Decay of a tabulated function from its outer half, fitted on the
/// monotone envelope `max_{|s| ≥ |t|} |γ(s)|` so isolated zeros do not bias
/// the log fit.
pub fn verify_table_decay(table: &UniformTable) -> DecayFit {
    let mut pts: Vec<(f64, f64)> = (0..table.len())
        .map(|i| (table.abscissa(i).abs(), table.values()[i].norm()))
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut running = 0.0f64;
    let mut env: Vec<(f64, f64)> = pts
        .into_iter()
        .map(|(t, v)| {
            running = running.max(v);
            (t, running)
        })
        .collect();
    env.reverse();
    let peak = table.max_abs();
    let inconclusive = DecayFit {
        rate: 0.0,
        flag: DecayFlag::Inconclusive,
        rms: 0.0,
        points: 0,
    };
    if peak == 0.0 || env.iter().all(|&(_, v)| v >= 1e-6 * peak) {
        return inconclusive;
    }
    let extent = env.last().map(|p| p.0).unwrap_or(0.0);
    let floor = 1e-13 * peak;
    let (xs, ys): (Vec<f64>, Vec<f64>) = env
        .iter()
        .filter(|&&(t, v)| t >= 0.5 * extent && v > floor)
        .map(|&(t, v)| (t, v.ln()))
        .unzip();
    let Some(lin) = fit_line(&xs, &ys) else {
        return inconclusive;
    };
    if xs.len() < 8 {
        return inconclusive;
    }
    let logs: Vec<f64> = xs.iter().map(|t| t.ln()).collect();
    let pow = fit_line(&logs, &ys);
    let quad = fit_quadratic(&xs, &ys);
    let flag = match (pow, quad) {
        (Some(p), _) if p.rms < lin.rms => DecayFlag::PolynomialOnly,
        (_, Some((c, q_rms))) if c[2] < 0.0 && q_rms < 0.1 * lin.rms => DecayFlag::SuperExponential,
        _ if lin.slope < 0.0 => DecayFlag::Exponential,
        _ => DecayFlag::PolynomialOnly,
    };
    DecayFit {
        rate: -lin.slope,
        flag,
        rms: lin.rms,
        points: xs.len(),
    }
}

pub fn verify_dual_decay(dual: &DualWindow) -> DecayFit {
    verify_table_decay(dual.table())
}
