//! Tauberian pipelines: S-asymptotics from lattice STFT limits, the
//! monotone-function theorem, the Wiener-kernel theorem and the solver for
//! the constants of the limit `Ce^{bx}`.

pub mod constants;
pub mod limits;
mod theorems;

pub use constants::{
    default_wiener_grid, predicted_shape, solve_asymptote_constants, wiener_condition_check, window_ft_complex,
    window_ft_quadrature, window_ft_row, ConstantsFit, SolveOptions, WienerVerdict, WIENER_THRESHOLD,
};
pub use limits::{
    default_probe_grid, sasymp_coefficient_limits, tauberian_bound_check, translation_net, CoefficientLimits,
    NodeLimit, ScheduleOptions, TauberianBound, MIN_SCHEDULE, STABILITY_RATIO,
};
pub use theorems::{monotone_tauberian, net_schedule, verify_sasymptotics, wiener_tauberian};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::frame::{BoundsOptions, DualConfig};
use crate::growth::NetConfig;
use crate::model::IndexRange;
use crate::stft::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub schedule: ScheduleOptions,
    pub solve: SolveOptions,
    pub quadrature: QuadratureSpec,
    /// Largest normalized constants-solve residual of an s-asymptotic verdict.
    pub solve_tol: f64,
    /// Run the translation-net route next to the direct one.
    pub cross_validate: bool,
    pub net_members: usize,
    pub net: NetConfig,
    /// Where the synthesized net limit is compared with `Ce^{bx}`.
    pub synthesis_points: Vec<f64>,
    pub synthesis_tol: f64,
    pub bounds: BoundsOptions,
    pub dual: DualConfig,
    /// Analyse lattices the density test rejects.
    pub force: bool,
    /// Largest relative gap between the two sides of the monotone theorem.
    pub monotone_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            schedule: ScheduleOptions::default(),
            solve: SolveOptions::default(),
            quadrature: QuadratureSpec::default(),
            solve_tol: 1e-3,
            cross_validate: true,
            net_members: 8,
            net: NetConfig::default(),
            synthesis_points: vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            synthesis_tol: 0.02,
            bounds: BoundsOptions::default(),
            dual: DualConfig::default(),
            force: false,
            monotone_tol: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SAsymptotic,
    Inconclusive,
    Rejected,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::SAsymptotic => "s-asymptotic",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Rejected => "rejected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "t41")]
    Translation,
    #[serde(rename = "t42")]
    Monotone,
    #[serde(rename = "t43")]
    Wiener,
}

impl Theorem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::Translation => "t41",
            Theorem::Monotone => "t42",
            Theorem::Wiener => "t43",
        }
    }
}

/// Outcome of the translation-net cross-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRoute {
    /// `converged`, `not-cauchy`, `unbounded`, `escaping-mass` or `quadrature-failure`.
    pub status: String,
    pub converged: bool,
    pub h_schedule: Vec<f64>,
    pub worst_node: Option<(i64, i64)>,
    pub max_tail_delta: Option<f64>,
    /// `sup |Σa_{k,n}M_{βn}T_{αk}γ − Ce^{bx}| / sup |Ce^{bx}|` on the synthesis points.
    pub limit_synthesis_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneSides {
    /// `a_0 / ∫ψ(t)e^{bt}dt`.
    pub predicted_limit: Complex64,
    /// Tail average of `f(x)/(e^{bx}L(e^x))`.
    pub direct_ratio: Complex64,
    pub direct_converged: bool,
    /// `|predicted − direct| / |predicted|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Verdict of the limits plus the bound check alone.
    pub direct_verdict: Option<Verdict>,
    pub route_agreement: Option<bool>,
    pub solve_residual: Option<f64>,
    pub max_constant_deviation: Option<f64>,
    pub bound: Option<TauberianBound>,
    pub net: Option<NetRoute>,
    pub wiener: Option<WienerVerdict>,
    pub monotone: Option<MonotoneSides>,
    /// `a_0e^{-b²/4π}` for the standard Gaussian window.
    pub gaussian_closed_form: Option<Complex64>,
    /// The frequencies actually checked; finitely many of the required `n ∈ ℤ`.
    pub n_range: Option<IndexRange>,
    pub schedule_end: Option<f64>,
    pub stopped: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEntry {
    pub n: i64,
    pub value: Complex64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub verdict: Verdict,
    pub c: Complex64,
    pub b: f64,
    /// Exponent of the Tauberian bound; `None` when it was not established.
    pub tau: Option<f64>,
    pub theorem: Theorem,
    /// Description of the comparison function.
    pub comparison: String,
    pub a_n: Vec<LimitEntry>,
    pub diagnostics: Diagnostics,
    /// Schedule and trajectories behind `a_n`.
    pub limits: Option<CoefficientLimits>,
}

impl AsymptoticReport {
    pub(crate) fn new(theorem: Theorem, comparison: String) -> Self {
        AsymptoticReport {
            verdict: Verdict::Inconclusive,
            c: Complex64::new(0.0, 0.0),
            b: 0.0,
            tau: None,
            theorem,
            comparison,
            a_n: Vec::new(),
            diagnostics: Diagnostics::default(),
            limits: None,
        }
    }

    pub fn a(&self, n: i64) -> Option<Complex64> {
        self.a_n.iter().find(|e| e.n == n).map(|e| e.value)
    }

    /// `(x, n, g_n(x))` rows for plotting.
    pub fn trajectory_rows(&self) -> Vec<(f64, i64, Complex64)> {
        self.limits.as_ref().map(|l| l.trajectory_rows()).unwrap_or_default()
    }

    /// The external JSON layout.
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.as_str(),
            "C": {"re": self.c.re, "im": self.c.im},
            "b": self.b,
            "tau": self.tau,
            "theorem": self.theorem.as_str(),
            "comparison": self.comparison,
            "a_n": self.a_n.iter().map(|e| json!({
                "n": e.n,
                "re": e.value.re,
                "im": e.value.im,
                "residual": e.residual,
                "converged": e.converged,
            })).collect::<Vec<_>>(),
            "diagnostics": serde_json::to_value(&self.diagnostics).expect("diagnostics serialize"),
        })
    }
}
