use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::growth::fit::fit_line;
use crate::model::{ComparisonFunction, GrowthHint, IndexRange, Lattice, SignalModel, Window};
use crate::stft::{stft_row, Frequencies, QuadratureSpec};

/// Knobs shared by every limit extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleOptions {
    /// First point of the geometric schedule.
    pub x_start: f64,
    pub x_growth: f64,
    /// Hard cap on the schedule.
    pub x_cap: f64,
    /// Largest `|ln c(x)|` and `growth·x` the schedule may reach.
    pub ln_limit: f64,
    /// Fraction of the schedule averaged for the limit.
    pub tail_fraction: f64,
    /// Relative tolerance between the means of the two tail halves.
    pub cauchy_tol: f64,
    /// Absolute slack of the Cauchy test, relative to the largest `|g_n|` seen.
    pub floor_rel: f64,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions {
            x_start: 2.0,
            x_growth: 1.3,
            x_cap: 1e4,
            ln_limit: 600.0,
            tail_fraction: 0.25,
            cauchy_tol: 1e-3,
            floor_rel: 1e-9,
        }
    }
}

/// Fewest schedule points that still leave a usable tail.
pub const MIN_SCHEDULE: usize = 8;

impl ScheduleOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.x_start > 0.0
            && self.x_growth > 1.0
            && self.x_cap > self.x_start
            && self.ln_limit > 0.0
            && self.tail_fraction > 0.0
            && self.tail_fraction <= 0.5
            && self.cauchy_tol > 0.0
            && self.floor_rel >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(GaborError::Config(format!("invalid schedule options {self:?}")))
        }
    }

    /// `x_j = x_start·growth^j`, stopped before `c` or the signal's growth
    /// would leave floating-point range. Polynomial signals stay in range.
    pub fn schedule(&self, f: &SignalModel, c: &ComparisonFunction) -> Vec<f64> {
        let growth = match f.growth_hint() {
            GrowthHint::PolynomialType | GrowthHint::CompactSupport => 0.0,
            _ => f.growth_rate(),
        };
        let mut out = Vec::new();
        let mut x = self.x_start;
        while x <= self.x_cap && c.ln_eval(x).abs() <= self.ln_limit && growth * x <= self.ln_limit {
            out.push(x);
            x *= self.x_growth;
        }
        out
    }
}

/// `h ↦ f(·+h)/c(h)`.
pub fn translation_net(f: &SignalModel, c: &ComparisonFunction, h_schedule: &[f64]) -> Result<Vec<(f64, SignalModel)>> {
    if h_schedule.iter().any(|h| !(*h > 0.0 && h.is_finite())) || h_schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GaborError::Usage("translation schedule must be positive and strictly increasing".into()));
    }
    Ok(h_schedule
        .iter()
        .map(|&h| {
            let scale = (-c.ln_eval(h)).exp();
            let fh = f.translate(-h).scale(Complex64::new(scale, 0.0));
            (h, fh.with_id(format!("{}(.+{h})/c({h})", f.id())))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLimit {
    pub n: i64,
    /// Mean of the tail, the extrapolated limit.
    pub value: Complex64,
    /// Largest deviation of a tail value from `value`.
    pub residual: f64,
    pub converged: bool,
    /// `g_n` along the schedule.
    pub trajectory: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLimits {
    /// Schedule points actually evaluated.
    pub schedule: Vec<f64>,
    /// Why evaluation stopped before the requested schedule ended.
    pub stopped: Option<String>,
    pub limits: Vec<NodeLimit>,
}

impl CoefficientLimits {
    pub fn all_converged(&self) -> bool {
        !self.limits.is_empty() && self.limits.iter().all(|l| l.converged)
    }

    pub fn get(&self, n: i64) -> Option<&NodeLimit> {
        self.limits.iter().find(|l| l.n == n)
    }

    /// `(x, n, g_n(x))` rows, `n`-major.
    pub fn trajectory_rows(&self) -> Vec<(f64, i64, Complex64)> {
        self.limits
            .iter()
            .flat_map(|l| self.schedule.iter().zip(&l.trajectory).map(move |(&x, &v)| (x, l.n, v)))
            .collect()
    }
}

/// Evaluates `row(x)` along the schedule in parallel chunks; a failure after
/// the first point truncates the schedule instead of aborting.
fn along_schedule<T: Send>(
    schedule: &[f64],
    row: impl Fn(f64) -> Result<T> + Sync,
) -> Result<(Vec<f64>, Vec<T>, Option<String>)> {
    let chunk = rayon::current_num_threads().max(1);
    let mut xs = Vec::new();
    let mut rows = Vec::new();
    for part in schedule.chunks(chunk) {
        let out: Vec<Result<T>> = part.par_iter().map(|&x| row(x)).collect();
        for (&x, r) in part.iter().zip(out) {
            match r {
                Ok(v) => {
                    xs.push(x);
                    rows.push(v);
                }
                Err(e) if xs.is_empty() => return Err(e.at(format!("schedule point x={x}"))),
                Err(e) => return Ok((xs, rows, Some(format!("stopped at x={x}: {e}")))),
            }
        }
    }
    Ok((xs, rows, None))
}

/// Tail-average extrapolation of each trajectory with the two-half Cauchy
/// acceptance test.
pub(crate) fn extrapolate(
    ns: &[i64],
    trajectories: Vec<Vec<Complex64>>,
    opts: &ScheduleOptions,
) -> Vec<NodeLimit> {
    let len = trajectories.first().map_or(0, |t| t.len());
    let scale = trajectories
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let floor = opts.floor_rel * scale;
    let tail_len = ((len as f64 * opts.tail_fraction).ceil() as usize).max(4).min(len);
    ns.iter()
        .zip(trajectories)
        .map(|(&n, traj)| {
            if len < MIN_SCHEDULE {
                return NodeLimit {
                    n,
                    value: traj.last().copied().unwrap_or_default(),
                    residual: f64::INFINITY,
                    converged: false,
                    trajectory: traj,
                };
            }
            let tail = &traj[len - tail_len..];
            let mean = |s: &[Complex64]| s.iter().sum::<Complex64>() / s.len() as f64;
            let value = mean(tail);
            let half = tail_len / 2;
            let drift = (mean(&tail[half..]) - mean(&tail[..half])).norm();
            let residual = tail.iter().map(|v| (v - value).norm()).fold(0.0, f64::max);
            NodeLimit {
                n,
                value,
                residual,
                converged: drift <= opts.cauchy_tol * value.norm() + floor,
                trajectory: traj,
            }
        })
        .collect()
}

/// `g_n(x) = e^{2πiβnx}V_ψf(x,βn)/c(x)` along the schedule for every `n` of
/// the lattice, extrapolated to `x → ∞`.
pub fn sasymp_coefficient_limits(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    x_schedule: &[f64],
    opts: &ScheduleOptions,
    q: &QuadratureSpec,
) -> Result<CoefficientLimits> {
    lat.validate()?;
    opts.validate()?;
    if x_schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GaborError::Usage("x schedule must be strictly increasing".into()));
    }
    let ns: Vec<i64> = lat.n_range.iter().collect();
    let freqs = Frequencies {
        start: lat.beta * lat.n_range.lo as f64,
        step: lat.beta,
        count: ns.len(),
    };
    let (xs, rows, stopped) = along_schedule(x_schedule, |x| {
        let row = stft_row(f, psi, x, &freqs, q)?;
        let inv_c = (-c.ln_eval(x)).exp();
        Ok(ns
            .iter()
            .zip(row)
            .map(|(&n, v)| v * Complex64::from_polar(inv_c, 2.0 * PI * lat.beta * n as f64 * x))
            .collect::<Vec<_>>())
    })?;
    let trajectories: Vec<Vec<Complex64>> = (0..ns.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    Ok(CoefficientLimits {
        limits: extrapolate(&ns, trajectories, opts),
        schedule: xs,
        stopped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum TauberianBound {
    /// `sup |V_ψf(x,βn)|/(c(x)(1+|n|)^τ)` is stable under range doubling.
    Holds { tau: f64, sup: f64, base_sup: f64 },
    /// The normalized ratio keeps growing; `(x, n)` is where it peaks.
    Violated { x: f64, n: i64, ratio: f64, base_sup: f64, tau: f64 },
}

impl TauberianBound {
    pub fn holds(&self) -> bool {
        matches!(self, TauberianBound::Holds { .. })
    }

    pub fn tau(&self) -> f64 {
        match *self {
            TauberianBound::Holds { tau, .. } | TauberianBound::Violated { tau, .. } => tau,
        }
    }
}

/// Allowed growth of the supremum when the probe range doubles.
pub const STABILITY_RATIO: f64 = 1.1;

/// `{0} ∪ {±x_start·growth^j ≤ x_max}`, sorted.
pub fn default_probe_grid(x_max: f64, opts: &ScheduleOptions) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = opts.x_start;
    while x <= x_max {
        out.push(x);
        out.push(-x);
        x *= opts.x_growth;
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Growth test of `V_ψf(x,βn)/c(x)`: `τ` is fitted from the per-`n` suprema
/// against `ln(1+|n|)` (clamped at 0), then the normalized supremum over the
/// probes and the doubled `n`-range must stay within [`STABILITY_RATIO`] of
/// the one over the half-size `x`-range and the lattice's own `n`-range.
pub fn tauberian_bound_check(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    probes: &[f64],
    q: &QuadratureSpec,
) -> Result<TauberianBound> {
    lat.validate()?;
    if probes.is_empty() {
        return Err(GaborError::Usage("the bound check needs at least one probe".into()));
    }
    let wide: IndexRange = lat.n_range.scaled(2);
    let ns: Vec<i64> = wide.iter().collect();
    let freqs = Frequencies {
        start: lat.beta * wide.lo as f64,
        step: lat.beta,
        count: ns.len(),
    };
    let rows: Vec<Vec<f64>> = probes
        .par_iter()
        .map(|&x| {
            let row = stft_row(f, psi, x, &freqs, q).map_err(|e| e.at(format!("bound probe x={x}")))?;
            let lc = c.ln_eval(x);
            Ok(row
                .iter()
                .map(|v| if v.norm() > 0.0 { v.norm().ln() - lc } else { f64::NEG_INFINITY })
                .collect())
        })
        .collect::<Result<_>>()?;

    let (mut fx, mut fy) = (Vec::new(), Vec::new());
    for (j, &n) in ns.iter().enumerate() {
        let m = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
        if m.is_finite() {
            fx.push((1.0 + n.abs() as f64).ln());
            fy.push(m);
        }
    }
    if fy.is_empty() {
        return Ok(TauberianBound::Holds {
            tau: 0.0,
            sup: 0.0,
            base_sup: 0.0,
        });
    }
    let tau = fit_line(&fx, &fy).map_or(0.0, |l| (l.slope + l.slope_se).max(0.0));

    let x_half = probes.iter().map(|x| x.abs()).fold(0.0, f64::max) / 2.0;
    let (mut base, mut full) = (f64::NEG_INFINITY, (f64::NEG_INFINITY, 0.0, 0));
    for (&x, row) in probes.iter().zip(&rows) {
        for (&n, &l) in ns.iter().zip(row) {
            let v = l - tau * (1.0 + n.abs() as f64).ln();
            if v > full.0 {
                full = (v, x, n);
            }
            if x.abs() <= x_half && lat.n_range.contains(n) {
                base = base.max(v);
            }
        }
    }
    let base_sup = base.exp();
    if full.0 <= base + STABILITY_RATIO.ln() {
        Ok(TauberianBound::Holds {
            tau,
            sup: full.0.exp(),
            base_sup,
        })
    } else {
        Ok(TauberianBound::Violated {
            x: full.1,
            n: full.2,
            ratio: full.0.exp(),
            base_sup,
            tau,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Lattice {
        Lattice::symmetric(0.5, 0.5, 20, 4).unwrap()
    }

    #[test]
    fn exp_step_translation_net_is_pointwise_exp() {
        let f = SignalModel::exp_step(1.0);
        let c = ComparisonFunction::pure_exponential(1.0).unwrap();
        let net = translation_net(&f, &c, &[5.0, 10.0]).unwrap();
        for (_, fh) in &net {
            let v = fh.eval(0.7).unwrap();
            assert!((v.re - 0.7f64.exp()).abs() < 1e-12);
        }
        assert!(translation_net(&f, &c, &[2.0, 1.0]).is_err());
    }

    #[test]
    fn schedule_respects_range() {
        let opts = ScheduleOptions::default();
        let f = SignalModel::exp_step(2.0);
        let s = opts.schedule(&f, &ComparisonFunction::pure_exponential(1.0).unwrap());
        assert!(s.len() > MIN_SCHEDULE);
        assert!(*s.last().unwrap() <= 300.0);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn zero_signal_has_zero_limits_and_tau() {
        let f = SignalModel::zero();
        let c = ComparisonFunction::pure_exponential(1.0).unwrap();
        let opts = ScheduleOptions::default();
        let q = QuadratureSpec::default();
        let lim = sasymp_coefficient_limits(&f, &Window::gaussian(), &lat(), &c, &opts.schedule(&f, &c), &opts, &q)
            .unwrap();
        assert!(lim.all_converged());
        assert!(lim.limits.iter().all(|l| l.value == Complex64::new(0.0, 0.0)));
        let b = tauberian_bound_check(&f, &Window::gaussian(), &lat(), &c, &[0.0, 1.0, -1.0], &q).unwrap();
        assert_eq!(
            b,
            TauberianBound::Holds {
                tau: 0.0,
                sup: 0.0,
                base_sup: 0.0
            }
        );
    }

    #[test]
    fn exp_step_limit_is_shifted_gaussian_integral() {
        // ∫e^{t}e^{-πt²}dt = e^{1/(4π)}.
        let f = SignalModel::exp_step(1.0);
        let c = ComparisonFunction::pure_exponential(1.0).unwrap();
        let lat = Lattice::symmetric(0.5, 1.0, 4, 2).unwrap();
        let opts = ScheduleOptions::default();
        let lim = sasymp_coefficient_limits(
            &f,
            &Window::gaussian(),
            &lat,
            &c,
            &opts.schedule(&f, &c),
            &opts,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let a0 = lim.get(0).unwrap();
        assert!(a0.converged);
        assert!((a0.value.re - 1.0828294447511205).abs() < 1e-9);
        assert!(a0.value.im.abs() < 1e-9);
    }

    #[test]
    fn faster_growth_violates_the_bound() {
        let c = ComparisonFunction::pure_exponential(1.0).unwrap();
        let opts = ScheduleOptions::default();
        let probes = default_probe_grid(40.0, &opts);
        let q = QuadratureSpec::default();
        let ok = tauberian_bound_check(&SignalModel::exp_step(1.0), &Window::gaussian(), &lat(), &c, &probes, &q)
            .unwrap();
        assert!(ok.holds());
        assert!(ok.tau() < 0.5);
        match tauberian_bound_check(&SignalModel::exp_step(2.0), &Window::gaussian(), &lat(), &c, &probes, &q)
            .unwrap()
        {
            TauberianBound::Violated { x, .. } => assert_eq!(x, *probes.last().unwrap()),
            other => panic!("expected a violation, got {other:?}"),
        }
    }
}
