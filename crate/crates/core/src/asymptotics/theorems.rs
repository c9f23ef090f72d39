use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::constants::{default_wiener_grid, solve_asymptote_constants, wiener_condition_check, window_ft_row};
use super::limits::{
    default_probe_grid, extrapolate, sasymp_coefficient_limits, tauberian_bound_check, translation_net,
    CoefficientLimits, TauberianBound,
};
use super::constants::WienerVerdict;
use super::{AnalysisConfig, AsymptoticReport, LimitEntry, MonotoneSides, NetRoute, Theorem, Verdict};
use crate::error::{GaborError, Result};
use crate::frame::{compute_dual_window, estimate_frame_bounds, validate_lattice, LatticeVerdict};
use crate::growth::{detect_net_convergence, FamilyMode, NetStatus};
use crate::model::{ComparisonFunction, IndexRange, Lattice, SignalModel, Window};
use crate::stft::{gabor_coefficients, stft_row, synthesize, Frequencies};

fn is_quadrature(e: &GaborError) -> bool {
    matches!(e.root(), GaborError::Quadrature { .. })
}

fn entries(limits: &CoefficientLimits) -> Vec<LimitEntry> {
    limits
        .limits
        .iter()
        .map(|l| LimitEntry {
            n: l.n,
            value: l.value,
            residual: l.residual,
            converged: l.converged,
        })
        .collect()
}

fn check_frame(psi: &Window, lat: &Lattice, force: bool) -> Result<()> {
    lat.validate()?;
    if let LatticeVerdict::Rejected(reason) = validate_lattice(psi, lat) {
        if !force {
            return Err(GaborError::Precondition(reason));
        }
    }
    Ok(())
}

/// Runs the bound check, turning a quadrature breakdown into `None`.
fn bound_or_note(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    x_max: f64,
    cfg: &AnalysisConfig,
    report: &mut AsymptoticReport,
) -> Result<Option<TauberianBound>> {
    let probes = default_probe_grid(x_max, &cfg.schedule);
    match tauberian_bound_check(f, psi, lat, c, &probes, &cfg.quadrature) {
        Ok(b) => {
            report.diagnostics.bound = Some(b);
            if b.holds() {
                report.tau = Some(b.tau());
            }
            Ok(Some(b))
        }
        Err(e) if is_quadrature(&e) => {
            report.diagnostics.notes.push(format!("bound check could not be evaluated: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// `h_j = α·k_max + x_start·growth^j`: every member is translated past the
/// lattice truncation.
pub fn net_schedule(lat: &Lattice, cfg: &AnalysisConfig) -> Vec<f64> {
    let base = lat.alpha * lat.k_range.max_abs() as f64;
    (0..cfg.net_members)
        .map(|j| base + cfg.schedule.x_start * cfg.schedule.x_growth.powi(j as i32))
        .collect()
}

/// The corollary route: coefficient grids of the translation net, their
/// convergence, and for a positive direct verdict the synthesized limit
/// against `Ce^{bx}`.
fn net_route(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    fit: Option<(Complex64, f64)>,
    cfg: &AnalysisConfig,
) -> Result<NetRoute> {
    let hs = net_schedule(lat, cfg);
    let mut route = NetRoute {
        status: String::new(),
        converged: false,
        h_schedule: hs.clone(),
        worst_node: None,
        max_tail_delta: None,
        limit_synthesis_error: None,
    };
    let net = translation_net(f, c, &hs)?;
    let mut grids = Vec::with_capacity(net.len());
    for (h, fh) in &net {
        match gabor_coefficients(fh, psi, lat, &cfg.quadrature) {
            Ok(g) => grids.push((*h, g)),
            Err(e) if is_quadrature(&e) => {
                route.status = "quadrature-failure".into();
                return Ok(route);
            }
            Err(e) => return Err(e),
        }
    }
    let report = detect_net_convergence(&grids, FamilyMode::ExpPol, &cfg.net)?;
    route.status = match report.status {
        NetStatus::Converged => "converged",
        NetStatus::NotCauchy => "not-cauchy",
        NetStatus::Unbounded => "unbounded",
        NetStatus::EscapingMass => "escaping-mass",
    }
    .into();
    route.converged = report.converged;
    route.worst_node = Some(report.worst_node);
    route.max_tail_delta = Some(report.max_tail_delta);
    if let (true, Some((cc, b))) = (report.converged, fit) {
        let bounds = estimate_frame_bounds(psi, lat, &cfg.quadrature, &cfg.bounds)?;
        let dual = compute_dual_window(psi, lat, &bounds, &cfg.dual)?;
        let pts = &cfg.synthesis_points;
        let syn = synthesize(&report.limit_grid, &dual.gamma, pts)?;
        let target: Vec<Complex64> = pts.iter().map(|&x| cc * (b * x).exp()).collect();
        let diff = syn.samples.iter().zip(&target).map(|(s, t)| (s - t).norm()).fold(0.0, f64::max);
        let scale = target.iter().map(|t| t.norm()).fold(0.0, f64::max);
        route.limit_synthesis_error = Some(if scale > 0.0 { diff / scale } else { diff });
    }
    Ok(route)
}

/// S-asymptotics by the lattice-limit characterization: per-`n` limits, the
/// Tauberian bound and the constants solve, cross-checked against the
/// translation-net route.
pub fn verify_sasymptotics(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    cfg: &AnalysisConfig,
) -> Result<AsymptoticReport> {
    check_frame(psi, lat, cfg.force)?;
    let mut report = AsymptoticReport::new(Theorem::Translation, c.describe());
    report.diagnostics.n_range = Some(lat.n_range);
    let schedule = cfg.schedule.schedule(f, c);
    let limits = sasymp_coefficient_limits(f, psi, lat, c, &schedule, &cfg.schedule, &cfg.quadrature)?;
    report.a_n = entries(&limits);
    report.diagnostics.schedule_end = limits.schedule.last().copied();
    report.diagnostics.stopped = limits.stopped.clone();
    let x_max = limits.schedule.last().copied().unwrap_or(cfg.schedule.x_start);
    let bound = bound_or_note(f, psi, lat, c, x_max, cfg, &mut report)?;

    let mut fit = None;
    let direct = match bound {
        Some(TauberianBound::Violated { x, n, .. }) => {
            report
                .diagnostics
                .notes
                .push(format!("Tauberian bound violated at x={x}, n={n}"));
            Verdict::Rejected
        }
        None => Verdict::Inconclusive,
        Some(TauberianBound::Holds { .. }) if limits.stopped.is_some() => {
            report
                .diagnostics
                .notes
                .push("the schedule was cut short, so the limits are not established".into());
            Verdict::Inconclusive
        }
        Some(TauberianBound::Holds { .. }) if !limits.all_converged() => {
            let bad: Vec<i64> = limits.limits.iter().filter(|l| !l.converged).map(|l| l.n).collect();
            report
                .diagnostics
                .notes
                .push(format!("limits did not settle for n in {bad:?}"));
            Verdict::Inconclusive
        }
        Some(TauberianBound::Holds { .. }) => {
            let a: BTreeMap<i64, Complex64> = limits.limits.iter().map(|l| (l.n, l.value)).collect();
            match solve_asymptote_constants(&a, psi, lat.beta, &cfg.solve, &cfg.quadrature) {
                Ok(s) => {
                    report.c = s.c;
                    report.b = s.b;
                    report.diagnostics.solve_residual = Some(s.residual);
                    report.diagnostics.max_constant_deviation = Some(s.max_deviation);
                    if s.residual <= cfg.solve_tol {
                        fit = Some((s.c, s.b));
                        Verdict::SAsymptotic
                    } else {
                        report.diagnostics.notes.push(format!(
                            "constants solve residual {:e} exceeds {:e}",
                            s.residual, cfg.solve_tol
                        ));
                        Verdict::Inconclusive
                    }
                }
                Err(GaborError::Inconsistent(m)) => {
                    report.diagnostics.notes.push(m);
                    Verdict::Rejected
                }
                Err(e) => return Err(e),
            }
        }
    };
    report.diagnostics.direct_verdict = Some(direct);
    report.verdict = direct;
    report.limits = Some(limits);

    if cfg.cross_validate {
        let route = net_route(f, psi, lat, c, fit, cfg)?;
        let net_positive = route.converged && route.limit_synthesis_error.is_none_or(|e| e <= cfg.synthesis_tol);
        let agree = (direct == Verdict::SAsymptotic) == net_positive;
        report.diagnostics.route_agreement = Some(agree);
        if !agree {
            report.diagnostics.notes.push(format!(
                "translation-net route disagrees (status {}, synthesis error {:?})",
                route.status, route.limit_synthesis_error
            ));
            if direct == Verdict::SAsymptotic {
                report.verdict = Verdict::Inconclusive;
            }
        }
        report.diagnostics.net = Some(route);
    }
    Ok(report)
}

/// Samples of `f` on `[0, x_max]` must be real, non-negative and
/// non-decreasing.
fn check_monotone(f: &SignalModel, x_max: f64) -> Result<()> {
    let m = 4000;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=m {
        let t = x_max * i as f64 / m as f64;
        let v = f
            .eval(t)
            .ok_or_else(|| GaborError::Precondition("the monotone theorem needs a function-like signal".into()))?;
        let tol = 1e-12 * v.norm().max(1.0);
        if v.im.abs() > tol || v.re < -tol || v.re < prev - tol {
            return Err(GaborError::Precondition(format!(
                "f is not a non-negative non-decreasing real function near t={t}"
            )));
        }
        prev = prev.max(v.re);
    }
    Ok(())
}

fn check_nonnegative(psi: &Window) -> Result<()> {
    let (lo, hi) = psi.support_offsets(1e-16, 0.0).unwrap_or((-10.0, 10.0));
    let peak = psi.peak();
    let m = 4000;
    for i in 0..=m {
        let t = lo + (hi - lo) * i as f64 / m as f64;
        let v = psi.eval(t);
        if v.re < -1e-14 * peak || v.im.abs() > 1e-14 * peak {
            return Err(GaborError::Precondition(format!(
                "window `{}` is negative or complex near t={t}",
                psi.name()
            )));
        }
    }
    Ok(())
}

/// Non-decreasing `f ≥ 0` on `[0,∞)` with a non-negative window: the limits
/// `e^{2πinx}c(x)^{-1}∫_0^∞f(t)ψ(t-x)e^{-2πint}dt` for integer `n` predict
/// `lim f(x)/c(x) = a_0/∫ψ(t)e^{bt}dt`, which is compared with the ratio
/// measured directly.
pub fn monotone_tauberian(
    f: &SignalModel,
    psi: &Window,
    c: &ComparisonFunction,
    n_range: IndexRange,
    cfg: &AnalysisConfig,
) -> Result<AsymptoticReport> {
    check_nonnegative(psi)?;
    let mut report = AsymptoticReport::new(Theorem::Monotone, c.describe());
    report.diagnostics.n_range = Some(n_range);
    let b = c.limit_rate();
    if b < 0.0 {
        report.verdict = Verdict::Rejected;
        report
            .diagnostics
            .notes
            .push(format!("a non-decreasing positive function forces b >= 0, got b={b}"));
        return Ok(report);
    }
    cfg.schedule.validate()?;
    let schedule = cfg.schedule.schedule(f, c);
    let x_max = schedule.last().copied().unwrap_or(cfg.schedule.x_start);
    check_monotone(f, x_max)?;

    let fp = f.restrict(0.0);
    let ns: Vec<i64> = n_range.iter().collect();
    let freqs = Frequencies {
        start: n_range.lo as f64,
        step: 1.0,
        count: ns.len(),
    };
    let mut xs = Vec::new();
    let mut rows = Vec::new();
    let mut direct = Vec::new();
    for &x in &schedule {
        let row = match stft_row(&fp, psi, x, &freqs, &cfg.quadrature) {
            Ok(r) => r,
            Err(e) if is_quadrature(&e) && !xs.is_empty() => {
                report.diagnostics.stopped = Some(format!("stopped at x={x}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let inv_c = (-c.ln_eval(x)).exp();
        rows.push(
            ns.iter()
                .zip(row)
                .map(|(&n, v)| v * Complex64::from_polar(inv_c, 2.0 * PI * n as f64 * x))
                .collect::<Vec<_>>(),
        );
        direct.push(f.eval(x).expect("checked function-like") * inv_c);
        xs.push(x);
    }
    let trajectories: Vec<Vec<Complex64>> = (0..ns.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let limits = CoefficientLimits {
        limits: extrapolate(&ns, trajectories, &cfg.schedule),
        schedule: xs,
        stopped: report.diagnostics.stopped.clone(),
    };
    report.a_n = entries(&limits);
    report.diagnostics.schedule_end = limits.schedule.last().copied();
    let ratio = extrapolate(&[0], vec![direct], &cfg.schedule).remove(0);

    let a0 = limits.get(0).map(|l| (l.value, l.converged));
    let mass = window_ft_row(psi, &Frequencies::single(0.0), b, &cfg.quadrature)?[0];
    report.b = b;
    match a0 {
        Some((a0, true)) if limits.all_converged() && limits.stopped.is_none() => {
            let predicted = a0 / mass;
            let gap = if predicted.norm() > 0.0 {
                (predicted - ratio.value).norm() / predicted.norm()
            } else {
                ratio.value.norm()
            };
            report.c = predicted;
            report.diagnostics.monotone = Some(MonotoneSides {
                predicted_limit: predicted,
                direct_ratio: ratio.value,
                direct_converged: ratio.converged,
                gap,
            });
            if gap <= cfg.monotone_tol {
                report.verdict = Verdict::SAsymptotic;
            } else {
                report.diagnostics.notes.push(format!(
                    "predicted limit and measured ratio differ by {gap:e} (direct ratio converged: {})",
                    ratio.converged
                ));
            }
        }
        _ => {
            report
                .diagnostics
                .notes
                .push("the integer-frequency limits did not settle".into());
        }
    }
    report.limits = Some(limits);
    Ok(report)
}

/// Wiener-kernel route: the condition on `ψ̂(ξ+ib/2π)`, the single limit
/// `a_0` and the Tauberian bound with `c(x) = e^{-τx}` on `x ≤ 0`.
pub fn wiener_tauberian(
    f: &SignalModel,
    psi: &Window,
    lat: &Lattice,
    c: &ComparisonFunction,
    tau: f64,
    cfg: &AnalysisConfig,
) -> Result<AsymptoticReport> {
    check_frame(psi, lat, cfg.force)?;
    let mut report = AsymptoticReport::new(Theorem::Wiener, c.describe());
    let b = c.limit_rate();
    let grid = default_wiener_grid(psi, b, &cfg.quadrature)?;
    let wiener = wiener_condition_check(psi, b, &grid, &cfg.quadrature)?;
    report.diagnostics.wiener = Some(wiener);
    if let WienerVerdict::Fails { witness, ratio } = wiener {
        report.verdict = Verdict::Rejected;
        report.diagnostics.notes.push(format!(
            "`{}` is not a Wiener-type kernel for b={b}: the shifted transform vanishes near xi={witness} (ratio {ratio:e})",
            psi.name()
        ));
        return Ok(report);
    }
    let c_ext = c.with_negative_extension(tau)?;
    report.comparison = c_ext.describe();
    let lat0 = lat.with_ranges(lat.k_range, IndexRange::new(0, 0));
    report.diagnostics.n_range = Some(lat0.n_range);
    let schedule = cfg.schedule.schedule(f, c);
    let limits = sasymp_coefficient_limits(f, psi, &lat0, c, &schedule, &cfg.schedule, &cfg.quadrature)?;
    report.a_n = entries(&limits);
    report.diagnostics.schedule_end = limits.schedule.last().copied();
    report.diagnostics.stopped = limits.stopped.clone();
    let x_max = limits.schedule.last().copied().unwrap_or(cfg.schedule.x_start);
    let bound = bound_or_note(f, psi, lat, &c_ext, x_max, cfg, &mut report)?;
    let a0 = limits.get(0).expect("n = 0 is evaluated");
    report.b = b;
    let mass = window_ft_row(psi, &Frequencies::single(0.0), b, &cfg.quadrature)?[0].conj();
    let cc = a0.value / mass;
    if psi.is_standard_gaussian() {
        let closed = a0.value * (-b * b / (4.0 * PI)).exp();
        if (closed - cc).norm() > 1e-9 * closed.norm().max(1e-300) {
            return Err(GaborError::Inconsistent(format!(
                "Gaussian closed form a_0 e^(-b^2/4pi) = {closed} disagrees with {cc}"
            )));
        }
        report.diagnostics.gaussian_closed_form = Some(closed);
    }
    report.verdict = match bound {
        Some(TauberianBound::Violated { x, n, .. }) => {
            report
                .diagnostics
                .notes
                .push(format!("Tauberian bound violated at x={x}, n={n}"));
            Verdict::Rejected
        }
        None => Verdict::Inconclusive,
        Some(_) if !a0.converged || limits.stopped.is_some() => {
            report.diagnostics.notes.push("the n = 0 limit did not settle".into());
            Verdict::Inconclusive
        }
        Some(_) => {
            report.c = cc;
            Verdict::SAsymptotic
        }
    };
    report.diagnostics.direct_verdict = Some(report.verdict);
    report.limits = Some(limits);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Lattice {
        Lattice::symmetric(0.5, 0.5, 20, 8).unwrap()
    }

    #[test]
    fn zero_signal_is_s_asymptotic_with_zero_constant() {
        let r = verify_sasymptotics(
            &SignalModel::zero(),
            &Window::gaussian(),
            &lat(),
            &ComparisonFunction::pure_exponential(1.0).unwrap(),
            &AnalysisConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::SAsymptotic);
        assert_eq!(r.c, Complex64::new(0.0, 0.0));
        assert_eq!(r.diagnostics.route_agreement, Some(true));
    }

    #[test]
    fn monotone_rejects_negative_rate_and_negative_windows() {
        let cfg = AnalysisConfig::default();
        let c = ComparisonFunction::pure_exponential(-1.0).unwrap();
        let r = monotone_tauberian(&SignalModel::constant(1.0), &Window::gaussian(), &c, IndexRange::new(-1, 1), &cfg)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        let c0 = ComparisonFunction::constant_one();
        let atom = |amplitude, rate| crate::model::GaussianAtom { amplitude, rate };
        let dip = Window::gaussian_sum("dip", vec![atom(1.0, PI), atom(-2.0, 2.0 * PI)]).unwrap();
        assert!(matches!(
            monotone_tauberian(&SignalModel::constant(1.0), &dip, &c0, IndexRange::new(-1, 1), &cfg),
            Err(GaborError::Precondition(_))
        ));
    }

    #[test]
    fn staircase_is_inconclusive_for_constant_comparison() {
        let cfg = AnalysisConfig::default();
        let r = monotone_tauberian(
            &SignalModel::staircase(),
            &Window::gaussian(),
            &ComparisonFunction::constant_one(),
            IndexRange::new(-1, 1),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn wiener_route_rejects_two_gaussian_window() {
        let r = wiener_tauberian(
            &SignalModel::exp_step(1.0),
            &Window::two_gaussian(),
            &lat(),
            &ComparisonFunction::constant_one(),
            1.0,
            &AnalysisConfig::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Rejected);
        assert!(matches!(r.diagnostics.wiener, Some(super::super::WienerVerdict::Fails { .. })));
    }
}
