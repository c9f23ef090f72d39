//! Deterministic invariants over catalog cases.

mod common;

use num_complex::Complex64;

use gabor_tauber::asymptotics::{monotone_tauberian, verify_sasymptotics, AnalysisConfig, Verdict};
use gabor_tauber::frame::{
    compute_dual_window, estimate_frame_bounds, reconstruct, reconstruct_mixed, BoundsOptions, DualConfig,
    WalnutOperator,
};
use gabor_tauber::growth::{classify_grid_growth, GrowthClass};
use gabor_tauber::model::{ComparisonFunction, IndexRange, Lattice, SignalModel, SlowlyVarying, Window};
use gabor_tauber::stft::{gabor_coefficients, stft_point, QuadratureSpec};

#[test]
fn comparison_ratios_converge_monotonically() {
    let hs = [10.0, 20.0, 40.0, 80.0];
    let mut cases: Vec<(ComparisonFunction, Option<f64>)> = Vec::new();
    for b in [-1.0, 0.0, 1.0] {
        cases.push((ComparisonFunction::exponential(b, SlowlyVarying::Constant(2.0)).unwrap(), None));
        cases.push((ComparisonFunction::exponential(b, SlowlyVarying::IteratedLog).unwrap(), None));
        for a in [-0.5, 0.25, 1.0, 2.0] {
            cases.push((ComparisonFunction::exponential(b, SlowlyVarying::LogPower(a)).unwrap(), Some(a)));
        }
    }
    for nu in [0.0, 0.25, 1.0] {
        cases.push((ComparisonFunction::polynomial(nu, SlowlyVarying::Constant(1.0)).unwrap(), Some(nu)));
    }
    for (c, power) in &cases {
        for x in [-2.0f64, -1.0, 1.0, 2.0] {
            let target = (c.limit_rate() * x).exp();
            let dev: Vec<f64> = hs
                .iter()
                .map(|&h| ((c.ln_eval(x + h) - c.ln_eval(h)).exp() / target - 1.0).abs())
                .collect();
            assert!(dev.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{} at x={x}: {dev:?}", c.describe());
            // Logarithmic factors close at rate a·x/h, so 1% at h=80 needs |a·x| < 0.8.
            let predicted = power.map_or(0.0, |a| (1.0 + x / 80.0).powf(a) - 1.0);
            if predicted.abs() < 0.008 {
                assert!(dev[3] < 0.01, "{} at x={x}: {}", c.describe(), dev[3]);
            } else {
                assert!((dev[3] - predicted.abs()).abs() <= 0.1 * predicted.abs(), "{} at x={x}", c.describe());
            }
        }
    }
}

#[test]
fn gaussian_stft_decays_faster_than_any_envelope() {
    let psi = Window::gaussian();
    let f = SignalModel::gaussian();
    let q = QuadratureSpec::default();
    let v = |x: f64, xi: f64| stft_point(&f, &psi, x, xi, &q).unwrap();
    for &(x, xi) in &[(0.5, 0.0), (2.0, 0.0), (0.0, 3.0), (1.5, -2.0)] {
        assert!((v(x, xi) - common::gaussian_self_stft(x, xi)).norm() < 1e-12);
    }
    // Slopes of log|V| steepen without bound in both directions.
    let slope_x = |a: f64, b: f64| (v(b, 0.0).norm().ln() - v(a, 0.0).norm().ln()) / (b - a);
    let slope_xi = |a: f64, b: f64| {
        (v(0.0, b).norm().ln() - v(0.0, a).norm().ln()) / ((1.0 + b).ln() - (1.0 + a).ln())
    };
    let sx = [slope_x(0.5, 1.0), slope_x(1.0, 2.0), slope_x(2.0, 3.0), slope_x(3.0, 4.0)];
    let sxi = [slope_xi(0.5, 1.0), slope_xi(1.0, 2.0), slope_xi(2.0, 3.0), slope_xi(3.0, 4.0)];
    assert!(sx.windows(2).all(|w| w[1] < w[0]), "{sx:?}");
    assert!(sxi.windows(2).all(|w| w[1] < w[0]), "{sxi:?}");
    assert!(sx[3] < -4.0 && sxi[3] < -4.0);
}

#[test]
fn test_function_grids_pass_the_rapid_envelopes() {
    // The envelopes weight lattice indices, so e^{4|k|} is e^{4|x|/α}: at
    // α = 1 the Gaussian overtakes it inside the inner half of the range.
    let lat = Lattice::symmetric(1.0, 1.0, 10, 8).unwrap();
    let q = QuadratureSpec::default();
    let signals = [
        SignalModel::gaussian(),
        SignalModel::gaussian_mixture(&[(-0.5, 1.0, 1.0), (1.0, 0.7, -0.5)]),
        SignalModel::gaussian().modulate(0.75).translate(0.4),
    ];
    for psi in [Window::gaussian(), Window::two_gaussian()] {
        for f in &signals {
            let grid = gabor_coefficients(f, &psi, &lat, &q).unwrap();
            let est = classify_grid_growth(&grid).unwrap();
            assert_eq!(est.class, GrowthClass::RapidlyDecreasingExp, "{} with {}", f.id(), psi.name());
            for p in 1..=4 {
                let p = p as f64;
                let weighted = |k: i64, n: i64, v: Complex64| {
                    v.norm() * (p * lat.alpha * k.abs() as f64).exp() * (1.0 + lat.beta * n.abs() as f64).powf(p)
                };
                let all = grid.iter().map(|(k, n, v)| weighted(k, n, v)).fold(0.0, f64::max);
                let outer = grid
                    .iter()
                    .filter(|&(k, n, _)| k.abs() == 10 || n.abs() == 8)
                    .map(|(k, n, v)| weighted(k, n, v))
                    .fold(0.0, f64::max);
                assert!(outer <= 1e-2 * all, "{} with {}, p={p}: {outer} vs {all}", f.id(), psi.name());
            }
        }
    }
}

#[test]
fn bound_estimates_are_monotone_under_widening() {
    let psi = Window::gaussian();
    let q = QuadratureSpec::default();
    let tol = 1e-6;
    let mut last: Option<(f64, f64)> = None;
    for (kh, nh) in [(8, 4), (16, 8), (32, 16)] {
        let lat = Lattice::symmetric(0.5, 0.5, kh, nh).unwrap();
        let est = estimate_frame_bounds(&psi, &lat, &q, &BoundsOptions::default()).unwrap();
        assert!(est.a > 0.0 && est.a <= est.b);
        if let Some((a, b)) = last {
            assert!(est.a <= a + tol * a, "A grew: {a} -> {}", est.a);
            assert!(est.b >= b - tol * b, "B shrank: {b} -> {}", est.b);
        }
        last = Some((est.a, est.b));
    }
}

#[test]
fn dual_window_inverts_the_frame_operator() {
    let psi = Window::gaussian();
    let lat = Lattice::symmetric(0.5, 0.5, 16, 8).unwrap();
    let q = QuadratureSpec::default();
    let bounds = estimate_frame_bounds(&psi, &lat, &q, &BoundsOptions::default()).unwrap();
    let cfg = DualConfig::default();
    let dual = compute_dual_window(&psi, &lat, &bounds, &cfg).unwrap();
    assert!(dual.residual <= cfg.tol);

    // Re-apply S independently on the same sample grid.
    let table = dual.table();
    let half = -table.start();
    let op = WalnutOperator::new(&psi, lat.alpha, lat.beta, None, -half, half).unwrap();
    assert_eq!(op.len(), table.len());
    let s_gamma = op.apply(table.values());
    let worst = (0..op.len())
        .map(|i| (s_gamma[i] - psi.eval(op.abscissa(i))).norm())
        .fold(0.0, f64::max);
    assert!(worst <= 10.0 * cfg.tol, "sup |Sγ − ψ| = {worst}");

    let pts: Vec<f64> = (-8..=8).map(|i| 0.25 * i as f64).collect();
    let f = SignalModel::gaussian().translate(0.3).modulate(0.6);
    let one = reconstruct(&f, &psi, &dual, &lat, &pts, &q).unwrap();
    let two = reconstruct_mixed(&f, &psi, &dual, &lat, &pts, &q).unwrap();
    assert!(one.relative_error <= 1e-4 && two.relative_error <= 1e-4);
    let gap = one.samples.iter().zip(&two.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(gap <= 1e-3, "mixed expansions differ by {gap}");
}

#[test]
fn monotone_theorem_sides_agree() {
    let psi = Window::gaussian();
    let cfg = AnalysisConfig::default();
    // The staircase approaches its limits like 1/x: its sawtooth part keeps
    // the n ≠ 0 limits out of reach, and n = 0 needs a longer schedule.
    let mut long = cfg.clone();
    long.schedule.x_cap = 1e6;
    let cases = [
        (SignalModel::exp_step(1.0), ComparisonFunction::pure_exponential(1.0).unwrap(), IndexRange::new(-2, 2), &cfg),
        (SignalModel::heaviside(), ComparisonFunction::constant_one(), IndexRange::new(-2, 2), &cfg),
        (
            SignalModel::staircase(),
            ComparisonFunction::polynomial(1.0, SlowlyVarying::Constant(1.0)).unwrap(),
            IndexRange::new(0, 0),
            &long,
        ),
    ];
    for (f, c, ns, cfg) in cases {
        let r = monotone_tauberian(&f, &psi, &c, ns, cfg).unwrap();
        let m = r.diagnostics.monotone.unwrap_or_else(|| panic!("{}: {:?}", f.id(), r.diagnostics.notes));
        assert!(m.gap <= 0.02, "{}: gap {}", f.id(), m.gap);
        assert!((m.predicted_limit - 1.0).norm() <= 0.02, "{}: {}", f.id(), m.predicted_limit);
        assert_eq!(r.verdict, Verdict::SAsymptotic, "{}", f.id());
    }
}

#[test]
fn verified_asymptotics_satisfy_the_necessary_conditions() {
    let psi = Window::gaussian();
    let lat = Lattice::symmetric(0.5, 0.5, 20, 8).unwrap();
    let cfg = AnalysisConfig::default();
    let cases = [
        (SignalModel::exp_step(1.0), ComparisonFunction::pure_exponential(1.0).unwrap()),
        (SignalModel::heaviside(), ComparisonFunction::constant_one()),
    ];
    for (f, c) in &cases {
        let r = verify_sasymptotics(f, &psi, &lat, c, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::SAsymptotic, "{}", f.id());
        let limits = r.limits.as_ref().expect("limits recorded");
        assert!(limits.all_converged(), "{}", f.id());
        let bound = r.diagnostics.bound.expect("bound checked");
        assert!(bound.holds() && bound.tau().is_finite(), "{}", f.id());
        assert!(r.tau.is_some_and(f64::is_finite));
        let net = r.diagnostics.net.as_ref().expect("net route ran");
        assert!(net.converged, "{}: {}", f.id(), net.status);
        assert!(net.limit_synthesis_error.is_some_and(|e| e <= 0.02), "{}: {:?}", f.id(), net.limit_synthesis_error);
        assert!(r.diagnostics.max_constant_deviation.is_some_and(|d| d <= cfg.solve_tol * r.c.norm().max(1.0)));
    }
}
