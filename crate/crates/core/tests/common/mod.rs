//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's quadrature, operator or eigen code.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, n: usize) -> Complex64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub fn gaussian(t: f64) -> f64 {
    (-PI * t * t).exp()
}

/// `∫f(t)ψ(t−x)e^{−2πiξt}dt` for the real Gaussian window over `[lo, hi]`,
/// the window cut at `|t − x| ≤ 9` where it is below `1e−110`.
pub fn stft_oracle(f: impl Fn(f64) -> Complex64, x: f64, xi: f64, lo: f64, hi: f64) -> Complex64 {
    let (a, b) = (lo.max(x - 9.0), hi.min(x + 9.0));
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let n = (((b - a) * 400.0 * (1.0 + xi.abs())) as usize).max(2000);
    simpson(
        |t| f(t) * gaussian(t - x) * Complex64::from_polar(1.0, -2.0 * PI * xi * t),
        a,
        b,
        n,
    )
}

/// `V_ψψ(x,ξ) = 2^{−1/2}e^{−π(x²+ξ²)/2}e^{−πixξ}` for `ψ(t) = e^{−πt²}`.
pub fn gaussian_self_stft(x: f64, xi: f64) -> Complex64 {
    Complex64::from_polar(
        std::f64::consts::FRAC_1_SQRT_2 * (-PI * (x * x + xi * xi) / 2.0).exp(),
        -PI * x * xi,
    )
}

/// `ψ̂(z) = e^{−πz²}` at complex `z`, the analytic continuation for the Gaussian.
pub fn gaussian_ft(z: Complex64) -> Complex64 {
    (-PI * z * z).exp()
}

/// Extremes of the Zak-domain symbol of the Gaussian frame operator,
/// `m(x,ω) = β⁻¹Σ_j G_j(x)e^{2πijω}` with `G_j(x) = Σ_k ψ(x−αk)ψ(x−j/β−αk)`.
/// When `1/β` is an integer multiple of `α` the operator is multiplication
/// by `m` after a Zak transform of period `1/β`, so its extremes over
/// `[0,α)×[0,1)` are the optimal frame bounds.
pub fn gaussian_zak_bounds(alpha: f64, beta: f64, samples: usize) -> (f64, f64) {
    let ratio = 1.0 / (alpha * beta);
    assert!((ratio - ratio.round()).abs() < 1e-12, "1/β must be a multiple of α");
    let g = |j: i64, x: f64| -> f64 {
        (-80..=80)
            .map(|k| {
                let u = x - alpha * k as f64;
                gaussian(u) * gaussian(u - j as f64 / beta)
            })
            .sum()
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for ix in 0..samples {
        let x = alpha * ix as f64 / samples as f64;
        let gj: Vec<f64> = (0..=12).map(|j| g(j, x)).collect();
        for iw in 0..samples {
            let w = iw as f64 / samples as f64;
            let m = (gj[0] + 2.0 * (1..=12).map(|j| gj[j] * (2.0 * PI * j as f64 * w).cos()).sum::<f64>()) / beta;
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    (lo, hi)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `‖f‖₂²` by Simpson over `[lo, hi]`.
pub fn norm_sq(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(|t| Complex64::new(f(t).norm_sqr(), 0.0), lo, hi, n).re
}
