use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

/// Highest derivative order served by [`Window::derivative`].
pub const P_MAX: usize = 4;

/// Step of the central finite differences used for tabulated windows.
pub const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    K1Exponential,
    SPolynomial,
    NumericOnly,
}

/// `amplitude · e^{-rate·t²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAtom {
    pub amplitude: f64,
    pub rate: f64,
}

/// Uniformly sampled complex function, interpolated by local quintic
/// Lagrange polynomials and extended by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTable {
    start: f64,
    step: f64,
    values: Vec<Complex64>,
}

const STENCIL: [f64; 6] = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];

impl UniformTable {
    pub fn new(start: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(GaborError::Config("uniform table needs finite start and positive step".into()));
        }
        if values.len() < 6 {
            return Err(GaborError::Config("uniform table needs at least six samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GaborError::Config("uniform table contains non-finite values".into()));
        }
        Ok(UniformTable { start, step, values })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn sample(&self, i: i64) -> Complex64 {
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t < self.start || t > self.end() {
            return Complex64::new(0.0, 0.0);
        }
        let s = (t - self.start) / self.step;
        let i = (s.floor() as i64).min(self.values.len() as i64 - 1);
        let u = s - i as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &om) in STENCIL.iter().enumerate() {
            let mut w = 1.0;
            for (l, &ol) in STENCIL.iter().enumerate() {
                if l != m {
                    w *= (u - ol) / (om - ol);
                }
            }
            acc += self.sample(i + om as i64) * w;
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WindowShape {
    GaussianSum(Vec<GaussianAtom>),
    /// `1 / (1 + t²)`.
    Lorentzian,
    Tabulated(Arc<UniformTable>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    name: String,
    shape: WindowShape,
    conjugated: bool,
}

impl Window {
    /// `e^{-πt²}`.
    pub fn gaussian() -> Self {
        Window {
            name: "gaussian".into(),
            shape: WindowShape::GaussianSum(vec![GaussianAtom {
                amplitude: 1.0,
                rate: PI,
            }]),
            conjugated: false,
        }
    }

    /// `e^{-πt²} - ½e^{-2πt²}`; its transform has real zeros.
    pub fn two_gaussian() -> Self {
        Window::gaussian_sum(
            "two_gaussian",
            vec![
                GaussianAtom {
                    amplitude: 1.0,
                    rate: PI,
                },
                GaussianAtom {
                    amplitude: -0.5,
                    rate: 2.0 * PI,
                },
            ],
        )
        .expect("non-zero window")
    }

    pub fn lorentzian() -> Self {
        Window {
            name: "lorentzian".into(),
            shape: WindowShape::Lorentzian,
            conjugated: false,
        }
    }

    pub fn gaussian_sum(name: impl Into<String>, atoms: Vec<GaussianAtom>) -> Result<Self> {
        if atoms.iter().any(|a| !(a.rate > 0.0 && a.rate.is_finite() && a.amplitude.is_finite())) {
            return Err(GaborError::Config("gaussian atoms need positive finite rates".into()));
        }
        let mut merged: Vec<GaussianAtom> = Vec::new();
        for a in atoms {
            match merged.iter_mut().find(|m| m.rate == a.rate) {
                Some(m) => m.amplitude += a.amplitude,
                None => merged.push(a),
            }
        }
        merged.retain(|a| a.amplitude != 0.0);
        if merged.is_empty() {
            return Err(GaborError::Capability("window is identically zero".into()));
        }
        Ok(Window {
            name: name.into(),
            shape: WindowShape::GaussianSum(merged),
            conjugated: false,
        })
    }

    pub fn tabulated(name: impl Into<String>, table: UniformTable) -> Result<Self> {
        if table.max_abs() == 0.0 {
            return Err(GaborError::Capability("window is identically zero".into()));
        }
        Ok(Window {
            name: name.into(),
            shape: WindowShape::Tabulated(Arc::new(table)),
            conjugated: false,
        })
    }

    /// Catalog lookup by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "gaussian" => Ok(Window::gaussian()),
            "two_gaussian" => Ok(Window::two_gaussian()),
            "lorentzian" => Ok(Window::lorentzian()),
            other => Err(GaborError::Config(format!("unknown window `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &WindowShape {
        &self.shape
    }

    pub fn decay_class(&self) -> DecayClass {
        match self.shape {
            WindowShape::GaussianSum(_) => DecayClass::K1Exponential,
            WindowShape::Lorentzian => DecayClass::SPolynomial,
            WindowShape::Tabulated(_) => DecayClass::NumericOnly,
        }
    }

    /// Rate of the single atom when the window is a (dilated) Gaussian.
    pub fn gaussian_rate(&self) -> Option<f64> {
        match &self.shape {
            WindowShape::GaussianSum(atoms) if atoms.len() == 1 => Some(atoms[0].rate),
            _ => None,
        }
    }

    /// Exactly `e^{-πt²}`.
    pub fn is_standard_gaussian(&self) -> bool {
        matches!(&self.shape, WindowShape::GaussianSum(a)
            if a.len() == 1 && a[0].rate == PI && a[0].amplitude == 1.0)
    }

    pub fn table(&self) -> Option<&UniformTable> {
        match &self.shape {
            WindowShape::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Window {
        let mut w = self.clone();
        if !self.is_real() {
            w.conjugated = !w.conjugated;
            w.name = format!("conj({})", self.name);
        }
        w
    }

    pub fn is_real(&self) -> bool {
        match &self.shape {
            WindowShape::Tabulated(t) => t.values().iter().all(|v| v.im == 0.0),
            _ => true,
        }
    }

    fn raw(&self, t: f64) -> Complex64 {
        match &self.shape {
            WindowShape::GaussianSum(atoms) => Complex64::new(
                atoms.iter().map(|a| a.amplitude * (-a.rate * t * t).exp()).sum(),
                0.0,
            ),
            WindowShape::Lorentzian => Complex64::new(1.0 / (1.0 + t * t), 0.0),
            WindowShape::Tabulated(table) => table.eval(t),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let v = self.raw(t);
        if self.conjugated {
            v.conj()
        } else {
            v
        }
    }

    /// `ψ^{(order)}(t)` for `order ≤ P_MAX`.
    pub fn derivative(&self, order: usize, t: f64) -> Result<Complex64> {
        if order > P_MAX {
            return Err(GaborError::Capability(format!(
                "derivatives are available up to order {P_MAX}, requested {order}"
            )));
        }
        if order == 0 {
            return Ok(self.eval(t));
        }
        let v = match &self.shape {
            WindowShape::GaussianSum(atoms) => Complex64::new(
                atoms
                    .iter()
                    .map(|a| a.amplitude * hermite_factor(a.rate, order, t) * (-a.rate * t * t).exp())
                    .sum(),
                0.0,
            ),
            WindowShape::Lorentzian => {
                // 1/(1+t²) = Im(1/(t - i)); d^j (t-i)^{-1} = (-1)^j j! (t-i)^{-j-1}.
                let z = Complex64::new(t, -1.0);
                let fact: f64 = (1..=order).map(|j| j as f64).product();
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new((sign * fact / z.powi(order as i32 + 1)).im, 0.0)
            }
            WindowShape::Tabulated(_) => {
                let h = FD_STEP;
                let f = |s: f64| self.raw(t + s * h);
                match order {
                    1 => (f(1.0) - f(-1.0)) / (2.0 * h),
                    2 => (f(1.0) - f(0.0) * 2.0 + f(-1.0)) / (h * h),
                    3 => (f(2.0) - f(1.0) * 2.0 + f(-1.0) * 2.0 - f(-2.0)) / (2.0 * h * h * h),
                    _ => (f(2.0) - f(1.0) * 4.0 + f(0.0) * 6.0 - f(-1.0) * 4.0 + f(-2.0)) / h.powi(4),
                }
            }
        };
        Ok(if self.conjugated { v.conj() } else { v })
    }

    /// Closed-form `∫ψ(t)e^{-2πizt}dt` at complex `z`, when available.
    pub fn complex_ft(&self, z: Complex64) -> Option<Complex64> {
        match &self.shape {
            WindowShape::GaussianSum(atoms) => Some(
                atoms
                    .iter()
                    .map(|a| a.amplitude * (PI / a.rate).sqrt() * (-(PI * PI) * z * z / a.rate).exp())
                    .sum(),
            ),
            // Only real frequencies: `1/(1+t²)` times `e^{bt}` is not integrable.
            WindowShape::Lorentzian if z.im == 0.0 => Some(Complex64::new(PI * (-2.0 * PI * z.re.abs()).exp(), 0.0)),
            _ => None,
        }
    }

    /// Offsets `[lo, hi]` such that `ψ(u)e^{g|u|}` is below `eps` (relative to
    /// the peak) outside `u ∈ [lo, hi]`.
    pub fn support_offsets(&self, eps: f64, growth: f64) -> Result<(f64, f64)> {
        let growth = growth.max(0.0);
        match &self.shape {
            WindowShape::GaussianSum(atoms) => {
                let a = atoms.iter().map(|a| a.rate).fold(f64::INFINITY, f64::min);
                let s: f64 = atoms.iter().map(|a| a.amplitude.abs()).sum();
                let ln_ratio = (s / eps).ln().max(0.0);
                let r = (growth + (growth * growth + 4.0 * a * ln_ratio).sqrt()) / (2.0 * a);
                Ok((-r, r))
            }
            WindowShape::Lorentzian => {
                if growth > 0.0 {
                    return Err(GaborError::Capability(
                        "a polynomially decaying window cannot absorb exponential signal growth".into(),
                    ));
                }
                let r = (1.0 / eps).sqrt().min(1e4);
                Ok((-r, r))
            }
            WindowShape::Tabulated(t) => Ok((t.start(), t.end())),
        }
    }

    /// Interior nodes of `u ↦ ψ(u - x)` on `(a, b)`; non-empty only for
    /// tabulated windows, whose interpolant is piecewise polynomial.
    pub fn breakpoints(&self, x: f64, a: f64, b: f64, out: &mut Vec<f64>) {
        if let WindowShape::Tabulated(t) = &self.shape {
            let first = (((a - x) - t.start()) / t.step()).ceil().max(0.0) as usize;
            let mut i = first;
            while i < t.len() {
                let node = x + t.abscissa(i);
                if node >= b {
                    break;
                }
                if node > a {
                    out.push(node);
                }
                i += 1;
            }
        }
    }

    /// Largest `|ψ|` on a fine grid over its effective support.
    pub fn peak(&self) -> f64 {
        match &self.shape {
            WindowShape::Tabulated(t) => t.max_abs(),
            _ => {
                let (lo, hi) = self.support_offsets(1e-16, 0.0).unwrap_or((-10.0, 10.0));
                let n = 4000;
                (0..=n)
                    .map(|i| self.eval(lo + (hi - lo) * i as f64 / n as f64).norm())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// `P_j(t)` with `d^j/dt^j e^{-at²} = P_j(t) e^{-at²}`.
fn hermite_factor(a: f64, order: usize, t: f64) -> f64 {
    // Coefficients of P_j in ascending powers; P_{j+1} = P_j' - 2at P_j.
    let mut p = vec![1.0];
    for _ in 0..order {
        let mut next = vec![0.0; p.len() + 1];
        for (k, &c) in p.iter().enumerate() {
            if k > 0 {
                next[k - 1] += c * k as f64;
            }
            next[k + 1] -= 2.0 * a * c;
        }
        p = next;
    }
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_derivatives_match_closed_form() {
        let g = Window::gaussian();
        let t: f64 = 0.37;
        let e = (-PI * t * t).exp();
        let d1 = -2.0 * PI * t * e;
        let d2 = (4.0 * PI * PI * t * t - 2.0 * PI) * e;
        assert!((g.derivative(1, t).unwrap().re - d1).abs() < 1e-14);
        assert!((g.derivative(2, t).unwrap().re - d2).abs() < 1e-13);
        assert!(matches!(g.derivative(5, t), Err(GaborError::Capability(_))));
    }

    #[test]
    fn lorentzian_derivative() {
        let w = Window::lorentzian();
        let t: f64 = 0.8;
        let d1 = -2.0 * t / (1.0 + t * t).powi(2);
        assert!((w.derivative(1, t).unwrap().re - d1).abs() < 1e-14);
    }

    #[test]
    fn zero_window_rejected() {
        let r = Window::gaussian_sum(
            "zero",
            vec![GaussianAtom {
                amplitude: 0.0,
                rate: PI,
            }],
        );
        assert!(matches!(r, Err(GaborError::Capability(_))));
    }

    #[test]
    fn table_interpolates_quintics_exactly() {
        let p = |t: f64| 1.0 + t - 0.5 * t.powi(3) + 0.1 * t.powi(5);
        let values = (0..40).map(|i| Complex64::new(p(-2.0 + 0.1 * i as f64), 0.0)).collect();
        let table = UniformTable::new(-2.0, 0.1, values).unwrap();
        for t in [-1.73, -0.05, 0.31, 1.11] {
            assert!((table.eval(t).re - p(t)).abs() < 1e-11);
        }
        assert_eq!(table.eval(5.0).re, 0.0);
    }

    #[test]
    fn tabulated_fd_derivative() {
        let values = (0..=2000)
            .map(|i| {
                let t = -5.0 + 0.005 * i as f64;
                Complex64::new((-PI * t * t).exp(), 0.0)
            })
            .collect();
        let w = Window::tabulated("g", UniformTable::new(-5.0, 0.005, values).unwrap()).unwrap();
        let t: f64 = 0.4;
        let exact = -2.0 * PI * t * (-PI * t * t).exp();
        assert!((w.derivative(1, t).unwrap().re - exact).abs() < 1e-5);
    }

    #[test]
    fn support_offsets_cover_decay() {
        let (lo, hi) = Window::gaussian().support_offsets(1e-16, 0.0).unwrap();
        assert!((-PI * hi * hi).exp() <= 1.0001e-16);
        assert_eq!(lo, -hi);
        let (_, wider) = Window::gaussian().support_offsets(1e-16, 2.0).unwrap();
        assert!(wider > hi);
    }
}
