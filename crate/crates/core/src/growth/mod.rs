//! Growth classes of coefficient grids, uniform bounds of families, net
//! convergence and the exponential-weight seminorms of test functions.

pub mod classify;
pub mod fit;
pub mod net;

pub use classify::{
    check_bounded_family, classify_grid_growth, BoundedVerdict, FamilyMode, GrowthClass, GrowthEstimate,
    Memberships, TAU_CAP,
};
pub use net::{detect_net_convergence, ConvergenceReport, NetConfig, NetStatus};

use num_complex::Complex64;

use crate::error::{GaborError, Result};
use crate::model::{SignalModel, Window, P_MAX};

/// Anything with derivatives up to [`P_MAX`].
pub trait Differentiable {
    fn derivative_at(&self, order: usize, t: f64) -> Result<Complex64>;
}

impl Differentiable for Window {
    fn derivative_at(&self, order: usize, t: f64) -> Result<Complex64> {
        self.derivative(order, t)
    }
}

impl Differentiable for SignalModel {
    fn derivative_at(&self, order: usize, t: f64) -> Result<Complex64> {
        if order > P_MAX {
            return Err(GaborError::Capability(format!(
                "derivatives are available up to order {P_MAX}, requested {order}"
            )));
        }
        let f = |s: f64| {
            self.eval(t + s * crate::model::window::FD_STEP)
                .ok_or_else(|| GaborError::Capability("point masses have no pointwise derivatives".into()))
        };
        let h = crate::model::window::FD_STEP;
        Ok(match order {
            0 => f(0.0)?,
            1 => (f(1.0)? - f(-1.0)?) / (2.0 * h),
            2 => (f(1.0)? - f(0.0)? * 2.0 + f(-1.0)?) / (h * h),
            3 => (f(2.0)? - f(1.0)? * 2.0 + f(-1.0)? * 2.0 - f(-2.0)?) / (2.0 * h * h * h),
            _ => (f(2.0)? - f(1.0)? * 4.0 + f(0.0)? * 6.0 - f(-1.0)? * 4.0 + f(-2.0)?) / h.powi(4),
        })
    }
}

/// `max_{x ∈ grid, j ≤ p} e^{p|x|} |φ^{(j)}(x)|`, a lower bound for the
/// seminorm on the sampled grid.
pub fn k1_seminorm(phi: &dyn Differentiable, p: usize, grid: &[f64]) -> Result<f64> {
    let mut best = 0.0f64;
    for &x in grid {
        let w = (p as f64 * x.abs()).exp();
        for j in 0..=p {
            best = best.max(w * phi.derivative_at(j, x)?.norm());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(half: f64) -> Vec<f64> {
        let n = (half / 0.01).round() as i64;
        (-n..=n).map(|i| i as f64 * 0.01).collect()
    }

    #[test]
    fn gaussian_seminorms() {
        let g = Window::gaussian();
        assert!((k1_seminorm(&g, 0, &grid(5.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(k1_seminorm(&g, 1, &grid(5.0)).unwrap().is_finite());
    }

    #[test]
    fn lorentzian_seminorm_diverges_with_extent() {
        let w = Window::lorentzian();
        let small = k1_seminorm(&w, 1, &grid(5.0)).unwrap();
        let large = k1_seminorm(&w, 1, &grid(10.0)).unwrap();
        assert!(large > 20.0 * small);
        assert!((small - 5.0f64.exp() / 26.0).abs() / small < 1e-9);
    }

    #[test]
    fn point_masses_have_no_derivatives() {
        let d = SignalModel::dirac(0.0);
        assert!(matches!(k1_seminorm(&d, 1, &[0.0]), Err(GaborError::Capability(_))));
    }
}
