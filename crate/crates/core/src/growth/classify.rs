use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fit::{fit_line, fit_quadratic, LineFit};
use crate::error::{GaborError, Result};
use crate::model::CoefficientGrid;

/// Largest exponent the bounded-family check will accept.
pub const TAU_CAP: f64 = 10.0;

/// Number of distinct `|k|` (and `|n|`) values a grid needs for fitting.
pub const MIN_SHELLS: usize = 8;

/// Orders `p` tested for the rapidly decreasing classes.
pub const RAPID_ORDERS: [i32; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthClass {
    #[serde(rename = "exp-pol")]
    ExpPol,
    #[serde(rename = "polynomial")]
    Polynomial,
    #[serde(rename = "rapidly-decreasing-exp")]
    RapidlyDecreasingExp,
    #[serde(rename = "rapidly-decreasing")]
    RapidlyDecreasing,
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl GrowthClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthClass::ExpPol => "exp-pol",
            GrowthClass::Polynomial => "polynomial",
            GrowthClass::RapidlyDecreasingExp => "rapidly-decreasing-exp",
            GrowthClass::RapidlyDecreasing => "rapidly-decreasing",
            GrowthClass::Unclassified => "unclassified",
        }
    }
}

/// Which dual sequence class a family is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyMode {
    #[serde(rename = "exp-pol")]
    ExpPol,
    #[serde(rename = "polynomial")]
    Polynomial,
}

/// Independent envelope-test outcomes; `class` picks the most specific.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Memberships {
    pub exp_pol: bool,
    pub polynomial: bool,
    pub rapidly_decreasing_exp: bool,
    pub rapidly_decreasing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub class: GrowthClass,
    /// Exponent of the reported class; 0 for the rapidly decreasing classes.
    pub tau: f64,
    /// RMS of the log-envelope fit behind `tau`.
    pub residual: f64,
    pub tau_exp_pol: f64,
    pub tau_polynomial: f64,
    pub memberships: Memberships,
}

/// `ln|c|` per node, `None` for exact zeros.
struct LogGrid {
    nodes: Vec<(i64, i64, f64)>,
    k_half: f64,
    n_half: f64,
}

impl LogGrid {
    fn new(grid: &CoefficientGrid) -> Self {
        let lat = grid.lattice();
        LogGrid {
            nodes: grid
                .iter()
                .filter(|(_, _, v)| v.norm() > 0.0)
                .map(|(k, n, v)| (k, n, v.norm().ln()))
                .collect(),
            k_half: lat.k_range.max_abs() as f64 / 2.0,
            n_half: lat.n_range.max_abs() as f64 / 2.0,
        }
    }

    fn outer(&self, k: i64, n: i64) -> bool {
        (k.abs() as f64) > self.k_half || (n.abs() as f64) > self.n_half
    }

    /// Whether `max_outer(ln|c| - w) ≤ max_inner(ln|c| - w)` up to `slack`.
    fn outer_dominated(&self, weight: impl Fn(i64, i64) -> f64, slack: f64) -> bool {
        let (mut inner, mut outer) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(k, n, l) in &self.nodes {
            let v = l - weight(k, n);
            if self.outer(k, n) {
                outer = outer.max(v);
            } else {
                inner = inner.max(v);
            }
        }
        outer <= inner + slack
    }

    /// Largest `ln|c|` per shell value `key(k, n)`, as `(x(shell), ln max)`.
    fn shell_envelope(&self, key: impl Fn(i64, i64) -> i64, x: impl Fn(i64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let mut shells: BTreeMap<i64, f64> = BTreeMap::new();
        for &(k, n, l) in &self.nodes {
            let e = shells.entry(key(k, n)).or_insert(f64::NEG_INFINITY);
            *e = e.max(l);
        }
        shells.into_iter().map(|(s, l)| (x(s), l)).unzip()
    }
}

/// Growth of `ys` over `xs` is at most linear: on the growth regime (from
/// the envelope minimum onward) the quadratic term of a least-squares fit
/// contributes little compared with the total rise.
fn at_most_linear(xs: &[f64], ys: &[f64]) -> bool {
    let Some(start) = (0..ys.len()).min_by(|&i, &j| ys[i].total_cmp(&ys[j])) else {
        return true;
    };
    let (xs, ys) = (&xs[start..], &ys[start..]);
    if xs.len() < 5 {
        return true;
    }
    let Some((c, _)) = fit_quadratic(xs, ys) else {
        return true;
    };
    let span = xs[xs.len() - 1] - xs[0];
    let rise = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ys[0];
    c[2] * span * span <= 0.5f64.max(0.1 * rise)
}

struct DualFit {
    tau: f64,
    residual: f64,
    shape_ok: bool,
    slopes: Vec<LineFit>,
}

fn envelope_fit(xs: &[f64], ys: &[f64]) -> (Option<LineFit>, bool) {
    let fit = fit_line(xs, ys);
    let shape_ok = match fit {
        Some(f) if f.slope > 0.0 => at_most_linear(xs, ys),
        _ => true,
    };
    (fit, shape_ok)
}

fn exp_pol_fit(lg: &LogGrid) -> DualFit {
    let (kx, ky) = lg.shell_envelope(|k, _| k.abs(), |s| s as f64);
    let (nx, ny) = lg.shell_envelope(|_, n| n.abs(), |s| (1.0 + s as f64).ln());
    let (fk, ok_k) = envelope_fit(&kx, &ky);
    let (fn_, ok_n) = envelope_fit(&nx, &ny);
    let slopes: Vec<LineFit> = [fk, fn_].into_iter().flatten().collect();
    let tau = slopes
        .iter()
        .map(|f| f.slope + f.slope_se)
        .fold(0.0, f64::max);
    DualFit {
        tau,
        residual: slopes.iter().map(|f| f.rms).fold(0.0, f64::max),
        shape_ok: ok_k && ok_n,
        slopes,
    }
}

fn polynomial_fit(lg: &LogGrid) -> DualFit {
    let (x, y) = lg.shell_envelope(|k, n| k.abs() + n.abs(), |r| (1.0 + r as f64).ln());
    let (f, shape_ok) = envelope_fit(&x, &y);
    DualFit {
        tau: f.map(|f| (f.slope + f.slope_se).max(0.0)).unwrap_or(0.0),
        residual: f.map(|f| f.rms).unwrap_or(0.0),
        shape_ok,
        slopes: f.into_iter().collect(),
    }
}

fn exp_pol_weight(tau: f64) -> impl Fn(i64, i64) -> f64 {
    move |k, n| tau * (k.abs() as f64 + (1.0 + n.abs() as f64).ln())
}

fn polynomial_weight(tau: f64) -> impl Fn(i64, i64) -> f64 {
    move |k, n| tau * (1.0 + (k.abs() + n.abs()) as f64).ln()
}

/// Relative slack on envelope comparisons, in log units.
const SLACK: f64 = 1e-9;

/// Classifies a grid into the most specific of the four sequence classes.
pub fn classify_grid_growth(grid: &CoefficientGrid) -> Result<GrowthEstimate> {
    let lat = grid.lattice();
    if lat.k_range.shell_count() < MIN_SHELLS || lat.n_range.shell_count() < MIN_SHELLS {
        return Err(GaborError::Config(format!(
            "ranges too small for fitting: need at least {MIN_SHELLS} shells in k and n, got {} and {}",
            lat.k_range.shell_count(),
            lat.n_range.shell_count()
        )));
    }
    if grid.is_all_zero() {
        return Ok(GrowthEstimate {
            class: GrowthClass::RapidlyDecreasing,
            tau: 0.0,
            residual: 0.0,
            tau_exp_pol: 0.0,
            tau_polynomial: 0.0,
            memberships: Memberships {
                exp_pol: true,
                polynomial: true,
                rapidly_decreasing_exp: true,
                rapidly_decreasing: true,
            },
        });
    }
    let lg = LogGrid::new(grid);
    let rd_exp = RAPID_ORDERS.iter().all(|&p| {
        let p = p as f64;
        lg.outer_dominated(move |k, n| -p * (k.abs() as f64 + (1.0 + n.abs() as f64).ln()), SLACK)
    });
    let rd = RAPID_ORDERS.iter().all(|&p| {
        let p = p as f64;
        lg.outer_dominated(move |k, n| -p * (1.0 + (k.abs() + n.abs()) as f64).ln(), SLACK)
    });
    let ep = exp_pol_fit(&lg);
    let pf = polynomial_fit(&lg);
    let bound_slack = 0.05;
    let exp_pol = ep.shape_ok && lg.outer_dominated(exp_pol_weight(ep.tau), bound_slack);
    let polynomial = pf.shape_ok && lg.outer_dominated(polynomial_weight(pf.tau), bound_slack);
    // The classes are nested, so a finer pass implies the coarser ones even
    // where the coarser fit is poorly shaped (a decaying envelope).
    let rd = rd || rd_exp;
    let polynomial = polynomial || rd;
    let exp_pol = exp_pol || polynomial;
    let memberships = Memberships {
        exp_pol,
        polynomial,
        rapidly_decreasing_exp: rd_exp,
        rapidly_decreasing: rd,
    };
    let (class, tau, residual) = if rd_exp {
        (GrowthClass::RapidlyDecreasingExp, 0.0, ep.residual)
    } else if rd {
        (GrowthClass::RapidlyDecreasing, 0.0, pf.residual)
    } else if polynomial {
        (GrowthClass::Polynomial, pf.tau, pf.residual)
    } else if exp_pol {
        (GrowthClass::ExpPol, ep.tau, ep.residual)
    } else {
        let worst = ep.slopes.iter().chain(&pf.slopes).map(|f| f.slope).fold(0.0, f64::max);
        (GrowthClass::Unclassified, worst, ep.residual.max(pf.residual))
    };
    Ok(GrowthEstimate {
        class,
        tau,
        residual,
        tau_exp_pol: ep.tau,
        tau_polynomial: pf.tau,
        memberships,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundedVerdict {
    Bounded { tau: f64 },
    Unbounded { k: i64, n: i64, grid_index: usize, tau_fit: f64 },
}

/// Uniform bound of a family via its pointwise-max grid.
pub fn check_bounded_family(grids: &[CoefficientGrid], mode: FamilyMode) -> Result<BoundedVerdict> {
    let Some(first) = grids.first() else {
        return Ok(BoundedVerdict::Bounded { tau: 0.0 });
    };
    let lat = *first.lattice();
    if let Some(i) = grids.iter().position(|g| *g.lattice() != lat) {
        return Err(GaborError::LatticeMismatch(format!(
            "family member {i} does not share the first member's lattice"
        )));
    }
    let max_values = (0..first.values().len())
        .map(|i| {
            let m = grids.iter().map(|g| g.values()[i].norm()).fold(0.0, f64::max);
            num_complex::Complex64::new(m, 0.0)
        })
        .collect();
    let envelope = CoefficientGrid::new(lat, max_values, "family-max", first.window_id())?;
    let est = classify_grid_growth(&envelope)?;
    let (member, tau) = match mode {
        FamilyMode::ExpPol => (est.memberships.exp_pol || est.memberships.polynomial, est.tau_exp_pol),
        FamilyMode::Polynomial => (est.memberships.polynomial, est.tau_polynomial),
    };
    let rapid = est.memberships.rapidly_decreasing_exp || est.memberships.rapidly_decreasing;
    if rapid || (member && tau <= TAU_CAP) {
        let tau = if rapid && !member { 0.0 } else { tau };
        return Ok(BoundedVerdict::Bounded { tau });
    }
    let weight: Box<dyn Fn(i64, i64) -> f64> = match mode {
        FamilyMode::ExpPol => Box::new(exp_pol_weight(TAU_CAP)),
        FamilyMode::Polynomial => Box::new(polynomial_weight(TAU_CAP)),
    };
    let mut best = (f64::NEG_INFINITY, 0, 0, 0);
    for (gi, g) in grids.iter().enumerate() {
        for (k, n, v) in g.iter() {
            if v.norm() > 0.0 {
                let score = v.norm().ln() - weight(k, n);
                if score > best.0 {
                    best = (score, k, n, gi);
                }
            }
        }
    }
    Ok(BoundedVerdict::Unbounded {
        k: best.1,
        n: best.2,
        grid_index: best.3,
        tau_fit: tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Lattice;
    use num_complex::Complex64;

    fn lat() -> Lattice {
        Lattice::symmetric(0.5, 0.5, 40, 16).unwrap()
    }

    #[test]
    fn exact_polynomial_grid() {
        let g = CoefficientGrid::from_fn(lat(), "p", |k, n| {
            Complex64::new((1.0 + (k.abs() + n.abs()) as f64).powi(2), 0.0)
        })
        .unwrap();
        let est = classify_grid_growth(&g).unwrap();
        assert_eq!(est.class, GrowthClass::Polynomial);
        assert!((2.0..=2.2).contains(&est.tau), "tau {}", est.tau);
    }

    #[test]
    fn exact_exp_pol_grid() {
        let g = CoefficientGrid::from_fn(lat(), "e", |k, n| {
            Complex64::new((2.0 * k.abs() as f64).exp() * (1.0 + n.abs() as f64).powi(3), 0.0)
        })
        .unwrap();
        let est = classify_grid_growth(&g).unwrap();
        assert_eq!(est.class, GrowthClass::ExpPol);
        assert!((3.0..=3.3).contains(&est.tau), "tau {}", est.tau);
    }

    #[test]
    fn super_exponential_is_unclassified() {
        let g = CoefficientGrid::from_fn(lat(), "q", |k, _| Complex64::new((0.2 * (k * k) as f64).exp(), 0.0))
            .unwrap();
        assert_eq!(classify_grid_growth(&g).unwrap().class, GrowthClass::Unclassified);
    }

    #[test]
    fn tiny_grid_is_a_config_error() {
        let g = CoefficientGrid::zeros(Lattice::symmetric(1.0, 1.0, 1, 1).unwrap());
        let err = classify_grid_growth(&g).unwrap_err();
        assert!(err.to_string().contains("ranges too small for fitting"));
    }

    #[test]
    fn all_zero_is_rapidly_decreasing() {
        let est = classify_grid_growth(&CoefficientGrid::zeros(lat())).unwrap();
        assert_eq!(est.class, GrowthClass::RapidlyDecreasing);
        assert_eq!(est.tau, 0.0);
    }

    #[test]
    fn empty_family_is_bounded() {
        assert_eq!(
            check_bounded_family(&[], FamilyMode::ExpPol).unwrap(),
            BoundedVerdict::Bounded { tau: 0.0 }
        );
    }
}
