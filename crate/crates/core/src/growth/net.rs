use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::classify::{check_bounded_family, BoundedVerdict, FamilyMode};
use crate::error::{GaborError, Result};
use crate::model::CoefficientGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetConfig {
    /// Relative Cauchy tolerance per node.
    pub node_tol: f64,
    /// Absolute floor, as a fraction of the tail's largest coefficient.
    pub floor_rel: f64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            node_tol: 1e-6,
            floor_rel: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetStatus {
    Converged,
    NotCauchy,
    Unbounded,
    /// Mass drifts off the truncation: the amplitude inside the outer
    /// `k`-shells collapses along the tail.
    EscapingMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub status: NetStatus,
    pub limit_grid: CoefficientGrid,
    pub per_node_histories: BTreeMap<(i64, i64), Vec<Complex64>>,
    pub uniform_tau: Option<f64>,
    pub lambda0: f64,
    pub worst_node: (i64, i64),
    /// Largest successive tail difference over the node tolerance.
    pub max_tail_delta: f64,
    pub bound: BoundedVerdict,
}

/// Cauchy test of every node over the tail half plus a uniform bound on the
/// tail family.
pub fn detect_net_convergence(
    net: &[(f64, CoefficientGrid)],
    mode: FamilyMode,
    cfg: &NetConfig,
) -> Result<ConvergenceReport> {
    if net.len() < 4 {
        return Err(GaborError::Usage(format!("a net needs at least 4 members, got {}", net.len())));
    }
    if net.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(GaborError::Usage("net parameters must be strictly increasing".into()));
    }
    let lat = *net[0].1.lattice();
    if net.iter().any(|(_, g)| *g.lattice() != lat) {
        return Err(GaborError::LatticeMismatch("net members must share one lattice".into()));
    }
    let tail = &net[net.len() / 2..];
    let grids: Vec<CoefficientGrid> = tail.iter().map(|(_, g)| g.clone()).collect();
    let scale = grids.iter().map(|g| g.max_abs()).fold(0.0, f64::max);
    let last = grids.last().expect("non-empty tail");

    let mut histories = BTreeMap::new();
    let mut worst = (f64::NEG_INFINITY, (0, 0));
    for (i, (k, n, v_last)) in last.iter().enumerate() {
        let seq: Vec<Complex64> = grids.iter().map(|g| g.values()[i]).collect();
        let tol = cfg.node_tol * (v_last.norm() + cfg.floor_rel * scale);
        let delta = seq.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
        let ratio = if tol > 0.0 {
            delta / tol
        } else if delta > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > worst.0 {
            worst = (ratio, (k, n));
        }
        histories.insert((k, n), seq);
    }
    let cauchy = worst.0 <= 1.0;
    let bound = check_bounded_family(&grids, mode)?;
    let uniform_tau = match bound {
        BoundedVerdict::Bounded { tau } => Some(tau),
        BoundedVerdict::Unbounded { .. } => None,
    };
    let status = if cauchy && uniform_tau.is_some() {
        NetStatus::Converged
    } else if uniform_tau.is_none() {
        NetStatus::Unbounded
    } else {
        let interior = |g: &CoefficientGrid| {
            g.iter()
                .filter(|&(k, _, _)| k != lat.k_range.lo && k != lat.k_range.hi)
                .map(|(_, _, v)| v.norm())
                .fold(0.0, f64::max)
        };
        let (first_in, last_in) = (interior(&grids[0]), interior(last));
        if last_in < 1e-3 * first_in || last.max_abs() < 1e-3 * grids[0].max_abs() {
            NetStatus::EscapingMass
        } else {
            NetStatus::NotCauchy
        }
    };
    Ok(ConvergenceReport {
        converged: status == NetStatus::Converged,
        status,
        limit_grid: last.clone(),
        per_node_histories: histories,
        uniform_tau,
        lambda0: tail[0].0,
        worst_node: worst.1,
        max_tail_delta: worst.0.max(0.0),
        bound,
    })
}
