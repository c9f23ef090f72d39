use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::walnut::WalnutOperator;
use super::{validate_lattice, LatticeVerdict};
use crate::error::{GaborError, Result};
use crate::model::{Lattice, SignalModel, Window};
use crate::stft::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub truncation: Lattice,
    pub method: BoundsMethod,
    /// Extremes over the random probes alone.
    pub probe_min: f64,
    pub probe_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsMethod {
    ProbesWithPowerIteration,
    /// Lattice too short for an interior domain; the estimate includes
    /// truncation edges and `A` may be near zero.
    EdgeDominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsOptions {
    pub probes: usize,
    pub seed: u64,
    pub force: bool,
    pub max_power_iterations: usize,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            probes: 50,
            seed: 0x5eed,
            force: false,
            max_power_iterations: 3000,
        }
    }
}

/// Envelope level at which a probe or window counts as negligible.
const LOCALIZATION_EPS: f64 = 1e-8;

fn gaussian_reach(width: f64) -> f64 {
    width * ((1.0 / LOCALIZATION_EPS).ln() / std::f64::consts::PI).sqrt()
}

/// Time interval of functions that never see the `k`-truncation, or `None`
/// when the lattice is too short to have one.
pub(crate) fn interior(psi: &Window, lat: &Lattice) -> Result<Option<(f64, f64)>> {
    let (lo, hi) = psi.support_offsets(LOCALIZATION_EPS, 0.0)?;
    let rho = lo.abs().max(hi.abs());
    let (a, b) = lat.time_span();
    let (a, b) = (a + rho, b - rho);
    Ok(if b - a > 4.0 * lat.alpha { Some((a, b)) } else { None })
}

/// Seeded random probes: Gaussian bumps of width in `[1, 2]` carrying three
/// random complex tones, placed so that both their support and their
/// spectrum stay inside the lattice truncation.
pub fn probe_signals(psi: &Window, lat: &Lattice, count: usize, seed: u64) -> Result<Vec<SignalModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = psi.support_offsets(LOCALIZATION_EPS, 0.0)?;
    let rho = lo.abs().max(hi.abs());
    let (t0, t1) = lat.time_span();
    let (f0, f1) = (lat.beta * lat.n_range.lo as f64, lat.beta * lat.n_range.hi as f64);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let width: f64 = rng.gen_range(1.0..2.0);
        let reach = gaussian_reach(width) + rho;
        let (c0, c1) = (t0 + reach, t1 - reach);
        let center = if c1 > c0 { rng.gen_range(c0..c1) } else { 0.5 * (t0 + t1) };
        // Spectral spread of the bump seen through the window.
        let margin = 4.5;
        let (v0, v1) = (f0 + margin, f1 - margin);
        let mut terms = Vec::new();
        for _ in 0..3 {
            let nu = if v1 > v0 { rng.gen_range(v0..v1) } else { 0.5 * (f0 + f1) };
            let r = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let bump = SignalModel::gaussian().dilate(width)?.translate(center).modulate(nu).scale(r);
            terms.push(bump);
        }
        let probe = terms[1..]
            .iter()
            .try_fold(terms[0].clone(), |acc, t| acc.add(t))?
            .with_id(format!("probe{i}"));
        out.push(probe);
    }
    Ok(out)
}

fn normalize(v: &mut [Complex64], op: &WalnutOperator) -> bool {
    let n = op.norm_sq(v).sqrt();
    if !(n > 1e-140) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Power iteration on `shift·I + sign·S`; returns the Rayleigh quotient of
/// `S` at the final iterate.
fn power_extreme(op: &WalnutOperator, start: &[Complex64], shift: f64, sign: f64, iters: usize) -> Option<f64> {
    let mut v = start.to_vec();
    if !normalize(&mut v, op) {
        return None;
    }
    let mut last = f64::NAN;
    let mut rq = op.rayleigh(&v)?;
    for it in 0..iters {
        let sv = op.apply(&v);
        let mut w: Vec<Complex64> = v.iter().zip(&sv).map(|(x, s)| x * shift + s * sign).collect();
        if !normalize(&mut w, op) {
            break;
        }
        v = w;
        rq = op.rayleigh(&v)?;
        if it % 25 == 24 {
            if (rq - last).abs() <= 1e-12 * rq.abs().max(1e-300) {
                break;
            }
            last = rq;
        }
    }
    Some(rq)
}

/// Heuristic frame bounds: extreme Rayleigh quotients of probes, tightened by
/// power iteration on `S` and `B̃I − S` over the lattice interior.
pub fn estimate_frame_bounds(
    psi: &Window,
    lat: &Lattice,
    q: &QuadratureSpec,
    opts: &BoundsOptions,
) -> Result<FrameBounds> {
    lat.validate()?;
    q.validate()?;
    if let LatticeVerdict::Rejected(reason) = validate_lattice(psi, lat) {
        if !opts.force {
            return Err(GaborError::Precondition(reason));
        }
    }
    if opts.probes == 0 {
        return Err(GaborError::Config("at least one probe is required".into()));
    }
    let (domain, method) = match interior(psi, lat)? {
        Some(d) => (d, BoundsMethod::ProbesWithPowerIteration),
        None => {
            let (lo, hi) = psi.support_offsets(LOCALIZATION_EPS, 0.0)?;
            let (a, b) = lat.time_span();
            ((a + lo, b + hi), BoundsMethod::EdgeDominated)
        }
    };
    let op = WalnutOperator::new(psi, lat.alpha, lat.beta, Some(lat.k_range), domain.0, domain.1)?;
    let probes = probe_signals(psi, lat, opts.probes, opts.seed)?;
    let mut quotients = Vec::new();
    let mut samples = Vec::new();
    for p in &probes {
        let v = op.sample(|t| p.eval(t).expect("probe is function-like"));
        if let Some(r) = op.rayleigh(&v) {
            quotients.push(r);
            samples.push(v);
        }
    }
    if quotients.is_empty() {
        return Err(GaborError::Config(
            "every probe is numerically zero on the lattice domain".into(),
        ));
    }
    let argmin = (0..quotients.len()).min_by(|&i, &j| quotients[i].total_cmp(&quotients[j])).unwrap();
    let argmax = (0..quotients.len()).max_by(|&i, &j| quotients[i].total_cmp(&quotients[j])).unwrap();
    let probe_min = quotients[argmin];
    let probe_max = quotients[argmax];

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let noise: Vec<Complex64> = (0..op.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let seed_max: Vec<Complex64> = samples[argmax].iter().zip(&noise).map(|(s, n)| s + n * 1e-3).collect();
    let b_power = power_extreme(&op, &seed_max, 0.0, 1.0, opts.max_power_iterations).unwrap_or(probe_max);
    let b = b_power.max(probe_max);
    let shift = b * (1.0 + 1e-6);
    let seed_min: Vec<Complex64> = samples[argmin].iter().zip(&noise).map(|(s, n)| s + n * 1e-3).collect();
    let a_power = power_extreme(&op, &seed_min, shift, -1.0, opts.max_power_iterations).unwrap_or(probe_min);
    let a = a_power.min(probe_min).max(0.0);
    Ok(FrameBounds {
        a,
        b,
        truncation: *lat,
        method,
        probe_min,
        probe_max,
    })
}
