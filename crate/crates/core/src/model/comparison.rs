//! Comparison functions `c(h) = e^{bh} L(e^{|h|})` (exponential regime) and
//! `c(h) = (1+|h|)^ν L(1+|h|)` (polynomial regime), with `L` drawn from a
//! small catalog of slowly varying functions.

use std::f64::consts::E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

/// Slowly varying factor `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlowlyVarying {
    /// `L ≡ c0` with `c0 > 0`.
    Constant(f64),
    /// `L(y) = log(e + y)^a`.
    LogPower(f64),
    /// `L(y) = log(e + log(e + y))`.
    IteratedLog,
}

impl SlowlyVarying {
    /// Parses `const:<c0>`, `log:<a>` or `iterlog`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec == "iterlog" {
            return Ok(SlowlyVarying::IteratedLog);
        }
        let (head, tail) = spec
            .split_once(':')
            .ok_or_else(|| GaborError::Config(format!("unsupported slowly varying spec `{spec}`")))?;
        let value: f64 = tail
            .trim()
            .parse()
            .map_err(|_| GaborError::Config(format!("bad number in slowly varying spec `{spec}`")))?;
        match head.trim() {
            "const" if value > 0.0 && value.is_finite() => Ok(SlowlyVarying::Constant(value)),
            "const" => Err(GaborError::Config(format!(
                "constant slowly varying factor must be positive, got {value}"
            ))),
            "log" if value.is_finite() => Ok(SlowlyVarying::LogPower(value)),
            _ => Err(GaborError::Config(format!("unsupported slowly varying spec `{spec}`"))),
        }
    }

    /// `ln L(e^u)` for `u ≥ 0`, computed without forming `e^u`.
    fn ln_at_exp(&self, u: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant(c0) => c0.ln(),
            SlowlyVarying::LogPower(a) => a * ln_e_plus_exp(u).ln(),
            SlowlyVarying::IteratedLog => (E + ln_e_plus_exp(u)).ln().ln(),
        }
    }

    /// `ln L(y)` for `y ≥ 0`.
    fn ln_at(&self, y: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant(c0) => c0.ln(),
            SlowlyVarying::LogPower(a) => a * (E + y).ln().ln(),
            SlowlyVarying::IteratedLog => (E + (E + y).ln()).ln().ln(),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.ln_at(y).exp()
    }

    /// Exponential rate `r_L` with `L(e^{|x+h|}) / L(e^{|h|}) ≤ e^{r_L |x|}`.
    fn envelope_rate(&self) -> f64 {
        match *self {
            SlowlyVarying::Constant(_) => 0.0,
            SlowlyVarying::LogPower(a) => a.abs(),
            SlowlyVarying::IteratedLog => 1.0,
        }
    }
}

impl fmt::Display for SlowlyVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlowlyVarying::Constant(c) => write!(f, "const:{c}"),
            SlowlyVarying::LogPower(a) => write!(f, "log:{a}"),
            SlowlyVarying::IteratedLog => write!(f, "iterlog"),
        }
    }
}

/// `ln(e + e^u)`, stable for large `u`.
fn ln_e_plus_exp(u: f64) -> f64 {
    let m = u.max(1.0);
    m + ((1.0 - m).exp() + (u - m).exp()).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Exponential,
    Polynomial { nu: f64 },
}

/// A strictly positive comparison function together with its envelope
/// constants `(r, A)`, `c(x+h)/c(h) ≤ A e^{r|x|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonFunction {
    b: f64,
    slowly: SlowlyVarying,
    regime: Regime,
    negative_extension: Option<f64>,
    envelope: (f64, f64),
}

impl ComparisonFunction {
    pub fn exponential(b: f64, slowly: SlowlyVarying) -> Result<Self> {
        Self::build(b, slowly, Regime::Exponential, None)
    }

    /// `c(h) = (1+|h|)^ν L(1+|h|)`; its ratio limit is `1`, so the rate is 0.
    pub fn polynomial(nu: f64, slowly: SlowlyVarying) -> Result<Self> {
        Self::build(0.0, slowly, Regime::Polynomial { nu }, None)
    }

    /// `c ≡ 1`.
    pub fn constant_one() -> Self {
        Self::exponential(0.0, SlowlyVarying::Constant(1.0)).expect("constant comparison is valid")
    }

    /// `c(h) = e^{bh}`.
    pub fn pure_exponential(b: f64) -> Result<Self> {
        Self::exponential(b, SlowlyVarying::Constant(1.0))
    }

    pub fn build(
        b: f64,
        slowly: SlowlyVarying,
        regime: Regime,
        negative_extension: Option<f64>,
    ) -> Result<Self> {
        if !b.is_finite() {
            return Err(GaborError::Config(format!("comparison rate b must be finite, got {b}")));
        }
        if let Regime::Polynomial { nu } = regime {
            if b != 0.0 {
                return Err(GaborError::Config(
                    "polynomial comparison functions have rate b = 0".into(),
                ));
            }
            if !nu.is_finite() {
                return Err(GaborError::Config("polynomial exponent must be finite".into()));
            }
        }
        if let Some(tau) = negative_extension {
            if !tau.is_finite() {
                return Err(GaborError::Config("negative-side rate must be finite".into()));
            }
        }
        if let SlowlyVarying::Constant(c0) = slowly {
            if !(c0 > 0.0 && c0.is_finite()) {
                return Err(GaborError::Config("constant slowly varying factor must be positive".into()));
            }
        }
        let mut c = ComparisonFunction {
            b,
            slowly,
            regime,
            negative_extension,
            envelope: (0.0, 1.0),
        };
        c.envelope = c.compute_envelope();
        Ok(c)
    }

    /// Copy with `c(x) = e^{-τx}` on `x ≤ 0`.
    pub fn with_negative_extension(&self, tau: f64) -> Result<Self> {
        Self::build(self.b, self.slowly, self.regime, Some(tau))
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn slowly_varying(&self) -> SlowlyVarying {
        self.slowly
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn negative_extension(&self) -> Option<f64> {
        self.negative_extension
    }

    /// The rate `b` in `c(x+h)/c(h) → e^{bx}`.
    pub fn limit_rate(&self) -> f64 {
        match self.regime {
            Regime::Exponential => self.b,
            Regime::Polynomial { .. } => 0.0,
        }
    }

    /// `ln c(h)`.
    pub fn ln_eval(&self, h: f64) -> f64 {
        if let Some(tau) = self.negative_extension {
            if h <= 0.0 {
                return -tau * h;
            }
        }
        match self.regime {
            Regime::Exponential => self.b * h + self.slowly.ln_at_exp(h.abs()),
            Regime::Polynomial { nu } => {
                let y = 1.0 + h.abs();
                nu * y.ln() + self.slowly.ln_at(y)
            }
        }
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.ln_eval(h).exp()
    }

    /// `(r, A)` with `c(x+h)/c(h) ≤ A e^{r|x|}` for all real `x, h`.
    pub fn envelope(&self) -> (f64, f64) {
        self.envelope
    }

    fn compute_envelope(&self) -> (f64, f64) {
        let r_pos = match self.regime {
            Regime::Exponential => self.b.abs() + self.slowly.envelope_rate(),
            Regime::Polynomial { nu } => nu.abs() + self.slowly.envelope_rate(),
        };
        match self.negative_extension {
            None => (r_pos, 1.0),
            Some(tau) => {
                // The two branches meet at 0 with ratio c(0+)/c(0-) = L(1).
                let l1 = match self.regime {
                    Regime::Exponential => self.slowly.ln_at_exp(0.0).exp(),
                    Regime::Polynomial { .. } => self.slowly.ln_at(1.0).exp(),
                };
                (r_pos + tau.abs(), l1.max(1.0 / l1).max(1.0))
            }
        }
    }

    /// Largest `h` with `ln c(h)` below `ln_limit`, searched on `[0, h_cap]`.
    pub fn range_limit(&self, ln_limit: f64, h_cap: f64) -> f64 {
        if self.ln_eval(h_cap) < ln_limit {
            return h_cap;
        }
        let (mut lo, mut hi) = (0.0, h_cap);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.ln_eval(mid) < ln_limit {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn describe(&self) -> String {
        let base = match self.regime {
            Regime::Exponential => format!("exp(b={})*L[{}]", self.b, self.slowly),
            Regime::Polynomial { nu } => format!("poly(nu={nu})*L[{}]", self.slowly),
        };
        match self.negative_extension {
            Some(t) => format!("{base};neg_ext={t}"),
            None => base,
        }
    }
}
