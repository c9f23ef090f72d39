use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct IndexRange {
    pub lo: i64,
    pub hi: i64,
}

impl IndexRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IndexRange { lo, hi }
    }

    pub fn symmetric(half: i64) -> Self {
        IndexRange { lo: -half, hi: half }
    }

    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    /// Largest absolute index in the range.
    pub fn max_abs(&self) -> i64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Number of distinct values `|i|` the range covers.
    pub fn shell_count(&self) -> usize {
        let mut shells: Vec<i64> = self.iter().map(|i| i.abs()).collect();
        shells.sort_unstable();
        shells.dedup();
        shells.len()
    }

    pub fn scaled(&self, factor: i64) -> Self {
        IndexRange {
            lo: self.lo * factor,
            hi: self.hi * factor,
        }
    }
}

impl From<[i64; 2]> for IndexRange {
    fn from(v: [i64; 2]) -> Self {
        IndexRange { lo: v[0], hi: v[1] }
    }
}

impl From<IndexRange> for [i64; 2] {
    fn from(r: IndexRange) -> Self {
        [r.lo, r.hi]
    }
}

/// Separable time-frequency lattice `αℤ × βℤ`, truncated to finite index
/// ranges for computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub alpha: f64,
    pub beta: f64,
    pub k_range: IndexRange,
    pub n_range: IndexRange,
}

impl Lattice {
    pub fn new(alpha: f64, beta: f64, k_range: IndexRange, n_range: IndexRange) -> Result<Self> {
        let lat = Lattice {
            alpha,
            beta,
            k_range,
            n_range,
        };
        lat.validate()?;
        Ok(lat)
    }

    pub fn symmetric(alpha: f64, beta: f64, k_half: i64, n_half: i64) -> Result<Self> {
        Lattice::new(
            alpha,
            beta,
            IndexRange::symmetric(k_half),
            IndexRange::symmetric(n_half),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(GaborError::Config(format!(
                "lattice alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(GaborError::Config(format!(
                "lattice beta must be positive, got {}",
                self.beta
            )));
        }
        if self.k_range.is_empty() || self.n_range.is_empty() {
            return Err(GaborError::Config("lattice index ranges must be non-empty".into()));
        }
        Ok(())
    }

    pub fn density_product(&self) -> f64 {
        self.alpha * self.beta
    }

    pub fn node_count(&self) -> usize {
        self.k_range.len() * self.n_range.len()
    }

    /// Same lattice with both index ranges widened by `factor`.
    pub fn widened(&self, factor: i64) -> Self {
        Lattice {
            k_range: self.k_range.scaled(factor),
            n_range: self.n_range.scaled(factor),
            ..*self
        }
    }

    pub fn with_ranges(&self, k_range: IndexRange, n_range: IndexRange) -> Self {
        Lattice {
            k_range,
            n_range,
            ..*self
        }
    }

    /// Time interval `[α k_min, α k_max]` spanned by the truncation.
    pub fn time_span(&self) -> (f64, f64) {
        (
            self.alpha * self.k_range.lo as f64,
            self.alpha * self.k_range.hi as f64,
        )
    }

    pub fn same_geometry(&self, other: &Lattice) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_steps() {
        assert!(Lattice::symmetric(0.0, 1.0, 2, 2).is_err());
        assert!(Lattice::symmetric(1.0, -1.0, 2, 2).is_err());
        assert!(Lattice::new(1.0, 1.0, IndexRange::new(3, 2), IndexRange::symmetric(1)).is_err());
    }

    #[test]
    fn density_and_counts() {
        let lat = Lattice::symmetric(0.5, 1.0, 40, 16).unwrap();
        assert_eq!(lat.density_product(), 0.5);
        assert_eq!(lat.node_count(), 81 * 33);
        assert_eq!(lat.k_range.shell_count(), 41);
        assert_eq!(IndexRange::new(-2, 5).shell_count(), 6);
    }
}
