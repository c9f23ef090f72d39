use num_complex::Complex64;

use super::lattice::Lattice;
use crate::error::{GaborError, Result};

/// Dense complex grid over a lattice's index ranges, stored k-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    lattice: Lattice,
    values: Vec<Complex64>,
    signal_id: String,
    window_id: String,
}

impl CoefficientGrid {
    pub fn new(
        lattice: Lattice,
        values: Vec<Complex64>,
        signal_id: impl Into<String>,
        window_id: impl Into<String>,
    ) -> Result<Self> {
        lattice.validate()?;
        if values.len() != lattice.node_count() {
            return Err(GaborError::Config(format!(
                "grid has {} values but the lattice ranges hold {} nodes",
                values.len(),
                lattice.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            let (k, n) = Self::node_of(&lattice, i);
            return Err(GaborError::Numeric(format!("non-finite grid value at (k={k}, n={n})")));
        }
        Ok(CoefficientGrid {
            lattice,
            values,
            signal_id: signal_id.into(),
            window_id: window_id.into(),
        })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        CoefficientGrid {
            values: vec![Complex64::new(0.0, 0.0); lattice.node_count()],
            lattice,
            signal_id: "zero".into(),
            window_id: "none".into(),
        }
    }

    pub fn from_fn(lattice: Lattice, id: impl Into<String>, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let values = lattice
            .k_range
            .iter()
            .flat_map(|k| lattice.n_range.iter().map(move |n| (k, n)))
            .map(|(k, n)| f(k, n))
            .collect();
        Self::new(lattice, values, id, "synthetic")
    }

    fn node_of(lattice: &Lattice, i: usize) -> (i64, i64) {
        let width = lattice.n_range.len();
        (lattice.k_range.lo + (i / width) as i64, lattice.n_range.lo + (i % width) as i64)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn signal_id(&self) -> &str {
        &self.signal_id
    }

    pub fn window_id(&self) -> &str {
        &self.window_id
    }

    pub fn index(&self, k: i64, n: i64) -> Option<usize> {
        let lat = &self.lattice;
        if !lat.k_range.contains(k) || !lat.n_range.contains(n) {
            return None;
        }
        Some((k - lat.k_range.lo) as usize * lat.n_range.len() + (n - lat.n_range.lo) as usize)
    }

    /// Value at `(k, n)`, zero outside the stored ranges.
    pub fn get(&self, k: i64, n: i64) -> Complex64 {
        self.index(k, n)
            .map(|i| self.values[i])
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    pub fn row(&self, k: i64) -> &[Complex64] {
        let w = self.lattice.n_range.len();
        let i = self.index(k, self.lattice.n_range.lo).expect("k inside range");
        &self.values[i..i + w]
    }

    /// `(k, n, value)` in k-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| {
            let (k, n) = Self::node_of(&self.lattice, i);
            (k, n, v)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_all_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    pub fn scaled(&self, s: Complex64) -> Result<Self> {
        Self::new(
            self.lattice,
            self.values.iter().map(|v| v * s).collect(),
            self.signal_id.clone(),
            self.window_id.clone(),
        )
    }

    pub fn with_provenance(mut self, signal_id: impl Into<String>, window_id: impl Into<String>) -> Self {
        self.signal_id = signal_id.into();
        self.window_id = window_id.into();
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_k_major() {
        let lat = Lattice::symmetric(1.0, 1.0, 1, 2).unwrap();
        let g = CoefficientGrid::from_fn(lat, "t", |k, n| Complex64::new(k as f64, n as f64)).unwrap();
        let nodes: Vec<_> = g.iter().take(3).map(|(k, n, _)| (k, n)).collect();
        assert_eq!(nodes, vec![(-1, -2), (-1, -1), (-1, 0)]);
        assert_eq!(g.get(1, -2), Complex64::new(1.0, -2.0));
        assert_eq!(g.get(5, 0), Complex64::new(0.0, 0.0));
        assert_eq!(g.row(0).len(), 5);
    }

    #[test]
    fn rejects_non_finite_and_wrong_sizes() {
        let lat = Lattice::symmetric(1.0, 1.0, 1, 1).unwrap();
        assert!(CoefficientGrid::new(lat, vec![Complex64::new(0.0, 0.0); 4], "a", "b").is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); 9];
        v[4] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            CoefficientGrid::new(lat, v, "a", "b"),
            Err(GaborError::Numeric(_))
        ));
    }
}
