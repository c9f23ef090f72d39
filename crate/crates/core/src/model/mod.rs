//! Signals, windows, lattices, comparison functions and coefficient grids.

pub mod comparison;
pub mod grid;
pub mod lattice;
pub mod signal;
pub mod window;

pub use comparison::{ComparisonFunction, Regime, SlowlyVarying};
pub use grid::CoefficientGrid;
pub use lattice::{IndexRange, Lattice};
pub use signal::{Extension, GrowthHint, PointMass, SampledTable, SignalExpr, SignalKind, SignalModel, Support};
pub use window::{DecayClass, GaussianAtom, UniformTable, Window, WindowShape, P_MAX};
