//! Gabor frames on separable lattices and Tauberian detection of
//! S-asymptotic behaviour from STFT coefficients.

pub mod asymptotics;
pub mod error;
pub mod frame;
pub mod growth;
pub mod io;
pub mod model;
pub mod stft;

pub use error::{GaborError, Result};
