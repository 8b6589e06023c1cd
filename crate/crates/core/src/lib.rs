//! Averages of products of characteristic polynomials `E[∏ det(λ_i − X)]`
//! for GOE and GUE matrices with weight `e^{−(N/2) tr X²}`, optionally with a
//! deterministic external source.
//!
//! Three independent routes are provided and cross-checked: Monte Carlo
//! sampling, exact finite-N dual integral representations evaluated by
//! closed-form Gaussian moments, and small-N Wick expansions.

pub mod asymptotics;
pub mod cli;
pub mod complex_serde;
pub mod dual;
pub mod ensembles;
pub mod error;
pub mod hiz;
pub mod linalg;
pub mod stats;
pub mod value;

pub use error::{Error, Result};
pub use value::{CorrelatorValue, Provenance};
