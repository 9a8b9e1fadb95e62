//! Line-spectrum estimation with von Mises frequency priors.
//!
//! The crate provides the MAP estimator solved by alternating projections
//! ([`map::estimate`]), an ESPRIT baseline, deterministic and approximate
//! hybrid Cramér-Rao bounds, and a reproducible Monte Carlo harness.

pub mod bench;
pub mod bounds;
pub mod circular;
pub mod error;
pub mod esprit;
pub mod map;
pub mod output;
pub mod projection;
pub mod scenario_file;
pub mod signal;

pub use bench::{run_scenario, Estimator, FrequencySpec, Scenario};
pub use circular::VonMisesPrior;
pub use error::{Error, Result};
pub use map::{estimate, EstimateResult, SolverConfig};
pub use signal::{CMatrix, CVector};
