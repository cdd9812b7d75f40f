//! Monotone submodular maximization under a cardinality constraint with
//! few adaptive rounds, plus classical baselines and a benchmark harness.

pub mod adaptive;
pub mod baselines;
pub mod bench;
pub mod error;
pub mod model;
pub mod objectives;
pub mod rng;

pub use error::{Error, Result};
