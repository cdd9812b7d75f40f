//! Sets, oracles and adaptivity accounting.

mod oracle;
mod set;

pub use oracle::{
    spot_check_submodular, Counterexample, Counters, FilterProbe, InstrumentedOracle, SetFunction,
    SpotCheck, Violation, CHECK_TOLERANCE,
};
pub use set::{ElementSet, GroundSet, Iter};
