//! Reference algorithms and exact enumeration oracles.

mod exact;
mod greedy;

pub use exact::{
    binomial, brute_force_opt, exact_density_check, subsets_up_to, BruteForceResult, DensityCheck, BRUTE_FORCE_LIMIT,
    DENSITY_CHECK_LIMIT,
};
pub use greedy::{greedy, lazy_greedy, random_baseline, threshold_greedy};
