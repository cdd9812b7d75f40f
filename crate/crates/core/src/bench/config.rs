use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::adaptive::{validate_eps, Mode};
use crate::error::{Error, Result};
use crate::objectives::{load_instance, GeneratorSpec, SubmodularInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Adaptive,
    Greedy,
    Lazy,
    Threshold,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Adaptive,
        Algorithm::Greedy,
        Algorithm::Lazy,
        Algorithm::Threshold,
        Algorithm::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Adaptive => "adaptive",
            Algorithm::Greedy => "greedy",
            Algorithm::Lazy => "lazy",
            Algorithm::Threshold => "threshold",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}` (adaptive|greedy|lazy|threshold|random)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

impl InstanceSource {
    /// The `instance` column of reports.
    pub fn label(&self) -> String {
        match self {
            InstanceSource::File(p) => p.display().to_string(),
            InstanceSource::Generator(g) => g.to_string(),
        }
    }
}

/// Loaded once per source; generators without a pinned seed are rebuilt for
/// each run seed.
pub(crate) enum Prepared {
    Fixed(SubmodularInstance),
    PerSeed(GeneratorSpec),
}

impl Prepared {
    pub(crate) fn new(source: &InstanceSource) -> Result<Self> {
        Ok(match source {
            InstanceSource::File(p) => Prepared::Fixed(load_instance(p)?),
            InstanceSource::Generator(g) if g.fixed_seed().is_some() => Prepared::Fixed(g.generate(0)?),
            InstanceSource::Generator(g) => Prepared::PerSeed(g.clone()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub algorithms: Vec<Algorithm>,
    pub k: usize,
    pub eps: f64,
    pub mode: Mode,
    pub seeds: Vec<u64>,
    pub compute_opt: bool,
    /// Evaluate each round's queries on the rayon pool.
    pub parallel: bool,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub plotdata: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("at least one --algo is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("the seed range is empty".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("--k must be at least 1".into()));
        }
        validate_eps(self.eps).map_err(|e| Error::Config(e.to_string()))
    }
}

/// `a..b` (inclusive) or a single seed.
pub fn parse_seed_range(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("seed range `{s}` is not `<a>..<b>` or `<seed>`"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_seed_range("7").unwrap(), vec![7]);
        assert!(parse_seed_range("5..2").is_err());
        assert!(parse_seed_range("a..b").is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("sieve".parse::<Algorithm>().is_err());
    }
}
