use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{CoverageInstance, FacilityLocationInstance, SubmodularInstance};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

const COVERAGE_STREAM: u64 = 0xc0;
const FACILITY_STREAM: u64 = 0xfa;

/// Random coverage instance. Each `(set, universe element)` membership is
/// included independently with probability `density`; weights are uniform in
/// `[0, weight_max]`. A set that ends up empty is given one uniformly drawn
/// universe element.
pub fn gen_random_coverage(
    n_sets: usize,
    n_universe: usize,
    density: f64,
    weight_max: f64,
    seed: u64,
) -> Result<CoverageInstance> {
    if n_sets == 0 || n_universe == 0 {
        return Err(Error::Parameter("generator sizes must be at least 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Parameter(format!("density {density} not in (0, 1]")));
    }
    if !(weight_max.is_finite() && weight_max >= 0.0) {
        return Err(Error::Parameter(format!("weight_max {weight_max} must be finite and nonnegative")));
    }
    let mut rng = stream_rng(seed, COVERAGE_STREAM);
    let weights: Vec<f64> = (0..n_universe).map(|_| rng.gen_range(0.0..=weight_max)).collect();
    let membership: Vec<Vec<usize>> = (0..n_sets)
        .map(|_| {
            let mut covered: Vec<usize> = (0..n_universe).filter(|_| rng.gen_bool(density)).collect();
            if covered.is_empty() {
                covered.push(rng.gen_range(0..n_universe));
            }
            covered
        })
        .collect();
    CoverageInstance::new(weights, membership)
}

/// Random facility location instance with similarities uniform in `[0, 1)`.
pub fn gen_random_facility_location(n_items: usize, n_clients: usize, seed: u64) -> Result<FacilityLocationInstance> {
    if n_items == 0 || n_clients == 0 {
        return Err(Error::Parameter("generator sizes must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, FACILITY_STREAM);
    let rows = (0..n_clients)
        .map(|_| (0..n_items).map(|_| rng.gen::<f64>()).collect())
        .collect();
    FacilityLocationInstance::new(rows)
}

/// Inline generator description, e.g.
/// `coverage:n=1000,u=5000,density=0.01,wmax=1.0` or `facloc:n=200,clients=100`.
///
/// An optional `seed=<u64>` pins the instance; without it the caller supplies
/// the seed (the harness uses the run seed).
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorSpec {
    Coverage {
        n: usize,
        universe: usize,
        density: f64,
        weight_max: f64,
        seed: Option<u64>,
    },
    FacilityLocation {
        n: usize,
        clients: usize,
        seed: Option<u64>,
    },
}

impl GeneratorSpec {
    pub fn n(&self) -> usize {
        match self {
            GeneratorSpec::Coverage { n, .. } | GeneratorSpec::FacilityLocation { n, .. } => *n,
        }
    }

    pub fn fixed_seed(&self) -> Option<u64> {
        match self {
            GeneratorSpec::Coverage { seed, .. } | GeneratorSpec::FacilityLocation { seed, .. } => *seed,
        }
    }

    /// Generates with the pinned seed if present, else `default_seed`.
    pub fn generate(&self, default_seed: u64) -> Result<SubmodularInstance> {
        let seed = self.fixed_seed().unwrap_or(default_seed);
        Ok(match *self {
            GeneratorSpec::Coverage {
                n,
                universe,
                density,
                weight_max,
                ..
            } => gen_random_coverage(n, universe, density, weight_max, seed)?.into(),
            GeneratorSpec::FacilityLocation { n, clients, .. } => {
                gen_random_facility_location(n, clients, seed)?.into()
            }
        })
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("generator spec `{s}`: {msg}"));
        let (family, params) = s.split_once(':').ok_or_else(|| bad("expected `<family>:<key>=<value>,...`".into()))?;
        let mut kv = Vec::new();
        for pair in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| bad(format!("`{pair}` is not key=value")))?;
            kv.push((k.trim(), v.trim()));
        }
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        fn num<T: FromStr>(key: &str, raw: Option<&str>, bad: &dyn Fn(String) -> Error) -> Result<T> {
            let raw = raw.ok_or_else(|| bad(format!("missing `{key}`")))?;
            raw.parse().map_err(|_| bad(format!("`{key}={raw}` is not a valid number")))
        }
        let seed = get("seed").map(|_| num::<u64>("seed", get("seed"), &bad)).transpose()?;
        let allowed: &[&str] = match family.trim() {
            "coverage" => &["n", "u", "density", "wmax", "seed"],
            "facloc" => &["n", "clients", "seed"],
            other => return Err(bad(format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(bad(format!("unknown key `{k}`")));
        }
        Ok(match family.trim() {
            "coverage" => GeneratorSpec::Coverage {
                n: num("n", get("n"), &bad)?,
                universe: num("u", get("u"), &bad)?,
                density: num("density", get("density"), &bad)?,
                weight_max: get("wmax").map(|_| num("wmax", get("wmax"), &bad)).transpose()?.unwrap_or(1.0),
                seed,
            },
            _ => GeneratorSpec::FacilityLocation {
                n: num("n", get("n"), &bad)?,
                clients: num("clients", get("clients"), &bad)?,
                seed,
            },
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Coverage {
                n,
                universe,
                density,
                weight_max,
                seed,
            } => {
                write!(f, "coverage:n={n},u={universe},density={density},wmax={weight_max}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
            GeneratorSpec::FacilityLocation { n, clients, seed } => {
                write!(f, "facloc:n={n},clients={clients}")?;
                if let Some(s) = seed {
                    write!(f, ",seed={s}")?;
                }
                Ok(())
            }
        }
    }
}
