use std::time::Instant;

use super::config::{Algorithm, ExperimentConfig, Prepared};
use super::report::ReportRow;
use crate::adaptive::{maximize, Mode, RunResult};
use crate::baselines::{brute_force_opt, greedy, lazy_greedy, random_baseline, threshold_greedy};
use crate::error::{Error, Result};
use crate::model::{InstrumentedOracle, SetFunction};
use crate::objectives::SubmodularInstance;

pub fn run_algorithm(
    algorithm: Algorithm,
    oracle: &mut InstrumentedOracle<'_>,
    k: usize,
    eps: f64,
    mode: Mode,
    seed: u64,
) -> Result<RunResult> {
    match algorithm {
        Algorithm::Adaptive => maximize(oracle, k, eps, mode, seed),
        Algorithm::Greedy => greedy(oracle, k),
        Algorithm::Lazy => lazy_greedy(oracle, k),
        Algorithm::Threshold => threshold_greedy(oracle, k, eps),
        Algorithm::Random => random_baseline(oracle, k, seed),
    }
}

/// One row per `(algorithm, seed)`, sorted by algorithm then seed.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    config.validate()?;
    let prepared = Prepared::new(&config.source)?;
    let label = config.source.label();
    let mut rows = Vec::with_capacity(config.algorithms.len() * config.seeds.len());
    let mut fixed_opt = None;
    for &seed in &config.seeds {
        let generated;
        let instance: &SubmodularInstance = match &prepared {
            Prepared::Fixed(inst) => inst,
            Prepared::PerSeed(spec) => {
                generated = spec.generate(seed)?;
                &generated
            }
        };
        let n = instance.ground_size();
        if config.k > n {
            return Err(Error::Config(format!("--k {} exceeds the ground set size {n}", config.k)));
        }
        let opt = if !config.compute_opt {
            None
        } else if let (Prepared::Fixed(_), Some(v)) = (&prepared, fixed_opt) {
            Some(v)
        } else {
            let v = brute_force_opt(&mut InstrumentedOracle::new(instance), config.k)?.opt_value;
            if matches!(prepared, Prepared::Fixed(_)) {
                fixed_opt = Some(v);
            }
            Some(v)
        };
        for &algorithm in &config.algorithms {
            let mut oracle = InstrumentedOracle::new(instance).with_parallel(config.parallel);
            let start = Instant::now();
            let result = run_algorithm(algorithm, &mut oracle, config.k, config.eps, config.mode, seed)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(ReportRow {
                instance: label.clone(),
                objective: instance.kind().to_string(),
                n,
                k: config.k,
                eps: config.eps,
                mode: config.mode.to_string(),
                seed,
                algorithm: algorithm.name().to_string(),
                value: result.value,
                opt_value: opt,
                ratio: opt.map(|o| if o > 0.0 { result.value / o } else { 1.0 }),
                queries: result.queries,
                rounds: result.rounds,
                failed: result.failed,
                wall_ms,
            });
        }
    }
    rows.sort_by(|a, b| a.algorithm.cmp(&b.algorithm).then(a.seed.cmp(&b.seed)));
    Ok(rows)
}

/// Runs every config in order; rows are grouped by config, then sorted
/// within each by algorithm and seed.
pub fn run_batch(configs: &[ExperimentConfig]) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    for c in configs {
        rows.extend(run_experiment(c)?);
    }
    Ok(rows)
}
