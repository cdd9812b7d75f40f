use rayon::prelude::*;
use serde::Serialize;

use super::params::{build_guess_ladder, derive_params, AlgoParams, Mode};
use super::steps::{filter_step, gain_step, FilterOutcome, GainOutcome, PhaseState};
use crate::error::{Error, Result};
use crate::model::{Counters, ElementSet, InstrumentedOracle};
use crate::rng::{stream_rng, Rng};

/// First rng stream used for ladder guesses; guess `i` uses `GUESS_STREAM + i`.
pub const GUESS_STREAM: u64 = 0x100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Gain,
    Filter,
    Fail,
}

/// One inner-loop iteration of a run. `value` and `set_size` are taken after
/// the iteration; `rounds` is what the iteration cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub phase: usize,
    pub t: usize,
    pub branch: Branch,
    pub value: f64,
    pub set_size: usize,
    pub pool_before: usize,
    pub pool_after: usize,
    pub rounds: u64,
    pub truncated: bool,
}

/// Per-guess results kept by [`maximize`].
#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    pub m0: f64,
    pub guesses: Vec<f64>,
    pub runs: Vec<RunResult>,
    pub best_index: usize,
    /// `1 + max` over guesses: the round count if guesses run side by side.
    pub parallel_rounds: u64,
    /// Guesses dropped from the full ladder because they exceed `k·M0`.
    pub trimmed: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub set: ElementSet,
    pub value: f64,
    pub queries: u64,
    pub rounds: u64,
    pub failed: bool,
    pub trace: Vec<TraceRecord>,
    /// The guess `M` for single-guess runs.
    pub guess: Option<f64>,
    pub ladder: Option<Box<LadderReport>>,
}

impl RunResult {
    pub(crate) fn plain(set: ElementSet, value: f64, counters: Counters, trace: Vec<TraceRecord>) -> Self {
        RunResult {
            set,
            value,
            queries: counters.queries,
            rounds: counters.rounds,
            failed: false,
            trace,
            guess: None,
            ladder: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseEnd {
    /// The phase reached `Old + phase_gain`.
    Progress,
    /// Stop value reached, `|S| = k`, pool exhausted or `M ≤ Old`.
    Finished,
    /// A filter step failed twice in a row.
    Failed,
}

/// Runs one phase from the current state, appending to `trace`.
pub fn run_phase(
    state: &mut PhaseState,
    params: &AlgoParams,
    oracle: &mut InstrumentedOracle<'_>,
    rng: &mut Rng,
    phase: usize,
    trace: &mut Vec<TraceRecord>,
) -> Result<PhaseEnd> {
    state.start_phase();
    loop {
        if state.value >= params.stop_value || state.set.len() >= params.k {
            return Ok(PhaseEnd::Finished);
        }
        if state.value - state.old >= params.phase_gain {
            return Ok(PhaseEnd::Progress);
        }
        if state.pool.is_empty() || params.guess - state.old <= 0.0 {
            return Ok(PhaseEnd::Finished);
        }
        state.t += 1;
        let pool_before = state.pool.len();
        let start = oracle.counters().rounds;
        let mut record = |state: &PhaseState, branch, truncated, start: u64, oracle: &InstrumentedOracle<'_>| {
            trace.push(TraceRecord {
                phase,
                t: state.t,
                branch,
                value: state.value,
                set_size: state.set.len(),
                pool_before,
                pool_after: state.pool.len(),
                rounds: oracle.counters().rounds - start,
                truncated,
            })
        };
        match gain_step(state, params, oracle, rng)? {
            GainOutcome::Accepted { truncated, .. } => {
                record(state, Branch::Gain, truncated, start, oracle);
                if truncated {
                    return Ok(PhaseEnd::Finished);
                }
                continue;
            }
            GainOutcome::Rejected { .. } => {}
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            match filter_step(state, params, oracle, rng)? {
                FilterOutcome::Filtered(_) => {
                    record(state, Branch::Filter, false, start, oracle);
                    break;
                }
                FilterOutcome::Failure => {
                    record(state, Branch::Fail, false, start, oracle);
                    if attempts == 2 {
                        return Ok(PhaseEnd::Failed);
                    }
                }
            }
        }
    }
}

fn run_guess(oracle: &mut InstrumentedOracle<'_>, params: &AlgoParams, rng: &mut Rng) -> Result<RunResult> {
    let start = oracle.counters();
    let mut state = PhaseState::new(params.n);
    let mut trace = Vec::new();
    let mut failed = false;
    let mut phase = 0;
    loop {
        phase += 1;
        match run_phase(&mut state, params, oracle, rng, phase, &mut trace)? {
            PhaseEnd::Progress => continue,
            PhaseEnd::Finished => break,
            PhaseEnd::Failed => {
                failed = true;
                break;
            }
        }
    }
    let end = oracle.counters();
    Ok(RunResult {
        set: state.set,
        value: state.value,
        queries: end.queries - start.queries,
        rounds: end.rounds - start.rounds,
        failed,
        trace,
        guess: Some(params.guess),
        ladder: None,
    })
}

/// The adaptive algorithm at a single guess `M` for the optimum.
pub fn run_with_guess(
    oracle: &mut InstrumentedOracle<'_>,
    k: usize,
    eps: f64,
    guess: f64,
    mode: Mode,
    seed: u64,
) -> Result<RunResult> {
    let params = derive_params(oracle.ground_size(), k, eps, guess, mode)?;
    run_guess(oracle, &params, &mut stream_rng(seed, GUESS_STREAM))
}

/// `max_e f({e})` in one round of `n` queries.
pub fn singleton_max(oracle: &mut InstrumentedOracle<'_>) -> Result<f64> {
    let n = oracle.ground_size();
    let gains = oracle.batch_element_gains(&ElementSet::new(n), &(0..n).collect::<Vec<_>>())?;
    let m0 = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m0 > 0.0 {
        Ok(m0)
    } else {
        Err(Error::Degenerate(format!("largest singleton value is {m0}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaximizeOptions {
    /// Skip guesses above `k·M0`, which can never be below the optimum.
    pub trim_ladder: bool,
    /// Run guesses on the rayon pool with forked oracles.
    pub parallel_guesses: bool,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            trim_ladder: true,
            parallel_guesses: false,
        }
    }
}

pub fn maximize(oracle: &mut InstrumentedOracle<'_>, k: usize, eps: f64, mode: Mode, seed: u64) -> Result<RunResult> {
    maximize_with(oracle, k, eps, mode, seed, MaximizeOptions::default())
}

/// Runs every ladder guess and keeps the best result. Reported rounds are
/// `1 + Σ` over guesses; the ladder report also carries `1 + max`.
pub fn maximize_with(
    oracle: &mut InstrumentedOracle<'_>,
    k: usize,
    eps: f64,
    mode: Mode,
    seed: u64,
    options: MaximizeOptions,
) -> Result<RunResult> {
    let n = oracle.ground_size();
    derive_params(n, k, eps, 1.0, mode)?;
    let start = oracle.counters();
    let m0 = singleton_max(oracle)?;
    let full = build_guess_ladder(m0, eps, n);
    let cap = k as f64 * m0;
    let guesses: Vec<f64> = if options.trim_ladder {
        full.iter().copied().filter(|&g| g <= cap).collect()
    } else {
        full.clone()
    };
    let trimmed = full.len() - guesses.len();
    let params: Vec<AlgoParams> = guesses
        .iter()
        .map(|&g| derive_params(n, k, eps, g, mode))
        .collect::<Result<_>>()?;
    let one = |(i, p): (usize, &AlgoParams), oracle: &mut InstrumentedOracle<'_>| {
        run_guess(oracle, p, &mut stream_rng(seed, GUESS_STREAM + i as u64))
    };
    let runs: Vec<RunResult> = if options.parallel_guesses {
        let base = oracle.fork();
        let runs = params
            .par_iter()
            .enumerate()
            .map(|item| one(item, &mut base.fork()))
            .collect::<Result<Vec<_>>>()?;
        for r in &runs {
            oracle.absorb(Counters {
                queries: r.queries,
                rounds: r.rounds,
            });
        }
        runs
    } else {
        params
            .iter()
            .enumerate()
            .map(|item| one(item, oracle))
            .collect::<Result<Vec<_>>>()?
    };
    let mut best_index = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best_index].value {
            best_index = i;
        }
    }
    let end = oracle.counters();
    let best = &runs[best_index];
    let parallel_rounds = 1 + runs.iter().map(|r| r.rounds).max().unwrap_or(0);
    Ok(RunResult {
        set: best.set.clone(),
        value: best.value,
        queries: end.queries - start.queries,
        rounds: end.rounds - start.rounds,
        failed: best.failed,
        trace: best.trace.clone(),
        guess: best.guess,
        ladder: Some(Box::new(LadderReport {
            m0,
            guesses,
            best_index,
            parallel_rounds,
            trimmed,
            runs,
        })),
    })
}
