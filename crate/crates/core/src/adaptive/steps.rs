use serde::Serialize;

use super::params::AlgoParams;
use super::sampling::SubsetSampler;
use crate::error::{Error, Result};
use crate::model::{ElementSet, InstrumentedOracle};
use crate::rng::Rng;

/// Mutable state of one run at a fixed guess.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState {
    pub set: ElementSet,
    /// Cached `f(S)`.
    pub value: f64,
    /// `f(S)` at the start of the current phase.
    pub old: f64,
    /// Unfiltered candidate pool `U_t`.
    pub pool: ElementSet,
    /// Iteration index within the current phase.
    pub t: usize,
}

impl PhaseState {
    /// `S = ∅`, `f(∅) = 0`, `U = V`.
    pub fn new(n: usize) -> Self {
        PhaseState {
            set: ElementSet::new(n),
            value: 0.0,
            old: 0.0,
            pool: ElementSet::full(n),
            t: 0,
        }
    }

    /// `Old ← f(S)`, `U ← V ∖ S`, `t ← 0`.
    pub fn start_phase(&mut self) {
        self.old = self.value;
        self.pool = ElementSet::full(self.set.capacity()).difference(&self.set);
        self.t = 0;
    }

    fn gap(&self, params: &AlgoParams) -> f64 {
        params.guess - self.old
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GainOutcome {
    Accepted {
        added: ElementSet,
        gain: f64,
        /// The sampled set did not fit under `k` and only its lowest-index
        /// elements were added.
        truncated: bool,
    },
    Rejected {
        best_gain: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterEstimates {
    pub batch_index: usize,
    /// Mean of `f(R_{i,j} | S)` over the selected batch.
    pub avg: f64,
    /// Pool elements in ascending order.
    pub candidates: Vec<usize>,
    /// `v[c]` is the mean over `j` of `f(candidates[c] | S ∪ R_{i,j})`.
    pub v: Vec<f64>,
    pub removed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterOutcome {
    Filtered(FilterEstimates),
    Failure,
}

fn check_step(state: &PhaseState, params: &AlgoParams, step: &str) -> Result<(f64, usize)> {
    if state.pool.is_empty() {
        return Err(Error::Contract(format!("{step} called with an empty pool")));
    }
    let gap = state.gap(params);
    if gap <= 0.0 {
        return Err(Error::Contract(format!("{step} called with M - Old = {gap} <= 0")));
    }
    Ok((gap, params.ell.min(state.pool.len())))
}

fn draw(sampler: &mut SubsetSampler, size: usize, count: usize, rng: &mut Rng) -> Vec<ElementSet> {
    (0..count).map(|_| sampler.sample(size, rng)).collect()
}

/// Samples `m` random sets from the pool, evaluated as one round, and adds
/// the best one if its gain meets the acceptance threshold.
pub fn gain_step(
    state: &mut PhaseState,
    params: &AlgoParams,
    oracle: &mut InstrumentedOracle<'_>,
    rng: &mut Rng,
) -> Result<GainOutcome> {
    let (gap, size) = check_step(state, params, "gain_step")?;
    let mut sampler = SubsetSampler::new(&state.pool);
    let samples = draw(&mut sampler, size, params.samples, rng);
    let gains = oracle.batch_set_gains(&state.set, &samples)?;
    let mut best = 0;
    for (j, g) in gains.iter().enumerate() {
        if *g > gains[best] {
            best = j;
        }
    }
    let threshold = params.gain_threshold_factor * (size as f64 / params.k as f64) * gap;
    if gains[best] < threshold {
        return Ok(GainOutcome::Rejected { best_gain: gains[best] });
    }
    let chosen = &samples[best];
    state.pool.difference_with(chosen);
    let room = params.k - state.set.len();
    if chosen.len() <= room {
        state.set.union_with(chosen);
        state.value += gains[best];
        return Ok(GainOutcome::Accepted {
            added: chosen.clone(),
            gain: gains[best],
            truncated: false,
        });
    }
    let kept = ElementSet::from_indices(chosen.capacity(), chosen.iter().take(room))?;
    state.set.union_with(&kept);
    let before = state.value;
    state.value = oracle.evaluate(&state.set)?;
    Ok(GainOutcome::Accepted {
        added: kept,
        gain: state.value - before,
        truncated: true,
    })
}

/// Up to `B` batches of `m` samples, one round each. The first batch whose
/// average set gain and summed element estimates are both small enough is
/// used to drop every element with a low estimate from the pool.
pub fn filter_step(
    state: &mut PhaseState,
    params: &AlgoParams,
    oracle: &mut InstrumentedOracle<'_>,
    rng: &mut Rng,
) -> Result<FilterOutcome> {
    let (gap, size) = check_step(state, params, "filter_step")?;
    let unit = gap / params.k as f64;
    let candidates = state.pool.to_vec();
    let pool_len = candidates.len() as f64;
    let mut sampler = SubsetSampler::new(&state.pool);
    let m = params.samples as f64;
    for batch_index in 0..params.batches {
        let samples = draw(&mut sampler, size, params.samples, rng);
        let probe = oracle.batch_filter_probe(&state.set, &samples, &candidates)?;
        let avg = probe.set_gains.iter().sum::<f64>() / m;
        let mut v = vec![0.0; candidates.len()];
        for row in &probe.element_gains {
            for (acc, g) in v.iter_mut().zip(row) {
                *acc += g;
            }
        }
        for x in v.iter_mut() {
            *x /= m;
        }
        let total: f64 = v.iter().sum();
        let avg_ok = avg <= params.batch_avg_factor * (size as f64 / params.k as f64) * gap;
        let sum_ok = total <= pool_len * params.elem_sum_factor * unit;
        if avg_ok && sum_ok {
            let cut = params.filter_factor * unit;
            let removed: Vec<usize> = candidates
                .iter()
                .zip(&v)
                .filter(|(_, x)| **x < cut)
                .map(|(e, _)| *e)
                .collect();
            for &e in &removed {
                state.pool.remove(e);
            }
            // Kept elements each carry at least `cut`, and the estimates sum to
            // at most `|U|(1−8s)·unit`.
            debug_assert!(
                removed.len() as f64 >= pool_len * params.slack / (1.0 - 7.0 * params.slack) - 1e-9 * pool_len,
                "filter removed {} of {pool_len}",
                removed.len()
            );
            return Ok(FilterOutcome::Filtered(FilterEstimates {
                batch_index,
                avg,
                candidates,
                v,
                removed,
            }));
        }
    }
    Ok(FilterOutcome::Failure)
}
