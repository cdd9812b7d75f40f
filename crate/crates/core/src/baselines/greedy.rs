use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::adaptive::{sample_uniform_subset, singleton_max, Branch, RunResult, TraceRecord};
use crate::error::{Error, Result};
use crate::model::{ElementSet, InstrumentedOracle};
use crate::rng::stream_rng;

const RANDOM_STREAM: u64 = 0x7a;

fn check_k(oracle: &InstrumentedOracle<'_>, k: usize) -> Result<usize> {
    let n = oracle.ground_size();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} outside [1, {n}]")));
    }
    Ok(n)
}

fn push_trace(trace: &mut Vec<TraceRecord>, set: &ElementSet, value: f64, pool: usize, rounds: u64) {
    trace.push(TraceRecord {
        phase: 1,
        t: trace.len() + 1,
        branch: Branch::Gain,
        value,
        set_size: set.len(),
        pool_before: pool,
        pool_after: pool - 1,
        rounds,
        truncated: false,
    });
}

/// Classical greedy: each iteration evaluates every remaining marginal in
/// one round and adds the lowest-index maximizer.
pub fn greedy(oracle: &mut InstrumentedOracle<'_>, k: usize) -> Result<RunResult> {
    let n = check_k(oracle, k)?;
    let start = oracle.counters();
    let mut set = ElementSet::new(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut value = 0.0;
    let mut trace = Vec::new();
    while set.len() < k {
        let gains = oracle.batch_element_gains(&set, &remaining)?;
        let mut best = 0;
        for (i, g) in gains.iter().enumerate() {
            if *g > gains[best] {
                best = i;
            }
        }
        if gains[best] <= 0.0 {
            break;
        }
        set.insert(remaining[best]);
        value += gains[best];
        push_trace(&mut trace, &set, value, remaining.len(), 1);
        remaining.remove(best);
    }
    let end = oracle.counters();
    Ok(RunResult::plain(set, value, end.since(start), trace))
}

#[derive(PartialEq)]
struct Bound {
    gain: f64,
    element: usize,
    /// `|S|` when `gain` was computed.
    stamp: usize,
}

impl Eq for Bound {}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.element.cmp(&self.element))
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy with stale upper bounds kept in a max-heap. A popped bound computed
/// against an older solution is refreshed with one query and pushed back;
/// a fresh one at the top is the lowest-index maximizer, so the output set
/// matches [`greedy`].
pub fn lazy_greedy(oracle: &mut InstrumentedOracle<'_>, k: usize) -> Result<RunResult> {
    let n = check_k(oracle, k)?;
    let start = oracle.counters();
    let mut set = ElementSet::new(n);
    let mut value = 0.0;
    let mut trace = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    let initial = oracle.batch_element_gains(&set, &all)?;
    let mut heap: BinaryHeap<Bound> = initial
        .into_iter()
        .enumerate()
        .map(|(element, gain)| Bound { gain, element, stamp: 0 })
        .collect();
    let mut rounds_at_last = oracle.counters().rounds;
    while set.len() < k {
        let Some(top) = heap.pop() else { break };
        if top.stamp != set.len() {
            let gain = oracle.batch_element_gains(&set, &[top.element])?[0];
            heap.push(Bound {
                gain,
                element: top.element,
                stamp: set.len(),
            });
            continue;
        }
        if top.gain <= 0.0 {
            break;
        }
        set.insert(top.element);
        value += top.gain;
        let now = oracle.counters().rounds;
        push_trace(&mut trace, &set, value, heap.len() + 1, now - rounds_at_last);
        rounds_at_last = now;
    }
    let end = oracle.counters();
    Ok(RunResult::plain(set, value, end.since(start), trace))
}

/// Descending thresholds `M0, M0(1−eps), …` down to `eps·M0/n`; at each
/// threshold the elements are scanned by index and any element whose
/// marginal meets it is added. One query and one round per marginal.
pub fn threshold_greedy(oracle: &mut InstrumentedOracle<'_>, k: usize, eps: f64) -> Result<RunResult> {
    let n = check_k(oracle, k)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0, 1)")));
    }
    let start = oracle.counters();
    let m0 = singleton_max(oracle)?;
    let floor = eps * m0 / n as f64;
    let mut tau = m0;
    let mut set = ElementSet::new(n);
    let mut value = 0.0;
    let mut trace = Vec::new();
    let mut rounds_at_last = oracle.counters().rounds;
    'sweep: while tau >= floor {
        for e in 0..n {
            if set.len() >= k {
                break 'sweep;
            }
            if set.contains(e) {
                continue;
            }
            let gain = oracle.batch_element_gains(&set, &[e])?[0];
            if gain >= tau {
                set.insert(e);
                value += gain;
                let now = oracle.counters().rounds;
                push_trace(&mut trace, &set, value, n - set.len() + 1, now - rounds_at_last);
                rounds_at_last = now;
            }
        }
        tau *= 1.0 - eps;
    }
    let end = oracle.counters();
    Ok(RunResult::plain(set, value, end.since(start), trace))
}

/// A uniform random `k`-subset: one query, one round.
pub fn random_baseline(oracle: &mut InstrumentedOracle<'_>, k: usize, seed: u64) -> Result<RunResult> {
    let n = check_k(oracle, k)?;
    let start = oracle.counters();
    let mut rng = stream_rng(seed, RANDOM_STREAM);
    let set = sample_uniform_subset(&ElementSet::full(n), k, &mut rng);
    let value = oracle.evaluate(&set)?;
    let end = oracle.counters();
    Ok(RunResult::plain(set, value, end.since(start), Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SetFunction;
    use crate::objectives::{gen_random_coverage, CoverageInstance, ModularFunction};

    fn small_coverage() -> CoverageInstance {
        CoverageInstance::new(vec![1.0, 2.0, 3.0], vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let f = ModularFunction::new(vec![5.0, 3.0, 1.0]);
        let mut oracle = InstrumentedOracle::new(&f);
        let r = greedy(&mut oracle, 2).unwrap();
        assert_eq!(r.set.to_vec(), vec![0, 1]);
        assert_eq!(r.value, 8.0);
        assert_eq!(r.rounds, 2);
        assert_eq!(r.queries, 3 + 2);

        let inst = small_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let r = greedy(&mut oracle, 1).unwrap();
        assert_eq!((r.set.to_vec(), r.value), (vec![1], 5.0));
    }

    #[test]
    fn greedy_stops_when_nothing_is_gained() {
        let inst = small_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let f = ModularFunction::new(vec![1.0, 0.0, 0.0]);
        let mut zero = InstrumentedOracle::new(&f);
        assert_eq!(greedy(&mut zero, 3).unwrap().set.len(), 1);
        let r = greedy(&mut oracle, 2).unwrap();
        assert_eq!(r.value, 6.0);
    }

    #[test]
    fn lazy_matches_greedy() {
        for seed in 0..30 {
            let inst = gen_random_coverage(50, 120, 0.05, 1.0, seed).unwrap();
            let mut a = InstrumentedOracle::new(&inst);
            let mut b = InstrumentedOracle::new(&inst);
            let g = greedy(&mut a, 10).unwrap();
            let l = lazy_greedy(&mut b, 10).unwrap();
            assert_eq!(g.set, l.set, "seed {seed}");
            assert_eq!(g.value.to_bits(), l.value.to_bits());
            assert!(l.queries <= g.queries);
        }
    }

    #[test]
    fn lazy_on_modular_never_recertifies_more_than_once_per_step() {
        let n = 30;
        let f = ModularFunction::new((0..n).map(|i| (i % 7) as f64 + 1.0).collect());
        let mut a = InstrumentedOracle::new(&f);
        let mut b = InstrumentedOracle::new(&f);
        let g = greedy(&mut a, 6).unwrap();
        let l = lazy_greedy(&mut b, 6).unwrap();
        assert_eq!(g.set, l.set);
        assert_eq!(l.queries, n as u64 + 5);
        assert!(l.queries <= g.queries);
        let mut c = InstrumentedOracle::new(&f);
        assert_eq!(lazy_greedy(&mut c, 1).unwrap().set, greedy(&mut a.fork(), 1).unwrap().set);
    }

    #[test]
    fn threshold_examples() {
        let f = ModularFunction::new(vec![5.0, 3.0, 1.0]);
        let mut oracle = InstrumentedOracle::new(&f);
        assert_eq!(threshold_greedy(&mut oracle, 2, 0.5).unwrap().set.to_vec(), vec![0, 1]);
        let flat = ModularFunction::cardinality(9);
        let mut oracle = InstrumentedOracle::new(&flat);
        assert_eq!(threshold_greedy(&mut oracle, 3, 0.2).unwrap().set.to_vec(), vec![0, 1, 2]);
        assert!(threshold_greedy(&mut oracle, 3, 1.0).is_err());
    }

    #[test]
    fn random_baseline_examples() {
        let inst = gen_random_coverage(15, 30, 0.2, 1.0, 1).unwrap();
        let mut oracle = InstrumentedOracle::new(&inst);
        let r = random_baseline(&mut oracle, 15, 0).unwrap();
        assert_eq!(r.value, inst.value(&ElementSet::full(15)));
        assert_eq!((r.queries, r.rounds), (1, 1));
        let a = random_baseline(&mut oracle, 5, 8).unwrap();
        let b = random_baseline(&mut oracle, 5, 8).unwrap();
        assert_eq!(a.set, b.set);
        assert_eq!(a.set.len(), 5);
    }

    #[test]
    fn k_out_of_range_is_rejected() {
        let f = ModularFunction::cardinality(3);
        let mut oracle = InstrumentedOracle::new(&f);
        assert!(greedy(&mut oracle, 0).is_err());
        assert!(lazy_greedy(&mut oracle, 4).is_err());
        assert!(random_baseline(&mut oracle, 4, 0).is_err());
    }
}
