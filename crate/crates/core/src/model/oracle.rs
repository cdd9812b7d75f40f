//! Set-function oracles with query and adaptive-round accounting.
//!
//! Every public evaluation method on [`InstrumentedOracle`] is one adaptive
//! round: all of its queries are fixed before any answer is computed. The
//! query count is the number of set evaluations `f(Q)` the round stands for.
//! Methods that take a `base` whose value the caller already holds charge only
//! for the extended sets.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::set::ElementSet;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Absolute slack for submodularity and monotonicity checks.
pub const CHECK_TOLERANCE: f64 = 1e-9;

/// Work chunk for parallel evaluation of element gains.
const GAIN_CHUNK: usize = 256;

/// A normalized (`f(∅) = 0`), pure set function over `{0, .., n-1}`.
///
/// Only `value` is required. The gain methods have direct implementations in
/// the concrete objectives; any override must compute each output entry
/// independently of the other entries so that batching and chunking never
/// change results.
pub trait SetFunction: Sync {
    fn ground_size(&self) -> usize;

    fn value(&self, set: &ElementSet) -> f64;

    /// `out[i] = f(candidates[i] | base)`.
    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        let base_value = self.value(base);
        let mut scratch = base.clone();
        for (slot, &e) in out.iter_mut().zip(candidates) {
            if base.contains(e) {
                *slot = 0.0;
                continue;
            }
            scratch.insert(e);
            *slot = self.value(&scratch) - base_value;
            scratch.remove(e);
        }
    }

    /// `out[i] = f(additions[i] | base)`.
    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        let base_value = self.value(base);
        for (slot, add) in out.iter_mut().zip(additions) {
            *slot = self.value(&base.union(add)) - base_value;
        }
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &ElementSet) -> f64 {
        (**self).value(set)
    }
    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        (**self).element_gains(base, candidates, out)
    }
    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        (**self).set_gains(base, additions, out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub queries: u64,
    pub rounds: u64,
}

impl Counters {
    /// Counts consumed since an earlier snapshot.
    pub fn since(self, earlier: Counters) -> Counters {
        Counters {
            queries: self.queries - earlier.queries,
            rounds: self.rounds - earlier.rounds,
        }
    }
}

/// Result of one filter-probe round.
#[derive(Clone, Debug)]
pub struct FilterProbe {
    /// `f(R_j | base)` per addition.
    pub set_gains: Vec<f64>,
    /// `element_gains[j][c] = f(candidates[c] | base ∪ R_j)`.
    pub element_gains: Vec<Vec<f64>>,
}

pub struct InstrumentedOracle<'a> {
    objective: &'a dyn SetFunction,
    counters: Counters,
    parallel: bool,
}

impl<'a> InstrumentedOracle<'a> {
    pub fn new(objective: &'a dyn SetFunction) -> Self {
        InstrumentedOracle {
            objective,
            counters: Counters::default(),
            parallel: false,
        }
    }

    /// Evaluate the queries of each round on the rayon pool.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel
    }

    /// A fresh oracle over the same objective with zeroed counters.
    pub fn fork(&self) -> InstrumentedOracle<'a> {
        InstrumentedOracle::new(self.objective).with_parallel(self.parallel)
    }

    pub fn objective(&self) -> &'a dyn SetFunction {
        self.objective
    }

    pub fn ground_size(&self) -> usize {
        self.objective.ground_size()
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = Counters::default();
    }

    /// Adds counts consumed on a forked oracle.
    pub fn absorb(&mut self, other: Counters) {
        self.counters.queries += other.queries;
        self.counters.rounds += other.rounds;
    }

    fn charge(&mut self, queries: usize) {
        self.counters.queries += queries as u64;
        self.counters.rounds += 1;
    }

    fn check_set(&self, set: &ElementSet) -> Result<()> {
        let n = self.ground_size();
        if set.capacity() != n {
            return Err(Error::InvalidInstance(format!(
                "set over {} elements queried on a ground set of size {n}",
                set.capacity()
            )));
        }
        Ok(())
    }

    fn check_candidates(&self, candidates: &[usize]) -> Result<()> {
        let n = self.ground_size();
        match candidates.iter().find(|&&e| e >= n) {
            Some(e) => Err(Error::InvalidInstance(format!(
                "element {e} out of range for ground set of size {n}"
            ))),
            None => Ok(()),
        }
    }

    /// `f(S)`: one query, one round.
    pub fn evaluate(&mut self, set: &ElementSet) -> Result<f64> {
        self.check_set(set)?;
        let v = self.objective.value(set);
        self.charge(1);
        Ok(v)
    }

    /// `f(A | B) = f(A ∪ B) − f(B)`: two queries in one round.
    pub fn marginal_gain(&mut self, a: &ElementSet, b: &ElementSet) -> Result<f64> {
        self.check_set(a)?;
        self.check_set(b)?;
        let values = self.batch_evaluate(&[a.union(b), b.clone()])?;
        Ok(values[0] - values[1])
    }

    pub fn batch_evaluate(&mut self, queries: &[ElementSet]) -> Result<Vec<f64>> {
        if queries.is_empty() {
            return Err(Error::Contract("batch_evaluate called with no queries".into()));
        }
        for q in queries {
            self.check_set(q)?;
        }
        let f = self.objective;
        let values = if self.parallel {
            queries.par_iter().map(|q| f.value(q)).collect()
        } else {
            queries.iter().map(|q| f.value(q)).collect()
        };
        self.charge(queries.len());
        Ok(values)
    }

    /// `f(R | base)` for each addition; charges one query per addition.
    pub fn batch_set_gains(&mut self, base: &ElementSet, additions: &[ElementSet]) -> Result<Vec<f64>> {
        if additions.is_empty() {
            return Err(Error::Contract("batch_set_gains called with no additions".into()));
        }
        self.check_set(base)?;
        for a in additions {
            self.check_set(a)?;
        }
        let gains = self.set_gains_uncharged(base, additions);
        self.charge(additions.len());
        Ok(gains)
    }

    /// `f(e | base)` for each candidate; charges one query per candidate.
    pub fn batch_element_gains(&mut self, base: &ElementSet, candidates: &[usize]) -> Result<Vec<f64>> {
        if candidates.is_empty() {
            return Err(Error::Contract("batch_element_gains called with no candidates".into()));
        }
        self.check_set(base)?;
        self.check_candidates(candidates)?;
        let gains = self.element_gains_uncharged(base, candidates);
        self.charge(candidates.len());
        Ok(gains)
    }

    /// One round answering, for every addition `R_j`, both `f(R_j | base)`
    /// and `f(e | base ∪ R_j)` for every candidate `e`. Charges
    /// `|additions| · (1 + |candidates|)` queries.
    pub fn batch_filter_probe(
        &mut self,
        base: &ElementSet,
        additions: &[ElementSet],
        candidates: &[usize],
    ) -> Result<FilterProbe> {
        if additions.is_empty() {
            return Err(Error::Contract("batch_filter_probe called with no additions".into()));
        }
        self.check_set(base)?;
        for a in additions {
            self.check_set(a)?;
        }
        self.check_candidates(candidates)?;
        let f = self.objective;
        let set_gains = self.set_gains_uncharged(base, additions);
        let probe_one = |add: &ElementSet| {
            let extended = base.union(add);
            let mut out = vec![0.0; candidates.len()];
            f.element_gains(&extended, candidates, &mut out);
            out
        };
        let element_gains = if self.parallel {
            additions.par_iter().map(probe_one).collect()
        } else {
            additions.iter().map(probe_one).collect()
        };
        self.charge(additions.len() * (1 + candidates.len()));
        Ok(FilterProbe {
            set_gains,
            element_gains,
        })
    }

    fn set_gains_uncharged(&self, base: &ElementSet, additions: &[ElementSet]) -> Vec<f64> {
        let f = self.objective;
        let mut out = vec![0.0; additions.len()];
        if self.parallel && additions.len() > 1 {
            out.par_chunks_mut(16)
                .zip(additions.par_chunks(16))
                .for_each(|(o, a)| f.set_gains(base, a, o));
        } else {
            f.set_gains(base, additions, &mut out);
        }
        out
    }

    fn element_gains_uncharged(&self, base: &ElementSet, candidates: &[usize]) -> Vec<f64> {
        let f = self.objective;
        let mut out = vec![0.0; candidates.len()];
        if self.parallel && candidates.len() > GAIN_CHUNK {
            out.par_chunks_mut(GAIN_CHUNK)
                .zip(candidates.par_chunks(GAIN_CHUNK))
                .for_each(|(o, c)| f.element_gains(base, c, o));
        } else {
            f.element_gains(base, candidates, &mut out);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `f(A) + f(B) < f(A ∩ B) + f(A ∪ B) − tol`.
    Submodularity { lhs: f64, rhs: f64 },
    /// `f(smaller) > f(larger) + tol` for `smaller ⊆ larger`.
    Monotonicity { smaller: f64, larger: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub a: ElementSet,
    pub b: ElementSet,
    pub violation: Violation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpotCheck {
    pub passed: bool,
    pub trials_run: usize,
    pub counterexample: Option<Counterexample>,
}

/// Largest random set drawn by [`spot_check_submodular`].
const SPOT_CHECK_MAX_SIZE: usize = 40;

/// Samples `trials` pairs `(A, B)` sharing a random core and checks the
/// submodular inequality together with the chain `A ∩ B ⊆ A, B ⊆ A ∪ B`.
/// Stops at the first violation.
pub fn spot_check_submodular(oracle: &mut InstrumentedOracle<'_>, trials: usize, seed: u64) -> Result<SpotCheck> {
    let n = oracle.ground_size();
    let mut rng = stream_rng(seed, 0x5b07);
    let half = SPOT_CHECK_MAX_SIZE.min(n).div_ceil(2);
    let draw = |rng: &mut crate::rng::Rng, into: &mut ElementSet| {
        let size = rng.gen_range(0..=half);
        for _ in 0..size {
            into.insert(rng.gen_range(0..n));
        }
    };
    for trial in 0..trials {
        let mut core = ElementSet::new(n);
        draw(&mut rng, &mut core);
        let mut a = core.clone();
        let mut b = core;
        draw(&mut rng, &mut a);
        draw(&mut rng, &mut b);
        if let Some(violation) = check_pair(oracle, &a, &b)? {
            return Ok(SpotCheck {
                passed: false,
                trials_run: trial + 1,
                counterexample: Some(Counterexample { a, b, violation }),
            });
        }
    }
    Ok(SpotCheck {
        passed: true,
        trials_run: trials,
        counterexample: None,
    })
}

pub(crate) fn check_pair(
    oracle: &mut InstrumentedOracle<'_>,
    a: &ElementSet,
    b: &ElementSet,
) -> Result<Option<Violation>> {
    let values = oracle.batch_evaluate(&[a.clone(), b.clone(), a.intersection(b), a.union(b)])?;
    let (fa, fb, fi, fu) = (values[0], values[1], values[2], values[3]);
    if fa + fb < fi + fu - CHECK_TOLERANCE {
        return Ok(Some(Violation::Submodularity {
            lhs: fa + fb,
            rhs: fi + fu,
        }));
    }
    for (smaller, larger) in [(fi, fa), (fi, fb), (fa, fu), (fb, fu)] {
        if smaller > larger + CHECK_TOLERANCE {
            return Ok(Some(Violation::Monotonicity { smaller, larger }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::CoverageInstance;

    /// `f(S) = |S|²`: monotone but supermodular.
    struct Square(usize);

    impl SetFunction for Square {
        fn ground_size(&self) -> usize {
            self.0
        }
        fn value(&self, set: &ElementSet) -> f64 {
            (set.len() * set.len()) as f64
        }
    }

    /// Universe {0,1,2} with unit weights; set₀ = {0,1}, set₁ = {1,2}.
    fn unit_coverage() -> CoverageInstance {
        CoverageInstance::new(vec![1.0; 3], vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn set(n: usize, items: &[usize]) -> ElementSet {
        ElementSet::from_indices(n, items.iter().copied()).unwrap()
    }

    #[test]
    fn evaluate_examples_and_accounting() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        assert_eq!(oracle.evaluate(&set(2, &[])).unwrap(), 0.0);
        assert_eq!(oracle.evaluate(&set(2, &[0])).unwrap(), 2.0);
        assert_eq!(oracle.evaluate(&set(2, &[0, 1])).unwrap(), 3.0);
        assert_eq!(oracle.counters(), Counters { queries: 3, rounds: 3 });
    }

    #[test]
    fn mismatched_capacity_is_invalid_instance() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let err = oracle.evaluate(&set(5, &[4])).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
        let err = oracle.batch_element_gains(&set(2, &[]), &[2]).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
        assert_eq!(oracle.counters(), Counters::default());
    }

    #[test]
    fn marginal_gain_examples() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let s0 = set(2, &[0]);
        let s1 = set(2, &[1]);
        assert_eq!(oracle.marginal_gain(&set(2, &[]), &s0).unwrap(), 0.0);
        assert_eq!(oracle.marginal_gain(&s0, &s0.union(&s1)).unwrap(), 0.0);
        assert_eq!(oracle.marginal_gain(&s1, &s0).unwrap(), 1.0);
        assert_eq!(oracle.counters(), Counters { queries: 6, rounds: 3 });
    }

    #[test]
    fn batch_evaluate_examples() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        assert_eq!(oracle.batch_evaluate(&[set(2, &[])]).unwrap(), vec![0.0]);
        assert_eq!(oracle.counters().rounds, 1);
        let same = oracle.batch_evaluate(&vec![set(2, &[1]); 3]).unwrap();
        assert!(same.iter().all(|v| v.to_bits() == same[0].to_bits()));
        let values = oracle
            .batch_evaluate(&[set(2, &[0]), set(2, &[1]), set(2, &[0, 1])])
            .unwrap();
        assert_eq!(values, vec![2.0, 2.0, 3.0]);
        assert!(matches!(oracle.batch_evaluate(&[]), Err(Error::Contract(_))));
    }

    #[test]
    fn counters_and_reset() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        assert_eq!(oracle.counters(), Counters { queries: 0, rounds: 0 });
        oracle.batch_evaluate(&vec![set(2, &[0]); 5]).unwrap();
        assert_eq!(oracle.counters(), Counters { queries: 5, rounds: 1 });
        oracle.reset_counters();
        assert_eq!(oracle.counters(), Counters { queries: 0, rounds: 0 });
    }

    #[test]
    fn gain_routes_agree_with_value_differences() {
        let inst = crate::objectives::gen_random_coverage(30, 80, 0.1, 2.0, 11).unwrap();
        let mut oracle = InstrumentedOracle::new(&inst);
        let base = set(30, &[1, 4, 9, 16]);
        let cands: Vec<usize> = (0..30).collect();
        let gains = oracle.batch_element_gains(&base, &cands).unwrap();
        let adds = vec![set(30, &[2, 3]), set(30, &[4, 25, 29]), set(30, &[])];
        let set_gains = oracle.batch_set_gains(&base, &adds).unwrap();
        let fb = inst.value(&base);
        for (&e, g) in cands.iter().zip(&gains) {
            let mut ext = base.clone();
            ext.insert(e);
            assert!((inst.value(&ext) - fb - g).abs() < 1e-12);
        }
        for (a, g) in adds.iter().zip(&set_gains) {
            assert!((inst.value(&base.union(a)) - fb - g).abs() < 1e-12);
        }
        assert_eq!(oracle.counters(), Counters { queries: 33, rounds: 2 });
    }

    #[test]
    fn filter_probe_charges_one_round() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let probe = oracle
            .batch_filter_probe(&set(2, &[]), &[set(2, &[0]), set(2, &[1])], &[0, 1])
            .unwrap();
        assert_eq!(probe.set_gains, vec![2.0, 2.0]);
        assert_eq!(probe.element_gains, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(oracle.counters(), Counters { queries: 6, rounds: 1 });
    }

    #[test]
    fn parallel_evaluation_is_bit_identical() {
        let inst = crate::objectives::gen_random_coverage(600, 900, 0.02, 1.0, 5).unwrap();
        let base = ElementSet::from_indices(600, (0..600).step_by(7)).unwrap();
        let cands: Vec<usize> = (0..600).collect();
        let adds: Vec<ElementSet> = (0..40)
            .map(|j| ElementSet::from_indices(600, [j, j + 100, j + 300]).unwrap())
            .collect();
        let mut serial = InstrumentedOracle::new(&inst);
        let mut par = InstrumentedOracle::new(&inst).with_parallel(true);
        let a = serial.batch_element_gains(&base, &cands).unwrap();
        let b = par.batch_element_gains(&base, &cands).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        let pa = serial.batch_filter_probe(&base, &adds, &cands).unwrap();
        let pb = par.batch_filter_probe(&base, &adds, &cands).unwrap();
        assert_eq!(pa.set_gains, pb.set_gains);
        assert_eq!(pa.element_gains, pb.element_gains);
        assert_eq!(serial.counters(), par.counters());
    }

    #[test]
    fn spot_check_accepts_coverage() {
        let inst = unit_coverage();
        let mut oracle = InstrumentedOracle::new(&inst);
        let check = spot_check_submodular(&mut oracle, 1000, 1).unwrap();
        assert!(check.passed);
        assert_eq!(check.trials_run, 1000);
    }

    #[test]
    fn spot_check_rejects_square() {
        let stub = Square(10);
        let mut oracle = InstrumentedOracle::new(&stub);
        let check = spot_check_submodular(&mut oracle, 1000, 1).unwrap();
        assert!(!check.passed);
        let ce = check.counterexample.unwrap();
        assert!(matches!(ce.violation, Violation::Submodularity { .. }));
        assert!(!ce.a.difference(&ce.b).is_empty() && !ce.b.difference(&ce.a).is_empty());
    }

    #[test]
    fn equal_pair_passes() {
        let stub = Square(10);
        let mut oracle = InstrumentedOracle::new(&stub);
        let a = set(10, &[1, 2, 3]);
        assert_eq!(check_pair(&mut oracle, &a, &a).unwrap(), None);
    }
}
