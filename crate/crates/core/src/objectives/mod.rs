//! Concrete monotone submodular objectives, random generators and the
//! instance file format.

mod coverage;
mod facility;
mod generate;
mod io;

pub use coverage::CoverageInstance;
pub use facility::FacilityLocationInstance;
pub use generate::{gen_random_coverage, gen_random_facility_location, GeneratorSpec};
pub use io::{emit_instance, load_instance, parse_instance, write_instance};

use crate::model::{ElementSet, SetFunction};

/// A loaded or generated objective.
#[derive(Clone, Debug, PartialEq)]
pub enum SubmodularInstance {
    Coverage(CoverageInstance),
    FacilityLocation(FacilityLocationInstance),
}

impl SubmodularInstance {
    /// The objective family as it appears in reports and instance headers.
    pub fn kind(&self) -> &'static str {
        match self {
            SubmodularInstance::Coverage(_) => "coverage",
            SubmodularInstance::FacilityLocation(_) => "facloc",
        }
    }

    fn inner(&self) -> &dyn SetFunction {
        match self {
            SubmodularInstance::Coverage(c) => c,
            SubmodularInstance::FacilityLocation(f) => f,
        }
    }
}

impl SetFunction for SubmodularInstance {
    fn ground_size(&self) -> usize {
        self.inner().ground_size()
    }
    fn value(&self, set: &ElementSet) -> f64 {
        self.inner().value(set)
    }
    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        self.inner().element_gains(base, candidates, out)
    }
    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        self.inner().set_gains(base, additions, out)
    }
}

impl From<CoverageInstance> for SubmodularInstance {
    fn from(c: CoverageInstance) -> Self {
        SubmodularInstance::Coverage(c)
    }
}

impl From<FacilityLocationInstance> for SubmodularInstance {
    fn from(f: FacilityLocationInstance) -> Self {
        SubmodularInstance::FacilityLocation(f)
    }
}

/// `f(S) = Σ_{i ∈ S} w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularFunction {
    weights: Vec<f64>,
}

impl ModularFunction {
    pub fn new(weights: Vec<f64>) -> Self {
        assert!(!weights.is_empty(), "modular function needs at least one element");
        assert!(
            weights.iter().all(|w| w.is_finite() && *w >= 0.0),
            "modular weights must be finite and nonnegative"
        );
        ModularFunction { weights }
    }

    /// Every element has weight 1, so `f(S) = |S|`.
    pub fn cardinality(n: usize) -> Self {
        ModularFunction::new(vec![1.0; n])
    }
}

impl SetFunction for ModularFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        set.iter().map(|i| self.weights[i]).sum()
    }

    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        for (slot, &e) in out.iter_mut().zip(candidates) {
            *slot = if base.contains(e) { 0.0 } else { self.weights[e] };
        }
    }

    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        for (slot, add) in out.iter_mut().zip(additions) {
            *slot = add.iter().filter(|&e| !base.contains(e)).map(|e| self.weights[e]).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{spot_check_submodular, InstrumentedOracle};
    use proptest::prelude::*;

    #[test]
    fn generated_instances_pass_spot_check() {
        let cov: SubmodularInstance = gen_random_coverage(20, 50, 0.1, 1.0, 7).unwrap().into();
        let fac: SubmodularInstance = gen_random_facility_location(25, 30, 3).unwrap().into();
        for inst in [&cov, &fac] {
            let mut oracle = InstrumentedOracle::new(inst);
            let check = spot_check_submodular(&mut oracle, 10_000, 99).unwrap();
            assert!(check.passed, "{:?}", check.counterexample);
        }
    }

    #[test]
    fn values_are_bounded_by_totals() {
        let cov = gen_random_coverage(30, 40, 0.2, 3.0, 1).unwrap();
        let fac = gen_random_facility_location(30, 40, 1).unwrap();
        let full = ElementSet::full(30);
        assert!(cov.value(&full) <= cov.total_weight() + 1e-12);
        assert!(fac.value(&full) <= fac.row_max_total() + 1e-12);
    }

    fn instance_and_sets() -> impl Strategy<Value = (u64, bool, Vec<Vec<usize>>)> {
        (
            any::<u64>(),
            any::<bool>(),
            proptest::collection::vec(proptest::collection::vec(0usize..24, 0..10), 1..8),
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn batch_evaluation_is_pure_under_permutation((seed, facloc, sets) in instance_and_sets(),
                                                     rot in 0usize..8) {
            let inst: SubmodularInstance = if facloc {
                gen_random_facility_location(24, 12, seed).unwrap().into()
            } else {
                gen_random_coverage(24, 40, 0.15, 2.0, seed).unwrap().into()
            };
            let queries: Vec<ElementSet> = sets
                .iter()
                .map(|s| ElementSet::from_indices(24, s.iter().copied()).unwrap())
                .collect();
            let mut permuted = queries.clone();
            let r = rot % permuted.len();
            permuted.rotate_left(r);
            let mut oracle = InstrumentedOracle::new(&inst);
            let a = oracle.batch_evaluate(&queries).unwrap();
            let mut b = oracle.batch_evaluate(&permuted).unwrap();
            b.rotate_right(r);
            prop_assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
            let singles: Vec<f64> = queries.iter().map(|q| oracle.evaluate(q).unwrap()).collect();
            prop_assert!(a.iter().zip(&singles).all(|(x, y)| x.to_bits() == y.to_bits()));
            prop_assert_eq!(oracle.counters().rounds, 2 + queries.len() as u64);
            prop_assert_eq!(oracle.counters().queries, 3 * queries.len() as u64);
        }

        #[test]
        fn generated_objectives_are_monotone_submodular((seed, facloc, sets) in instance_and_sets()) {
            let inst: SubmodularInstance = if facloc {
                gen_random_facility_location(24, 12, seed).unwrap().into()
            } else {
                gen_random_coverage(24, 40, 0.15, 2.0, seed).unwrap().into()
            };
            let a = ElementSet::from_indices(24, sets[0].iter().copied()).unwrap();
            let b = ElementSet::from_indices(24, sets[sets.len() - 1].iter().copied()).unwrap();
            let (fa, fb) = (inst.value(&a), inst.value(&b));
            let (fi, fu) = (inst.value(&a.intersection(&b)), inst.value(&a.union(&b)));
            prop_assert!(fa + fb >= fi + fu - 1e-9);
            prop_assert!(fa <= fu + 1e-9);
        }
    }
}
