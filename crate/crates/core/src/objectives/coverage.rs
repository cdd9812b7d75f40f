use crate::error::{Error, Result};
use crate::model::{ElementSet, SetFunction};

/// Weighted coverage: `f(S) = Σ w_u` over universe elements `u` covered by
/// at least one member of `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageInstance {
    weights: Vec<f64>,
    membership: Vec<Vec<u32>>,
}

impl CoverageInstance {
    /// Membership lists are sorted and deduplicated.
    pub fn new(weights: Vec<f64>, membership: Vec<Vec<usize>>) -> Result<Self> {
        if membership.is_empty() {
            return Err(Error::InvalidInstance("coverage instance has no sets".into()));
        }
        if weights.is_empty() {
            return Err(Error::InvalidInstance("coverage instance has an empty universe".into()));
        }
        if let Some((u, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidInstance(format!(
                "weight of universe element {u} is {w}; weights must be finite and nonnegative"
            )));
        }
        let n_universe = weights.len();
        let membership = membership
            .into_iter()
            .enumerate()
            .map(|(i, mut covered)| {
                covered.sort_unstable();
                covered.dedup();
                match covered.last() {
                    Some(&u) if u >= n_universe => Err(Error::InvalidInstance(format!(
                        "set {i} covers universe element {u}, universe has {n_universe}"
                    ))),
                    _ => Ok(covered.into_iter().map(|u| u as u32).collect()),
                }
            })
            .collect::<Result<Vec<Vec<u32>>>>()?;
        Ok(CoverageInstance { weights, membership })
    }

    pub fn n_sets(&self) -> usize {
        self.membership.len()
    }

    pub fn n_universe(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn membership(&self, set: usize) -> impl Iterator<Item = usize> + '_ {
        self.membership[set].iter().map(|&u| u as usize)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    fn covered_mask(&self, set: &ElementSet) -> Vec<bool> {
        let mut covered = vec![false; self.weights.len()];
        for i in set {
            for &u in &self.membership[i] {
                covered[u as usize] = true;
            }
        }
        covered
    }
}

impl SetFunction for CoverageInstance {
    fn ground_size(&self) -> usize {
        self.membership.len()
    }

    fn value(&self, set: &ElementSet) -> f64 {
        let mut covered = vec![false; self.weights.len()];
        let mut total = 0.0;
        for i in set {
            for &u in &self.membership[i] {
                let u = u as usize;
                if !covered[u] {
                    covered[u] = true;
                    total += self.weights[u];
                }
            }
        }
        total
    }

    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        let covered = self.covered_mask(base);
        for (slot, &e) in out.iter_mut().zip(candidates) {
            *slot = if base.contains(e) {
                0.0
            } else {
                self.membership[e]
                    .iter()
                    .filter(|&&u| !covered[u as usize])
                    .map(|&u| self.weights[u as usize])
                    .sum()
            };
        }
    }

    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        let mut covered = self.covered_mask(base);
        let mut touched = Vec::new();
        for (slot, add) in out.iter_mut().zip(additions) {
            let mut gain = 0.0;
            for i in add {
                for &u in &self.membership[i] {
                    let u = u as usize;
                    if !covered[u] {
                        covered[u] = true;
                        touched.push(u);
                        gain += self.weights[u];
                    }
                }
            }
            for u in touched.drain(..) {
                covered[u] = false;
            }
            *slot = gain;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Universe {0,1,2} weights (1,2,3); set₀ = {0,1}, set₁ = {1,2}.
    fn weighted() -> CoverageInstance {
        CoverageInstance::new(vec![1.0, 2.0, 3.0], vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn value_examples() {
        let inst = weighted();
        let s = |v: &[usize]| ElementSet::from_indices(2, v.iter().copied()).unwrap();
        assert_eq!(inst.value(&s(&[])), 0.0);
        assert_eq!(inst.value(&s(&[0, 1])), 6.0);
        assert_eq!(inst.value(&s(&[1])), 5.0);
        assert_eq!(inst.value(&s(&[0])), 3.0);
    }

    #[test]
    fn malformed_instances_are_rejected() {
        assert!(CoverageInstance::new(vec![1.0, -0.5], vec![vec![0]]).is_err());
        assert!(CoverageInstance::new(vec![1.0], vec![vec![1]]).is_err());
        assert!(CoverageInstance::new(vec![f64::NAN], vec![vec![0]]).is_err());
        assert!(CoverageInstance::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn duplicate_membership_is_collapsed() {
        let inst = CoverageInstance::new(vec![1.0, 1.0], vec![vec![1, 1, 0]]).unwrap();
        assert_eq!(inst.membership(0).collect::<Vec<_>>(), vec![0, 1]);
        let mut g = [0.0];
        inst.element_gains(&ElementSet::new(1), &[0], &mut g);
        assert_eq!(g[0], 2.0);
    }
}
