use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ElementSet, InstrumentedOracle, CHECK_TOLERANCE};

/// Largest number of subsets [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;
/// Largest number of subsets [`exact_density_check`] will enumerate.
pub const DENSITY_CHECK_LIMIT: u128 = 100_000;

const EVAL_CHUNK: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    pub opt_set: ElementSet,
    pub opt_value: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Σ_{i ≤ k} C(n, i)`.
pub fn subsets_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).map(|i| binomial(n, i)).sum()
}

/// Lexicographic `size`-combinations of `items`.
pub(crate) struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    pub(crate) fn new(items: &'a [usize], size: usize) -> Self {
        Combinations {
            items,
            idx: (0..size).collect(),
            done: size > items.len(),
        }
    }

    /// Advances and writes the next combination into `out`.
    pub(crate) fn next_into(&mut self, out: &mut ElementSet) -> bool {
        if self.done {
            return false;
        }
        out.clear();
        for &i in &self.idx {
            out.insert(self.items[i]);
        }
        let (n, k) = (self.items.len(), self.idx.len());
        match (0..k).rev().find(|&i| self.idx[i] != i + n - k) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        true
    }
}

/// Exact optimum by enumeration: size-`k` subsets when `k < n`, every subset
/// by ascending size otherwise. Ties keep the first subset in enumeration
/// order.
pub fn brute_force_opt(oracle: &mut InstrumentedOracle<'_>, k: usize) -> Result<BruteForceResult> {
    let n = oracle.ground_size();
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let required = subsets_up_to(n, k);
    if required > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            required,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let items: Vec<usize> = (0..n).collect();
    let sizes: Vec<usize> = if k < n { vec![k] } else { (0..=n).collect() };
    let mut best = BruteForceResult {
        opt_set: ElementSet::new(n),
        opt_value: f64::NEG_INFINITY,
    };
    let mut chunk = Vec::with_capacity(EVAL_CHUNK);
    let mut flush = |chunk: &mut Vec<ElementSet>, best: &mut BruteForceResult| -> Result<()> {
        if chunk.is_empty() {
            return Ok(());
        }
        let values = oracle.batch_evaluate(chunk)?;
        for (s, v) in chunk.drain(..).zip(values) {
            if v > best.opt_value {
                best.opt_value = v;
                best.opt_set = s;
            }
        }
        Ok(())
    };
    for size in sizes {
        let mut combos = Combinations::new(&items, size);
        let mut scratch = ElementSet::new(n);
        while combos.next_into(&mut scratch) {
            chunk.push(scratch.clone());
            if chunk.len() == EVAL_CHUNK {
                flush(&mut chunk, &mut best)?;
            }
        }
    }
    flush(&mut chunk, &mut best)?;
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityCheck {
    /// Mean of `f(R | S)` over every `ell`-subset `R` of `U`.
    pub lhs: f64,
    /// `ell / |U| · Σ_{e ∈ U} mean_R f(e | S ∪ R)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares the average gain of a uniform `ell`-subset of `U` with `ell`
/// times the average element gain on top of it, by full enumeration. For a
/// submodular `f` the first is never smaller.
pub fn exact_density_check(
    oracle: &mut InstrumentedOracle<'_>,
    s: &ElementSet,
    u: &ElementSet,
    ell: usize,
) -> Result<DensityCheck> {
    if u.is_empty() || ell == 0 || ell > u.len() {
        return Err(Error::Parameter(format!("ell = {ell} outside [1, |U| = {}]", u.len())));
    }
    let required = binomial(u.len(), ell);
    if required > DENSITY_CHECK_LIMIT {
        return Err(Error::SizeLimit {
            required,
            limit: DENSITY_CHECK_LIMIT,
        });
    }
    let items = u.to_vec();
    let mut subsets = Vec::with_capacity(required as usize);
    let mut combos = Combinations::new(&items, ell);
    let mut scratch = ElementSet::new(u.capacity());
    while combos.next_into(&mut scratch) {
        subsets.push(scratch.clone());
    }
    let probe = oracle.batch_filter_probe(s, &subsets, &items)?;
    let count = subsets.len() as f64;
    let lhs = probe.set_gains.iter().sum::<f64>() / count;
    let per_element: f64 = (0..items.len())
        .map(|c| probe.element_gains.iter().map(|row| row[c]).sum::<f64>() / count)
        .sum();
    let rhs = ell as f64 / items.len() as f64 * per_element;
    Ok(DensityCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - CHECK_TOLERANCE,
    })
}
