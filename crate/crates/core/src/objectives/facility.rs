use crate::error::{Error, Result};
use crate::model::{ElementSet, SetFunction};

/// Facility location: `f(S) = Σ_clients max_{i ∈ S} sim[client][i]`, with
/// `f(∅) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FacilityLocationInstance {
    n_items: usize,
    n_clients: usize,
    /// Item-major: `columns[item * n_clients + client]`.
    columns: Vec<f64>,
}

impl FacilityLocationInstance {
    /// `rows[client][item]`; every row must have the same length.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_clients = rows.len();
        if n_clients == 0 {
            return Err(Error::InvalidInstance("facility location instance has no clients".into()));
        }
        let n_items = rows[0].len();
        if n_items == 0 {
            return Err(Error::InvalidInstance("facility location instance has no items".into()));
        }
        let mut columns = vec![0.0; n_items * n_clients];
        for (c, row) in rows.iter().enumerate() {
            if row.len() != n_items {
                return Err(Error::InvalidInstance(format!(
                    "client {c} has {} similarities, expected {n_items}",
                    row.len()
                )));
            }
            for (i, &s) in row.iter().enumerate() {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "similarity[{c}][{i}] is {s}; similarities must be finite and nonnegative"
                    )));
                }
                columns[i * n_clients + c] = s;
            }
        }
        Ok(FacilityLocationInstance {
            n_items,
            n_clients,
            columns,
        })
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_clients(&self) -> usize {
        self.n_clients
    }

    pub fn similarity(&self, client: usize, item: usize) -> f64 {
        self.columns[item * self.n_clients + client]
    }

    /// `Σ_clients max_i sim[client][i]`, the value of the full item set.
    pub fn row_max_total(&self) -> f64 {
        self.value(&ElementSet::full(self.n_items))
    }

    fn column(&self, item: usize) -> &[f64] {
        &self.columns[item * self.n_clients..(item + 1) * self.n_clients]
    }

    fn best_per_client(&self, set: &ElementSet) -> Vec<f64> {
        let mut best = vec![0.0f64; self.n_clients];
        for i in set {
            for (b, &s) in best.iter_mut().zip(self.column(i)) {
                *b = b.max(s);
            }
        }
        best
    }
}

impl SetFunction for FacilityLocationInstance {
    fn ground_size(&self) -> usize {
        self.n_items
    }

    fn value(&self, set: &ElementSet) -> f64 {
        self.best_per_client(set).iter().sum()
    }

    fn element_gains(&self, base: &ElementSet, candidates: &[usize], out: &mut [f64]) {
        let best = self.best_per_client(base);
        for (slot, &e) in out.iter_mut().zip(candidates) {
            *slot = if base.contains(e) {
                0.0
            } else {
                self.column(e)
                    .iter()
                    .zip(&best)
                    .map(|(&s, &b)| (s - b).max(0.0))
                    .sum()
            };
        }
    }

    fn set_gains(&self, base: &ElementSet, additions: &[ElementSet], out: &mut [f64]) {
        let best = self.best_per_client(base);
        let mut local = vec![0.0f64; self.n_clients];
        for (slot, add) in out.iter_mut().zip(additions) {
            local.copy_from_slice(&best);
            for i in add {
                for (b, &s) in local.iter_mut().zip(self.column(i)) {
                    *b = b.max(s);
                }
            }
            *slot = local.iter().zip(&best).map(|(l, b)| l - b).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_examples() {
        let inst = FacilityLocationInstance::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = |v: &[usize]| ElementSet::from_indices(2, v.iter().copied()).unwrap();
        assert_eq!(inst.value(&s(&[])), 0.0);
        assert_eq!(inst.value(&s(&[0])), 1.0);
        assert_eq!(inst.value(&s(&[0, 1])), 2.0);
        assert_eq!(inst.row_max_total(), 2.0);
    }

    #[test]
    fn malformed_matrix_is_rejected() {
        assert!(FacilityLocationInstance::new(vec![vec![1.0, 0.0], vec![0.0]]).is_err());
        assert!(FacilityLocationInstance::new(vec![vec![-1.0]]).is_err());
        assert!(FacilityLocationInstance::new(vec![]).is_err());
        assert!(FacilityLocationInstance::new(vec![vec![]]).is_err());
    }

    #[test]
    fn gains_match_value_differences() {
        let inst = FacilityLocationInstance::new(vec![
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.3],
            vec![0.5, 0.5, 0.8],
        ])
        .unwrap();
        let base = ElementSet::from_indices(3, [0]).unwrap();
        let mut g = [0.0; 3];
        inst.element_gains(&base, &[0, 1, 2], &mut g);
        let fb = inst.value(&base);
        for (e, ge) in g.iter().enumerate() {
            let mut ext = base.clone();
            ext.insert(e);
            assert!((inst.value(&ext) - fb - ge).abs() < 1e-15);
        }
        let mut sg = [0.0];
        inst.set_gains(&base, &[ElementSet::from_indices(3, [1, 2]).unwrap()], &mut sg);
        assert!((sg[0] - (inst.value(&ElementSet::full(3)) - fb)).abs() < 1e-15);
    }
}
