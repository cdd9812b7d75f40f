use rand::Rng as _;

use crate::model::ElementSet;
use crate::rng::Rng;

/// Draws uniform fixed-size subsets of a pool by partial Fisher–Yates over a
/// persistent index array. The array stays a permutation of the pool between
/// draws, so every draw is uniform and the sequence is a function of the rng
/// state alone.
pub struct SubsetSampler {
    capacity: usize,
    scratch: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(pool: &ElementSet) -> Self {
        SubsetSampler {
            capacity: pool.capacity(),
            scratch: pool.to_vec(),
        }
    }

    pub fn pool_len(&self) -> usize {
        self.scratch.len()
    }

    /// A uniform subset of size `min(size, |pool|)`.
    pub fn sample(&mut self, size: usize, rng: &mut Rng) -> ElementSet {
        let len = self.scratch.len();
        let size = size.min(len);
        let mut out = ElementSet::new(self.capacity);
        for i in 0..size {
            let j = rng.gen_range(i..len);
            self.scratch.swap(i, j);
            out.insert(self.scratch[i]);
        }
        out
    }
}

pub fn sample_uniform_subset(pool: &ElementSet, ell: usize, rng: &mut Rng) -> ElementSet {
    SubsetSampler::new(pool).sample(ell, rng)
}
