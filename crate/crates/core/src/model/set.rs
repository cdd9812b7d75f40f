//! Ground sets and fixed-capacity element sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

/// The ground set `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("ground set must be nonempty".into()));
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::new(self.n)
    }

    pub fn full_set(&self) -> ElementSet {
        ElementSet::full(self.n)
    }
}

/// A subset of `{0, .., capacity-1}` stored as a bitset.
///
/// Membership, insertion and cardinality are O(1); iteration is in ascending
/// index order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: Vec<u64>,
    capacity: usize,
    len: usize,
}

impl ElementSet {
    pub fn new(capacity: usize) -> Self {
        ElementSet {
            words: vec![0; capacity.div_ceil(WORD)],
            capacity,
            len: 0,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut set = ElementSet::new(capacity);
        for (i, w) in set.words.iter_mut().enumerate() {
            let lo = i * WORD;
            let bits = (capacity - lo).min(WORD);
            *w = if bits == WORD { u64::MAX } else { (1u64 << bits) - 1 };
        }
        set.len = capacity;
        set
    }

    /// Builds a set from indices, rejecting any index outside the capacity.
    /// Duplicates are collapsed.
    pub fn from_indices<I>(capacity: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut set = ElementSet::new(capacity);
        for e in indices {
            if e >= capacity {
                return Err(Error::InvalidInstance(format!(
                    "element {e} out of range for ground set of size {capacity}"
                )));
            }
            set.insert(e);
        }
        Ok(set)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < self.capacity && self.words[e / WORD] & (1u64 << (e % WORD)) != 0
    }

    /// Inserts `e`, returning whether it was newly added.
    ///
    /// Panics if `e` is outside the capacity.
    #[inline]
    pub fn insert(&mut self, e: usize) -> bool {
        assert!(
            e < self.capacity,
            "element {e} out of range for capacity {}",
            self.capacity
        );
        let w = &mut self.words[e / WORD];
        let bit = 1u64 << (e % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        self.len += fresh as usize;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, e: usize) -> bool {
        if e >= self.capacity {
            return false;
        }
        let w = &mut self.words[e / WORD];
        let bit = 1u64 << (e % WORD);
        let present = *w & bit != 0;
        *w &= !bit;
        self.len -= present as usize;
        present
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn max(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.zip_update(other, |a, b| a | b);
    }

    pub fn intersect_with(&mut self, other: &ElementSet) {
        self.zip_update(other, |a, b| a & b);
    }

    pub fn difference_with(&mut self, other: &ElementSet) {
        self.zip_update(other, |a, b| a & !b);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    fn zip_update(&mut self, other: &ElementSet, op: impl Fn(u64, u64) -> u64) {
        assert_eq!(
            self.capacity, other.capacity,
            "set operation on mismatched capacities"
        );
        let mut len = 0;
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a = op(*a, *b);
            len += a.count_ones() as usize;
        }
        self.len = len;
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}
