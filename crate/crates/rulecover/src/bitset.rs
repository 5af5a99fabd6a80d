//! Fixed-width bit set used for example coverage and cover-matrix columns.

use std::fmt;

const WORD_BITS: usize = 64;

/// A set of indices drawn from `0..width`, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(width: usize) -> Self {
        BitSet {
            width,
            words: vec![0; width.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_indices(width: usize, indices: &[usize]) -> Self {
        let mut s = BitSet::new(width);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    /// Number of indices the set ranges over (not the number of members).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "bit {} out of range {}", i, self.width);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.width);
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        self.words[i / WORD_BITS] & (1 << (i % WORD_BITS)) != 0
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.width
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_superset(&self, other: &BitSet) -> bool {
        other.is_subset(self)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        debug_assert_eq!(self.width, other.width);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Indices in `0..width` that are not members.
    pub fn missing(&self) -> Vec<usize> {
        (0..self.width).filter(|&i| !self.contains(i)).collect()
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet{:?}/{}", self.indices(), self.width)
    }
}
