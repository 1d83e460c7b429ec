//! Sets of leaf labels as 64-bit masks.
//!
//! Labels are 1-based; label `l` occupies bit `l - 1`, so at most 64 leaves
//! are representable. Every enumeration here is in lexicographic order of the
//! sorted label tuple, which is the order witnesses are reported in.

use std::fmt;

use crate::number::binomial;

pub const MAX_LEAVES: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LeafSet(u64);

impl LeafSet {
    pub const EMPTY: LeafSet = LeafSet(0);

    pub fn from_bits(bits: u64) -> Self {
        LeafSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{1..n}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_LEAVES, "at most {MAX_LEAVES} leaves");
        if n == 64 {
            LeafSet(u64::MAX)
        } else {
            LeafSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(label: usize) -> Self {
        assert!((1..=MAX_LEAVES).contains(&label), "leaf label {label} out of range");
        LeafSet(1u64 << (label - 1))
    }

    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        labels.into_iter().fold(LeafSet::EMPTY, |acc, l| acc.with(l))
    }

    pub fn contains(self, label: usize) -> bool {
        (1..=MAX_LEAVES).contains(&label) && self.0 & (1u64 << (label - 1)) != 0
    }

    #[must_use]
    pub fn with(self, label: usize) -> Self {
        self | LeafSet::singleton(label)
    }

    #[must_use]
    pub fn without(self, label: usize) -> Self {
        LeafSet(self.0 & !LeafSet::singleton(label).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: LeafSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: LeafSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[must_use]
    pub fn minus(self, other: LeafSet) -> Self {
        LeafSet(self.0 & !other.0)
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Labels in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let tz = bits.trailing_zeros();
            bits &= bits - 1;
            Some(tz as usize + 1)
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All `size`-subsets of `self`, lexicographic in the sorted tuple.
    pub fn subsets(self, size: usize) -> Subsets {
        Subsets::new(self.to_vec(), size)
    }

    /// Colexicographic rank among the `|self|`-subsets of `{1..}`; a dense
    /// index into arrays of length `C(n, |self|)`.
    pub fn colex_rank(self) -> usize {
        self.iter()
            .enumerate()
            .map(|(i, label)| binomial(label as i64 - 1, i as i64 + 1) as usize)
            .sum()
    }
}

impl std::ops::BitOr for LeafSet {
    type Output = LeafSet;
    fn bitor(self, rhs: LeafSet) -> LeafSet {
        LeafSet(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for LeafSet {
    type Output = LeafSet;
    fn bitand(self, rhs: LeafSet) -> LeafSet {
        LeafSet(self.0 & rhs.0)
    }
}

impl fmt::Debug for LeafSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for LeafSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for LeafSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        LeafSet::from_labels(iter)
    }
}

/// Lexicographic iterator over fixed-size subsets of a label list.
pub struct Subsets {
    pool: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(pool: Vec<usize>, size: usize) -> Self {
        let done = size > pool.len();
        Subsets {
            idx: (0..size).collect(),
            pool,
            done,
        }
    }
}

impl Iterator for Subsets {
    type Item = LeafSet;

    fn next(&mut self) -> Option<LeafSet> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.pool[i]).collect();
        let r = self.idx.len();
        let m = self.pool.len();
        let mut pos = r;
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.idx[pos] < m - r + pos {
                self.idx[pos] += 1;
                for q in pos + 1..r {
                    self.idx[q] = self.idx[q - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}
