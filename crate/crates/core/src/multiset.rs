//! Sorted-vector multisets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense vertex index, `0..n_vertices`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

/// A multiset stored as a sorted vector with repeats.
///
/// Two multisets are equal iff every element has the same multiplicity in
/// both, which the sorted representation turns into plain vector equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset<T: Ord = VertexId>(Vec<T>);

impl<T: Ord + Copy> Multiset<T> {
    pub fn new() -> Self {
        Multiset(Vec::new())
    }

    pub fn from_vec(mut items: Vec<T>) -> Self {
        items.sort_unstable();
        Multiset(items)
    }

    /// Total size, counting multiplicity.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Elements in sorted order, repeated by multiplicity.
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        self.0.iter().copied()
    }

    pub fn multiplicity(&self, x: T) -> usize {
        let lo = self.0.partition_point(|&y| y < x);
        let hi = self.0.partition_point(|&y| y <= x);
        hi - lo
    }

    /// `(element, multiplicity)` pairs in increasing element order.
    pub fn counts(&self) -> Vec<(T, usize)> {
        let mut out: Vec<(T, usize)> = Vec::new();
        for &x in &self.0 {
            match out.last_mut() {
                Some((y, c)) if *y == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    /// True when some element occurs at least twice.
    pub fn has_repeat(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Multiset sum.
    pub fn union_sum(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Multiset::from_vec(v)
    }

    pub fn map<U: Ord + Copy>(&self, f: impl Fn(T) -> U) -> Multiset<U> {
        Multiset::from_vec(self.0.iter().map(|&x| f(x)).collect())
    }
}

impl<T: Ord + Copy> Default for Multiset<T> {
    fn default() -> Self {
        Multiset::new()
    }
}

impl<T: Ord + Copy> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Multiset::from_vec(iter.into_iter().collect())
    }
}
