//! Subsets of a group of order at most 64, stored as a single machine word.

use std::fmt;
use std::ops::{BitAnd, BitOr, BitOrAssign};

use serde::{Deserialize, Serialize};

/// A group element, identified by its dense index in `[0, |G|)`.
///
/// Index 0 is always the identity.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Element(pub(crate) u8);

impl Element {
    pub const IDENTITY: Element = Element(0);

    pub fn new(index: usize) -> Self {
        assert!(index < ElemSet::CAPACITY, "element index {index} out of range");
        Element(index as u8)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

/// A set of group elements as a 64-bit mask; bit `i` is element `i`.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const CAPACITY: usize = 64;
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(g: Element) -> Self {
        ElemSet(1u64 << g.0)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn contains(self, g: Element) -> bool {
        self.0 >> g.0 & 1 == 1
    }

    #[inline]
    pub fn contains_identity(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn insert(&mut self, g: Element) {
        self.0 |= 1u64 << g.0;
    }

    pub fn remove(&mut self, g: Element) {
        self.0 &= !(1u64 << g.0);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn difference(self, other: ElemSet) -> ElemSet {
        ElemSet(self.0 & !other.0)
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<Element> {
        (self.0 != 0).then(|| Element(self.0.trailing_zeros() as u8))
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<Element> {
        self.iter().collect()
    }
}

impl FromIterator<Element> for ElemSet {
    fn from_iter<I: IntoIterator<Item = Element>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for g in iter {
            s.insert(g);
        }
        s
    }
}

impl BitOr for ElemSet {
    type Output = ElemSet;
    fn bitor(self, rhs: ElemSet) -> ElemSet {
        ElemSet(self.0 | rhs.0)
    }
}

impl BitOrAssign for ElemSet {
    fn bitor_assign(&mut self, rhs: ElemSet) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for ElemSet {
    type Output = ElemSet;
    fn bitand(self, rhs: ElemSet) -> ElemSet {
        ElemSet(self.0 & rhs.0)
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|g| g.0)).finish()
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = Element;

    #[inline]
    fn next(&mut self) -> Option<Element> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Element(i as u8))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}
