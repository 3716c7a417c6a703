//! Ground sets and one-word subset masks.

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set. Every subset fits in a `u32`.
pub const MAX_ELEMENTS: usize = 32;

/// A subset of the ground set as an indicator word; bit `i` set iff element `i` is present.
///
/// The derived `Ord` is numeric order of the indicator, which is the tie-breaking
/// order used throughout the crate.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// All elements `0..n`.
    #[inline]
    pub fn full(n: usize) -> Subset {
        debug_assert!(n <= MAX_ELEMENTS);
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(i: usize) -> Subset {
        debug_assert!(i < MAX_ELEMENTS);
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Subset {
        it.into_iter().fold(Subset::EMPTY, |acc, i| acc.with(i))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_ELEMENTS && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    #[inline]
    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement relative to `0..n`.
    #[inline]
    pub fn complement(self, n: usize) -> Subset {
        Subset(!self.0 & Subset::full(n).0)
    }

    /// Smallest element, if any.
    #[inline]
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Element indices in ascending order.
    #[inline]
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    /// Whether every element is below `n`.
    #[inline]
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Subset::full(n))
    }
}

impl BitOr for Subset {
    type Output = Subset;
    #[inline]
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    #[inline]
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

impl Sub for Subset {
    type Output = Subset;
    #[inline]
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

impl Not for Subset {
    type Output = Subset;
    #[inline]
    fn not(self) -> Subset {
        Subset(!self.0)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for Subset {
    type Item = usize;
    type IntoIter = Elements;
    fn into_iter(self) -> Elements {
        self.iter()
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_indices(iter)
    }
}

/// Ascending iterator over the elements of a [`Subset`].
#[derive(Clone, Debug)]
pub struct Elements(u32);

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(i as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Iterates over all subsets of `mask` in increasing numeric order.
pub fn submasks(mask: Subset) -> impl Iterator<Item = Subset> {
    let m = mask.0;
    let mut cur = Some(0u32);
    std::iter::from_fn(move || {
        let out = cur?;
        // next submask in increasing order
        cur = if out == m { None } else { Some((out.wrapping_sub(m)) & m) };
        Some(Subset(out))
    })
}

/// Named elements `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    /// Ground set labelled `e1, e2, …, en`.
    pub fn with_size(n: usize) -> Result<GroundSet> {
        GroundSet::new((1..=n).map(|i| format!("e{i}")).collect())
    }

    pub fn new(labels: Vec<String>) -> Result<GroundSet> {
        if labels.len() > MAX_ELEMENTS {
            return Err(Error::SizeCap(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == ',' || c == '{' || c == '}')
            {
                return Err(Error::InvalidLabel(l.clone()));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(GroundSet { labels, index })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Resolves labels to a mask.
    pub fn mask_of<'a, I: IntoIterator<Item = &'a str>>(&self, labels: I) -> Result<Subset> {
        labels.into_iter().try_fold(Subset::EMPTY, |acc, l| {
            self.index_of(l)
                .map(|i| acc.with(i))
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        })
    }

    /// `{a,b,c}` rendering with labels in index order.
    pub fn format(&self, x: Subset) -> String {
        let names: Vec<&str> = x.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Checks that `x` only names elements of this ground set.
    pub fn check(&self, x: Subset) -> Result<()> {
        if x.fits(self.len()) {
            Ok(())
        } else {
            Err(Error::OutOfRange { mask: x.0, size: self.len() })
        }
    }
}
