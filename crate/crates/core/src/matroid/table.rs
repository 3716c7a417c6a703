use std::any::Any;

use super::{check_local_axioms, RankOracle};
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};

/// Explicit rank value for every subset. Validated against the rank axioms
/// at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMatroid {
    size: usize,
    ranks: Vec<u8>,
}

/// Tables are limited to this many elements.
pub const TABLE_MAX_ELEMENTS: usize = 20;

impl TableMatroid {
    /// `ranks[mask]` is the rank of `mask`.
    pub fn new(size: usize, ranks: Vec<u32>) -> Result<TableMatroid> {
        if size > MAX_ELEMENTS {
            return Err(Error::SizeCap(size));
        }
        if size > TABLE_MAX_ELEMENTS {
            return Err(Error::InvalidMatroid(format!(
                "rank tables are limited to {TABLE_MAX_ELEMENTS} elements"
            )));
        }
        if ranks.len() != 1 << size {
            return Err(Error::InvalidMatroid(format!(
                "expected {} rank values, got {}",
                1usize << size,
                ranks.len()
            )));
        }
        if ranks.iter().any(|&r| r as usize > size) {
            return Err(Error::InvalidMatroid("rank value exceeds the ground set size".into()));
        }
        check_local_axioms(size, |x| ranks[x.0 as usize])?;
        Ok(TableMatroid { size, ranks: ranks.into_iter().map(|r| r as u8).collect() })
    }

    /// Tabulates any rank function.
    pub fn from_fn(size: usize, rank: impl Fn(Subset) -> u32) -> Result<TableMatroid> {
        let ranks = crate::subset::submasks(Subset::full(size)).map(rank).collect();
        TableMatroid::new(size, ranks)
    }

    pub fn ranks(&self) -> impl Iterator<Item = u32> + '_ {
        self.ranks.iter().map(|&r| r as u32)
    }
}

impl RankOracle for TableMatroid {
    fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn rank(&self, x: Subset) -> u32 {
        self.ranks[x.0 as usize] as u32
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
