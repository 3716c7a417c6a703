use std::any::Any;

use super::RankOracle;
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};

/// `U_{r,n}`: every set of size at most `r` is independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    rank: u32,
    size: usize,
}

impl UniformMatroid {
    pub fn new(rank: u32, size: usize) -> Result<UniformMatroid> {
        if size > MAX_ELEMENTS {
            return Err(Error::SizeCap(size));
        }
        if rank as usize > size {
            return Err(Error::InvalidMatroid(format!("rank {rank} exceeds size {size}")));
        }
        Ok(UniformMatroid { rank, size })
    }

    pub fn rank_value(&self) -> u32 {
        self.rank
    }
}

impl RankOracle for UniformMatroid {
    fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn rank(&self, x: Subset) -> u32 {
        (x.len() as u32).min(self.rank)
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}

/// Direct sum of uniform matroids on consecutive index blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformSum {
    blocks: Vec<(u32, usize)>,
    masks: Vec<Subset>,
    size: usize,
}

impl UniformSum {
    /// `blocks[i] = (rank, size)`; block `i` occupies the next `size` indices.
    pub fn new(blocks: Vec<(u32, usize)>) -> Result<UniformSum> {
        let size: usize = blocks.iter().map(|b| b.1).sum();
        if size > MAX_ELEMENTS {
            return Err(Error::SizeCap(size));
        }
        let mut masks = Vec::with_capacity(blocks.len());
        let mut start = 0;
        for &(r, n) in &blocks {
            if r as usize > n {
                return Err(Error::InvalidMatroid(format!("block rank {r} exceeds block size {n}")));
            }
            masks.push(Subset::full(n + start) - Subset::full(start));
            start += n;
        }
        Ok(UniformSum { blocks, masks, size })
    }

    pub fn blocks(&self) -> &[(u32, usize)] {
        &self.blocks
    }
}

impl RankOracle for UniformSum {
    fn size(&self) -> usize {
        self.size
    }

    fn rank(&self, x: Subset) -> u32 {
        self.blocks
            .iter()
            .zip(&self.masks)
            .map(|(&(r, _), &m)| ((x & m).len() as u32).min(r))
            .sum()
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
