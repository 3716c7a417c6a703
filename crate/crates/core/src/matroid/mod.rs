//! Rank oracles and the [`Matroid`] handle every other module queries.
//!
//! Concrete oracles ([`LinearMatroid`], [`GraphicMatroid`], [`UniformMatroid`],
//! [`UniformSum`], [`TableMatroid`]) only know how to compute a rank. The
//! handle adds labels, a per-oracle memo table, and the dual and minor views.
//! Views never own a memo; they translate the query and hit the memo of the
//! concrete oracle underneath.

mod axioms;
mod graphic;
mod linear;
mod table;
mod uniform;

use std::any::Any;
use std::fmt;
use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use axioms::{check_local_axioms, verify_rank_axioms, AxiomViolation};
pub use graphic::GraphicMatroid;
pub use linear::LinearMatroid;
pub use table::{TableMatroid, TABLE_MAX_ELEMENTS};
pub use uniform::{UniformMatroid, UniformSum};

use crate::error::{Error, Result};
use crate::subset::{GroundSet, Subset};

/// Memo tables are only allocated for ground sets of at most this many elements.
pub const MEMO_MAX_ELEMENTS: usize = 26;

const UNSET: u8 = u8::MAX;

/// A rank function on `0..size()`.
///
/// Implementations may assume the queried mask fits the ground set; the
/// [`Matroid`] handle checks that before calling in.
pub trait RankOracle: fmt::Debug + Send + Sync + 'static {
    fn size(&self) -> usize;

    fn rank(&self, x: Subset) -> u32;

    fn as_any(&self) -> &dyn Any;
}

struct Memo {
    table: OnceLock<Option<Box<[AtomicU8]>>>,
}

impl Memo {
    fn new() -> Memo {
        Memo { table: OnceLock::new() }
    }

    #[inline]
    fn table(&self, n: usize) -> Option<&[AtomicU8]> {
        self.table
            .get_or_init(|| {
                (n <= MEMO_MAX_ELEMENTS)
                    .then(|| (0..1usize << n).map(|_| AtomicU8::new(UNSET)).collect())
            })
            .as_deref()
    }
}

#[derive(Clone)]
enum Node {
    Leaf { oracle: Arc<dyn RankOracle>, memo: Option<Arc<Memo>> },
    Dual(Arc<Matroid>),
    Minor(Arc<MinorData>),
}

struct MinorData {
    base: Matroid,
    contracted: Subset,
    rank_contracted: u32,
    /// view index -> base index, strictly increasing
    map: Vec<usize>,
}

impl MinorData {
    #[inline]
    fn lift(&self, x: Subset) -> Subset {
        let mut out = 0u32;
        for i in x {
            out |= 1 << self.map[i];
        }
        Subset(out)
    }
}

/// Shared, immutable handle to a matroid: ground set labels plus a rank oracle.
///
/// Cloning is cheap. Handles are `Send + Sync`; concurrent memo writes only ever
/// store the same value for a given mask.
#[derive(Clone)]
pub struct Matroid {
    ground: Arc<GroundSet>,
    node: Node,
    full_rank: u32,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.node {
            Node::Leaf { oracle, .. } => format!("{oracle:?}"),
            Node::Dual(_) => "dual".to_string(),
            Node::Minor(_) => "minor".to_string(),
        };
        f.debug_struct("Matroid")
            .field("size", &self.len())
            .field("rank", &self.full_rank)
            .field("kind", &kind)
            .finish()
    }
}

impl Matroid {
    /// Wraps a concrete oracle with default labels `e1..en`.
    pub fn new<O: RankOracle>(oracle: O) -> Result<Matroid> {
        let ground = GroundSet::with_size(oracle.size())?;
        Matroid::with_labels(oracle, ground)
    }

    pub fn with_labels<O: RankOracle>(oracle: O, ground: GroundSet) -> Result<Matroid> {
        Matroid::from_arc(Arc::new(oracle), ground, true)
    }

    fn from_arc(oracle: Arc<dyn RankOracle>, ground: GroundSet, memo: bool) -> Result<Matroid> {
        if oracle.size() != ground.len() {
            return Err(Error::InvalidMatroid(format!(
                "oracle has {} elements but {} labels were given",
                oracle.size(),
                ground.len()
            )));
        }
        let full_rank = oracle.rank(ground.full());
        Ok(Matroid {
            ground: Arc::new(ground),
            node: Node::Leaf { oracle, memo: memo.then(|| Arc::new(Memo::new())) },
            full_rank,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ground.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    #[inline]
    pub fn full(&self) -> Subset {
        self.ground.full()
    }

    /// `r(E)`.
    #[inline]
    pub fn full_rank(&self) -> u32 {
        self.full_rank
    }

    /// Checked rank query.
    pub fn rank(&self, x: Subset) -> Result<u32> {
        self.ground.check(x)?;
        Ok(self.rank_unchecked(x))
    }

    /// Rank query for masks already known to fit the ground set.
    #[inline]
    pub fn rank_unchecked(&self, x: Subset) -> u32 {
        debug_assert!(x.fits(self.len()));
        match &self.node {
            Node::Leaf { oracle, memo } => match memo.as_ref().and_then(|m| m.table(self.len())) {
                Some(table) => {
                    let slot = &table[x.0 as usize];
                    let v = slot.load(Ordering::Relaxed);
                    if v != UNSET {
                        return v as u32;
                    }
                    let r = oracle.rank(x);
                    slot.store(r as u8, Ordering::Relaxed);
                    r
                }
                None => oracle.rank(x),
            },
            Node::Dual(base) => {
                let n = self.len();
                x.len() as u32 + base.rank_unchecked(x.complement(n)) - base.full_rank
            }
            Node::Minor(data) => data.base.rank_unchecked(data.lift(x) | data.contracted) - data.rank_contracted,
        }
    }

    /// The concrete oracle behind this handle, or `None` for dual and minor views.
    pub fn oracle(&self) -> Option<&dyn RankOracle> {
        match &self.node {
            Node::Leaf { oracle, .. } => Some(oracle.as_ref()),
            _ => None,
        }
    }

    /// `M*`, with `r*(X) = |X| - r(E) + r(E - X)`.
    pub fn dual(&self) -> Matroid {
        let n = self.len();
        let full_rank = n as u32 - self.full_rank;
        Matroid { ground: self.ground.clone(), node: Node::Dual(Arc::new(self.clone())), full_rank }
    }

    /// `M \ deleted / contracted`. Surviving elements keep their relative order.
    pub fn minor(&self, deleted: Subset, contracted: Subset) -> Result<MinorView> {
        self.ground.check(deleted)?;
        self.ground.check(contracted)?;
        if !deleted.is_disjoint(contracted) {
            return Err(Error::OverlappingSets((deleted & contracted).0));
        }
        let kept = self.full() - deleted - contracted;
        let map: Vec<usize> = kept.iter().collect();
        let ground = GroundSet::new(map.iter().map(|&i| self.ground.label(i).to_string()).collect())?;
        let rank_contracted = self.rank_unchecked(contracted);
        let full_rank = self.rank_unchecked(kept | contracted) - rank_contracted;
        let matroid = Matroid {
            ground: Arc::new(ground),
            node: Node::Minor(Arc::new(MinorData {
                base: self.clone(),
                contracted,
                rank_contracted,
                map: map.clone(),
            })),
            full_rank,
        };
        Ok(MinorView { matroid, deleted, contracted, map })
    }

    /// `M \ e`.
    pub fn delete(&self, e: usize) -> Result<MinorView> {
        self.minor(Subset::singleton(e), Subset::EMPTY)
    }

    /// `M / e`.
    pub fn contract(&self, e: usize) -> Result<MinorView> {
        self.minor(Subset::EMPTY, Subset::singleton(e))
    }

    /// Same rank function, rebuilt over new memo tables all the way down.
    pub fn fresh(&self) -> Matroid {
        self.rebuild(true)
    }

    /// Same rank function with memoization switched off all the way down.
    pub fn uncached(&self) -> Matroid {
        self.rebuild(false)
    }

    fn rebuild(&self, memo: bool) -> Matroid {
        let node = match &self.node {
            Node::Leaf { oracle, .. } => Node::Leaf {
                oracle: oracle.clone(),
                memo: memo.then(|| Arc::new(Memo::new())),
            },
            Node::Dual(base) => Node::Dual(Arc::new(base.rebuild(memo))),
            Node::Minor(d) => Node::Minor(Arc::new(MinorData {
                base: d.base.rebuild(memo),
                contracted: d.contracted,
                rank_contracted: d.rank_contracted,
                map: d.map.clone(),
            })),
        };
        Matroid { ground: self.ground.clone(), node, full_rank: self.full_rank }
    }

    /// Same matroid with different element names.
    pub fn relabel(&self, ground: GroundSet) -> Result<Matroid> {
        if ground.len() != self.len() {
            return Err(Error::InvalidMatroid("relabeling changes the ground set size".into()));
        }
        Ok(Matroid { ground: Arc::new(ground), node: self.node.clone(), full_rank: self.full_rank })
    }
}

/// Deletion or contraction of a single element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Delete,
    Contract,
}

impl Operation {
    pub const BOTH: [Operation; 2] = [Operation::Delete, Operation::Contract];

    pub fn apply(self, m: &Matroid, e: usize) -> Result<MinorView> {
        match self {
            Operation::Delete => m.delete(e),
            Operation::Contract => m.contract(e),
        }
    }

    /// The same operation expressed on cumulative `(deleted, contracted)` masks.
    pub fn extend(self, deleted: Subset, contracted: Subset, e: usize) -> (Subset, Subset) {
        match self {
            Operation::Delete => (deleted.with(e), contracted),
            Operation::Contract => (deleted, contracted.with(e)),
        }
    }

    pub fn dual(self) -> Operation {
        match self {
            Operation::Delete => Operation::Contract,
            Operation::Contract => Operation::Delete,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Operation::Delete => "delete",
            Operation::Contract => "contract",
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A minor `M \ D / C` together with the order-preserving relabeling onto `E - D - C`.
#[derive(Clone, Debug)]
pub struct MinorView {
    pub matroid: Matroid,
    pub deleted: Subset,
    pub contracted: Subset,
    /// `map[i]` is the base index of view element `i`.
    pub map: Vec<usize>,
}

impl MinorView {
    /// Base mask restricted to surviving elements, in view indices.
    pub fn to_view(&self, x: Subset) -> Subset {
        self.map.iter().enumerate().filter(|&(_, &b)| x.contains(b)).map(|(i, _)| i).collect()
    }

    /// View mask in base indices.
    pub fn to_base(&self, x: Subset) -> Subset {
        x.iter().map(|i| self.map[i]).collect()
    }

    /// View index of a base element, if it survived.
    pub fn view_index(&self, base: usize) -> Option<usize> {
        self.map.binary_search(&base).ok()
    }
}
