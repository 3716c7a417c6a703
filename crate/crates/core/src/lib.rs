//! Connectivity between subsets of a matroid's ground set.
//!
//! The crate computes `κ(Q,R)`, the smallest order of a separation putting
//! `Q` and `R` on different sides, classifies elements as deletable,
//! contractible or flexible for a pair, builds linking minors and nested
//! separating sequences, and searches for elements whose deletion or
//! contraction keeps two connectivities `κ(Q,R)` and `κ(S,T)` intact.
//!
//! Ground sets are capped at 32 elements so that every subset is one
//! machine word ([`Subset`]).

pub mod certificates;
pub mod classification;
pub mod connectivity;
pub mod error;
pub mod experiments;
pub mod format;
pub mod intertwine;
pub mod matroid;
pub mod subset;

pub use connectivity::{
    closure, coclosure, enumerate_separations, kappa, kappa_with, lambda, sqcap, KappaOptions,
    KappaResult, Separation,
};
pub use error::{Error, Result};
pub use intertwine::{c_bound, conjecture_bound, Instance, IntertwineReport};
pub use matroid::{
    GraphicMatroid, LinearMatroid, Matroid, MinorView, Operation, RankOracle, TableMatroid, UniformMatroid,
    UniformSum,
};
pub use subset::{GroundSet, Subset, MAX_ELEMENTS};
