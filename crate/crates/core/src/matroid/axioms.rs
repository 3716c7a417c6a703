//! Rank-axiom checks.

use super::Matroid;
use crate::error::{Error, Result};
use crate::subset::{submasks, Subset};

/// A failed rank axiom with the offending sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub x: Subset,
    pub y: Subset,
}

impl From<AxiomViolation> for Error {
    fn from(v: AxiomViolation) -> Error {
        Error::RankAxiom { axiom: v.axiom, detail: format!("X={:?} Y={:?}", v.x, v.y) }
    }
}

fn fail(axiom: &'static str, x: Subset, y: Subset) -> std::result::Result<(), AxiomViolation> {
    Err(AxiomViolation { axiom, x, y })
}

/// Single-element form of the axioms, `O(n^2 2^n)`; equivalent to the global form.
pub fn check_local_axioms(
    n: usize,
    rank: impl Fn(Subset) -> u32,
) -> std::result::Result<(), AxiomViolation> {
    if rank(Subset::EMPTY) != 0 {
        return fail("empty", Subset::EMPTY, Subset::EMPTY);
    }
    let full = Subset::full(n);
    for x in submasks(full) {
        let rx = rank(x);
        let outside = full - x;
        for a in outside {
            let xa = x.with(a);
            let ra = rank(xa);
            if ra < rx {
                return fail("monotone", x, xa);
            }
            if ra > rx + 1 {
                return fail("unit increase", x, xa);
            }
            for b in outside - Subset::full(a + 1) {
                let xb = x.with(b);
                if ra + rank(xb) < rank(xa.with(b)) + rx {
                    return fail("submodular", xa, xb);
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive check of the four rank axioms in their global form.
///
/// Visits every pair of subsets, so only meant for small ground sets.
pub fn verify_rank_axioms(m: &Matroid) -> Result<()> {
    let full = m.full();
    let r = |x| m.rank_unchecked(x);
    if r(Subset::EMPTY) != 0 {
        fail("empty", Subset::EMPTY, Subset::EMPTY)?;
    }
    for y in submasks(full) {
        let ry = r(y);
        for x in submasks(y) {
            if r(x) > ry {
                fail("monotone", x, y)?;
            }
        }
        for e in full - y {
            if r(y.with(e)) > ry + 1 {
                fail("unit increase", y, y.with(e))?;
            }
        }
        for x in submasks(full) {
            if r(x | y) + r(x & y) > r(x) + ry {
                fail("submodular", x, y)?;
            }
        }
    }
    Ok(())
}
