//! Deletable / contractible / flexible elements for a pair `(Q, R)`, the
//! reduction to a linking minor on `Q ∪ R`, and shrinking `(S, T)` to a pair
//! of sides whose sizes equal their connectivity.

use rayon::prelude::*;
use serde::Serialize;

use crate::connectivity::{check_disjoint, kappa, kappa_with, lambda_unchecked, KappaOptions};
use crate::error::{Error, Result};
use crate::matroid::{Matroid, MinorView, Operation};
use crate::subset::Subset;

/// How one element behaves with respect to `(Q, R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairClassification {
    pub element: usize,
    pub deletable: bool,
    pub contractible: bool,
    pub kappa_after_delete: u32,
    pub kappa_after_contract: u32,
}

impl PairClassification {
    pub fn is_flexible(&self) -> bool {
        self.deletable && self.contractible
    }

    pub fn preserves(&self, op: Operation) -> bool {
        match op {
            Operation::Delete => self.deletable,
            Operation::Contract => self.contractible,
        }
    }
}

/// `κ(Q, R)` in a minor, with `Q` and `R` given in base indices.
pub fn kappa_in_minor(view: &MinorView, q: Subset, r: Subset, opts: KappaOptions) -> Result<u32> {
    Ok(kappa_with(&view.matroid, view.to_view(q), view.to_view(r), opts)?.value)
}

fn check_pair(m: &Matroid, q: Subset, r: Subset) -> Result<()> {
    m.ground().check(q)?;
    m.ground().check(r)?;
    check_disjoint(q, r)
}

fn check_element(m: &Matroid, q: Subset, r: Subset, e: usize) -> Result<()> {
    if e >= m.len() {
        return Err(Error::OutOfRange { mask: 1u32.checked_shl(e as u32).unwrap_or(0), size: m.len() });
    }
    if (q | r).contains(e) {
        return Err(Error::ElementInPair(e));
    }
    Ok(())
}

fn classify_known(m: &Matroid, q: Subset, r: Subset, e: usize, k: u32) -> Result<PairClassification> {
    let after_delete = kappa_in_minor(&m.delete(e)?, q, r, KappaOptions::exact())?;
    let after_contract = kappa_in_minor(&m.contract(e)?, q, r, KappaOptions::exact())?;
    Ok(PairClassification {
        element: e,
        deletable: after_delete == k,
        contractible: after_contract == k,
        kappa_after_delete: after_delete,
        kappa_after_contract: after_contract,
    })
}

/// Exact classification of `e ∉ Q ∪ R`.
pub fn classify(m: &Matroid, q: Subset, r: Subset, e: usize) -> Result<PairClassification> {
    check_pair(m, q, r)?;
    check_element(m, q, r, e)?;
    let k = kappa(m, q, r)?.value;
    classify_known(m, q, r, e, k)
}

/// One entry per element of `f`, in index order. Elements are evaluated in parallel.
pub fn classify_all(m: &Matroid, q: Subset, r: Subset, f: Subset) -> Result<Vec<PairClassification>> {
    check_pair(m, q, r)?;
    m.ground().check(f)?;
    if let Some(e) = (f & (q | r)).first() {
        return Err(Error::ElementInPair(e));
    }
    let k = kappa(m, q, r)?.value;
    let elements: Vec<usize> = f.iter().collect();
    elements.par_iter().map(|&e| classify_known(m, q, r, e, k)).collect()
}

/// One step of a reduction, in base indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub element: usize,
    pub operation: Operation,
}

/// Replayable sequence of deletions and contractions ending in `result`.
#[derive(Clone, Debug)]
pub struct ReductionLog {
    pub steps: Vec<Step>,
    pub result: MinorView,
}

impl ReductionLog {
    /// Cumulative `(deleted, contracted)` masks.
    pub fn removed(steps: &[Step]) -> (Subset, Subset) {
        steps
            .iter()
            .fold((Subset::EMPTY, Subset::EMPTY), |(d, c), s| s.operation.extend(d, c, s.element))
    }
}

/// Removes every element outside `Q ∪ R`, in ascending index, deleting when
/// that keeps `κ(Q,R)` and contracting otherwise. The result `N` has
/// `E(N) = Q ∪ R` and `λ_N(Q) = κ_M(Q,R)`.
pub fn reduce_to_linking_minor(m: &Matroid, q: Subset, r: Subset) -> Result<ReductionLog> {
    check_pair(m, q, r)?;
    let k = kappa(m, q, r)?.value;
    let (mut deleted, mut contracted) = (Subset::EMPTY, Subset::EMPTY);
    let mut steps = Vec::new();
    for e in m.full() - q - r {
        let mut chosen = None;
        for op in Operation::BOTH {
            let (d, c) = op.extend(deleted, contracted, e);
            let view = m.minor(d, c)?;
            if kappa_in_minor(&view, q, r, KappaOptions::below(k))? == k {
                chosen = Some((op, d, c));
                break;
            }
        }
        let (op, d, c) = chosen.ok_or(Error::Dichotomy(e))?;
        steps.push(Step { element: e, operation: op });
        deleted = d;
        contracted = c;
    }
    let result = m.minor(deleted, contracted)?;
    debug_assert_eq!(lambda_unchecked(&result.matroid, result.to_view(q)), k);
    Ok(ReductionLog { steps, result })
}

/// Shrinks `S` and `T` to `S1 ⊆ S`, `T1 ⊆ T` with
/// `|S1| = |T1| = κ(S1,T1) = κ(S,T)`.
///
/// Sides take turns; on its turn a side drops its smallest-index element whose
/// removal keeps the connectivity. A side already at the target size passes.
pub fn shrink_to_linking_pair(m: &Matroid, s: Subset, t: Subset) -> Result<(Subset, Subset)> {
    check_pair(m, s, t)?;
    let l = kappa(m, s, t)?.value;
    let target = l as usize;
    let (mut s, mut t) = (s, t);
    let mut s_turn = true;
    while s.len() > target || t.len() > target {
        if (s_turn && s.len() == target) || (!s_turn && t.len() == target) {
            s_turn = !s_turn;
        }
        let (side, other) = if s_turn { (s, t) } else { (t, s) };
        let mut removed = None;
        for x in side {
            // shrinking a side cannot raise kappa, so "not below l" means "equal to l"
            let value = kappa_with(m, side.without(x), other, KappaOptions::below(l))?.value;
            if value == l {
                removed = Some(x);
                break;
            }
        }
        let x = removed.ok_or(Error::ShrinkStuck { s: s.0, t: t.0 })?;
        if s_turn {
            s = s.without(x);
        } else {
            t = t.without(x);
        }
        s_turn = !s_turn;
    }
    Ok((s, t))
}
