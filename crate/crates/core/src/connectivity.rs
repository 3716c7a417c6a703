//! Connectivity function, local connectivity, closures and the exact
//! connectivity `κ(Q,R)` between two disjoint sets.
//!
//! `κ` is computed by exhaustive branch and bound over the free elements
//! `E - Q - R`. Free elements are decided from the highest index down, "out"
//! before "in", so leaves are reached in increasing mask order. A node that has
//! put `A` on the `Q` side and `O` on the `R` side is pruned when
//! `⊓(A, O) = r(A) + r(O) - r(A ∪ O)` already reaches the best value found:
//! every completion `X` satisfies `λ(X) = ⊓(X, E - X) ≥ ⊓(A, O)`.

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::subset::Subset;

/// A separation `(A, E - A)` recorded by its `Q` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub side: Subset,
    pub lambda: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KappaResult {
    pub value: u32,
    pub witness: Separation,
    /// False when the search stopped at the threshold; `value` is then only an upper bound.
    pub exhaustive: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KappaOptions {
    /// Stop as soon as some `λ(X) < threshold` is found.
    pub threshold: Option<u32>,
    /// Split the search tree over the rayon pool.
    pub parallel: bool,
    pub deadline: Option<Instant>,
}

impl KappaOptions {
    pub fn exact() -> KappaOptions {
        KappaOptions::default()
    }

    pub fn below(threshold: u32) -> KappaOptions {
        KappaOptions { threshold: Some(threshold), ..KappaOptions::default() }
    }

    pub fn parallel(mut self, on: bool) -> KappaOptions {
        self.parallel = on;
        self
    }

    pub fn deadline(mut self, deadline: Option<Instant>) -> KappaOptions {
        self.deadline = deadline;
        self
    }
}

pub(crate) fn check_disjoint(a: Subset, b: Subset) -> Result<()> {
    if a.is_disjoint(b) {
        Ok(())
    } else {
        Err(Error::OverlappingSets((a & b).0))
    }
}

/// `λ(X) = r(X) + r(E - X) - r(E)`.
pub fn lambda(m: &Matroid, x: Subset) -> Result<u32> {
    m.ground().check(x)?;
    Ok(lambda_unchecked(m, x))
}

#[inline]
pub fn lambda_unchecked(m: &Matroid, x: Subset) -> u32 {
    m.rank_unchecked(x) + m.rank_unchecked(x.complement(m.len())) - m.full_rank()
}

/// `⊓(A, B) = r(A) + r(B) - r(A ∪ B)` for disjoint `A`, `B`.
pub fn sqcap(m: &Matroid, a: Subset, b: Subset) -> Result<u32> {
    m.ground().check(a)?;
    m.ground().check(b)?;
    check_disjoint(a, b)?;
    Ok(sqcap_unchecked(m, a, b))
}

#[inline]
pub(crate) fn sqcap_unchecked(m: &Matroid, a: Subset, b: Subset) -> u32 {
    m.rank_unchecked(a) + m.rank_unchecked(b) - m.rank_unchecked(a | b)
}

/// `cl(X) = {e : r(X ∪ e) = r(X)}`.
pub fn closure(m: &Matroid, x: Subset) -> Result<Subset> {
    m.ground().check(x)?;
    let rx = m.rank_unchecked(x);
    Ok(m.full().iter().filter(|&e| m.rank_unchecked(x.with(e)) == rx).collect())
}

/// Closure in the dual matroid.
pub fn coclosure(m: &Matroid, x: Subset) -> Result<Subset> {
    closure(&m.dual(), x)
}

/// Exact `κ(Q, R)` with the smallest minimizing witness.
pub fn kappa(m: &Matroid, q: Subset, r: Subset) -> Result<KappaResult> {
    kappa_with(m, q, r, KappaOptions::exact())
}

pub fn kappa_with(m: &Matroid, q: Subset, r: Subset, opts: KappaOptions) -> Result<KappaResult> {
    m.ground().check(q)?;
    m.ground().check(r)?;
    check_disjoint(q, r)?;
    let free = m.full() - q - r;
    let search = Search::new(m, free, opts.deadline);
    let (best, stopped) = if opts.parallel {
        search.run_parallel(q, r, opts.threshold)?
    } else {
        let mut best = Best::new(opts.threshold);
        let stopped = search.descend(0, q, m.rank_unchecked(q), r, m.rank_unchecked(r), &mut best, None)?;
        (best, stopped)
    };
    Ok(KappaResult {
        value: best.value,
        witness: Separation { side: best.witness, lambda: best.value },
        exhaustive: !stopped,
    })
}

/// Every `X` with `Q ⊆ X ⊆ E - R` and `λ(X) ≤ order_bound - 1`, in mask order.
pub fn enumerate_separations(
    m: &Matroid,
    q: Subset,
    r: Subset,
    order_bound: u32,
) -> Result<Vec<Separation>> {
    m.ground().check(q)?;
    m.ground().check(r)?;
    check_disjoint(q, r)?;
    let mut out = Vec::new();
    if order_bound == 0 {
        return Ok(out);
    }
    let search = Search::new(m, m.full() - q - r, None);
    search.collect(0, q, m.rank_unchecked(q), r, m.rank_unchecked(r), order_bound - 1, &mut out);
    Ok(out)
}

struct Best {
    value: u32,
    witness: Subset,
    threshold: Option<u32>,
    ticks: u32,
}

impl Best {
    fn new(threshold: Option<u32>) -> Best {
        Best { value: u32::MAX, witness: Subset::EMPTY, threshold, ticks: 0 }
    }

    fn done(&self) -> bool {
        self.threshold.is_some_and(|t| self.value < t)
    }
}

struct Search<'a> {
    m: &'a Matroid,
    /// free elements, highest index first
    order: Vec<usize>,
    deadline: Option<Instant>,
}

const SPLIT_DEPTH: usize = 6;

impl<'a> Search<'a> {
    fn new(m: &'a Matroid, free: Subset, deadline: Option<Instant>) -> Search<'a> {
        let mut order: Vec<usize> = free.iter().collect();
        order.reverse();
        Search { m, order, deadline }
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Returns `Ok(true)` when the threshold was hit.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        depth: usize,
        a: Subset,
        ra: u32,
        o: Subset,
        ro: u32,
        best: &mut Best,
        shared: Option<&AtomicU32>,
    ) -> Result<bool> {
        let bound = ra + ro - self.m.rank_unchecked(a | o);
        if bound >= best.value || shared.is_some_and(|s| bound > s.load(Ordering::Relaxed)) {
            return Ok(false);
        }
        if depth == self.order.len() {
            best.value = bound;
            best.witness = a;
            if let Some(s) = shared {
                s.fetch_min(bound, Ordering::Relaxed);
            }
            return Ok(best.done());
        }
        best.ticks = best.ticks.wrapping_add(1);
        if best.ticks & 0xfff == 1 && self.out_of_time() {
            return Err(Error::BudgetExhausted);
        }
        let f = self.order[depth];
        let o2 = o.with(f);
        if self.descend(depth + 1, a, ra, o2, self.m.rank_unchecked(o2), best, shared)? {
            return Ok(true);
        }
        let a2 = a.with(f);
        self.descend(depth + 1, a2, self.m.rank_unchecked(a2), o, ro, best, shared)
    }

    fn run_parallel(&self, q: Subset, r: Subset, threshold: Option<u32>) -> Result<(Best, bool)> {
        let split = self.order.len().min(SPLIT_DEPTH);
        let shared = AtomicU32::new(u32::MAX);
        let parts: Vec<Result<(u32, Subset, bool)>> = (0u32..1 << split)
            .into_par_iter()
            .map(|prefix| {
                if threshold.is_some_and(|t| shared.load(Ordering::Relaxed) < t) {
                    return Ok((u32::MAX, Subset::EMPTY, true));
                }
                let (mut a, mut o) = (q, r);
                for (d, &f) in self.order[..split].iter().enumerate() {
                    if prefix >> (split - 1 - d) & 1 == 1 {
                        a = a.with(f);
                    } else {
                        o = o.with(f);
                    }
                }
                let mut best = Best::new(threshold);
                let ra = self.m.rank_unchecked(a);
                let ro = self.m.rank_unchecked(o);
                let stopped = self.descend(split, a, ra, o, ro, &mut best, Some(&shared))?;
                Ok((best.value, best.witness, stopped))
            })
            .collect();
        let mut best = Best::new(threshold);
        let mut stopped = false;
        for part in parts {
            let (value, witness, s) = part?;
            stopped |= s;
            if (value, witness) < (best.value, best.witness) {
                best.value = value;
                best.witness = witness;
            }
        }
        Ok((best, stopped))
    }

    #[allow(clippy::too_many_arguments)]
    fn collect(&self, depth: usize, a: Subset, ra: u32, o: Subset, ro: u32, max: u32, out: &mut Vec<Separation>) {
        let bound = ra + ro - self.m.rank_unchecked(a | o);
        if bound > max {
            return;
        }
        if depth == self.order.len() {
            out.push(Separation { side: a, lambda: bound });
            return;
        }
        let f = self.order[depth];
        let o2 = o.with(f);
        self.collect(depth + 1, a, ra, o2, self.m.rank_unchecked(o2), max, out);
        let a2 = a.with(f);
        self.collect(depth + 1, a2, self.m.rank_unchecked(a2), o, ro, max, out);
    }
}
