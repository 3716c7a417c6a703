//! Elements whose deletion or contraction keeps both `κ(Q,R)` and `κ(S,T)`.
//!
//! For `F = E - (Q ∪ R ∪ S ∪ T)` with `|F| ≥ c(k, ℓ)` such an element is
//! guaranteed to exist. The search here is exhaustive, so it also reports
//! when none exists below that bound (the grid instances are the standard
//! example).

use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::classification::{kappa_in_minor, shrink_to_linking_pair, Step};
use crate::connectivity::{check_disjoint, kappa_with, KappaOptions};
use crate::error::{Error, Result};
use crate::matroid::{Matroid, MinorView, Operation};
use crate::subset::Subset;

/// `c(k, ℓ) = (2ℓ + 1)·2^(2k+1)`, saturating at `u64::MAX`.
pub fn c_bound(k: u32, l: u32) -> u64 {
    let shift = 2 * k + 1;
    if shift >= 64 {
        return u64::MAX;
    }
    (2 * l as u64 + 1).saturating_mul(1u64 << shift)
}

/// `2kℓ - k - ℓ + 1`.
pub fn conjecture_bound(k: u32, l: u32) -> i64 {
    let (k, l) = (k as i64, l as i64);
    2 * k * l - k - l + 1
}

/// A matroid with two pairs `(Q,R)` and `(S,T)`.
///
/// `Q ∩ R = ∅` and `S ∩ T = ∅`; the pairs may overlap each other.
#[derive(Clone, Debug)]
pub struct Instance {
    pub matroid: Matroid,
    pub q: Subset,
    pub r: Subset,
    pub s: Subset,
    pub t: Subset,
    k: OnceLock<u32>,
    l: OnceLock<u32>,
}

impl Instance {
    pub fn new(matroid: Matroid, q: Subset, r: Subset, s: Subset, t: Subset) -> Result<Instance> {
        for x in [q, r, s, t] {
            matroid.ground().check(x)?;
        }
        check_disjoint(q, r)?;
        check_disjoint(s, t)?;
        Ok(Instance { matroid, q, r, s, t, k: OnceLock::new(), l: OnceLock::new() })
    }

    /// `F = E - (Q ∪ R ∪ S ∪ T)`.
    pub fn free(&self) -> Subset {
        self.matroid.full() - self.q - self.r - self.s - self.t
    }

    /// `κ(Q, R)`.
    pub fn k(&self) -> u32 {
        self.kappas(None).expect("validated instance").0
    }

    /// `κ(S, T)`.
    pub fn l(&self) -> u32 {
        self.kappas(None).expect("validated instance").1
    }

    /// Both connectivities, computed once; fails only when the deadline passes.
    pub fn kappas(&self, deadline: Option<Instant>) -> Result<(u32, u32)> {
        let opts = KappaOptions::exact().deadline(deadline);
        let k = cached(&self.k, || Ok(kappa_with(&self.matroid, self.q, self.r, opts)?.value))?;
        let l = cached(&self.l, || Ok(kappa_with(&self.matroid, self.s, self.t, opts)?.value))?;
        Ok((k, l))
    }

    /// The same pairs carried into a minor; elements removed by the minor drop out.
    pub fn in_minor(&self, view: &MinorView) -> Result<Instance> {
        Instance::new(
            view.matroid.clone(),
            view.to_view(self.q),
            view.to_view(self.r),
            view.to_view(self.s),
            view.to_view(self.t),
        )
    }

    fn check_free(&self, e: usize) -> Result<()> {
        if e < self.matroid.len() && self.free().contains(e) {
            Ok(())
        } else {
            Err(Error::ElementNotFree(e))
        }
    }
}

fn cached(cell: &OnceLock<u32>, compute: impl FnOnce() -> Result<u32>) -> Result<u32> {
    if let Some(&v) = cell.get() {
        return Ok(v);
    }
    let v = compute()?;
    Ok(*cell.get_or_init(|| v))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Shrink `(S,T)` to a linking pair first and iterate on elements of
    /// `(S ∪ T) - (S1 ∪ T1)`, as in the existence proof.
    pub proof_path: bool,
    pub deadline: Option<Instant>,
}

/// One intermediate step of the proof path, applied to an element of `(S ∪ T) - (S1 ∪ T1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub element: String,
    pub operation: Operation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntertwineReport {
    /// Label of the chosen element.
    pub element: Option<String>,
    #[serde(skip)]
    pub index: Option<usize>,
    pub operation: Option<Operation>,
    #[serde(rename = "kappaQR_before")]
    pub kappa_qr_before: u32,
    #[serde(rename = "kappaST_before")]
    pub kappa_st_before: u32,
    #[serde(rename = "kappaQR_after")]
    pub kappa_qr_after: Option<u32>,
    #[serde(rename = "kappaST_after")]
    pub kappa_st_after: Option<u32>,
    pub guaranteed: bool,
    pub free_count: usize,
    pub c_bound: u64,
    pub conjecture_bound: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrunk_pair: Option<(Vec<String>, Vec<String>)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub proof_trace: Vec<TraceStep>,
}

impl IntertwineReport {
    /// `element/op (…)` or `none (…)`, one line.
    pub fn summary(&self) -> String {
        let relation = if self.guaranteed { ">=" } else { "<" };
        let tail = format!("|F|={} {relation} c={}", self.free_count, self.c_bound);
        match (&self.element, self.operation) {
            (Some(e), Some(op)) => format!(
                "{e} {op} (kappaQR={}, kappaST={}; {tail})",
                self.kappa_qr_before, self.kappa_st_before
            ),
            _ => {
                let verdict = if self.guaranteed { "THEOREM VIOLATION" } else { "consistent" };
                format!("none ({tail}, {verdict})")
            }
        }
    }
}

/// Whether `op` on `e` keeps `κ(Q,R) = k` and `κ(S,T) = l`. Early-stop search:
/// connectivity never rises in a minor, so "not below" means "equal".
fn preserves(m: &Matroid, pairs: [(Subset, Subset, u32); 2], e: usize, op: Operation, deadline: Option<Instant>) -> Result<bool> {
    let view = op.apply(m, e)?;
    for (a, b, target) in pairs {
        if kappa_in_minor(&view, a, b, KappaOptions::below(target).deadline(deadline))? < target {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First `(e, op)` in `candidates` (ascending, delete before contract) keeping both pairs.
fn first_qualifying(
    m: &Matroid,
    pairs: [(Subset, Subset, u32); 2],
    candidates: Subset,
    deadline: Option<Instant>,
) -> Result<Option<(usize, Operation)>> {
    let elements: Vec<usize> = candidates.iter().collect();
    let found = elements.par_iter().find_map_first(|&e| {
        for op in Operation::BOTH {
            match preserves(m, pairs, e, op, deadline) {
                Ok(true) => return Some(Ok((e, op))),
                Ok(false) => {}
                Err(err) => return Some(Err(err)),
            }
        }
        None
    });
    found.transpose()
}

/// Exact `(κ(Q,R), κ(S,T))` after `op` on `e`, on fresh oracles.
fn kappas_after(inst: &Instance, e: usize, op: Operation) -> Result<(u32, u32)> {
    let view = op.apply(&inst.matroid.fresh(), e)?;
    Ok((
        kappa_in_minor(&view, inst.q, inst.r, KappaOptions::exact())?,
        kappa_in_minor(&view, inst.s, inst.t, KappaOptions::exact())?,
    ))
}

fn base_report(inst: &Instance, k: u32, l: u32) -> IntertwineReport {
    let free_count = inst.free().len();
    let c = c_bound(k, l);
    IntertwineReport {
        element: None,
        index: None,
        operation: None,
        kappa_qr_before: k,
        kappa_st_before: l,
        kappa_qr_after: None,
        kappa_st_after: None,
        guaranteed: free_count as u64 >= c,
        free_count,
        c_bound: c,
        conjecture_bound: conjecture_bound(k, l),
        shrunk_pair: None,
        proof_trace: Vec::new(),
    }
}

/// Scans `F` in ascending index, trying deletion before contraction, and
/// returns the first element keeping both connectivities. The returned pair is
/// re-checked with exhaustive searches on fresh oracles.
pub fn find_intertwined_element(inst: &Instance, opts: SearchOptions) -> Result<IntertwineReport> {
    let (k, l) = inst.kappas(opts.deadline)?;
    let mut report = base_report(inst, k, l);
    let found = if opts.proof_path {
        proof_path(inst, k, l, opts.deadline, &mut report)?
    } else {
        let pairs = [(inst.q, inst.r, k), (inst.s, inst.t, l)];
        first_qualifying(&inst.matroid, pairs, inst.free(), opts.deadline)?
    };
    match found {
        Some((e, op)) => {
            let (kqr, kst) = kappas_after(inst, e, op)?;
            debug_assert_eq!((kqr, kst), (k, l));
            report.element = Some(inst.matroid.ground().label(e).to_string());
            report.index = Some(e);
            report.operation = Some(op);
            report.kappa_qr_after = Some(kqr);
            report.kappa_st_after = Some(kst);
            Ok(report)
        }
        None if report.guaranteed => Err(Error::TheoremViolation { k, l, free: report.free_count, bound: report.c_bound }),
        None => Ok(report),
    }
}

/// Shrink `(S,T)` to `(S1,T1)`, then repeatedly look for an element outside
/// `Q ∪ R ∪ S1 ∪ T1` keeping `κ(Q,R)` and `κ(S1,T1)`. Elements of `F` end the
/// search; other elements are removed from the working minor and the search continues.
fn proof_path(
    inst: &Instance,
    k: u32,
    l: u32,
    deadline: Option<Instant>,
    report: &mut IntertwineReport,
) -> Result<Option<(usize, Operation)>> {
    let m = &inst.matroid;
    let ground = m.ground();
    let (s1, t1) = shrink_to_linking_pair(m, inst.s, inst.t)?;
    report.shrunk_pair = Some((
        s1.iter().map(|i| ground.label(i).to_string()).collect(),
        t1.iter().map(|i| ground.label(i).to_string()).collect(),
    ));
    let free = inst.free();
    let (mut deleted, mut contracted) = (Subset::EMPTY, Subset::EMPTY);
    loop {
        let view = m.minor(deleted, contracted)?;
        let pairs = [
            (view.to_view(inst.q), view.to_view(inst.r), k),
            (view.to_view(s1), view.to_view(t1), l),
        ];
        let candidates = view.matroid.full() - pairs[0].0 - pairs[0].1 - pairs[1].0 - pairs[1].1;
        let Some((ve, op)) = first_qualifying(&view.matroid, pairs, candidates, deadline)? else {
            return Ok(None);
        };
        let e = view.map[ve];
        if free.contains(e) {
            return Ok(Some((e, op)));
        }
        report.proof_trace.push(TraceStep { element: ground.label(e).to_string(), operation: op });
        (deleted, contracted) = op.extend(deleted, contracted, e);
    }
}

/// Recomputes both connectivities after `op` on `e` from fresh oracles and
/// compares them with the instance's `(k, ℓ)`, also recomputed.
pub fn verify_intertwined(inst: &Instance, e: usize, op: Operation) -> Result<bool> {
    inst.check_free(e)?;
    let fresh = inst.matroid.fresh();
    let k = kappa_with(&fresh, inst.q, inst.r, KappaOptions::exact())?.value;
    let l = kappa_with(&fresh, inst.s, inst.t, KappaOptions::exact())?.value;
    let view = op.apply(&fresh, e)?;
    Ok(kappa_in_minor(&view, inst.q, inst.r, KappaOptions::exact())? == k
        && kappa_in_minor(&view, inst.s, inst.t, KappaOptions::exact())? == l)
}

#[derive(Clone, Debug)]
pub struct ShrinkOutcome {
    pub view: MinorView,
    /// Steps in base indices, in the order applied.
    pub steps: Vec<Step>,
    pub k: u32,
    pub l: u32,
    pub final_free: usize,
    /// `|F| < c(k, ℓ)` at exit.
    pub consistent: bool,
}

/// Applies qualifying elements one after another until none is left in the
/// current `F`, re-verifying both connectivities after every step.
pub fn shrink_preserving_both(inst: &Instance, opts: SearchOptions) -> Result<ShrinkOutcome> {
    let (k, l) = inst.kappas(opts.deadline)?;
    let m = &inst.matroid;
    let (mut deleted, mut contracted) = (Subset::EMPTY, Subset::EMPTY);
    let mut steps = Vec::new();
    loop {
        let view = m.minor(deleted, contracted)?;
        let current = inst.in_minor(&view)?;
        let _ = current.k.set(k);
        let _ = current.l.set(l);
        let report = find_intertwined_element(&current, opts)?;
        let (Some(ve), Some(op)) = (report.index, report.operation) else {
            let final_free = current.free().len();
            return Ok(ShrinkOutcome {
                view,
                steps,
                k,
                l,
                final_free,
                consistent: (final_free as u64) < c_bound(k, l),
            });
        };
        let e = view.map[ve];
        (deleted, contracted) = op.extend(deleted, contracted, e);
        let next = m.fresh().minor(deleted, contracted)?;
        let kept = (
            kappa_in_minor(&next, inst.q, inst.r, KappaOptions::exact())?,
            kappa_in_minor(&next, inst.s, inst.t, KappaOptions::exact())?,
        );
        if kept != (k, l) {
            return Err(Error::Dichotomy(e));
        }
        steps.push(Step { element: e, operation: op });
    }
}
