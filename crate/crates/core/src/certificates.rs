//! Nested separating sequences for sets of non-flexible elements.
//!
//! For `F ⊆ E - (Q ∪ R)` with every element non-flexible, a certificate is an
//! ordering `f_1, …, f_n` of `F` and a chain `A_1 ⊆ … ⊆ A_n` such that
//!
//! 1. `Q ⊆ A_i ⊆ E - R` and `λ(A_i) ≤ κ(Q,R)`,
//! 2. `A_i ⊆ A_{i+1}`,
//! 3. `A_i ∩ F = {f_1, …, f_i}`,
//! 4. `f_i ∈ cl(A_i - f_i) ∩ cl(E - A_i)` (guts) or the same with coclosures (coguts).
//!
//! The builder backtracks over the separations of order `κ + 1`; the verifier
//! re-derives everything from rank queries.

use std::collections::HashSet;

use serde::Serialize;

use crate::classification::classify_all;
use crate::connectivity::{check_disjoint, enumerate_separations, kappa, lambda_unchecked};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Guts,
    Coguts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedSequence {
    pub ordering: Vec<usize>,
    pub chain: Vec<Subset>,
    pub branch: Vec<Branch>,
}

impl NestedSequence {
    pub fn len(&self) -> usize {
        self.ordering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordering.is_empty()
    }
}

#[inline]
fn spans(m: &Matroid, x: Subset, e: usize) -> bool {
    m.rank_unchecked(x.with(e)) == m.rank_unchecked(x)
}

/// Which disjunct of the guts/coguts condition holds for `f` at `a`, preferring guts.
fn guts_branch(m: &Matroid, dual: &Matroid, a: Subset, f: usize) -> Option<Branch> {
    let inside = a.without(f);
    let outside = a.complement(m.len());
    if spans(m, inside, f) && spans(m, outside, f) {
        Some(Branch::Guts)
    } else if spans(dual, inside, f) && spans(dual, outside, f) {
        Some(Branch::Coguts)
    } else {
        None
    }
}

fn holds(m: &Matroid, dual: &Matroid, a: Subset, f: usize, branch: Branch) -> bool {
    let target = match branch {
        Branch::Guts => m,
        Branch::Coguts => dual,
    };
    spans(target, a.without(f), f) && spans(target, a.complement(m.len()), f)
}

struct Builder<'a> {
    m: &'a Matroid,
    dual: Matroid,
    f: Subset,
    separations: Vec<Subset>,
    dead: HashSet<(Subset, Subset)>,
}

impl Builder<'_> {
    fn extend(&mut self, used: Subset, prev: Subset, out: &mut NestedSequence) -> bool {
        if used == self.f {
            return true;
        }
        if self.dead.contains(&(used, prev)) {
            return false;
        }
        for fi in self.f - used {
            let want = used.with(fi);
            for idx in 0..self.separations.len() {
                let a = self.separations[idx];
                if a & self.f != want || !prev.is_subset_of(a) {
                    continue;
                }
                let Some(branch) = guts_branch(self.m, &self.dual, a, fi) else {
                    continue;
                };
                out.ordering.push(fi);
                out.chain.push(a);
                out.branch.push(branch);
                if self.extend(want, a, out) {
                    return true;
                }
                out.ordering.pop();
                out.chain.pop();
                out.branch.pop();
            }
        }
        self.dead.insert((used, prev));
        false
    }
}

/// Builds a certificate for `F`. Every element of `F` must be non-flexible
/// with respect to `(Q, R)`.
pub fn build_nested_sequence(m: &Matroid, q: Subset, r: Subset, f: Subset) -> Result<NestedSequence> {
    m.ground().check(q)?;
    m.ground().check(r)?;
    m.ground().check(f)?;
    check_disjoint(q, r)?;
    if let Some(e) = (f & (q | r)).first() {
        return Err(Error::ElementInPair(e));
    }
    if let Some(c) = classify_all(m, q, r, f)?.into_iter().find(|c| c.is_flexible()) {
        return Err(Error::FlexibleElement(c.element));
    }
    let k = kappa(m, q, r)?.value;
    let separations = enumerate_separations(m, q, r, k + 1)?.into_iter().map(|s| s.side).collect();
    let mut builder = Builder { m, dual: m.dual(), f, separations, dead: HashSet::new() };
    let mut out = NestedSequence { ordering: Vec::new(), chain: Vec::new(), branch: Vec::new() };
    if builder.extend(Subset::EMPTY, Subset::EMPTY, &mut out) {
        Ok(out)
    } else {
        Err(Error::CertificateNotFound)
    }
}

/// Outcome of one condition; `first_violation` is a 1-based position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub passed: bool,
    pub first_violation: Option<usize>,
}

impl Condition {
    fn check(n: usize, mut ok: impl FnMut(usize) -> bool) -> Condition {
        let first_violation = (0..n).find(|&i| !ok(i)).map(|i| i + 1);
        Condition { passed: first_violation.is_none(), first_violation }
    }

    fn failed_at(i: usize) -> Condition {
        Condition { passed: false, first_violation: Some(i) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Ordering, chain and branch lists have the same length.
    pub well_formed: bool,
    pub kappa: u32,
    pub separating: Condition,
    pub nested: Condition,
    pub prefix: Condition,
    pub guts: Condition,
    /// Positions (1-based) whose separation has `λ(A_i) < κ`.
    pub slack: Vec<usize>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.well_formed && self.separating.passed && self.nested.passed && self.prefix.passed && self.guts.passed
    }
}

/// Checks conditions 1–4 from rank queries alone.
pub fn verify_nested_sequence(
    m: &Matroid,
    q: Subset,
    r: Subset,
    f: Subset,
    cert: &NestedSequence,
) -> Result<VerificationReport> {
    m.ground().check(q)?;
    m.ground().check(r)?;
    m.ground().check(f)?;
    check_disjoint(q, r)?;
    let k = kappa(m, q, r)?.value;
    let n = cert.ordering.len();
    let well_formed = cert.chain.len() == n
        && cert.branch.len() == n
        && cert.chain.iter().all(|a| a.fits(m.len()))
        && cert.ordering.iter().all(|&e| e < m.len());
    if !well_formed {
        let bad = Condition::failed_at(1);
        return Ok(VerificationReport {
            well_formed,
            kappa: k,
            separating: bad,
            nested: bad,
            prefix: bad,
            guts: bad,
            slack: Vec::new(),
        });
    }
    let chain = &cert.chain;
    let no_r = r.complement(m.len());
    let separating = Condition::check(n, |i| {
        q.is_subset_of(chain[i]) && chain[i].is_subset_of(no_r) && lambda_unchecked(m, chain[i]) <= k
    });
    let nested = Condition::check(n.saturating_sub(1), |i| chain[i].is_subset_of(chain[i + 1]));
    let mut prefix_set = Subset::EMPTY;
    let mut prefix = Condition::check(n, |i| {
        let e = cert.ordering[i];
        let fresh = f.contains(e) && !prefix_set.contains(e);
        prefix_set = prefix_set.with(e);
        fresh && chain[i] & f == prefix_set
    });
    if prefix.passed && prefix_set != f {
        prefix = Condition::failed_at(n.max(1));
    }
    let dual = m.dual();
    let guts = Condition::check(n, |i| holds(m, &dual, chain[i], cert.ordering[i], cert.branch[i]));
    let slack = (0..n).filter(|&i| lambda_unchecked(m, chain[i]) < k).map(|i| i + 1).collect();
    Ok(VerificationReport { well_formed, kappa: k, separating, nested, prefix, guts, slack })
}
