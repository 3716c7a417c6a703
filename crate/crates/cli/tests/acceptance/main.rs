//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Every check compares library output with values recomputed by the
//! reference rank functions in `reference.rs` (plain formulas and full
//! subset enumeration).


use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use intertwine_core::certificates::{build_nested_sequence, verify_nested_sequence, Branch, NestedSequence};
use intertwine_core::classification::{classify, classify_all, reduce_to_linking_minor, shrink_to_linking_pair, ReductionLog};
use intertwine_core::experiments::{build_grid_instance, random_instance, run_extremal_check, Family, ScanConfig};
use intertwine_core::format::write_instance;
use intertwine_core::intertwine::{find_intertwined_element, shrink_preserving_both, verify_intertwined, SearchOptions};
use intertwine_core::subset::submasks;
use intertwine_core::{
    c_bound, conjecture_bound, enumerate_separations, kappa, lambda, GraphicMatroid, Instance, LinearMatroid, Matroid,
    Subset, TableMatroid, UniformMatroid, UniformSum,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use reference::{Reference, Restricted};

const KINDS: [&str; 9] = ["graphic", "gf2", "gf3", "gf5", "uniform", "uniform-sum", "table", "dual", "minor"];
const PER_KIND: usize = 27;

struct Case {
    kind: &'static str,
    reference: Reference,
    matroid: Matroid,
    inst: Instance,
    /// A second `(Q, R)` pair for checks that sample several.
    extra: (u32, u32),
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Reference {
    let vertices = rng.gen_range(2..=5);
    let edges = (0..n).map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices))).collect();
    Reference::Graph { vertices, edges }
}

fn random_linear(rng: &mut ChaCha8Rng, prime: u32, n: usize) -> Reference {
    let rows = (0..rng.gen_range(1..=4)).map(|_| (0..n).map(|_| rng.gen_range(0..prime)).collect()).collect();
    Reference::Linear { prime, rows }
}

fn random_sum(rng: &mut ChaCha8Rng, n: usize) -> Reference {
    let mut blocks = Vec::new();
    let mut left = n;
    while left > 0 {
        let size = rng.gen_range(1..=left.min(4));
        blocks.push((rng.gen_range(0..=size as u32), size));
        left -= size;
    }
    Reference::Sum(blocks)
}

fn random_reference(rng: &mut ChaCha8Rng, kind: &str, n: usize) -> Reference {
    match kind {
        "graphic" => random_graph(rng, n),
        "gf2" => random_linear(rng, 2, n),
        "gf3" => random_linear(rng, 3, n),
        "gf5" => random_linear(rng, 5, n),
        "uniform" => Reference::Uniform { rank: rng.gen_range(0..=n as u32), size: n },
        "uniform-sum" => random_sum(rng, n),
        "table" => {
            let source = if rng.gen_bool(0.5) { random_graph(rng, n) } else { random_linear(rng, 3, n) };
            Reference::Table((0..1u32 << n).map(|x| source.rank(x)).collect())
        }
        "dual" => {
            let base = match rng.gen_range(0..3) {
                0 => random_graph(rng, n),
                1 => random_linear(rng, 2, n),
                _ => random_sum(rng, n),
            };
            Reference::Dual(Box::new(base))
        }
        _ => {
            let base = if rng.gen_bool(0.5) { random_graph(rng, n + 2) } else { random_linear(rng, 5, n + 2) };
            let mut picks: Vec<usize> = (0..n + 2).collect();
            picks.shuffle(rng);
            let (d, c) = (picks[0], picks[1]);
            let map = (0..n + 2).filter(|&i| i != d && i != c).collect();
            Reference::Minor { base: Box::new(base), contracted: 1 << c, map }
        }
    }
}

/// The library's matroid for a reference description.
fn library_matroid(r: &Reference) -> Matroid {
    match r {
        Reference::Graph { vertices, edges } => Matroid::new(GraphicMatroid::new(*vertices, edges.clone()).unwrap()),
        Reference::Linear { prime, rows } => {
            let rows = rows.iter().map(|row| row.iter().map(|&v| v as u8).collect()).collect();
            Matroid::new(LinearMatroid::new(*prime as u8, rows).unwrap())
        }
        Reference::Uniform { rank, size } => Matroid::new(UniformMatroid::new(*rank, *size).unwrap()),
        Reference::Sum(blocks) => Matroid::new(UniformSum::new(blocks.clone()).unwrap()),
        Reference::Table(t) => Matroid::new(TableMatroid::new(r.size(), t.clone()).unwrap()),
        Reference::Dual(b) => Ok(library_matroid(b).dual()),
        Reference::Minor { base, contracted, map } => {
            let kept = map.iter().fold(0u32, |acc, &i| acc | 1 << i);
            let deleted = base.full() & !kept & !contracted;
            Ok(library_matroid(base).minor(Subset(deleted), Subset(*contracted)).unwrap().matroid)
        }
    }
    .unwrap()
}

/// Random disjoint pair, both sides non-empty when there is room.
fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (u32, u32) {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let a = rng.gen_range(1..=(n / 3).max(1));
    let b = rng.gen_range(1..=(n / 3).max(1)).min(n - a);
    let q = order[..a].iter().fold(0, |acc, &i| acc | 1u32 << i);
    let r = order[a..a + b].iter().fold(0, |acc, &i| acc | 1u32 << i);
    (q, r)
}

fn corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut cases = Vec::new();
    for kind in KINDS {
        for _ in 0..PER_KIND {
            let n = rng.gen_range(3..=9);
            let reference = random_reference(&mut rng, kind, n);
            let matroid = library_matroid(&reference);
            let (q, r) = random_pair(&mut rng, n);
            let (s, t) = random_pair(&mut rng, n);
            let extra = random_pair(&mut rng, n);
            let inst = Instance::new(matroid.clone(), Subset(q), Subset(r), Subset(s), Subset(t)).unwrap();
            cases.push(Case { kind, reference, matroid, inst, extra });
        }
    }
    cases
}

fn pairs(c: &Case) -> [(u32, u32); 2] {
    [(c.inst.q.0, c.inst.r.0), c.extra]
}

type Verdict = Result<String, String>;

fn criterion_1(corpus: &[Case]) -> Verdict {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut kinds = std::collections::BTreeSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, c) in corpus.iter().enumerate() {
        kinds.insert(c.kind);
        let m = &c.matroid;
        let n = m.len();
        let full = m.full();
        let rank = |x: Subset| m.rank(x).unwrap();
        let rf = rank(full);
        let dual = m.dual();
        for x in submasks(full) {
            let rx = rank(x);
            if rx != c.reference.rank(x.0) {
                violations.push(format!("case {i}: rank of {x:?} disagrees with reference"));
            }
            if rx as usize > x.len() {
                violations.push(format!("case {i}: r({x:?}) > |X|"));
            }
            for e in full - x {
                let ry = rank(x.with(e));
                if ry < rx || ry > rx + 1 {
                    violations.push(format!("case {i}: monotone/unit at {x:?} + {e}"));
                }
            }
            if dual.rank(x).unwrap() != x.len() as u32 + rank(x.complement(n)) - rf
                || dual.dual().rank(x).unwrap() != rx
            {
                violations.push(format!("case {i}: dual identity at {x:?}"));
            }
        }
        for x in submasks(full) {
            for y in submasks(full) {
                if rank(x | y) + rank(x & y) > rank(x) + rank(y) {
                    violations.push(format!("case {i}: submodular at {x:?}, {y:?}"));
                }
            }
        }
        // minor identity for a random (D, C)
        let tags: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let d: Subset = (0..n).filter(|&j| tags[j] == 1).collect();
        let cset: Subset = (0..n).filter(|&j| tags[j] == 2).collect();
        let view = m.minor(d, cset).unwrap();
        let kept: Vec<usize> = (0..n).filter(|&j| tags[j] == 0).collect();
        let rc = rank(cset);
        for x in submasks(view.matroid.full()) {
            let lifted: Subset = x.iter().map(|j| kept[j]).collect();
            if view.matroid.rank(x).unwrap() != rank(lifted | cset) - rc {
                violations.push(format!("case {i}: minor identity at {x:?}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if violations.is_empty() && elapsed < Duration::from_secs(30) && corpus.len() >= 200 {
        Ok(format!("{} matroids over {} oracle kinds, 0 violations, {:.1}s", corpus.len(), kinds.len(), elapsed.as_secs_f64()))
    } else {
        Err(format!("{} violations (first: {:?}), {:.1}s", violations.len(), violations.first(), elapsed.as_secs_f64()))
    }
}

fn criterion_2(corpus: &[Case]) -> Verdict {
    let mut violations = Vec::new();
    let mut pair_checks = 0;
    for (i, c) in corpus.iter().enumerate() {
        let m = &c.matroid;
        let n = m.len();
        let dual = m.dual();
        let lam = |x: Subset| lambda(m, x).unwrap();
        let whole = Restricted::whole(&c.reference);
        for x in submasks(m.full()) {
            let l = lam(x);
            if l != whole.lambda(x.0) || l != lam(x.complement(n)) || l != lambda(&dual, x).unwrap() {
                violations.push(format!("case {i}: lambda symmetry/duality at {x:?}"));
            }
            for y in submasks(m.full()) {
                if lam(x | y) + lam(x & y) > l + lam(y) {
                    violations.push(format!("case {i}: lambda submodular at {x:?}, {y:?}"));
                }
            }
        }
        for (q, r) in pairs(c) {
            pair_checks += 1;
            let (want, witness) = whole.kappa(q, r);
            let got = kappa(m, Subset(q), Subset(r)).unwrap();
            let got_dual = kappa(&dual, Subset(q), Subset(r)).unwrap().value;
            if got.value != want || got.witness.side.0 != witness || got_dual != want {
                violations.push(format!("case {i}: kappa({q:#x},{r:#x}) = {}/{got_dual}, reference {want}", got.value));
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{} matroids, {pair_checks} kappa pairs in M and M*, 0 violations", corpus.len()))
    } else {
        Err(format!("{} violations (first: {:?})", violations.len(), violations.first()))
    }
}

fn criterion_3(corpus: &[Case]) -> Verdict {
    let mut checks = 0;
    let mut violations = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        let whole = Restricted::whole(&c.reference);
        let dual_ref = Reference::Dual(Box::new(c.reference.clone()));
        let dual_whole = Restricted::whole(&dual_ref);
        let dual = c.matroid.dual();
        for (q, r) in pairs(c) {
            let k = whole.kappa(q, r).0;
            for e in (0..c.matroid.len()).filter(|&e| (q | r) >> e & 1 == 0) {
                checks += 1;
                let kd = whole.delete(e).kappa(q, r).0;
                let kc = whole.contract(e).kappa(q, r).0;
                let lib = classify(&c.matroid, Subset(q), Subset(r), e).unwrap();
                let lib_dual = classify(&dual, Subset(q), Subset(r), e).unwrap();
                let dual_deletable = dual_whole.delete(e).kappa(q, r).0 == k;
                let dual_contractible = dual_whole.contract(e).kappa(q, r).0 == k;
                let ok = (kd == k || kc == k)
                    && (lib.kappa_after_delete, lib.kappa_after_contract) == (kd, kc)
                    && lib.deletable == dual_contractible
                    && lib.contractible == dual_deletable
                    && (lib_dual.deletable, lib_dual.contractible) == (lib.contractible, lib.deletable);
                if !ok {
                    violations.push(format!("case {i}: element {e} for ({q:#x},{r:#x})"));
                }
            }
        }
    }
    if violations.is_empty() && checks >= 500 {
        Ok(format!("{checks} (M,Q,R,e) checks, all deletable or contractible, duality swap holds"))
    } else {
        Err(format!("{checks} checks, {} violations (first: {:?})", violations.len(), violations.first()))
    }
}

fn criterion_4(corpus: &[Case]) -> Verdict {
    let mut checks = 0;
    let mut separations = 0;
    let mut violations = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        let whole = Restricted::whole(&c.reference);
        for (q, r) in pairs(c) {
            let k = whole.kappa(q, r).0;
            let listed: Vec<u32> = enumerate_separations(&c.matroid, Subset(q), Subset(r), k + 1)
                .unwrap()
                .into_iter()
                .map(|s| s.side.0)
                .collect();
            let expected = whole.separations(q, r, k);
            if listed != expected {
                violations.push(format!("case {i}: separation list differs from reference"));
            }
            for &u in &expected {
                separations += 1;
                let ku = whole.kappa(u, r).0;
                for e in (0..c.matroid.len()).filter(|&e| (u | r) >> e & 1 == 0) {
                    let contracted = whole.contract(e);
                    if contracted.kappa(q, r).0 < k {
                        checks += 1;
                        if contracted.kappa(u, r).0 >= ku {
                            violations.push(format!("case {i}: U={u:#x}, e={e}"));
                        }
                    }
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{separations} separating sets, {checks} non-contractible elements checked, 0 violations"))
    } else {
        Err(format!("{} violations (first: {:?})", violations.len(), violations.first()))
    }
}

fn criterion_5(corpus: &[Case]) -> Verdict {
    let mut steps = 0;
    let mut violations = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        for (q, r) in pairs(c) {
            let k = Restricted::whole(&c.reference).kappa(q, r).0;
            let log = reduce_to_linking_minor(&c.matroid, Subset(q), Subset(r)).unwrap();
            let n = &log.result;
            let mapped: u32 = n.map.iter().fold(0, |acc, &j| acc | 1 << j);
            if mapped != q | r || lambda(&n.matroid, n.to_view(Subset(q))).unwrap() != k {
                violations.push(format!("case {i}: final minor wrong"));
            }
            for j in 1..=log.steps.len() {
                steps += 1;
                let (d, cset) = ReductionLog::removed(&log.steps[..j]);
                let minor = Restricted::minor(&c.reference, d.0, cset.0);
                if minor.kappa(q, r).0 != k {
                    violations.push(format!("case {i}: kappa changed at step {j}"));
                }
                if j == log.steps.len() && minor.lambda(q) != k {
                    violations.push(format!("case {i}: reference lambda of Q in the linking minor"));
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(format!("{} reductions, {steps} logged steps, kappa invariant after each", 2 * corpus.len()))
    } else {
        Err(format!("{} violations (first: {:?})", violations.len(), violations.first()))
    }
}

fn criterion_6(corpus: &[Case]) -> Verdict {
    let mut violations = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        let whole = Restricted::whole(&c.reference);
        let (s, t) = (c.inst.s.0, c.inst.t.0);
        let l = whole.kappa(s, t).0;
        match shrink_to_linking_pair(&c.matroid, Subset(s), Subset(t)) {
            Ok((s1, t1)) => {
                let ok = s1.0 & !s == 0
                    && t1.0 & !t == 0
                    && s1.len() as u32 == l
                    && t1.len() as u32 == l
                    && whole.kappa(s1.0, t1.0).0 == l;
                if !ok {
                    violations.push(format!("case {i}: ({s1:?}, {t1:?}) for kappa {l}"));
                }
            }
            Err(e) => violations.push(format!("case {i}: {e}")),
        }
    }
    if violations.is_empty() {
        Ok(format!("{} shrinks, |S1|=|T1|=kappa(S1,T1)=kappa(S,T) on all", corpus.len()))
    } else {
        Err(format!("{} violations (first: {:?})", violations.len(), violations.first()))
    }
}

/// Checks the four certificate conditions with reference ranks only.
fn reference_certificate_ok(whole: &Restricted, q: u32, r: u32, f: u32, cert: &NestedSequence) -> bool {
    let k = whole.kappa(q, r).0;
    let n = cert.ordering.len();
    if cert.chain.len() != n || cert.branch.len() != n {
        return false;
    }
    let mut prefix = 0u32;
    for i in 0..n {
        let a = cert.chain[i].0;
        let fi = cert.ordering[i];
        prefix |= 1 << fi;
        let separating = a & q == q && a & r == 0 && whole.lambda(a) <= k;
        let nested = i + 1 == n || a & !cert.chain[i + 1].0 == 0;
        let prefix_ok = a & f == prefix;
        let (inside, outside) = (a & !(1 << fi), whole.ground & !a);
        let condition = match cert.branch[i] {
            Branch::Guts => whole.spans(inside, fi) && whole.spans(outside, fi),
            Branch::Coguts => whole.cospans(inside, fi) && whole.cospans(outside, fi),
        };
        if !(separating && nested && prefix_ok && condition) {
            return false;
        }
    }
    prefix == f
}

fn criterion_7(corpus: &[Case]) -> Verdict {
    let mut applicable = 0;
    let mut extended = 0;
    let mut violations = Vec::new();
    for (i, c) in corpus.iter().enumerate() {
        let whole = Restricted::whole(&c.reference);
        let (q, r) = (c.inst.q, c.inst.r);
        let mut targets = Vec::new();
        let free = c.inst.free();
        let classes = classify_all(&c.matroid, q, r, free).unwrap();
        if free.len() <= 10 && classes.iter().all(|k| !k.is_flexible()) {
            applicable += 1;
            targets.push(free);
        }
        // also every non-flexible element outside Q and R
        let wider = c.matroid.full() - q - r;
        let non_flexible: Subset = classify_all(&c.matroid, q, r, wider)
            .unwrap()
            .into_iter()
            .filter(|k| !k.is_flexible())
            .map(|k| k.element)
            .collect();
        if non_flexible.len() <= 10 {
            extended += 1;
            targets.push(non_flexible);
        }
        for f in targets {
            match build_nested_sequence(&c.matroid, q, r, f) {
                Ok(cert) => {
                    let report = verify_nested_sequence(&c.matroid, q, r, f, &cert).unwrap();
                    if !report.passed() || !reference_certificate_ok(&whole, q.0, r.0, f.0, &cert) {
                        violations.push(format!("case {i}: certificate for {f:?} fails verification"));
                    }
                }
                Err(e) => violations.push(format!("case {i}: {e}")),
            }
        }
    }
    if violations.is_empty() && applicable > 0 {
        Ok(format!("{applicable} instances with F all non-flexible, plus {extended} maximal non-flexible sets; all verify"))
    } else {
        Err(format!("{applicable} applicable, {} violations (first: {:?})", violations.len(), violations.first()))
    }
}

fn criterion_8() -> Verdict {
    let got = (c_bound(1, 1), c_bound(2, 1), c_bound(1, 2), conjecture_bound(2, 2));
    if got == (24, 96, 40, 5) {
        Ok("c(1,1)=24, c(2,1)=96, c(1,2)=40, conjecture(2,2)=5".into())
    } else {
        Err(format!("got {got:?}"))
    }
}

fn criterion_9() -> Verdict {
    let mut lines = Vec::new();
    for (k, l) in [(1u32, 2u32), (2, 1), (2, 2), (2, 3)] {
        let start = Instant::now();
        let grid = build_grid_instance(k, l).map_err(|e| format!("({k},{l}): {e}"))?;
        let inst = &grid.instance;
        let g: &GraphicMatroid = inst.matroid.oracle().unwrap().as_any().downcast_ref().unwrap();
        let reference = Reference::Graph { vertices: g.vertex_count(), edges: g.edges().to_vec() };
        let whole = Restricted::whole(&reference);
        let (kk, ll) = (k as usize, l as usize);
        let sizes_ok = inst.matroid.len() == 2 * kk * ll + kk + ll && inst.free().len() == 2 * kk * ll - kk - ll;
        let kappas_ok = whole.kappa(inst.q.0, inst.r.0).0 == k && whole.kappa(inst.s.0, inst.t.0).0 == l;
        let report = run_extremal_check(k, l).map_err(|e| format!("({k},{l}): {e}"))?;
        let none_by_reference = inst.free().iter().all(|e| {
            [whole.delete(e), whole.contract(e)]
                .iter()
                .all(|minor| minor.kappa(inst.q.0, inst.r.0).0 != k || minor.kappa(inst.s.0, inst.t.0).0 != l)
        });
        let elapsed = start.elapsed();
        if !(sizes_ok && kappas_ok && report.reproduced() && none_by_reference && elapsed < Duration::from_secs(60)) {
            return Err(format!(
                "({k},{l}): sizes {sizes_ok}, kappas {kappas_ok}, none {}, reference none {none_by_reference}, {:.1}s",
                report.reproduced(),
                elapsed.as_secs_f64()
            ));
        }
        lines.push(format!("({k},{l}) |F|={} {:.1}s", inst.free().len(), elapsed.as_secs_f64()));
    }
    Ok(format!("no qualifying element in {}", lines.join(", ")))
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let config = ScanConfig {
        seed: 77,
        family: Family::Graphic,
        samples: 400,
        elements: (28, 28),
        q: (1, 1),
        r: (1, 1),
        s: (1, 1),
        t: (1, 1),
        budget_ms: 600_000,
    };
    let mut chosen = Vec::new();
    for index in 0..config.samples {
        let inst = random_instance(&config, index).map_err(|e| e.to_string())?;
        if inst.k() == 1 && inst.l() == 1 {
            chosen.push(inst);
        }
        if chosen.len() == 24 {
            break;
        }
    }
    if chosen.len() < 20 {
        return Err(format!("only {} instances with k=l=1", chosen.len()));
    }
    let results: Vec<Result<bool, String>> = chosen
        .par_iter()
        .map(|inst| {
            if inst.free().len() < 24 {
                return Ok(false);
            }
            let rep = find_intertwined_element(inst, SearchOptions::default()).map_err(|e| e.to_string())?;
            match (rep.index, rep.operation) {
                (Some(e), Some(op)) => verify_intertwined(inst, e, op).map_err(|e| e.to_string()),
                _ => Ok(false),
            }
        })
        .collect();
    let confirmed = results.iter().filter(|r| matches!(r, Ok(true))).count();
    let elapsed = start.elapsed();
    if confirmed == chosen.len() && elapsed <= Duration::from_secs(15 * 60) {
        Ok(format!("{confirmed}/{} instances with |E|=28, |F|=24: element found and re-verified, {:.1}s", chosen.len(), elapsed.as_secs_f64()))
    } else {
        Err(format!("{confirmed}/{} confirmed, {:.1}s, first failure {:?}", chosen.len(), elapsed.as_secs_f64(), results.iter().find(|r| !matches!(r, Ok(true)))))
    }
}

/// The reference description of a generated instance's matroid.
fn reference_of(m: &Matroid) -> Reference {
    let any = m.oracle().unwrap().as_any();
    if let Some(g) = any.downcast_ref::<GraphicMatroid>() {
        Reference::Graph { vertices: g.vertex_count(), edges: g.edges().to_vec() }
    } else if let Some(l) = any.downcast_ref::<LinearMatroid>() {
        let rows: Vec<Vec<u32>> = l.matrix().iter().map(|r| r.iter().map(|&v| v as u32).collect()).collect();
        if rows.is_empty() {
            Reference::Uniform { rank: 0, size: m.len() }
        } else {
            Reference::Linear { prime: l.prime() as u32, rows }
        }
    } else if let Some(u) = any.downcast_ref::<UniformSum>() {
        Reference::Sum(u.blocks().to_vec())
    } else {
        panic!("unexpected oracle")
    }
}

fn criterion_11() -> Verdict {
    let mut done = Vec::new();
    for (i, family) in [Family::Graphic, Family::LinearGf2, Family::UniformMix].into_iter().cycle().take(10).enumerate() {
        let config = ScanConfig {
            seed: 31 + i as u64,
            family,
            samples: 1,
            elements: (10, 14),
            q: (1, 2),
            r: (1, 2),
            s: (1, 2),
            t: (1, 2),
            budget_ms: 60_000,
        };
        let inst = random_instance(&config, 0).map_err(|e| e.to_string())?;
        let reference = reference_of(&inst.matroid);
        let whole = Restricted::whole(&reference);
        let (q, r, s, t) = (inst.q.0, inst.r.0, inst.s.0, inst.t.0);
        let (k, l) = (whole.kappa(q, r).0, whole.kappa(s, t).0);
        let out = shrink_preserving_both(&inst, SearchOptions::default()).map_err(|e| format!("instance {i}: {e}"))?;
        if (out.k, out.l) != (k, l) {
            return Err(format!("instance {i}: reported ({},{}) but reference ({k},{l})", out.k, out.l));
        }
        for j in 1..=out.steps.len() {
            let (d, c) = ReductionLog::removed(&out.steps[..j]);
            let minor = Restricted::minor(&reference, d.0, c.0);
            if (minor.kappa(q, r).0, minor.kappa(s, t).0) != (k, l) {
                return Err(format!("instance {i}: step {j} changes a connectivity"));
            }
        }
        let (d, c) = ReductionLog::removed(&out.steps);
        let last = Restricted::minor(&reference, d.0, c.0);
        let remaining = last.ground & !(q | r | s | t);
        let stuck = (0..32).filter(|&e| remaining >> e & 1 == 1).all(|e| {
            [last.delete(e), last.contract(e)].iter().all(|m| m.kappa(q, r).0 != k || m.kappa(s, t).0 != l)
        });
        if !stuck || remaining.count_ones() as usize != out.final_free {
            return Err(format!("instance {i}: final minor still has a qualifying element"));
        }
        done.push(out.steps.len());
    }
    Ok(format!("10 instances, {} verified steps in total, final (k,l) unchanged", done.iter().sum::<usize>()))
}

fn cli(dir: &Path, threads: &str, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_intertwine"))
        .current_dir(dir)
        .env_remove("INTERTWINE_THREADS")
        .arg("--threads")
        .arg(threads)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn without_wall_time(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

fn criterion_12() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    let write = |name: &str, text: &str| std::fs::write(p.join(name), text).map_err(|e| e.to_string());
    cli(p, "1", &["grid", "--k", "2", "--l", "2", "--save", "grid.txt"])?;
    write("c4.txt", "type graphic\nvertices 4\nedges\n0 1\n1 2\n2 3\n3 0\nQ e1\nR e3\nS e4\nT\n")?;
    let random = random_instance(
        &ScanConfig {
            seed: 4,
            family: Family::LinearGf2,
            samples: 1,
            elements: (12, 12),
            q: (1, 2),
            r: (1, 2),
            s: (1, 2),
            t: (1, 2),
            budget_ms: 60_000,
        },
        0,
    )
    .map_err(|e| e.to_string())?;
    write("random.txt", &write_instance(&random).map_err(|e| e.to_string())?)?;
    write(
        "scan.toml",
        "seed = 12\nfamily = \"graphic\"\nsamples = 12\nelements = [10, 16]\nq = [1, 2]\nr = [1, 2]\ns = [1, 2]\nt = [1, 2]\n",
    )?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["kappa", "grid.txt", "--pair", "QR"],
        vec!["kappa", "random.txt", "--pair", "ST"],
        vec!["classify", "random.txt", "--pair", "QR"],
        vec!["intertwine", "grid.txt", "--json", "OUT.json"],
        vec!["intertwine", "random.txt", "--proof-path", "--json", "OUT.json"],
        vec!["intertwine", "random.txt", "--shrink", "--json", "OUT.json"],
        vec!["grid", "--k", "2", "--l", "3", "--extremal-check"],
        vec!["nested", "c4.txt", "--pair", "QR"],
        vec!["nested", "random.txt", "--pair", "QR"],
        vec!["scan", "scan.toml", "--out", "OUT"],
    ];
    let many = std::thread::available_parallelism().map_or(4, |n| n.get().max(4)).to_string();
    for args in &commands {
        let mut seen = Vec::new();
        for (run, threads) in ["1", many.as_str(), "1"].into_iter().enumerate() {
            let tag = format!("run{run}");
            let tagged: Vec<String> = args.iter().map(|a| a.replace("OUT", &tag)).collect();
            let tagged: Vec<&str> = tagged.iter().map(String::as_str).collect();
            let mut text = cli(p, threads, &tagged)?.replace(&tag, "OUT");
            if args.contains(&"--json") {
                text += &std::fs::read_to_string(p.join(format!("{tag}.json"))).map_err(|e| e.to_string())?;
            }
            if args[0] == "scan" {
                let d = p.join(&tag);
                text += &without_wall_time(&std::fs::read_to_string(d.join("records.csv")).map_err(|e| e.to_string())?);
                text += &std::fs::read_to_string(d.join("summary.json")).map_err(|e| e.to_string())?;
            }
            seen.push(text);
        }
        if seen[0] != seen[1] || seen[0] != seen[2] {
            return Err(format!("{args:?} differs between runs"));
        }
    }
    Ok(format!("{} commands identical across reruns with --threads 1 and --threads {many}", commands.len()))
}

fn main() {
    let start = Instant::now();
    let corpus = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("rank axioms", Box::new(|| criterion_1(&corpus))),
        ("connectivity identities", Box::new(|| criterion_2(&corpus))),
        ("deletion/contraction dichotomy", Box::new(|| criterion_3(&corpus))),
        ("non-contractible survives", Box::new(|| criterion_4(&corpus))),
        ("linking minor", Box::new(|| criterion_5(&corpus))),
        ("linking-pair shrink", Box::new(|| criterion_6(&corpus))),
        ("nested sequence round trip", Box::new(|| criterion_7(&corpus))),
        ("bound formulas", Box::new(criterion_8)),
        ("grid extremal instances", Box::new(criterion_9)),
        ("guaranteed region smoke", Box::new(criterion_10)),
        ("end-to-end shrink", Box::new(criterion_11)),
        ("determinism", Box::new(criterion_12)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
