use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::random::{random_instance, Family, Fingerprint, ScanConfig};
use crate::connectivity::{kappa, KappaOptions};
use crate::classification::kappa_in_minor;
use crate::error::{Error, Result};
use crate::format;
use crate::intertwine::{c_bound, conjecture_bound, find_intertwined_element, Instance, SearchOptions};
use crate::matroid::Operation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    BudgetExhausted,
    TheoremViolation,
}

/// Where `|F|` sits relative to a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Below,
    AtOrAbove,
}

impl Flag {
    fn of(free: usize, bound: i64) -> Flag {
        if (free as i64) < bound {
            Flag::Below
        } else {
            Flag::AtOrAbove
        }
    }
}

/// One CSV row. `k` and `l` are empty when the budget ran out before they were known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub family: Family,
    pub seed: u64,
    pub index: usize,
    pub elements: usize,
    pub q_size: usize,
    pub r_size: usize,
    pub s_size: usize,
    pub t_size: usize,
    pub digest: String,
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub free: usize,
    pub found: bool,
    pub element: Option<String>,
    pub operation: Option<Operation>,
    pub status: Status,
    /// No element found although `|F|` reaches the conjectured bound.
    pub flagged: bool,
    /// For flagged records: an uncached exhaustive search also found nothing.
    pub confirmed: Option<bool>,
    pub wall_ms: u64,
}

impl ScanRecord {
    /// The record without its timing field.
    pub fn untimed(&self) -> ScanRecord {
        ScanRecord { wall_ms: 0, ..self.clone() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub free_vs_conjecture: Option<Flag>,
    pub free_vs_c: Option<Flag>,
    pub total: usize,
    pub found: usize,
    pub not_found: usize,
    pub budget_exhausted: usize,
    pub flagged: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub records: usize,
    pub found: usize,
    pub not_found: usize,
    pub budget_exhausted: usize,
    pub theorem_violations: usize,
    pub flagged: usize,
    pub potential_counterexamples: usize,
    pub bins: Vec<Bin>,
}

impl Summary {
    pub fn of(records: &[ScanRecord]) -> Summary {
        let mut bins: BTreeMap<_, Bin> = BTreeMap::new();
        let mut s = Summary { records: records.len(), ..Summary::default() };
        for r in records {
            let (conj, c) = match (r.k, r.l) {
                (Some(k), Some(l)) => (
                    Some(Flag::of(r.free, conjecture_bound(k, l))),
                    Some(Flag::of(r.free, c_bound(k, l).min(i64::MAX as u64) as i64)),
                ),
                _ => (None, None),
            };
            let bin = bins.entry((r.k, r.l, conj, c)).or_insert_with(|| Bin {
                k: r.k,
                l: r.l,
                free_vs_conjecture: conj,
                free_vs_c: c,
                ..Bin::default()
            });
            bin.total += 1;
            let exhausted = r.status == Status::BudgetExhausted;
            let not_found = !r.found && !exhausted;
            bin.found += r.found as usize;
            bin.not_found += not_found as usize;
            bin.budget_exhausted += exhausted as usize;
            bin.flagged += r.flagged as usize;
            s.found += r.found as usize;
            s.not_found += not_found as usize;
            s.budget_exhausted += exhausted as usize;
            s.theorem_violations += (r.status == Status::TheoremViolation) as usize;
            s.flagged += r.flagged as usize;
            s.potential_counterexamples += (r.confirmed == Some(true)) as usize;
        }
        s.bins = bins.into_values().collect();
        s
    }
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub summary: Summary,
    /// `(index, instance text)` for every flagged record.
    pub counterexamples: Vec<(usize, String)>,
}

/// True when no free element keeps both connectivities, checked with exact
/// searches on an uncached copy of the matroid.
pub fn exhaustive_none_check(inst: &Instance) -> Result<bool> {
    let m = inst.matroid.uncached();
    let k = kappa(&m, inst.q, inst.r)?.value;
    let l = kappa(&m, inst.s, inst.t)?.value;
    for e in inst.free() {
        for op in Operation::BOTH {
            let view = op.apply(&m, e)?;
            if kappa_in_minor(&view, inst.q, inst.r, KappaOptions::exact())? == k
                && kappa_in_minor(&view, inst.s, inst.t, KappaOptions::exact())? == l
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn run_one(config: &ScanConfig, index: usize) -> Result<(ScanRecord, Option<String>)> {
    let inst = random_instance(config, index)?;
    let fp = Fingerprint::of(config, index, &inst)?;
    let start = Instant::now();
    let deadline = Some(start + Duration::from_millis(config.budget_ms));
    let free = inst.free().len();
    let mut record = ScanRecord {
        family: fp.family,
        seed: fp.seed,
        index,
        elements: fp.elements,
        q_size: fp.sizes[0],
        r_size: fp.sizes[1],
        s_size: fp.sizes[2],
        t_size: fp.sizes[3],
        digest: fp.digest,
        k: None,
        l: None,
        free,
        found: false,
        element: None,
        operation: None,
        status: Status::Ok,
        flagged: false,
        confirmed: None,
        wall_ms: 0,
    };
    let outcome = inst
        .kappas(deadline)
        .and_then(|kl| Ok((kl, find_intertwined_element(&inst, SearchOptions { proof_path: false, deadline })?)));
    match outcome {
        Ok(((k, l), report)) => {
            record.k = Some(k);
            record.l = Some(l);
            record.found = report.element.is_some();
            record.element = report.element;
            record.operation = report.operation;
        }
        Err(Error::BudgetExhausted) => {
            record.status = Status::BudgetExhausted;
            if let Ok((k, l)) = inst.kappas(Some(start)) {
                record.k = Some(k);
                record.l = Some(l);
            }
        }
        Err(Error::TheoremViolation { k, l, .. }) => {
            record.status = Status::TheoremViolation;
            record.k = Some(k);
            record.l = Some(l);
        }
        Err(e) => return Err(e),
    }
    record.wall_ms = start.elapsed().as_millis() as u64;
    if let (false, Status::Ok | Status::TheoremViolation, Some(k), Some(l)) =
        (record.found, record.status, record.k, record.l)
    {
        record.flagged = free as i64 >= conjecture_bound(k, l).max(1);
    }
    let mut persisted = None;
    if record.flagged {
        record.confirmed = Some(exhaustive_none_check(&inst)?);
        persisted = Some(format::write_instance(&inst)?);
    }
    Ok((record, persisted))
}

/// Runs the search on every sampled instance. Instances are processed in
/// parallel; records come back in index order.
pub fn conjecture_scan(config: &ScanConfig) -> Result<ScanOutcome> {
    config.validate()?;
    let results: Vec<(ScanRecord, Option<String>)> =
        (0..config.samples).into_par_iter().map(|i| run_one(config, i)).collect::<Result<_>>()?;
    let mut records = Vec::with_capacity(results.len());
    let mut counterexamples = Vec::new();
    for (record, text) in results {
        if let Some(text) = text {
            counterexamples.push((record.index, text));
        }
        records.push(record);
    }
    let summary = Summary::of(&records);
    Ok(ScanOutcome { records, summary, counterexamples })
}

pub fn write_records_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_error)?;
    for r in records {
        w.serialize(r).map_err(io_error)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

const CSV_HEADER: [&str; 19] = [
    "family", "seed", "index", "elements", "q_size", "r_size", "s_size", "t_size", "digest", "k", "l", "free",
    "found", "element", "operation", "status", "flagged", "confirmed", "wall_ms",
];

fn io_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `records.csv`, `summary.json` and one `counterexample-<index>.txt`
/// per flagged record into `dir`. Returns the paths written.
pub fn persist(outcome: &ScanOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    let csv_path = dir.join("records.csv");
    write_records_csv(&outcome.records, std::fs::File::create(&csv_path).map_err(io)?)?;
    written.push(csv_path);
    let json_path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&outcome.summary).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&json_path, json + "\n").map_err(io)?;
    written.push(json_path);
    for (index, text) in &outcome.counterexamples {
        let path = dir.join(format!("counterexample-{index}.txt"));
        std::fs::write(&path, text).map_err(io)?;
        written.push(path);
    }
    Ok(written)
}
