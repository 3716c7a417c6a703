//! `intertwine`: connectivity queries, intertwined-element search, grid
//! checks and seeded scans over matroid instance files.
//!
//! Exit codes: 0 success, 2 parse or validation error, 3 size cap or time
//! budget, 4 theorem-violation alarm, 1 anything else.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use intertwine_core::certificates::{build_nested_sequence, verify_nested_sequence, Condition};
use intertwine_core::classification::classify_all;
use intertwine_core::experiments::{
    build_grid_instance, conjecture_scan, persist, run_extremal_check, ScanConfig, Status,
};
use intertwine_core::format::{read_instance, write_instance};
use intertwine_core::intertwine::{find_intertwined_element, shrink_preserving_both, SearchOptions};
use intertwine_core::{kappa, Error, Instance, Subset};

#[derive(Parser)]
#[command(name = "intertwine", version, about = "Matroid connectivity and intertwined elements")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "INTERTWINE_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "UPPER")]
enum Pair {
    #[value(alias = "qr")]
    Qr,
    #[value(alias = "st")]
    St,
}

#[derive(Subcommand)]
enum Command {
    /// Connectivity between the two sides of a pair, with a smallest witness.
    Kappa {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "QR")]
        pair: Pair,
    },
    /// Deletable / contractible / flexible flags for every free element.
    Classify {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "QR")]
        pair: Pair,
    },
    /// Search for a free element whose removal keeps both connectivities.
    Intertwine {
        instance: PathBuf,
        /// Keep removing qualifying elements until none is left.
        #[arg(long)]
        shrink: bool,
        /// Shrink (S,T) to a linking pair first and iterate as in the existence proof.
        #[arg(long)]
        proof_path: bool,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The (k+1) x (l+1) grid instance.
    Grid {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        /// Tabulate both connectivities after every single-element removal.
        #[arg(long)]
        extremal_check: bool,
        /// Write the grid instance file here.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Build and verify a nested separating sequence for the non-flexible free elements.
    Nested {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "QR")]
        pair: Pair,
    },
    /// Seeded search over random instances, configured by a TOML file.
    Scan {
        config: PathBuf,
        /// Directory for records.csv, summary.json and counterexample files.
        #[arg(long, default_value = "scan-results")]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::SizeCap(_) | Error::BudgetExhausted => 3,
            Error::TheoremViolation { .. } => 4,
            Error::Parse { .. }
            | Error::OutOfRange { .. }
            | Error::OverlappingSets(_)
            | Error::DuplicateLabel(_)
            | Error::InvalidLabel(_)
            | Error::UnknownLabel(_)
            | Error::InvalidMatroid(_)
            | Error::RankAxiom { .. }
            | Error::ElementInPair(_)
            | Error::FlexibleElement(_)
            | Error::InvalidArgument(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<String, Failure>;

fn sides(inst: &Instance, pair: Pair) -> (Subset, Subset) {
    match pair {
        Pair::Qr => (inst.q, inst.r),
        Pair::St => (inst.s, inst.t),
    }
}

fn pair_name(pair: Pair) -> &'static str {
    match pair {
        Pair::Qr => "Q,R",
        Pair::St => "S,T",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    read_instance(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn cmd_kappa(path: &Path, pair: Pair) -> Outcome {
    let inst = load(path)?;
    let (a, b) = sides(&inst, pair);
    let res = kappa(&inst.matroid, a, b)?;
    Ok(format!("kappa={} witness={}\n", res.value, inst.matroid.ground().format(res.witness.side)))
}

fn cmd_classify(path: &Path, pair: Pair) -> Outcome {
    let inst = load(path)?;
    let (a, b) = sides(&inst, pair);
    let ground = inst.matroid.ground();
    let rows = classify_all(&inst.matroid, a, b, inst.free())?;
    let width = inst.free().iter().map(|e| ground.label(e).len()).max().unwrap_or(0).max("element".len());
    let mut out = format!(
        "{:<width$}  deletable  contractible  flexible  kappa_delete  kappa_contract\n",
        "element"
    );
    for c in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:<9}  {:<12}  {:<8}  {:<12}  {}",
            ground.label(c.element),
            yes_no(c.deletable),
            yes_no(c.contractible),
            yes_no(c.is_flexible()),
            c.kappa_after_delete,
            c.kappa_after_contract,
        );
    }
    Ok(out)
}

/// Writes the offending instance next to the input and returns its path.
fn persist_violation(path: &Path, inst: &Instance) -> Result<PathBuf, Failure> {
    let stem = path.file_stem().map_or("instance".into(), |s| s.to_string_lossy().into_owned());
    let target = path.with_file_name(format!("{stem}.violation.txt"));
    std::fs::write(&target, write_instance(inst)?)
        .map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", target.display()) })?;
    Ok(target)
}

fn write_json(path: &Path, json: serde_json::Result<String>) -> Result<(), Failure> {
    let text = json.expect("reports always serialize") + "\n";
    std::fs::write(path, text).map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", path.display()) })
}

fn cmd_intertwine(path: &Path, shrink: bool, proof_path: bool, json: Option<&Path>) -> Outcome {
    let inst = load(path)?;
    let opts = SearchOptions { proof_path, deadline: None };
    let alarm = |e: Error| -> Failure {
        let mut f = Failure::from(e.clone());
        if matches!(e, Error::TheoremViolation { .. }) {
            match persist_violation(path, &inst) {
                Ok(saved) => f.message = format!("{}; instance saved to {}", f.message, saved.display()),
                Err(w) => f.message = format!("{}; {}", f.message, w.message),
            }
        }
        f
    };
    let ground = inst.matroid.ground();
    let (k, l) = (inst.k(), inst.l());
    let mut out = format!(
        "kappa(Q,R)={k} kappa(S,T)={l} |F|={} c={} conjecture={}\n",
        inst.free().len(),
        intertwine_core::c_bound(k, l),
        intertwine_core::conjecture_bound(k, l)
    );
    if shrink {
        let outcome = shrink_preserving_both(&inst, opts).map_err(alarm)?;
        for (i, step) in outcome.steps.iter().enumerate() {
            let _ = writeln!(out, "step {}: {} {}", i + 1, step.operation, ground.label(step.element));
        }
        let verdict = if outcome.consistent { "consistent" } else { "THEOREM VIOLATION" };
        let _ = writeln!(
            out,
            "final: {} steps, |F|={}, kappa(Q,R)={}, kappa(S,T)={} ({verdict})",
            outcome.steps.len(),
            outcome.final_free,
            outcome.k,
            outcome.l
        );
        if let Some(target) = json {
            let steps: Vec<serde_json::Value> = outcome
                .steps
                .iter()
                .map(|s| serde_json::json!({ "element": ground.label(s.element), "operation": s.operation }))
                .collect();
            let value = serde_json::json!({
                "steps": steps,
                "kappaQR": outcome.k,
                "kappaST": outcome.l,
                "free_count": outcome.final_free,
                "consistent": outcome.consistent,
            });
            write_json(target, serde_json::to_string_pretty(&value))?;
        }
        if !outcome.consistent {
            return Err(alarm(Error::TheoremViolation {
                k: outcome.k,
                l: outcome.l,
                free: outcome.final_free,
                bound: intertwine_core::c_bound(outcome.k, outcome.l),
            }));
        }
        return Ok(out);
    }
    let report = find_intertwined_element(&inst, opts).map_err(alarm)?;
    if let Some((s1, t1)) = &report.shrunk_pair {
        let _ = writeln!(out, "shrunk S={{{}}} T={{{}}}", s1.join(","), t1.join(","));
    }
    for step in &report.proof_trace {
        let _ = writeln!(out, "proof step: {} {}", step.operation, step.element);
    }
    let _ = writeln!(out, "{}", report.summary());
    if let Some(target) = json {
        write_json(target, serde_json::to_string_pretty(&report))?;
    }
    Ok(out)
}

fn cmd_grid(k: u32, l: u32, extremal: bool, save: Option<&Path>) -> Outcome {
    let grid = build_grid_instance(k, l)?;
    let inst = &grid.instance;
    let mut out = format!(
        "grid ({k},{l}): |E|={} |Q|={} |R|={} |S|={} |T|={} |F|={} kappa(Q,R)={} kappa(S,T)={}\n",
        inst.matroid.len(),
        inst.q.len(),
        inst.r.len(),
        inst.s.len(),
        inst.t.len(),
        inst.free().len(),
        inst.k(),
        inst.l()
    );
    if let Some(target) = save {
        std::fs::write(target, write_instance(inst)?)
            .map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", target.display()) })?;
    }
    if extremal {
        let rep = run_extremal_check(k, l)?;
        out.push_str("element  op        kappaQR  kappaST  qualifies\n");
        for row in &rep.rows {
            let _ = writeln!(
                out,
                "{:<7}  {:<8}  {:<7}  {:<7}  {}",
                row.element,
                row.operation,
                row.kappa_qr_after,
                row.kappa_st_after,
                yes_no(row.qualifies)
            );
        }
        match &rep.report.element {
            None => {
                let _ = writeln!(out, "no qualifying element among {} candidates", rep.free);
            }
            Some(e) => {
                let op = rep.report.operation.map_or("", |o| o.as_str());
                let _ = writeln!(out, "qualifying element: {e} {op}");
            }
        }
    }
    Ok(out)
}

fn verdict(c: &Condition) -> String {
    match c.first_violation {
        None => "PASS".into(),
        Some(i) => format!("FAIL at position {i}"),
    }
}

fn cmd_nested(path: &Path, pair: Pair) -> Outcome {
    let inst = load(path)?;
    let (a, b) = sides(&inst, pair);
    let m = &inst.matroid;
    let ground = m.ground();
    let classes = classify_all(m, a, b, inst.free())?;
    let flexible: Subset = classes.iter().filter(|c| c.is_flexible()).map(|c| c.element).collect();
    let f = inst.free() - flexible;
    let mut out = format!("pair ({}): F={}", pair_name(pair), ground.format(f));
    if !flexible.is_empty() {
        let _ = write!(out, " (flexible, skipped: {})", ground.format(flexible));
    }
    out.push('\n');
    let cert = build_nested_sequence(m, a, b, f)?;
    let ordering: Vec<&str> = cert.ordering.iter().map(|&e| ground.label(e)).collect();
    let chain: Vec<String> = cert.chain.iter().map(|&x| ground.format(x)).collect();
    let branch: Vec<&str> = cert
        .branch
        .iter()
        .map(|b| match b {
            intertwine_core::certificates::Branch::Guts => "guts",
            intertwine_core::certificates::Branch::Coguts => "coguts",
        })
        .collect();
    let _ = writeln!(out, "ordering: ({})", ordering.join(","));
    let _ = writeln!(out, "chain: ({})", chain.join(","));
    let _ = writeln!(out, "branch: ({})", branch.join(","));
    let rep = verify_nested_sequence(m, a, b, f, &cert)?;
    let _ = writeln!(out, "kappa={}", rep.kappa);
    for (name, c) in [
        ("separating", &rep.separating),
        ("nested", &rep.nested),
        ("prefix", &rep.prefix),
        ("guts/coguts", &rep.guts),
    ] {
        let _ = writeln!(out, "{name}: {}", verdict(c));
    }
    let _ = writeln!(out, "verdict: {}", if rep.passed() { "PASS" } else { "FAIL" });
    if rep.passed() {
        Ok(out)
    } else {
        Err(Failure { code: 1, message: format!("{out}certificate failed verification") })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn cmd_scan(path: &Path, dir: &Path) -> Outcome {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", path.display()) })?;
    let config: ScanConfig = toml::from_str(&text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of(&text, s.start));
        Failure { code: 2, message: format!("{}: line {line}: {}", path.display(), e.message()) }
    })?;
    let outcome = conjecture_scan(&config)?;
    let written = persist(&outcome, dir)?;
    let s = &outcome.summary;
    let mut out = format!(
        "records={} found={} not_found={} budget_exhausted={} flagged={} potential_counterexamples={} theorem_violations={}\n",
        s.records, s.found, s.not_found, s.budget_exhausted, s.flagged, s.potential_counterexamples, s.theorem_violations
    );
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    let alarm = outcome
        .records
        .iter()
        .any(|r| r.status == Status::TheoremViolation && r.confirmed == Some(true));
    if alarm {
        return Err(Failure { code: 4, message: format!("{out}theorem violation confirmed; see counterexample files") });
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Kappa { instance, pair } => cmd_kappa(instance, *pair),
        Command::Classify { instance, pair } => cmd_classify(instance, *pair),
        Command::Intertwine { instance, shrink, proof_path, json } => {
            cmd_intertwine(instance, *shrink, *proof_path, json.as_deref())
        }
        Command::Grid { k, l, extremal_check, save } => cmd_grid(*k, *l, *extremal_check, save.as_deref()),
        Command::Nested { instance, pair } => cmd_nested(instance, *pair),
        Command::Scan { config, out } => cmd_scan(config, out),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
