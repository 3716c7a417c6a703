//! Grid instances, seeded random instances and conjecture scans.

mod grid;
mod random;
mod scan;

pub use grid::{build_grid_instance, grid_matroid, run_extremal_check, ExtremalReport, ExtremalRow, GridInstance};
pub use random::{random_instance, Family, Fingerprint, ScanConfig};
pub use scan::{
    conjecture_scan, exhaustive_none_check, persist, write_records_csv, Bin, Flag, ScanOutcome, ScanRecord, Status,
    Summary,
};
