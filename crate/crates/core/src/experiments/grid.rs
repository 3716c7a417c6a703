use serde::Serialize;

use crate::connectivity::kappa;
use crate::error::{Error, Result};
use crate::intertwine::{find_intertwined_element, Instance, IntertwineReport, SearchOptions};
use crate::matroid::{GraphicMatroid, Matroid, Operation};
use crate::subset::{GroundSet, Subset, MAX_ELEMENTS};

/// The `(k+1) x (ℓ+1)` grid with `Q`/`R` the vertical edges of the
/// leftmost/rightmost column and `S`/`T` the horizontal edges of the top/bottom row.
#[derive(Clone, Debug)]
pub struct GridInstance {
    pub k: u32,
    pub l: u32,
    pub instance: Instance,
}

/// Cycle matroid of the grid with `k + 1` rows and `ℓ + 1` columns of vertices.
///
/// Horizontal edges `h<i>.<j>` (row `i`, columns `j`–`j+1`) come first in
/// row-major order, then vertical edges `v<i>.<j>` (rows `i`–`i+1`, column `j`).
/// Returns the matroid and `(Q, R, S, T)`.
pub fn grid_matroid(k: u32, l: u32) -> Result<(Matroid, [Subset; 4])> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidArgument(format!("grid dimensions must be positive, got ({k},{l})")));
    }
    let (k, l) = (k as usize, l as usize);
    let edges_total = 2 * k * l + k + l;
    if edges_total > MAX_ELEMENTS {
        return Err(Error::SizeCap(edges_total));
    }
    let vertex = |i: usize, j: usize| i * (l + 1) + j;
    let mut edges = Vec::with_capacity(edges_total);
    let mut labels = Vec::with_capacity(edges_total);
    let (mut q, mut r, mut s, mut t) = (Subset::EMPTY, Subset::EMPTY, Subset::EMPTY, Subset::EMPTY);
    for i in 0..=k {
        for j in 0..l {
            if i == 0 {
                s = s.with(edges.len());
            }
            if i == k {
                t = t.with(edges.len());
            }
            edges.push((vertex(i, j), vertex(i, j + 1)));
            labels.push(format!("h{i}.{j}"));
        }
    }
    for i in 0..k {
        for j in 0..=l {
            if j == 0 {
                q = q.with(edges.len());
            }
            if j == l {
                r = r.with(edges.len());
            }
            edges.push((vertex(i, j), vertex(i + 1, j)));
            labels.push(format!("v{i}.{j}"));
        }
    }
    let m = Matroid::with_labels(GraphicMatroid::new((k + 1) * (l + 1), edges)?, GroundSet::new(labels)?)?;
    Ok((m, [q, r, s, t]))
}

/// Builds the grid instance and checks `κ(Q,R) = k`, `κ(S,T) = ℓ`.
pub fn build_grid_instance(k: u32, l: u32) -> Result<GridInstance> {
    let (m, [q, r, s, t]) = grid_matroid(k, l)?;
    let kappa_qr = kappa(&m, q, r)?.value;
    let kappa_st = kappa(&m, s, t)?.value;
    if (kappa_qr, kappa_st) != (k, l) {
        return Err(Error::KappaMismatch { k, l, kappa_qr, kappa_st });
    }
    let instance = Instance::new(m, q, r, s, t)?;
    Ok(GridInstance { k, l, instance })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalRow {
    pub element: String,
    pub operation: Operation,
    #[serde(rename = "kappaQR_after")]
    pub kappa_qr_after: u32,
    #[serde(rename = "kappaST_after")]
    pub kappa_st_after: u32,
    pub qualifies: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub k: u32,
    pub l: u32,
    pub edges: usize,
    pub free: usize,
    pub rows: Vec<ExtremalRow>,
    pub report: IntertwineReport,
}

impl ExtremalReport {
    pub fn reproduced(&self) -> bool {
        self.report.element.is_none() && self.rows.iter().all(|r| !r.qualifies)
    }
}

/// Runs the search on the grid and tabulates exact connectivities for every
/// free element under both operations.
pub fn run_extremal_check(k: u32, l: u32) -> Result<ExtremalReport> {
    let grid = build_grid_instance(k, l)?;
    let inst = &grid.instance;
    let m = inst.matroid.fresh();
    let mut rows = Vec::new();
    for e in inst.free() {
        for op in Operation::BOTH {
            let view = op.apply(&m, e)?;
            let kqr = kappa(&view.matroid, view.to_view(inst.q), view.to_view(inst.r))?.value;
            let kst = kappa(&view.matroid, view.to_view(inst.s), view.to_view(inst.t))?.value;
            rows.push(ExtremalRow {
                element: m.ground().label(e).to_string(),
                operation: op,
                kappa_qr_after: kqr,
                kappa_st_after: kst,
                qualifies: (kqr, kst) == (k, l),
            });
        }
    }
    let report = find_intertwined_element(inst, SearchOptions::default())?;
    Ok(ExtremalReport { k, l, edges: m.len(), free: inst.free().len(), rows, report })
}
