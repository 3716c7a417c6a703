use std::any::Any;

use super::RankOracle;
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};

/// Cycle matroid of a multigraph. Edge `j` is element `j`; loops and parallel
/// edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    /// endpoints renumbered densely over the vertices that carry an edge
    compact: Vec<(u8, u8)>,
    used_vertices: usize,
}

impl GraphicMatroid {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<GraphicMatroid> {
        if edges.len() > MAX_ELEMENTS {
            return Err(Error::SizeCap(edges.len()));
        }
        let mut ids = vec![u8::MAX; vertex_count];
        let mut next = 0u8;
        let mut compact = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidMatroid(format!(
                    "edge ({u},{v}) references a vertex outside 0..{vertex_count}"
                )));
            }
            let mut id = |w: usize| {
                if ids[w] == u8::MAX {
                    ids[w] = next;
                    next += 1;
                }
                ids[w]
            };
            let a = id(u);
            let b = id(v);
            compact.push((a, b));
        }
        Ok(GraphicMatroid { vertex_count, edges, compact, used_vertices: next as usize })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

#[inline]
fn find(parent: &mut [u8; 2 * MAX_ELEMENTS], mut x: u8) -> u8 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

impl RankOracle for GraphicMatroid {
    fn size(&self) -> usize {
        self.edges.len()
    }

    /// Number of edges of a spanning forest of the edge-induced subgraph.
    fn rank(&self, x: Subset) -> u32 {
        let mut parent = [0u8; 2 * MAX_ELEMENTS];
        for (i, p) in parent.iter_mut().enumerate().take(self.used_vertices) {
            *p = i as u8;
        }
        let mut rank = 0;
        for j in x {
            let (u, v) = self.compact[j];
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru as usize] = rv;
                rank += 1;
            }
        }
        rank
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
