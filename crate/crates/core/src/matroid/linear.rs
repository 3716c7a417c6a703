use std::any::Any;

use super::RankOracle;
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};

/// Column matroid of a matrix over GF(2), GF(3) or GF(5).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMatroid {
    prime: u8,
    matrix: Vec<Vec<u8>>,
    columns: Columns,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Columns {
    /// Column `j` as a bit vector over the reduced rows.
    Binary(Vec<u32>),
    /// Column `j` over the reduced rows, `dim` entries used.
    Odd { dim: usize, cols: Vec<[u8; MAX_ELEMENTS]> },
}

fn inverse(a: u8, p: u8) -> u8 {
    (1..p).find(|&b| (a as u32 * b as u32) % p as u32 == 1).expect("nonzero element of a prime field")
}

/// Row-reduces in place and returns the nonzero rows.
fn row_space_basis(mut rows: Vec<Vec<u8>>, p: u8, n: usize) -> Vec<Vec<u8>> {
    let p32 = p as u32;
    let mut pivot_row = 0;
    for col in 0..n {
        let Some(sel) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, sel);
        let inv = inverse(rows[pivot_row][col], p) as u32;
        for v in rows[pivot_row].iter_mut() {
            *v = (*v as u32 * inv % p32) as u8;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pivot_row || row[col] == 0 {
                continue;
            }
            let factor = row[col] as u32;
            for (v, &pv) in row.iter_mut().zip(&pivot) {
                *v = ((*v as u32 + p32 * p32 - factor * pv as u32) % p32) as u8;
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

impl LinearMatroid {
    /// `matrix` is given row by row with entries in `0..prime`; column `j` is element `j`.
    pub fn new(prime: u8, matrix: Vec<Vec<u8>>) -> Result<LinearMatroid> {
        let n = matrix.first().map_or(0, Vec::len);
        LinearMatroid::with_columns(prime, n, matrix)
    }

    /// Like [`LinearMatroid::new`] but with an explicit column count, so a
    /// matrix with no rows still has `n` elements (all loops).
    pub fn with_columns(prime: u8, n: usize, matrix: Vec<Vec<u8>>) -> Result<LinearMatroid> {
        if !matches!(prime, 2 | 3 | 5) {
            return Err(Error::InvalidMatroid(format!("unsupported field GF({prime})")));
        }
        if n > MAX_ELEMENTS {
            return Err(Error::SizeCap(n));
        }
        for row in &matrix {
            if row.len() != n {
                return Err(Error::InvalidMatroid("matrix rows have different lengths".into()));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= prime) {
                return Err(Error::InvalidMatroid(format!("entry {v} is not in GF({prime})")));
            }
        }
        let basis = row_space_basis(matrix.clone(), prime, n);
        let columns = if prime == 2 {
            Columns::Binary(
                (0..n)
                    .map(|j| basis.iter().enumerate().fold(0u32, |acc, (i, row)| acc | (row[j] as u32) << i))
                    .collect(),
            )
        } else {
            let cols = (0..n)
                .map(|j| {
                    let mut c = [0u8; MAX_ELEMENTS];
                    for (i, row) in basis.iter().enumerate() {
                        c[i] = row[j];
                    }
                    c
                })
                .collect();
            Columns::Odd { dim: basis.len(), cols }
        };
        Ok(LinearMatroid { prime, matrix, columns })
    }

    pub fn prime(&self) -> u8 {
        self.prime
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    fn binary_rank(cols: &[u32], x: Subset) -> u32 {
        let mut basis = [0u32; 32];
        let mut rank = 0;
        for j in x {
            let mut v = cols[j];
            while v != 0 {
                let h = 31 - v.leading_zeros() as usize;
                if basis[h] == 0 {
                    basis[h] = v;
                    rank += 1;
                    break;
                }
                v ^= basis[h];
            }
        }
        rank
    }

    fn odd_rank(&self, dim: usize, cols: &[[u8; MAX_ELEMENTS]], x: Subset) -> u32 {
        let p = self.prime as u32;
        // basis[i] has a unit pivot at coordinate i when present
        let mut basis: [Option<[u8; MAX_ELEMENTS]>; MAX_ELEMENTS] = [None; MAX_ELEMENTS];
        let mut rank = 0;
        for j in x {
            let mut v = cols[j];
            for i in 0..dim {
                if v[i] == 0 {
                    continue;
                }
                match &basis[i] {
                    Some(b) => {
                        let f = v[i] as u32;
                        for t in i..dim {
                            v[t] = ((v[t] as u32 + p * p - f * b[t] as u32) % p) as u8;
                        }
                    }
                    None => {
                        let inv = inverse(v[i], self.prime) as u32;
                        for t in i..dim {
                            v[t] = (v[t] as u32 * inv % p) as u8;
                        }
                        basis[i] = Some(v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }
}

impl RankOracle for LinearMatroid {
    fn size(&self) -> usize {
        match &self.columns {
            Columns::Binary(c) => c.len(),
            Columns::Odd { cols, .. } => cols.len(),
        }
    }

    fn rank(&self, x: Subset) -> u32 {
        match &self.columns {
            Columns::Binary(cols) => Self::binary_rank(cols, x),
            Columns::Odd { dim, cols } => self.odd_rank(*dim, cols, x),
        }
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
