//! Binary LDPC codes: sparse parity-check matrices, alist I/O, encoding and
//! the flooding sum-product decoder shared by all multistage algorithms.

mod alist;
mod encoder;
mod generator;
mod spa;

pub use alist::{parse_alist, serialize_alist};
pub use encoder::Encoder;
pub use generator::{build_regular_code, build_tree_code, count_four_cycles};
pub use spa::{SpaDecoder, SpaOutput, LLR_CLIP};

use std::ops::Range;

use crate::error::{Error, Result};

/// Sparse binary parity-check matrix `H` (`m × n`) kept as row and column
/// adjacency lists.
///
/// Edges are numbered row-major: the edges of row `i` occupy
/// `row_edges(i)`, in the order of `rows()[i]`. Decoders index their edge
/// messages with these numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseParityCheck {
    n_cols: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    row_start: Vec<usize>,
    col_edges: Vec<Vec<usize>>,
}

impl SparseParityCheck {
    /// Builds `H` from per-row column lists. Lists are sorted here; duplicates,
    /// out-of-range indices and empty columns are rejected.
    pub fn from_rows(n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        if n_cols == 0 || rows.is_empty() {
            return Err(Error::InvalidCode("matrix must have at least one row and one column".into()));
        }
        let mut cols = vec![Vec::new(); n_cols];
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidCode(format!("duplicate entry in row {i}")));
            }
            for &j in row.iter() {
                if j >= n_cols {
                    return Err(Error::InvalidCode(format!("column {j} out of range in row {i}")));
                }
                cols[j].push(i);
            }
        }
        if let Some(j) = cols.iter().position(Vec::is_empty) {
            return Err(Error::InvalidCode(format!("column {j} is empty")));
        }
        Ok(Self::assemble(n_cols, rows, cols))
    }

    fn assemble(n_cols: usize, rows: Vec<Vec<usize>>, cols: Vec<Vec<usize>>) -> Self {
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut col_edges = vec![Vec::new(); n_cols];
        let mut e = 0;
        for row in &rows {
            row_start.push(e);
            for &j in row {
                col_edges[j].push(e);
                e += 1;
            }
        }
        row_start.push(e);
        Self {
            n_cols,
            rows,
            cols,
            row_start,
            col_edges,
        }
    }

    /// Builds `H` from a dense 0/1 matrix.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n = dense.first().map_or(0, Vec::len);
        let rows = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b != 0).map(|(j, _)| j).collect())
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn edge_count(&self) -> usize {
        *self.row_start.last().unwrap_or(&0)
    }

    pub fn row_edges(&self, i: usize) -> Range<usize> {
        self.row_start[i]..self.row_start[i + 1]
    }

    /// Column index of every edge, in edge order.
    pub fn edge_cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().flatten().copied()
    }

    /// Edge numbers incident to column `j`, ordered by row.
    pub fn col_edges(&self, j: usize) -> &[usize] {
        &self.col_edges[j]
    }

    pub fn max_row_degree(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_degree(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0u8; self.n_cols];
                for &j in row {
                    d[j] = 1;
                }
                d
            })
            .collect()
    }

    /// `bits · Hᵀ` over 𝔽₂.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        self.check_len(bits)?;
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |s, &j| s ^ (bits[j] & 1)))
            .collect())
    }

    /// True when every check is satisfied. Panics on a length mismatch.
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        assert_eq!(bits.len(), self.n_cols, "word length");
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |s, &j| s ^ (bits[j] & 1)) == 0)
    }

    fn check_len(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.n_cols {
            return Err(Error::LengthMismatch {
                expected: self.n_cols,
                got: bits.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseParityCheck {
        SparseParityCheck::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn adjacency_from_dense() {
        let h = small();
        assert_eq!(h.rows(), &[vec![0, 1], vec![1, 2]]);
        assert_eq!(h.cols(), &[vec![0], vec![0, 1], vec![1]]);
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.col_edges(1), &[1, 2]);
        assert_eq!(h.edge_cols().collect::<Vec<_>>(), vec![0, 1, 1, 2]);
    }

    #[test]
    fn syndrome_examples() {
        let h = small();
        assert_eq!(h.syndrome(&[1, 0, 0]).unwrap(), vec![1, 0]);
        assert_eq!(h.syndrome(&[1, 1, 1]).unwrap(), vec![0, 0]);
        assert!(h.is_codeword(&[1, 1, 1]));
        // one flipped bit: syndrome is that column of H
        assert_eq!(h.syndrome(&[1, 0, 1]).unwrap(), vec![1, 1]);
        assert!(matches!(h.syndrome(&[1, 0]), Err(Error::LengthMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn rejects_bad_structure() {
        assert!(SparseParityCheck::from_rows(3, vec![vec![0, 0, 1], vec![1, 2]]).is_err());
        assert!(SparseParityCheck::from_rows(3, vec![vec![0, 3]]).is_err());
        assert!(SparseParityCheck::from_rows(3, vec![vec![0, 1]]).is_err());
        assert!(SparseParityCheck::from_rows(3, vec![]).is_err());
    }
}
