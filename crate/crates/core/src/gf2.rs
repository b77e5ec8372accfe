//! Length-ℓ binary vectors and 𝔽₂-linear maps between them.
//!
//! A symbol `c ∈ 𝔽₂^ℓ` is stored bit-packed in a `usize`: bit `i` is the
//! component belonging to user (level) `i`, so user 0 is the least significant
//! bit. With this layout, symbol addition is plain XOR, which is exactly the
//! group operation diagonalized by the Walsh-Hadamard transform.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of levels; pmfs have `2^MAX_LEVELS` entries.
pub const MAX_LEVELS: usize = 16;

#[inline]
pub fn parity(x: usize) -> u8 {
    (x.count_ones() & 1) as u8
}

#[inline]
pub fn bit(s: usize, i: usize) -> u8 {
    ((s >> i) & 1) as u8
}

/// Collects the per-time symbols `c_t` from `d` stacked binary rows.
pub fn stack_symbols(rows: &[Vec<u8>]) -> Vec<usize> {
    let n = rows.first().map_or(0, Vec::len);
    (0..n)
        .map(|t| {
            rows.iter()
                .enumerate()
                .fold(0usize, |s, (i, row)| s | (usize::from(row[t] & 1) << i))
        })
        .collect()
}

/// Inverse of [`stack_symbols`]: splits symbols into `d` binary rows.
pub fn unstack_symbols(symbols: &[usize], d: usize) -> Vec<Vec<u8>> {
    (0..d)
        .map(|i| symbols.iter().map(|&s| bit(s, i)).collect())
        .collect()
}

/// An `out_dim × in_dim` matrix over 𝔽₂. Row `r` is a bitmask over the inputs;
/// output bit `r` of `apply(s)` is the parity of `rows[r] & s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryLinearMap {
    in_dim: usize,
    rows: Vec<usize>,
}

impl BinaryLinearMap {
    pub fn new(in_dim: usize, rows: Vec<usize>) -> Result<Self> {
        if in_dim == 0 || in_dim > MAX_LEVELS {
            return Err(Error::InvalidMap(format!(
                "input dimension {in_dim} outside 1..={MAX_LEVELS}"
            )));
        }
        if rows.is_empty() || rows.len() > MAX_LEVELS {
            return Err(Error::InvalidMap(format!(
                "output dimension {} outside 1..={MAX_LEVELS}",
                rows.len()
            )));
        }
        if let Some(&r) = rows.iter().find(|&&r| r >> in_dim != 0) {
            return Err(Error::InvalidMap(format!(
                "row mask {r:#b} has bits beyond input dimension {in_dim}"
            )));
        }
        Ok(Self { in_dim, rows })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, (0..dim).map(|i| 1 << i).collect())
    }

    /// Parses matrix rows written as binary strings, e.g. `["110", "101"]`.
    /// Character `j` of each string is the coefficient of input `j`.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidMap("no rows".into()))?;
        let in_dim = first.as_ref().len();
        let masks = rows
            .iter()
            .map(|r| {
                let r = r.as_ref();
                if r.len() != in_dim {
                    return Err(Error::InvalidMap(format!(
                        "row {r:?} has length {} but expected {in_dim}",
                        r.len()
                    )));
                }
                r.chars().enumerate().try_fold(0usize, |m, (j, ch)| match ch {
                    '0' => Ok(m),
                    '1' => Ok(m | 1 << j),
                    _ => Err(Error::InvalidMap(format!("bad character {ch:?} in row {r:?}"))),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(in_dim, masks)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn row_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&m| (0..self.in_dim).map(|j| if m >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }

    #[inline]
    pub fn apply(&self, s: usize) -> usize {
        debug_assert!(s >> self.in_dim == 0);
        self.rows
            .iter()
            .enumerate()
            .fold(0, |v, (r, &m)| v | usize::from(parity(m & s)) << r)
    }

    pub fn try_apply(&self, s: usize) -> Result<usize> {
        if s >> self.in_dim != 0 {
            return Err(Error::SymbolOutOfRange {
                symbol: s,
                dim: self.in_dim,
            });
        }
        Ok(self.apply(s))
    }

    pub fn is_square(&self) -> bool {
        self.in_dim == self.rows.len()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.rows.iter().enumerate().all(|(i, &m)| m == 1 << i)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.in_dim {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row >> col & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse over 𝔽₂ by Gauss-Jordan elimination on `[M | I]`.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::InvalidMap(format!(
                "cannot invert a {}x{} map",
                self.out_dim(),
                self.in_dim
            )));
        }
        let d = self.in_dim;
        let mut a = self.rows.clone();
        let mut inv: Vec<usize> = (0..d).map(|i| 1 << i).collect();
        for col in 0..d {
            let Some(p) = (col..d).find(|&r| a[r] >> col & 1 == 1) else {
                return Err(Error::SingularMap {
                    rank: self.rank(),
                    dim: d,
                });
            };
            a.swap(col, p);
            inv.swap(col, p);
            for r in 0..d {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Self::new(d, inv)
    }

    /// `self ∘ inner`: applies `inner` first.
    pub fn compose(&self, inner: &BinaryLinearMap) -> Result<Self> {
        if inner.out_dim() != self.in_dim {
            return Err(Error::InvalidMap(format!(
                "cannot compose {}-input map after {}-output map",
                self.in_dim,
                inner.out_dim()
            )));
        }
        // Column j of the product is self applied to column j of inner.
        let mut rows = vec![0usize; self.out_dim()];
        for j in 0..inner.in_dim {
            let col = inner.apply(1 << j);
            let img = self.apply(col);
            for (r, row) in rows.iter_mut().enumerate() {
                *row |= usize::from(bit(img, r)) << j;
            }
        }
        Self::new(inner.in_dim, rows)
    }

    /// For each output symbol, the input symbols mapping onto it.
    pub fn preimage_classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); 1 << self.out_dim()];
        for s in 0..1usize << self.in_dim {
            classes[self.apply(s)].push(s);
        }
        classes
    }

    /// Applies the map column-wise to a stack of `in_dim` binary rows.
    pub fn apply_rows(&self, rows: &[Vec<u8>]) -> Result<Vec<Vec<u8>>> {
        if rows.len() != self.in_dim {
            return Err(Error::LengthMismatch {
                expected: self.in_dim,
                got: rows.len(),
            });
        }
        let symbols: Vec<usize> = stack_symbols(rows).into_iter().map(|s| self.apply(s)).collect();
        Ok(unstack_symbols(&symbols, self.out_dim()))
    }
}

impl fmt::Display for BinaryLinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.row_strings().into_iter().map(|r| format!("\"{r}\"")).collect();
        write!(f, "[{}]", rows.join(","))
    }
}
