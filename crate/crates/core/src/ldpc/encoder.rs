use super::SparseParityCheck;
use crate::error::{Error, Result};

/// Systematic encoder obtained by reducing `H` to row echelon form over 𝔽₂.
///
/// Pivot columns are chosen leftmost-first; the remaining `k = n - rank(H)`
/// columns form the information set and carry the information bits in order.
#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    info_cols: Vec<usize>,
    /// (pivot column, bit-packed mask over information positions)
    parity_eqs: Vec<(usize, Vec<u64>)>,
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl Encoder {
    pub fn new(h: &SparseParityCheck) -> Self {
        let n = h.n_cols();
        let w = words(n);
        let mut rows: Vec<Vec<u64>> = h
            .rows()
            .iter()
            .map(|row| {
                let mut r = vec![0u64; w];
                for &j in row {
                    r[j / 64] |= 1 << (j % 64);
                }
                r
            })
            .collect();

        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..n {
            let (wi, b) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][wi] & b != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[wi] & b != 0 {
                    row.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }

        let mut is_pivot = vec![false; n];
        pivots.iter().for_each(|&c| is_pivot[c] = true);
        let info_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let k = info_cols.len();

        // Row r of the reduced matrix reads: c[pivot_r] = Σ_{info j} R[r][j] c[j].
        let parity_eqs = pivots
            .iter()
            .enumerate()
            .map(|(r, &pc)| {
                let mut mask = vec![0u64; words(k)];
                for (pos, &c) in info_cols.iter().enumerate() {
                    if rows[r][c / 64] >> (c % 64) & 1 == 1 {
                        mask[pos / 64] |= 1 << (pos % 64);
                    }
                }
                (pc, mask)
            })
            .collect();

        Self {
            n,
            info_cols,
            parity_eqs,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension `k = n - rank(H)`.
    pub fn k(&self) -> usize {
        self.info_cols.len()
    }

    pub fn info_cols(&self) -> &[usize] {
        &self.info_cols
    }

    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: info.len(),
            });
        }
        let mut packed = vec![0u64; words(info.len())];
        for (pos, &b) in info.iter().enumerate() {
            packed[pos / 64] |= u64::from(b & 1) << (pos % 64);
        }
        let mut cw = vec![0u8; self.n];
        for (&c, &b) in self.info_cols.iter().zip(info) {
            cw[c] = b & 1;
        }
        for (pc, mask) in &self.parity_eqs {
            let ones: u32 = mask.iter().zip(&packed).map(|(m, u)| (m & u).count_ones()).sum();
            cw[*pc] = (ones & 1) as u8;
        }
        Ok(cw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::build_regular_code;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn repetition_code() {
        let h = SparseParityCheck::from_dense(&[vec![1, 1]]).unwrap();
        let enc = Encoder::new(&h);
        assert_eq!(enc.k(), 1);
        assert_eq!(enc.encode(&[1]).unwrap(), vec![1, 1]);
        assert_eq!(enc.encode(&[0]).unwrap(), vec![0, 0]);
        assert!(enc.encode(&[1, 0]).is_err());
    }

    #[test]
    fn rank_deficient_matrix_grows_k() {
        // r3 = r0 + r1, so rank 3
        let h = SparseParityCheck::from_dense(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![1, 0, 1, 0]]).unwrap();
        assert_eq!(Encoder::new(&h).k(), 1);
        let h2 = SparseParityCheck::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(Encoder::new(&h2).k(), 1);
    }

    #[test]
    fn zero_word_and_random_words_have_zero_syndrome() {
        let h = build_regular_code(24, 3, 6, 3).unwrap();
        let enc = Encoder::new(&h);
        assert!(enc.k() >= 12);
        assert!(enc.encode(&vec![0; enc.k()]).unwrap().iter().all(|&b| b == 0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2)).collect();
            let c = enc.encode(&u).unwrap();
            assert!(h.syndrome(&c).unwrap().iter().all(|&s| s == 0));
            // systematic positions carry u, so the map is injective
            let back: Vec<u8> = enc.info_cols().iter().map(|&j| c[j]).collect();
            assert_eq!(back, u);
        }
    }
}
