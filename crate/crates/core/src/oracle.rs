//! Brute-force references for desk-scale instances: exact posteriors by
//! enumerating every tuple of codewords, and XOR convolution by nested sums.

use crate::channel::SignalingSchedule;
use crate::error::{Error, Result};
use crate::gf2::BinaryLinearMap;
use crate::ldpc::{Encoder, SparseParityCheck};
use crate::likelihood::{LikelihoodTable, SymbolPmf};

/// Largest `log2` of the number of enumerated tuples.
pub const MAX_ENUMERATION_BITS: usize = 20;

/// All `2^k` codewords of a small code.
#[derive(Clone, Debug)]
pub struct EnumeratedCodebook {
    code: SparseParityCheck,
    words: Vec<Vec<u8>>,
}

impl EnumeratedCodebook {
    pub const MAX_N: usize = 24;
    pub const MAX_K: usize = 16;

    pub fn new(code: &SparseParityCheck) -> Result<Self> {
        if code.n_cols() > Self::MAX_N {
            return Err(Error::EnumerationBound(format!(
                "n = {} exceeds {}",
                code.n_cols(),
                Self::MAX_N
            )));
        }
        let enc = Encoder::new(code);
        if enc.k() > Self::MAX_K {
            return Err(Error::EnumerationBound(format!("k = {} exceeds {}", enc.k(), Self::MAX_K)));
        }
        let words = (0..1usize << enc.k())
            .map(|m| {
                let u: Vec<u8> = (0..enc.k()).map(|i| ((m >> i) & 1) as u8).collect();
                enc.encode(&u)
            })
            .collect::<Result<Vec<_>>>()?;
        debug_assert!(words.iter().all(|w| code.is_codeword(w)));
        Ok(Self {
            code: code.clone(),
            words,
        })
    }

    pub fn code(&self) -> &SparseParityCheck {
        &self.code
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn n(&self) -> usize {
        self.code.n_cols()
    }

    pub fn k(&self) -> usize {
        self.words.len().trailing_zeros() as usize
    }
}

/// Exact per-time pmfs of `τ(c_t)` where row `i` of `c` ranges over
/// `levels[i]` and a tuple has weight `exp(Σ_t log_weight(t, c_t))`.
///
/// Accumulation runs in two passes (maximum, then shifted sum) so that
/// long blocks do not underflow.
pub fn enumerate_marginals(
    levels: &[&[Vec<u8>]],
    tau: &BinaryLinearMap,
    log_weight: impl Fn(usize, usize) -> f64,
) -> Result<LikelihoodTable> {
    let ell = levels.len();
    if ell == 0 || tau.in_dim() != ell {
        return Err(Error::InvalidMap(format!(
            "map takes {} levels but {ell} word lists were given",
            tau.in_dim()
        )));
    }
    let log_count: f64 = levels.iter().map(|l| (l.len() as f64).log2()).sum();
    if levels.iter().any(|l| l.is_empty()) || log_count > MAX_ENUMERATION_BITS as f64 + 1e-9 {
        return Err(Error::EnumerationBound(format!(
            "2^{log_count:.1} tuples exceed the bound 2^{MAX_ENUMERATION_BITS}"
        )));
    }
    let n = levels[0][0].len();
    if levels.iter().any(|l| l.iter().any(|w| w.len() != n)) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: levels.iter().flat_map(|l| l.iter()).map(Vec::len).find(|&m| m != n).unwrap_or(n),
        });
    }

    let mut index = vec![0usize; ell];
    let mut symbols = vec![0usize; n];
    let visit = |index: &[usize], symbols: &mut [usize]| -> f64 {
        symbols.iter_mut().for_each(|s| *s = 0);
        for (i, &w) in index.iter().enumerate() {
            for (s, &b) in symbols.iter_mut().zip(&levels[i][w]) {
                *s |= usize::from(b) << i;
            }
        }
        symbols.iter().enumerate().map(|(t, &s)| log_weight(t, s)).sum()
    };
    let advance = |index: &mut [usize]| -> bool {
        for (i, x) in index.iter_mut().enumerate() {
            *x += 1;
            if *x < levels[i].len() {
                return true;
            }
            *x = 0;
        }
        false
    };

    let mut max = f64::NEG_INFINITY;
    loop {
        max = max.max(visit(&index, &mut symbols));
        if !advance(&mut index) {
            break;
        }
    }

    let q = 1 << tau.out_dim();
    let mut data = vec![0.0; n * q];
    loop {
        let w = (visit(&index, &mut symbols) - max).exp();
        for (t, &s) in symbols.iter().enumerate() {
            data[t * q + tau.apply(s)] += w;
        }
        if !advance(&mut index) {
            break;
        }
    }
    for row in data.chunks_exact_mut(q) {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|x| *x /= sum);
    }
    LikelihoodTable::from_rows(tau.out_dim(), data)
}

/// Exact posterior of `v_t = τ(c_t)` given `y`, with every one of the `ℓ`
/// rows of `c` ranging over the codebook.
pub fn exact_marginals(
    codebook: &EnumeratedCodebook,
    ell: usize,
    schedule: &SignalingSchedule,
    y: &[f64],
    tau: &BinaryLinearMap,
) -> Result<LikelihoodTable> {
    if schedule.ell() != ell || y.len() != codebook.n() || schedule.n() != codebook.n() {
        return Err(Error::LengthMismatch {
            expected: codebook.n(),
            got: y.len(),
        });
    }
    if ell * codebook.k() > MAX_ENUMERATION_BITS {
        return Err(Error::EnumerationBound(format!(
            "ℓ·k = {} exceeds {MAX_ENUMERATION_BITS}",
            ell * codebook.k()
        )));
    }
    let levels = vec![codebook.words(); ell];
    enumerate_marginals(&levels, tau, |t, s| {
        let d = y[t] - schedule.signal(t, s);
        -0.5 * d * d
    })
}

/// XOR convolution by the defining nested sum over all symbol tuples.
pub fn direct_xor_convolution(pmfs: &[SymbolPmf]) -> Result<SymbolPmf> {
    let Some(first) = pmfs.first() else {
        return Err(Error::EnumerationBound("empty pmf list".into()));
    };
    let q = first.len();
    if first.bits() > 3 || pmfs.len() > 6 || pmfs.iter().any(|p| p.len() != q) {
        return Err(Error::EnumerationBound(format!(
            "{} pmfs over 2^{} symbols exceed the bound (ℓ <= 3, at most 6 pmfs)",
            pmfs.len(),
            first.bits()
        )));
    }
    let mut out = vec![0.0; q];
    let mut index = vec![0usize; pmfs.len()];
    'outer: loop {
        let (mut x, mut p) = (0, 1.0);
        for (pmf, &s) in pmfs.iter().zip(&index) {
            x ^= s;
            p *= pmf.probs()[s];
        }
        out[x] += p;
        for s in index.iter_mut() {
            *s += 1;
            if *s < q {
                continue 'outer;
            }
            *s = 0;
        }
        break;
    }
    SymbolPmf::new(out)
}
