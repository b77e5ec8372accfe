//! Joint decoding/computing on the normal graph of the column-scaled code
//! over `𝔽₂^ℓ`. Every nonzero entry of `H` is the identity, so edges carry
//! pmfs over `𝔽₂^ℓ` without permutation and the check rule is an XOR
//! convolution, evaluated with the Walsh-Hadamard transform.

use crate::channel::SignalingSchedule;
use crate::error::{Error, Result};
use crate::gf2::{bit, BinaryLinearMap};
use crate::ldpc::SparseParityCheck;
use crate::likelihood::{argmax, floor_normalize, LikelihoodTable, SymbolPmf};

/// In-place unnormalized Walsh-Hadamard transform. Applying it twice
/// multiplies by `a.len()`.
pub fn wht(a: &mut [f64]) {
    let q = a.len();
    debug_assert!(q.is_power_of_two());
    let mut h = 1;
    while h < q {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Scratch buffers for [`check_row`], sized for one check of degree `deg`.
#[derive(Default)]
struct CheckScratch {
    spectra: Vec<f64>,
    suffix: Vec<f64>,
    prefix: Vec<f64>,
}

/// Outgoing messages of one check. `incoming` and `outgoing` hold `deg`
/// consecutive pmfs of length `q`; message `p` of `outgoing` is the XOR
/// convolution of all incoming pmfs except `p`.
fn check_row(incoming: &[f64], outgoing: &mut [f64], q: usize, scratch: &mut CheckScratch) {
    let deg = incoming.len() / q;
    let CheckScratch { spectra, suffix, prefix } = scratch;
    spectra.clear();
    spectra.extend_from_slice(incoming);
    spectra.chunks_exact_mut(q).for_each(wht);

    suffix.clear();
    suffix.resize((deg + 1) * q, 1.0);
    for p in (0..deg).rev() {
        let (head, tail) = suffix.split_at_mut((p + 1) * q);
        let spec = &spectra[p * q..(p + 1) * q];
        for ((dst, &next), &s) in head[p * q..].iter_mut().zip(&tail[..q]).zip(spec) {
            *dst = next * s;
        }
    }

    prefix.clear();
    prefix.resize(q, 1.0);
    let inv_q = 1.0 / q as f64;
    for p in 0..deg {
        let out = &mut outgoing[p * q..(p + 1) * q];
        for ((o, &a), &b) in out.iter_mut().zip(prefix.iter()).zip(&suffix[(p + 1) * q..(p + 2) * q]) {
            *o = a * b;
        }
        wht(out);
        out.iter_mut().for_each(|x| *x = (*x * inv_q).max(0.0));
        floor_normalize(out);
        for (a, &s) in prefix.iter_mut().zip(&spectra[p * q..(p + 1) * q]) {
            *a *= s;
        }
    }
}

/// Check-to-variable message towards edge `exclude`: the XOR convolution of
/// the other incoming pmfs. With a single incoming message the result is
/// the point mass at zero.
pub fn check_node_update(incoming: &[SymbolPmf], exclude: usize) -> SymbolPmf {
    assert!(exclude < incoming.len(), "excluded index out of range");
    let q = incoming[0].len();
    assert!(incoming.iter().all(|p| p.len() == q), "pmfs over different alphabets");
    let flat: Vec<f64> = incoming.iter().flat_map(|p| p.probs().iter().copied()).collect();
    let mut out = vec![0.0; flat.len()];
    check_row(&flat, &mut out, q, &mut CheckScratch::default());
    SymbolPmf::from_normalized(out[exclude * q..(exclude + 1) * q].to_vec())
}

/// `out ∝ channel · Π others`, rescaled by the running maximum so that
/// long products cannot underflow, then floored and normalized.
fn product_into<'a>(channel: &[f64], others: impl Iterator<Item = &'a [f64]>, out: &mut [f64]) {
    out.copy_from_slice(channel);
    for msg in others {
        let mut max = 0.0f64;
        for (o, &m) in out.iter_mut().zip(msg) {
            *o *= m;
            max = max.max(*o);
        }
        if max > 0.0 {
            out.iter_mut().for_each(|o| *o /= max);
        }
    }
    floor_normalize(out);
}

/// Variable-to-check message: the channel pmf times every incoming message
/// except `exclude`. `None` excludes nothing and yields the full posterior.
pub fn variable_node_update(channel: &SymbolPmf, incoming: &[SymbolPmf], exclude: Option<usize>) -> SymbolPmf {
    let mut out = vec![0.0; channel.len()];
    let others = incoming
        .iter()
        .enumerate()
        .filter(|&(k, _)| Some(k) != exclude)
        .map(|(_, p)| p.probs());
    product_into(channel.probs(), others, &mut out);
    SymbolPmf::from_normalized(out)
}

/// Projects each posterior through the preimage classes of `τ` and takes
/// the argmax (lowest index on ties). Returns `ℓ′` rows of `n` bits.
pub fn decide_and_project(posteriors: &LikelihoodTable, tau: &BinaryLinearMap) -> Result<Vec<Vec<u8>>> {
    if tau.in_dim() != posteriors.bits() {
        return Err(Error::InvalidMap(format!(
            "map expects {} levels but posteriors have {}",
            tau.in_dim(),
            posteriors.bits()
        )));
    }
    let mut projected = vec![0.0; 1 << tau.out_dim()];
    let mut rows = vec![vec![0u8; posteriors.n()]; tau.out_dim()];
    for t in 0..posteriors.n() {
        projected.iter_mut().for_each(|p| *p = 0.0);
        for (x, &p) in posteriors.row(t).iter().enumerate() {
            projected[tau.apply(x)] += p;
        }
        let v = argmax(&projected);
        for (r, row) in rows.iter_mut().enumerate() {
            row[t] = bit(v, r);
        }
    }
    Ok(rows)
}

/// Flooding-schedule message passing with explicit iteration control.
///
/// Variable-to-check messages start at the channel pmfs. Each
/// [`iterate`](Self::iterate) runs all check updates, then all variable
/// updates.
pub struct JointDecoder<'a> {
    code: &'a SparseParityCheck,
    channel: LikelihoodTable,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    scratch: CheckScratch,
    iterations: usize,
}

impl<'a> JointDecoder<'a> {
    pub fn new(code: &'a SparseParityCheck, channel: LikelihoodTable) -> Result<Self> {
        if channel.n() != code.n_cols() {
            return Err(Error::LengthMismatch {
                expected: code.n_cols(),
                got: channel.n(),
            });
        }
        let q = 1 << channel.bits();
        let mut v2c = vec![0.0; code.edge_count() * q];
        for (e, j) in code.edge_cols().enumerate() {
            v2c[e * q..(e + 1) * q].copy_from_slice(channel.row(j));
        }
        let c2v = vec![1.0 / q as f64; v2c.len()];
        Ok(Self {
            code,
            channel,
            v2c,
            c2v,
            scratch: CheckScratch::default(),
            iterations: 0,
        })
    }

    fn q(&self) -> usize {
        1 << self.channel.bits()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Degree of variable node `j` in the normal graph, counting the
    /// channel half-edge.
    pub fn variable_degree(&self, j: usize) -> usize {
        self.code.col_edges(j).len() + 1
    }

    pub fn check_to_var(&self, e: usize) -> &[f64] {
        let q = self.q();
        &self.c2v[e * q..(e + 1) * q]
    }

    pub fn var_to_check(&self, e: usize) -> &[f64] {
        let q = self.q();
        &self.v2c[e * q..(e + 1) * q]
    }

    pub fn iterate(&mut self) {
        let q = self.q();
        let code = self.code;
        for i in 0..code.n_rows() {
            let r = code.row_edges(i);
            let span = r.start * q..r.end * q;
            check_row(&self.v2c[span.clone()], &mut self.c2v[span], q, &mut self.scratch);
        }
        for j in 0..code.n_cols() {
            let edges = code.col_edges(j);
            for &e in edges {
                let others = edges.iter().filter(|&&o| o != e).map(|&o| &self.c2v[o * q..(o + 1) * q]);
                product_into(self.channel.row(j), others, &mut self.v2c[e * q..(e + 1) * q]);
            }
        }
        self.iterations += 1;
    }

    /// Full messages: the channel pmf times all incoming check messages.
    pub fn posteriors(&self) -> LikelihoodTable {
        let q = self.q();
        let mut data = vec![0.0; self.channel.as_slice().len()];
        for (j, out) in data.chunks_exact_mut(q).enumerate() {
            let all = self.code.col_edges(j).iter().map(|&e| &self.c2v[e * q..(e + 1) * q]);
            product_into(self.channel.row(j), all, out);
        }
        LikelihoodTable::from_rows(self.channel.bits(), data).expect("shape preserved")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointResult {
    pub v_hat: Vec<Vec<u8>>,
    pub success: bool,
    /// Iterations run; 1 means success after the first.
    pub iterations: usize,
    pub posteriors: LikelihoodTable,
}

/// Runs up to `k_max` iterations, stopping as soon as every row of `v̂`
/// is a codeword.
pub fn run_joint(
    code: &SparseParityCheck,
    schedule: &SignalingSchedule,
    y: &[f64],
    tau: &BinaryLinearMap,
    k_max: usize,
) -> Result<JointResult> {
    assert!(k_max >= 1, "k_max must be positive");
    if y.len() != code.n_cols() || schedule.n() != code.n_cols() {
        return Err(Error::LengthMismatch {
            expected: code.n_cols(),
            got: y.len(),
        });
    }
    if tau.in_dim() != schedule.ell() {
        return Err(Error::InvalidMap(format!(
            "target map takes {} levels but the schedule has {} users",
            tau.in_dim(),
            schedule.ell()
        )));
    }
    let mut dec = JointDecoder::new(code, LikelihoodTable::channel(schedule, y))?;
    loop {
        dec.iterate();
        let posteriors = dec.posteriors();
        let v_hat = decide_and_project(&posteriors, tau)?;
        let success = v_hat.iter().all(|row| code.is_codeword(row));
        if success || dec.iterations() == k_max {
            return Ok(JointResult {
                v_hat,
                success,
                iterations: dec.iterations(),
                posteriors,
            });
        }
    }
}
