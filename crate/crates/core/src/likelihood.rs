//! Symbol likelihoods for the three solution routes: the original
//! likelihoods `f_o(y|c)`, the projected likelihoods `f_τ(y|v)` obtained by
//! summing over preimages of `τ`, and the relabelled likelihoods
//! `f_τ̃(y|w) = f_o(y|τ̃⁻¹(w))`.
//!
//! All pmfs live in the linear domain. Gaussian exponents are shifted by
//! their maximum before exponentiation and every entry is floored at
//! [`PMF_FLOOR`] before normalization.

use crate::channel::SignalingSchedule;
use crate::error::{Error, Result};
use crate::gf2::{bit, BinaryLinearMap};

pub const PMF_FLOOR: f64 = 1e-300;

/// Probability mass function over `𝔽₂^d`, stored as `2^d` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPmf {
    probs: Vec<f64>,
}

impl SymbolPmf {
    /// Normalizes nonnegative weights. The length must be a power of two.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || !weights.len().is_power_of_two() {
            return Err(Error::InvalidMap(format!("pmf length {} is not a power of two", weights.len())));
        }
        if weights.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidMap("pmf weights must be finite and nonnegative".into()));
        }
        let mut probs = weights;
        floor_normalize(&mut probs);
        Ok(Self { probs })
    }

    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!(probs.len().is_power_of_two());
        Self { probs }
    }

    pub fn uniform(bits: usize) -> Self {
        let q = 1usize << bits;
        Self {
            probs: vec![1.0 / q as f64; q],
        }
    }

    pub fn delta(bits: usize, s: usize) -> Self {
        let mut probs = vec![0.0; 1 << bits];
        probs[s] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn bits(&self) -> usize {
        self.probs.len().trailing_zeros() as usize
    }

    /// Index of the largest entry; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
    }
}

/// Lowest index of the maximum.
pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Floors every entry at [`PMF_FLOOR`] and scales to unit sum.
pub(crate) fn floor_normalize(p: &mut [f64]) {
    p.iter_mut().for_each(|x| *x = x.max(PMF_FLOOR));
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
}

/// Noiseless received values `φ_t(s)` for all `2^ℓ` symbols at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    points: Vec<f64>,
}

impl Constellation {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || !points.len().is_power_of_two() {
            return Err(Error::InvalidSignaling(format!(
                "constellation size {} is not a power of two",
                points.len()
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn bits(&self) -> usize {
        self.points.len().trailing_zeros() as usize
    }
}

pub fn build_constellation(schedule: &SignalingSchedule, t: usize) -> Constellation {
    assert!(t < schedule.n(), "time index {t} beyond block length {}", schedule.n());
    Constellation {
        points: (0..1usize << schedule.ell()).map(|s| schedule.signal(t, s)).collect(),
    }
}

/// One constellation per residue `t mod period`.
pub fn build_constellations(schedule: &SignalingSchedule) -> Vec<Constellation> {
    (0..schedule.period().min(schedule.n()))
        .map(|t| build_constellation(schedule, t))
        .collect()
}

fn f_o_into(y: f64, points: &[f64], out: &mut [f64]) {
    let mut max = f64::NEG_INFINITY;
    for (o, &x) in out.iter_mut().zip(points) {
        *o = -0.5 * (y - x) * (y - x);
        max = max.max(*o);
    }
    out.iter_mut().for_each(|o| *o = (*o - max).exp());
    floor_normalize(out);
}

/// `f_o(y|c) ∝ exp(-(y - φ(c))²/2)`, normalized over `c`.
pub fn f_o(y: f64, constellation: &Constellation) -> SymbolPmf {
    let mut probs = vec![0.0; constellation.points.len()];
    f_o_into(y, &constellation.points, &mut probs);
    SymbolPmf { probs }
}

fn project_into(input: &[f64], tau: &BinaryLinearMap, renormalize: bool, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (c, &p) in input.iter().enumerate() {
        out[tau.apply(c)] += p;
    }
    if renormalize {
        let sum: f64 = out.iter().sum();
        out.iter_mut().for_each(|o| *o /= sum);
    }
}

/// `f_τ(y|v) ∝ Σ_{τ(c)=v} f_o(y|c)`. Symbols outside the image of `τ` get
/// exactly zero. When `τ` is injective the result is a relabelling of the
/// input and is returned without renormalization.
pub fn f_tau(pmf_o: &SymbolPmf, tau: &BinaryLinearMap) -> Result<SymbolPmf> {
    if tau.in_dim() != pmf_o.bits() {
        return Err(Error::InvalidMap(format!(
            "map expects {} levels but pmf has {}",
            tau.in_dim(),
            pmf_o.bits()
        )));
    }
    let mut probs = vec![0.0; 1 << tau.out_dim()];
    project_into(&pmf_o.probs, tau, tau.rank() < tau.in_dim(), &mut probs);
    Ok(SymbolPmf { probs })
}

/// `f_τ̃(y|w) = f_o(y|τ̃⁻¹(w))`: a pure permutation of the pmf.
pub fn f_tau_tilde(pmf_o: &SymbolPmf, tau_tilde: &BinaryLinearMap) -> Result<SymbolPmf> {
    check_invertible(tau_tilde, pmf_o.bits())?;
    let mut probs = vec![0.0; pmf_o.len()];
    for (c, &p) in pmf_o.probs.iter().enumerate() {
        probs[tau_tilde.apply(c)] = p;
    }
    Ok(SymbolPmf { probs })
}

fn check_invertible(map: &BinaryLinearMap, bits: usize) -> Result<()> {
    if !map.is_square() || map.in_dim() != bits {
        return Err(Error::InvalidMap(format!(
            "expected a {bits}x{bits} map, got {}x{}",
            map.out_dim(),
            map.in_dim()
        )));
    }
    let rank = map.rank();
    if rank < bits {
        return Err(Error::SingularMap { rank, dim: bits });
    }
    Ok(())
}

/// Minimum distance between the two halves of the constellation split by
/// bit `level` of `map(c)` (identity when `map` is `None`).
pub fn partition_distance(constellation: &Constellation, level: usize, map: Option<&BinaryLinearMap>) -> Result<f64> {
    let out_dim = map.map_or(constellation.bits(), BinaryLinearMap::out_dim);
    if level >= out_dim {
        return Err(Error::InvalidMap(format!("level {level} out of range for {out_dim} outputs")));
    }
    let label = |c: usize| bit(map.map_or(c, |m| m.apply(c)), level);
    let pts = &constellation.points;
    let mut best = f64::INFINITY;
    for a in 0..pts.len() {
        for b in 0..pts.len() {
            if label(a) == 0 && label(b) == 1 {
                best = best.min((pts[a] - pts[b]).abs());
            }
        }
    }
    Ok(best)
}

/// Per-time likelihood vectors over `𝔽₂^d`, stored row-major (`n × 2^d`).
#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodTable {
    bits: usize,
    data: Vec<f64>,
}

impl LikelihoodTable {
    /// Wraps row-major pmfs; the length must be a multiple of `2^bits`.
    pub fn from_rows(bits: usize, data: Vec<f64>) -> Result<Self> {
        if bits == 0 || bits > crate::gf2::MAX_LEVELS || !data.len().is_multiple_of(1 << bits) {
            return Err(Error::InvalidMap(format!(
                "{} entries do not form rows of length 2^{bits}",
                data.len()
            )));
        }
        Ok(Self { bits, data })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.len() >> self.bits
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        let q = 1 << self.bits;
        &self.data[t * q..(t + 1) * q]
    }

    pub fn pmf(&self, t: usize) -> SymbolPmf {
        SymbolPmf::from_normalized(self.row(t).to_vec())
    }

    /// Original likelihoods `f_o(y_t|·)` for a whole block.
    pub fn channel(schedule: &SignalingSchedule, y: &[f64]) -> Self {
        assert_eq!(y.len(), schedule.n(), "received length");
        let bits = schedule.ell();
        let q = 1 << bits;
        let consts = build_constellations(schedule);
        let mut data = vec![0.0; y.len() * q];
        for (t, (&yt, out)) in y.iter().zip(data.chunks_exact_mut(q)).enumerate() {
            f_o_into(yt, &consts[t % consts.len()].points, out);
        }
        Self { bits, data }
    }

    /// Row-wise [`f_tau`].
    pub fn project(&self, tau: &BinaryLinearMap) -> Result<Self> {
        if tau.in_dim() != self.bits {
            return Err(Error::InvalidMap(format!(
                "map expects {} levels but table has {}",
                tau.in_dim(),
                self.bits
            )));
        }
        let q_out = 1 << tau.out_dim();
        let renormalize = tau.rank() < tau.in_dim();
        let mut data = vec![0.0; self.n() * q_out];
        for (t, out) in data.chunks_exact_mut(q_out).enumerate() {
            project_into(self.row(t), tau, renormalize, out);
        }
        Ok(Self {
            bits: tau.out_dim(),
            data,
        })
    }

    /// Row-wise [`f_tau_tilde`].
    pub fn relabel(&self, tau_tilde: &BinaryLinearMap) -> Result<Self> {
        check_invertible(tau_tilde, self.bits)?;
        let q = 1 << self.bits;
        let perm: Vec<usize> = (0..q).map(|c| tau_tilde.apply(c)).collect();
        let mut data = vec![0.0; self.data.len()];
        for (src, dst) in self.data.chunks_exact(q).zip(data.chunks_exact_mut(q)) {
            for (c, &p) in src.iter().enumerate() {
                dst[perm[c]] = p;
            }
        }
        Ok(Self { bits: self.bits, data })
    }
}
