//! Iterative multistage decoding: a soft demapper node exchanging binary
//! extrinsic messages with one sum-product decoder per level.
//!
//! The three variants differ only in which per-time likelihood the demapper
//! sees and how the level decisions are mapped to the target `v̂`:
//!
//! | variant | levels | likelihood | projection |
//! |---------|--------|------------|------------|
//! | DC      | `ℓ`    | `f_o`      | `v̂ = τ(ĉ)` |
//! | CD      | `ℓ′`   | `f_τ`      | `v̂` is the level output |
//! | CDC     | `ℓ`    | `f_τ̃`      | `v̂ = τ∘τ̃⁻¹(ŵ)` |

use crate::channel::SignalingSchedule;
use crate::error::{Error, Result};
use crate::gf2::{bit, BinaryLinearMap};
use crate::ldpc::{SparseParityCheck, SpaDecoder, LLR_CLIP};
use crate::likelihood::{LikelihoodTable, PMF_FLOOR};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultistageParams {
    /// Maximum number of global (demapper ↔ decoders) iterations.
    pub k_max: usize,
    /// Maximum number of SPA iterations per level per global iteration.
    pub i_max: usize,
    /// Let each SPA run stop on a zero syndrome.
    pub spa_early_stop: bool,
    /// Also require every level word to be a codeword before declaring success.
    pub strict: bool,
}

impl Default for MultistageParams {
    fn default() -> Self {
        Self {
            k_max: 30,
            i_max: 50,
            spa_early_stop: true,
            strict: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultistageResult {
    /// Decoded target, one row per output of `τ`.
    pub v_hat: Vec<Vec<u8>>,
    /// Hard decisions of the level decoders (`ĉ`, `v̂` or `ŵ`).
    pub level_hard: Vec<Vec<u8>>,
    /// Full-message LLRs of the level decoders, `ln P(0)/P(1)`.
    pub level_posteriors: Vec<Vec<f64>>,
    pub success: bool,
    /// Global iterations run; 1 means success in the first one.
    pub iterations: usize,
}

#[inline]
fn bit_probs(llr: f64) -> [f64; 2] {
    [1.0 / (1.0 + (-llr).exp()), 1.0 / (1.0 + llr.exp())]
}

/// Soft demapper for one level. `priors[j]` holds the decoder-to-demapper
/// LLRs of level `j`; `priors[level]` is never read.
///
/// Returns `ln(P(0)/P(1))` per time index, clipped to `±LLR_CLIP`.
pub fn siso_demap(level: usize, table: &LikelihoodTable, priors: &[Vec<f64>]) -> Vec<f64> {
    let d = table.bits();
    assert!(level < d, "level {level} out of range for {d} levels");
    assert_eq!(priors.len(), d, "one prior row per level");
    let mut probs = vec![[0.5; 2]; d];
    (0..table.n())
        .map(|t| {
            for (j, p) in probs.iter_mut().enumerate() {
                if j != level {
                    *p = bit_probs(priors[j][t]);
                }
            }
            let mut acc = [0.0; 2];
            for (s, &l) in table.row(t).iter().enumerate() {
                let mut w = l;
                for (j, p) in probs.iter().enumerate() {
                    if j != level {
                        w *= p[bit(s, j) as usize];
                    }
                }
                acc[bit(s, level) as usize] += w;
            }
            (acc[0].max(PMF_FLOOR) / acc[1].max(PMF_FLOOR)).ln().clamp(-LLR_CLIP, LLR_CLIP)
        })
        .collect()
}

fn multistage(
    code: &SparseParityCheck,
    table: &LikelihoodTable,
    params: &MultistageParams,
    project: impl Fn(&[Vec<u8>]) -> Vec<Vec<u8>>,
) -> MultistageResult {
    assert!(params.k_max >= 1 && params.i_max >= 1, "iteration limits must be positive");
    let (d, n) = (table.bits(), table.n());
    let spa = SpaDecoder::new(code);
    let mut to_demapper = vec![vec![0.0; n]; d];
    let mut level_hard = vec![vec![0u8; n]; d];
    let mut level_posteriors = vec![vec![0.0; n]; d];
    let mut v_hat = Vec::new();

    for k in 0..params.k_max {
        for i in 0..d {
            let prior = siso_demap(i, table, &to_demapper);
            let out = spa.decode_with(&prior, params.i_max, params.spa_early_stop);
            to_demapper[i] = out.extrinsic;
            level_hard[i] = out.hard;
            level_posteriors[i] = out.posterior;
        }
        v_hat = project(&level_hard);
        let ok = v_hat.iter().all(|row| code.is_codeword(row))
            && (!params.strict || level_hard.iter().all(|row| code.is_codeword(row)));
        if ok {
            return MultistageResult {
                v_hat,
                level_hard,
                level_posteriors,
                success: true,
                iterations: k + 1,
            };
        }
        if d == 1 {
            // nothing feeds back into a single level; further passes repeat this one
            return MultistageResult {
                v_hat,
                level_hard,
                level_posteriors,
                success: false,
                iterations: 1,
            };
        }
    }
    MultistageResult {
        v_hat,
        level_hard,
        level_posteriors,
        success: false,
        iterations: params.k_max,
    }
}

fn check_inputs(code: &SparseParityCheck, schedule: &SignalingSchedule, y: &[f64], tau: &BinaryLinearMap) -> Result<()> {
    if y.len() != code.n_cols() || schedule.n() != code.n_cols() {
        return Err(Error::LengthMismatch {
            expected: code.n_cols(),
            got: if y.len() != code.n_cols() { y.len() } else { schedule.n() },
        });
    }
    if tau.in_dim() != schedule.ell() {
        return Err(Error::InvalidMap(format!(
            "target map takes {} levels but the schedule has {} users",
            tau.in_dim(),
            schedule.ell()
        )));
    }
    Ok(())
}

/// Decode every level from `f_o`, then compute `v̂ = τ(ĉ)`.
pub fn run_dc_imsa(
    code: &SparseParityCheck,
    schedule: &SignalingSchedule,
    y: &[f64],
    tau: &BinaryLinearMap,
    params: &MultistageParams,
) -> Result<MultistageResult> {
    check_inputs(code, schedule, y, tau)?;
    let table = LikelihoodTable::channel(schedule, y);
    Ok(multistage(code, &table, params, |c| {
        tau.apply_rows(c).expect("dimension checked")
    }))
}

/// Compute `f_τ` first, then decode the `ℓ′` rows of `v` directly.
pub fn run_cd_imsa(
    code: &SparseParityCheck,
    schedule: &SignalingSchedule,
    y: &[f64],
    tau: &BinaryLinearMap,
    params: &MultistageParams,
) -> Result<MultistageResult> {
    check_inputs(code, schedule, y, tau)?;
    let table = LikelihoodTable::channel(schedule, y).project(tau)?;
    Ok(multistage(code, &table, params, <[Vec<u8>]>::to_vec))
}

/// Decode the rows of `w = τ̃(c)` from `f_τ̃`, then compute
/// `v̂ = τ∘τ̃⁻¹(ŵ)`.
pub fn run_cdc_imsa(
    code: &SparseParityCheck,
    schedule: &SignalingSchedule,
    y: &[f64],
    tau: &BinaryLinearMap,
    tau_tilde: &BinaryLinearMap,
    params: &MultistageParams,
) -> Result<MultistageResult> {
    check_inputs(code, schedule, y, tau)?;
    let back = tau.compose(&tau_tilde.invert()?)?;
    let table = LikelihoodTable::channel(schedule, y).relabel(tau_tilde)?;
    Ok(multistage(code, &table, params, |w| {
        back.apply_rows(w).expect("dimension checked")
    }))
}
