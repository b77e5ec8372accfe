//! Superposition channel `y_t = Σ h_i α_t^(i) (1 - 2 c_t^(i)) + z_t` with unit
//! noise variance, power allocation and amplitude schedules.
//!
//! Noise is drawn from `ChaCha8Rng` through `rand_distr::StandardNormal`
//! (a ziggurat sampler), seeded per trial by [`trial_seed`], so every
//! experiment is bit-reproducible regardless of thread count.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gf2::bit;

/// Tolerance on the per-user energy constraint.
pub const ENERGY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    /// Superposition modulation.
    Sm,
    /// Multiple-access channel.
    Mac,
    /// Two-user Gaussian interference channel, seen from receiver 0.
    Gifc,
    /// Two-way relay channel with physical-layer network coding.
    Twrc,
    /// Three-user multi-way relay.
    MultiwayRelay,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Sm => "sm",
            ScenarioKind::Mac => "mac",
            ScenarioKind::Gifc => "gifc",
            ScenarioKind::Twrc => "twrc",
            ScenarioKind::MultiwayRelay => "multiway_relay",
        }
    }

    /// Whether the SNR axis is normalized by the rate (`SNR_norm`).
    pub fn uses_normalized_snr(self) -> bool {
        matches!(self, ScenarioKind::Sm | ScenarioKind::Mac)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sm" => ScenarioKind::Sm,
            "mac" => ScenarioKind::Mac,
            "gifc" => ScenarioKind::Gifc,
            "twrc" => ScenarioKind::Twrc,
            "multiway_relay" => ScenarioKind::MultiwayRelay,
            other => return Err(Error::Scenario(format!("unknown scenario {other:?}"))),
        })
    }
}

/// Successive-cancellation power allocation: `P0 = 10^(δ/10)` and
/// `P_i = P0 (1 + P0)^i`. Returns `(powers, ratios)` with ratios summing to 1.
pub fn method2_allocation(ell: usize, delta_db: f64) -> (Vec<f64>, Vec<f64>) {
    let p0 = 10f64.powf(delta_db / 10.0);
    let powers: Vec<f64> = (0..ell).map(|i| p0 * (1.0 + p0).powi(i as i32)).collect();
    let total: f64 = powers.iter().sum();
    let ratios = powers.iter().map(|p| p / total).collect();
    (powers, ratios)
}

/// Total transmit power `P` for an SNR point.
///
/// SM and MAC use `SNR_norm = 10 log10(P / (2^(2r) - 1))` with rate `r` in
/// bits per dimension. The relay and interference scenarios use the per-user
/// convention `SNR = 10 log10(P^(0))` with equal powers, i.e. `P = 2·10^(SNR/10)`
/// for two users and `3·10^(SNR/10)` for the three-user relay.
pub fn snr_to_power(kind: ScenarioKind, rate: Option<f64>, snr_db: f64) -> Result<f64> {
    let lin = 10f64.powf(snr_db / 10.0);
    match kind {
        ScenarioKind::Sm | ScenarioKind::Mac => match rate {
            Some(r) if r > 0.0 && r.is_finite() => Ok((2f64.powf(2.0 * r) - 1.0) * lin),
            _ => Err(Error::Scenario(format!("{kind} needs a positive rate, got {rate:?}"))),
        },
        ScenarioKind::Gifc | ScenarioKind::Twrc => Ok(2.0 * lin),
        ScenarioKind::MultiwayRelay => Ok(3.0 * lin),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Amplitudes {
    /// `α_t^(i) = a[i]` for all `t`.
    Constant(Vec<f64>),
    /// `α_t^(i) = a[(i + t) mod ℓ]`: the base amplitudes rotate left by one
    /// position per time slot.
    CyclicShift(Vec<f64>),
}

impl Amplitudes {
    fn base(&self) -> &[f64] {
        match self {
            Amplitudes::Constant(a) | Amplitudes::CyclicShift(a) => a,
        }
    }
}

/// Per-time, per-user amplitudes together with the channel coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalingSchedule {
    h: Vec<f64>,
    amplitudes: Amplitudes,
    n: usize,
    budgets: Vec<f64>,
}

impl SignalingSchedule {
    /// Validates shapes, signs and the per-user average energy constraint
    /// `(1/n) Σ_t (α_t^(i))² <= budgets[i]`.
    pub fn new(h: Vec<f64>, amplitudes: Amplitudes, n: usize, budgets: Vec<f64>) -> Result<Self> {
        let ell = h.len();
        if ell == 0 || ell > crate::gf2::MAX_LEVELS {
            return Err(Error::InvalidSignaling(format!("unsupported user count {ell}")));
        }
        if amplitudes.base().len() != ell || budgets.len() != ell {
            return Err(Error::InvalidSignaling(format!(
                "{ell} channel coefficients but {} amplitudes and {} budgets",
                amplitudes.base().len(),
                budgets.len()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidSignaling("block length must be positive".into()));
        }
        if h.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::InvalidSignaling(
                "channel coefficients must be finite and nonnegative".into(),
            ));
        }
        if amplitudes.base().iter().any(|&a| !(a.is_finite() && a >= 0.0)) {
            return Err(Error::InvalidSignaling("amplitudes must be finite and nonnegative".into()));
        }
        let schedule = Self {
            h,
            amplitudes,
            n,
            budgets,
        };
        for user in 0..ell {
            let average = schedule.user_energy(user);
            if average > schedule.budgets[user] + ENERGY_TOL {
                return Err(Error::EnergyExceeded {
                    user,
                    average,
                    budget: schedule.budgets[user],
                });
            }
        }
        Ok(schedule)
    }

    /// Time-invariant amplitudes `sqrt(ratio_i · P)`; each user's budget is
    /// `ratio_i · P`.
    pub fn constant(ratios: &[f64], total_power: f64, n: usize, h: Vec<f64>) -> Result<Self> {
        check_ratios(ratios)?;
        let budgets: Vec<f64> = ratios.iter().map(|r| r * total_power).collect();
        let amps = budgets.iter().map(|p| p.sqrt()).collect();
        Self::new(h, Amplitudes::Constant(amps), n, budgets)
    }

    pub fn ell(&self) -> usize {
        self.h.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    /// Number of distinct per-time amplitude patterns.
    pub fn period(&self) -> usize {
        match self.amplitudes {
            Amplitudes::Constant(_) => 1,
            Amplitudes::CyclicShift(_) => self.ell(),
        }
    }

    #[inline]
    pub fn alpha(&self, t: usize, i: usize) -> f64 {
        match &self.amplitudes {
            Amplitudes::Constant(a) => a[i],
            Amplitudes::CyclicShift(a) => a[(i + t) % a.len()],
        }
    }

    pub fn user_energy(&self, user: usize) -> f64 {
        (0..self.n).map(|t| self.alpha(t, user).powi(2)).sum::<f64>() / self.n as f64
    }

    /// Noiseless received value `φ_t(s)` for symbol `s` at time `t`.
    #[inline]
    pub fn signal(&self, t: usize, s: usize) -> f64 {
        (0..self.ell())
            .map(|i| {
                let x = self.alpha(t, i);
                if bit(s, i) == 0 {
                    self.h[i] * x
                } else {
                    -self.h[i] * x
                }
            })
            .sum()
    }
}

fn check_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.iter().any(|&r| !(r.is_finite() && r >= 0.0)) {
        return Err(Error::InvalidSignaling("ratios must be nonnegative".into()));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSignaling(format!("ratios sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Time-varying signaling: `α_t^(i) = sqrt(ratio[(i+t) mod ℓ] · P)`.
///
/// Over each full cycle of `ℓ` slots every user spends exactly `P`, so the
/// per-user budget is `P · ceil(n/ℓ) / n`, which equals `P/ℓ` when `ℓ | n`.
pub fn cyclic_schedule(base_ratios: &[f64], total_power: f64, n: usize, h: Vec<f64>) -> Result<SignalingSchedule> {
    check_ratios(base_ratios)?;
    let ell = base_ratios.len();
    if n == 0 || ell == 0 {
        return Err(Error::InvalidSignaling("empty schedule".into()));
    }
    let budget = total_power * n.div_ceil(ell) as f64 / n as f64;
    let amps = base_ratios.iter().map(|r| (r * total_power).sqrt()).collect();
    SignalingSchedule::new(h, Amplitudes::CyclicShift(amps), n, vec![budget; ell])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Noise {
    /// Unit-variance AWGN.
    #[default]
    Awgn,
    /// No noise; noiseless constellation checks only.
    Off,
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for trial `trial` of an experiment with master seed `master`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial))
}

/// Sends per-time symbols through the channel with noise drawn from `seed`.
pub fn transmit(schedule: &SignalingSchedule, symbols: &[usize], seed: u64) -> Vec<f64> {
    transmit_with(schedule, symbols, Noise::Awgn, seed)
}

pub fn transmit_with(schedule: &SignalingSchedule, symbols: &[usize], noise: Noise, seed: u64) -> Vec<f64> {
    assert_eq!(symbols.len(), schedule.n(), "symbol count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    symbols
        .iter()
        .enumerate()
        .map(|(t, &s)| {
            debug_assert!(s >> schedule.ell() == 0);
            let z: f64 = match noise {
                Noise::Awgn => StandardNormal.sample(&mut rng),
                Noise::Off => 0.0,
            };
            schedule.signal(t, s) + z
        })
        .collect()
}
