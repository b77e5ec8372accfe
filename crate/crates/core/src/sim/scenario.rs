use std::fmt::Write as _;

use crate::channel::{cyclic_schedule, method2_allocation, snr_to_power, ScenarioKind, SignalingSchedule};
use crate::error::{Error, Result};
use crate::gf2::BinaryLinearMap;
use crate::joint::run_joint;
use crate::ldpc::{build_regular_code, parse_alist, Encoder, SparseParityCheck};
use crate::multistage::{run_cd_imsa, run_cdc_imsa, run_dc_imsa, MultistageParams};

use super::config::{Algorithm, CodeSource, RatioSpec, ScenarioConfig, Signaling};

/// Target map `τ` of a scenario and the relabelling `τ̃` used by the
/// examples for it, if any.
pub fn scenario_defaults(kind: ScenarioKind, ell: usize) -> Result<(BinaryLinearMap, Option<BinaryLinearMap>)> {
    let rows = |r: &[&str]| BinaryLinearMap::from_row_strings(r);
    Ok(match (kind, ell) {
        (ScenarioKind::Sm, 2) => (BinaryLinearMap::identity(2)?, Some(rows(&["11", "01"])?)),
        (ScenarioKind::Sm, 3) => (BinaryLinearMap::identity(3)?, Some(rows(&["111", "010", "001"])?)),
        (ScenarioKind::Sm | ScenarioKind::Mac, l) if (1..=crate::gf2::MAX_LEVELS).contains(&l) => {
            (BinaryLinearMap::identity(l)?, None)
        }
        (ScenarioKind::Gifc, 2) => (rows(&["10"])?, Some(rows(&["10", "11"])?)),
        (ScenarioKind::Twrc, 2) => (rows(&["11"])?, None),
        (ScenarioKind::MultiwayRelay, 3) => (rows(&["110", "101"])?, None),
        (kind, ell) => return Err(Error::Scenario(format!("no defaults for {kind} with {ell} users"))),
    })
}

/// Decoder output reduced to what the harness needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub v_hat: Vec<Vec<u8>>,
    pub success: bool,
    pub iterations: usize,
}

/// A validated configuration with its code, maps and power split resolved.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub code: SparseParityCheck,
    pub encoder: Encoder,
    pub tau: BinaryLinearMap,
    pub tau_tilde: Option<BinaryLinearMap>,
    pub ratios: Vec<f64>,
    pub h: Vec<f64>,
}

impl Scenario {
    pub fn resolve(config: ScenarioConfig) -> Result<Self> {
        let code = match &config.code {
            CodeSource::Alist(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
                parse_alist(&text)?
            }
            &CodeSource::Regular {
                n,
                col_deg,
                row_deg,
                seed,
            } => build_regular_code(n, col_deg, row_deg, seed)?,
        };
        Self::with_code(config, code)
    }

    /// Like [`resolve`](Self::resolve) but with the code supplied directly.
    pub fn with_code(config: ScenarioConfig, code: SparseParityCheck) -> Result<Self> {
        let ell = config.ell;
        let (default_tau, default_tilde) = scenario_defaults(config.scenario, ell)?;
        let tau = config.tau.clone().unwrap_or(default_tau);
        if tau.in_dim() != ell {
            return Err(Error::Scenario(format!("tau takes {} inputs but ell = {ell}", tau.in_dim())));
        }
        let tau_tilde = config.tau_tilde.clone().or(default_tilde);
        if let Some(tt) = &tau_tilde {
            if !tt.is_square() || tt.in_dim() != ell {
                return Err(Error::Scenario(format!("tau_tilde must be {ell}x{ell}")));
            }
        }
        if config.algorithms.contains(&Algorithm::Cdc) {
            match &tau_tilde {
                None => return Err(Error::Scenario("algorithm cdc needs tau_tilde".into())),
                Some(tt) => {
                    tt.invert()?;
                }
            }
        }

        let ratios = match &config.ratios {
            RatioSpec::Equal => vec![1.0 / ell as f64; ell],
            RatioSpec::Explicit(r) => r.clone(),
            RatioSpec::Method2(delta) => method2_allocation(ell, *delta).1,
        };
        if ratios.len() != ell {
            return Err(Error::Scenario(format!("{} ratios for {ell} users", ratios.len())));
        }
        let h = match (&config.h, config.h1_squared) {
            (Some(_), Some(_)) => return Err(Error::Scenario("give either h or h1_squared, not both".into())),
            (Some(h), None) => h.clone(),
            (None, Some(h1sq)) if ell == 2 && h1sq >= 0.0 => vec![1.0, h1sq.sqrt()],
            (None, Some(_)) => return Err(Error::Scenario("h1_squared needs two users and a nonnegative value".into())),
            (None, None) if config.scenario == ScenarioKind::Gifc => {
                return Err(Error::Scenario("gifc needs h1_squared or h".into()))
            }
            (None, None) => vec![1.0; ell],
        };
        if h.len() != ell {
            return Err(Error::Scenario(format!("{} channel coefficients for {ell} users", h.len())));
        }
        if config.snr_db.is_empty() || config.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Scenario("snr_db must be a nonempty list of finite values".into()));
        }
        if config.algorithms.is_empty() {
            return Err(Error::Scenario("no algorithms selected".into()));
        }
        if config.k_max == 0 || config.i_max == 0 || config.joint_k_max == 0 || config.max_trials == 0 {
            return Err(Error::Scenario("iteration limits and max_trials must be positive".into()));
        }

        let encoder = Encoder::new(&code);
        if encoder.k() == 0 {
            return Err(Error::Scenario("code has dimension 0".into()));
        }
        let scenario = Self {
            config,
            code,
            encoder,
            tau,
            tau_tilde,
            ratios,
            h,
        };
        // validate power conversion and energy constraints once up front
        for &snr in &scenario.config.snr_db {
            scenario.schedule(snr)?;
        }
        Ok(scenario)
    }

    pub fn n(&self) -> usize {
        self.code.n_cols()
    }

    /// `r = ℓk/n` in bits per dimension.
    pub fn rate(&self) -> f64 {
        (self.config.ell * self.encoder.k()) as f64 / self.n() as f64
    }

    pub fn total_power(&self, snr_db: f64) -> Result<f64> {
        let kind = self.config.scenario;
        snr_to_power(kind, kind.uses_normalized_snr().then(|| self.rate()), snr_db)
    }

    pub fn schedule(&self, snr_db: f64) -> Result<SignalingSchedule> {
        self.schedule_for_length(snr_db, self.n())
    }

    pub fn schedule_for_length(&self, snr_db: f64, n: usize) -> Result<SignalingSchedule> {
        let p = self.total_power(snr_db)?;
        match self.config.signaling {
            Signaling::Constant => SignalingSchedule::constant(&self.ratios, p, n, self.h.clone()),
            Signaling::Cyclic => cyclic_schedule(&self.ratios, p, n, self.h.clone()),
        }
    }

    pub fn multistage_params(&self) -> MultistageParams {
        MultistageParams {
            k_max: self.config.k_max,
            i_max: self.config.i_max,
            spa_early_stop: true,
            strict: self.config.strict,
        }
    }

    pub fn decode(&self, algorithm: Algorithm, schedule: &SignalingSchedule, y: &[f64]) -> Result<Decoded> {
        let p = self.multistage_params();
        let ms = |r: crate::multistage::MultistageResult| Decoded {
            v_hat: r.v_hat,
            success: r.success,
            iterations: r.iterations,
        };
        match algorithm {
            Algorithm::Dc => run_dc_imsa(&self.code, schedule, y, &self.tau, &p).map(ms),
            Algorithm::Cd => run_cd_imsa(&self.code, schedule, y, &self.tau, &p).map(ms),
            Algorithm::Cdc => {
                let tt = self
                    .tau_tilde
                    .as_ref()
                    .ok_or_else(|| Error::Scenario("algorithm cdc needs tau_tilde".into()))?;
                run_cdc_imsa(&self.code, schedule, y, &self.tau, tt, &p).map(ms)
            }
            Algorithm::Joint => run_joint(&self.code, schedule, y, &self.tau, self.config.joint_k_max).map(|r| Decoded {
                v_hat: r.v_hat,
                success: r.success,
                iterations: r.iterations,
            }),
        }
    }

    /// Human-readable summary of the resolved settings.
    pub fn summary(&self) -> String {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "name        {}", c.name);
        let _ = writeln!(s, "scenario    {} (ell = {})", c.scenario, c.ell);
        let _ = writeln!(s, "code        n = {}, m = {}, k = {}, rate r = {:.4}", self.n(), self.code.n_rows(), self.encoder.k(), self.rate());
        let _ = writeln!(s, "tau         {}", self.tau);
        match &self.tau_tilde {
            Some(tt) => {
                let _ = writeln!(s, "tau_tilde   {tt}");
            }
            None => {
                let _ = writeln!(s, "tau_tilde   none");
            }
        }
        let _ = writeln!(s, "signaling   {:?}", c.signaling);
        let _ = writeln!(s, "ratios      {:?}", self.ratios);
        let _ = writeln!(s, "h           {:?}", self.h);
        let names: Vec<&str> = c.algorithms.iter().map(|a| a.name()).collect();
        let _ = writeln!(s, "algorithms  {}", names.join(", "));
        let _ = writeln!(
            s,
            "limits      k_max = {}, i_max = {}, joint_k_max = {}, strict = {}",
            c.k_max, c.i_max, c.joint_k_max, c.strict
        );
        let _ = writeln!(
            s,
            "stopping    max_trials = {}, min_frame_errors = {}, seed = {}",
            c.max_trials, c.min_frame_errors, c.seed
        );
        for &snr in &c.snr_db {
            if let Ok(p) = self.total_power(snr) {
                let powers: Vec<String> = self.ratios.iter().map(|r| format!("{:.4}", r * p)).collect();
                let _ = writeln!(s, "snr {snr:>6} dB  P = {p:.4}  per-user [{}]", powers.join(", "));
            }
        }
        s
    }
}
