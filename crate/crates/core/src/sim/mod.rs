//! Monte-Carlo BER/FER simulation.
//!
//! Trial `t` of an experiment with master seed `m` is fully determined by
//! `s = trial_seed(m, t)`: information bits come from a ChaCha8 stream
//! seeded with `s` (user 0 first, one `random_range(0..2)` draw per bit) and
//! the noise from a stream seeded with `splitmix64(s)`. Every algorithm and
//! SNR point therefore sees the same messages and the same noise
//! realisations, only scaled differently.

mod config;
mod scenario;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{parse_config, Algorithm, CodeSource, RatioSpec, ScenarioConfig, Signaling};
pub use scenario::{scenario_defaults, Decoded, Scenario};

use crate::channel::{splitmix64, transmit_with, trial_seed, SignalingSchedule};
use crate::error::Result;
use crate::exec::Execution;
use crate::gf2::stack_symbols;

/// Trials evaluated per parallel batch. Fixed so that results do not depend
/// on the number of threads.
pub const BATCH: u64 = 32;

pub const CSV_HEADER: &str = "scenario,algorithm,snr_db,trials,bit_errors,frame_errors,ber,fer,mean_iters,seed,censored";

/// Everything that was sent in one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialData {
    pub info: Vec<Vec<u8>>,
    pub codewords: Vec<Vec<u8>>,
    /// Target words `v = τ(c)`, one per output level.
    pub target: Vec<Vec<u8>>,
    pub y: Vec<f64>,
}

pub fn generate_trial(scn: &Scenario, schedule: &SignalingSchedule, master_seed: u64, trial: u64) -> Result<TrialData> {
    let seed = trial_seed(master_seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = scn.encoder.k();
    let info: Vec<Vec<u8>> = (0..scn.config.ell)
        .map(|_| (0..k).map(|_| rng.random_range(0..2u8)).collect())
        .collect();
    let codewords = info.iter().map(|u| scn.encoder.encode(u)).collect::<Result<Vec<_>>>()?;
    let target = scn.tau.apply_rows(&codewords)?;
    let symbols = stack_symbols(&codewords);
    let y = transmit_with(schedule, &symbols, scn.config.noise, splitmix64(seed));
    Ok(TrialData {
        info,
        codewords,
        target,
        y,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub bit_errors: u64,
    pub frame_error: bool,
    pub iterations: usize,
    /// Decoder reported success but its estimate is wrong.
    pub undetected: bool,
}

pub fn run_trial(
    scn: &Scenario,
    algorithm: Algorithm,
    schedule: &SignalingSchedule,
    master_seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let data = generate_trial(scn, schedule, master_seed, trial)?;
    let dec = scn.decode(algorithm, schedule, &data.y)?;
    let bit_errors: u64 = dec
        .v_hat
        .iter()
        .zip(&data.target)
        .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count() as u64)
        .sum();
    Ok(TrialOutcome {
        bit_errors,
        frame_error: bit_errors > 0,
        iterations: dec.iterations,
        undetected: dec.success && bit_errors > 0,
    })
}

/// Result of one (algorithm, SNR) point.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    /// Target bits per trial, `ℓ′·n`.
    pub bits_per_trial: u64,
    pub ber: f64,
    pub fer: f64,
    pub mean_iterations: f64,
    pub undetected: u64,
    /// Stopped by `max_trials` before reaching `min_frame_errors`.
    pub censored: bool,
    pub seed: u64,
    /// Not written to the CSV.
    pub wall_time: f64,
}

impl BerRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.scenario,
            self.algorithm,
            self.snr_db,
            self.trials,
            self.bit_errors,
            self.frame_errors,
            self.ber,
            self.fer,
            self.mean_iterations,
            self.seed,
            u8::from(self.censored)
        )
    }
}

/// Runs trials `0, 1, 2, ...` until `min_frame_errors` frame errors have
/// been seen or `max_trials` is reached. With `min_frame_errors = 0`
/// exactly `max_trials` trials are run. Outcomes are accumulated in trial
/// order, so the record is the same for every [`Execution`].
pub fn run_point(scn: &Scenario, algorithm: Algorithm, snr_db: f64, exec: Execution) -> Result<BerRecord> {
    let start = Instant::now();
    let cfg = &scn.config;
    let schedule = scn.schedule(snr_db)?;
    let bits_per_trial = (scn.tau.out_dim() * scn.n()) as u64;

    let (mut trials, mut bit_errors, mut frame_errors, mut iters, mut undetected) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let done = |fe: u64| cfg.min_frame_errors > 0 && fe >= cfg.min_frame_errors;
    'outer: while trials < cfg.max_trials && !done(frame_errors) {
        let end = (trials + BATCH).min(cfg.max_trials);
        let outcomes = exec.map(trials..end, |t| run_trial(scn, algorithm, &schedule, cfg.seed, t));
        for o in outcomes {
            let o = o?;
            trials += 1;
            bit_errors += o.bit_errors;
            frame_errors += u64::from(o.frame_error);
            iters += o.iterations as u64;
            undetected += u64::from(o.undetected);
            if done(frame_errors) {
                break 'outer;
            }
        }
    }
    if undetected > 0 {
        log::warn!(
            "{} {algorithm} at {snr_db} dB: {undetected} undetected frame errors",
            cfg.name
        );
    }
    let record = BerRecord {
        scenario: cfg.name.clone(),
        algorithm,
        snr_db,
        trials,
        bit_errors,
        frame_errors,
        bits_per_trial,
        ber: bit_errors as f64 / (trials * bits_per_trial) as f64,
        fer: frame_errors as f64 / trials as f64,
        mean_iterations: iters as f64 / trials as f64,
        undetected,
        censored: !done(frame_errors) && cfg.min_frame_errors > 0,
        seed: cfg.seed,
        wall_time: start.elapsed().as_secs_f64(),
    };
    log::info!(
        "{} {} {} dB: {} trials, ber {:.3e}, fer {:.3e}, {:.1} s",
        record.scenario,
        record.algorithm,
        record.snr_db,
        record.trials,
        record.ber,
        record.fer,
        record.wall_time
    );
    Ok(record)
}

/// Every configured algorithm at every configured SNR, algorithm-major.
pub fn run_sweep(scn: &Scenario, exec: Execution) -> Result<Vec<BerRecord>> {
    let mut out = Vec::new();
    for &alg in &scn.config.algorithms {
        for &snr in &scn.config.snr_db {
            out.push(run_point(scn, alg, snr, exec)?);
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BerRecord], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// `snr ber` lines for one algorithm.
pub fn curve_text(records: &[BerRecord], algorithm: Algorithm) -> String {
    let mut s = String::from("# snr_db ber\n");
    for r in records.iter().filter(|r| r.algorithm == algorithm) {
        let _ = writeln!(s, "{} {}", r.snr_db, r.ber);
    }
    s
}

/// Writes `<name>.csv` and one `<name>_<algorithm>.dat` curve per algorithm
/// into `dir`. Returns the paths written.
pub fn write_outputs(records: &[BerRecord], name: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{name}.csv"));
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    std::fs::write(&csv, buf)?;
    let mut paths = vec![csv];
    let mut algs: Vec<Algorithm> = Vec::new();
    for r in records {
        if !algs.contains(&r.algorithm) {
            algs.push(r.algorithm);
        }
    }
    for alg in algs {
        let p = dir.join(format!("{name}_{alg}.dat"));
        std::fs::write(&p, curve_text(records, alg))?;
        paths.push(p);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Noise, ScenarioKind};

    fn small(kind: ScenarioKind) -> Scenario {
        let mut cfg = ScenarioConfig::new(kind, 48);
        cfg.max_trials = 40;
        cfg.min_frame_errors = 5;
        cfg.snr_db = vec![0.0, 8.0];
        Scenario::resolve(cfg).unwrap()
    }

    #[test]
    fn trial_data_is_consistent() {
        let scn = small(ScenarioKind::Twrc);
        let sched = scn.schedule(3.0).unwrap();
        let a = generate_trial(&scn, &sched, 9, 4).unwrap();
        assert_eq!(a, generate_trial(&scn, &sched, 9, 4).unwrap());
        assert_ne!(a.info, generate_trial(&scn, &sched, 9, 5).unwrap().info);
        for c in &a.codewords {
            assert!(scn.code.is_codeword(c));
        }
        let xor: Vec<u8> = a.codewords[0].iter().zip(&a.codewords[1]).map(|(x, y)| x ^ y).collect();
        assert_eq!(a.target, vec![xor]);
        // messages do not depend on SNR
        let b = generate_trial(&scn, &scn.schedule(6.0).unwrap(), 9, 4).unwrap();
        assert_eq!(a.info, b.info);
    }

    #[test]
    fn noiseless_trials_succeed() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Sm, 48);
        cfg.noise = Noise::Off;
        // equal powers would make 01 and 10 collide
        cfg.ratios = RatioSpec::Method2(1.0);
        cfg.algorithms = vec![Algorithm::Dc, Algorithm::Cd, Algorithm::Cdc, Algorithm::Joint];
        cfg.snr_db = vec![10.0];
        cfg.max_trials = 4;
        let scn = Scenario::resolve(cfg).unwrap();
        for r in run_sweep(&scn, Execution::Sequential).unwrap() {
            assert_eq!(r.bit_errors, 0, "{}", r.algorithm);
            assert_eq!(r.trials, 4);
            assert!(r.censored);
        }
    }

    #[test]
    fn stopping_rule_and_execution_independence() {
        let scn = small(ScenarioKind::Twrc);
        let seq = run_point(&scn, Algorithm::Joint, 0.0, Execution::Sequential).unwrap();
        assert_eq!(seq.frame_errors, 5);
        assert!(!seq.censored);
        assert!(seq.trials <= 40);
        let par = run_point(&scn, Algorithm::Joint, 0.0, Execution::default()).unwrap();
        assert_eq!(seq.csv_row(), par.csv_row());
    }

    #[test]
    fn csv_and_curves() {
        let rec = |alg, snr: f64, ber: f64| BerRecord {
            scenario: "x".into(),
            algorithm: alg,
            snr_db: snr,
            trials: 10,
            bit_errors: 3,
            frame_errors: 2,
            bits_per_trial: 100,
            ber,
            fer: 0.2,
            mean_iterations: 4.5,
            undetected: 0,
            censored: true,
            seed: 7,
            wall_time: 1.0,
        };
        let recs = vec![rec(Algorithm::Cd, 1.5, 0.003), rec(Algorithm::Joint, 1.5, 0.001), rec(Algorithm::Cd, 2.0, 1e-5)];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "x,cd,1.5,10,3,2,0.003,0.2,4.5,7,1");
        assert_eq!(lines.len(), 4);
        assert_eq!(curve_text(&recs, Algorithm::Cd), "# snr_db ber\n1.5 0.003\n2 0.00001\n");

        let dir = tempfile::tempdir().unwrap();
        let paths = write_outputs(&recs, "x", dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[2].ends_with("x_joint.dat"));
        assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), text);
    }
}
