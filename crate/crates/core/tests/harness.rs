use std::path::Path;

use lsldpc::channel::{splitmix64, trial_seed, Noise, ScenarioKind};
use lsldpc::ldpc::serialize_alist;
use lsldpc::multistage::{run_cd_imsa, run_dc_imsa};
use lsldpc::sim::{
    curve_text, parse_config, run_point, run_sweep, write_csv, write_outputs, Algorithm, Scenario, ScenarioConfig,
};
use lsldpc::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gifc(n: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Gifc, n);
    cfg.h1_squared = Some(0.75);
    cfg.algorithms = vec![Algorithm::Dc, Algorithm::Cd];
    cfg.snr_db = vec![11.0];
    cfg.i_max = 200;
    cfg.max_trials = 30;
    cfg.min_frame_errors = 0;
    cfg.seed = 99;
    cfg
}

/// Straight-line version of the trial protocol, without any harness code.
fn reference_counts(scn: &Scenario, alg: Algorithm, snr: f64, trials: u64) -> (u64, u64) {
    let sched = scn.schedule(snr).unwrap();
    let (k, n) = (scn.encoder.k(), scn.n());
    let params = scn.multistage_params();
    let (mut bits, mut frames) = (0, 0);
    for t in 0..trials {
        let seed = trial_seed(scn.config.seed, t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Vec::new();
        for _ in 0..2 {
            let u: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
            c.push(scn.encoder.encode(&u).unwrap());
        }
        let mut noise = ChaCha8Rng::seed_from_u64(splitmix64(seed));
        let y: Vec<f64> = (0..n)
            .map(|j| {
                let x0 = sched.alpha(j, 0) * (1.0 - 2.0 * f64::from(c[0][j]));
                let x1 = sched.alpha(j, 1) * (1.0 - 2.0 * f64::from(c[1][j]));
                let z: f64 = StandardNormal.sample(&mut noise);
                x0 + scn.h[1] * x1 + z
            })
            .collect();
        let r = match alg {
            Algorithm::Dc => run_dc_imsa(&scn.code, &sched, &y, &scn.tau, &params).unwrap(),
            _ => run_cd_imsa(&scn.code, &sched, &y, &scn.tau, &params).unwrap(),
        };
        let e = r.v_hat[0].iter().zip(&c[0]).filter(|(a, b)| a != b).count() as u64;
        bits += e;
        frames += u64::from(e > 0);
    }
    (bits, frames)
}

#[test]
fn harness_agrees_with_reference_loop() {
    let scn = Scenario::resolve(gifc(96)).unwrap();
    let mut distinct = Vec::new();
    for alg in [Algorithm::Dc, Algorithm::Cd] {
        let rec = run_point(&scn, alg, 11.0, Execution::default()).unwrap();
        let (bits, frames) = reference_counts(&scn, alg, 11.0, 30);
        assert_eq!(rec.trials, 30);
        assert_eq!((rec.bit_errors, rec.frame_errors), (bits, frames), "{alg}");
        assert_eq!(rec.ber, bits as f64 / (30 * 96) as f64);
        assert!(frames > 0, "operating point should produce some errors");
        distinct.push(rec);
    }
    assert_ne!(distinct[0].csv_row(), distinct[1].csv_row());
}

#[test]
fn noiseless_runs_are_error_free() {
    let mut cfg = gifc(96);
    cfg.noise = Noise::Off;
    cfg.algorithms = vec![Algorithm::Dc, Algorithm::Cd, Algorithm::Cdc, Algorithm::Joint];
    cfg.snr_db = vec![20.0];
    cfg.max_trials = 5;
    let scn = Scenario::resolve(cfg).unwrap();
    for r in run_sweep(&scn, Execution::default()).unwrap() {
        assert_eq!((r.bit_errors, r.frame_errors, r.undetected), (0, 0, 0), "{}", r.algorithm);
        assert!((r.mean_iterations - 1.0).abs() < 1e-12, "{}", r.algorithm);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let mut cfg = gifc(96);
    cfg.snr_db = vec![10.0, 11.0];
    cfg.min_frame_errors = 4;
    let scn = Scenario::resolve(cfg).unwrap();
    let a = run_sweep(&scn, Execution::default()).unwrap();
    let b = run_sweep(&scn, Execution::Sequential).unwrap();
    let csv = |r: &[lsldpc::sim::BerRecord]| {
        let mut buf = Vec::new();
        write_csv(r, &mut buf).unwrap();
        buf
    };
    assert_eq!(csv(&a), csv(&b));
    for r in &a {
        assert_eq!(r.censored, r.frame_errors < 4);
    }
}

#[test]
fn one_point_grid_and_curve_files() {
    let mut cfg = gifc(96);
    cfg.snr_db = vec![12.0];
    cfg.max_trials = 3;
    let scn = Scenario::resolve(cfg).unwrap();
    let recs = run_sweep(&scn, Execution::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = write_outputs(&recs, "g", dir.path()).unwrap();
    let csv = std::fs::read_to_string(&paths[0]).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));

    let mut one = recs.clone();
    one.truncate(1);
    let mut buf = Vec::new();
    write_csv(&one, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);

    let snr_col = |text: &str| -> Vec<String> {
        text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(' ').next().unwrap().to_string()).collect()
    };
    let dc = std::fs::read_to_string(dir.path().join("g_dc.dat")).unwrap();
    let cd = std::fs::read_to_string(dir.path().join("g_cd.dat")).unwrap();
    assert_eq!(dc, curve_text(&recs, Algorithm::Dc));
    assert_eq!(snr_col(&dc), snr_col(&cd));
    assert_eq!(snr_col(&dc), vec!["12"]);
}

#[test]
fn config_file_with_alist_code() {
    let dir = tempfile::tempdir().unwrap();
    let h = lsldpc::ldpc::build_regular_code(60, 3, 6, 4).unwrap();
    std::fs::create_dir(dir.path().join("codes")).unwrap();
    std::fs::write(dir.path().join("codes/c.alist"), serialize_alist(&h)).unwrap();
    let text = "\
[scenario]
kind = twrc

[code]
alist = codes/c.alist

[decoder]
algorithms = [cd, joint]

[simulation]
snr_db = [4.0]
max_trials = 6
seed = 3
";
    let path = dir.path().join("t.conf");
    std::fs::write(&path, text).unwrap();
    let cfg = ScenarioConfig::from_file(&path).unwrap();
    assert_eq!(cfg, parse_config(text, dir.path()).unwrap());
    let scn = Scenario::resolve(cfg).unwrap();
    assert_eq!(scn.code, h);
    assert_eq!(scn.tau.row_strings(), vec!["11"]);
    let recs = run_sweep(&scn, Execution::default()).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r.trials <= 6 && r.bits_per_trial == 60));

    let missing = parse_config(&text.replace("codes/c.alist", "nope.alist"), Path::new("/nonexistent")).unwrap();
    assert!(Scenario::resolve(missing).is_err());
}

// Desk-scale two-way relay sweep: both curves fall with SNR, each point
// backed by at least 100 frame errors.
#[test]
fn two_way_relay_curves_decrease() {
    let mut cfg = ScenarioConfig::new(ScenarioKind::Twrc, 1024);
    cfg.algorithms = vec![Algorithm::Cd, Algorithm::Joint];
    cfg.i_max = 200;
    cfg.snr_db = vec![2.5, 2.75, 3.0];
    cfg.max_trials = 20_000;
    cfg.min_frame_errors = 100;
    let scn = Scenario::resolve(cfg).unwrap();
    let recs = run_sweep(&scn, Execution::default()).unwrap();
    for alg in [Algorithm::Cd, Algorithm::Joint] {
        let curve: Vec<_> = recs.iter().filter(|r| r.algorithm == alg).collect();
        assert_eq!(curve.len(), 3);
        for r in &curve {
            assert!(r.frame_errors >= 100 && !r.censored, "{alg} {} dB", r.snr_db);
        }
        for w in curve.windows(2) {
            assert!(w[1].ber <= w[0].ber, "{alg}: {} > {}", w[1].ber, w[0].ber);
        }
    }
}
