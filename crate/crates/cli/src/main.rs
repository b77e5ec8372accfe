use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lsldpc::channel::{splitmix64, transmit_with, trial_seed};
use lsldpc::gf2::stack_symbols;
use lsldpc::joint::{check_node_update, JointDecoder};
use lsldpc::ldpc::{build_tree_code, Encoder, SpaDecoder};
use lsldpc::likelihood::{LikelihoodTable, SymbolPmf};
use lsldpc::oracle::{direct_xor_convolution, enumerate_marginals, exact_marginals, EnumeratedCodebook, MAX_ENUMERATION_BITS};
use lsldpc::sim::{run_sweep, write_outputs, Scenario, ScenarioConfig};
use lsldpc::{BinaryLinearMap, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Thread count for the trial pool; the only environment variable read.
const THREADS_VAR: &str = "LSLDPC_THREADS";

#[derive(Parser)]
#[command(name = "lsldpc", version, about = "Simulate decoders for superposed LDPC codewords")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured sweep and write `<name>.csv` plus one curve file per algorithm.
    Simulate {
        config: PathBuf,
        /// Output directory, overriding `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Validate a config and print the resolved maps and powers.
    Check { config: PathBuf },
    /// Compare the message-passing decoders with brute force on a small tree code.
    Oracle {
        config: PathBuf,
        /// Random received words per SNR point.
        #[arg(long, default_value_t = 5)]
        words: u64,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let cfg = ScenarioConfig::from_file(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Scenario::resolve(cfg).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(runtime_err)
}

fn simulate(path: &Path, out: Option<PathBuf>, sequential: bool) -> Result<(), Failure> {
    let scn = load(path)?;
    let exec = if sequential { Execution::Sequential } else { Execution::default() };
    let records = run_sweep(&scn, exec).map_err(runtime_err)?;
    println!("algorithm  snr_db  trials  frame_errors  ber  fer  censored");
    for r in &records {
        println!(
            "{:<9}  {:>6}  {:>6}  {:>12}  {:.3e}  {:.3e}  {}",
            r.algorithm, r.snr_db, r.trials, r.frame_errors, r.ber, r.fer, r.censored
        );
    }
    let dir = out.unwrap_or_else(|| scn.config.output_dir.clone());
    for p in write_outputs(&records, &scn.config.name, &dir).map_err(runtime_err)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn check(path: &Path) -> Result<(), Failure> {
    let scn = load(path)?;
    print!("{}", scn.summary());
    println!("ok");
    Ok(())
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn oracle(path: &Path, words: u64) -> Result<(), Failure> {
    const N: usize = 12;
    let cfg = ScenarioConfig::from_file(path).map_err(config_err)?;
    let ell = cfg.ell;
    let k = (MAX_ENUMERATION_BITS / ell).min(8);
    if k == 0 || k >= N {
        return Err(Failure::Config(format!("oracle needs 1 <= ell <= {MAX_ENUMERATION_BITS}, got {ell}")));
    }
    let code = build_tree_code(N, N - k, cfg.seed).map_err(runtime_err)?;
    let scn = Scenario::with_code(cfg, code).map_err(config_err)?;
    let enc = Encoder::new(&scn.code);
    let cb = EnumeratedCodebook::new(&scn.code).map_err(runtime_err)?;
    let id1 = BinaryLinearMap::identity(1).map_err(runtime_err)?;
    println!("tree code n = {N}, k = {}, ell = {ell}, tau = {}", enc.k(), scn.tau);

    let (mut joint_worst, mut spa_worst, mut wht_worst) = (0.0f64, 0.0f64, 0.0f64);
    for &snr in &scn.config.snr_db {
        let sched = scn.schedule(snr).map_err(config_err)?;
        let (mut joint_dev, mut spa_dev) = (0.0f64, 0.0f64);
        for w in 0..words {
            let seed = trial_seed(scn.config.seed, w);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = (0..ell)
                .map(|_| enc.encode(&(0..enc.k()).map(|_| rng.random_range(0..2u8)).collect::<Vec<_>>()))
                .collect::<lsldpc::Result<Vec<_>>>()
                .map_err(runtime_err)?;
            let y = transmit_with(&sched, &stack_symbols(&c), scn.config.noise, splitmix64(seed));

            let exact = exact_marginals(&cb, ell, &sched, &y, &scn.tau).map_err(runtime_err)?;
            let mut dec = JointDecoder::new(&scn.code, LikelihoodTable::channel(&sched, &y)).map_err(runtime_err)?;
            for _ in 0..2 * N {
                dec.iterate();
            }
            let post = dec.posteriors().project(&scn.tau).map_err(runtime_err)?;
            joint_dev = joint_dev.max(max_dev(post.as_slice(), exact.as_slice()));

            let prior: Vec<f64> = (0..N).map(|_| rng.random_range(-4.0..4.0)).collect();
            let m = enumerate_marginals(&[cb.words()], &id1, |t, s| if s == 0 { 0.5 * prior[t] } else { -0.5 * prior[t] })
                .map_err(runtime_err)?;
            let spa = SpaDecoder::new(&scn.code).decode_with(&prior, 2 * N, false);
            let p0: Vec<f64> = spa.posterior.iter().map(|l| 1.0 / (1.0 + (-l).exp())).collect();
            let e0: Vec<f64> = (0..N).map(|t| m.row(t)[0]).collect();
            spa_dev = spa_dev.max(max_dev(&p0, &e0));

            for bits in 1..=3usize {
                let inc: Vec<SymbolPmf> = (0..5)
                    .map(|_| SymbolPmf::new((0..1 << bits).map(|_| rng.random_range(0.0..1.0)).collect()))
                    .collect::<lsldpc::Result<_>>()
                    .map_err(runtime_err)?;
                let fast = check_node_update(&inc, 0);
                let slow = direct_xor_convolution(&inc[1..]).map_err(runtime_err)?;
                wht_worst = wht_worst.max(max_dev(fast.probs(), slow.probs()));
            }
        }
        println!("snr {snr:>6} dB  joint vs exact {joint_dev:.3e}  spa vs exact {spa_dev:.3e}");
        joint_worst = joint_worst.max(joint_dev);
        spa_worst = spa_worst.max(spa_dev);
    }
    println!("max deviation  joint {joint_worst:.3e}  spa {spa_worst:.3e}  transform check {wht_worst:.3e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .init();

    let result = init_threads().and_then(|()| match cli.command {
        Command::Simulate {
            config,
            out,
            sequential,
        } => simulate(&config, out, sequential),
        Command::Check { config } => check(&config),
        Command::Oracle { config, words } => oracle(&config, words),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("config error: {m}"),
                Failure::Runtime(m) => eprintln!("error: {m}"),
            }
            log::debug!("exiting with status {}", f.code());
            ExitCode::from(f.code())
        }
    }
}
