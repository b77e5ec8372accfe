use lsldpc::channel::SignalingSchedule;
use lsldpc::gf2::{stack_symbols, BinaryLinearMap};
use lsldpc::joint::{check_node_update, run_joint};
use lsldpc::ldpc::{build_regular_code, build_tree_code, Encoder, SpaDecoder, SparseParityCheck};
use lsldpc::likelihood::{f_o, f_tau, f_tau_tilde, partition_distance, Constellation, LikelihoodTable, SymbolPmf};
use lsldpc::multistage::{run_cd_imsa, run_cdc_imsa, run_dc_imsa, MultistageParams};
use lsldpc::oracle::{direct_xor_convolution, exact_marginals, EnumeratedCodebook};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn small_code() -> &'static (SparseParityCheck, Encoder) {
    static CODE: OnceLock<(SparseParityCheck, Encoder)> = OnceLock::new();
    CODE.get_or_init(|| {
        let h = build_regular_code(48, 3, 6, 11).unwrap();
        let e = Encoder::new(&h);
        (h, e)
    })
}

fn random_codewords(rng: &mut ChaCha8Rng, ell: usize) -> Vec<Vec<u8>> {
    let (_, enc) = small_code();
    (0..ell)
        .map(|_| {
            let u: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
            enc.encode(&u).unwrap()
        })
        .collect()
}

fn map_strategy(out_max: usize) -> impl Strategy<Value = BinaryLinearMap> {
    (1usize..=4, 1usize..=out_max)
        .prop_flat_map(|(d, o)| proptest::collection::vec(0usize..1 << d, o).prop_map(move |r| (d, r)))
        .prop_map(|(d, rows)| BinaryLinearMap::new(d, rows).unwrap())
}

fn invertible_strategy() -> impl Strategy<Value = BinaryLinearMap> {
    map_strategy(4)
        .prop_filter_map("singular", |m| {
            let sq = BinaryLinearMap::new(m.in_dim(), (0..m.in_dim()).map(|i| m.rows().get(i).copied().unwrap_or(1 << i)).collect()).ok()?;
            (sq.rank() == sq.in_dim()).then_some(sq)
        })
}

fn random_pmf(rng: &mut ChaCha8Rng, bits: usize) -> SymbolPmf {
    let w: Vec<f64> = (0..1 << bits).map(|_| rng.random_range(0.0..1.0f64).powi(3)).collect();
    SymbolPmf::new(w).unwrap()
}

fn is_valid(p: &SymbolPmf) -> bool {
    p.probs().iter().all(|&x| x >= 0.0 && x.is_finite()) && (p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12
}

fn random_constellation(rng: &mut ChaCha8Rng, bits: usize) -> Constellation {
    let h: Vec<f64> = (0..bits).map(|_| rng.random_range(0.2..2.0)).collect();
    Constellation::new(
        (0..1usize << bits)
            .map(|s| (0..bits).map(|i| if (s >> i) & 1 == 0 { h[i] } else { -h[i] }).sum())
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn linear_images_of_codewords_are_codewords(seed in any::<u64>(), tau in map_strategy(4)) {
        let (h, _) = small_code();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_codewords(&mut rng, tau.in_dim());
        for row in tau.apply_rows(&c).unwrap() {
            prop_assert!(h.is_codeword(&row));
        }
    }

    #[test]
    fn invertible_images_of_codewords_are_codewords(seed in any::<u64>(), tt in invertible_strategy()) {
        let (h, _) = small_code();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_codewords(&mut rng, tt.in_dim());
        let w = tt.apply_rows(&c).unwrap();
        for row in &w {
            prop_assert!(h.is_codeword(row));
        }
        prop_assert_eq!(tt.invert().unwrap().apply_rows(&w).unwrap(), c);
    }

    #[test]
    fn encoding_gives_codewords_for_generated_codes(seed in 0u64..200, half in 4usize..40) {
        let h = build_regular_code(2 * half, 3, 6, seed).unwrap();
        let enc = Encoder::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
        prop_assert!(h.is_codeword(&enc.encode(&u).unwrap()));
    }

    #[test]
    fn likelihood_kernels(seed in any::<u64>(), bits in 1usize..=3, y in -6.0f64..6.0, tau in map_strategy(3), tt in invertible_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cons = random_constellation(&mut rng, bits);
        let p = f_o(y, &cons);
        prop_assert!(is_valid(&p));
        let same = f_tau(&p, &BinaryLinearMap::identity(bits).unwrap()).unwrap();
        prop_assert_eq!(same.probs(), p.probs());

        if tau.in_dim() == bits {
            let proj = f_tau(&p, &tau).unwrap();
            prop_assert!(is_valid(&proj));
            let classes = tau.preimage_classes();
            let total: f64 = classes.iter().flatten().map(|&s| p.probs()[s]).sum();
            for (v, class) in classes.iter().enumerate() {
                let mass: f64 = class.iter().map(|&s| p.probs()[s]).sum();
                prop_assert!((proj.probs()[v] - mass / total).abs() < 1e-12);
            }
        }
        if tt.in_dim() == bits {
            let r = f_tau_tilde(&p, &tt).unwrap();
            prop_assert!(is_valid(&r));
            prop_assert!((r.entropy() - p.entropy()).abs() < 1e-12);
        }

        let neg = Constellation::new(cons.points().iter().map(|x| -x).collect()).unwrap();
        for level in 0..bits {
            let a = partition_distance(&cons, level, None).unwrap();
            let b = partition_distance(&neg, level, None).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn transform_domain_check_matches_direct_sum(seed in any::<u64>(), bits in 1usize..=3, degree in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inc: Vec<SymbolPmf> = (0..degree).map(|_| random_pmf(&mut rng, bits)).collect();
        let exclude = rng.random_range(0..degree);
        let fast = check_node_update(&inc, exclude);
        let others: Vec<SymbolPmf> = inc.iter().enumerate().filter(|&(i, _)| i != exclude).map(|(_, p)| p.clone()).collect();
        let slow = direct_xor_convolution(&others).unwrap();
        prop_assert!(is_valid(&fast));
        for (a, b) in fast.probs().iter().zip(slow.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_marginals_are_normalized(seed in 0u64..1000) {
        let h = build_tree_code(10, 5, seed).unwrap();
        let cb = EnumeratedCodebook::new(&h).unwrap();
        let s = SignalingSchedule::constant(&[0.4, 0.6], 4.0, 10, vec![1.0, 1.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..10).map(|_| rng.random_range(-3.0..3.0)).collect();
        let m = exact_marginals(&cb, 2, &s, &y, &BinaryLinearMap::identity(2).unwrap()).unwrap();
        for t in 0..10 {
            prop_assert!((m.row(t).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

fn noisy_trial(rng: &mut ChaCha8Rng, ell: usize, sched: &SignalingSchedule) -> Vec<f64> {
    let c = random_codewords(rng, ell);
    stack_symbols(&c)
        .iter()
        .enumerate()
        .map(|(t, &s)| sched.signal(t, s) + rng.random_range(-1.0..1.0) * 1.2)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multistage_reductions(seed in any::<u64>(), ell in 2usize..=3, p in 3.0f64..12.0) {
        let (h, _) = small_code();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ratios: Vec<f64> = match ell { 2 => vec![0.3, 0.7], _ => vec![0.12, 0.27, 0.61] };
        let sched = SignalingSchedule::constant(&ratios, p, 48, vec![1.0; ell]).unwrap();
        let y = noisy_trial(&mut rng, ell, &sched);
        let id = BinaryLinearMap::identity(ell).unwrap();
        let params = MultistageParams { k_max: 5, i_max: 10, ..Default::default() };
        let dc = run_dc_imsa(h, &sched, &y, &id, &params).unwrap();
        prop_assert_eq!(&run_cd_imsa(h, &sched, &y, &id, &params).unwrap(), &dc);
        prop_assert_eq!(&run_cdc_imsa(h, &sched, &y, &id, &id, &params).unwrap(), &dc);
        if dc.success {
            for row in &dc.v_hat {
                prop_assert!(h.is_codeword(row));
            }
        }
    }

    #[test]
    fn one_user_collapses_to_binary_spa(seed in any::<u64>(), p in 0.5f64..3.0) {
        let (h, _) = small_code();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = SignalingSchedule::constant(&[1.0], p, 48, vec![1.0]).unwrap();
        let y = noisy_trial(&mut rng, 1, &sched);
        let a = p.sqrt();
        let prior: Vec<f64> = y.iter().map(|&v| 2.0 * a * v).collect();
        let id = BinaryLinearMap::identity(1).unwrap();
        let spa = SpaDecoder::new(h).decode(&prior, 20);
        let params = MultistageParams { k_max: 3, i_max: 20, ..Default::default() };
        for r in [
            run_dc_imsa(h, &sched, &y, &id, &params).unwrap(),
            run_cd_imsa(h, &sched, &y, &id, &params).unwrap(),
            run_cdc_imsa(h, &sched, &y, &id, &id, &params).unwrap(),
        ] {
            prop_assert_eq!(&r.v_hat[0], &spa.hard);
        }
        let table = LikelihoodTable::channel(&sched, &y);
        prop_assert_eq!(table.bits(), 1);
        // the joint decoder stops once the hard decision is a codeword, as SPA does
        let j = run_joint(h, &sched, &y, &id, 20).unwrap();
        prop_assert_eq!(&j.v_hat[0], &spa.hard);
    }
}
