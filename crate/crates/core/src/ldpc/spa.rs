use super::SparseParityCheck;

/// Magnitude at which LLRs are clipped before entering the tanh rule and
/// after leaving atanh.
pub const LLR_CLIP: f64 = 38.0;

/// Result of one [`SpaDecoder::decode`] call. LLRs use `ln(P(0)/P(1))`.
#[derive(Clone, Debug)]
pub struct SpaOutput {
    pub hard: Vec<u8>,
    /// Posterior minus prior, i.e. the sum of incoming check messages.
    pub extrinsic: Vec<f64>,
    pub posterior: Vec<f64>,
    /// Final check-to-variable messages in edge order.
    pub check_to_var: Vec<f64>,
    /// True iff `hard` satisfies every check.
    pub converged: bool,
    pub iterations: usize,
}

/// Flooding-schedule binary sum-product decoder. Holds no per-decode state,
/// so one instance can serve concurrent decodes.
#[derive(Clone, Copy, Debug)]
pub struct SpaDecoder<'a> {
    h: &'a SparseParityCheck,
}

impl<'a> SpaDecoder<'a> {
    pub fn new(h: &'a SparseParityCheck) -> Self {
        Self { h }
    }

    pub fn code(&self) -> &'a SparseParityCheck {
        self.h
    }

    /// Decodes with early stopping on a zero syndrome.
    pub fn decode(&self, prior: &[f64], max_iters: usize) -> SpaOutput {
        self.decode_with(prior, max_iters, true)
    }

    /// Runs up to `max_iters` iterations; with `early_stop` false all
    /// iterations run regardless of the syndrome.
    pub fn decode_with(&self, prior: &[f64], max_iters: usize, early_stop: bool) -> SpaOutput {
        let h = self.h;
        let n = h.n_cols();
        assert_eq!(prior.len(), n, "prior length");
        assert!(max_iters >= 1, "max_iters must be at least 1");

        let e_count = h.edge_count();
        let mut c2v = vec![0.0; e_count];
        let mut v2c = vec![0.0; e_count];
        let mut posterior = prior.to_vec();
        let mut hard = vec![0u8; n];
        let mut tanhs = Vec::with_capacity(h.max_row_degree());
        let mut suffix = Vec::with_capacity(h.max_row_degree() + 1);
        let mut iterations = 0;
        let mut converged = false;

        for _ in 0..max_iters {
            iterations += 1;
            for (j, &pj) in prior.iter().enumerate() {
                let edges = h.col_edges(j);
                for &e in edges {
                    v2c[e] = pj + edges.iter().filter(|&&o| o != e).map(|&o| c2v[o]).sum::<f64>();
                }
            }

            for i in 0..h.n_rows() {
                let range = h.row_edges(i);
                tanhs.clear();
                tanhs.extend(v2c[range.clone()].iter().map(|&m| (0.5 * m.clamp(-LLR_CLIP, LLR_CLIP)).tanh()));
                suffix.clear();
                suffix.resize(tanhs.len() + 1, 1.0);
                for p in (0..tanhs.len()).rev() {
                    suffix[p] = suffix[p + 1] * tanhs[p];
                }
                let mut prefix = 1.0;
                for (p, e) in range.enumerate() {
                    let others: f64 = prefix * suffix[p + 1];
                    c2v[e] = (2.0 * odd_atanh(others)).clamp(-LLR_CLIP, LLR_CLIP);
                    prefix *= tanhs[p];
                }
            }

            for j in 0..n {
                posterior[j] = prior[j] + h.col_edges(j).iter().map(|&e| c2v[e]).sum::<f64>();
                hard[j] = u8::from(posterior[j] < 0.0);
            }
            converged = h.is_codeword(&hard);
            if early_stop && converged {
                break;
            }
        }

        let extrinsic = (0..n)
            .map(|j| h.col_edges(j).iter().map(|&e| c2v[e]).sum())
            .collect();
        SpaOutput {
            hard,
            extrinsic,
            posterior,
            check_to_var: c2v,
            converged,
            iterations,
        }
    }
}

/// `atanh` evaluated on `|x|` so that the check rule is exactly odd.
#[inline]
fn odd_atanh(x: f64) -> f64 {
    x.abs().atanh().copysign(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::{build_regular_code, Encoder};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_check_tanh_rule() {
        let h = SparseParityCheck::from_dense(&[vec![1, 1]]).unwrap();
        let out = SpaDecoder::new(&h).decode(&[1.0, -0.2], 5);
        let expected = 2.0 * (-0.1f64).tanh().atanh();
        assert!((expected + 0.2).abs() < 1e-15);
        assert!((out.extrinsic[0] - expected).abs() < 1e-12);
        assert!((out.extrinsic[1] - 1.0).abs() < 1e-12);
        assert_eq!(out.hard, vec![0, 0]);
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn saturated_codeword_converges_immediately() {
        let h = build_regular_code(48, 3, 6, 2).unwrap();
        let enc = Encoder::new(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2)).collect();
        let c = enc.encode(&u).unwrap();
        let prior: Vec<f64> = c.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
        let out = SpaDecoder::new(&h).decode(&prior, 50);
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        assert_eq!(out.hard, c);
        assert!(out.extrinsic.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn converged_implies_zero_syndrome() {
        let h = build_regular_code(96, 3, 6, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let prior: Vec<f64> = (0..96).map(|_| rng.random_range(-1.0..3.0)).collect();
            let out = SpaDecoder::new(&h).decode(&prior, 20);
            assert_eq!(out.converged, h.is_codeword(&out.hard));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn negating_priors_negates_outputs(seed in 0u64..500, iters in 1usize..8) {
            let h = build_regular_code(24, 3, 6, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let prior: Vec<f64> = (0..24).map(|_| rng.random_range(-6.0..6.0)).collect();
            let neg: Vec<f64> = prior.iter().map(|x| -x).collect();
            let dec = SpaDecoder::new(&h);
            let a = dec.decode_with(&prior, iters, false);
            let b = dec.decode_with(&neg, iters, false);
            for (x, y) in a.posterior.iter().zip(&b.posterior) {
                prop_assert_eq!(*x, -*y);
            }
            for (x, y) in a.check_to_var.iter().zip(&b.check_to_var) {
                prop_assert_eq!(*x, -*y);
            }
        }
    }
}
