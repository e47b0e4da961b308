mod common;

use common::{random_hadamard, random_weights};
use lacunary::blocks::{block_variances, build_partition, filtration_scales, verify_approx_lemma, LemmaConfig};
use lacunary::sequences::make_geometric;
use lacunary::{FourierFunction, WeightArray, WeightScheme};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> FourierFunction {
    let deg = rng.random_range(1..=max_degree);
    let mut a: Vec<f64> = (0..deg).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..deg).map(|_| rng.random_range(-1.0..1.0)).collect();
    a[0] += 0.1;
    FourierFunction::new(a, b, "random").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_invariants(seed in any::<u64>(), n in 20usize..3000, gamma in 0.05f64..0.49, k in 0.5f64..4.0, q in 1.2f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = WeightArray::new(random_weights(&mut rng, n), "random").unwrap();
        prop_assume!(w.h() > 1.0);
        let part = build_partition(&w, gamma, k, q).unwrap();
        let hg = w.h().powf(gamma);
        let ext = part.buffer_extent();
        prop_assert_eq!(part.blocks[0].a, 1);
        for b in &part.blocks {
            prop_assert!(b.a <= b.b && b.ap == b.b + 1 && b.bp == b.ap + ext);
            prop_assert!(b.a <= n);
            if b.complete {
                prop_assert!(hg <= b.mass && b.mass <= hg + 1.0);
            }
        }
        for pair in part.blocks.windows(2) {
            prop_assert_eq!(pair[1].a, pair[0].bp + 1);
        }
        prop_assert!(part.blocks.last().unwrap().bp >= n);
        let (lo, hi) = part.count_bounds();
        prop_assert!(lo <= part.m as f64 && part.m as f64 <= hi);
        for i in 1..=n {
            let inside = part.blocks.iter().position(|b| b.a <= i && i <= b.b).map(|p| p + 1);
            prop_assert_eq!(part.block_of(i), inside);
        }
    }

    #[test]
    fn block_variance_gap_is_bounded(seed in any::<u64>(), n in 8usize..120, gamma in 0.2f64..0.45, k in 1.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_hadamard(&mut rng, n);
        let w = WeightArray::new(random_weights(&mut rng, n), "random").unwrap();
        prop_assume!(w.h() > 1.0);
        let p = random_poly(&mut rng, 3);
        let part = build_partition(&w, gamma, k, 1.5).unwrap();
        let v = block_variances(&seq, &w, &p, &part).unwrap();
        prop_assert!(v.difference.abs() <= v.bound + 1e-9 * v.full.max(1.0));
        prop_assert!((v.s_m_sq - v.w.iter().sum::<f64>()).abs() < 1e-12 * v.s_m_sq.max(1.0));
        prop_assert!(v.w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn scales_increase_along_the_sequence(seed in any::<u64>(), n in 8usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_hadamard(&mut rng, n);
        let w = WeightArray::new(random_weights(&mut rng, n), "random").unwrap();
        prop_assume!(w.h() > 1.0);
        let part = build_partition(&w, 0.3, 1.0, 1.5).unwrap();
        let s = filtration_scales(&seq, &part).unwrap();
        for k in 1..n {
            prop_assert!(s.m(k) <= s.m(k + 1));
            // 2^m(k) dominates n_k.
            prop_assert!(u64::from(s.m(k)) >= seq.term(k).bits() - 1);
        }
    }

    #[test]
    fn approximation_checks_pass_on_dyadic_sequences(seed in any::<u64>(), n in 4usize..=12, k in prop::sample::select(vec![1.0, 2.0])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&mut rng, 3);
        let cfg = LemmaConfig { k, samples: 400, seed, ..LemmaConfig::default() };
        let w = WeightArray::builtin(WeightScheme::Isotropic, n).unwrap();
        let r = verify_approx_lemma(&make_geometric(2, n).unwrap(), &w, &p, cfg).unwrap();
        prop_assert!(r.fine_constant);
        prop_assert!(r.coarse_ok, "coarse mean {}", r.max_coarse_mean);
        prop_assert!(r.sup_ok, "sup error {} > {}", r.sup_error, r.sup_bound);
    }
}
