mod common;

use common::{naive_dioph, random_hadamard, random_weights, rel_close};
use lacunary::diophantine::{count_dioph, semitriv_check};
use lacunary::sequences::{make_erdos_fortet, make_geometric, make_superlacunary};
use lacunary::weights::WeightScheme;
use lacunary::WeightArray;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_quadruple_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..12 {
        let n = 5 + trial * 7;
        let seq = random_hadamard(&mut rng, n);
        let c = random_weights(&mut rng, n);
        let w = WeightArray::new(c.clone(), "r").unwrap();
        for d in 1..=3 {
            let r = count_dioph(&seq, &w, d).unwrap();
            let (l, argmax, homog) = naive_dioph(seq.terms(), &c, d);
            assert!(rel_close(r.l, l, 1e-12), "trial {trial} d {d}: {} vs {l}", r.l);
            assert_eq!(r.argmax_c, argmax, "trial {trial} d {d}");
            assert!(rel_close(r.homog_offdiag, homog, 1e-12));
            assert!(r.l <= (d * d) as f64 * w.h() * (1.0 + 1e-12));
            assert!(r.homog_offdiag <= (d * d) as f64 * w.h() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn oracle_on_builtins() {
    for seq in [
        make_erdos_fortet(40).unwrap(),
        make_geometric(2, 40).unwrap(),
        make_geometric(3, 30).unwrap(),
        make_superlacunary(25).unwrap(),
    ] {
        let n = seq.len();
        let w = WeightArray::builtin(WeightScheme::Isotropic, n).unwrap();
        for d in 1..=3 {
            let r = count_dioph(&seq, &w, d).unwrap();
            let (l, argmax, homog) = naive_dioph(seq.terms(), w.values(), d);
            assert_eq!((r.l, r.argmax_c.clone(), r.homog_offdiag), (l, argmax, homog));
        }
    }
}

#[test]
fn monotone_in_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let seq = random_hadamard(&mut rng, 60);
        let w = WeightArray::new(random_weights(&mut rng, 60), "r").unwrap();
        let mut prev = (0.0, 0.0);
        for d in 1..=5 {
            let r = count_dioph(&seq, &w, d).unwrap();
            assert!(r.l >= prev.0 && r.l_star >= prev.1);
            prev = (r.l, r.l_star);
        }
    }
}

#[test]
fn superlacunary_saturates() {
    let at = |n: usize| {
        let w = WeightArray::builtin(WeightScheme::Isotropic, n).unwrap();
        count_dioph(&make_superlacunary(n).unwrap(), &w, 2).unwrap().l_star
    };
    let small = at(100);
    assert_eq!(small, at(1000));
    assert!(small <= 6.0);
}

#[test]
fn semitrivial_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let seq = random_hadamard(&mut rng, 40);
        let w = WeightArray::new(random_weights(&mut rng, 40), "r").unwrap();
        let r = semitriv_check(&seq, &w, 3).unwrap();
        assert!(r.holds, "ratio {}", r.ratio);
        assert_eq!(r.pairs.len(), 9);
    }
}
