#![allow(dead_code)]

use std::collections::BTreeMap;

use lacunary::LacunarySequence;
use num_bigint::BigUint;
use rand::Rng;

/// Brute-force `(L, argmax_c, homogeneous off-diagonal mass)` over all `(k, l, j, j')`.
pub fn naive_dioph(terms: &[BigUint], c: &[f64], d: u32) -> (f64, Option<BigUint>, f64) {
    let mut mass: BTreeMap<BigUint, f64> = BTreeMap::new();
    let mut homog = 0.0;
    for (k, nk) in terms.iter().enumerate() {
        for (l, nl) in terms.iter().enumerate() {
            let w = c[k] * c[l];
            if w == 0.0 {
                continue;
            }
            for j in 1..=d {
                for jp in 1..=d {
                    let x = nk * j;
                    let y = nl * jp;
                    if x > y {
                        *mass.entry(x - y).or_insert(0.0) += w;
                    } else if x == y && k != l {
                        homog += w;
                    }
                }
            }
        }
    }
    let l = mass.values().cloned().fold(0.0, f64::max);
    let argmax = mass
        .iter()
        .find(|(_, &m)| m >= l * (1.0 - 1e-12))
        .map(|(c, _)| c.clone());
    (l, argmax, homog)
}

/// A strictly increasing sequence with every ratio at least 3/2, mixing
/// exact small-ratio steps (which create resonances) with random gaps.
pub fn random_hadamard<R: Rng>(rng: &mut R, n: usize) -> LacunarySequence {
    let mut terms = Vec::with_capacity(n);
    let mut cur = BigUint::from(rng.random_range(1u32..8));
    for _ in 0..n {
        terms.push(cur.clone());
        cur = match rng.random_range(0..6) {
            0 => &cur * 2u32,
            1 => &cur * 3u32,
            2 => &cur * 2u32 + 1u32,
            3 if &cur % 2u32 == BigUint::from(0u32) => &cur * 3u32 / 2u32,
            4 if cur >= BigUint::from(2u32) => &cur * 2u32 - 1u32,
            _ => (&cur * 3u32 + 1u32) / 2u32 + rng.random_range(0u32..1000),
        };
    }
    LacunarySequence::from_terms(terms, "random").unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random::<f64>() })
        .collect();
    c[0] = c[0].max(0.5);
    c
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
