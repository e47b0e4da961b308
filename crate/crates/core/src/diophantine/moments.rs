use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};

use super::keys::{ProductGroups, TermTable};
use crate::error::{Error, Result};
use crate::fourier::FourierFunction;
use crate::sequences::LacunarySequence;
use crate::weights::WeightArray;

/// Largest number of products `j * n_k` grouped by the exact variance.
pub const MAX_VARIANCE_PRODUCTS: usize = 1 << 24;

/// Largest `|block|^4 (2D)^4` accepted by [`fourth_moment_exact`].
pub const MAX_FOURTH_TUPLES: u128 = 1_000_000_000;

fn active_modes(f: &FourierFunction) -> Vec<u32> {
    f.modes()
        .filter(|&(_, a, b)| a != 0.0 || b != 0.0)
        .map(|(j, _, _)| j as u32)
        .collect()
}

/// `||sum_{k in ks} c_k f(n_k x)||_2^2`, exact up to the final floating sums.
///
/// Products `j n_k` are grouped by exact value; each group `P` contributes
/// `(A_P^2 + B_P^2) / 2` with `A_P = sum c_k a_j`, `B_P = sum c_k b_j`.
pub fn exact_variance_on(
    seq: &LacunarySequence,
    w: &WeightArray,
    f: &FourierFunction,
    ks: impl IntoIterator<Item = usize>,
) -> Result<f64> {
    if seq.len() != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    let js = active_modes(f);
    let ks: Vec<usize> = ks.into_iter().filter(|&k| w.get(k) != 0.0).collect();
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > seq.len()) {
        return Err(Error::InvalidArgument(format!("index {bad} outside 1..={}", seq.len())));
    }
    let products = ks.len().saturating_mul(js.len());
    if products > MAX_VARIANCE_PRODUCTS {
        return Err(Error::GuardExceeded {
            what: "products j * n_k",
            actual: products as u128,
            limit: MAX_VARIANCE_PRODUCTS as u128,
        });
    }
    let t = TermTable::new(seq);
    let groups = ProductGroups::build(&t, ks, &js);
    let mut v = 0.0;
    for members in &groups.members {
        let (mut a, mut b) = (0.0, 0.0);
        for s in members {
            let c = w.get(s.k);
            a += c * f.a(s.j as usize);
            b += c * f.b(s.j as usize);
        }
        v += 0.5 * (a * a + b * b);
    }
    Ok(v)
}

/// `||S_N||_2^2` over all indices.
pub fn exact_variance(seq: &LacunarySequence, w: &WeightArray, f: &FourierFunction) -> Result<f64> {
    exact_variance_on(seq, w, f, 1..=seq.len())
}

/// `exact >= delta^2 * h`, the non-degeneracy condition on the variance.
pub fn variance_lower_bound_holds(exact: f64, h: f64, delta: f64) -> bool {
    exact >= delta * delta * h
}

/// Asymptotic variance of `f(q^k x)` sums:
/// `||f||^2 + 2 sum_{k=1}^{k_max} (1/2) sum_j (a_j a_{q^k j} + b_j b_{q^k j})`.
pub fn kac_variance(f: &FourierFunction, q: u64, k_max: u32) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("q must be >= 2, got {q}")));
    }
    let deg = f.degree() as u64;
    let mut needed = 0u32;
    let mut power = 1u64;
    while power < deg {
        power = power.saturating_mul(q);
        needed += 1;
    }
    if k_max < needed {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} below ceil(log_q D) = {needed}"
        )));
    }
    f.norm_l2()?;
    let mut sum: f64 = f.modes().map(|(_, a, b)| 0.5 * (a * a + b * b)).sum();
    let mut step = 1u64;
    for _ in 0..k_max {
        step = match step.checked_mul(q) {
            Some(s) if s <= deg => s,
            _ => break,
        };
        let mut corr = 0.0;
        for j in 1..=deg / step {
            let jj = (j * step) as usize;
            corr += f.a(j as usize) * f.a(jj) + f.b(j as usize) * f.b(jj);
        }
        sum += corr;
    }
    Ok(sum)
}

type Complex = (f64, f64);

fn cmul(x: Complex, y: Complex) -> Complex {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

/// Exact `E[T^4]` for `T = sum_{k in block} c_k f(n_k x)`.
///
/// `T` is written as `sum_xi g_xi e(xi x)` over signed frequencies; then
/// `E[T^4] = sum_s G(s) G(-s)` with `G(s) = sum_{xi + xi' = s} g_xi g_xi'`.
pub fn fourth_moment_exact(
    seq: &LacunarySequence,
    w: &WeightArray,
    f: &FourierFunction,
    block: std::ops::RangeInclusive<usize>,
) -> Result<f64> {
    if seq.len() != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    let (lo, hi) = (*block.start(), *block.end());
    if lo == 0 || hi > seq.len() || lo > hi {
        return Err(Error::InvalidArgument(format!("block {lo}..={hi} outside 1..={}", seq.len())));
    }
    let per = (hi - lo + 1) as u128 * 2 * f.degree() as u128;
    let tuples = per.saturating_pow(4);
    if tuples > MAX_FOURTH_TUPLES {
        return Err(Error::GuardExceeded {
            what: "|block|^4 (2D)^4",
            actual: tuples,
            limit: MAX_FOURTH_TUPLES,
        });
    }

    let mut coeffs: BTreeMap<BigInt, Complex> = BTreeMap::new();
    for k in lo..=hi {
        let c = w.get(k);
        if c == 0.0 {
            continue;
        }
        for (j, a, b) in f.modes() {
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let xi = BigInt::from(seq.term(k) * BigUint::from(j));
            let plus = coeffs.entry(xi.clone()).or_insert((0.0, 0.0));
            plus.0 += c * a / 2.0;
            plus.1 -= c * b / 2.0;
            let minus = coeffs.entry(-xi).or_insert((0.0, 0.0));
            minus.0 += c * a / 2.0;
            minus.1 += c * b / 2.0;
        }
    }
    let list: Vec<(BigInt, Complex)> = coeffs.into_iter().collect();
    let mut pair_sums: BTreeMap<BigInt, Complex> = BTreeMap::new();
    for (x, gx) in &list {
        for (y, gy) in &list {
            let e = pair_sums.entry(x + y).or_insert((0.0, 0.0));
            let p = cmul(*gx, *gy);
            e.0 += p.0;
            e.1 += p.1;
        }
    }
    let mut total = 0.0;
    for (s, g) in &pair_sums {
        if let Some(h) = pair_sums.get(&-s) {
            total += cmul(*g, *h).0;
        }
    }
    Ok(total)
}
