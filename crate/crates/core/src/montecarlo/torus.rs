//! Exact phases `{n_k x}` for dyadic `x = u / 2^B`.

use std::cell::OnceCell;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::sequences::LacunarySequence;

/// Terms with more signed digits than this use a full big-integer product.
pub const SPARSE_DIGITS: usize = 64;

/// Largest supported precision in bits.
pub const MAX_BITS: u32 = 1 << 22;

/// `max(bitlen(n_N) + 64, 128)` rounded up to a multiple of 64.
pub fn required_bits(seq: &LacunarySequence) -> u32 {
    let need = (seq.max_bits() + 64).max(128);
    need.div_ceil(64) as u32 * 64
}

#[derive(Clone, Debug)]
enum Plan {
    /// Non-adjacent form: `n = sum sign * 2^exp`.
    Sparse(Vec<(bool, u32)>),
    Dense,
}

#[derive(Clone, Debug)]
struct TermPlan {
    plan: Plan,
    /// `n mod 2^B`.
    reduced: BigUint,
}

/// Per-sequence data for computing `floor(2^64 {n_k u / 2^B})`.
#[derive(Clone, Debug)]
pub struct PhasePlan {
    bits: u32,
    terms: Vec<TermPlan>,
}

/// Non-adjacent form from `3n xor n`; `None` past `limit` digits.
fn naf(n: &BigUint, limit: usize) -> Option<Vec<(bool, u32)>> {
    let three = n * 3u32;
    let x = &three ^ n;
    let mut digits = Vec::new();
    for (w, word) in x.iter_u64_digits().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros();
            word &= word - 1;
            let pos = w as u64 * 64 + b as u64;
            if pos == 0 {
                continue;
            }
            if digits.len() == limit {
                return None;
            }
            digits.push((three.bit(pos), (pos - 1) as u32));
        }
    }
    Some(digits)
}

/// Bits `[lo, lo + 128)` of `u`, zero below bit 0.
fn window(u: &[u64], lo: i64) -> u128 {
    let limb = |i: i64| -> u64 {
        if i < 0 {
            0
        } else {
            u.get(i as usize).copied().unwrap_or(0)
        }
    };
    if lo <= -128 {
        return 0;
    }
    if lo < 0 {
        let low = limb(0) as u128 | (limb(1) as u128) << 64;
        return low << (-lo) as u32;
    }
    let idx = lo / 64;
    let s = (lo % 64) as u32;
    let (w0, w1, w2) = (limb(idx) as u128, limb(idx + 1) as u128, limb(idx + 2) as u128);
    if s == 0 {
        w0 | w1 << 64
    } else {
        (w0 >> s) | (w1 << (64 - s)) | (w2 << (128 - s))
    }
}

fn to_biguint(u: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(u.len() * 2);
    for &w in u {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    BigUint::new(digits)
}

impl PhasePlan {
    pub fn new(seq: &LacunarySequence, bits: u32) -> Result<Self> {
        if !bits.is_multiple_of(64) || bits < 128 {
            return Err(Error::InvalidArgument(format!(
                "precision must be a multiple of 64 and at least 128, got {bits}"
            )));
        }
        if bits > MAX_BITS {
            return Err(Error::GuardExceeded {
                what: "precision bits",
                actual: bits as u128,
                limit: MAX_BITS as u128,
            });
        }
        if (bits as u64) < seq.max_bits() + 64 {
            return Err(Error::InvalidArgument(format!(
                "precision {bits} below bitlen(n_N) + 64 = {}",
                seq.max_bits() + 64
            )));
        }
        let mask = (BigUint::from(1u32) << bits) - 1u32;
        let terms = seq
            .terms()
            .iter()
            .map(|n| TermPlan {
                plan: naf(n, SPARSE_DIGITS).map_or(Plan::Dense, Plan::Sparse),
                reduced: n & &mask,
            })
            .collect();
        Ok(PhasePlan { bits, terms })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn limbs(&self) -> usize {
        self.bits as usize / 64
    }

    /// Phase of term `k` (1-based) at `x = u / 2^B`, as a 64-bit fraction.
    pub fn phase(&self, k: usize, u: &[u64]) -> u64 {
        let cache = OnceCell::new();
        self.phase_cached(k, u, &cache)
    }

    pub(crate) fn phase_cached(&self, k: usize, u: &[u64], big: &OnceCell<BigUint>) -> u64 {
        let term = &self.terms[k - 1];
        if let Plan::Sparse(digits) = &term.plan {
            let b = self.bits as i64;
            let mut acc: u128 = 0;
            for &(positive, e) in digits {
                let e = e as i64;
                if e >= b {
                    continue;
                }
                let w = window(u, b - 128 - e);
                acc = if positive { acc.wrapping_add(w) } else { acc.wrapping_sub(w) };
            }
            // Discarded low parts shift the window by less than one unit per digit.
            let low = acc as u64;
            let t = digits.len() as u64;
            if low >= t && low <= u64::MAX - t {
                return (acc >> 64) as u64;
            }
        }
        let u_big = big.get_or_init(|| to_biguint(u));
        self.exact_phase(&term.reduced, u_big)
    }

    fn exact_phase(&self, n: &BigUint, u: &BigUint) -> u64 {
        let prod = n * u;
        let top = &prod >> (self.bits - 64);
        top.iter_u64_digits().next().unwrap_or(0)
    }

    /// Exact phase through a full product, for cross-checking.
    pub fn exact(&self, k: usize, u: &[u64]) -> u64 {
        self.exact_phase(&self.terms[k - 1].reduced, &to_biguint(u))
    }

    pub fn is_sparse(&self, k: usize) -> bool {
        matches!(self.terms[k - 1].plan, Plan::Sparse(_))
    }
}

/// `floor(2^64 {n u / 2^B})` computed from rationals, independent of [`PhasePlan`].
pub fn phase_oracle(n: &BigUint, u: &BigUint, bits: u32) -> u64 {
    let one = BigUint::from(1u32) << bits;
    let frac = (n * u) % &one;
    (frac << 64u32 >> bits).to_u64().expect("fraction below one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{make_erdos_fortet, make_geometric, make_superlacunary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn naf_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let bits: u32 = rng.random_range(1..400);
            let n = (BigUint::from(1u32) << bits) + rng.random::<u64>();
            let digits = naf(&n, usize::MAX).unwrap();
            let (mut pos, mut neg) = (BigUint::from(0u32), BigUint::from(0u32));
            for &(p, e) in &digits {
                if p {
                    pos += BigUint::from(1u32) << e;
                } else {
                    neg += BigUint::from(1u32) << e;
                }
            }
            assert_eq!(pos - neg, n);
            for w in digits.windows(2) {
                assert!(w[1].1 > w[0].1 + 1, "adjacent digits");
            }
        }
        let m = BigUint::from(1u32) << 50u32;
        assert_eq!(naf(&(m.clone() - 1u32), 8).unwrap().len(), 2);
        assert_eq!(naf(&m, 8).unwrap(), vec![(true, 50)]);
    }

    #[test]
    fn required_bits_rounding() {
        assert_eq!(required_bits(&make_geometric(2, 4).unwrap()), 128);
        assert_eq!(required_bits(&make_geometric(2, 64).unwrap()), 192);
        assert_eq!(required_bits(&make_superlacunary(40).unwrap()), 896);
    }

    fn random_u(rng: &mut ChaCha8Rng, limbs: usize) -> Vec<u64> {
        (0..limbs).map(|_| rng.random()).collect()
    }

    #[test]
    fn phases_match_rational_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let seqs = [
            make_geometric(2, 900).unwrap(),
            make_erdos_fortet(900).unwrap(),
            make_superlacunary(40).unwrap(),
            make_geometric(3, 500).unwrap(),
        ];
        for seq in &seqs {
            let plan = PhasePlan::new(seq, required_bits(seq)).unwrap();
            for _ in 0..250 {
                let u = random_u(&mut rng, plan.limbs());
                let k = rng.random_range(1..=seq.len());
                let oracle = phase_oracle(seq.term(k), &to_biguint(&u), plan.bits());
                assert_eq!(plan.phase(k, &u), oracle);
            }
        }
    }

    #[test]
    fn adversarial_carries() {
        let seq = make_erdos_fortet(300).unwrap();
        let plan = PhasePlan::new(&seq, required_bits(&seq)).unwrap();
        let l = plan.limbs();
        let patterns: Vec<Vec<u64>> = vec![
            vec![u64::MAX; l],
            vec![0; l],
            (0..l).map(|i| if i == 0 { 1 } else { 0 }).collect(),
            (0..l).map(|i| if i + 1 == l { 1 << 63 } else { 0 }).collect(),
            (0..l).map(|i| if i % 2 == 0 { u64::MAX } else { 0 }).collect(),
            (0..l).map(|_| 0x8000_0000_0000_0001).collect(),
        ];
        for u in &patterns {
            let ub = to_biguint(u);
            for k in 1..=seq.len() {
                assert_eq!(plan.phase(k, u), phase_oracle(seq.term(k), &ub, plan.bits()), "k = {k}");
            }
        }
    }

    #[test]
    fn dense_terms_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut terms = Vec::new();
        let mut cur = BigUint::from(0u32);
        for _ in 0..40 {
            let limbs: Vec<u32> = (0..24).map(|_| rng.random()).collect();
            cur = cur * 3u32 + BigUint::new(limbs) + 1u32;
            terms.push(cur.clone());
        }
        let seq = LacunarySequence::from_terms(terms, "dense").unwrap();
        let plan = PhasePlan::new(&seq, required_bits(&seq)).unwrap();
        assert!(!plan.is_sparse(40));
        for _ in 0..100 {
            let u = random_u(&mut rng, plan.limbs());
            let k = rng.random_range(1..=40);
            assert_eq!(plan.phase(k, &u), phase_oracle(seq.term(k), &to_biguint(&u), plan.bits()));
        }
    }

    #[test]
    fn precision_guard() {
        let seq = make_geometric(2, 100).unwrap();
        assert!(PhasePlan::new(&seq, 128).is_err());
        assert!(PhasePlan::new(&seq, 200).is_err());
        assert!(PhasePlan::new(&seq, 192).is_ok());
    }

    #[test]
    fn quarter_point() {
        let seq = make_geometric(2, 3).unwrap();
        let plan = PhasePlan::new(&seq, 128).unwrap();
        let u = [0, 1u64 << 62];
        let phases: Vec<u64> = (1..=3).map(|k| plan.phase(k, &u)).collect();
        assert_eq!(phases, vec![1 << 63, 0, 0]);
    }
}
