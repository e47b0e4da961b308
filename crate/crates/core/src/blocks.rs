//! Long/buffer block partition of `[1, N]`, dyadic filtration scales and the
//! step approximations `phi_k` of `p(n_k x)`.

use std::f64::consts::{PI, TAU};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diophantine::exact_variance_on;
use crate::diophantine::keys::{ProductGroups, TermTable};
use crate::error::{Error, Result};
use crate::fourier::FourierFunction;
use crate::sequences::{verify_hadamard, LacunarySequence};
use crate::weights::WeightArray;

pub const DEFAULT_K: f64 = 4.0;

/// Largest dyadic scale enumerated exhaustively by [`verify_approx_lemma`].
pub const MAX_VERIFY_SCALE: u32 = 24;

/// Near-integer snapping for `K log_q h`.
const SNAP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "Ap")]
    pub ap: usize,
    #[serde(rename = "Bp")]
    pub bp: usize,
    /// `sum_{k in [A, B], k <= N} c_k^2`.
    pub mass: f64,
    /// `B <= N`.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockPartition {
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub h: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub blocks: Vec<Block>,
}

/// `ceil(K log_q h)`, with values within `1e-9` of an integer taken as that integer.
pub fn buffer_extent(h: f64, k: f64, q: f64) -> usize {
    let x = k * h.ln() / q.ln();
    let r = x.round();
    let v = if (x - r).abs() < SNAP { r } else { x.ceil() };
    v.max(0.0) as usize
}

/// Greedy partition into long blocks of mass in `[h^gamma, h^gamma + 1]`,
/// each followed by a buffer of `ceil(K log_q h) + 1` indices. Weights past
/// `N` count as 1 while growing a block.
pub fn build_partition(w: &WeightArray, gamma: f64, k: f64, q: f64) -> Result<BlockPartition> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::InvalidArgument(format!("gamma must lie in (0, 1/2), got {gamma}")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!("K must be positive, got {k}")));
    }
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q must exceed 1, got {q}")));
    }
    let h = w.h();
    if h <= 1.0 {
        return Err(Error::Degenerate(format!("h = {h} must exceed 1")));
    }
    let n = w.len();
    let target = h.powf(gamma);
    let extent = buffer_extent(h, k, q);
    let padded = |i: usize| if i <= n { w.get(i) } else { 1.0 };

    let mut blocks = Vec::new();
    let mut start = 1;
    while start <= n {
        let mut end = start;
        let mut grown = padded(start).powi(2);
        while grown < target {
            end += 1;
            grown += padded(end).powi(2);
        }
        let mass = (start..=end.min(n)).map(|i| w.get(i).powi(2)).sum();
        let ap = end + 1;
        let bp = ap + extent;
        blocks.push(Block {
            a: start,
            b: end,
            ap,
            bp,
            mass,
            complete: end <= n,
        });
        start = bp + 1;
    }
    Ok(BlockPartition {
        gamma,
        k,
        q,
        m: blocks.len(),
        h,
        n,
        blocks,
    })
}

impl BlockPartition {
    pub fn buffer_extent(&self) -> usize {
        buffer_extent(self.h, self.k, self.q)
    }

    /// Long block `i` (1-based) containing `k`.
    pub fn block_of(&self, k: usize) -> Option<usize> {
        let i = self.blocks.partition_point(|b| b.b < k);
        self.blocks.get(i).filter(|b| b.a <= k).map(|_| i + 1)
    }

    /// Two-sided bounds on `M`: `h / (h^gamma + 2 + ceil(K log_q h)) <= M <= h^(1 - gamma) + 1`.
    pub fn count_bounds(&self) -> (f64, f64) {
        let hg = self.h.powf(self.gamma);
        let lower = self.h / (hg + 2.0 + self.buffer_extent() as f64);
        let upper = self.h.powf(1.0 - self.gamma) + 1.0;
        (lower, upper)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("partition serializes")
    }
}

/// `ceil(log2 n + (K/2) log2 h)`. Exact when `n` and `h` are powers of two;
/// otherwise values within `1e-9` of an integer round up past it.
pub fn dyadic_scale(n: &BigUint, h: f64, k: f64) -> u32 {
    let bits = n.bits();
    let e = bits.saturating_sub(64);
    let top = (n >> e).to_u64().unwrap_or(u64::MAX);
    let pow2_n = n.count_ones() == 1;
    let log_n = if pow2_n {
        (bits - 1) as f64
    } else {
        e as f64 + (top as f64).log2()
    };
    let (mant, exp) = frexp(h);
    let pow2_h = mant == 0.5;
    let half_k_log_h = if pow2_h {
        k / 2.0 * (exp - 1) as f64
    } else {
        k / 2.0 * h.log2()
    };
    let s = log_n + half_k_log_h;
    let r = s.round();
    let exact = pow2_n && pow2_h && (k / 2.0).mul_add((exp - 1) as f64, -half_k_log_h) == 0.0;
    if exact {
        s.ceil() as u32
    } else if (s - r).abs() < SNAP {
        r as u32 + 1
    } else {
        s.ceil() as u32
    }
}

fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let mant = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (mant, exp - 1022)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationScale {
    /// `m(k)` for `k = 1..=N` (index `k - 1`).
    pub m: Vec<u32>,
    /// Coarse scale `m(B_{i-1})` per long block; 0 for the first.
    pub coarse: Vec<u32>,
}

impl FiltrationScale {
    pub fn m(&self, k: usize) -> u32 {
        self.m[k - 1]
    }
}

pub fn filtration_scales(seq: &LacunarySequence, part: &BlockPartition) -> Result<FiltrationScale> {
    if seq.len() != part.n {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: part.n,
        });
    }
    let m: Vec<u32> = seq.terms().iter().map(|t| dyadic_scale(t, part.h, part.k)).collect();
    let coarse = part
        .blocks
        .iter()
        .enumerate()
        .map(|(i, _)| if i == 0 { 0 } else { m[part.blocks[i - 1].b - 1] })
        .collect();
    Ok(FiltrationScale { m, coarse })
}

/// `n mod 2^bits` for `bits <= 64`.
fn low_bits(n: &BigUint, bits: u32) -> u64 {
    let low = n.iter_u64_digits().next().unwrap_or(0);
    if bits >= 64 {
        low
    } else {
        low & ((1u64 << bits) - 1)
    }
}

fn centered(phase: u64) -> f64 {
    (phase as i64) as f64 / 18_446_744_073_709_551_616.0
}

/// `n * 2^-m` as a float.
fn ratio_to_scale(n: &BigUint, m: u32) -> f64 {
    let bits = n.bits();
    let e = bits.saturating_sub(64);
    let top = (n >> e).to_u64().unwrap_or(u64::MAX) as f64;
    top * 2f64.powi(e as i32 - m as i32)
}

/// Average of `p(n t)` over the atom `[nu 2^-m, (nu + 1) 2^-m)`.
///
/// With `delta = n 2^-m` and midpoint phase `mu`, the average is
/// `sum_j sinc(j delta) (a_j cos 2 pi j mu + b_j sin 2 pi j mu)`, which avoids
/// differencing nearby primitive values.
pub fn atom_mean(p: &FourierFunction, n: &BigUint, m: u32, nu: u64) -> Result<f64> {
    if m > 63 {
        return Err(Error::GuardExceeded {
            what: "dyadic scale m",
            actual: m as u128,
            limit: 63,
        });
    }
    if nu >> m != 0 {
        return Err(Error::InvalidArgument(format!("atom {nu} outside scale {m}")));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let delta = ratio_to_scale(n, m);
    let r = low_bits(n, m + 1) as u128;
    let modulus_mask = if m + 1 == 64 { u64::MAX as u128 } else { (1u128 << (m + 1)) - 1 };
    let mid = ((((2 * nu as u128 + 1) * r) & modulus_mask) as u64) << (63 - m);
    // j delta mod 2 as a fraction of 2.
    let width = ((r & modulus_mask) as u64) << (63 - m);
    let mut acc = 0.0;
    for (j, a, b) in p.modes() {
        if a == 0.0 && b == 0.0 {
            continue;
        }
        let jj = j as u64;
        let turns = width.wrapping_mul(jj);
        if turns & (u64::MAX >> 1) == 0 {
            // j delta is an integer: whole periods.
            continue;
        }
        let sinc = (TAU * centered(turns)).sin() / (PI * jj as f64 * delta);
        let (s, c) = (TAU * centered(mid.wrapping_mul(jj))).sin_cos();
        acc += sinc * (a * c + b * s);
    }
    Ok(acc)
}

/// `E[p(n_k .) | G]` at `x`, where `G` is the dyadic partition at scale `m`.
pub fn phi_hat(p: &FourierFunction, n: &BigUint, m: u32, x: u64) -> Result<f64> {
    let nu = if m == 0 { 0 } else { x >> (64 - m) };
    atom_mean(p, n, m, nu)
}

/// How `phi_k` is recentred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Subtract the mean over the atom of `F_{i-1}` containing `x`.
    Coarse,
    /// No recentring: `phi_k = phi_hat_k`.
    Skip,
    /// Subtract the mean over the atom of `G_k` itself (gives `phi_k = 0`).
    FineAtom,
}

/// `phi_k(x)` for `k` in a long block.
pub fn phi(
    p: &FourierFunction,
    seq: &LacunarySequence,
    part: &BlockPartition,
    scales: &FiltrationScale,
    k: usize,
    x: u64,
    centering: Centering,
) -> Result<f64> {
    let i = part
        .block_of(k)
        .filter(|_| k <= seq.len())
        .ok_or_else(|| Error::InvalidArgument(format!("index {k} is not in a long block")))?;
    let n = seq.term(k);
    let fine = phi_hat(p, n, scales.m(k), x)?;
    Ok(match centering {
        Centering::Coarse => fine - phi_hat(p, n, scales.coarse[i - 1], x)?,
        Centering::Skip => fine,
        Centering::FineAtom => 0.0,
    })
}

/// `2 pi sum_j j (|a_j| + |b_j|) + (2 / (pi q^2)) sum_j (|a_j| + |b_j|) / j`.
///
/// The first term bounds the fine-atom oscillation, the second the coarse
/// mean once the buffer separates `n_k` from `n_{B_{i-1}}` by `q^2 h^K`.
pub fn approx_constant(p: &FourierFunction, q: f64) -> f64 {
    let inv: f64 = p.modes().map(|(j, a, b)| (a.abs() + b.abs()) / j as f64).sum();
    TAU * p.derivative_bound() + 2.0 / (PI * q * q) * inv
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaConfig {
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    pub samples: usize,
    pub seed: u64,
    pub centering: Centering,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            gamma: 0.4,
            k: 1.0,
            q: 2.0,
            samples: 10_000,
            seed: 0,
            centering: Centering::Coarse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxLemmaReport {
    pub config: LemmaConfig,
    #[serde(rename = "M")]
    pub m: usize,
    pub h: f64,
    pub indices_checked: usize,
    pub max_scale: u32,
    /// (i): every `phi_k` is constant on each atom of scale `m(k)`.
    pub fine_constant: bool,
    /// (ii): largest sampled `|phi_k(x) - p(n_k x)|`.
    pub sup_error: f64,
    pub sup_bound: f64,
    pub constant: f64,
    pub sup_ok: bool,
    /// (iii): largest absolute mean of `phi_k` over a coarse atom.
    pub max_coarse_mean: f64,
    pub coarse_ok: bool,
    pub passed: bool,
}

pub const COARSE_TOL: f64 = 1e-12;

/// Exhaustive tiny-scale check of the three approximation properties.
pub fn verify_approx_lemma(
    seq: &LacunarySequence,
    w: &WeightArray,
    p: &FourierFunction,
    cfg: LemmaConfig,
) -> Result<ApproxLemmaReport> {
    if seq.len() != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    let q_exact = BigRational::from_f64(cfg.q).ok_or_else(|| Error::InvalidArgument("q not finite".into()))?;
    if seq.len() > 1 && !verify_hadamard(seq, &q_exact)?.holds {
        return Err(Error::InvalidArgument(format!("sequence gap ratio is below q = {}", cfg.q)));
    }
    let part = build_partition(w, cfg.gamma, cfg.k, cfg.q)?;
    let scales = filtration_scales(seq, &part)?;
    let ks: Vec<usize> = (1..=seq.len()).filter(|&k| part.block_of(k).is_some()).collect();
    let max_scale = ks.iter().map(|&k| scales.m(k)).max().unwrap_or(0);
    if max_scale > MAX_VERIFY_SCALE {
        return Err(Error::GuardExceeded {
            what: "dyadic scale m(k)",
            actual: max_scale as u128,
            limit: MAX_VERIFY_SCALE as u128,
        });
    }

    let mut fine_constant = true;
    let mut max_coarse_mean: f64 = 0.0;
    for &k in &ks {
        let m = scales.m(k);
        let mc = scales.coarse[part.block_of(k).expect("long block") - 1];
        let per_coarse = 1u64 << (m - mc);
        let mut sum = 0.0;
        for nu in 0..1u64 << m {
            let left = if m == 0 { 0 } else { nu << (64 - m) };
            let right = left | (u64::MAX >> m);
            let v = phi(p, seq, &part, &scales, k, left, cfg.centering)?;
            let v_right = phi(p, seq, &part, &scales, k, right, cfg.centering)?;
            fine_constant &= v.to_bits() == v_right.to_bits();
            sum += v;
            if (nu + 1) % per_coarse == 0 {
                max_coarse_mean = max_coarse_mean.max((sum / per_coarse as f64).abs());
                sum = 0.0;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sup_error: f64 = 0.0;
    for _ in 0..cfg.samples {
        let x: u64 = rng.random();
        for &k in &ks {
            let phase = x.wrapping_mul(low_bits(seq.term(k), 64));
            let err = (phi(p, seq, &part, &scales, k, x, cfg.centering)? - p.eval_fixed(phase)).abs();
            sup_error = sup_error.max(err);
        }
    }
    let constant = approx_constant(p, cfg.q);
    let sup_bound = constant * part.h.powf(-cfg.k / 2.0);
    let sup_ok = sup_error <= sup_bound;
    let coarse_ok = max_coarse_mean <= COARSE_TOL;
    Ok(ApproxLemmaReport {
        config: cfg,
        m: part.m,
        h: part.h,
        indices_checked: ks.len(),
        max_scale,
        fine_constant,
        sup_error,
        sup_bound,
        constant,
        sup_ok,
        max_coarse_mean,
        coarse_ok,
        passed: fine_constant && sup_ok && coarse_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockVariances {
    /// `||sum_{k in Delta_i} c_k p(n_k x)||_2^2` per long block.
    pub w: Vec<f64>,
    pub s_m_sq: f64,
    pub full: f64,
    /// `full - s_m_sq`.
    pub difference: f64,
    /// `sum_{k in buffers, k <= N} c_k^2`.
    pub buffer_mass: f64,
    /// `sum c_u c_v` over ordered resonant pairs `j n_k = j' n_l`, `(j, k) != (j', l)`,
    /// not both in one long block.
    pub cross_mass: f64,
    /// `(1/2) max |a_j a_j' + b_j b_j'| (D buffer_mass + cross_mass) >= |difference|`.
    pub bound: f64,
}

pub fn block_variances(
    seq: &LacunarySequence,
    w: &WeightArray,
    p: &FourierFunction,
    part: &BlockPartition,
) -> Result<BlockVariances> {
    if seq.len() != w.len() || part.n != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    let n = seq.len();
    let mut blocks_w = Vec::with_capacity(part.blocks.len());
    for b in &part.blocks {
        blocks_w.push(exact_variance_on(seq, w, p, b.a..=b.b.min(n))?);
    }
    let s_m_sq: f64 = blocks_w.iter().sum();
    let full = exact_variance_on(seq, w, p, 1..=n)?;

    let buffer_mass: f64 = part
        .blocks
        .iter()
        .flat_map(|b| b.ap..=b.bp.min(n))
        .map(|k| w.get(k).powi(2))
        .sum();

    let js: Vec<u32> = p
        .modes()
        .filter(|&(_, a, b)| a != 0.0 || b != 0.0)
        .map(|(j, _, _)| j as u32)
        .collect();
    let t = TermTable::new(seq);
    let groups = ProductGroups::build(&t, (1..=n).filter(|&k| w.get(k) > 0.0), &js);
    let mut cross_mass = 0.0;
    for members in &groups.members {
        for (i, u) in members.iter().enumerate() {
            for v in &members[i + 1..] {
                let same = matches!((part.block_of(u.k), part.block_of(v.k)), (Some(x), Some(y)) if x == y);
                if !same {
                    cross_mass += 2.0 * w.get(u.k) * w.get(v.k);
                }
            }
        }
    }
    let mut coef: f64 = 0.0;
    for (_, a, b) in p.modes() {
        for (_, a2, b2) in p.modes() {
            coef = coef.max((a * a2 + b * b2).abs());
        }
    }
    let bound = 0.5 * coef * (js.len() as f64 * buffer_mass + cross_mass);
    Ok(BlockVariances {
        w: blocks_w,
        s_m_sq,
        full,
        difference: full - s_m_sq,
        buffer_mass,
        cross_mass,
        bound,
    })
}
