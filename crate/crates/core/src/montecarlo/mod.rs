//! Seeded sampling of `S_N(x) = sum c_k f(n_k x)` at dyadic points with exact
//! phase reduction, plus distribution statistics.
//!
//! Sample `i` draws `x = u / 2^B` from ChaCha8 with the run seed and stream
//! `i`, so values do not depend on how samples are spread over threads.

mod stats;
mod torus;

use std::cell::OnceCell;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use stats::{ks_statistic, mixture_cdf_ef, moments, normal_cdf, pairwise_sum, quantile_sorted, Moments};
pub use torus::{phase_oracle, required_bits, PhasePlan, MAX_BITS, SPARSE_DIGITS};

use crate::diophantine::exact_variance;
use crate::error::{Error, Result};
use crate::fourier::FourierFunction;
use crate::sequences::LacunarySequence;
use crate::weights::WeightArray;

/// Quantile levels reported in summaries.
pub const QUANTILES: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusSampler {
    pub bits: u32,
    pub seed: u64,
    pub count: usize,
}

impl TorusSampler {
    /// Uses the smallest admissible precision for `seq`.
    pub fn for_sequence(seq: &LacunarySequence, seed: u64, count: usize) -> Self {
        TorusSampler {
            bits: required_bits(seq),
            seed,
            count,
        }
    }

    /// The limbs of `u` for sample `index`, least significant first.
    pub fn draw(&self, index: u64, out: &mut [u64]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        for limb in out.iter_mut() {
            *limb = rng.next_u64();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Unnormalized sums.
    Raw,
    /// Divide by `||S_N||_2` from the exact variance.
    ExactVariance,
    /// Divide by `||f||_2 sqrt(h)`.
    SigmaSqrtH,
    /// Divide by the sample standard deviation.
    Empirical,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Raw => "raw",
            Normalization::ExactVariance => "exact_variance",
            Normalization::SigmaSqrtH => "sigma_sqrt_h",
            Normalization::Empirical => "empirical",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "exact_variance" => Ok(Normalization::ExactVariance),
            "sigma_sqrt_h" => Ok(Normalization::SigmaSqrtH),
            "empirical" => Ok(Normalization::Empirical),
            _ => Err(Error::InvalidArgument(format!("unknown normalization {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub values: Vec<f64>,
    pub normalization: Normalization,
    /// Divisor applied to the raw sums.
    pub scale: f64,
    pub seed: u64,
    pub n: usize,
    pub bits: u32,
    /// Content hash of the generating configuration, if any.
    pub digest: String,
}

/// Value of the weighted sum at `x = u / 2^B`.
pub fn sum_at(plan: &PhasePlan, w: &WeightArray, f: &FourierFunction, u: &[u64]) -> f64 {
    let big = OnceCell::new();
    let mut acc = 0.0;
    for (k, &c) in w.values().iter().enumerate() {
        if c != 0.0 {
            acc += c * f.eval_fixed(plan.phase_cached(k + 1, u, &big));
        }
    }
    acc
}

/// Draws `sampler.count` unnormalized values of `S_N` on `threads` workers.
pub fn sample_sum(
    seq: &LacunarySequence,
    w: &WeightArray,
    f: &FourierFunction,
    sampler: TorusSampler,
    threads: usize,
) -> Result<SimulationResult> {
    if seq.len() != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    let plan = PhasePlan::new(seq, sampler.bits)?;
    let limbs = plan.limbs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let values: Vec<f64> = pool.install(|| {
        (0..sampler.count as u64)
            .into_par_iter()
            .map_init(
                || vec![0u64; limbs],
                |u, i| {
                    sampler.draw(i, u);
                    sum_at(&plan, w, f, u)
                },
            )
            .collect()
    });
    Ok(SimulationResult {
        values,
        normalization: Normalization::Raw,
        scale: 1.0,
        seed: sampler.seed,
        n: seq.len(),
        bits: sampler.bits,
        digest: String::new(),
    })
}

/// Divisor for `mode`; [`Normalization::Empirical`] uses `values`.
pub fn normalization_scale(
    mode: Normalization,
    seq: &LacunarySequence,
    w: &WeightArray,
    f: &FourierFunction,
    values: &[f64],
) -> Result<f64> {
    let scale = match mode {
        Normalization::Raw => 1.0,
        Normalization::ExactVariance => exact_variance(seq, w, f)?.sqrt(),
        Normalization::SigmaSqrtH => f.norm_l2()? * w.h().sqrt(),
        Normalization::Empirical => moments(values)?.variance.sqrt(),
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Degenerate(format!("normalization {mode} has scale {scale}")));
    }
    Ok(scale)
}

/// Rescales unnormalized values by the divisor for `mode`.
pub fn normalize(
    result: SimulationResult,
    mode: Normalization,
    seq: &LacunarySequence,
    w: &WeightArray,
    f: &FourierFunction,
) -> Result<SimulationResult> {
    if result.normalization != Normalization::Raw {
        return Err(Error::InvalidArgument("values are already normalized".into()));
    }
    let scale = normalization_scale(mode, seq, w, f, &result.values)?;
    let values = result.values.iter().map(|v| v / scale).collect();
    Ok(SimulationResult {
        values,
        normalization: mode,
        scale,
        ..result
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub count: usize,
    pub bits: u32,
    pub normalization: Normalization,
    pub scale: f64,
    pub mean: f64,
    pub var: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub ks_normal: f64,
    pub quantiles: Vec<(f64, f64)>,
    pub config_digest: String,
}

impl SimulationResult {
    pub fn summary(&self) -> Result<Summary> {
        let m = moments(&self.values)?;
        let mut sorted = self.values.clone();
        if sorted.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("sample contains NaN".into()));
        }
        sorted.sort_by(f64::total_cmp);
        Ok(Summary {
            n: self.n,
            seed: self.seed,
            count: self.values.len(),
            bits: self.bits,
            normalization: self.normalization,
            scale: self.scale,
            mean: m.mean,
            var: m.variance,
            skewness: m.skewness,
            kurtosis: m.kurtosis,
            ks_normal: stats::ks_sorted(&sorted, normal_cdf),
            quantiles: QUANTILES.iter().map(|&p| (p, quantile_sorted(&sorted, p))).collect(),
            config_digest: self.digest.clone(),
        })
    }

    /// Values as CSV: a digest comment, a `value` header and one value per row
    /// in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 22 + 64);
        out.push_str(&format!("# config_digest={}\n", self.digest));
        out.push_str(&format!("# normalization={} seed={} N={}\n", self.normalization, self.seed, self.n));
        out.push_str("value\n");
        for v in &self.values {
            out.push_str(&format!("{v:?}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_csv().as_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Raw little-endian bytes of the values.
    pub fn value_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

impl Summary {
    pub fn to_json(&self) -> serde_json::Value {
        let quantiles: serde_json::Map<String, serde_json::Value> = self
            .quantiles
            .iter()
            .map(|(p, q)| (format!("{}%", (p * 100.0).round()), json!(q)))
            .collect();
        json!({
            "N": self.n,
            "seed": self.seed,
            "count": self.count,
            "bits": self.bits,
            "normalization": self.normalization,
            "scale": self.scale,
            "mean": self.mean,
            "var": self.var,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "ks_normal": self.ks_normal,
            "quantiles": quantiles,
            "config_digest": self.config_digest,
        })
    }
}

/// Reads values written by [`SimulationResult::to_csv`].
pub fn parse_values_csv(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut header = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header {
            if line != "value" {
                return Err(Error::parse(i + 1, "expected header \"value\""));
            }
            header = true;
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::parse(i + 1, format!("bad value {line:?}")))?;
        values.push(v);
    }
    if !header {
        return Err(Error::parse(1, "missing header"));
    }
    Ok(values)
}
