use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};

/// Fixed-shape pairwise summation; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BASE: usize = 64;
    if values.len() <= BASE {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

fn pairwise_map(values: &[f64], f: impl Fn(f64) -> f64 + Copy) -> f64 {
    const BASE: usize = 64;
    if values.len() <= BASE {
        return values.iter().map(|&v| f(v)).sum();
    }
    let mid = values.len() / 2;
    pairwise_map(&values[..mid], f) + pairwise_map(&values[mid..], f)
}

/// Population moments (divisor `n`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    /// `m4 / m2^2`; `None` when the variance is zero.
    pub kurtosis: Option<f64>,
}

pub fn moments(values: &[f64]) -> Result<Moments> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("moments need at least two values".into()));
    }
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let m2 = pairwise_map(values, |v| (v - mean).powi(2)) / n;
    let m3 = pairwise_map(values, |v| (v - mean).powi(3)) / n;
    let m4 = pairwise_map(values, |v| (v - mean).powi(4)) / n;
    let (skewness, kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    Ok(Moments {
        mean,
        variance: m2,
        skewness,
        kurtosis,
    })
}

/// Standard normal distribution function.
pub fn normal_cdf(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-t * FRAC_1_SQRT_2)
}

/// Two-sided Kolmogorov-Smirnov distance to `cdf`.
pub fn ks_statistic(values: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("KS statistic of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ks_sorted(&sorted, cdf))
}

pub(crate) fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Limit law of the normalized Erdős–Fortet sums: the distribution function of
/// `sqrt(2) |cos(pi U)| Z`, `int_0^1 Phi(t / (sqrt(2) |cos pi s|)) ds`, by the
/// midpoint rule on `[0, 1/2]` (the integrand is symmetric about `1/2`).
pub fn mixture_cdf_ef(t: f64, nodes: usize) -> Result<f64> {
    if nodes < 64 {
        return Err(Error::InvalidArgument(format!("need at least 64 quadrature nodes, got {nodes}")));
    }
    let step = |t: f64| {
        if t > 0.0 {
            1.0
        } else if t < 0.0 {
            0.0
        } else {
            0.5
        }
    };
    let h = 0.5 / nodes as f64;
    let vals: Vec<f64> = (0..nodes)
        .map(|i| {
            let s = (i as f64 + 0.5) * h;
            let c = (PI * s).cos();
            if c <= 0.0 {
                step(t)
            } else {
                normal_cdf(t / (SQRT_2 * c))
            }
        })
        .collect();
    Ok(2.0 * h * pairwise_sum(&vals))
}

/// Linear-interpolation quantile (type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}
