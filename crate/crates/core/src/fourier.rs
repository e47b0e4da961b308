//! Mean-zero functions on the torus given by finitely many Fourier modes.
//!
//! Phases are carried as 64-bit fixed-point fractions of one period. A mode
//! `j` at phase `t` is evaluated at `j * t mod 1`, computed with wrapping
//! integer multiplication, so trigonometric calls never see an argument
//! larger than half a period.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// Largest mode index accepted from files.
pub const MAX_DEGREE: usize = 1 << 20;

/// Certificate `|a_j| + |b_j| <= M / j^rho`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub m: f64,
    pub rho: f64,
}

/// Rule producing the coefficients beyond the represented degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailModel {
    /// Fourier series of `sign(cos 2 pi x)`.
    SquareWave,
}

impl TailModel {
    /// `(a_j, b_j)` for any `j >= 1`.
    pub fn coefficient(self, j: usize) -> (f64, f64) {
        match self {
            TailModel::SquareWave => {
                if j.is_multiple_of(2) {
                    (0.0, 0.0)
                } else {
                    let sign = if (j / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                    (sign * 4.0 / (PI * j as f64), 0.0)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierFunction {
    cos: Vec<f64>,
    sin: Vec<f64>,
    decay: Option<DecayCertificate>,
    tail: Option<TailModel>,
    name: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Sup-norm bound on the omitted tail, present when a tail model and a
    /// decay certificate with `rho > 1` are attached.
    pub tail_bound: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecayCheck {
    pub holds: bool,
    pub worst_j: usize,
}

/// Built-in test functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    PureCosine,
    ErdosFortet,
    SquareWave(usize),
}

impl std::str::FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "pure_cosine" => return Ok(Builtin::PureCosine),
            "erdos_fortet" => return Ok(Builtin::ErdosFortet),
            _ => {}
        }
        let degree = s
            .strip_prefix("square_wave(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("square_wave:"))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown function {s:?}")))?;
        let degree: usize = degree
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad square wave degree in {s:?}")))?;
        Ok(Builtin::SquareWave(degree))
    }
}

/// Converts a point of `[0, 1)` (any real is reduced mod 1 first) to a
/// 64-bit fixed-point phase.
pub fn to_fixed(x: f64) -> u64 {
    let r = x.rem_euclid(1.0);
    let scaled = r * TWO_POW_64;
    if scaled >= TWO_POW_64 {
        0
    } else {
        scaled as u64
    }
}

/// Signed fraction of a period in `[-1/2, 1/2)`.
#[inline]
fn centered(phase: u64) -> f64 {
    (phase as i64) as f64 / TWO_POW_64
}

impl FourierFunction {
    /// `cos[j-1] = a_j`, `sin[j-1] = b_j`. Fails when every coefficient is zero
    /// or any coefficient is not finite.
    pub fn new(cos: Vec<f64>, sin: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        let degree = cos.len().max(sin.len());
        let mut cos = cos;
        let mut sin = sin;
        cos.resize(degree, 0.0);
        sin.resize(degree, 0.0);
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        if cos.iter().chain(&sin).all(|&c| c == 0.0) {
            return Err(Error::Degenerate("all Fourier coefficients are zero".into()));
        }
        Ok(FourierFunction {
            cos,
            sin,
            decay: None,
            tail: None,
            name: name.into(),
        })
    }

    pub fn builtin(which: Builtin) -> Result<Self> {
        match which {
            Builtin::PureCosine => {
                let f = FourierFunction::new(vec![1.0], vec![], "pure_cosine")?;
                Ok(f.with_decay(DecayCertificate { m: 1.0, rho: 1.0 }))
            }
            Builtin::ErdosFortet => {
                let f = FourierFunction::new(vec![1.0, 1.0], vec![], "erdos_fortet")?;
                Ok(f.with_decay(DecayCertificate { m: 2.0, rho: 1.0 }))
            }
            Builtin::SquareWave(degree) => {
                if degree == 0 {
                    return Err(Error::InvalidArgument("square wave degree must be >= 1".into()));
                }
                let cos = (1..=degree)
                    .map(|j| TailModel::SquareWave.coefficient(j).0)
                    .collect();
                let mut f = FourierFunction::new(cos, vec![], format!("square_wave({degree})"))?;
                f.tail = Some(TailModel::SquareWave);
                Ok(f.with_decay(DecayCertificate { m: 2.0, rho: 1.0 }))
            }
        }
    }

    pub fn with_decay(mut self, cert: DecayCertificate) -> Self {
        self.decay = Some(cert);
        self
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = Some(tail);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn decay(&self) -> Option<DecayCertificate> {
        self.decay
    }

    pub fn tail(&self) -> Option<TailModel> {
        self.tail
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// `a_j` (1-based), zero outside the represented range.
    pub fn a(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.cos.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn b(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.sin.get(j - 1).copied().unwrap_or(0.0)
        }
    }

    /// Iterates `(j, a_j, b_j)` over modes with a nonzero coefficient.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .filter(|(_, (a, b))| **a != 0.0 || **b != 0.0)
            .map(|(i, (&a, &b))| (i + 1, a, b))
    }

    /// Value at a fixed-point phase.
    #[inline]
    pub fn eval_fixed(&self, phase: u64) -> f64 {
        let mut acc = 0.0;
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let t = centered(phase.wrapping_mul(i as u64 + 1));
            if b == 0.0 {
                if a != 0.0 {
                    acc += a * (TAU * t).cos();
                }
            } else {
                let (s, c) = (TAU * t).sin_cos();
                acc += a * c + b * s;
            }
        }
        acc
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.eval_fixed(to_fixed(x))
    }

    pub fn evaluate_with_tail(&self, x: f64) -> Evaluation {
        Evaluation {
            value: self.evaluate(x),
            tail_bound: self.sup_tail_bound(),
        }
    }

    /// 1-periodic primitive `G(y) = sum_j [a_j sin(2 pi j y) - b_j cos(2 pi j y)] / (2 pi j)`
    /// of `f`, evaluated at a fixed-point phase.
    pub fn primitive_fixed(&self, phase: u64) -> f64 {
        let mut acc = 0.0;
        for (j, a, b) in self.modes() {
            let (s, c) = (TAU * centered(phase.wrapping_mul(j as u64))).sin_cos();
            acc += (a * s - b * c) / (TAU * j as f64);
        }
        acc
    }

    /// `sum_j (|a_j| + |b_j|)`, an upper bound for the sup norm.
    pub fn sup_bound(&self) -> f64 {
        self.cos.iter().zip(&self.sin).map(|(a, b)| a.abs() + b.abs()).sum()
    }

    /// `sum_j j (|a_j| + |b_j|)`; `2 pi` times this bounds the Lipschitz constant.
    pub fn derivative_bound(&self) -> f64 {
        self.modes().map(|(j, a, b)| j as f64 * (a.abs() + b.abs())).sum()
    }

    /// L2 norm via Parseval.
    pub fn norm_l2(&self) -> Result<f64> {
        let sq: f64 = self
            .cos
            .iter()
            .zip(&self.sin)
            .map(|(a, b)| a * a + b * b)
            .sum::<f64>()
            / 2.0;
        if sq > 0.0 {
            Ok(sq.sqrt())
        } else {
            Err(Error::Degenerate("function has zero L2 norm".into()))
        }
    }

    /// `M * sum_{j > D} j^-rho <= M D^{1-rho} / (rho - 1)`; `None` when no
    /// tail model is attached or the series does not converge absolutely.
    pub fn sup_tail_bound(&self) -> Option<f64> {
        let cert = self.decay?;
        self.tail?;
        if cert.rho <= 1.0 {
            return None;
        }
        let d = self.degree() as f64;
        Some(cert.m * d.powf(1.0 - cert.rho) / (cert.rho - 1.0))
    }

    /// Bound on the squared L2 norm of the omitted tail:
    /// `M^2/2 * sum_{j > D} j^{-2 rho} <= M^2 D^{1 - 2 rho} / (2 (2 rho - 1))`.
    pub fn l2_tail_bound(&self) -> Option<f64> {
        let cert = self.decay?;
        self.tail?;
        let d = self.degree() as f64;
        Some(cert.m * cert.m * d.powf(1.0 - 2.0 * cert.rho) / (2.0 * (2.0 * cert.rho - 1.0)))
    }

    /// Exhaustive check of `|a_j| + |b_j| <= M / j^rho` over represented modes.
    pub fn decay_check(&self, m: f64, rho: f64) -> Result<DecayCheck> {
        if rho.is_nan() || rho <= 0.5 {
            return Err(Error::InvalidArgument(format!(
                "decay exponent must exceed 1/2, got {rho}"
            )));
        }
        let mut worst = (f64::NEG_INFINITY, 1usize);
        for (i, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let j = i + 1;
            let scaled = (a.abs() + b.abs()) * (j as f64).powf(rho);
            if scaled > worst.0 {
                worst = (scaled, j);
            }
        }
        Ok(DecayCheck {
            holds: worst.0 <= m,
            worst_j: worst.1,
        })
    }

    /// `int_a^b f(lambda x) dx` from the closed-form primitive.
    pub fn integral_over_interval(&self, a: f64, b: f64, lambda: u64) -> Result<f64> {
        if lambda == 0 {
            return Err(Error::InvalidArgument("frequency multiplier must be positive".into()));
        }
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(Error::InvalidArgument(format!("need 0 <= a <= b <= 1, got [{a}, {b}]")));
        }
        let lam = lambda as f64;
        let phase = |x: f64| {
            // lambda * x = int * 1 + frac; only the fraction matters.
            let prod = lam * x;
            to_fixed(prod - prod.floor())
        };
        Ok((self.primitive_fixed(phase(b)) - self.primitive_fixed(phase(a))) / lam)
    }
}

/// Parses a coefficient table. Format:
///
/// ```text
/// # decay_m = 2
/// # decay_rho = 1
/// j,a,b
/// 1,1.0,0.0
/// ```
pub fn parse_coefficients(text: &str) -> Result<FourierFunction> {
    let mut m = None;
    let mut rho = None;
    let mut rows = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once('=') {
                let value = value.trim();
                let parsed = || {
                    value
                        .parse::<f64>()
                        .map_err(|_| Error::parse(i + 1, format!("bad metadata value {value:?}")))
                };
                match key.trim() {
                    "decay_m" => m = Some(parsed()?),
                    "decay_rho" => rho = Some(parsed()?),
                    _ => {}
                }
            }
            rows.push('\n');
        } else {
            rows.push_str(raw);
            rows.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(rows.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["j", "a", "b"] {
        return Err(Error::parse(1, "expected header \"j,a,b\""));
    }
    let mut cos = Vec::new();
    let mut sin = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let j: usize = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad mode index {:?}", &record[0])))?;
        if j == 0 || j > MAX_DEGREE {
            return Err(Error::parse(line, format!("mode index {j} outside 1..={MAX_DEGREE}")));
        }
        if !seen.insert(j) {
            return Err(Error::parse(line, format!("duplicate mode {j}")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line, format!("bad coefficient {s:?}")))
        };
        let (a, b) = (num(&record[1])?, num(&record[2])?);
        if cos.len() < j {
            cos.resize(j, 0.0);
            sin.resize(j, 0.0);
        }
        cos[j - 1] = a;
        sin[j - 1] = b;
    }
    let f = FourierFunction::new(cos, sin, "coefficients")?;
    Ok(match (m, rho) {
        (Some(m), Some(rho)) => f.with_decay(DecayCertificate { m, rho }),
        (None, None) => f,
        _ => return Err(Error::parse(1, "decay certificate needs both decay_m and decay_rho")),
    })
}

pub fn format_coefficients(f: &FourierFunction) -> String {
    let mut out = String::new();
    if let Some(cert) = f.decay {
        let _ = writeln!(out, "# decay_m = {:?}", cert.m);
        let _ = writeln!(out, "# decay_rho = {:?}", cert.rho);
    }
    out.push_str("j,a,b\n");
    for (j, a, b) in f.modes() {
        let _ = writeln!(out, "{j},{a:?},{b:?}");
    }
    out
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<FourierFunction> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coefficients(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cosine() -> FourierFunction {
        FourierFunction::builtin(Builtin::PureCosine).unwrap()
    }

    fn ef() -> FourierFunction {
        FourierFunction::builtin(Builtin::ErdosFortet).unwrap()
    }

    /// Composite midpoint rule, independent of the closed forms.
    fn quad(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| g(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    fn naive_eval(f: &FourierFunction, x: f64) -> f64 {
        (1..=f.degree())
            .map(|j| {
                let t = TAU * j as f64 * x;
                f.a(j) * t.cos() + f.b(j) * t.sin()
            })
            .sum()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(cosine().evaluate(0.0), 1.0);
        assert_eq!(ef().evaluate(0.5), 0.0);
        assert!(cosine().evaluate(0.25).abs() < 1e-15);
        assert_eq!(cosine().evaluate(0.5), -1.0);
    }

    #[test]
    fn evaluate_matches_naive_sum() {
        let f = FourierFunction::new(vec![0.3, -0.2, 0.0, 0.7], vec![0.1, 0.0, -0.5], "t").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x: f64 = rng.random();
            assert!((f.evaluate(x) - naive_eval(&f, x)).abs() < 1e-13);
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(ef().norm_l2().unwrap(), 1.0);
        assert!((cosine().norm_l2().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let sq = FourierFunction::builtin(Builtin::SquareWave(199)).unwrap();
        let partial: f64 = (0..=99).map(|m| 1.0 / ((2 * m + 1) as f64).powi(2)).sum::<f64>()
            * (4.0 / PI).powi(2)
            / 2.0;
        assert!((sq.norm_l2().unwrap() - partial.sqrt()).abs() < 1e-12);
        assert!(FourierFunction::new(vec![0.0], vec![0.0], "z").is_err());
    }

    #[test]
    fn parseval_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1usize, 5, 64] {
            let cos: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sin: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = FourierFunction::new(cos, sin, "r").unwrap();
            let n = 1 << 16;
            let q: f64 = (0..n)
                .map(|i| f.evaluate(i as f64 / n as f64).powi(2))
                .sum::<f64>()
                / n as f64;
            assert!((q - f.norm_l2().unwrap().powi(2)).abs() < 1e-6);
        }
    }

    #[test]
    fn decay_examples() {
        assert!(ef().decay_check(2.0, 1.0).unwrap().holds);
        let sq = FourierFunction::builtin(Builtin::SquareWave(201)).unwrap();
        assert!(sq.decay_check(2.0, 1.0).unwrap().holds);
        let mut cos = vec![0.0; 5];
        cos[4] = 1.0;
        let f = FourierFunction::new(cos, vec![], "a5").unwrap();
        assert_eq!(f.decay_check(1.0, 1.0).unwrap(), DecayCheck { holds: false, worst_j: 5 });
        assert!(f.decay_check(1.0, 0.5).is_err());
    }

    #[test]
    fn builtin_examples() {
        let sq = FourierFunction::builtin(Builtin::SquareWave(3)).unwrap();
        assert!((sq.a(1) - 4.0 / PI).abs() < 1e-15);
        assert_eq!(sq.a(2), 0.0);
        assert!((sq.a(3) + 4.0 / (3.0 * PI)).abs() < 1e-15);
        // Independent check: the Fourier integral 2 * int sign(cos 2 pi x) cos(2 pi j x) dx.
        for j in 1..=3 {
            let coef = 2.0
                * quad(
                    |x| (TAU * x).cos().signum() * (TAU * j as f64 * x).cos(),
                    0.0,
                    1.0,
                    1 << 20,
                );
            assert!((coef - sq.a(j)).abs() < 1e-5, "j={j}: {coef}");
        }
        let e = ef();
        assert_eq!(e.degree(), 2);
        assert_eq!(e.norm_l2().unwrap(), 1.0);
        assert_eq!(cosine().evaluate(0.5), -1.0);
        assert_eq!("square_wave(15)".parse::<Builtin>().unwrap(), Builtin::SquareWave(15));
        assert!("triangle".parse::<Builtin>().is_err());
    }

    #[test]
    fn tail_bounds() {
        let sq = FourierFunction::builtin(Builtin::SquareWave(15)).unwrap();
        // rho = 1: the sup tail does not converge absolutely.
        assert_eq!(sq.sup_tail_bound(), None);
        let l2 = sq.l2_tail_bound().unwrap();
        let exact: f64 = (16..200_000)
            .map(|j| TailModel::SquareWave.coefficient(j).0.powi(2) / 2.0)
            .sum();
        assert!(exact <= l2);
        let f = sq.with_decay(DecayCertificate { m: 2.0, rho: 1.5 });
        let b = f.sup_tail_bound().unwrap();
        assert!((b - 2.0 * 15f64.powf(-0.5) / 0.5).abs() < 1e-12);
        assert_eq!(f.evaluate_with_tail(0.1).tail_bound, Some(b));
        assert_eq!(cosine().sup_tail_bound(), None);
    }

    #[test]
    fn interval_integral_examples() {
        let c = cosine();
        assert!(c.integral_over_interval(0.0, 0.5, 3).unwrap().abs() < 1e-15);
        assert!(c.integral_over_interval(0.0, 1.0, 1).unwrap().abs() < 1e-15);
        let v = c.integral_over_interval(0.0, 0.125, 1).unwrap();
        let expect = (PI / 4.0).sin() / TAU;
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.11254).abs() < 1e-5);
        let q = quad(|x| (TAU * x).cos(), 0.0, 0.125, 100_000);
        assert!((v - q).abs() < 1e-10);
        assert!(c.integral_over_interval(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn interval_integral_matches_quadrature() {
        let f = FourierFunction::new(vec![0.5, -1.0, 0.25], vec![0.0, 0.3, -0.2], "g").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a: f64 = rng.random_range(0.0..1.0);
            let b: f64 = rng.random_range(a..=1.0);
            let lam = rng.random_range(1u64..20);
            let q = quad(|x| naive_eval(&f, lam as f64 * x), a, b, 200_000);
            let v = f.integral_over_interval(a, b, lam).unwrap();
            assert!((v - q).abs() < 1e-8, "{v} vs {q}");
        }
    }

    #[test]
    fn coefficient_file_round_trip() {
        let f = FourierFunction::builtin(Builtin::SquareWave(7)).unwrap();
        let back = parse_coefficients(&format_coefficients(&f)).unwrap();
        assert_eq!(back.cos_coeffs(), f.cos_coeffs());
        assert_eq!(back.decay(), f.decay());
        assert!(parse_coefficients("j,a,b\n0,1,0\n").is_err());
        assert!(parse_coefficients("j,a,b\n1,1,0\n1,2,0\n").is_err());
        assert!(parse_coefficients("x,y\n1,1\n").is_err());
        assert!(parse_coefficients("j,a,b\n1,0,0\n").is_err());
        assert!(parse_coefficients("# decay_m = 1\nj,a,b\n1,1,0\n").is_err());
        let g = parse_coefficients("j,a,b\n3, 0.5 ,0\n").unwrap();
        assert_eq!(g.degree(), 3);
        assert_eq!(g.a(3), 0.5);
    }

    proptest! {
        #[test]
        fn periodic_under_reduction(k in 0u64..(1u64 << 40), shift in -3i32..4) {
            let f = FourierFunction::new(vec![0.3, 0.9], vec![0.4], "p").unwrap();
            let x = k as f64 / (1u64 << 40) as f64;
            let y = x + shift as f64;
            prop_assert_eq!(f.evaluate(x).to_bits(), f.evaluate(y).to_bits());
        }

        #[test]
        fn oscillatory_integral_bound(a in 0.0f64..1.0, w in 0.0f64..1.0, lam in 1u64..1_000_000) {
            let f = FourierFunction::new(vec![0.3, -0.9, 0.2], vec![0.4, 0.0, 0.1], "p").unwrap();
            let b = a + (1.0 - a) * w;
            let v = f.integral_over_interval(a, b, lam).unwrap();
            prop_assert!(v.abs() <= f.sup_bound() / lam as f64 + 1e-12);
        }
    }
}
