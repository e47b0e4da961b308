//! Lacunary integer sequences with exact big-integer terms.
//!
//! Terms are 1-based in every public API: `term(1)` is the first element.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A strictly increasing sequence of positive integers `n_1 < n_2 < ...`
/// together with the gap ratio it is claimed to satisfy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LacunarySequence {
    terms: Vec<BigUint>,
    claimed_q: BigRational,
    label: String,
}

/// Exact ratio `n_{k+1} / n_k`, kept unreduced so that comparisons on very
/// large terms never pay for a gcd.
#[derive(Clone, Debug)]
pub struct TermRatio {
    pub numer: BigUint,
    pub denom: BigUint,
}

impl TermRatio {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer.clone()), BigInt::from(self.denom.clone()))
    }

    fn cmp_ratio(&self, other: &TermRatio) -> Ordering {
        (&self.numer * &other.denom).cmp(&(&other.numer * &self.denom))
    }

    fn cmp_rational(&self, q: &BigRational) -> Ordering {
        let lhs = BigInt::from(&self.numer * q.denom().magnitude());
        let rhs = BigInt::from(self.denom.clone()) * q.numer();
        lhs.cmp(&rhs)
    }
}

#[derive(Clone, Debug)]
pub struct HadamardReport {
    pub holds: bool,
    /// `None` for a single-term sequence, where the gap condition is vacuous.
    pub min_ratio: Option<TermRatio>,
    /// 1-based index `k` of the smallest ratio `n_{k+1}/n_k` (first one on ties).
    pub argmin: Option<usize>,
}

impl LacunarySequence {
    /// Validates `terms` and sets the claimed gap ratio to the exact minimum
    /// consecutive ratio (or 2 for a single term).
    pub fn from_terms(terms: Vec<BigUint>, label: impl Into<String>) -> Result<Self> {
        validate_terms(&terms)?;
        let claimed_q = match min_ratio(&terms) {
            Some((ratio, _)) => ratio.to_rational(),
            None => BigRational::from_integer(BigInt::from(2)),
        };
        Ok(LacunarySequence {
            terms,
            claimed_q,
            label: label.into(),
        })
    }

    /// Like [`from_terms`](Self::from_terms) but asserts a caller-chosen gap
    /// ratio. The claim is recorded, not checked; see [`verify_hadamard`].
    pub fn with_claimed_q(
        terms: Vec<BigUint>,
        claimed_q: BigRational,
        label: impl Into<String>,
    ) -> Result<Self> {
        validate_terms(&terms)?;
        if claimed_q <= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "claimed gap ratio must exceed 1, got {claimed_q}"
            )));
        }
        Ok(LacunarySequence {
            terms,
            claimed_q,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    /// 1-based access.
    pub fn term(&self, k: usize) -> &BigUint {
        &self.terms[k - 1]
    }

    pub fn claimed_q(&self) -> &BigRational {
        &self.claimed_q
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Bit length of the largest term.
    pub fn max_bits(&self) -> u64 {
        self.terms.last().map_or(0, |t| t.bits())
    }

    /// The first `n` terms as a new sequence with the same claimed ratio.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!(
                "prefix length {n} outside 1..={}",
                self.len()
            )));
        }
        Ok(LacunarySequence {
            terms: self.terms[..n].to_vec(),
            claimed_q: self.claimed_q.clone(),
            label: self.label.clone(),
        })
    }
}

fn validate_terms(terms: &[BigUint]) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::InvalidArgument("sequence must be nonempty".into()));
    }
    if terms[0].is_zero() {
        return Err(Error::NonPositive { index: 1 });
    }
    for (i, pair) in terms.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(Error::NonMonotone { index: i + 2 });
        }
    }
    Ok(())
}

fn min_ratio(terms: &[BigUint]) -> Option<(TermRatio, usize)> {
    let mut best: Option<(TermRatio, usize)> = None;
    for (i, pair) in terms.windows(2).enumerate() {
        let ratio = TermRatio {
            numer: pair[1].clone(),
            denom: pair[0].clone(),
        };
        let better = match &best {
            None => true,
            Some((b, _)) => ratio.cmp_ratio(b) == Ordering::Less,
        };
        if better {
            best = Some((ratio, i + 1));
        }
    }
    best
}

/// `n_k = q^k` for `k = 1..=n`.
pub fn make_geometric(q: u64, n: usize) -> Result<LacunarySequence> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!("geometric ratio must be >= 2, got {q}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive".into()));
    }
    let base = BigUint::from(q);
    let mut terms = Vec::with_capacity(n);
    let mut cur = base.clone();
    for _ in 0..n {
        terms.push(cur.clone());
        cur *= &base;
    }
    LacunarySequence::with_claimed_q(
        terms,
        BigRational::from_integer(BigInt::from(q)),
        format!("geometric(q={q})"),
    )
}

/// `n_k = 2^k - 1`, the classical counterexample sequence.
pub fn make_erdos_fortet(n: usize) -> Result<LacunarySequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive".into()));
    }
    let terms = (1..=n)
        .map(|k| (BigUint::one() << k) - 1u32)
        .collect::<Vec<_>>();
    LacunarySequence::from_terms(terms, "erdos_fortet")
}

/// `n_k = 2^{k(k+1)/2}`; consecutive ratios `2^{k+1}` grow without bound.
pub fn make_superlacunary(n: usize) -> Result<LacunarySequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("sequence length must be positive".into()));
    }
    let terms = (1..=n)
        .map(|k| BigUint::one() << (k * (k + 1) / 2))
        .collect::<Vec<_>>();
    LacunarySequence::from_terms(terms, "superlacunary")
}

/// Exact check of `min_k n_{k+1}/n_k >= q`.
pub fn verify_hadamard(seq: &LacunarySequence, q: &BigRational) -> Result<HadamardReport> {
    if q <= &BigRational::one() {
        return Err(Error::InvalidArgument(format!("gap ratio must exceed 1, got {q}")));
    }
    validate_terms(&seq.terms)?;
    Ok(match min_ratio(&seq.terms) {
        None => HadamardReport {
            holds: true,
            min_ratio: None,
            argmin: None,
        },
        Some((ratio, k)) => HadamardReport {
            holds: ratio.cmp_rational(q) != Ordering::Less,
            min_ratio: Some(ratio),
            argmin: Some(k),
        },
    })
}

/// Parses a ratio written as an integer (`2`), a fraction (`3/2`) or a
/// terminating decimal (`1.5`), exactly.
pub fn parse_ratio(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::parse(1, format!("invalid ratio {text:?}"));
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if let Some((num, den)) = s.split_once('/') {
        let (num, den) = (num.trim(), den.trim());
        if !digits(num) || !digits(den) {
            return Err(bad());
        }
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        let num: BigInt = num.parse().map_err(|_| bad())?;
        return Ok(BigRational::new(num, den));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if !digits(int) || !(frac.is_empty() || digits(frac)) || frac.len() > 4096 {
        return Err(bad());
    }
    let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}

/// Parses the sequence text format: one decimal integer per line, blank
/// lines and `#` comment lines ignored.
pub fn parse_sequence(text: &str) -> Result<Vec<BigUint>> {
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !line.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(i + 1, format!("not a decimal integer: {line:?}")));
        }
        let value = BigUint::parse_bytes(line.as_bytes(), 10)
            .ok_or_else(|| Error::parse(i + 1, "not a decimal integer"))?;
        terms.push(value);
    }
    validate_terms(&terms)?;
    Ok(terms)
}

pub fn format_sequence(seq: &LacunarySequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {}", seq.label.replace('\n', " "));
    let _ = writeln!(out, "# claimed_q {}", seq.claimed_q);
    for t in &seq.terms {
        let _ = writeln!(out, "{t}");
    }
    out
}

pub fn load_sequence(path: impl AsRef<Path>) -> Result<LacunarySequence> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    LacunarySequence::from_terms(parse_sequence(&text)?, label)
}

pub fn save_sequence(seq: &LacunarySequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_sequence(seq)).map_err(|e| Error::io(path, e))
}
