//! Products `j * n_k` handled without materializing big integers.
//!
//! Each product carries a floating approximation (for fast ordering) and a
//! pair of residues modulo two 61/64-bit primes (for hashing differences).
//! Anything the approximation cannot decide falls back to exact arithmetic.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::sequences::LacunarySequence;

pub(crate) const P1: u64 = (1 << 61) - 1;
pub(crate) const P2: u64 = u64::MAX - 58; // 2^64 - 59

/// Relative gap below which approximate comparisons are not trusted.
const APPROX_TOL: f64 = 1e-12;

/// `mant * 2^exp` with `mant` in `[1, 2)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Approx {
    exp: i64,
    mant: f64,
}

impl Approx {
    fn of(n: &BigUint) -> Approx {
        let bits = n.bits();
        debug_assert!(bits > 0);
        let top = if bits > 64 {
            (n >> (bits - 64)).to_u64().unwrap_or(u64::MAX)
        } else {
            n.to_u64().unwrap_or(0) << (64 - bits)
        };
        Approx {
            exp: bits as i64 - 1,
            mant: top as f64 / 9_223_372_036_854_775_808.0,
        }
        .normalized()
    }

    fn normalized(mut self) -> Approx {
        while self.mant >= 2.0 {
            self.mant /= 2.0;
            self.exp += 1;
        }
        self
    }

    fn scale(self, j: u32) -> Approx {
        Approx {
            exp: self.exp,
            mant: self.mant * j as f64,
        }
        .normalized()
    }

    /// `Some(order)` when the approximations are far enough apart.
    fn try_cmp(self, other: Approx) -> Option<Ordering> {
        let de = self.exp - other.exp;
        if de >= 2 {
            return Some(Ordering::Greater);
        }
        if de <= -2 {
            return Some(Ordering::Less);
        }
        let r = self.mant / other.mant * 2f64.powi(de as i32);
        if r > 1.0 + APPROX_TOL {
            Some(Ordering::Greater)
        } else if r < 1.0 - APPROX_TOL {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Approximation of `self - other` for `self > other`; `None` when the
    /// subtraction cancels too many digits.
    fn minus(self, other: Approx) -> Option<Approx> {
        let de = self.exp - other.exp;
        if de > 64 {
            return Some(self);
        }
        let m = self.mant - other.mant * 2f64.powi(-(de as i32));
        if m < 1e-2 * self.mant {
            return None;
        }
        let mut out = Approx {
            exp: self.exp,
            mant: m,
        };
        while out.mant < 1.0 {
            out.mant *= 2.0;
            out.exp -= 1;
        }
        Some(out)
    }
}

/// The product `j * n_k` (`k` 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Scaled {
    pub j: u32,
    pub k: usize,
}

/// Per-term data shared by all products of one sequence.
pub(crate) struct TermTable<'a> {
    seq: &'a LacunarySequence,
    approx: Vec<Approx>,
    residues: Vec<(u64, u64)>,
}

pub(crate) type Fingerprint = u128;

impl<'a> TermTable<'a> {
    pub fn new(seq: &'a LacunarySequence) -> Self {
        let p1 = BigUint::from(P1);
        let p2 = BigUint::from(P2);
        let approx = seq.terms().iter().map(Approx::of).collect();
        let residues = seq
            .terms()
            .iter()
            .map(|t| {
                let r1 = (t % &p1).to_u64().unwrap_or(0);
                let r2 = (t % &p2).to_u64().unwrap_or(0);
                (r1, r2)
            })
            .collect();
        TermTable {
            seq,
            approx,
            residues,
        }
    }

    pub fn value(&self, s: Scaled) -> BigUint {
        self.seq.term(s.k) * s.j
    }

    pub fn approx(&self, s: Scaled) -> Approx {
        self.approx[s.k - 1].scale(s.j)
    }

    pub fn residue(&self, s: Scaled) -> (u64, u64) {
        let (r1, r2) = self.residues[s.k - 1];
        let j = s.j as u128;
        (
            ((r1 as u128 * j) % P1 as u128) as u64,
            ((r2 as u128 * j) % P2 as u128) as u64,
        )
    }

    pub fn cmp(&self, a: Scaled, b: Scaled) -> Ordering {
        if a.k == b.k {
            return a.j.cmp(&b.j);
        }
        self.approx(a)
            .try_cmp(self.approx(b))
            .unwrap_or_else(|| self.value(a).cmp(&self.value(b)))
    }

    /// Fingerprint of the positive difference `hi - lo`.
    pub fn diff_fingerprint(&self, hi: Scaled, lo: Scaled) -> Fingerprint {
        let (h1, h2) = self.residue(hi);
        let (l1, l2) = self.residue(lo);
        let d1 = if h1 >= l1 { h1 - l1 } else { h1 + (P1 - l1) };
        let d2 = if h2 >= l2 { h2 - l2 } else { h2.wrapping_add(P2 - l2) };
        ((d1 as u128) << 64) | d2 as u128
    }

    pub fn fingerprint(&self, s: Scaled) -> Fingerprint {
        let (r1, r2) = self.residue(s);
        ((r1 as u128) << 64) | r2 as u128
    }

    /// Fingerprint of `s + diff` where `diff` is itself a difference fingerprint.
    pub fn shifted_fingerprint(&self, s: Scaled, diff: Fingerprint) -> Fingerprint {
        let (r1, r2) = self.residue(s);
        let d1 = (diff >> 64) as u64;
        let d2 = diff as u64;
        let s1 = ((r1 as u128 + d1 as u128) % P1 as u128) as u64;
        let s2 = ((r2 as u128 + d2 as u128) % P2 as u128) as u64;
        ((s1 as u128) << 64) | s2 as u128
    }

    /// Orders two positive differences `a.0 - a.1` and `b.0 - b.1`.
    pub fn cmp_diff(&self, a: (Scaled, Scaled), b: (Scaled, Scaled)) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        if a.0 == b.0 {
            return self.cmp(b.1, a.1);
        }
        if a.1 == b.1 {
            return self.cmp(a.0, b.0);
        }
        let da = self.approx(a.0).minus(self.approx(a.1));
        let db = self.approx(b.0).minus(self.approx(b.1));
        if let (Some(da), Some(db)) = (da, db) {
            if let Some(o) = da.try_cmp(db) {
                return o;
            }
        }
        (self.value(a.0) + self.value(b.1)).cmp(&(self.value(b.0) + self.value(a.1)))
    }

    pub fn diff_value(&self, hi: Scaled, lo: Scaled) -> BigUint {
        self.value(hi) - self.value(lo)
    }

    /// Exact test of `base + (diff.0 - diff.1) == target`.
    pub fn is_shift(&self, base: Scaled, diff: (Scaled, Scaled), target: Scaled) -> bool {
        self.value(base) + self.value(diff.0) == self.value(target) + self.value(diff.1)
    }
}

/// Products grouped by exact value, ascending.
pub(crate) struct ProductGroups {
    /// Representative of each distinct value.
    pub keys: Vec<Scaled>,
    /// All `(j, k)` contributing to each value.
    pub members: Vec<Vec<Scaled>>,
}

impl ProductGroups {
    pub fn build(table: &TermTable<'_>, ks: impl IntoIterator<Item = usize>, js: &[u32]) -> Self {
        let mut all: Vec<Scaled> = ks
            .into_iter()
            .flat_map(|k| js.iter().map(move |&j| Scaled { j, k }))
            .collect();
        all.sort_by(|a, b| table.cmp(*a, *b).then((a.k, a.j).cmp(&(b.k, b.j))));
        let mut keys: Vec<Scaled> = Vec::new();
        let mut members: Vec<Vec<Scaled>> = Vec::new();
        for s in all {
            match keys.last() {
                Some(&last) if table.cmp(last, s) == Ordering::Equal => {
                    members.last_mut().expect("group exists").push(s);
                }
                _ => {
                    keys.push(s);
                    members.push(vec![s]);
                }
            }
        }
        ProductGroups { keys, members }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }
}

/// Map from fingerprint to index; `None` when two distinct values collide.
pub(crate) fn fingerprint_index(table: &TermTable<'_>, keys: &[Scaled]) -> Option<HashMap<Fingerprint, usize>> {
    let mut map = HashMap::with_capacity(keys.len());
    for (i, &s) in keys.iter().enumerate() {
        if map.insert(table.fingerprint(s), i).is_some() {
            return None;
        }
    }
    Some(map)
}
