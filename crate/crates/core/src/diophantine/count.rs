use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::keys::{fingerprint_index, Fingerprint, ProductGroups, Scaled, TermTable};
use crate::error::{Error, Result};
use crate::sequences::LacunarySequence;
use crate::weights::WeightArray;

/// Largest `d * N` accepted by the pairwise-difference scan.
pub const MAX_PRODUCTS: usize = 10_000;

/// Masses within this relative distance of the maximum count as ties.
pub const TIE_TOL: f64 = 1e-12;

const TOP_VALUES: usize = 20;

/// Weighted resonance counts for one `(N, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiophantineReport {
    pub n: usize,
    pub d: u32,
    pub h: f64,
    /// `sup_{c > 0} sum c_k c_l 1[j n_k - j' n_l = c]`.
    pub l: f64,
    /// Smallest `c` whose mass is within [`TIE_TOL`] of `l`; `None` if no
    /// positive difference carries mass.
    pub argmax_c: Option<BigUint>,
    /// `l + homog_offdiag`.
    pub l_star: f64,
    /// `sum_{k != l} c_k c_l 1[j n_k = j' n_l]`.
    pub homog_offdiag: f64,
    /// Largest masses, descending; equal masses by ascending `c`.
    pub top_values: Vec<(BigUint, f64)>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    #[serde(rename = "N")]
    n: usize,
    d: u32,
    h: f64,
    #[serde(rename = "L")]
    l: f64,
    argmax_c: Option<String>,
    #[serde(rename = "L_star")]
    l_star: f64,
    homog_offdiag: f64,
    ratios: Ratios,
    top_values: Vec<TopValue<'a>>,
}

#[derive(Serialize)]
struct Ratios {
    #[serde(rename = "L_over_h")]
    l_over_h: f64,
    #[serde(rename = "L_star_over_h")]
    l_star_over_h: f64,
}

#[derive(Serialize)]
struct TopValue<'a> {
    c: String,
    mass: &'a f64,
}

impl DiophantineReport {
    pub fn l_over_h(&self) -> f64 {
        self.l / self.h
    }

    pub fn l_star_over_h(&self) -> f64 {
        self.l_star / self.h
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = ReportJson {
            n: self.n,
            d: self.d,
            h: self.h,
            l: self.l,
            argmax_c: self.argmax_c.as_ref().map(|c| c.to_str_radix(10)),
            l_star: self.l_star,
            homog_offdiag: self.homog_offdiag,
            ratios: Ratios {
                l_over_h: self.l_over_h(),
                l_star_over_h: self.l_star_over_h(),
            },
            top_values: self
                .top_values
                .iter()
                .map(|(c, mass)| TopValue {
                    c: c.to_str_radix(10),
                    mass,
                })
                .collect(),
        };
        serde_json::to_value(json).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "N,d,h,L,L_star,homog_offdiag,L_over_h,L_star_over_h,argmax_c";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{}",
            self.n,
            self.d,
            self.h,
            self.l,
            self.l_star,
            self.homog_offdiag,
            self.l_over_h(),
            self.l_star_over_h(),
            self.argmax_c.as_ref().map(|c| c.to_str_radix(10)).unwrap_or_default()
        )
    }
}

#[derive(Clone, Copy, Debug)]
struct Class {
    mass: f64,
    hi: u32,
    lo: u32,
}

/// A value list sorted ascending, with weights.
type Side = [(Scaled, f64)];

/// Aggregates `w_x * w_y` over all pairs with `x > y` by the fingerprint of `x - y`.
fn difference_classes(t: &TermTable<'_>, xs: &Side, ys: &Side) -> HashMap<Fingerprint, Class> {
    let mut classes: HashMap<Fingerprint, Class> = HashMap::new();
    for (xi, &(x, wx)) in xs.iter().enumerate() {
        let below = ys.partition_point(|&(y, _)| t.cmp(y, x) == Ordering::Less);
        for (yi, &(y, wy)) in ys[..below].iter().enumerate() {
            let fp = t.diff_fingerprint(x, y);
            let e = classes.entry(fp).or_insert(Class {
                mass: 0.0,
                hi: xi as u32,
                lo: yi as u32,
            });
            e.mass += wx * wy;
        }
    }
    classes
}

struct Selection {
    l: f64,
    argmax: Option<(Scaled, Scaled)>,
    top: Vec<((Scaled, Scaled), f64)>,
}

/// Exact mass of the difference `diff`: `sum_y w_y w_x[y + diff]`.
fn exact_mass(
    t: &TermTable<'_>,
    xs: &Side,
    ys: &Side,
    x_index: &HashMap<Fingerprint, usize>,
    diff: (Scaled, Scaled),
) -> f64 {
    let dfp = t.diff_fingerprint(diff.0, diff.1);
    let mut mass = 0.0;
    for &(y, wy) in ys {
        if let Some(&xi) = x_index.get(&t.shifted_fingerprint(y, dfp)) {
            let (x, wx) = xs[xi];
            if t.is_shift(y, diff, x) {
                mass += wx * wy;
            }
        }
    }
    mass
}

fn select(t: &TermTable<'_>, xs: &Side, ys: &Side, classes: HashMap<Fingerprint, Class>, top: usize) -> Result<Selection> {
    let pair = |c: &Class| (xs[c.hi as usize].0, ys[c.lo as usize].0);
    let mut list: Vec<Class> = classes.into_values().collect();
    if list.is_empty() {
        return Ok(Selection {
            l: 0.0,
            argmax: None,
            top: Vec::new(),
        });
    }
    let l = list.iter().map(|c| c.mass).fold(f64::NEG_INFINITY, f64::max);
    let mut argmax: Option<(Scaled, Scaled)> = None;
    for c in list.iter().filter(|c| c.mass >= l * (1.0 - TIE_TOL)) {
        let p = pair(c);
        if argmax.is_none_or(|best| t.cmp_diff(p, best) == Ordering::Less) {
            argmax = Some(p);
        }
    }

    let desc = |a: &Class, b: &Class| b.mass.total_cmp(&a.mass);
    let mut chosen: Vec<Class> = if top > 0 && list.len() > top {
        list.select_nth_unstable_by(top - 1, desc);
        let cutoff = list[top - 1].mass;
        list.into_iter().filter(|c| c.mass >= cutoff).collect()
    } else if top > 0 {
        list
    } else {
        Vec::new()
    };
    chosen.sort_by(|a, b| desc(a, b).then_with(|| t.cmp_diff(pair(a), pair(b))));
    chosen.truncate(top);

    // Collisions only ever merge classes, so a verified maximum is the true one.
    let x_index = fingerprint_index(t, &xs.iter().map(|e| e.0).collect::<Vec<_>>())
        .ok_or(Error::FingerprintCollision)?;
    let verify = |p: (Scaled, Scaled), mass: f64| -> Result<()> {
        let exact = exact_mass(t, xs, ys, &x_index, p);
        if (exact - mass).abs() > 1e-9 * mass.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::FingerprintCollision);
        }
        Ok(())
    };
    if let Some(p) = argmax {
        let (hi, lo) = p;
        let mass = exact_mass(t, xs, ys, &x_index, (hi, lo));
        if mass < l * (1.0 - 1e-9) {
            return Err(Error::FingerprintCollision);
        }
    }
    for c in &chosen {
        verify(pair(c), c.mass)?;
    }
    Ok(Selection {
        l,
        argmax,
        top: chosen.iter().map(|c| (pair(c), c.mass)).collect(),
    })
}

fn check_dims(seq: &LacunarySequence, w: &WeightArray, d: u32) -> Result<()> {
    if seq.len() != w.len() {
        return Err(Error::DimensionMismatch {
            sequence: seq.len(),
            weights: w.len(),
        });
    }
    if d == 0 {
        return Err(Error::InvalidArgument("degree bound d must be >= 1".into()));
    }
    let products = d as usize * seq.len();
    if products > MAX_PRODUCTS {
        return Err(Error::GuardExceeded {
            what: "d * N",
            actual: products as u128,
            limit: MAX_PRODUCTS as u128,
        });
    }
    Ok(())
}

/// Exact weighted counts of `j n_k - j' n_l = c` over `1 <= j, j' <= d`.
pub fn count_dioph(seq: &LacunarySequence, w: &WeightArray, d: u32) -> Result<DiophantineReport> {
    check_dims(seq, w, d)?;
    let t = TermTable::new(seq);
    let js: Vec<u32> = (1..=d).collect();
    let active = (1..=seq.len()).filter(|&k| w.get(k) > 0.0);
    let groups = ProductGroups::build(&t, active, &js);

    let mut homog = 0.0;
    let mut keys = Vec::with_capacity(groups.len());
    for (key, members) in groups.keys.iter().zip(&groups.members) {
        let weight: f64 = members.iter().map(|s| w.get(s.k)).sum();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                homog += 2.0 * w.get(a.k) * w.get(b.k);
            }
        }
        keys.push((*key, weight));
    }

    let classes = difference_classes(&t, &keys, &keys);
    let sel = select(&t, &keys, &keys, classes, TOP_VALUES)?;
    Ok(DiophantineReport {
        n: seq.len(),
        d,
        h: w.h(),
        l: sel.l,
        argmax_c: sel.argmax.map(|(hi, lo)| t.diff_value(hi, lo)),
        l_star: sel.l + homog,
        homog_offdiag: homog,
        top_values: sel
            .top
            .into_iter()
            .map(|((hi, lo), m)| (t.diff_value(hi, lo), m))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSup {
    pub j: u32,
    pub j_prime: u32,
    pub sup: f64,
    pub argmax_c: Option<BigUint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemitrivReport {
    /// Largest per-pair supremum over all `(j, j')`.
    pub max_over_c: f64,
    /// `sum_k c_k^2`.
    pub bound: f64,
    pub holds: bool,
    /// `max_over_c / bound`.
    pub ratio: f64,
    pub pairs: Vec<PairSup>,
}

/// For each fixed `(j, j')`, checks `sup_c sum c_k c_l 1[j n_k - j' n_l = c] <= sum c_k^2`.
pub fn semitriv_check(seq: &LacunarySequence, w: &WeightArray, d: u32) -> Result<SemitrivReport> {
    check_dims(seq, w, d)?;
    let t = TermTable::new(seq);
    let active: Vec<usize> = (1..=seq.len()).filter(|&k| w.get(k) > 0.0).collect();
    let side = |j: u32| -> Vec<(Scaled, f64)> { active.iter().map(|&k| (Scaled { j, k }, w.get(k))).collect() };
    let mut pairs = Vec::new();
    for j in 1..=d {
        let xs = side(j);
        for j_prime in 1..=d {
            let ys = side(j_prime);
            let classes = difference_classes(&t, &xs, &ys);
            let sel = select(&t, &xs, &ys, classes, 0)?;
            pairs.push(PairSup {
                j,
                j_prime,
                sup: sel.l,
                argmax_c: sel.argmax.map(|(hi, lo)| t.diff_value(hi, lo)),
            });
        }
    }
    let max_over_c = pairs.iter().map(|p| p.sup).fold(0.0, f64::max);
    let bound = w.h();
    Ok(SemitrivReport {
        max_over_c,
        bound,
        holds: max_over_c <= bound * (1.0 + 1e-12),
        ratio: max_over_c / bound,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{make_erdos_fortet, make_geometric, make_superlacunary};
    use crate::weights::WeightScheme;

    fn iso(n: usize) -> WeightArray {
        WeightArray::builtin(WeightScheme::Isotropic, n).unwrap()
    }

    #[test]
    fn erdos_fortet_resonance() {
        let r = count_dioph(&make_erdos_fortet(10).unwrap(), &iso(10), 2).unwrap();
        assert_eq!(r.l, 10.0);
        assert_eq!(r.argmax_c, Some(BigUint::from(1u32)));
        assert_eq!(r.top_values[0], (BigUint::from(1u32), 10.0));
    }

    #[test]
    fn geometric_homogeneous() {
        let r = count_dioph(&make_geometric(2, 10).unwrap(), &iso(10), 2).unwrap();
        assert_eq!(r.homog_offdiag, 18.0);
        assert_eq!(r.l, 4.0);
        assert_eq!(r.l_star - r.l, 18.0);
        // Every mass-4 difference c, smallest first.
        let fours: Vec<_> = r.top_values.iter().filter(|(_, m)| *m == 4.0).collect();
        assert!(!fours.is_empty());
        assert_eq!(&fours[0].0, r.argmax_c.as_ref().unwrap());
    }

    #[test]
    fn superlacunary_bounded() {
        let r = count_dioph(&make_superlacunary(50).unwrap(), &iso(50), 2).unwrap();
        assert!(r.l_star <= 6.0);
        // Only the diagonal 2 n_k - n_k = n_k resonates; smallest is n_1 = 2.
        assert_eq!((r.l_star, r.homog_offdiag), (1.0, 0.0));
        assert_eq!(r.argmax_c, Some(BigUint::from(2u32)));
    }

    #[test]
    fn guards_and_dimensions() {
        let s = make_geometric(2, 10).unwrap();
        assert!(matches!(count_dioph(&s, &iso(9), 2), Err(Error::DimensionMismatch { .. })));
        assert!(count_dioph(&s, &iso(10), 0).is_err());
        let big = make_geometric(2, 5001).unwrap();
        assert!(matches!(count_dioph(&big, &iso(5001), 2), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn single_weight_without_differences() {
        let s = make_geometric(3, 3).unwrap();
        let w = WeightArray::new(vec![0.0, 1.0, 0.0], "t").unwrap();
        let r = count_dioph(&s, &w, 1).unwrap();
        assert_eq!(r.l, 0.0);
        assert_eq!(r.argmax_c, None);
        assert!(r.top_values.is_empty());
    }

    #[test]
    fn semitrivial_examples() {
        let s = make_geometric(3, 12).unwrap();
        let r = semitriv_check(&s, &iso(12), 1).unwrap();
        assert!(r.holds && r.max_over_c <= 12.0);

        let r = semitriv_check(&make_erdos_fortet(10).unwrap(), &iso(10), 2).unwrap();
        assert!(r.holds);
        let p = r.pairs.iter().find(|p| p.j == 1 && p.j_prime == 2).unwrap();
        assert_eq!(p.sup, 9.0);
        assert_eq!(p.argmax_c, Some(BigUint::from(1u32)));
    }

    #[test]
    fn json_and_csv_shapes() {
        let r = count_dioph(&make_erdos_fortet(10).unwrap(), &iso(10), 2).unwrap();
        let j = r.to_json();
        assert_eq!(j["N"], 10);
        assert_eq!(j["argmax_c"], "1");
        assert_eq!(j["L"], 10.0);
        assert!(j["top_values"].as_array().unwrap().len() <= 20);
        assert_eq!(r.csv_row().split(',').count(), DiophantineReport::CSV_HEADER.split(',').count());
    }
}
