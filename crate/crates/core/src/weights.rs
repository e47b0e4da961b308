//! Rows of triangular weight schemes and the size-layer decomposition used
//! to separate large weights from small ones.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest row length accepted from files.
pub const MAX_FILE_LEN: usize = 1 << 24;

/// One row `(c_1, ..., c_N)` of a triangular weight array, all entries in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightArray {
    c: Vec<f64>,
    h: f64,
    label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum WeightScheme {
    Isotropic,
    PowerLaw { alpha: f64 },
    SparseTriangular,
}

impl WeightArray {
    pub fn new(c: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("weight row must be nonempty".into()));
        }
        if let Some(k) = c.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "weight c_{} = {} outside [0, 1]",
                k + 1,
                c[k]
            )));
        }
        let h = c.iter().map(|v| v * v).sum::<f64>();
        if h <= 0.0 {
            return Err(Error::Degenerate("all weights are zero".into()));
        }
        Ok(WeightArray {
            c,
            h,
            label: label.into(),
        })
    }

    pub fn builtin(scheme: WeightScheme, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("row length must be positive".into()));
        }
        match scheme {
            WeightScheme::Isotropic => WeightArray::new(vec![1.0; n], "isotropic"),
            WeightScheme::PowerLaw { alpha } => {
                if !(0.0..0.5).contains(&alpha) {
                    return Err(Error::InvalidArgument(format!(
                        "power-law exponent must lie in [0, 1/2), got {alpha}"
                    )));
                }
                let c = (1..=n).map(|k| (k as f64).powf(-alpha)).collect();
                WeightArray::new(c, format!("power_law({alpha})"))
            }
            WeightScheme::SparseTriangular => {
                let mut c = vec![0.0; n];
                let mut t = 1usize;
                let mut step = 2usize;
                while t <= n {
                    c[t - 1] = 1.0;
                    t += step;
                    step += 1;
                }
                WeightArray::new(c, "sparse_triangular")
            }
        }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    /// 1-based access; zero beyond the row.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.c.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `h(N) = sum_k c_k^2`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `max_k c_k / sqrt(h)`.
    pub fn lindeberg_ratio(&self) -> f64 {
        let max = self.c.iter().copied().fold(0.0, f64::max);
        max / self.h.sqrt()
    }

    /// The first `n` weights as a new row.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!("prefix length {n} outside 1..={}", self.len())));
        }
        WeightArray::new(self.c[..n].to_vec(), self.label.clone())
    }
}

/// How entries below `N^{-1/2}` are treated by [`layer_partition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloorMode {
    /// Fail if any weight lies below the floor.
    Reject,
    /// Collect such weights in the discard set.
    Discard,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayerPartition {
    pub delta: f64,
    /// Number of layers, `floor(sqrt(ln N))`.
    pub layers: usize,
    pub ell0: usize,
    pub beta_ell0: f64,
    /// Mass `sum c_k^2` of every layer `C_0 .. C_{L-1}`.
    pub layer_masses: Vec<f64>,
    /// 1-based index sets.
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c_ell0: Vec<usize>,
    pub discard: Vec<usize>,
}

/// Splits the weights by size around `N^{-1/4}`.
///
/// Layer `l` covers `[N^{-1/4 - delta (l+1)/L}, N^{-1/4 - delta l/L})`, except
/// `l = 0` which is closed on both ends. The lightest layer `l0` (smallest
/// index on ties) becomes `C_{l0}`; weights above it form `B`, weights below
/// it and at least `N^{-1/2}` form `A`.
pub fn layer_partition(w: &WeightArray, delta: f64, floor_mode: FloorMode) -> Result<LayerPartition> {
    if !(delta > 0.0 && delta <= 1.0 / 12.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/12], got {delta}")));
    }
    let n = w.len();
    let nf = n as f64;
    let layers = nf.ln().sqrt().floor() as usize;
    if n < 3 || layers == 0 {
        return Err(Error::InvalidArgument(format!("layer partition needs N >= 3, got {n}")));
    }
    let lf = layers as f64;
    let floor = nf.powf(-0.5);
    let edge = |l: usize| nf.powf(-0.25 - delta * l as f64 / lf);

    let in_layer = |c: f64, l: usize| {
        let (lo, hi) = (edge(l + 1), edge(l));
        if l == 0 {
            lo <= c && c <= hi
        } else {
            lo <= c && c < hi
        }
    };

    let mut layer_masses = vec![0.0; layers];
    for &c in w.values() {
        if let Some(l) = (0..layers).find(|&l| in_layer(c, l)) {
            layer_masses[l] += c * c;
        }
    }
    let ell0 = layer_masses
        .iter()
        .enumerate()
        .fold(0, |best, (l, &m)| if m < layer_masses[best] { l } else { best });

    let lo = edge(ell0 + 1);
    let hi = edge(ell0);
    let mut part = LayerPartition {
        delta,
        layers,
        ell0,
        beta_ell0: 0.25 + delta * ell0 as f64 / lf,
        layer_masses,
        a: Vec::new(),
        b: Vec::new(),
        c_ell0: Vec::new(),
        discard: Vec::new(),
    };
    for (i, &c) in w.values().iter().enumerate() {
        let k = i + 1;
        if c < floor {
            if floor_mode == FloorMode::Reject {
                return Err(Error::InvalidArgument(format!(
                    "weight c_{k} = {c} below N^(-1/2) = {floor}"
                )));
            }
            part.discard.push(k);
        } else if in_layer(c, ell0) {
            part.c_ell0.push(k);
        } else if c >= hi {
            part.b.push(k);
        } else {
            debug_assert!(c < lo);
            part.a.push(k);
        }
    }
    Ok(part)
}

pub fn parse_weights(text: &str) -> Result<WeightArray> {
    let body: String = text
        .lines()
        .map(|l| if l.trim_start().starts_with('#') { "" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["k", "c"] {
        return Err(Error::parse(1, "expected header \"k,c\""));
    }
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let k: usize = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad index {:?}", &record[0])))?;
        let c: f64 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad weight {:?}", &record[1])))?;
        if k == 0 || k > MAX_FILE_LEN {
            return Err(Error::parse(line, format!("index {k} outside 1..={MAX_FILE_LEN}")));
        }
        entries.push((k, c));
    }
    let n = entries.len();
    let mut c = vec![f64::NAN; n];
    for &(k, v) in &entries {
        if k > n {
            return Err(Error::parse(0, format!("indices must be exactly 1..={n}; found {k}")));
        }
        if !c[k - 1].is_nan() {
            return Err(Error::parse(0, format!("duplicate index {k}")));
        }
        c[k - 1] = v;
    }
    WeightArray::new(c, "file")
}

pub fn format_weights(w: &WeightArray) -> String {
    let mut out = String::from("k,c\n");
    for (i, c) in w.values().iter().enumerate() {
        out.push_str(&format!("{},{:?}\n", i + 1, c));
    }
    out
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightArray> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_weights(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn h_examples() {
        assert_eq!(WeightArray::builtin(WeightScheme::Isotropic, 10).unwrap().h(), 10.0);
        assert_eq!(WeightArray::new(vec![1.0, 0.0, 1.0], "t").unwrap().h(), 2.0);
        let w = WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.25 }, 4).unwrap();
        let direct = 1.0 + 2f64.powf(-0.5) + 3f64.powf(-0.5) + 4f64.powf(-0.5);
        assert!((w.h() - direct).abs() < 1e-14);
        assert!((w.h() - 2.78445).abs() < 1e-5);
    }

    #[test]
    fn lindeberg_examples() {
        let w = WeightArray::builtin(WeightScheme::Isotropic, 100).unwrap();
        assert!((w.lindeberg_ratio() - 0.1).abs() < 1e-15);
        assert_eq!(WeightArray::new(vec![1.0, 0.0, 0.0], "t").unwrap().lindeberg_ratio(), 1.0);
        let w = WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.25 }, 10_000).unwrap();
        let mut h = 0.0;
        for k in 1..=10_000 {
            h += 1.0 / (k as f64).sqrt();
        }
        assert!((w.lindeberg_ratio() - 1.0 / h.sqrt()).abs() < 1e-12);
        assert!((w.lindeberg_ratio() - 0.0707).abs() < 5e-4);
    }

    #[test]
    fn builtin_schemes() {
        let w = WeightArray::builtin(WeightScheme::SparseTriangular, 10).unwrap();
        let ones: Vec<usize> = (1..=10).filter(|&k| w.get(k) == 1.0).collect();
        assert_eq!(ones, vec![1, 3, 6, 10]);
        assert!(w.values().iter().all(|&c| c == 0.0 || c == 1.0));
        let p = WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.0 }, 5).unwrap();
        assert_eq!(p, WeightArray { label: p.label.clone(), ..WeightArray::builtin(WeightScheme::Isotropic, 5).unwrap() });
        let p = WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.25 }, 4).unwrap();
        for (got, want) in p.values().iter().zip([1.0, 0.8409, 0.7598, std::f64::consts::FRAC_1_SQRT_2]) {
            assert!((got - want).abs() < 5e-5);
        }
        assert!(WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.5 }, 4).is_err());
        assert!(WeightArray::new(vec![1.5], "t").is_err());
        assert!(WeightArray::new(vec![0.0, 0.0], "t").is_err());
    }

    #[test]
    fn layer_examples() {
        for n in [3usize, 10, 1000] {
            let w = WeightArray::builtin(WeightScheme::Isotropic, n).unwrap();
            let p = layer_partition(&w, 1.0 / 12.0, FloorMode::Reject).unwrap();
            assert!(p.a.is_empty() && p.c_ell0.is_empty() && p.discard.is_empty());
            assert_eq!(p.b, (1..=n).collect::<Vec<_>>());
        }

        let n = 16;
        let w = WeightArray::new(vec![(n as f64).powf(-0.5); n], "flat").unwrap();
        let p = layer_partition(&w, 1.0 / 12.0, FloorMode::Reject).unwrap();
        assert_eq!(p.layers, 1);
        assert!(p.b.is_empty() && p.c_ell0.is_empty());
        assert_eq!(p.a, (1..=n).collect::<Vec<_>>());

        let n = 100;
        let small = (n as f64).powf(-0.5);
        let c: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { small }).collect();
        let w = WeightArray::new(c, "mixed").unwrap();
        let p = layer_partition(&w, 1.0 / 12.0, FloorMode::Reject).unwrap();
        assert_eq!(p.layers, 2);
        assert_eq!(p.b, (1..=50).collect::<Vec<_>>());
        assert_eq!(p.a, (51..=100).collect::<Vec<_>>());
        let mass: f64 = p.c_ell0.iter().map(|&k| w.get(k).powi(2)).sum();
        assert!(mass <= w.h() / p.layers as f64);

        assert!(layer_partition(&WeightArray::builtin(WeightScheme::Isotropic, 2).unwrap(), 0.05, FloorMode::Reject).is_err());
        assert!(layer_partition(&w, 0.2, FloorMode::Reject).is_err());
        let sparse = WeightArray::builtin(WeightScheme::SparseTriangular, 20).unwrap();
        assert!(layer_partition(&sparse, 0.05, FloorMode::Reject).is_err());
        let p = layer_partition(&sparse, 0.05, FloorMode::Discard).unwrap();
        assert_eq!(p.discard.len() + p.b.len(), 20);
    }

    #[test]
    fn weight_file_round_trip() {
        let w = WeightArray::builtin(WeightScheme::PowerLaw { alpha: 0.3 }, 17).unwrap();
        let back = parse_weights(&format_weights(&w)).unwrap();
        assert_eq!(back.values(), w.values());
        assert_eq!(parse_weights("k,c\n2,0.5\n1,1\n").unwrap().values(), &[1.0, 0.5]);
        assert!(parse_weights("k,c\n1,1\n3,1\n").is_err());
        assert!(parse_weights("k,c\n1,1\n1,1\n").is_err());
        assert!(parse_weights("k,c\n1,2\n").is_err());
        assert!(parse_weights("a,b\n1,1\n").is_err());
    }

    proptest! {
        #[test]
        fn layer_partition_invariants(
            n in 3usize..400,
            seed in proptest::collection::vec(0.0f64..1.0, 400),
            expo in proptest::collection::vec(0.0f64..0.6, 400),
            delta in 0.001f64..(1.0 / 12.0),
        ) {
            let nf = n as f64;
            // Weights spread over the interesting range N^{-0.6} .. 1.
            let c: Vec<f64> = (0..n).map(|i| if seed[i] < 0.1 { 1.0 } else { nf.powf(-expo[i]) }).collect();
            let w = WeightArray::new(c, "p").unwrap();
            let p = layer_partition(&w, delta, FloorMode::Discard).unwrap();
            let mass: f64 = p.c_ell0.iter().map(|&k| w.get(k).powi(2)).sum();
            prop_assert!(mass <= w.h() / p.layers as f64 * (1.0 + 1e-12));

            let mut all: Vec<usize> = p.a.iter().chain(&p.b).chain(&p.c_ell0).chain(&p.discard).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());

            if !p.a.is_empty() && !p.b.is_empty() {
                let max_a = p.a.iter().map(|&k| w.get(k)).fold(0.0, f64::max);
                let min_b = p.b.iter().map(|&k| w.get(k)).fold(1.0, f64::min);
                prop_assert!(max_a / min_b <= nf.powf(-delta / p.layers as f64) * (1.0 + 1e-12));
            }
        }
    }
}
