//! Experiment configuration: one JSON document, every flag an override.

use std::path::{Path, PathBuf};

use lacunary::blocks::Centering;
use lacunary::fourier::{load_coefficients, Builtin};
use lacunary::montecarlo::Normalization;
use lacunary::sequences::{load_sequence, make_erdos_fortet, make_geometric, make_superlacunary, parse_ratio};
use lacunary::weights::load_weights;
use lacunary::{FourierFunction, LacunarySequence, WeightArray, WeightScheme};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceBuiltin {
    Geometric,
    ErdosFortet,
    Superlacunary,
}

impl std::str::FromStr for SequenceBuiltin {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "geometric" => Ok(SequenceBuiltin::Geometric),
            "erdos_fortet" => Ok(SequenceBuiltin::ErdosFortet),
            "superlacunary" => Ok(SequenceBuiltin::Superlacunary),
            _ => Err(CliError::Config(format!("unknown sequence builtin {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SequenceSpec {
    Builtin {
        builtin: SequenceBuiltin,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<u64>,
    },
    File {
        file: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum FunctionSpec {
    /// `pure_cosine`, `erdos_fortet` or `square_wave(D)`.
    Builtin { builtin: String },
    /// Coefficient CSV.
    File { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    File {
        file: PathBuf,
    },
    Scheme(WeightScheme),
}

/// Missing keys take the values of [`ExperimentConfig::default`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sequence: SequenceSpec,
    /// Gap ratio to check, as `p/q` or a decimal; defaults to the claimed ratio.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_q: Option<String>,
    pub function: FunctionSpec,
    /// Keep only modes `j <= truncation`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    pub weights: WeightSpec,
    /// Prefix lengths; empty means the length of the sequence or weight file, else 16.
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub d: u32,
    pub seed: u64,
    pub count: usize,
    pub normalization: Normalization,
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub block_q: f64,
    pub lemma: bool,
    pub lemma_samples: usize,
    pub centering: Centering,
    /// Worker threads; not part of the digest.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Output directory; not part of the digest.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sequence: SequenceSpec::Builtin {
                builtin: SequenceBuiltin::Geometric,
                q: Some(2),
            },
            assert_q: None,
            function: FunctionSpec::Builtin {
                builtin: "pure_cosine".into(),
            },
            truncation: None,
            weights: WeightSpec::Scheme(WeightScheme::Isotropic),
            n: Vec::new(),
            d: 2,
            seed: 0,
            count: 10_000,
            normalization: Normalization::ExactVariance,
            gamma: 0.4,
            k: 4.0,
            block_q: 2.0,
            lemma: true,
            lemma_samples: 10_000,
            centering: Centering::Coarse,
            threads: None,
            out_dir: None,
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = String::from_utf8(read(path)?)
            .map_err(|_| CliError::Config(format!("{}: not UTF-8", path.display())))?;
        Self::from_json(&text)
    }

    /// Canonical JSON: sorted keys, without `threads` and `out_dir`, plus the
    /// SHA-256 of every referenced input file.
    pub fn canonical(&self) -> CliResult<Value> {
        let mut v = serde_json::to_value(self).map_err(|e| CliError::Config(e.to_string()))?;
        let obj = v.as_object_mut().expect("config is an object");
        obj.remove("threads");
        obj.remove("out_dir");
        let mut inputs = serde_json::Map::new();
        for path in self.input_files() {
            inputs.insert(path.display().to_string(), Value::String(sha256_hex(&read(path)?)));
        }
        if !inputs.is_empty() {
            obj.insert("input_sha256".into(), Value::Object(inputs));
        }
        Ok(v)
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> CliResult<String> {
        let canonical = self.canonical()?;
        Ok(sha256_hex(canonical.to_string().as_bytes()))
    }

    fn input_files(&self) -> Vec<&Path> {
        let mut files = Vec::new();
        if let SequenceSpec::File { file } = &self.sequence {
            files.push(file.as_path());
        }
        if let FunctionSpec::File { file } = &self.function {
            files.push(file.as_path());
        }
        if let WeightSpec::File { file } = &self.weights {
            files.push(file.as_path());
        }
        files
    }

    pub fn n_list(&self) -> CliResult<Vec<usize>> {
        if self.n.contains(&0) {
            return Err(CliError::Config(format!("N must be positive, got {:?}", self.n)));
        }
        if !self.n.is_empty() {
            return Ok(self.n.clone());
        }
        if let SequenceSpec::File { file } = &self.sequence {
            return Ok(vec![load_sequence(file)?.len()]);
        }
        if let WeightSpec::File { file } = &self.weights {
            return Ok(vec![load_weights(file)?.len()]);
        }
        Ok(vec![16])
    }

    /// Sequence of length `n`.
    pub fn sequence(&self, n: usize) -> CliResult<LacunarySequence> {
        let seq = match &self.sequence {
            SequenceSpec::Builtin { builtin, q } => match builtin {
                SequenceBuiltin::Geometric => make_geometric(q.unwrap_or(2), n)?,
                SequenceBuiltin::ErdosFortet => make_erdos_fortet(n)?,
                SequenceBuiltin::Superlacunary => make_superlacunary(n)?,
            },
            SequenceSpec::File { file } => {
                let seq = load_sequence(file)?;
                if n > seq.len() {
                    return Err(CliError::Config(format!("N = {n} exceeds the {} terms of {}", seq.len(), file.display())));
                }
                seq.prefix(n)?
            }
        };
        Ok(seq)
    }

    /// Ratio `q` of a geometric builtin, for the Kac formula.
    pub fn geometric_q(&self) -> Option<u64> {
        match self.sequence {
            SequenceSpec::Builtin {
                builtin: SequenceBuiltin::Geometric,
                q,
            } => Some(q.unwrap_or(2)),
            _ => None,
        }
    }

    /// The ratio asserted for the Hadamard check.
    pub fn gap_ratio(&self, seq: &LacunarySequence) -> CliResult<BigRational> {
        if let Some(text) = &self.assert_q {
            return parse_ratio(text).map_err(CliError::from);
        }
        Ok(match self.geometric_q() {
            Some(q) => BigRational::from_integer(q.into()),
            None => seq.claimed_q().clone(),
        })
    }

    pub fn function(&self) -> CliResult<FourierFunction> {
        let f = match &self.function {
            FunctionSpec::Builtin { builtin } => {
                let which: Builtin = builtin.parse().map_err(|e: lacunary::Error| CliError::Config(e.to_string()))?;
                FourierFunction::builtin(which)?
            }
            FunctionSpec::File { file } => load_coefficients(file)?,
        };
        match self.truncation {
            Some(0) => Err(CliError::Config("truncation must be positive".into())),
            Some(d) if d < f.degree() => {
                let cut = |c: &[f64]| c[..d.min(c.len())].to_vec();
                Ok(FourierFunction::new(
                    cut(f.cos_coeffs()),
                    cut(f.sin_coeffs()),
                    format!("{} truncated at {d}", f.name()),
                )?)
            }
            _ => Ok(f),
        }
    }

    /// Weight row for length `n`: builtin schemes are rebuilt per `n`, files are cut.
    pub fn weights(&self, n: usize) -> CliResult<WeightArray> {
        Ok(match &self.weights {
            WeightSpec::Scheme(scheme) => WeightArray::builtin(*scheme, n)?,
            WeightSpec::File { file } => {
                let w = load_weights(file)?;
                if n > w.len() {
                    return Err(CliError::Config(format!("N = {n} exceeds the {} weights of {}", w.len(), file.display())));
                }
                w.prefix(n)?
            }
        })
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}
