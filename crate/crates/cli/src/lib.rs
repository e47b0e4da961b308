//! Batch experiments over lacunary sums: sequence generation, Diophantine
//! sweeps, variance tables, Monte Carlo runs and block constructions.
//!
//! Every run resolves a single [`ExperimentConfig`]; command-line flags
//! override its keys. Outputs carry the SHA-256 digest of the canonical config.

pub mod commands;
pub mod config;
pub mod error;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lacunary::montecarlo::Normalization;
use lacunary::WeightScheme;
use serde_json::Value;

pub use commands::{Context, Outcome};
pub use config::{ExperimentConfig, FunctionSpec, SequenceBuiltin, SequenceSpec, WeightSpec};
pub use error::{CliError, CliResult, EXIT_GUARD, EXIT_IO, EXIT_OK, EXIT_VIOLATION};

#[derive(Debug, Parser)]
#[command(name = "lacunary", version, about = "Experiments with weighted lacunary sums")]
pub struct Cli {
    /// JSON experiment config; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sampling.
    #[arg(long, global = true, env = "LACUNARY_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a sequence and check the Hadamard gap condition.
    Seq(Overrides),
    /// Count weighted Diophantine solutions over the N list.
    Dioph(Overrides),
    /// Exact, Kac and Monte Carlo variances.
    Variance(Overrides),
    /// Sample normalized sums and compare with the normal law.
    Simulate(Overrides),
    /// Block partition and the tiny-scale approximation checks.
    Blocks(Overrides),
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Sequence builtin: geometric, erdos_fortet or superlacunary.
    #[arg(long, conflicts_with = "file")]
    pub builtin: Option<String>,
    /// Ratio of the geometric builtin.
    #[arg(long)]
    pub q: Option<u64>,
    /// Sequence file, one integer per line.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Gap ratio to assert, e.g. 3/2 or 1.5.
    #[arg(long)]
    pub assert_q: Option<String>,
    /// Comma-separated list of N.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// pure_cosine, erdos_fortet or square_wave(D).
    #[arg(long, conflicts_with = "coefficients")]
    pub function: Option<String>,
    /// Coefficient CSV (j,a,b).
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Weight scheme: isotropic, power_law or sparse_triangular.
    #[arg(long, conflicts_with = "weights_file")]
    pub weights: Option<String>,
    /// Exponent of the power_law scheme.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight CSV (k,c).
    #[arg(long)]
    pub weights_file: Option<PathBuf>,
    #[arg(short, long)]
    pub d: Option<u32>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub count: Option<usize>,
    /// raw, exact_variance, sigma_sqrt_h or empirical.
    #[arg(long)]
    pub normalization: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Buffer constant K.
    #[arg(long = "K")]
    pub k: Option<f64>,
    /// Gap ratio used for buffer lengths.
    #[arg(long)]
    pub block_q: Option<f64>,
    #[arg(long)]
    pub lemma_samples: Option<usize>,
    /// coarse, skip or fine_atom.
    #[arg(long)]
    pub centering: Option<String>,
    /// Skip the approximation checks in `blocks`.
    #[arg(long)]
    pub no_lemma: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> CliResult<()> {
        if let Some(name) = &self.builtin {
            let builtin: SequenceBuiltin = name.parse()?;
            let q = match builtin {
                SequenceBuiltin::Geometric => Some(self.q.unwrap_or(2)),
                _ if self.q.is_some() => return Err(config_err("--q applies only to the geometric builtin")),
                _ => None,
            };
            cfg.sequence = SequenceSpec::Builtin { builtin, q };
        } else if let Some(q) = self.q {
            match &mut cfg.sequence {
                SequenceSpec::Builtin {
                    builtin: SequenceBuiltin::Geometric,
                    q: slot,
                } => *slot = Some(q),
                _ => return Err(config_err("--q applies only to the geometric builtin")),
            }
        }
        if let Some(file) = &self.file {
            cfg.sequence = SequenceSpec::File { file: file.clone() };
        }
        if let Some(q) = &self.assert_q {
            cfg.assert_q = Some(q.clone());
        }
        if let Some(n) = &self.n {
            cfg.n = n.clone();
        }
        if let Some(name) = &self.function {
            cfg.function = FunctionSpec::Builtin { builtin: name.clone() };
        }
        if let Some(file) = &self.coefficients {
            cfg.function = FunctionSpec::File { file: file.clone() };
        }
        if let Some(d) = self.truncation {
            cfg.truncation = Some(d);
        }
        self.apply_weights(cfg)?;
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(count) = self.count {
            cfg.count = count;
        }
        if let Some(mode) = &self.normalization {
            cfg.normalization = mode.parse::<Normalization>().map_err(|e| config_err(e.to_string()))?;
        }
        if let Some(gamma) = self.gamma {
            cfg.gamma = gamma;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(q) = self.block_q {
            cfg.block_q = q;
        }
        if let Some(s) = self.lemma_samples {
            cfg.lemma_samples = s;
        }
        if let Some(c) = &self.centering {
            cfg.centering = serde_json::from_value(Value::String(c.clone()))
                .map_err(|_| config_err(format!("unknown centering {c:?}")))?;
        }
        if self.no_lemma {
            cfg.lemma = false;
        }
        Ok(())
    }

    fn apply_weights(&self, cfg: &mut ExperimentConfig) -> CliResult<()> {
        if let Some(name) = &self.weights {
            let scheme = match name.as_str() {
                "isotropic" => WeightScheme::Isotropic,
                "sparse_triangular" => WeightScheme::SparseTriangular,
                "power_law" => WeightScheme::PowerLaw {
                    alpha: self.alpha.ok_or_else(|| config_err("power_law needs --alpha"))?,
                },
                _ => return Err(config_err(format!("unknown weight scheme {name:?}"))),
            };
            if self.alpha.is_some() && !matches!(scheme, WeightScheme::PowerLaw { .. }) {
                return Err(config_err("--alpha applies only to power_law"));
            }
            cfg.weights = WeightSpec::Scheme(scheme);
        } else if let Some(a) = self.alpha {
            match &mut cfg.weights {
                WeightSpec::Scheme(WeightScheme::PowerLaw { alpha }) => *alpha = a,
                _ => return Err(config_err("--alpha applies only to power_law")),
            }
        }
        if let Some(file) = &self.weights_file {
            cfg.weights = WeightSpec::File { file: file.clone() };
        }
        Ok(())
    }
}

impl Cli {
    /// The config file (or defaults) with every flag applied.
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let overrides = match &self.command {
            Command::Seq(o) | Command::Dioph(o) | Command::Variance(o) | Command::Simulate(o) | Command::Blocks(o) => o,
        };
        overrides.apply(&mut cfg)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = Some(dir.clone());
        }
        Ok(cfg)
    }

    /// Resolves the config, runs the subcommand and writes its outputs.
    pub fn execute(&self) -> CliResult<Outcome> {
        let ctx = Context::new(self.resolve()?)?;
        let config_file = commands::write_config(&ctx)?;
        let mut outcome = match self.command {
            Command::Seq(_) => commands::cmd_seq(&ctx),
            Command::Dioph(_) => commands::cmd_dioph(&ctx),
            Command::Variance(_) => commands::cmd_variance(&ctx),
            Command::Simulate(_) => commands::cmd_simulate(&ctx),
            Command::Blocks(_) => commands::cmd_blocks(&ctx),
        }?;
        outcome.files.insert(0, config_file);
        Ok(outcome)
    }
}

/// Runs `cli`, printing the report to stdout and problems to stderr; returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match cli.execute() {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            match outcome.violation {
                Some(msg) => {
                    eprintln!("violation: {msg}");
                    EXIT_VIOLATION
                }
                None => EXIT_OK,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
