//! The five subcommands. Each writes its artifacts under the output directory
//! and returns a JSON report for stdout.

use std::fmt::Write as _;
use std::path::PathBuf;

use lacunary::blocks::{build_partition, verify_approx_lemma, BlockPartition, LemmaConfig};
use lacunary::diophantine::{count_dioph, exact_variance, kac_variance, DiophantineReport};
use lacunary::montecarlo::{moments, normalize, sample_sum, TorusSampler};
use lacunary::sequences::{format_sequence, verify_hadamard};
use lacunary::FourierFunction;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Result of a subcommand run.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub files: Vec<PathBuf>,
    /// Set when a checked property failed; the run still wrote its outputs.
    pub violation: Option<String>,
}

/// Resolved run context.
pub struct Context {
    pub config: ExperimentConfig,
    pub digest: String,
    pub out_dir: PathBuf,
    pub threads: usize,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> CliResult<Self> {
        let digest = config.digest()?;
        let out_dir = config.out_dir();
        let threads = match config.threads {
            Some(0) => return Err(CliError::Config("threads must be positive".into())),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
        Ok(Context {
            config,
            digest,
            out_dir,
            threads,
        })
    }

    fn write(&self, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> CliResult<()> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
        Ok(())
    }

    fn write_json(&self, name: &str, value: &Value, files: &mut Vec<PathBuf>) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("JSON value serializes");
        text.push('\n');
        self.write(name, &text, files)
    }

    fn header(&self) -> String {
        format!("# config_digest={}\n", self.digest)
    }
}

/// Sequence files and the Hadamard report; violation when the gap fails.
pub fn cmd_seq(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.config;
    let mut files = Vec::new();
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for n in cfg.n_list()? {
        let seq = cfg.sequence(n)?;
        let q = cfg.gap_ratio(&seq)?;
        let rep = verify_hadamard(&seq, &q)?;
        let name = format!("sequence_N{n}.txt");
        ctx.write(&name, &(ctx.header() + &format_sequence(&seq)), &mut files)?;
        if !rep.holds {
            failed.push(n);
        }
        reports.push(json!({
            "N": n,
            "label": seq.label(),
            "q": q.to_string(),
            "holds": rep.holds,
            "min_ratio": rep.min_ratio.map(|r| r.to_rational().to_string()),
            "argmin": rep.argmin,
            "max_bits": seq.max_bits(),
            "file": name,
        }));
    }
    let report = json!({ "config_digest": ctx.digest, "sequences": reports });
    ctx.write_json("seq_report.json", &report, &mut files)?;
    let violation = (!failed.is_empty()).then(|| format!("Hadamard gap condition fails for N = {failed:?}"));
    Ok(Outcome {
        report,
        files,
        violation,
    })
}

/// Diophantine sweep over the N list.
pub fn cmd_dioph(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.config;
    let reports: Vec<DiophantineReport> = cfg
        .n_list()?
        .into_iter()
        .map(|n| Ok(count_dioph(&cfg.sequence(n)?, &cfg.weights(n)?, cfg.d)?))
        .collect::<CliResult<_>>()?;
    let mut csv = ctx.header() + DiophantineReport::CSV_HEADER + "\n";
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    let report = json!({
        "config_digest": ctx.digest,
        "reports": reports.iter().map(DiophantineReport::to_json).collect::<Vec<_>>(),
    });
    let mut files = Vec::new();
    ctx.write("dioph.csv", &csv, &mut files)?;
    ctx.write_json("dioph.json", &report, &mut files)?;
    Ok(Outcome {
        report,
        files,
        violation: None,
    })
}

/// Column order of `variance.csv`.
pub const VARIANCE_HEADER: &str = "N,h,exact,exact_over_h,kac,mc,mc_count";

/// Smallest `K` with `q^K >= D`.
fn kac_depth(q: u64, degree: usize) -> u32 {
    let mut k = 0;
    let mut p: u128 = 1;
    while p < degree as u128 {
        p *= q as u128;
        k += 1;
    }
    k
}

/// Exact variance, the Kac value (geometric builtins only) and a Monte Carlo estimate.
pub fn cmd_variance(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.config;
    let f = cfg.function()?;
    let kac = match cfg.geometric_q() {
        Some(q) => Some(kac_variance(&f, q, kac_depth(q, f.degree()))?),
        None => None,
    };
    let mut csv = ctx.header() + VARIANCE_HEADER + "\n";
    let mut rows = Vec::new();
    for n in cfg.n_list()? {
        let seq = cfg.sequence(n)?;
        let w = cfg.weights(n)?;
        let exact = exact_variance(&seq, &w, &f)?;
        let mc = if cfg.count >= 2 {
            let sampler = TorusSampler::for_sequence(&seq, cfg.seed, cfg.count);
            Some(moments(&sample_sum(&seq, &w, &f, sampler, ctx.threads)?.values)?.variance)
        } else {
            None
        };
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        let _ = writeln!(
            csv,
            "{n},{:?},{exact:?},{:?},{},{},{}",
            w.h(),
            exact / w.h(),
            opt(kac),
            opt(mc),
            cfg.count
        );
        rows.push(json!({
            "N": n,
            "h": w.h(),
            "exact": exact,
            "exact_over_h": exact / w.h(),
            "kac": kac,
            "mc": mc,
            "mc_count": cfg.count,
        }));
    }
    let report = json!({ "config_digest": ctx.digest, "function": f.name(), "rows": rows });
    let mut files = Vec::new();
    ctx.write("variance.csv", &csv, &mut files)?;
    ctx.write_json("variance.json", &report, &mut files)?;
    Ok(Outcome {
        report,
        files,
        violation: None,
    })
}

/// Samples, normalizes and summarizes `S_N` for each N.
pub fn cmd_simulate(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.config;
    let f = cfg.function()?;
    let mut files = Vec::new();
    let mut summaries = Vec::new();
    for n in cfg.n_list()? {
        let seq = cfg.sequence(n)?;
        let w = cfg.weights(n)?;
        let sampler = TorusSampler::for_sequence(&seq, cfg.seed, cfg.count);
        let raw = sample_sum(&seq, &w, &f, sampler, ctx.threads)?;
        let mut result = normalize(raw, cfg.normalization, &seq, &w, &f)?;
        result.digest = ctx.digest.clone();
        let stem = format!("simulate_N{n}");
        ctx.write(&format!("{stem}.csv"), &result.to_csv(), &mut files)?;
        let summary = result.summary()?.to_json();
        ctx.write_json(&format!("{stem}.json"), &summary, &mut files)?;
        summaries.push(summary);
    }
    let report = json!({ "config_digest": ctx.digest, "summaries": summaries });
    Ok(Outcome {
        report,
        files,
        violation: None,
    })
}

fn partition_checks(part: &BlockPartition) -> (Value, bool) {
    let hg = part.h.powf(part.gamma);
    let extent = part.buffer_extent();
    let masses_ok = part
        .blocks
        .iter()
        .filter(|b| b.complete)
        .all(|b| hg <= b.mass && b.mass <= hg + 1.0);
    let buffers_ok = part.blocks.iter().all(|b| b.ap == b.b + 1 && b.bp - b.ap == extent);
    let tiled = part.blocks.first().is_some_and(|b| b.a == 1)
        && part.blocks.windows(2).all(|p| p[1].a == p[0].bp + 1);
    let (lower, upper) = part.count_bounds();
    let m = part.m as f64;
    let count_ok = lower <= m && m <= upper;
    let ok = masses_ok && buffers_ok && tiled && count_ok;
    let v = json!({
        "masses_ok": masses_ok,
        "buffers_ok": buffers_ok,
        "tiled": tiled,
        "count_bounds": [lower, upper],
        "count_ok": count_ok,
        "buffer_extent": extent,
    });
    (v, ok)
}

fn lemma_report(ctx: &Context, n: usize, f: &FourierFunction) -> CliResult<(Value, bool)> {
    let cfg = &ctx.config;
    let lc = LemmaConfig {
        gamma: cfg.gamma,
        k: cfg.k,
        q: cfg.block_q,
        samples: cfg.lemma_samples,
        seed: cfg.seed,
        centering: cfg.centering,
    };
    let r = verify_approx_lemma(&cfg.sequence(n)?, &cfg.weights(n)?, f, lc)?;
    let passed = r.passed;
    Ok((serde_json::to_value(&r).expect("report serializes"), passed))
}

/// Partition dump with invariant checks and, optionally, the tiny-scale lemma report.
pub fn cmd_blocks(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.config;
    let f = cfg.function()?;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for n in cfg.n_list()? {
        let part = build_partition(&cfg.weights(n)?, cfg.gamma, cfg.k, cfg.block_q)?;
        let (checks, ok) = partition_checks(&part);
        if !ok {
            failures.push(format!("partition invariants fail for N = {n}"));
        }
        let lemma = if cfg.lemma {
            let (v, passed) = lemma_report(ctx, n, &f)?;
            if !passed {
                failures.push(format!("approximation checks fail for N = {n}"));
            }
            v
        } else {
            Value::Null
        };
        let entry = json!({
            "config_digest": ctx.digest,
            "partition": part.to_json(),
            "invariants": checks,
            "lemma": lemma,
        });
        ctx.write_json(&format!("blocks_N{n}.json"), &entry, &mut files)?;
        entries.push(entry);
    }
    let report = json!({ "config_digest": ctx.digest, "results": entries });
    Ok(Outcome {
        report,
        files,
        violation: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}

/// Writes the canonical config beside the outputs.
pub fn write_config(ctx: &Context) -> CliResult<PathBuf> {
    let mut files = Vec::new();
    let v = json!({ "config_digest": ctx.digest, "config": ctx.config.canonical()? });
    ctx.write_json("config.json", &v, &mut files)?;
    Ok(files.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kac_depth_values() {
        assert_eq!(kac_depth(2, 1), 0);
        assert_eq!(kac_depth(2, 2), 1);
        assert_eq!(kac_depth(2, 15), 4);
        assert_eq!(kac_depth(3, 9), 2);
    }
}
