//! Command-line surface for `congruent-core`: argument parsing, sieve
//! caching, report serialization and the exit-code contract.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 resource or I/O
//! failure, 3 bad arguments.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use congruent_core::altsim::{
    self, alpha, classgroup_oracle, classrank_stationary, corank_distribution_mc, gerth_pmf, markov_stationary,
    Parity, Table3Label,
};
use congruent_core::density::{self, Metric};
use congruent_core::lfun::{verify_table2_twist, LCache};
use congruent_core::monsky::{build_mx, build_twist, redei_g};
use congruent_core::numtheory::{factor_squarefree, PrimeSieve};

/// Environment variable naming a sieve cache file.
pub const SIEVE_CACHE_ENV: &str = "CONGRUENT_SIEVE_CACHE";

const SIMULATE_DELTA_LIMIT: u64 = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] congruent_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Args(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use congruent_core::Error as E;
        match self {
            CliError::Core(E::Resource(_) | E::OutOfRange { .. }) => 2,
            CliError::Core(E::Domain(_) | E::NotSquarefree(_)) => 3,
            CliError::Core(_) => 1,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 2,
            CliError::Args(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Chain {
    Even,
    Odd,
    Classrank,
}

#[derive(Debug, Parser)]
#[command(name = "congruent", version, about = "Congruent number matrices, densities and simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare both sides of every determinant row for squarefree n ≤ max-n.
    Verify {
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Density report for squarefree n ≡ residue (mod 8).
    Scan {
        #[arg(long)]
        residue: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Certified congruent numbers n ≡ residue (mod 8), residue in {5, 6, 7}.
    Certify {
        #[arg(long)]
        residue: u64,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Monte Carlo corank histogram for one alternating-matrix configuration.
    Simulate {
        /// One of 5a, 5b, 5ab, 6, 7a, 7b, 7ab.
        #[arg(long)]
        row: String,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..=64))]
        r: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stationary law of one of the Markov chains.
    Markov {
        #[arg(long, value_enum, default_value = "even")]
        chain: Chain,
        #[arg(long, default_value_t = 64)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Table of the limiting corank law α_k.
    Alpha {
        #[arg(long, default_value_t = 10)]
        k_max: usize,
    },
    /// Compare Rédei determinants with a brute-force class group computation.
    Classcheck {
        #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Histogram of 4-ranks of Cl(Q(√−n)) over squarefree n ≡ 3 (mod 4).
    Census {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Scan { .. } => "scan",
            Command::Certify { .. } => "certify",
            Command::Simulate { .. } => "simulate",
            Command::Markov { .. } => "markov",
            Command::Alpha { .. } => "alpha",
            Command::Classcheck { .. } => "classcheck",
            Command::Census { .. } => "census",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Simulate { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

/// The finished output of one command plus whether its checks passed.
struct Outcome {
    body: Vec<u8>,
    passed: bool,
    summary: Option<String>,
}

#[derive(Serialize)]
struct Meta {
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    config_hash: String,
}

fn meta(cmd: &Command) -> Meta {
    // Worker count, format and output path do not change the numbers.
    let digest = Sha256::digest(format!("{cmd:?}").as_bytes());
    Meta {
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        seed: cmd.seed(),
        config_hash: hex::encode(&digest[..8]),
    }
}

fn csv_bytes<T: Serialize>(rows: &[T], header: &[&str]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn json_bytes(value: serde_json::Value) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&value)?;
    out.push(b'\n');
    Ok(out)
}

fn render<T: Serialize>(
    format: Format,
    cmd: &Command,
    key: &str,
    rows: &[T],
    header: &[&str],
    extra: serde_json::Value,
) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => csv_bytes(rows, header),
        Format::Json => {
            let mut v = json!({ "meta": meta(cmd), key: rows });
            if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
                obj.extend(more);
            }
            json_bytes(v)
        }
    }
}

fn load_sieve(limit: u64) -> CliResult<PrimeSieve> {
    let limit = limit.max(2);
    let path = std::env::var_os(SIEVE_CACHE_ENV).map(PathBuf::from);
    if let Some(p) = &path {
        if let Ok(f) = File::open(p) {
            if let Ok(s) = PrimeSieve::read_cache(io::BufReader::new(f)) {
                if s.limit() >= limit {
                    return Ok(s);
                }
            }
        }
    }
    let s = PrimeSieve::new(limit)?;
    if let Some(p) = &path {
        let f = File::create(p)?;
        s.write_cache(io::BufWriter::new(f))?;
    }
    Ok(s)
}

#[derive(Serialize)]
struct MetricRow {
    metric: String,
    count: u64,
    total: u64,
    frequency: f64,
    ci_low: f64,
    ci_high: f64,
}

impl From<Metric> for MetricRow {
    fn from(m: Metric) -> Self {
        MetricRow {
            metric: m.name,
            count: m.count,
            total: m.total,
            frequency: m.frequency,
            ci_low: m.ci_low,
            ci_high: m.ci_high,
        }
    }
}

const METRIC_HEADER: &[&str] = &["metric", "count", "total", "frequency", "ci_low", "ci_high"];

#[derive(Serialize)]
struct MismatchRow {
    n: u64,
    row: String,
    #[serde(rename = "L_value")]
    l_value: u8,
    det_value: u8,
    matrix: String,
}

fn cmd_verify(max_n: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    use rayon::prelude::*;
    let sieve = load_sieve(max_n)?;
    let chunk = 1 << 14;
    let parts: Vec<(u64, Vec<MismatchRow>)> = (0..max_n / chunk + 1)
        .into_par_iter()
        .map_init(LCache::new, |cache, b| {
            let mut checks = 0;
            let mut bad = Vec::new();
            for n in (b * chunk).max(1)..=((b + 1) * chunk - 1).min(max_n) {
                let Ok(f) = factor_squarefree(n, &sieve) else { continue };
                let t = build_twist(&f);
                for row in verify_table2_twist(&t, cache) {
                    checks += 1;
                    if !row.equal() {
                        bad.push(MismatchRow {
                            n,
                            row: row.row.to_string(),
                            l_value: row.l_value as u8,
                            det_value: row.det_value as u8,
                            matrix: build_mx(row.row, &t).map(|m| m.to_string()).unwrap_or_default(),
                        });
                    }
                }
            }
            (checks, bad)
        })
        .collect();
    let checks: u64 = parts.iter().map(|p| p.0).sum();
    let bad: Vec<MismatchRow> = parts.into_iter().flat_map(|p| p.1).collect();
    let body = render(
        format,
        cmd,
        "mismatches",
        &bad,
        &["n", "row", "L_value", "det_value", "matrix"],
        json!({ "max_n": max_n, "checked": checks }),
    )?;
    Ok(Outcome {
        passed: bad.is_empty(),
        summary: Some(format!("checked {checks} rows for n <= {max_n}: {} mismatches", bad.len())),
        body,
    })
}

fn cmd_scan(residue: u64, max_n: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let sieve = load_sieve(max_n)?;
    let rep = density::scan(residue, max_n, &sieve)?;
    let rows: Vec<MetricRow> = rep.metrics().into_iter().map(MetricRow::from).collect();
    let body = render(
        format,
        cmd,
        "metrics",
        &rows,
        METRIC_HEADER,
        json!({ "residue": residue, "max_n": max_n, "mismatch_examples": rep.mismatch_examples }),
    )?;
    Ok(Outcome { passed: rep.table2_mismatches == 0 && rep.sel3_violations == 0, summary: None, body })
}

#[derive(Serialize)]
struct CertificateRow {
    n: u64,
    residue: u64,
    row: String,
    selmer_rank3: u8,
    #[serde(rename = "L_value")]
    l_value: u8,
}

fn cmd_certify(residue: u64, max_n: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let sieve = load_sieve(max_n)?;
    let certs = density::certified_table(residue, max_n, &sieve)?;
    let passed = certs.iter().all(|c| c.selmer_rank3);
    let rows: Vec<CertificateRow> = certs
        .into_iter()
        .map(|c| CertificateRow {
            n: c.n,
            residue: c.residue,
            row: c.row.to_string(),
            selmer_rank3: c.selmer_rank3 as u8,
            l_value: c.l_value as u8,
        })
        .collect();
    let body = render(
        format,
        cmd,
        "certificates",
        &rows,
        &["n", "residue", "row", "selmer_rank3", "L_value"],
        json!({ "residue": residue, "max_n": max_n }),
    )?;
    Ok(Outcome { passed, summary: None, body })
}

#[derive(Serialize)]
struct HistogramRow {
    corank: i64,
    count: u64,
    frequency: f64,
}

fn cmd_simulate(row: &str, r: u64, samples: u64, seed: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let label: Table3Label = row.parse()?;
    let cfg = label.config();
    let sieve = load_sieve(SIMULATE_DELTA_LIMIT)?;
    let delta = altsim::delta(&cfg, altsim::DEFAULT_DELTA_BUDGET, &sieve)?;
    let h = corank_distribution_mc(&cfg, r as usize, samples, seed, delta)?;
    let rows: Vec<HistogramRow> = h
        .rows()
        .into_iter()
        .map(|(k, count)| HistogramRow { corank: k, count, frequency: count as f64 / h.total as f64 })
        .collect();
    let body = render(
        format,
        cmd,
        "histogram",
        &rows,
        &["corank", "count", "frequency"],
        json!({
            "label": label.name(),
            "r": r,
            "samples": samples,
            "delta": delta,
            "parity_violations": h.parity_violations,
        }),
    )?;
    Ok(Outcome { passed: h.parity_violations == 0, summary: None, body })
}

#[derive(Serialize)]
struct StationaryRow {
    k: usize,
    probability: f64,
    closed_form: f64,
}

fn cmd_markov(chain: Chain, k_max: usize, tol: f64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let (pi, reference): (Vec<f64>, fn(usize) -> f64) = match chain {
        Chain::Even => (markov_stationary(Parity::Even, k_max, tol)?, alpha),
        Chain::Odd => (markov_stationary(Parity::Odd, k_max, tol)?, alpha),
        Chain::Classrank => (classrank_stationary(k_max, tol)?, gerth_pmf),
    };
    let keep = |k: usize| match chain {
        Chain::Even => k % 2 == 0,
        Chain::Odd => k % 2 == 1,
        Chain::Classrank => true,
    };
    let rows: Vec<StationaryRow> = (0..=k_max)
        .filter(|&k| keep(k))
        .map(|k| StationaryRow { k, probability: pi[k], closed_form: reference(k) })
        .collect();
    let body = render(format, cmd, "stationary", &rows, &["k", "probability", "closed_form"], json!({}))?;
    Ok(Outcome { passed: true, summary: None, body })
}

#[derive(Serialize)]
struct AlphaRow {
    k: usize,
    alpha: f64,
}

fn cmd_alpha(k_max: usize, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let rows: Vec<AlphaRow> = (0..=k_max).map(|k| AlphaRow { k, alpha: alpha(k) }).collect();
    let body = render(format, cmd, "alpha", &rows, &["k", "alpha"], json!({}))?;
    Ok(Outcome { passed: true, summary: None, body })
}

#[derive(Serialize)]
struct Disagreement {
    n: u64,
    redei_g: u8,
    four_rank: u32,
    h: usize,
}

fn cmd_classcheck(max_n: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let sieve = load_sieve(max_n)?;
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for n in 1..=max_n {
        let Ok(f) = factor_squarefree(n, &sieve) else { continue };
        let info = classgroup_oracle(&f)?;
        let g = redei_g(&f);
        checked += 1;
        if g != (info.four_rank == 0) {
            bad.push(Disagreement { n, redei_g: g as u8, four_rank: info.four_rank, h: info.h });
        }
    }
    let body = match format {
        Format::Csv => {
            let mut s = format!("checked: {checked}\n");
            if bad.is_empty() {
                s.push_str("agree: all\n");
            } else {
                let ns: Vec<String> = bad.iter().map(|d| d.n.to_string()).collect();
                s.push_str(&format!("disagree: {}\n", ns.join(",")));
            }
            s.into_bytes()
        }
        Format::Json => json_bytes(json!({
            "meta": meta(cmd),
            "checked": checked,
            "agree": bad.is_empty(),
            "disagreements": bad,
        }))?,
    };
    Ok(Outcome { passed: bad.is_empty(), summary: None, body })
}

fn cmd_census(max_n: u64, format: Format, cmd: &Command) -> CliResult<Outcome> {
    let sieve = load_sieve(max_n)?;
    let census = density::fourrank_census(max_n, &sieve)?;
    let rows: Vec<MetricRow> = census.metrics().into_iter().map(MetricRow::from).collect();
    let gerth: Vec<f64> = (0..census.counts.len()).map(gerth_pmf).collect();
    let body = render(format, cmd, "metrics", &rows, METRIC_HEADER, json!({ "max_n": max_n, "gerth_pmf": gerth }))?;
    Ok(Outcome { passed: true, summary: None, body })
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let f = cli.format;
    let c = &cli.command;
    match c {
        Command::Verify { max_n } => cmd_verify(*max_n, f, c),
        Command::Scan { residue, max_n } => cmd_scan(*residue, *max_n, f, c),
        Command::Certify { residue, max_n } => cmd_certify(*residue, *max_n, f, c),
        Command::Simulate { row, r, samples, seed } => cmd_simulate(row, *r, *samples, *seed, f, c),
        Command::Markov { chain, k_max, tol } => cmd_markov(*chain, *k_max, *tol, f, c),
        Command::Alpha { k_max } => cmd_alpha(*k_max, f, c),
        Command::Classcheck { max_n } => cmd_classcheck(*max_n, f, c),
        Command::Census { max_n } => cmd_census(*max_n, f, c),
    }
}

fn open_out(path: &Path) -> CliResult<File> {
    Ok(File::create(path)?)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    3
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    // Open the destination first so a bad path fails before any work.
    let mut file = cli.out.as_deref().map(open_out).transpose()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| CliError::Args(e.to_string()))?;
    let outcome = pool.install(|| dispatch(cli))?;
    match file.as_mut() {
        Some(f) => f.write_all(&outcome.body)?,
        None => stdout.write_all(&outcome.body)?,
    }
    if let Some(s) = &outcome.summary {
        writeln!(stderr, "{s}")?;
    }
    if outcome.passed {
        Ok(0)
    } else {
        writeln!(stderr, "check failed")?;
        Ok(1)
    }
}
