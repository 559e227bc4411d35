//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage, 3 data integrity,
//! 4 insufficient precision.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::basis::{cache_clear, cache_info, BasisCache, Space};
use crate::error::{Error, Result};
use crate::leveldata::{get_level, uncorrected_level, validate, FIXTURE_VERSION};
use crate::verify::{
    al_identity_check, congruence_scan, default_residues, duality_check, genfun_check, scan_all, theta_check,
    up_lemma_check, ScanReport, Sharpness,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

/// Default cache directory, relative to the working directory.
pub const DEFAULT_CACHE_DIR: &str = ".sharpbasis-cache";
/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "SHARPBASIS_CACHE";

/// Smallest accepted `--prec`.
pub const MIN_PREC: i64 = 16;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedLevel(_)
        | Error::OddWeight(_)
        | Error::IndexBelowRange { .. }
        | Error::Parse { .. }
        | Error::UnsupportedPair { .. }
        | Error::InvalidArgument(_) => EXIT_USAGE,
        Error::PrecisionExceeded { .. } | Error::InsufficientPrecision { .. } => EXIT_PRECISION,
        Error::ZeroLeadingTerm
        | Error::FractionalValuation { .. }
        | Error::MixedWeight { .. }
        | Error::InvalidCusp { .. }
        | Error::IntegralityViolation { .. }
        | Error::NonUnitPivot { .. }
        | Error::NoConsistentSign { .. }
        | Error::Fixture(_)
        | Error::Cache(_)
        | Error::Io(_)
        | Error::Json(_) => EXIT_INTEGRITY,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sharpbasis",
    version,
    about = "Canonical bases of weakly holomorphic modular forms on Gamma_0(N), N in {6, 10, 12, 18}",
    after_help = "Cache directory: --cache-dir, else $SHARPBASIS_CACHE, else ./.sharpbasis-cache. \
                  --no-cache keeps everything in memory.\n\
                  Exit codes: 0 pass, 1 check failed, 2 usage, 3 data integrity, 4 precision."
)]
struct Cli {
    /// Ladder cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Do not read or write the ladder cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the q-expansion of f_{k,m} (space M) or g_{k,m} (space S).
    Expand(ExpandArgs),
    /// Run one verification suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Congruence scan of a_0(p^a r, p^b s); all eight pairs without --level/--p.
    Scan(ScanArgs),
    /// Check the level fixtures.
    Validate(ValidateArgs),
    /// Inspect or clear the ladder cache.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    level: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    weight: i64,
    #[arg(long, default_value = "M")]
    space: Space,
    #[arg(long, allow_negative_numbers = true)]
    m: i64,
    /// Number of nonzero terms to print.
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Absolute precision; raised until enough terms are known.
    #[arg(long, default_value_t = MIN_PREC)]
    prec: i64,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// a_k(m, n) = -b_{2-k}(n, m) and the vanishing constant terms.
    Duality {
        #[arg(long)]
        level: i64,
        #[arg(long, allow_negative_numbers = true)]
        weight: i64,
        /// Sets both --mmax and --nmax.
        #[arg(long)]
        window: Option<i64>,
        #[arg(long)]
        mmax: Option<i64>,
        #[arg(long)]
        nmax: Option<i64>,
    },
    /// Two-variable generating function identity.
    Genfun {
        #[arg(long)]
        level: i64,
        #[arg(long, allow_negative_numbers = true)]
        weight: i64,
        #[arg(long, default_value_t = 8)]
        mmax: i64,
        #[arg(long, default_value_t = 32)]
        zprec: i64,
    },
    /// theta(f_{0,m}) = -m g_{2,m} and the named eta quotients.
    Theta {
        #[arg(long)]
        level: i64,
        #[arg(long, default_value_t = 20)]
        mmax: i64,
        #[arg(long, default_value_t = 60)]
        prec: i64,
    },
    /// U_p level lowering from 12 or 18 to 6.
    Uplemma {
        #[arg(long)]
        level: i64,
        #[arg(long, default_value_t = 24)]
        mmax: i64,
        #[arg(long, default_value_t = 40)]
        terms: i64,
    },
    /// Atkin-Lehner identities behind the U_p congruences.
    Al {
        #[arg(long)]
        level: i64,
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 5, 7])]
        r: Vec<i64>,
        #[arg(long, default_value_t = 2)]
        amax: u32,
        #[arg(long, default_value_t = 40)]
        terms: i64,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, requires = "p")]
    level: Option<i64>,
    #[arg(long, requires = "level")]
    p: Option<u64>,
    #[arg(long, default_value_t = 4)]
    amax: u32,
    #[arg(long, default_value_t = 4)]
    bmax: u32,
    /// Residues r (default: first three prime to p).
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<i64>>,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<i64>>,
    #[arg(long, default_value_t = 400)]
    ncap: i64,
    /// Keep only rows under a weaker bound; fails if there are none.
    #[arg(long, requires = "level")]
    require_weak: bool,
    /// Also write the rows to this file: JSON if it ends in .json, CSV otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// One level; all levels when omitted.
    #[arg(long)]
    level: Option<i64>,
    /// Use the data as printed, before corrections.
    #[arg(long)]
    uncorrected: bool,
    #[arg(long, default_value_t = 64)]
    prec: i64,
}

#[derive(Subcommand, Debug)]
enum CacheCmd {
    /// List stored ladders.
    Info,
    /// Remove stored ladders.
    Clear,
}

/// Resolved options shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
}

impl CliConfig {
    fn from_cli(cli: &Cli) -> Self {
        let cache_dir = if cli.no_cache {
            None
        } else {
            Some(cli.cache_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)))
        };
        CliConfig { cache_dir, format: cli.format }
    }

    fn cache(&self) -> Result<BasisCache> {
        match &self.cache_dir {
            Some(d) => BasisCache::with_dir(d),
            None => Ok(BasisCache::new()),
        }
    }
}

/// Machine-readable output of every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool_version: String,
    pub fixture_version: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<CoeffEntry>>,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub n: i64,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub failures: u64,
    pub precision: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sharpness: Vec<Sharpness>,
}

impl Envelope {
    fn new(command: &str, params: BTreeMap<String, Value>, summary: Summary) -> Self {
        Envelope {
            tool_version: crate::TOOL_VERSION.to_string(),
            fixture_version: FIXTURE_VERSION,
            command: command.into(),
            params,
            rows: None,
            coeffs: None,
            summary,
        }
    }
}

fn json_line(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

struct Output {
    text: String,
    code: i32,
}

/// Runs the tool on `args` (including the program name), writing results
/// to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = CliConfig::from_cli(&cli);
    match dispatch(&cli.command, &config) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {e}", e.kind());
            if let Error::InsufficientPrecision { needed: Some(n), .. } = &e {
                let _ = writeln!(err, "hint: a precision of at least {n} would suffice");
            }
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, cfg: &CliConfig) -> Result<Output> {
    match cmd {
        Command::Expand(a) => expand(a, cfg),
        Command::Verify(v) => verify(v, cfg),
        Command::Scan(s) => scan(s, cfg),
        Command::Validate(v) => validate_cmd(v, cfg),
        Command::Cache(c) => cache_cmd(c, cfg),
    }
}

fn with_cache<T>(cfg: &CliConfig, f: impl FnOnce(&BasisCache) -> Result<T>) -> Result<T> {
    let cache = cfg.cache()?;
    let out = f(&cache)?;
    cache.persist()?;
    Ok(out)
}

fn expand(a: &ExpandArgs, cfg: &CliConfig) -> Result<Output> {
    if a.prec < MIN_PREC {
        return Err(Error::InvalidArgument(format!("--prec must be at least {MIN_PREC}")));
    }
    if a.terms == 0 {
        return Err(Error::InvalidArgument("--terms must be positive".into()));
    }
    get_level(a.level)?;
    let element = with_cache(cfg, |cache| {
        let mut prec = a.prec;
        loop {
            let e = cache.element(a.level, a.weight, a.space, a.m, prec)?;
            let s = e.expansion.truncate(prec);
            if s.terms().count() >= a.terms || prec >= 4096 {
                return Ok(s);
            }
            prec *= 2;
        }
    })?;
    let shown: Vec<_> = element.terms().take(a.terms).collect();
    let params = BTreeMap::from([
        ("level".to_string(), json!(a.level)),
        ("weight".to_string(), json!(a.weight)),
        ("space".to_string(), json!(a.space.to_string())),
        ("m".to_string(), json!(a.m)),
        ("terms".to_string(), json!(a.terms)),
    ]);
    let text = match cfg.format {
        Format::Text => element.render_terms(a.terms) + "\n",
        Format::Csv => {
            let mut s = String::from("n,coeff\n");
            for (n, c) in &shown {
                s += &format!("{n},{c}\n");
            }
            s
        }
        Format::Json => {
            let mut env = Envelope::new(
                "expand",
                params,
                Summary { pass: true, failures: 0, precision: element.prec(), sharpness: Vec::new() },
            );
            env.coeffs = Some(shown.iter().map(|(n, c)| CoeffEntry { n: *n, c: c.to_string() }).collect());
            json_line(&env)?
        }
    };
    Ok(Output { text, code: EXIT_PASS })
}

fn verify(v: &VerifyCmd, cfg: &CliConfig) -> Result<Output> {
    let report = with_cache(cfg, |cache| match v {
        VerifyCmd::Duality { level, weight, window, mmax, nmax } => {
            let w = window.unwrap_or(15);
            duality_check(cache, *level, *weight, mmax.unwrap_or(w), nmax.unwrap_or(w))
        }
        VerifyCmd::Genfun { level, weight, mmax, zprec } => {
            if *zprec < MIN_PREC {
                return Err(Error::InvalidArgument(format!("--zprec must be at least {MIN_PREC}")));
            }
            genfun_check(cache, *level, *weight, *mmax, *zprec)
        }
        VerifyCmd::Theta { level, mmax, prec } => {
            if *prec < MIN_PREC {
                return Err(Error::InvalidArgument(format!("--prec must be at least {MIN_PREC}")));
            }
            theta_check(cache, *level, *mmax, *prec)
        }
        VerifyCmd::Uplemma { level, mmax, terms } => up_lemma_check(cache, *level, *mmax, *terms),
        VerifyCmd::Al { level, p, r, amax, terms } => al_identity_check(cache, *level, *p, r, *amax, *terms),
    })?;
    let code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
    let text = match cfg.format {
        Format::Json => {
            let mut env = Envelope::new(
                &format!("verify {}", report.check),
                report.params.clone(),
                Summary {
                    pass: report.passed,
                    failures: report.failures,
                    precision: report.precision,
                    sharpness: Vec::new(),
                },
            );
            env.rows = Some(serde_json::to_value(vec![&report])?);
            json_line(&env)?
        }
        _ => report.render_text(),
    };
    Ok(Output { text, code })
}

fn scan(a: &ScanArgs, cfg: &CliConfig) -> Result<Output> {
    let reports: Vec<ScanReport> = with_cache(cfg, |cache| match (a.level, a.p) {
        (Some(level), Some(p)) => {
            let r = a.r.clone().unwrap_or_else(|| default_residues(p));
            let s = a.s.clone().unwrap_or_else(|| default_residues(p));
            Ok(vec![congruence_scan(cache, level, p, a.amax, a.bmax, &r, &s, a.ncap, a.require_weak)?])
        }
        _ => {
            if a.r.is_some() || a.s.is_some() {
                return Err(Error::InvalidArgument("--r and --s need --level and --p".into()));
            }
            scan_all(cache, a.amax, a.bmax, a.ncap)
        }
    })?;
    let pass = reports.iter().all(|r| r.report.passed);
    let code = if pass { EXIT_PASS } else { EXIT_FAIL };
    let mut params = BTreeMap::from([
        ("a_max".to_string(), json!(a.amax)),
        ("b_max".to_string(), json!(a.bmax)),
        ("n_cap".to_string(), json!(a.ncap)),
        ("require_weak".to_string(), json!(a.require_weak)),
    ]);
    if let (Some(level), Some(p)) = (a.level, a.p) {
        params.insert("level".into(), json!(level));
        params.insert("p".into(), json!(p));
    }
    let envelope = || -> Result<String> {
        let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter()).collect();
        let mut env = Envelope::new(
            "scan",
            params.clone(),
            Summary {
                pass,
                failures: reports.iter().map(|r| r.report.failures).sum(),
                precision: reports.iter().map(|r| r.report.precision).max().unwrap_or(0),
                sharpness: reports.iter().flat_map(|r| r.sharpness.iter().cloned()).collect(),
            },
        );
        env.rows = Some(serde_json::to_value(rows)?);
        json_line(&env)
    };
    let csv = || -> Result<String> {
        let mut s = String::new();
        for (i, r) in reports.iter().enumerate() {
            let body = r.to_csv()?;
            // one header for the whole table
            s += if i == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) };
        }
        Ok(s)
    };
    if let Some(path) = &a.report {
        let body = if path.extension().is_some_and(|e| e == "json") { envelope()? } else { csv()? };
        std::fs::write(path, body)?;
    }
    let text = match cfg.format {
        Format::Json => envelope()?,
        Format::Csv => csv()?,
        Format::Text => reports.iter().map(ScanReport::render_text).collect::<Vec<_>>().join("\n"),
    };
    Ok(Output { text, code })
}

fn validate_cmd(a: &ValidateArgs, cfg: &CliConfig) -> Result<Output> {
    let levels: Vec<i64> = match a.level {
        Some(n) => vec![n],
        None => crate::leveldata::SUPPORTED_LEVELS.iter().map(|&n| n as i64).collect(),
    };
    let mut reports = Vec::new();
    for n in levels {
        let data = if a.uncorrected { uncorrected_level(n)? } else { get_level(n)?.clone() };
        reports.push(validate(&data, a.prec));
    }
    let pass = reports.iter().all(|r| r.passed());
    let failures: u64 = reports.iter().map(|r| r.failures().count() as u64).sum();
    let text = match cfg.format {
        Format::Json => {
            let mut env = Envelope::new(
                "validate",
                BTreeMap::from([
                    ("uncorrected".to_string(), json!(a.uncorrected)),
                    ("prec".to_string(), json!(a.prec)),
                ]),
                Summary { pass, failures, precision: a.prec, sharpness: Vec::new() },
            );
            env.rows = Some(serde_json::to_value(&reports)?);
            json_line(&env)?
        }
        _ => {
            let mut s = String::new();
            for r in &reports {
                for c in &r.checks {
                    let status = if c.passed { "ok" } else { "FAIL" };
                    let why = c.error.as_deref().unwrap_or(&c.detail);
                    s += &format!("N={:<3} {:<4} {:<40} {}\n", r.level, status, c.name, why);
                }
            }
            s
        }
    };
    // a failing fixture is a data-integrity problem
    let code = if pass { EXIT_PASS } else { EXIT_INTEGRITY };
    Ok(Output { text, code })
}

fn cache_cmd(c: &CacheCmd, cfg: &CliConfig) -> Result<Output> {
    let Some(dir) = &cfg.cache_dir else {
        return Err(Error::InvalidArgument("no cache directory (--no-cache given)".into()));
    };
    let text = match c {
        CacheCmd::Info => {
            let entries = cache_info(dir)?;
            match cfg.format {
                Format::Json => json_line(&entries)?,
                _ => {
                    let mut s = format!("{}\n", dir.display());
                    for e in &entries {
                        s += &format!(
                            "{:<28} N={:<3} k={:<3} {} rel_prec={:<5} elements={:<5} {} bytes\n",
                            e.file, e.level, e.weight, e.space, e.rel_prec, e.elements, e.bytes
                        );
                    }
                    s
                }
            }
        }
        CacheCmd::Clear => format!("removed {} files\n", cache_clear(dir)?),
    };
    Ok(Output { text, code: EXIT_PASS })
}
