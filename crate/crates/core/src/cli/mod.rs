//! `permlab` command-line front end.
//!
//! Every subcommand echoes its resolved configuration to standard error;
//! machine output goes to standard output or `--out`. Exit codes: 0 success,
//! 1 runtime or verification failure, 2 usage or guard error.

mod config;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

pub use config::ConfigFile;

use crate::domain::{
    format_exactish, format_general, parse_matrix, Distribution, ModelSpec, ScaledValue,
};
use crate::error::Error;
use crate::experiments::{
    concentration_sweep_with, estimate_moments_with, write_csv, write_csv_to, RRule, SweepPlan,
    SweepRow,
};
use crate::model::{sample_constrained_matrix, TrialSeed};
use crate::moments::moment_report;
use crate::permanent::{per_naive, per_ryser};

pub const WORKERS_ENV: &str = "PERMLAB_WORKERS";

const DEFAULT_DIST: &str = "const:1";
const DEFAULT_TRIALS: usize = 1000;
const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "permlab",
    version,
    about = "Permanents of row-constrained random matrices"
)]
pub struct Cli {
    /// Flat key=value file supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Naive,
    Ryser,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Algorithm as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permanent of a matrix file.
    Per {
        /// Matrix file: one row per line, whitespace-separated.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        algo: Option<Algorithm>,
    },
    /// Draw one (X, Y) sample.
    Sample {
        #[arg(long)]
        n: Option<usize>,
        /// Single count for every row, or a comma list of n counts.
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trial: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form moments, bounds and growth diagnostics.
    Moments {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        dist: Option<String>,
    },
    /// Monte Carlo estimate of the mean and variance of T/μ for one spec.
    Mc {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concentration sweep over several n.
    Sweep {
        /// Comma list of dimensions.
        #[arg(long)]
        n: Option<String>,
        /// const:k, sqrt-log, power:p or explicit:N=r1,..;M=...
        #[arg(long = "r-rule")]
        r_rule: Option<String>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check closed forms against the enumeration oracles for n ≤ 5.
    Verify,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::File(_) => 1,
            _ => 2,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn required<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError {
        code: 2,
        message: format!("missing --{key} (flag or config key)"),
    })
}

fn parse_r(text: &str, n: usize) -> Result<Vec<usize>, Error> {
    let counts: Vec<usize> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad row count {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    match counts.len() {
        1 => Ok(vec![counts[0]; n]),
        len if len == n => Ok(counts),
        len => Err(Error::Argument(format!(
            "--r lists {len} counts, expected 1 or {n}"
        ))),
    }
}

fn parse_ns(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension {t:?}")))
        })
        .collect()
}

fn resolve_workers(cfg: &ConfigFile, flag: Option<usize>) -> CliResult<usize> {
    let from_env = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok());
    let workers = cfg
        .resolve(flag, "workers")?
        .or(from_env)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::Argument("--workers must be positive".into()).into());
    }
    Ok(workers)
}

struct SpecArgs {
    n: usize,
    r: String,
    dist: Distribution,
}

impl SpecArgs {
    fn resolve(
        cfg: &ConfigFile,
        n: Option<usize>,
        r: Option<String>,
        dist: Option<String>,
    ) -> CliResult<Self> {
        let n = required(cfg.resolve(n, "n")?, "n")?;
        let r = required(cfg.resolve(r, "r")?, "r")?;
        let dist: Distribution = cfg
            .resolve(dist, "dist")?
            .unwrap_or_else(|| DEFAULT_DIST.to_string())
            .parse()?;
        Ok(SpecArgs { n, r, dist })
    }

    fn spec(&self) -> CliResult<ModelSpec> {
        Ok(ModelSpec::new(
            self.n,
            parse_r(&self.r, self.n)?,
            self.dist,
        )?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::File(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn emit_csv(out: Option<&Path>, rows: &[SweepRow]) -> CliResult {
    match out {
        Some(path) => write_csv(rows, path)?,
        None => write_csv_to(rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn show_path(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn scaled_line(name: &str, v: &ScaledValue) -> String {
    let log = v
        .log_mag()
        .map_or_else(|| "-inf".to_string(), |l| format_general(l, 17));
    format!("{name:<12} {}  (log {log})\n", v.to_decimal_string(17))
}

fn cmd_per(cfg: &ConfigFile, input: Option<PathBuf>, algo: Option<Algorithm>) -> CliResult {
    let input = required(cfg.resolve(input, "input")?, "input")?;
    let algo = cfg.resolve(algo, "algo")?.unwrap_or(Algorithm::Ryser);
    eprintln!("permlab per: input={} algo={algo:?}", input.display());
    let text = std::fs::read_to_string(&input)
        .map_err(|e| Error::File(format!("{}: {e}", input.display())))?;
    let m = parse_matrix(&text)?;
    let per = match algo {
        Algorithm::Naive => per_naive(&m)?,
        Algorithm::Ryser => per_ryser(&m)?,
    };
    let log = per
        .log_mag()
        .map_or_else(|| "-inf".to_string(), |l| format_general(l, 17));
    emit(
        None,
        &format!("per = {}  log_per = {log}\n", per.to_decimal_string(15)),
    )
}

fn cmd_sample(
    cfg: &ConfigFile,
    args: SpecArgs,
    seed: Option<u64>,
    trial: Option<u64>,
    out: Option<PathBuf>,
) -> CliResult {
    let spec = args.spec()?;
    let seed = cfg.resolve(seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let trial = cfg.resolve(trial, "trial")?.unwrap_or(0);
    let out = cfg.resolve(out, "out")?;
    eprintln!(
        "permlab sample: spec={} seed={seed} trial={trial} out={}",
        spec.label(),
        show_path(&out)
    );
    let (x, y) = sample_constrained_matrix(&spec, TrialSeed::new(seed, trial));
    emit(out.as_deref(), &format!("{}\n{}", x.to_text(), y.to_text()))
}

fn cmd_moments(args: SpecArgs) -> CliResult {
    let spec = args.spec()?;
    eprintln!("permlab moments: spec={}", spec.label());
    let report = moment_report(&spec);
    let (nu, delta) = spec.dist().moments();
    let mut text = String::new();
    text += &format!("{:<12} {}\n", "spec", spec.label());
    text += &format!("{:<12} {}\n", "nu", format_general(nu, 17));
    text += &format!("{:<12} {}\n", "delta", format_general(delta, 17));
    text += &format!("{:<12} {}\n", "r_low", spec.r_low());
    text += &format!("{:<12} {}\n", "r_up", spec.r_up());
    text += &scaled_line("mu_n", &report.mu_n);
    text += &format!(
        "{:<12} {}\n",
        "mu_n_exact",
        format_exactish(report.mu_n.to_f64())
    );
    match &report.vdw {
        Some(v) => text += &scaled_line("vdw", v),
        None => text += &format!("{:<12} n/a (heterogeneous rows)\n", "vdw"),
    }
    match &report.alpha_beta {
        Ok(ab) => {
            for (name, v) in [
                ("alpha_up", ab.alpha_up),
                ("beta_up", ab.beta_up),
                ("alpha_low", ab.alpha_low),
                ("beta_low", ab.beta_low),
            ] {
                text += &format!("{name:<12} {}\n", format_general(v, 17));
            }
        }
        Err(e) => text += &format!("{:<12} n/a ({e})\n", "alpha_beta"),
    }
    match &report.bounds {
        Ok(b) => {
            text += &format!("{:<12} {}\n", "bound_low", format_general(b.lower, 17));
            text += &format!("{:<12} {}\n", "bound_up", format_general(b.upper, 17));
        }
        Err(e) => text += &format!("{:<12} n/a ({e})\n", "bounds"),
    }
    match report.exact_ratio {
        Some(x) => text += &format!("{:<12} {}\n", "exact_ratio", format_general(x, 17)),
        None => text += &format!("{:<12} n/a\n", "exact_ratio"),
    }
    let d = report.diagnostics;
    text += &format!("{:<12} {}\n", "a_n", format_general(d.a_n, 17));
    text += &format!("{:<12} {}\n", "c_n", format_general(d.c_n, 17));
    match d.theta {
        Some(t) => text += &format!("{:<12} {}\n", "theta", format_general(t, 17)),
        None => text += &format!("{:<12} n/a\n", "theta"),
    }
    emit(None, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    cfg: &ConfigFile,
    args: SpecArgs,
    trials: Option<usize>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> CliResult {
    let spec = args.spec()?;
    let trials = cfg.resolve(trials, "trials")?.unwrap_or(DEFAULT_TRIALS);
    let seed = cfg.resolve(seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let epsilon = cfg
        .resolve(epsilon, "epsilon")?
        .unwrap_or(crate::experiments::DEFAULT_EPSILON);
    let workers = resolve_workers(cfg, workers)?;
    let out = cfg.resolve(out, "out")?;
    eprintln!(
        "permlab mc: spec={} trials={trials} seed={seed} epsilon={epsilon} workers={workers} out={}",
        spec.label(),
        show_path(&out)
    );
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")).into());
    }
    let batch = estimate_moments_with(&spec, trials, seed, Some(workers))?;
    let row = SweepRow::from_batch(&batch, epsilon);
    eprintln!(
        "  mean={} var={} p_dev={}",
        format_general(row.summary.mean, 6),
        format_general(row.summary.variance, 6),
        format_general(row.p_dev, 6)
    );
    emit_csv(out.as_deref(), &[row])
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    cfg: &ConfigFile,
    ns: Option<String>,
    r_rule: Option<String>,
    dist: Option<String>,
    trials: Option<usize>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> CliResult {
    let ns = parse_ns(&required(cfg.resolve(ns, "n")?, "n")?)?;
    let r_rule: RRule = required(cfg.resolve(r_rule, "r-rule")?, "r-rule")?.parse()?;
    let dist: Distribution = cfg
        .resolve(dist, "dist")?
        .unwrap_or_else(|| DEFAULT_DIST.to_string())
        .parse()?;
    let plan = SweepPlan {
        ns,
        r_rule,
        dist,
        trials: cfg.resolve(trials, "trials")?.unwrap_or(DEFAULT_TRIALS),
        master_seed: cfg.resolve(seed, "seed")?.unwrap_or(DEFAULT_SEED),
        epsilon: cfg
            .resolve(epsilon, "epsilon")?
            .unwrap_or(crate::experiments::DEFAULT_EPSILON),
    };
    let workers = resolve_workers(cfg, workers)?;
    let out = cfg.resolve(out, "out")?;
    let ns: Vec<String> = plan.ns.iter().map(|n| n.to_string()).collect();
    eprintln!(
        "permlab sweep: n={} r-rule={} dist={} trials={} seed={} epsilon={} workers={workers} out={}",
        ns.join(","),
        plan.r_rule,
        plan.dist,
        plan.trials,
        plan.master_seed,
        plan.epsilon,
        show_path(&out)
    );
    let rows = concentration_sweep_with(&plan, Some(workers), |row| {
        eprintln!(
            "  n={} r={}..{} mean={} var={} p_dev={}",
            row.n,
            row.r_low,
            row.r_up,
            format_general(row.summary.mean, 6),
            format_general(row.summary.variance, 6),
            format_general(row.p_dev, 6)
        );
    })?;
    emit_csv(out.as_deref(), &rows)
}

fn cmd_verify() -> CliResult {
    eprintln!(
        "permlab verify: n<={} tolerance={}",
        verify::VERIFY_MAX_N,
        verify::VERIFY_TOLERANCE
    );
    let outcomes = verify::run_suite()?;
    let mut text = String::new();
    for o in &outcomes {
        text += &o.line;
        text.push('\n');
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    text += &format!("{} checks, {} failed\n", outcomes.len(), failed);
    emit(None, &text)?;
    if failed > 0 {
        return Err(CliError {
            code: 1,
            message: format!("{failed} verification check(s) failed"),
        });
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Per { input, algo } => cmd_per(&cfg, input, algo),
        Command::Sample {
            n,
            r,
            dist,
            seed,
            trial,
            out,
        } => cmd_sample(&cfg, SpecArgs::resolve(&cfg, n, r, dist)?, seed, trial, out),
        Command::Moments { n, r, dist } => cmd_moments(SpecArgs::resolve(&cfg, n, r, dist)?),
        Command::Mc {
            n,
            r,
            dist,
            trials,
            seed,
            epsilon,
            workers,
            out,
        } => cmd_mc(
            &cfg,
            SpecArgs::resolve(&cfg, n, r, dist)?,
            trials,
            seed,
            epsilon,
            workers,
            out,
        ),
        Command::Sweep {
            n,
            r_rule,
            dist,
            trials,
            seed,
            epsilon,
            workers,
            out,
        } => cmd_sweep(&cfg, n, r_rule, dist, trials, seed, epsilon, workers, out),
        Command::Verify => cmd_verify(),
    }
}
