use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bounds_cli::*;
use clap::{Parser, Subcommand};
use code_oracle::Codebook;
use log::{info, warn};
use numeric_kernels::OptimizerConfig;

/// Error-exponent bounds for discrete memoryless channels.
///
/// Set EBOUND_THREADS to fix the number of worker threads.
#[derive(Parser)]
#[command(name = "ebound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a specification file.
    Validate { spec: PathBuf },
    /// Tabulate bounds on the specification's rate grid.
    Bounds {
        spec: PathBuf,
        /// Comma-separated bound names; all applicable bounds by default.
        #[arg(long, value_delimiter = ',')]
        which: Vec<Bound>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, conflicts_with = "nats")]
        bits: bool,
        #[arg(long)]
        nats: bool,
    },
    /// Curve set for a binary symmetric channel.
    FigureBsc {
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Finite-length anchors from random constant-composition codebooks.
    Oracle {
        spec: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "M")]
        m: Option<usize>,
        /// `a..b` or a comma-separated list; may be empty.
        #[arg(long, default_value = "")]
        seeds: String,
        /// Explicit codebook as comma-separated words of input digits.
        #[arg(long, conflicts_with_all = ["n", "m"])]
        words: Option<String>,
        #[arg(long)]
        mc_trials: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load(path: &Path) -> Result<ChannelSpec, CliError> {
    parse_spec(&read(path)?).map_err(|e| match e {
        CliError::Spec { line, message } => CliError::Spec { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse seeds {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn parse_words(s: &str, inputs: usize) -> Result<Codebook, CliError> {
    let words = s
        .split(',')
        .map(|w| {
            w.trim()
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| CliError::Usage(format!("bad symbol {c:?} in {w:?}"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Codebook::new(words, inputs).map_err(|e| CliError::Usage(e.to_string()))
}

fn report(table: &CurveTable) -> i32 {
    for w in &table.warnings {
        warn!("{w}");
    }
    for n in &table.notes {
        info!("{n}");
    }
    for f in &table.flags {
        if f.ok {
            info!("flag ok: {} ({})", f.name, f.detail);
        } else {
            warn!("flag FAILED: {} ({})", f.name, f.detail);
        }
    }
    if table.void {
        EXIT_VOID
    } else {
        0
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { spec } => {
            let s = load(&spec)?;
            println!(
                "{}: valid ({}x{} channel, {} rates declared in {})",
                spec.display(),
                s.channel.inputs(),
                s.channel.outputs(),
                s.rates.len(),
                s.unit
            );
            Ok(0)
        }
        Command::Bounds { spec, which, out, bits, nats } => {
            let s = load(&spec)?;
            let which: BTreeSet<Bound> = if which.is_empty() { default_bounds(&s) } else { which.into_iter().collect() };
            let table = run_suite(&s, &which)?;
            let unit = if bits {
                RateUnit::Bits
            } else if nats {
                RateUnit::Nats
            } else {
                s.unit
            };
            write(&out, &table.in_unit(unit).to_csv())?;
            Ok(report(&table))
        }
        Command::FigureBsc { p, out, restarts } => {
            if !(p > 0.0 && p < 0.5) {
                return Err(CliError::Usage(format!("--p must lie in (0, 1/2), got {p}")));
            }
            let mut cfg = OptimizerConfig::default();
            if let Some(r) = restarts {
                cfg.restarts = r;
            }
            let table = figure_bsc(p, &cfg)?;
            write_figure(&table, &out)?;
            println!("wrote {}", out.display());
            Ok(report(&table))
        }
        Command::Oracle { spec, n, m, seeds, words, mc_trials, out } => {
            let s = load(&spec)?;
            let opts = OracleOptions { mc_trials, ..OracleOptions::default() };
            let rep = match words {
                Some(w) => oracle_codebook(&s, &parse_words(&w, s.channel.inputs())?, &opts)?,
                None => {
                    let (Some(n), Some(m)) = (n, m) else {
                        return Err(CliError::Usage("oracle needs --n and --M, or --words".into()));
                    };
                    oracle_cmd(&s, n, m, &parse_seeds(&seeds)?, &opts)?
                }
            };
            let text = rep.render();
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            if rep.all_within_bound() {
                Ok(0)
            } else {
                warn!("some anchors exceed the sphere-packing value plus slack");
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("EBOUND_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not size the worker pool: {e}");
        }
    }
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
