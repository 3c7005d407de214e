use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use f2p::io::{
    load_matrix, oracle_spectrum, run_partial, write_compare_csv, write_history_csv,
    write_report, write_scan_csv, write_spectrum_csv, Algorithm, RunConfig, RunReport,
};
use f2p::{Error, Result};

/// Environment variable holding the number of threads for inner solves.
const THREADS_VAR: &str = "F2P_NUM_THREADS";

#[derive(Parser)]
#[command(name = "f2p", version, about = "Interior eigenvalues of sparse symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one driver (f2p unless --algorithm says otherwise).
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        algorithm: Option<String>,
    },
    /// FEAST, two-circle FEAST and F2P on the same interval and seed.
    Compare(Common),
    /// All eigenvalues of the interval by a sliding window.
    Sweep(Common),
    /// Response of one circle's rational filter on a grid.
    FilterScan(Common),
    /// Dense reference spectrum, decreasing, for small matrices.
    Oracle {
        matrix: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matrix Market file, `diag:N` or `laplacian:N`.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(short, long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(short, long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(short, long)]
    radius: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    #[arg(short, long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// CSV path for the per-iteration history (or the scan).
    #[arg(long)]
    history: Option<PathBuf>,
    /// Decreasing reference eigenvalues, one per line.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Solve the shifted systems of each filter application in parallel.
    #[arg(long)]
    parallel_inner: bool,
    /// Any config key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn into_config(self, algorithm: Algorithm) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.algorithm = algorithm;
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k, v)?;
        }
        if let Some(v) = self.matrix {
            cfg.matrix = v;
        }
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.b {
            cfg.b = v;
        }
        if self.radius.is_some() {
            cfg.radius = self.radius;
        }
        if self.center.is_some() {
            cfg.center = self.center;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.output.is_some() {
            cfg.output = self.output;
        }
        if self.history.is_some() {
            cfg.history = self.history;
        }
        if self.reference.is_some() {
            cfg.reference = self.reference;
        }
        cfg.parallel_inner |= self.parallel_inner;
        Ok(cfg)
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var(THREADS_VAR) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("cannot size thread pool: {e}");
                }
            }
            _ => log::warn!("ignoring {THREADS_VAR}={v}"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    if std::env::var_os(THREADS_VAR).is_some() {
        log::warn!("{THREADS_VAR} has no effect without the `parallel` feature");
    }
}

fn write_outputs(cfg: &RunConfig, report: &RunReport) -> Result<()> {
    if let Some(p) = &cfg.output {
        write_report(report, p)?;
    }
    if let Some(p) = &cfg.history {
        match (&report.compare, cfg.algorithm) {
            (Some(h), _) => write_compare_csv(h, p)?,
            (None, Algorithm::FilterScan) => write_scan_csv(&report.scan, p)?,
            _ => write_history_csv(&report.err_hist, &report.num_ay_hist, p)?,
        }
    }
    Ok(())
}

fn summarize(report: &RunReport) {
    if !report.scan.is_empty() {
        for [l, h] in &report.scan {
            println!("{l:>12.6} {h:>14.6e}");
        }
        return;
    }
    let m = &report.metrics;
    println!(
        "n = {}, eig_out = {}, tau_r = {:.3e}, outer iterations = {}, max inner iterations = {}",
        report.n,
        m.eig_out,
        m.tau_r,
        report.err_hist.len(),
        m.iter_max_inner
    );
    if let Some(t) = m.tau_lambda {
        let kind = if m.tau_lambda_absolute { "absolute" } else { "relative" };
        println!("tau_lambda ({kind}) = {t:.3e}");
    }
    for (v, r) in report.eigenvalues.iter().zip(&report.residuals) {
        println!("{v:>24.16e} {r:>12.3e}");
    }
}

fn run_config(cfg: RunConfig) -> Result<()> {
    let (report, status) = run_partial(&cfg);
    let written = write_outputs(&cfg, &report);
    status?;
    written?;
    summarize(&report);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { common, algorithm } => {
            let alg = match algorithm {
                Some(s) => Some(s.parse::<Algorithm>()?),
                None => None,
            };
            let file_alg = match &common.config {
                Some(p) => RunConfig::load(p)?.algorithm,
                None => Algorithm::F2p,
            };
            run_config(common.into_config(alg.unwrap_or(file_alg))?)
        }
        Command::Compare(c) => run_config(c.into_config(Algorithm::Compare)?),
        Command::Sweep(c) => run_config(c.into_config(Algorithm::Sweep)?),
        Command::FilterScan(c) => run_config(c.into_config(Algorithm::FilterScan)?),
        Command::Oracle { matrix, output } => {
            let a = load_matrix(&matrix)?;
            let v = oracle_spectrum(&a)?;
            write_spectrum_csv(&v, &output)?;
            println!("wrote {} eigenvalues to {}", v.len(), output.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_threads();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
