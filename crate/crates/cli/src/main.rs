//! `occuthresh` command-line driver.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or domain error, 3 failed
//! verification (the witness is printed on stderr).

mod manifest;

use clap::{Args, Parser, Subcommand};
use manifest::{now_ms, sidecar_path, RunManifest};
use occuthresh::cycles::{census_correlation, census_sweep, poisson_gof, CycleCensus};
use occuthresh::instances::{deserialize, sample_configuration, sample_simple_counted, serialize, Params};
use occuthresh::moments::{moment_report, threshold_dstar};
use occuthresh::occupancy::{count_solutions_capped, estimate_sat_probability, write_sat_csv, DEFAULT_CAP};
use occuthresh::sdpi::{contraction_generic, contraction_occupation, parse_channel_file, verify_k4};
use occuthresh::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "occuthresh", version, about = "Thresholds, moments and contraction coefficients of random occupation problems")]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true, env = "OCCUTHRESH_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold degree d* for k
    Threshold(ThresholdArgs),
    /// Monte Carlo satisfiability fractions
    Satprob(SatprobArgs),
    /// Short-cycle census against the Poisson limit
    Cycles(CyclesArgs),
    /// Exact and asymptotic moment report
    Moments(MomentsArgs),
    /// Contraction coefficient of a channel read from a file
    Sdpi(SdpiArgs),
    /// Grid certificate for k = 4
    #[command(name = "verify-k4")]
    VerifyK4(VerifyK4Args),
    /// Measured supremum of the occupation ratio against its conjectured value
    Conjecture(ConjectureArgs),
    /// Sample one configuration
    Sample(SampleArgs),
    /// Count solutions of a stored configuration
    Count(CountArgs),
}

#[derive(Args, Serialize)]
struct ThresholdArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SatprobArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Comma-separated list of sizes
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long)]
    trials: u32,
    #[arg(long)]
    #[serde(skip)]
    seed: u64,
    /// Largest n handed to the exact enumerator
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CyclesArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 6)]
    l_max: usize,
    #[arg(long)]
    #[serde(skip)]
    seed: u64,
    /// Condition on no two-cycles, giving up after this many rejections per sample
    #[arg(long)]
    simple: Option<u32>,
    /// Also write the per-sample counts here
    #[arg(long)]
    #[serde(skip)]
    census_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct MomentsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    l: usize,
    /// Add the exact finite-n moments (needs --n)
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SdpiArgs {
    /// TOML file with n_in, n_out, matrix (column-major) and reference
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, default_value_t = 200)]
    depth: usize,
    #[arg(long, default_value_t = 1e-10)]
    refine_tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyK4Args {
    #[arg(long, default_value_t = 100_000)]
    grid: usize,
    #[arg(long, default_value_t = 1e-13)]
    root_tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ConjectureArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    grid: usize,
    #[arg(long, default_value_t = 1e-10)]
    refine_tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    #[serde(skip)]
    seed: u64,
    /// Reject until no two-cycles remain, at most this many attempts
    #[arg(long)]
    simple: Option<u32>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct CountArgs {
    /// Configuration in canonical text form
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GofCsvRow {
    l: usize,
    empirical_mean: f64,
    lambda: f64,
    z_score: f64,
    empirical_var: f64,
    chi2: f64,
    dof: usize,
    seed: u64,
}

#[derive(Serialize)]
struct SdpiReport {
    d_star: f64,
    argmax: Vec<f64>,
    depth: usize,
    refine_tol: f64,
}

#[derive(Serialize)]
struct CountReport {
    n: usize,
    d: usize,
    k: usize,
    r: usize,
    solutions: u64,
    satisfiable: bool,
}

#[derive(Serialize)]
struct CycleSummary {
    samples: usize,
    corr_x1_x2: Option<f64>,
}

/// One finished run: the data bytes plus what goes into the manifest.
struct Output {
    data: Vec<u8>,
    seed: Option<u64>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(std::io::Error),
    Report(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn to_toml<T: Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    toml::to_string(value).map(String::into_bytes).map_err(|e| Failure::Report(e.to_string()))
}

fn params_table<T: Serialize>(args: &T) -> toml::Table {
    toml::Table::try_from(args).unwrap_or_default()
}

fn write_census(path: &Path, samples: &[CycleCensus], seed: u64) -> Result<(), Failure> {
    let l_max = samples.first().map_or(0, |c| c.l_max());
    let mut text = String::from("sample");
    for l in 1..=l_max {
        text.push_str(&format!(",x{l}"));
    }
    text.push_str(",seed\n");
    for (i, c) in samples.iter().enumerate() {
        text.push_str(&i.to_string());
        for v in &c.counts {
            text.push_str(&format!(",{v}"));
        }
        text.push_str(&format!(",{seed}\n"));
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn run(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Threshold(a) => {
            let report = threshold_dstar::<f64>(a.k)?;
            Ok(Output { data: to_toml(&report)?, seed: None })
        }
        Command::Satprob(a) => {
            let rows = estimate_sat_probability(a.k, a.d, a.r, &a.n, a.trials, a.seed, a.cap)?;
            let mut data = Vec::new();
            write_sat_csv(&rows, &mut data)?;
            Ok(Output { data, seed: Some(a.seed) })
        }
        Command::Cycles(a) => {
            let params = Params::new(a.n, a.d, a.k, 2)?;
            let samples = census_sweep(&params, a.samples, a.l_max, a.seed, a.simple)?;
            let rows = poisson_gof(&samples, a.k, a.d)?;
            let mut w = csv_writer();
            for r in rows {
                w.serialize(GofCsvRow {
                    l: r.l,
                    empirical_mean: r.empirical_mean,
                    lambda: r.lambda,
                    z_score: r.z_score,
                    empirical_var: r.empirical_var,
                    chi2: r.chi2,
                    dof: r.dof,
                    seed: a.seed,
                })
                .map_err(Error::from)?;
            }
            let data = w.into_inner().map_err(|e| Failure::Report(e.to_string()))?;
            if let Some(path) = &a.census_out {
                write_census(path, &samples, a.seed)?;
            }
            let summary = CycleSummary {
                samples: samples.len(),
                corr_x1_x2: (a.l_max >= 2).then(|| census_correlation(&samples, 1, 2)),
            };
            eprint!("{}", String::from_utf8_lossy(&to_toml(&summary)?));
            Ok(Output { data, seed: Some(a.seed) })
        }
        Command::Moments(a) => {
            let report = moment_report(a.k, a.d, a.n, a.l, a.exact)?;
            Ok(Output { data: to_toml(&report)?, seed: None })
        }
        Command::Sdpi(a) => {
            let text = std::fs::read_to_string(&a.channel)?;
            let (p_star, w) = parse_channel_file(&text)?;
            let c = contraction_generic(&p_star, &w, a.depth, a.refine_tol)?;
            let report = SdpiReport {
                d_star: c.d_star,
                argmax: c.argmax.weights().to_vec(),
                depth: a.depth,
                refine_tol: a.refine_tol,
            };
            Ok(Output { data: to_toml(&report)?, seed: None })
        }
        Command::VerifyK4(a) => {
            let cert = verify_k4::<f64>(a.grid, a.root_tol)?;
            Ok(Output { data: to_toml(&cert)?, seed: None })
        }
        Command::Conjecture(a) => {
            let sup = contraction_occupation::<f64>(a.k, a.grid, a.refine_tol)?;
            Ok(Output { data: to_toml(&sup)?, seed: None })
        }
        Command::Sample(a) => {
            let params = Params::new(a.n, a.d, a.k, a.r)?;
            let cfg = match a.simple {
                Some(max) => {
                    let (cfg, attempts) = sample_simple_counted(&params, a.seed, max)?;
                    eprintln!("attempts = {attempts}");
                    cfg
                }
                None => sample_configuration(&params, a.seed),
            };
            Ok(Output { data: serialize(&cfg).into_bytes(), seed: Some(a.seed) })
        }
        Command::Count(a) => {
            let text = std::fs::read_to_string(&a.input)?;
            let cfg = deserialize(&text)?;
            let p = *cfg.params();
            let solutions = count_solutions_capped(&cfg, a.cap)?;
            let report = CountReport { n: p.n, d: p.d, k: p.k, r: p.r, solutions, satisfiable: solutions > 0 };
            Ok(Output { data: to_toml(&report)?, seed: None })
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn describe(command: &Command) -> (&'static str, toml::Table, Option<&Path>) {
    match command {
        Command::Threshold(a) => ("threshold", params_table(a), a.out.as_deref()),
        Command::Satprob(a) => ("satprob", params_table(a), a.out.as_deref()),
        Command::Cycles(a) => ("cycles", params_table(a), a.out.as_deref()),
        Command::Moments(a) => ("moments", params_table(a), a.out.as_deref()),
        Command::Sdpi(a) => ("sdpi", params_table(a), a.out.as_deref()),
        Command::VerifyK4(a) => ("verify-k4", params_table(a), a.out.as_deref()),
        Command::Conjecture(a) => ("conjecture", params_table(a), a.out.as_deref()),
        Command::Sample(a) => ("sample", params_table(a), a.out.as_deref()),
        Command::Count(a) => ("count", params_table(a), a.out.as_deref()),
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Lib(Error::CertificateFailure { .. }) => 3,
        Failure::Lib(Error::Io(_)) | Failure::Io(_) => 1,
        Failure::Lib(_) => 2,
        Failure::Report(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let started = now_ms();
    let result = pool.install(|| run(&cli.command));
    let (name, params, out) = describe(&cli.command);
    let output = match result {
        Ok(o) => o,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Report(m) => eprintln!("error: {m}"),
            }
            return ExitCode::from(exit_code(&f));
        }
    };
    let written = match out {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&output.data)
        }
        Some(path) => std::fs::write(path, &output.data).and_then(|_| {
            let manifest = RunManifest {
                subcommand: name.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                threads: pool.current_num_threads(),
                seed: output.seed.map(|s| s.to_string()),
                data_file: path.display().to_string(),
                started_unix_ms: started,
                finished_unix_ms: now_ms(),
                params,
            };
            let text = toml::to_string(&manifest).map_err(std::io::Error::other)?;
            std::fs::write(sidecar_path(path), text)
        }),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cert = Error::CertificateFailure { check: "rmax bound".into(), witness: 0.0, detail: String::new() };
        assert_eq!(exit_code(&Failure::Lib(cert)), 3);
        assert_eq!(exit_code(&Failure::Lib(Error::Domain("k".into()))), 2);
        assert_eq!(exit_code(&Failure::Lib(Error::Capacity { n: 40, cap: 32 })), 2);
        assert_eq!(exit_code(&Failure::Io(std::io::Error::other("x"))), 1);
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
