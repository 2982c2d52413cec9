//! Batch CLI: reads a JSON model configuration and emits inequality-index
//! tables, exact estimator biases, and Monte Carlo validation reports as
//! JSON or CSV.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use ineq_bias::bias::{bias_report, EstimatorId};
use ineq_bias::config::{OutputFormat, RunConfig};
use ineq_bias::error::Error;
use ineq_bias::indices;
use ineq_bias::montecarlo::run_mc;

const Z_THRESHOLD: f64 = 4.0;

#[derive(Parser)]
#[command(
    name = "ineq-bias",
    about = "Inequality indices, exact estimator biases, and Monte Carlo validation for gamma mixture populations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output format; overrides the config file.
    #[arg(long)]
    format: Option<FormatArg>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replicate count; overrides the config file.
    #[arg(long)]
    replicates: Option<usize>,
    /// Worker thread count; falls back to the INEQ_BIAS_THREADS env var.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Population index values (Theil T/L, Atkinson, VMR).
    Indices(CommonArgs),
    /// Exact estimator expectations and biases, one row per (estimator, n).
    Bias(CommonArgs),
    /// Monte Carlo validation of the closed forms; exits 4 on any |z| > 4.
    Validate(CommonArgs),
    /// Bias and population indices merged, keyed by (estimator, n).
    Table(CommonArgs),
}

#[derive(Serialize)]
struct IndicesRecord {
    pi: Vec<f64>,
    alpha: Vec<f64>,
    lambda: f64,
    theil_t: f64,
    theil_l: f64,
    atkinson_1: f64,
    atkinson_inf: f64,
    vmr: f64,
    atkinson_eps: Vec<EpsEntry>,
}

#[derive(Serialize)]
struct EpsEntry {
    eps: f64,
    value: f64,
}

#[derive(Serialize)]
struct BiasRow {
    estimator: EstimatorId,
    n: usize,
    population: f64,
    expectation: f64,
    bias: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature_error: Option<f64>,
}

#[derive(Serialize)]
struct ValidateRow {
    estimator: EstimatorId,
    n: usize,
    replicates: usize,
    mean: f64,
    standard_error: f64,
    exact: f64,
    z_score: f64,
    pass: bool,
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let obj = json!({
                "code": e.code(),
                "message": e.to_string(),
                "context": {"component": "ineq-bias"},
            });
            eprintln!("{obj}");
            e.exit_code() as u8
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let (args, cmd): (&CommonArgs, _) = match &cli.command {
        Command::Indices(a) => (a, "indices"),
        Command::Bias(a) => (a, "bias"),
        Command::Validate(a) => (a, "validate"),
        Command::Table(a) => (a, "table"),
    };

    configure_threads(args.threads)?;

    let text = fs::read_to_string(&args.config).map_err(|e| {
        Error::InvalidConfig(format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.mc.replicates = r;
    }
    let format = match args.format {
        Some(FormatArg::Json) => OutputFormat::Json,
        Some(FormatArg::Csv) => OutputFormat::Csv,
        None => cfg.format,
    };
    cfg.validate()?;

    let (body, failed) = match cmd {
        "indices" => (render_indices(&cfg, format)?, false),
        "bias" => (render_bias(&cfg, format)?, false),
        "table" => (render_bias(&cfg, format)?, false),
        "validate" => render_validate(&cfg, format)?,
        _ => unreachable!(),
    };

    match &args.out {
        Some(path) => {
            let mut f = fs::File::create(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))
            })?;
            f.write_all(body.as_bytes())
                .map_err(|e| Error::InvalidConfig(format!("write failed: {e}")))?;
        }
        None => print!("{body}"),
    }

    Ok(if failed { 4 } else { 0 })
}

fn configure_threads(flag: Option<usize>) -> Result<(), Error> {
    let from_env = std::env::var("INEQ_BIAS_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(t) = flag.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn render_indices(cfg: &RunConfig, format: OutputFormat) -> Result<String, Error> {
    let params = cfg.params()?;
    let report = indices::index_report(&params)?;
    let eps_grid = cfg
        .eps
        .iter()
        .map(|&eps| {
            Ok(EpsEntry {
                eps,
                value: indices::atkinson_eps(&params, eps)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let record = IndicesRecord {
        pi: params.pi().to_vec(),
        alpha: params.alpha().to_vec(),
        lambda: params.lambda(),
        theil_t: report.theil_t,
        theil_l: report.theil_l,
        atkinson_1: report.atkinson_1,
        atkinson_inf: report.atkinson_inf,
        vmr: report.vmr,
        atkinson_eps: eps_grid,
    };
    match format {
        OutputFormat::Json => to_json(&record),
        OutputFormat::Csv => {
            let mut w = csv_writer();
            write_row(&mut w, &["metric", "eps", "value"])?;
            for (metric, value) in [
                ("theil_t", record.theil_t),
                ("theil_l", record.theil_l),
                ("atkinson_1", record.atkinson_1),
                ("atkinson_inf", record.atkinson_inf),
                ("vmr", record.vmr),
            ] {
                write_row(&mut w, &[metric, "", &fmt_f64(value)])?;
            }
            for e in &record.atkinson_eps {
                write_row(&mut w, &["atkinson_eps", &fmt_f64(e.eps), &fmt_f64(e.value)])?;
            }
            finish_csv(w)
        }
    }
}

fn bias_rows(cfg: &RunConfig) -> Result<Vec<BiasRow>, Error> {
    let params = cfg.params()?;
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let report = bias_report(&params, n, &cfg.quadrature, cfg.composition_limit)?;
        for e in report.entries {
            rows.push(BiasRow {
                estimator: e.estimator,
                n,
                population: e.population,
                expectation: e.expectation,
                bias: e.bias,
                quadrature_error: e.quadrature_error,
            });
        }
    }
    Ok(rows)
}

fn render_bias(cfg: &RunConfig, format: OutputFormat) -> Result<String, Error> {
    let rows = bias_rows(cfg)?;
    match format {
        OutputFormat::Json => to_json(&rows),
        OutputFormat::Csv => {
            let mut w = csv_writer();
            write_row(
                &mut w,
                &["estimator", "n", "population", "expectation", "bias", "quadrature_error"],
            )?;
            for r in &rows {
                write_row(
                    &mut w,
                    &[
                        r.estimator.name(),
                        &r.n.to_string(),
                        &fmt_f64(r.population),
                        &fmt_f64(r.expectation),
                        &fmt_f64(r.bias),
                        &r.quadrature_error.map(fmt_f64).unwrap_or_default(),
                    ],
                )?;
            }
            finish_csv(w)
        }
    }
}

fn render_validate(cfg: &RunConfig, format: OutputFormat) -> Result<(String, bool), Error> {
    let params = cfg.params()?;
    let mut rows = Vec::new();
    for &n in &cfg.n {
        for est in EstimatorId::ALL {
            if est == EstimatorId::Vmr && n < 2 {
                continue;
            }
            let r = run_mc(
                &params,
                n,
                est,
                cfg.mc.replicates,
                cfg.mc.seed,
                &cfg.quadrature,
                cfg.composition_limit,
            )?;
            rows.push(ValidateRow {
                estimator: r.estimator,
                n: r.n,
                replicates: r.replicates,
                mean: r.mean,
                standard_error: r.standard_error,
                exact: r.exact,
                z_score: r.z_score,
                pass: r.z_score.abs() <= Z_THRESHOLD,
                seed: r.seed,
            });
        }
    }
    let failed = rows.iter().any(|r| !r.pass);
    let body = match format {
        OutputFormat::Json => to_json(&rows)?,
        OutputFormat::Csv => {
            let mut w = csv_writer();
            write_row(
                &mut w,
                &[
                    "estimator", "n", "replicates", "mean", "standard_error", "exact",
                    "z_score", "pass", "seed",
                ],
            )?;
            for r in &rows {
                write_row(
                    &mut w,
                    &[
                        r.estimator.name(),
                        &r.n.to_string(),
                        &r.replicates.to_string(),
                        &fmt_f64(r.mean),
                        &fmt_f64(r.standard_error),
                        &fmt_f64(r.exact),
                        &fmt_f64(r.z_score),
                        &r.pass.to_string(),
                        &r.seed.to_string(),
                    ],
                )?;
            }
            finish_csv(w)?
        }
    };
    Ok((body, failed))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn write_row(w: &mut csv::Writer<Vec<u8>>, fields: &[&str]) -> Result<(), Error> {
    w.write_record(fields)
        .map_err(|e| Error::InvalidConfig(format!("csv write failed: {e}")))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, Error> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidConfig(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(format!("csv utf8: {e}")))
}
