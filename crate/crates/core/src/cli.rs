//! Command-line front end. Thin orchestration over the library: every
//! subcommand resolves a model, delegates to the corresponding module, and
//! renders the result as JSON (full precision) or CSV (12 significant
//! digits). Output is byte-deterministic for identical inputs and seed.

use crate::corrections::{compute_constants, CumulantModel, ModelError};
use crate::distribution::{chi2_cdf, CorrectedDistribution, DistributionError};
use crate::models::{load_model, multinomial_model, save_model, ModelFileError, MultinomialSpec};
use crate::montecarlo::{compare, MonteCarloError};
use crate::spectral::split_idempotent;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code 1: the inputs were rejected, the message names the offender.
/// Exit code 2: the inputs parsed but a numerical gate failed (idempotency,
/// non-integer trace, non-convergence).
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

fn from_model(e: ModelError) -> CliError {
    match e {
        ModelError::Spectral(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn from_file(e: ModelFileError) -> CliError {
    match e {
        ModelFileError::Model(m) => from_model(m),
        _ => CliError::Validation(e.to_string()),
    }
}

fn from_distribution(e: DistributionError) -> CliError {
    match e {
        DistributionError::InvalidAlpha { .. } => CliError::Validation(e.to_string()),
        DistributionError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
    }
}

fn from_montecarlo(e: MonteCarloError) -> CliError {
    match e {
        MonteCarloError::Model(m) => from_model(m),
        MonteCarloError::Distribution(d) => from_distribution(d),
        _ => CliError::Validation(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Full-precision document, round-trips every bit.
    Json,
    /// Plot-ready table, 12 significant digits.
    Csv,
}

/// Model source: either a JSON file or inline multinomial parameters.
#[derive(Args, Debug)]
pub struct ModelSource {
    /// Path to a model JSON file
    #[arg(long, value_name = "PATH", conflicts_with_all = ["probs", "n"])]
    model: Option<PathBuf>,
    /// Multinomial cell probabilities, comma separated
    #[arg(long, value_delimiter = ',', value_name = "P1,P2,...", requires = "n")]
    probs: Option<Vec<f64>>,
    /// Multinomial sample size
    #[arg(long, value_name = "N", requires = "probs")]
    n: Option<u64>,
}

impl ModelSource {
    fn resolve(&self) -> Result<CumulantModel, CliError> {
        match (&self.model, &self.probs, self.n) {
            (Some(path), None, None) => load_model(path).map_err(from_file),
            (None, Some(probs), Some(n)) => {
                let spec = MultinomialSpec::new(probs.clone(), n)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                Ok(multinomial_model(&spec))
            }
            _ => Err(CliError::Validation(
                "model source required: pass --model PATH, or --probs LIST with --n SIZE".into(),
            )),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "chi2corr",
    version,
    about = "Finite-sample corrected chi-squared distributions for quadratic-form statistics",
    long_about = None,
    after_help = "CSV columns:\n  \
        constants: k,a,b,c,d,n,idempotency_residual,eigen_residual,null_space_residual\n  \
        eval:      u,baseline_cdf,corrected_cdf,corrected_pdf\n  \
        quantile:  alpha,quantile,non_monotone\n  \
        mc:        u,empirical,baseline,corrected"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute correction constants and spectral diagnostics for a model
    Constants {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Evaluate baseline and corrected CDF/PDF on a grid of points
    Eval {
        #[command(flatten)]
        source: ModelSource,
        /// Evaluation points, comma separated
        #[arg(long, value_delimiter = ',', value_name = "U1,U2,...", required = true)]
        points: Vec<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Clamp CDF columns to [0, 1]; the PDF is never clamped
        #[arg(long)]
        clamp: bool,
    },
    /// Corrected quantiles for the given probability levels
    Quantile {
        #[command(flatten)]
        source: ModelSource,
        /// Probability levels in (0, 1), comma separated
        #[arg(long, value_delimiter = ',', value_name = "A1,A2,...", required = true)]
        levels: Vec<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Monte Carlo comparison of empirical, baseline, and corrected CDFs
    Mc {
        /// Multinomial cell probabilities, comma separated
        #[arg(long, value_delimiter = ',', value_name = "P1,P2,...", required = true)]
        probs: Vec<f64>,
        /// Multinomial sample size
        #[arg(long, value_name = "N")]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation grid; defaults to chi-squared quantiles at levels
        /// 0.05..0.95
        #[arg(long, value_delimiter = ',', value_name = "U1,U2,...")]
        grid: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Clamp model CDF columns to [0, 1]
        #[arg(long)]
        clamp: bool,
    },
    /// Write a multinomial model JSON file from --probs/--n
    MultinomialModel {
        /// Multinomial cell probabilities, comma separated
        #[arg(long, value_delimiter = ',', value_name = "P1,P2,...", required = true)]
        probs: Vec<f64>,
        /// Multinomial sample size
        #[arg(long, value_name = "N")]
        n: u64,
        /// Output path for the model JSON
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct Diagnostics {
    idempotency_residual: f64,
    eigen_residual: f64,
    null_space_residual: f64,
}

#[derive(Serialize)]
struct ConstantsDoc {
    k: u32,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    n: u64,
    diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct EvalRow {
    u: f64,
    baseline_cdf: f64,
    corrected_cdf: f64,
    corrected_pdf: f64,
}

#[derive(Serialize)]
struct QuantileRow {
    alpha: f64,
    quantile: f64,
    non_monotone: bool,
}

/// 12 significant digits, deterministic across platforms.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output documents serialize");
    text.push('\n');
    text
}

fn constants_cmd(source: &ModelSource, format: Format) -> Result<String, CliError> {
    let model = source.resolve()?;
    let split = split_idempotent(model.v0()).map_err(|e| from_model(e.into()))?;
    let constants = compute_constants(&model).map_err(from_model)?;
    let null_space = crate::corrections::null_space_residual(&model, &split).map_err(from_model)?;
    let doc = ConstantsDoc {
        k: constants.k,
        a: constants.a,
        b: constants.b,
        c: constants.c,
        d: constants.d,
        n: constants.n,
        diagnostics: Diagnostics {
            idempotency_residual: split.idempotency_residual,
            eigen_residual: split.eigen_residual,
            null_space_residual: null_space,
        },
    };
    Ok(match format {
        Format::Json => to_json(&doc),
        Format::Csv => format!(
            "k,a,b,c,d,n,idempotency_residual,eigen_residual,null_space_residual\n{},{},{},{},{},{},{},{},{}\n",
            doc.k,
            sig12(doc.a),
            sig12(doc.b),
            sig12(doc.c),
            sig12(doc.d),
            doc.n,
            sig12(doc.diagnostics.idempotency_residual),
            sig12(doc.diagnostics.eigen_residual),
            sig12(doc.diagnostics.null_space_residual),
        ),
    })
}

fn eval_cmd(
    source: &ModelSource,
    points: &[f64],
    format: Format,
    clamp: bool,
) -> Result<String, CliError> {
    for (i, &u) in points.iter().enumerate() {
        if !u.is_finite() {
            return Err(CliError::Validation(format!(
                "points[{i}] must be finite, got {u}"
            )));
        }
    }
    let model = source.resolve()?;
    let constants = compute_constants(&model).map_err(from_model)?;
    let k = constants.k;
    let dist = CorrectedDistribution::new(constants);
    let cl = |x: f64| if clamp { x.clamp(0.0, 1.0) } else { x };
    let rows: Vec<EvalRow> = points
        .iter()
        .map(|&u| EvalRow {
            u,
            baseline_cdf: cl(chi2_cdf(u, k)),
            corrected_cdf: cl(dist.cdf(u)),
            corrected_pdf: dist.pdf(u),
        })
        .collect();
    Ok(match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("u,baseline_cdf,corrected_cdf,corrected_pdf\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    sig12(r.u),
                    sig12(r.baseline_cdf),
                    sig12(r.corrected_cdf),
                    sig12(r.corrected_pdf),
                ));
            }
            out
        }
    })
}

fn quantile_cmd(source: &ModelSource, levels: &[f64], format: Format) -> Result<String, CliError> {
    for (i, &alpha) in levels.iter().enumerate() {
        if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
            return Err(CliError::Validation(format!(
                "levels[{i}] must lie strictly between 0 and 1, got {alpha}"
            )));
        }
    }
    let model = source.resolve()?;
    let constants = compute_constants(&model).map_err(from_model)?;
    let dist = CorrectedDistribution::new(constants);
    let mut rows = Vec::with_capacity(levels.len());
    for &alpha in levels {
        let q = dist.quantile(alpha).map_err(from_distribution)?;
        rows.push(QuantileRow {
            alpha,
            quantile: q.value,
            non_monotone: q.non_monotone,
        });
    }
    if rows.iter().any(|r| r.non_monotone) {
        eprintln!("warning: corrected CDF is non-monotone near a requested level; reported value is the smallest crossing");
    }
    Ok(match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("alpha,quantile,non_monotone\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{}\n",
                    sig12(r.alpha),
                    sig12(r.quantile),
                    r.non_monotone,
                ));
            }
            out
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn mc_cmd(
    probs: &[f64],
    n: u64,
    replicates: usize,
    seed: u64,
    grid: Option<Vec<f64>>,
    format: Format,
    clamp: bool,
) -> Result<String, CliError> {
    let spec = MultinomialSpec::new(probs.to_vec(), n)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let mut cmp = compare(&spec, replicates, seed, grid).map_err(from_montecarlo)?;
    if clamp {
        for x in cmp.baseline.iter_mut().chain(cmp.corrected.iter_mut()) {
            *x = x.clamp(0.0, 1.0);
        }
    }
    Ok(match format {
        Format::Json => to_json(&cmp),
        Format::Csv => {
            let mut out = String::from("u,empirical,baseline,corrected\n");
            for i in 0..cmp.grid.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    sig12(cmp.grid[i]),
                    sig12(cmp.empirical[i]),
                    sig12(cmp.baseline[i]),
                    sig12(cmp.corrected[i]),
                ));
            }
            out
        }
    })
}

fn multinomial_model_cmd(probs: &[f64], n: u64, out: &PathBuf) -> Result<String, CliError> {
    let spec = MultinomialSpec::new(probs.to_vec(), n)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let model = multinomial_model(&spec);
    save_model(&model, out).map_err(from_file)?;
    Ok(String::new())
}

/// Parses and executes; returns the document destined for stdout. Help and
/// version requests come back as Ok so they exit 0.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return Ok(e.render().to_string());
        }
        Err(e) => return Err(CliError::Validation(e.render().to_string())),
    };
    match &cli.command {
        Command::Constants { source, format } => constants_cmd(source, *format),
        Command::Eval {
            source,
            points,
            format,
            clamp,
        } => eval_cmd(source, points, *format, *clamp),
        Command::Quantile {
            source,
            levels,
            format,
        } => quantile_cmd(source, levels, *format),
        Command::Mc {
            probs,
            n,
            replicates,
            seed,
            grid,
            format,
            clamp,
        } => mc_cmd(probs, *n, *replicates, *seed, grid.clone(), *format, *clamp),
        Command::MultinomialModel { probs, n, out } => multinomial_model_cmd(probs, *n, out),
    }
}

/// Binary entry point.
pub fn main_entry() -> ExitCode {
    match run(std::env::args_os()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
