use std::path::PathBuf;

use ahft_core::alt::{FactorSpec, FactorValues, CHARACTERISTIC_PERCENTILE};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ahft",
    version,
    about = "Accelerated human fatigue testing: PSF screening, Weibull life regression and fatigue prediction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigen analysis of the PSF correlation matrix and factor ranking
    Pca(PcaArgs),
    /// Fit the Weibull log-linear model and write the regression table
    Fit(FitArgs),
    /// Predict a fatigue percentile with a confidence interval
    Predict(PredictArgs),
    /// Compare model predictions with a hold-out dataset
    Validate(ValidateArgs),
    /// Sweep one factor and write the predicted fatigue curve
    Curves(CurvesArgs),
    /// Generate synthetic Weibull life data from known parameters
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Table3,
    Table3Printed,
    Table8,
    File(PathBuf),
}

impl std::fmt::Display for InputSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputSource::Table3 => f.write_str("builtin:table3"),
            InputSource::Table3Printed => f.write_str("builtin:table3-printed"),
            InputSource::Table8 => f.write_str("builtin:table8"),
            InputSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

fn parse_input(s: &str) -> Result<InputSource, String> {
    match s.strip_prefix("builtin:") {
        Some("table3") => Ok(InputSource::Table3),
        Some("table3-printed") => Ok(InputSource::Table3Printed),
        Some("table8") => Ok(InputSource::Table8),
        Some(other) => Err(format!(
            "unknown built-in dataset `{other}` (expected table3, table3-printed or table8)"
        )),
        None => Ok(InputSource::File(PathBuf::from(s))),
    }
}

fn open_unit(name: &str, s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("{name} must be in (0,1)")),
    }
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    open_unit("threshold", s)
}

fn parse_percentile(s: &str) -> Result<f64, String> {
    open_unit("percentile", s)
}

fn parse_confidence(s: &str) -> Result<f64, String> {
    open_unit("confidence", s)
}

fn parse_factor(s: &str) -> Result<FactorSpec, String> {
    s.parse().map_err(|e: ahft_core::Error| e.to_string())
}

fn parse_number(key: &str, raw: &str) -> Result<f64, String> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{key}`: `{raw}` is not a number"))
}

/// `name=value[,name=value...]`
fn parse_assignments(s: &str) -> Result<FactorValues, String> {
    let mut out = FactorValues::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got `{part}`"))?;
        out.insert(k.trim().to_string(), parse_number(k, v)?);
    }
    if out.is_empty() {
        return Err("no factor values given".into());
    }
    Ok(out)
}

/// A sweep `factor=v1,v2,...` or `factor=start:end:count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub factor: String,
    pub grid: Vec<f64>,
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let (factor, spec) = s
        .split_once('=')
        .ok_or_else(|| format!("expected factor=grid, got `{s}`"))?;
    let factor = factor.trim().to_string();
    if factor.is_empty() {
        return Err("empty factor name in sweep".into());
    }
    let spec = spec.trim();
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, end, count] = parts[..] else {
            return Err(format!("range must be start:end:count, got `{spec}`"));
        };
        let start = parse_number(&factor, start)?;
        let end = parse_number(&factor, end)?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("`{count}` is not a point count"))?;
        match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    } else {
        spec.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|v| parse_number(&factor, v))
            .collect::<Result<_, _>>()?
    };
    Ok(Sweep { factor, grid })
}

/// `factor=v1,v2,...`
fn parse_pool(s: &str) -> Result<(String, Vec<f64>), String> {
    let sweep = parse_sweep(s)?;
    Ok((sweep.factor, sweep.grid))
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for all artifacts
    #[arg(long, env = "AHFT_OUTPUT_DIR", default_value = "ahft-output")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file, or builtin:table3 | builtin:table3-printed | builtin:table8
    #[arg(long, value_parser = parse_input, default_value = "builtin:table3")]
    pub input: InputSource,
    /// Treat the response as a positive lifetime instead of a fatigue value in (0,1)
    #[arg(long)]
    pub life_data: bool,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Cumulative proportion of variance the retained components must reach
    #[arg(long, value_parser = parse_threshold, default_value_t = 0.65)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Acceleration factors as name[:identity|log|reciprocal]; chosen by PCA when omitted
    #[arg(long, value_delimiter = ',', value_parser = parse_factor)]
    pub factors: Vec<FactorSpec>,
    /// PCA threshold used when --factors is omitted
    #[arg(long, value_parser = parse_threshold, default_value_t = 0.65)]
    pub threshold: f64,
    /// Number of PCA-ranked factors used when --factors is omitted
    #[arg(long, default_value_t = 2)]
    pub top: usize,
    #[arg(long, value_parser = parse_confidence, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Fitted model file (defaults to model.json in the output directory)
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Factor levels, e.g. available_time=0.1,stress=5
    #[arg(long, required = true, value_parser = parse_assignments)]
    pub at: Vec<FactorValues>,
    #[arg(long, value_parser = parse_percentile, default_value_t = CHARACTERISTIC_PERCENTILE)]
    pub percentile: f64,
    #[arg(long, value_parser = parse_confidence, default_value_t = 0.99)]
    pub confidence: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Hold-out dataset
    #[arg(long, value_parser = parse_input, default_value = "builtin:table8")]
    pub input: InputSource,
    #[arg(long)]
    pub life_data: bool,
    #[arg(long, value_parser = parse_percentile, default_value_t = CHARACTERISTIC_PERCENTILE)]
    pub percentile: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// factor=v1,v2,... or factor=start:end:count (repeatable)
    #[arg(long, required = true, value_parser = parse_sweep)]
    pub sweep: Vec<Sweep>,
    /// Levels of the factors held fixed
    #[arg(long, value_parser = parse_assignments)]
    pub at: Vec<FactorValues>,
    #[arg(long, value_parser = parse_percentile, default_value_t = CHARACTERISTIC_PERCENTILE)]
    pub percentile: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Factors as name[:transform]
    #[arg(long, value_delimiter = ',', value_parser = parse_factor)]
    pub factors: Vec<FactorSpec>,
    /// Coefficients: intercept first, then one per factor
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub alpha: Vec<f64>,
    #[arg(long)]
    pub shape: f64,
    /// Admissible values of one factor, factor=v1,v2,... (repeatable)
    #[arg(long, value_parser = parse_pool)]
    pub pool: Vec<(String, Vec<f64>)>,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
