//! Flag grammar and the parsers for the composite argument values.

use clap::{Args, Parser, Subcommand, ValueEnum};

use vblast_core::analytic::ModulationSpec;

use crate::AppError;

#[derive(Parser)]
#[command(
    name = "vblast",
    version,
    about = "Performance laboratory for the n-by-2 V-BLAST detector with optimal ordering \
             and ZF-MRC combining: closed-form curves, Monte Carlo sweeps and cross-validation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Emit closed-form BER/BLER (and optional outage) curves over an SNR sweep
    Curves(CurvesArgs),
    /// Run a Monte Carlo sweep and emit estimates with confidence intervals
    Simulate(SimulateArgs),
    /// Run the full cross-check suite and emit a pass/fail report
    Validate(ValidateArgs),
}

#[derive(Args)]
pub struct CurvesArgs {
    /// Receive antenna count (at least 2)
    #[arg(long)]
    pub rx: usize,
    /// bpsk | bfsk | coherent:<alpha>,<beta> | noncoherent:<alpha>,<beta>
    #[arg(long, default_value = "bpsk")]
    pub modulation: String,
    /// Average SNR sweep in dB: start:stop:step (or a single value)
    #[arg(long = "snr-db")]
    pub snr_db: String,
    /// Comma-separated outage thresholds in dB; adds a first-step outage
    /// column per threshold
    #[arg(long = "outage-threshold-db")]
    pub outage_threshold_db: Option<String>,
    /// Output path; stdout when omitted (a run manifest is written next to
    /// the file when a path is given)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Receive antenna count (at least 2)
    #[arg(long)]
    pub rx: usize,
    /// bpsk | bfsk | coherent:<alpha>,<beta> | noncoherent:<alpha>,<beta>
    #[arg(long, default_value = "bpsk")]
    pub modulation: String,
    /// Average SNR sweep in dB: start:stop:step (or a single value)
    #[arg(long = "snr-db")]
    pub snr_db: String,
    /// Monte Carlo trials per SNR point
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Master seed; identical seeds reproduce results byte for byte
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// genie (cancel true symbols) or propagate (cancel decisions)
    #[arg(long, value_enum, default_value_t = ModeArg::Genie)]
    pub mode: ModeArg,
    /// symbol (full chain) or semianalytic (channel-only averaging)
    #[arg(long, value_enum, default_value_t = EstimatorArg::Symbol)]
    pub estimator: EstimatorArg,
    /// Worker threads; results do not depend on this
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output path; stdout when omitted (a run manifest is written next to
    /// the file when a path is given)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Args)]
pub struct ValidateArgs {
    /// Master seed for the statistical check groups
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Trials per Monte Carlo check; bounds scale accordingly
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Worker threads; results do not depend on this
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the JSON report here in addition to the console summary
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Genie,
    Propagate,
}

impl From<ModeArg> for vblast_core::detector::CancellationMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Genie => Self::Genie,
            ModeArg::Propagate => Self::Propagate,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Symbol,
    Semianalytic,
}

impl From<EstimatorArg> for vblast_core::montecarlo::Estimator {
    fn from(estimator: EstimatorArg) -> Self {
        match estimator {
            EstimatorArg::Symbol => Self::Symbol,
            EstimatorArg::Semianalytic => Self::Semianalytic,
        }
    }
}

/// Expands `start:stop:step` (inclusive ends, positive step) or a single
/// value into the dB grid.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, AppError> {
    let usage =
        |msg: &str| AppError::Usage(format!("invalid --snr-db '{text}': {msg} (want start:stop:step)"));
    let parts: Vec<&str> = text.split(':').collect();
    let values: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage("not a number"))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(usage("values must be finite"));
    }
    match values.as_slice() {
        [single] => Ok(vec![*single]),
        [start, stop, step] => {
            if *step <= 0.0 {
                return Err(usage("step must be positive"));
            }
            if stop < start {
                return Err(usage("stop must not be below start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if count > 10_001 {
                return Err(usage("grid has more than 10001 points"));
            }
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(usage("expected one or three colon-separated numbers")),
    }
}

pub fn parse_modulation(text: &str) -> Result<ModulationSpec, AppError> {
    let usage = || {
        AppError::Usage(format!(
            "invalid --modulation '{text}': want bpsk, bfsk, \
             coherent:<alpha>,<beta> or noncoherent:<alpha>,<beta>"
        ))
    };
    match text {
        "bpsk" => return Ok(ModulationSpec::bpsk()),
        "bfsk" => return Ok(ModulationSpec::bfsk()),
        _ => {}
    }
    let (family, params) = text.split_once(':').ok_or_else(usage)?;
    let (alpha, beta) = params.split_once(',').ok_or_else(usage)?;
    let alpha: f64 = alpha.trim().parse().map_err(|_| usage())?;
    let beta: f64 = beta.trim().parse().map_err(|_| usage())?;
    let spec = match family {
        "coherent" => ModulationSpec::coherent(alpha, beta),
        "noncoherent" => ModulationSpec::noncoherent(alpha, beta),
        _ => return Err(usage()),
    };
    spec.map_err(|e| AppError::Usage(e.to_string()))
}

pub fn parse_threshold_list(text: &str) -> Result<Vec<f64>, AppError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    AppError::Usage(format!("invalid --outage-threshold-db entry '{p}'"))
                })
        })
        .collect()
}

pub fn require_rx(rx: usize) -> Result<(), AppError> {
    if rx < 2 {
        return Err(AppError::Usage(format!(
            "--rx must be at least 2 (the detector needs n >= m = 2), got {rx}"
        )));
    }
    Ok(())
}
