//! Monte Carlo estimation harness: symbol-level and semi-analytic per-step
//! BER, block error rate, empirical SNR distributions and after-combining
//! noise statistics, all with deterministic parallelism.
//!
//! Determinism contract: trial `t` of grid point `p` draws everything from
//! `RngStream::new(seed, p * trials + t)`, and accumulators are built per
//! fixed-size block of trials ([`ACCUM_BLOCK`]) and folded in block order.
//! Results are therefore bit-identical regardless of how many worker threads
//! processed the blocks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{self, ModulationFamily, ModulationSpec};
use crate::channel::{
    sample_bpsk_symbols, sample_channel, sample_noise, NoiseParams, RngStream, SystemDims,
};
use crate::detector::{analyze_channel, detect, CancellationMode, DetectorError};
use crate::linalg::{orthogonal_residual, ComplexVector};

/// Trials per accumulation block. Fixed so that partial sums never depend on
/// the worker count.
pub const ACCUM_BLOCK: u64 = 4096;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

/// Relative tolerance for the per-trial SNR identity check.
const SNR_IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("mismatched lengths: {0}")]
    LengthMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Full chain: sample channel, symbols and noise, run the detector,
    /// count errors.
    Symbol,
    /// Rao-Blackwellized: sample the channel only and average the
    /// conditional BER at the ordered per-step SNRs.
    Semianalytic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub dims: SystemDims,
    /// Average per-branch SNR grid in dB; `gamma0 = 10^(dB/10)`.
    pub gamma0_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub modulation: ModulationSpec,
    pub mode: CancellationMode,
    pub estimator: Estimator,
    /// Worker threads for the block runner; `None` uses the global pool.
    /// Results do not depend on this value.
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials < 1 {
            return Err(SimError::InvalidConfig("trials must be at least 1".into()));
        }
        if self.dims.m_tx() != 2 {
            return Err(SimError::InvalidConfig(format!(
                "simulator supports exactly 2 transmit streams, got {}",
                self.dims.m_tx()
            )));
        }
        if self.gamma0_db.is_empty() {
            return Err(SimError::InvalidConfig("SNR grid is empty".into()));
        }
        if self.gamma0_db.iter().any(|db| !db.is_finite()) {
            return Err(SimError::InvalidConfig("SNR grid contains non-finite values".into()));
        }
        if self.gamma0_db.windows(2).any(|w| w[0] > w[1]) {
            return Err(SimError::InvalidConfig("SNR grid must be sorted ascending".into()));
        }
        if self.estimator == Estimator::Symbol && !is_bpsk(&self.modulation) {
            return Err(SimError::InvalidConfig(
                "symbol-level estimation is implemented for BPSK only; \
                 use the semi-analytic estimator for other modulations"
                    .into(),
            ));
        }
        Ok(())
    }
}

fn is_bpsk(modulation: &ModulationSpec) -> bool {
    modulation.family == ModulationFamily::Coherent
        && modulation.alpha == 2.0
        && modulation.beta == 1.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Point estimate with a two-sided 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Per-grid-point simulation outcome next to its closed-form references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub snr_db: f64,
    pub gamma0: f64,
    pub trials: u64,
    pub errors_step1: Option<u64>,
    pub errors_step2: Option<u64>,
    pub block_errors: Option<u64>,
    pub ber_step1: RateEstimate,
    pub ber_step2: RateEstimate,
    pub bler: RateEstimate,
    pub analytic_ber_step1: f64,
    pub analytic_ber_step2: f64,
    pub analytic_bler: f64,
    /// Trials skipped because the sampled channel was degenerate. Zero in
    /// practice; tracked so it can never hide silently.
    pub skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<PointResult>,
}

/// Runs whichever estimator the config selects.
pub fn run_simulation(config: &SimConfig) -> Result<SimResult, SimError> {
    match config.estimator {
        Estimator::Symbol => run_symbol_level(config),
        Estimator::Semianalytic => run_semianalytic_ber(config),
    }
}

pub(crate) fn map_blocks<P, F>(trials: u64, workers: Option<usize>, map_block: F) -> Vec<P>
where
    P: Send,
    F: Fn(u64, u64) -> P + Sync,
{
    let nblocks = trials.div_ceil(ACCUM_BLOCK);
    let body = || {
        (0..nblocks)
            .into_par_iter()
            .map(|b| {
                let lo = b * ACCUM_BLOCK;
                let hi = (lo + ACCUM_BLOCK).min(trials);
                map_block(lo, hi)
            })
            .collect::<Vec<P>>()
    };
    match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("worker pool")
            .install(body),
        None => body(),
    }
}

fn analytic_refs(config: &SimConfig, gamma0: f64) -> (f64, f64, f64) {
    let n = config.dims.n_rx();
    let p1 = analytic::ber_step1(&config.modulation, n, gamma0).expect("validated config");
    let p2 = analytic::ber_step2(&config.modulation, n, gamma0).expect("validated config");
    (p1, p2, p1 + p2 * (1.0 - p1))
}

/// Symbol-level BPSK simulation: per trial, sample channel, symbols and
/// noise, run the full detection chain, and count per-step symbol errors and
/// block errors. Per-step error counting matches the genie assumption when
/// `mode` is [`CancellationMode::Genie`]; block errors are mode-invariant.
pub fn run_symbol_level(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;
    if !is_bpsk(&config.modulation) {
        return Err(SimError::InvalidConfig("symbol-level estimation needs BPSK".into()));
    }

    #[derive(Default)]
    struct Partial {
        e1: u64,
        e2: u64,
        eb: u64,
        skipped: u64,
    }

    let mut points = Vec::with_capacity(config.gamma0_db.len());
    for (pi, &db) in config.gamma0_db.iter().enumerate() {
        let gamma0 = db_to_linear(db);
        let params = NoiseParams::from_gamma0(gamma0);
        let base = pi as u64 * config.trials;
        let n_rx = config.dims.n_rx();

        let partials = map_blocks(config.trials, config.workers, |lo, hi| {
            let mut p = Partial::default();
            for t in lo..hi {
                let mut stream = RngStream::new(config.seed, base + t);
                let h = sample_channel(config.dims, &mut stream);
                let symbols = sample_bpsk_symbols(2, &mut stream);
                let noise = sample_noise(n_rx, params, &mut stream);
                let received = h
                    .mat_vec(&ComplexVector::from_reals(&symbols))
                    .expect("shape fixed by config")
                    .add(&noise);
                match detect(&h, &received, &symbols, &params, config.mode) {
                    Ok(trace) => {
                        let mut block = false;
                        for (si, step) in trace.steps.iter().enumerate() {
                            if step.decision != symbols[step.stream_index] {
                                if si == 0 {
                                    p.e1 += 1;
                                } else {
                                    p.e2 += 1;
                                }
                                block = true;
                            }
                        }
                        if block {
                            p.eb += 1;
                        }
                    }
                    Err(DetectorError::DegenerateChannel(_)) => p.skipped += 1,
                    Err(err) => unreachable!("detector failed on valid input: {err}"),
                }
            }
            p
        });

        let mut total = Partial::default();
        for p in partials {
            total.e1 += p.e1;
            total.e2 += p.e2;
            total.eb += p.eb;
            total.skipped += p.skipped;
        }
        let effective = config.trials - total.skipped;
        let (a1, a2, ab) = analytic_refs(config, gamma0);
        points.push(PointResult {
            snr_db: db,
            gamma0,
            trials: config.trials,
            errors_step1: Some(total.e1),
            errors_step2: Some(total.e2),
            block_errors: Some(total.eb),
            ber_step1: counted_rate(total.e1, effective),
            ber_step2: counted_rate(total.e2, effective),
            bler: counted_rate(total.eb, effective),
            analytic_ber_step1: a1,
            analytic_ber_step2: a2,
            analytic_bler: ab,
            skipped: total.skipped,
        });
    }
    Ok(SimResult { points })
}

fn counted_rate(errors: u64, trials: u64) -> RateEstimate {
    let (lo, hi) = wilson_interval(errors, trials);
    RateEstimate { value: errors as f64 / trials as f64, lo, hi }
}

/// Semi-analytic estimation: per trial, sample the channel only, run the
/// ordering/projection analysis, and average the conditional BER of the
/// modulation at the ordered per-step SNRs. No noise is drawn, so the
/// estimator carries far less variance than symbol counting.
pub fn run_semianalytic_ber(config: &SimConfig) -> Result<SimResult, SimError> {
    config.validate()?;

    #[derive(Default)]
    struct Partial {
        sum1: f64,
        sq1: f64,
        sum2: f64,
        sq2: f64,
        sumb: f64,
        sqb: f64,
        skipped: u64,
    }

    let mut points = Vec::with_capacity(config.gamma0_db.len());
    for (pi, &db) in config.gamma0_db.iter().enumerate() {
        let gamma0 = db_to_linear(db);
        let params = NoiseParams::from_gamma0(gamma0);
        let base = pi as u64 * config.trials;

        let partials = map_blocks(config.trials, config.workers, |lo, hi| {
            let mut p = Partial::default();
            for t in lo..hi {
                let mut stream = RngStream::new(config.seed, base + t);
                let h = sample_channel(config.dims, &mut stream);
                match analyze_channel(&h, &params) {
                    Ok(analysis) => {
                        let p1 = config.modulation.conditional_ber(analysis.snr_opt[0]);
                        let p2 = config.modulation.conditional_ber(analysis.snr_opt[1]);
                        let pb = p1 + p2 * (1.0 - p1);
                        p.sum1 += p1;
                        p.sq1 += p1 * p1;
                        p.sum2 += p2;
                        p.sq2 += p2 * p2;
                        p.sumb += pb;
                        p.sqb += pb * pb;
                    }
                    Err(DetectorError::DegenerateChannel(_)) => p.skipped += 1,
                    Err(err) => unreachable!("analysis failed on valid input: {err}"),
                }
            }
            p
        });

        let mut total = Partial::default();
        for p in partials {
            total.sum1 += p.sum1;
            total.sq1 += p.sq1;
            total.sum2 += p.sum2;
            total.sq2 += p.sq2;
            total.sumb += p.sumb;
            total.sqb += p.sqb;
            total.skipped += p.skipped;
        }
        let effective = config.trials - total.skipped;
        let (a1, a2, ab) = analytic_refs(config, gamma0);
        points.push(PointResult {
            snr_db: db,
            gamma0,
            trials: config.trials,
            errors_step1: None,
            errors_step2: None,
            block_errors: None,
            ber_step1: mean_rate(total.sum1, total.sq1, effective),
            ber_step2: mean_rate(total.sum2, total.sq2, effective),
            bler: mean_rate(total.sumb, total.sqb, effective),
            analytic_ber_step1: a1,
            analytic_ber_step2: a2,
            analytic_bler: ab,
            skipped: total.skipped,
        });
    }
    Ok(SimResult { points })
}

fn mean_rate(sum: f64, sum_sq: f64, trials: u64) -> RateEstimate {
    let n = trials as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    let half = Z95 * (variance / n).sqrt();
    RateEstimate { value: mean, lo: (mean - half).max(0.0), hi: (mean + half).min(1.0) }
}

/// Wilson score interval at 95% confidence for a counted rate. The lower
/// bound is exactly 0 for zero errors and the upper exactly 1 for all-error
/// counts (the score bounds coincide with the estimate there up to rounding).
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "wilson interval needs at least one trial");
    assert!(errors <= trials, "errors cannot exceed trials");
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Largest absolute deviation between matched grids of CDF values.
pub fn ks_statistic(empirical: &[f64], analytic: &[f64]) -> Result<f64, SimError> {
    if empirical.len() != analytic.len() {
        return Err(SimError::LengthMismatch(format!(
            "empirical has {} points, analytic {}",
            empirical.len(),
            analytic.len()
        )));
    }
    Ok(empirical
        .iter()
        .zip(analytic)
        .map(|(e, a)| (e - a).abs())
        .fold(0.0, f64::max))
}

/// Exact Kolmogorov-Smirnov statistic of sorted samples against a continuous
/// CDF, using both one-sided deviations at every jump.
pub fn ks_statistic_sorted<F: Fn(f64) -> f64>(sorted_samples: &[f64], cdf: F) -> f64 {
    let n = sorted_samples.len() as f64;
    let mut dist: f64 = 0.0;
    for (i, &x) in sorted_samples.iter().enumerate() {
        let f = cdf(x);
        dist = dist.max((f - i as f64 / n).abs());
        dist = dist.max((f - (i + 1) as f64 / n).abs());
    }
    dist
}

/// Empirical per-step CDFs of the normalized ordered SNR on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCdf {
    pub grid: Vec<f64>,
    pub step1: Vec<f64>,
    pub step2: Vec<f64>,
    pub trials: u64,
    pub skipped: u64,
}

/// Estimates `P[snr_i / gamma0 < x]` per step on the given sorted grid, using
/// ordered detection. Only the channel stream is consumed.
pub fn estimate_snr_cdf(config: &SimConfig, grid: &[f64]) -> Result<EmpiricalCdf, SimError> {
    config.validate()?;
    if grid.is_empty() {
        return Err(SimError::InvalidConfig("CDF grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) || grid[0] < 0.0 {
        return Err(SimError::InvalidConfig("CDF grid must be sorted and nonnegative".into()));
    }
    let gamma0 = db_to_linear(config.gamma0_db[0]);
    let params = NoiseParams::from_gamma0(gamma0);

    struct Partial {
        hist1: Vec<u64>,
        hist2: Vec<u64>,
        skipped: u64,
    }

    let bins = grid.len() + 1;
    let partials = map_blocks(config.trials, config.workers, |lo, hi| {
        let mut p = Partial { hist1: vec![0; bins], hist2: vec![0; bins], skipped: 0 };
        for t in lo..hi {
            let mut stream = RngStream::new(config.seed, t);
            let h = sample_channel(config.dims, &mut stream);
            match analyze_channel(&h, &params) {
                Ok(analysis) => {
                    let x1 = analysis.snr_opt[0] / gamma0;
                    let x2 = analysis.snr_opt[1] / gamma0;
                    p.hist1[grid.partition_point(|&g| g <= x1)] += 1;
                    p.hist2[grid.partition_point(|&g| g <= x2)] += 1;
                }
                Err(DetectorError::DegenerateChannel(_)) => p.skipped += 1,
                Err(err) => unreachable!("analysis failed on valid input: {err}"),
            }
        }
        p
    });

    let mut hist1 = vec![0u64; bins];
    let mut hist2 = vec![0u64; bins];
    let mut skipped = 0u64;
    for p in partials {
        for (acc, v) in hist1.iter_mut().zip(&p.hist1) {
            *acc += v;
        }
        for (acc, v) in hist2.iter_mut().zip(&p.hist2) {
            *acc += v;
        }
        skipped += p.skipped;
    }
    let effective = (config.trials - skipped) as f64;
    let to_cdf = |hist: &[u64]| {
        let mut below = 0u64;
        grid.iter()
            .enumerate()
            .map(|(g, _)| {
                below += hist[g];
                below as f64 / effective
            })
            .collect::<Vec<f64>>()
    };
    Ok(EmpiricalCdf {
        grid: grid.to_vec(),
        step1: to_cdf(&hist1),
        step2: to_cdf(&hist2),
        trials: config.trials,
        skipped,
    })
}

/// Raw per-trial channel statistics for exact distribution tests: normalized
/// per-step SNR samples, the count of trials violating the per-trial identity
/// between the after-combining and power-wise SNR figures, and the largest
/// observed cross-step weight inner product.
#[derive(Debug, Clone)]
pub struct ChannelStats {
    pub snr1: Vec<f64>,
    pub snr2: Vec<f64>,
    pub identity_violations: u64,
    pub max_weight_cross: f64,
    pub skipped: u64,
}

pub fn collect_channel_stats(config: &SimConfig) -> Result<ChannelStats, SimError> {
    config.validate()?;
    let gamma0 = db_to_linear(config.gamma0_db[0]);
    let params = NoiseParams::from_gamma0(gamma0);
    let n_rx = config.dims.n_rx();

    struct Partial {
        snr1: Vec<f64>,
        snr2: Vec<f64>,
        violations: u64,
        max_cross: f64,
        skipped: u64,
    }

    let partials = map_blocks(config.trials, config.workers, |lo, hi| {
        let cap = (hi - lo) as usize;
        let mut p = Partial {
            snr1: Vec::with_capacity(cap),
            snr2: Vec::with_capacity(cap),
            violations: 0,
            max_cross: 0.0,
            skipped: 0,
        };
        for t in lo..hi {
            let mut stream = RngStream::new(config.seed, t);
            let h = sample_channel(config.dims, &mut stream);
            match analyze_channel(&h, &params) {
                Ok(analysis) => {
                    p.snr1.push(analysis.snr_opt[0] / gamma0);
                    p.snr2.push(analysis.snr_opt[1] / gamma0);
                    for step in 0..2 {
                        let factor = (n_rx - 2 + step + 1) as f64;
                        let rel = (analysis.snr_opt[step] - factor * analysis.snr_powerwise[step])
                            .abs()
                            / analysis.snr_opt[step];
                        let within = rel < SNR_IDENTITY_TOL;
                        if !within {
                            p.violations += 1;
                        }
                    }
                    let cross = analysis.weight[0].inner(&analysis.weight[1]).norm();
                    p.max_cross = p.max_cross.max(cross);
                }
                Err(DetectorError::DegenerateChannel(_)) => p.skipped += 1,
                Err(err) => unreachable!("analysis failed on valid input: {err}"),
            }
        }
        p
    });

    let mut stats = ChannelStats {
        snr1: Vec::with_capacity(config.trials as usize),
        snr2: Vec::with_capacity(config.trials as usize),
        identity_violations: 0,
        max_weight_cross: 0.0,
        skipped: 0,
    };
    for p in partials {
        stats.snr1.extend_from_slice(&p.snr1);
        stats.snr2.extend_from_slice(&p.snr2);
        stats.identity_violations += p.violations;
        stats.max_weight_cross = stats.max_weight_cross.max(p.max_cross);
        stats.skipped += p.skipped;
    }
    Ok(stats)
}

/// Sample statistics of the after-combining noises `xi_i = w_i^+ v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseCrossCorr {
    /// Sample mean of `conj(xi_1) xi_2`.
    pub mean_re: f64,
    pub mean_im: f64,
    /// Normal-approximation standard error of each mean component.
    pub se_re: f64,
    pub se_im: f64,
    pub mean_xi1_sq: f64,
    pub mean_xi2_sq: f64,
    pub trials: u64,
    pub skipped: u64,
}

impl NoiseCrossCorr {
    pub fn mean_norm(&self) -> f64 {
        (self.mean_re * self.mean_re + self.mean_im * self.mean_im).sqrt()
    }
}

/// Cross-correlation of the after-combining noises under ZF-MRC weights,
/// with fresh noise per trial.
pub fn estimate_noise_crosscorr(config: &SimConfig) -> Result<NoiseCrossCorr, SimError> {
    noise_crosscorr_impl(config, false)
}

/// Diagnostic twin of [`estimate_noise_crosscorr`] that combines with
/// normalized equal-gain weights applied to the projected signal instead of
/// the ZF-MRC weights. The after-combining noises are then correlated across
/// steps, which is exactly why the ZF-MRC weights are the ones with
/// independent per-step errors.
pub fn estimate_noise_crosscorr_equal_gain(config: &SimConfig) -> Result<NoiseCrossCorr, SimError> {
    noise_crosscorr_impl(config, true)
}

fn noise_crosscorr_impl(config: &SimConfig, equal_gain: bool) -> Result<NoiseCrossCorr, SimError> {
    config.validate()?;
    let gamma0 = db_to_linear(config.gamma0_db[0]);
    let params = NoiseParams::from_gamma0(gamma0);
    let n_rx = config.dims.n_rx();

    #[derive(Default)]
    struct Partial {
        sum_re: f64,
        sum_im: f64,
        sq_re: f64,
        sq_im: f64,
        xi1_sq: f64,
        xi2_sq: f64,
        skipped: u64,
    }

    let partials = map_blocks(config.trials, config.workers, |lo, hi| {
        let mut p = Partial::default();
        let scale = 1.0 / (n_rx as f64).sqrt();
        for t in lo..hi {
            let mut stream = RngStream::new(config.seed, t);
            let h = sample_channel(config.dims, &mut stream);
            match analyze_channel(&h, &params) {
                Ok(analysis) => {
                    let noise = sample_noise(n_rx, params, &mut stream);
                    let (xi1, xi2) = if equal_gain {
                        let ones = ComplexVector::from_reals(&vec![scale; n_rx]);
                        let interferer = h.column(analysis.order[1]);
                        let projected =
                            orthogonal_residual(&noise, std::slice::from_ref(&interferer))
                                .expect("projection of noise");
                        (ones.inner(&projected), ones.inner(&noise))
                    } else {
                        (
                            analysis.weight[0].inner(&noise),
                            analysis.weight[1].inner(&noise),
                        )
                    };
                    let cross: Complex64 = xi1.conj() * xi2;
                    p.sum_re += cross.re;
                    p.sum_im += cross.im;
                    p.sq_re += cross.re * cross.re;
                    p.sq_im += cross.im * cross.im;
                    p.xi1_sq += xi1.norm_sqr();
                    p.xi2_sq += xi2.norm_sqr();
                }
                Err(DetectorError::DegenerateChannel(_)) => p.skipped += 1,
                Err(err) => unreachable!("analysis failed on valid input: {err}"),
            }
        }
        p
    });

    let mut total = Partial::default();
    for p in partials {
        total.sum_re += p.sum_re;
        total.sum_im += p.sum_im;
        total.sq_re += p.sq_re;
        total.sq_im += p.sq_im;
        total.xi1_sq += p.xi1_sq;
        total.xi2_sq += p.xi2_sq;
        total.skipped += p.skipped;
    }
    let n = (config.trials - total.skipped) as f64;
    let mean_re = total.sum_re / n;
    let mean_im = total.sum_im / n;
    let var_re = (total.sq_re / n - mean_re * mean_re).max(0.0);
    let var_im = (total.sq_im / n - mean_im * mean_im).max(0.0);
    Ok(NoiseCrossCorr {
        mean_re,
        mean_im,
        se_re: (var_re / n).sqrt(),
        se_im: (var_im / n).sqrt(),
        mean_xi1_sq: total.xi1_sq / n,
        mean_xi2_sq: total.xi2_sq / n,
        trials: config.trials,
        skipped: total.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Step;

    fn base_config(trials: u64) -> SimConfig {
        SimConfig {
            dims: SystemDims::n_by_2(2).unwrap(),
            gamma0_db: vec![10.0],
            trials,
            seed: 42,
            modulation: ModulationSpec::bpsk(),
            mode: CancellationMode::Genie,
            estimator: Estimator::Symbol,
            workers: None,
        }
    }

    #[test]
    fn config_validation_guards() {
        let mut cfg = base_config(0);
        assert!(cfg.validate().is_err());
        cfg.trials = 10;
        cfg.gamma0_db = vec![10.0, 5.0];
        assert!(cfg.validate().is_err());
        cfg.gamma0_db = vec![5.0, 10.0];
        assert!(cfg.validate().is_ok());
        cfg.modulation = ModulationSpec::bfsk();
        assert!(cfg.validate().is_err(), "symbol-level BFSK must be rejected");
        cfg.estimator = Estimator::Semianalytic;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn wilson_interval_anchors() {
        let (lo, _) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        let (_, hi) = wilson_interval(1000, 1000);
        assert!(hi > 1.0 - 1e-12);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.404).abs() < 5e-4, "lo {lo}");
        assert!((hi - 0.596).abs() < 5e-4, "hi {hi}");
    }

    #[test]
    fn ks_statistic_grid_behavior() {
        let a = vec![0.1, 0.4, 0.9];
        assert_eq!(ks_statistic(&a, &a).unwrap(), 0.0);
        let shifted: Vec<f64> = a.iter().map(|v| v + 0.05).collect();
        assert!((ks_statistic(&a, &shifted).unwrap() - 0.05).abs() < 1e-15);
        assert!(ks_statistic(&a, &[0.0]).is_err());
    }

    #[test]
    fn ks_statistic_of_uniforms_scales_like_root_n() {
        let n = 100_000usize;
        let mut stream = RngStream::new(9090, 0);
        let mut samples: Vec<f64> = (0..n).map(|_| stream.next_uniform()).collect();
        samples.sort_by(f64::total_cmp);
        let d = ks_statistic_sorted(&samples, |x| x.clamp(0.0, 1.0));
        let scale = 1.0 / (n as f64).sqrt();
        assert!(d < 2.0 * 1.63 * scale, "KS {d} too large");
        assert!(d > 0.05 * scale, "KS {d} implausibly small");
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        for estimator in [Estimator::Symbol, Estimator::Semianalytic] {
            let mut cfg = base_config(20_000);
            cfg.estimator = estimator;
            if estimator == Estimator::Semianalytic {
                cfg.modulation = ModulationSpec::bfsk();
            }
            cfg.gamma0_db = vec![5.0, 12.0];
            let mut runs = Vec::new();
            for workers in [1usize, 2, 8] {
                cfg.workers = Some(workers);
                runs.push(run_simulation(&cfg).unwrap());
            }
            assert_eq!(runs[0], runs[1], "1 vs 2 workers ({estimator:?})");
            assert_eq!(runs[1], runs[2], "2 vs 8 workers ({estimator:?})");
        }
    }

    #[test]
    fn single_trial_is_reproducible() {
        let mut cfg = base_config(1);
        cfg.estimator = Estimator::Semianalytic;
        cfg.modulation = ModulationSpec::bfsk();
        let a = run_semianalytic_ber(&cfg).unwrap();
        let b = run_semianalytic_ber(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points[0].trials, 1);
    }

    #[test]
    fn estimates_sit_inside_their_intervals() {
        let cfg = base_config(50_000);
        let result = run_symbol_level(&cfg).unwrap();
        for p in &result.points {
            for r in [&p.ber_step1, &p.ber_step2, &p.bler] {
                assert!(r.lo <= r.value && r.value <= r.hi);
                assert!(r.lo >= 0.0 && r.hi <= 1.0);
            }
            assert_eq!(p.skipped, 0);
        }
    }

    #[test]
    fn semianalytic_bfsk_matches_closed_form() {
        let mut cfg = base_config(100_000);
        cfg.estimator = Estimator::Semianalytic;
        cfg.modulation = ModulationSpec::bfsk();
        let result = run_semianalytic_ber(&cfg).unwrap();
        let p = &result.points[0];
        // Anchor: step-2 closed form at gamma0 = 10 is 72/2744.
        assert!((p.analytic_ber_step2 - 0.026239067055393586).abs() < 1e-15);
        for (est, reference) in [
            (&p.ber_step1, p.analytic_ber_step1),
            (&p.ber_step2, p.analytic_ber_step2),
            (&p.bler, p.analytic_bler),
        ] {
            let se = (est.hi - est.lo) / (2.0 * Z95);
            assert!(
                (est.value - reference).abs() < 3.0 * se,
                "estimate {} vs reference {reference} (se {se})",
                est.value
            );
        }
    }

    #[test]
    fn semianalytic_bpsk_three_antennas_matches_closed_form() {
        let cfg = SimConfig {
            dims: SystemDims::n_by_2(3).unwrap(),
            gamma0_db: vec![10.0],
            trials: 100_000,
            seed: 43,
            modulation: ModulationSpec::bpsk(),
            mode: CancellationMode::Genie,
            estimator: Estimator::Semianalytic,
            workers: None,
        };
        let result = run_semianalytic_ber(&cfg).unwrap();
        let p = &result.points[0];
        for (est, reference) in [
            (&p.ber_step1, p.analytic_ber_step1),
            (&p.ber_step2, p.analytic_ber_step2),
        ] {
            let se = (est.hi - est.lo) / (2.0 * Z95);
            assert!(
                (est.value - reference).abs() < 3.0 * se,
                "estimate {} vs reference {reference} (se {se})",
                est.value
            );
        }
    }

    #[test]
    fn symbol_and_semianalytic_bpsk_agree() {
        let mut sym = base_config(200_000);
        sym.gamma0_db = vec![8.0];
        let mut semi = sym.clone();
        semi.estimator = Estimator::Semianalytic;
        let rs = run_symbol_level(&sym).unwrap();
        let ra = run_semianalytic_ber(&semi).unwrap();
        for (a, b) in rs.points.iter().zip(&ra.points) {
            for (x, y) in [
                (&a.ber_step1, &b.ber_step1),
                (&a.ber_step2, &b.ber_step2),
                (&a.bler, &b.bler),
            ] {
                let se_x = (x.hi - x.lo) / (2.0 * Z95);
                let se_y = (y.hi - y.lo) / (2.0 * Z95);
                assert!(
                    (x.value - y.value).abs() < 3.0 * (se_x + se_y),
                    "symbol {} vs semianalytic {}",
                    x.value,
                    y.value
                );
            }
        }
    }

    #[test]
    fn genie_and_propagate_share_block_errors() {
        let mut genie = base_config(50_000);
        genie.gamma0_db = vec![3.0, 9.0];
        let mut propagate = genie.clone();
        propagate.mode = CancellationMode::Propagate;
        let rg = run_symbol_level(&genie).unwrap();
        let rp = run_symbol_level(&propagate).unwrap();
        for (a, b) in rg.points.iter().zip(&rp.points) {
            assert_eq!(a.block_errors, b.block_errors, "BLER is mode-invariant");
            assert_eq!(a.errors_step1, b.errors_step1, "step 1 precedes cancellation");
        }
    }

    #[test]
    fn vanishing_noise_means_zero_errors() {
        let mut cfg = base_config(10_000);
        cfg.gamma0_db = vec![80.0];
        let result = run_symbol_level(&cfg).unwrap();
        let p = &result.points[0];
        assert_eq!(p.errors_step1, Some(0));
        assert_eq!(p.errors_step2, Some(0));
        assert_eq!(p.block_errors, Some(0));
    }

    #[test]
    fn empirical_cdf_starts_at_zero_and_orders_steps() {
        let mut cfg = base_config(100_000);
        cfg.modulation = ModulationSpec::bfsk();
        cfg.estimator = Estimator::Semianalytic;
        let grid: Vec<f64> = (0..=300).map(|i| i as f64 * 0.02).collect();
        let cdf = estimate_snr_cdf(&cfg, &grid).unwrap();
        assert_eq!(cdf.step1[0], 0.0);
        assert_eq!(cdf.step2[0], 0.0);
        assert_eq!(cdf.skipped, 0);

        // The second step sees the stochastically larger SNR through the
        // lower bulk, so its CDF sits below the first step's there. The two
        // curves cross near x = 1.1 (at n = 2), so the comparison stops at 1.
        let slack = 3.0 / (cfg.trials as f64).sqrt();
        for (i, &x) in cdf.grid.iter().enumerate() {
            if (0.2..=1.0).contains(&x) {
                assert!(
                    cdf.step2[i] <= cdf.step1[i] + slack,
                    "step ordering violated at x={x}: {} vs {}",
                    cdf.step1[i],
                    cdf.step2[i]
                );
            }
        }
    }

    #[test]
    fn empirical_cdf_tracks_the_closed_forms() {
        let mut cfg = base_config(100_000);
        cfg.modulation = ModulationSpec::bfsk();
        cfg.estimator = Estimator::Semianalytic;
        let grid: Vec<f64> = (0..=500).map(|i| i as f64 * 0.02).collect();
        let cdf = estimate_snr_cdf(&cfg, &grid).unwrap();
        let n = cfg.dims.n_rx();
        let f1: Vec<f64> = grid.iter().map(|&x| crate::analytic::outage_cdf_step1(n, x).unwrap()).collect();
        let f2: Vec<f64> = grid.iter().map(|&x| crate::analytic::outage_cdf_step2(n, x).unwrap()).collect();
        let critical = 1.63 / (cfg.trials as f64).sqrt();
        let d1 = ks_statistic(&cdf.step1, &f1).unwrap();
        let d2 = ks_statistic(&cdf.step2, &f2).unwrap();
        assert!(d1 < critical, "step-1 grid KS {d1} vs {critical}");
        assert!(d2 < critical, "step-2 grid KS {d2} vs {critical}");
    }

    #[test]
    fn channel_stats_identity_and_weights() {
        let mut cfg = base_config(100_000);
        cfg.dims = SystemDims::n_by_2(3).unwrap();
        let stats = collect_channel_stats(&cfg).unwrap();
        assert_eq!(stats.identity_violations, 0);
        assert_eq!(stats.skipped, 0);
        assert!(stats.max_weight_cross < 1e-10, "max weight dot {}", stats.max_weight_cross);

        let mut snr2 = stats.snr2.clone();
        snr2.sort_by(f64::total_cmp);
        let d = ks_statistic_sorted(&snr2, |x| crate::analytic::outage_cdf_step2(3, x).unwrap());
        assert!(d < 1.63 / (cfg.trials as f64).sqrt(), "exact KS {d}");
        let _ = Step::Second;
    }

    #[test]
    fn noise_crosscorr_vanishes_under_zf_mrc_but_not_equal_gain() {
        let mut cfg = base_config(200_000);
        let sigma0_sq = 1.0 / db_to_linear(cfg.gamma0_db[0]);
        let zf = estimate_noise_crosscorr(&cfg).unwrap();
        let bound = 4.0 * sigma0_sq / (cfg.trials as f64).sqrt();
        assert!(zf.mean_norm() < bound, "ZF cross-corr {} vs bound {bound}", zf.mean_norm());
        assert!((zf.mean_xi1_sq / sigma0_sq - 1.0).abs() < 0.01);
        assert!((zf.mean_xi2_sq / sigma0_sq - 1.0).abs() < 0.01);

        cfg.trials = 100_000;
        let eg = estimate_noise_crosscorr_equal_gain(&cfg).unwrap();
        assert!(
            eg.mean_norm() > 5.0 * zf.mean_norm(),
            "equal-gain cross-corr {} should dwarf ZF {}",
            eg.mean_norm(),
            zf.mean_norm()
        );
    }
}
