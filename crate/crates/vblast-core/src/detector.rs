//! The n-by-2 V-BLAST detection chain: optimal ordering, orthogonal
//! projection of yet-to-be-detected interferers, ZF-MRC combining, symbol
//! decision, and interference cancellation.
//!
//! Two per-step SNR figures are tracked side by side: the after-combining SNR
//! of the unit-norm ZF-MRC weight, `|h_perp|^2 / sigma0_sq`, and the legacy
//! power-wise figure `|h_perp|^2 / ((n - m + i) sigma0_sq)` from equal-gain
//! power accounting. They differ by the deterministic factor `n - m + i`
//! (step `i` counted from 1 in detection order), which the simulator verifies
//! on every trial.

use num_complex::Complex64;
use thiserror::Error;

use crate::channel::{NoiseParams, SystemDims};
use crate::linalg::{orthogonal_residual, ComplexMatrix, ComplexVector, LinalgError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error("degenerate channel: {0}")]
    DegenerateChannel(&'static str),
    #[error("detector is built for exactly 2 transmit streams, got {0}")]
    UnsupportedStreamCount(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for DetectorError {
    fn from(err: LinalgError) -> Self {
        match err {
            LinalgError::SingularMatrix => {
                DetectorError::DegenerateChannel("linearly dependent channel columns")
            }
            other => DetectorError::Linalg(other),
        }
    }
}

/// Whether cancellation subtracts the true transmitted symbol (no error
/// propagation; the assumption under which the per-step closed forms hold) or
/// the detector's own decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CancellationMode {
    Genie,
    Propagate,
}

/// Everything recorded about one detection step.
#[derive(Debug, Clone)]
pub struct DetectionStep {
    /// Which transmit stream (0-based column of H) was detected here.
    pub stream_index: usize,
    /// Channel column projected orthogonal to the remaining interferers.
    pub h_perp: ComplexVector,
    /// Unit-norm ZF-MRC combining weight, `h_perp / |h_perp|`.
    pub weight: ComplexVector,
    /// After-combining SNR `|h_perp|^2 / sigma0_sq` (linear).
    pub snr_opt: f64,
    /// Power-wise SNR `|h_perp|^2 / ((n - m + i) sigma0_sq)` (linear).
    pub snr_powerwise: f64,
    /// Hard symbol decision (+1 or -1).
    pub decision: f64,
    /// After-combining noise `w^+ v`.
    pub after_combining_noise: Complex64,
}

/// Full per-trial record of the detection chain.
#[derive(Debug, Clone)]
pub struct DetectionTrace {
    /// Detection order: `order[0]` is the stream detected first.
    pub order: [usize; 2],
    pub steps: Vec<DetectionStep>,
    pub mode: CancellationMode,
}

impl DetectionTrace {
    /// True when at least one decided symbol differs from the transmitted one.
    pub fn block_error(&self, true_symbols: &[f64]) -> bool {
        self.steps
            .iter()
            .any(|s| s.decision != true_symbols[s.stream_index])
    }
}

/// Per-channel quantities shared by the detector, the semi-analytic BER
/// estimator and the SNR-distribution harness: detection order, projected
/// columns, weights and both SNR figures for each step.
#[derive(Debug, Clone)]
pub struct ChannelAnalysis {
    pub order: [usize; 2],
    pub h_perp: [ComplexVector; 2],
    pub weight: [ComplexVector; 2],
    pub snr_opt: [f64; 2],
    pub snr_powerwise: [f64; 2],
}

/// ZF-MRC combining weight: the projected column scaled to unit norm.
pub fn zf_mrc_weight(h_perp: &ComplexVector) -> Result<ComplexVector, DetectorError> {
    let norm = h_perp.norm();
    let usable = norm > 0.0;
    if !usable {
        return Err(DetectorError::DegenerateChannel("zero projected channel column"));
    }
    Ok(h_perp.scaled_real(1.0 / norm))
}

/// After-combining SNR of the ZF-MRC weight.
pub fn after_projection_snr(h_perp: &ComplexVector, params: &NoiseParams) -> f64 {
    h_perp.norm_sqr() / params.sigma0_sq()
}

/// Power-wise SNR with equal-gain power accounting; `step` is 1-based in
/// detection order so the divisor is `n - m + step`.
pub fn powerwise_snr(
    h_perp: &ComplexVector,
    params: &NoiseParams,
    dims: SystemDims,
    step: usize,
) -> f64 {
    debug_assert!(step >= 1 && step <= dims.m_tx());
    let branches = (dims.n_rx() - dims.m_tx() + step) as f64;
    h_perp.norm_sqr() / (branches * params.sigma0_sq())
}

/// Optimal detection order: the stream with the larger after-projection SNR
/// goes first; ties break toward the lower stream index. Returns 0-based
/// stream indices as `[first, second]`.
pub fn order_streams(
    h: &ComplexMatrix,
    params: &NoiseParams,
) -> Result<[usize; 2], DetectorError> {
    Ok(analyze_channel(h, params)?.order)
}

/// Runs ordering and the per-step projection/weight/SNR computations without
/// touching received data.
pub fn analyze_channel(
    h: &ComplexMatrix,
    params: &NoiseParams,
) -> Result<ChannelAnalysis, DetectorError> {
    if h.cols() != 2 {
        return Err(DetectorError::UnsupportedStreamCount(h.cols()));
    }
    let dims = SystemDims::new(h.rows(), 2)
        .map_err(|_| DetectorError::DimensionMismatch("need at least 2 receive antennas".into()))?;
    let col = [h.column(0), h.column(1)];
    let perp = [
        orthogonal_residual(&col[0], std::slice::from_ref(&col[1]))?,
        orthogonal_residual(&col[1], std::slice::from_ref(&col[0]))?,
    ];
    let snr = [
        after_projection_snr(&perp[0], params),
        after_projection_snr(&perp[1], params),
    ];
    let order = if snr[1] > snr[0] { [1, 0] } else { [0, 1] };

    // Step 1 detects order[0] behind the projection; step 2 sees no remaining
    // interferers and combines the full column.
    let h_perp_1 = perp[order[0]].clone();
    let h_perp_2 = col[order[1]].clone();
    let weight_1 = zf_mrc_weight(&h_perp_1)?;
    let weight_2 = zf_mrc_weight(&h_perp_2)?;
    let snr_opt = [
        after_projection_snr(&h_perp_1, params),
        after_projection_snr(&h_perp_2, params),
    ];
    let snr_powerwise = [
        powerwise_snr(&h_perp_1, params, dims, 1),
        powerwise_snr(&h_perp_2, params, dims, 2),
    ];
    Ok(ChannelAnalysis {
        order,
        h_perp: [h_perp_1, h_perp_2],
        weight: [weight_1, weight_2],
        snr_opt,
        snr_powerwise,
    })
}

/// After-combining noise `w^+ v`.
pub fn after_combining_noise(weight: &ComplexVector, noise: &ComplexVector) -> Complex64 {
    weight.inner(noise)
}

/// Full two-step detection of one received vector with optimal ordering.
///
/// The decision at each step is the per-symbol maximum-likelihood slicer on
/// the combined scalar statistic `w^+ r`: for unit-power antipodal symbols
/// that is the sign of its real part. `true_symbols` feeds both genie-mode
/// cancellation and the after-combining-noise bookkeeping.
pub fn detect(
    h: &ComplexMatrix,
    received: &ComplexVector,
    true_symbols: &[f64],
    params: &NoiseParams,
    mode: CancellationMode,
) -> Result<DetectionTrace, DetectorError> {
    let analysis = analyze_channel(h, params)?;
    detect_with_analysis(h, &analysis, received, true_symbols, params, mode)
}

/// Diagnostic variant that detects streams in their natural order (0 then 1)
/// instead of the SNR-optimal order. No closed form in this crate describes
/// it; it exists as a sanity baseline only.
pub fn detect_fixed_order(
    h: &ComplexMatrix,
    received: &ComplexVector,
    true_symbols: &[f64],
    params: &NoiseParams,
    mode: CancellationMode,
) -> Result<DetectionTrace, DetectorError> {
    if h.cols() != 2 {
        return Err(DetectorError::UnsupportedStreamCount(h.cols()));
    }
    let dims = SystemDims::new(h.rows(), 2)
        .map_err(|_| DetectorError::DimensionMismatch("need at least 2 receive antennas".into()))?;
    let col = [h.column(0), h.column(1)];
    let h_perp_1 = orthogonal_residual(&col[0], std::slice::from_ref(&col[1]))?;
    let h_perp_2 = col[1].clone();
    let analysis = ChannelAnalysis {
        order: [0, 1],
        weight: [zf_mrc_weight(&h_perp_1)?, zf_mrc_weight(&h_perp_2)?],
        snr_opt: [
            after_projection_snr(&h_perp_1, params),
            after_projection_snr(&h_perp_2, params),
        ],
        snr_powerwise: [
            powerwise_snr(&h_perp_1, params, dims, 1),
            powerwise_snr(&h_perp_2, params, dims, 2),
        ],
        h_perp: [h_perp_1, h_perp_2],
    };
    detect_with_analysis(h, &analysis, received, true_symbols, params, mode)
}

fn detect_with_analysis(
    h: &ComplexMatrix,
    analysis: &ChannelAnalysis,
    received: &ComplexVector,
    true_symbols: &[f64],
    _params: &NoiseParams,
    mode: CancellationMode,
) -> Result<DetectionTrace, DetectorError> {
    if received.dim() != h.rows() {
        return Err(DetectorError::DimensionMismatch(format!(
            "received vector has length {}, expected {}",
            received.dim(),
            h.rows()
        )));
    }
    if true_symbols.len() != 2 {
        return Err(DetectorError::DimensionMismatch(format!(
            "expected 2 transmitted symbols, got {}",
            true_symbols.len()
        )));
    }
    let noise = received.sub(&h.mat_vec(&ComplexVector::from_reals(true_symbols))?);

    let mut residual = received.clone();
    let mut steps = Vec::with_capacity(2);
    for step_idx in 0..2 {
        let stream = analysis.order[step_idx];
        let weight = &analysis.weight[step_idx];
        let statistic = weight.inner(&residual);
        let decision = if statistic.re >= 0.0 { 1.0 } else { -1.0 };
        steps.push(DetectionStep {
            stream_index: stream,
            h_perp: analysis.h_perp[step_idx].clone(),
            weight: weight.clone(),
            snr_opt: analysis.snr_opt[step_idx],
            snr_powerwise: analysis.snr_powerwise[step_idx],
            decision,
            after_combining_noise: after_combining_noise(weight, &noise),
        });
        if step_idx == 0 {
            let cancel = match mode {
                CancellationMode::Genie => true_symbols[stream],
                CancellationMode::Propagate => decision,
            };
            residual = residual.sub(&h.column(stream).scaled_real(cancel));
        }
    }
    Ok(DetectionTrace { order: analysis.order, steps, mode })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{
        sample_bpsk_symbols, sample_channel, sample_noise, RngStream, SystemDims,
    };

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_params() -> NoiseParams {
        NoiseParams::from_sigma0_sq(1.0)
    }

    #[test]
    fn weight_is_the_normalized_projected_column() {
        let h = ComplexVector::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        let w = zf_mrc_weight(&h).unwrap();
        assert!((w[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(w[1].norm() < 1e-15);

        let h = ComplexVector::new(vec![c(0.0, 0.0), c(0.0, 3.0)]).unwrap();
        let w = zf_mrc_weight(&h).unwrap();
        assert!((w[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn weight_inner_product_recovers_the_norm() {
        let mut stream = RngStream::new(1, 0);
        for _ in 0..200 {
            let h = ComplexVector::new(
                (0..4)
                    .map(|_| crate::channel::sample_complex_gaussian(&mut stream, 1.0))
                    .collect(),
            )
            .unwrap();
            let w = zf_mrc_weight(&h).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-12);
            let dot = w.inner(&h);
            assert!(dot.im.abs() < 1e-12 * h.norm());
            assert!((dot.re - h.norm()).abs() < 1e-12 * h.norm());
        }
    }

    #[test]
    fn zero_vector_is_degenerate() {
        let z = ComplexVector::zeros(3);
        assert!(matches!(zf_mrc_weight(&z), Err(DetectorError::DegenerateChannel(_))));
    }

    #[test]
    fn after_projection_snr_ratios() {
        let params = unit_params();
        let h = ComplexVector::new(vec![c(1.0, 0.0)]).unwrap();
        assert!((after_projection_snr(&h, &params) - 1.0).abs() < 1e-15);

        let params = NoiseParams::from_sigma0_sq(0.5);
        let h = ComplexVector::new(vec![c(2.0, 0.0)]).unwrap();
        assert!((after_projection_snr(&h, &params) - 8.0).abs() < 1e-15);
    }

    #[test]
    fn powerwise_divisor_follows_the_step() {
        let params = unit_params();
        let h = ComplexVector::new(vec![c(1.0, 1.0), c(0.5, 0.0)]).unwrap();

        let d22 = SystemDims::new(2, 2).unwrap();
        let ratio = after_projection_snr(&h, &params) / powerwise_snr(&h, &params, d22, 2);
        assert!((ratio - 2.0).abs() < 1e-12);

        let d42 = SystemDims::new(4, 2).unwrap();
        let ratio = after_projection_snr(&h, &params) / powerwise_snr(&h, &params, d42, 1);
        assert!((ratio - 3.0).abs() < 1e-12);
    }

    #[test]
    fn snr_identity_holds_per_trial() {
        let params = NoiseParams::from_gamma0(10.0);
        for n_rx in [2usize, 3, 4] {
            let dims = SystemDims::new(n_rx, 2).unwrap();
            for t in 0..2000u64 {
                let mut stream = RngStream::new(1001, t);
                let h = sample_channel(dims, &mut stream);
                let a = analyze_channel(&h, &params).unwrap();
                for step in 0..2 {
                    let factor = (n_rx - 2 + step + 1) as f64;
                    let rel =
                        (a.snr_opt[step] - factor * a.snr_powerwise[step]).abs() / a.snr_opt[step];
                    assert!(rel < 1e-12, "relative deviation {rel}");
                }
            }
        }
    }

    #[test]
    fn stronger_orthogonal_column_is_detected_first() {
        // Orthogonal columns reduce ordering to a column-norm comparison.
        let h = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(10.0, 0.0)],
        )
        .unwrap();
        let order = order_streams(&h, &unit_params()).unwrap();
        assert_eq!(order, [1, 0]);
    }

    #[test]
    fn ordering_is_equivariant_under_column_swap() {
        let mut stream = RngStream::new(2002, 0);
        let dims = SystemDims::new(3, 2).unwrap();
        for _ in 0..200 {
            let h = sample_channel(dims, &mut stream);
            let swapped = ComplexMatrix::from_columns(&[h.column(1), h.column(0)]).unwrap();
            let a = order_streams(&h, &unit_params()).unwrap();
            let b = order_streams(&swapped, &unit_params()).unwrap();
            assert_eq!(a, [1 - b[0], 1 - b[1]]);
        }
    }

    #[test]
    fn ordering_picks_the_larger_projected_norm() {
        let params = unit_params();
        let dims = SystemDims::new(2, 2).unwrap();
        for t in 0..2000u64 {
            let mut stream = RngStream::new(3003, t);
            let h = sample_channel(dims, &mut stream);
            let cols = [h.column(0), h.column(1)];
            let p0 = orthogonal_residual(&cols[0], std::slice::from_ref(&cols[1]))
                .unwrap()
                .norm_sqr();
            let p1 = orthogonal_residual(&cols[1], std::slice::from_ref(&cols[0]))
                .unwrap()
                .norm_sqr();
            let brute = if p1 > p0 { [1, 0] } else { [0, 1] };
            assert_eq!(order_streams(&h, &params).unwrap(), brute);
        }
    }

    #[test]
    fn noiseless_detection_is_exact() {
        let params = NoiseParams::from_gamma0(100.0);
        let dims = SystemDims::new(3, 2).unwrap();
        for t in 0..500u64 {
            let mut stream = RngStream::new(4004, t);
            let h = sample_channel(dims, &mut stream);
            let symbols = sample_bpsk_symbols(2, &mut stream);
            let received = h.mat_vec(&ComplexVector::from_reals(&symbols)).unwrap();
            let trace = detect(&h, &received, &symbols, &params, CancellationMode::Propagate)
                .unwrap();
            assert!(!trace.block_error(&symbols));
            for step in &trace.steps {
                assert!(step.after_combining_noise.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn genie_and_propagate_agree_when_step_one_is_correct() {
        let params = NoiseParams::from_gamma0(10.0);
        let dims = SystemDims::new(2, 2).unwrap();
        let mut checked = 0;
        for t in 0..2000u64 {
            let mut stream = RngStream::new(5005, t);
            let h = sample_channel(dims, &mut stream);
            let symbols = sample_bpsk_symbols(2, &mut stream);
            let noise = sample_noise(2, params, &mut stream);
            let received = h
                .mat_vec(&ComplexVector::from_reals(&symbols))
                .unwrap()
                .add(&noise);
            let genie = detect(&h, &received, &symbols, &params, CancellationMode::Genie).unwrap();
            let prop =
                detect(&h, &received, &symbols, &params, CancellationMode::Propagate).unwrap();
            let step1 = &genie.steps[0];
            if step1.decision == symbols[step1.stream_index] {
                checked += 1;
                for (a, b) in genie.steps.iter().zip(&prop.steps) {
                    assert_eq!(a.decision, b.decision);
                    assert_eq!(a.after_combining_noise, b.after_combining_noise);
                }
            }
            // Block error indicators must agree regardless.
            assert_eq!(genie.block_error(&symbols), prop.block_error(&symbols));
        }
        assert!(checked > 1500, "too few correct step-1 trials: {checked}");
    }

    #[test]
    fn weights_are_orthogonal_across_steps() {
        let params = NoiseParams::from_gamma0(10.0);
        let dims = SystemDims::new(4, 2).unwrap();
        for t in 0..2000u64 {
            let mut stream = RngStream::new(6006, t);
            let h = sample_channel(dims, &mut stream);
            let a = analyze_channel(&h, &params).unwrap();
            let dot = a.weight[0].inner(&a.weight[1]).norm();
            assert!(dot < 1e-10, "weight inner product {dot}");
        }
    }

    #[test]
    fn after_combining_noise_picks_the_weighted_component() {
        let w = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let v = ComplexVector::new(vec![c(0.3, -0.7), c(5.0, 5.0)]).unwrap();
        assert_eq!(after_combining_noise(&w, &v), c(0.3, -0.7));
    }

    #[test]
    fn after_combining_noise_moments() {
        let params = NoiseParams::from_sigma0_sq(0.25);
        let dims = SystemDims::new(2, 2).unwrap();
        let trials = 200_000u64;
        let mut power = [0.0f64; 2];
        let mut cross = Complex64::new(0.0, 0.0);
        for t in 0..trials {
            let mut stream = RngStream::new(7007, t);
            let h = sample_channel(dims, &mut stream);
            let a = analyze_channel(&h, &params).unwrap();
            let v = sample_noise(2, params, &mut stream);
            let xi1 = after_combining_noise(&a.weight[0], &v);
            let xi2 = after_combining_noise(&a.weight[1], &v);
            power[0] += xi1.norm_sqr();
            power[1] += xi2.norm_sqr();
            cross += xi1.conj() * xi2;
        }
        let n = trials as f64;
        for p in power {
            assert!((p / n / 0.25 - 1.0).abs() < 0.01, "xi power {}", p / n);
        }
        let bound = 4.0 * 0.25 / n.sqrt();
        assert!((cross / n).norm() < bound, "cross correlation {}", (cross / n).norm());
    }

    #[test]
    fn step_one_error_rate_tracks_the_closed_form() {
        // 2x2 BPSK at 10 dB against the closed-form first-step average BER.
        let gamma0 = 10.0f64;
        let params = NoiseParams::from_gamma0(gamma0);
        let dims = SystemDims::new(2, 2).unwrap();
        let trials = 200_000u64;
        let mut errors = 0u64;
        for t in 0..trials {
            let mut stream = RngStream::new(8008, t);
            let h = sample_channel(dims, &mut stream);
            let symbols = sample_bpsk_symbols(2, &mut stream);
            let noise = sample_noise(2, params, &mut stream);
            let received = h
                .mat_vec(&ComplexVector::from_reals(&symbols))
                .unwrap()
                .add(&noise);
            let trace = detect(&h, &received, &symbols, &params, CancellationMode::Genie).unwrap();
            let step1 = &trace.steps[0];
            if step1.decision != symbols[step1.stream_index] {
                errors += 1;
            }
        }
        let estimate = errors as f64 / trials as f64;
        let reference =
            crate::analytic::ber_step1(&crate::analytic::ModulationSpec::bpsk(), 2, gamma0)
                .unwrap();
        let se = (reference * (1.0 - reference) / trials as f64).sqrt();
        assert!(
            (estimate - reference).abs() < 4.0 * se,
            "estimate {estimate} vs reference {reference} (se {se})"
        );
    }

    #[test]
    fn fixed_order_diagnostic_detects_stream_zero_first() {
        let params = unit_params();
        let h = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(10.0, 0.0)],
        )
        .unwrap();
        let symbols = [1.0, -1.0];
        let received = h.mat_vec(&ComplexVector::from_reals(&symbols)).unwrap();
        let trace =
            detect_fixed_order(&h, &received, &symbols, &params, CancellationMode::Genie).unwrap();
        assert_eq!(trace.order, [0, 1]);
        assert!(!trace.block_error(&symbols));
    }
}
