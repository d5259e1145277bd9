//! Reproducible sampling of Rayleigh channels, AWGN noise and BPSK symbols.
//!
//! All randomness flows through [`RngStream`], a counter-based generator with
//! splittable per-partition seeding: the stream for `(master_seed,
//! partition_index)` is a pure function of those two integers, so any Monte
//! Carlo estimate can be expressed as a fold over per-partition partial sums
//! and the result does not depend on how many workers computed them.
//!
//! Normalization convention used throughout the crate: unit symbol power and
//! unit channel-entry variance, so the average per-branch SNR is
//! `gamma0 = 1 / sigma0_sq`.

use num_complex::Complex64;
use thiserror::Error;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const PARTITION_SALT: u64 = 0xA076_1D64_78BD_642F;
const EPS53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finalizer; a bijective avalanche mix on 64 bits.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("system needs n_rx >= m_tx >= 2, got n_rx = {n_rx}, m_tx = {m_tx}")]
    InvalidDims { n_rx: usize, m_tx: usize },
}

/// Deterministic counter-based random stream.
///
/// Output `i` of the stream is `mix64(key + i * GOLDEN_GAMMA)` where `key` is
/// derived from `(master_seed, partition_index)`. Identical inputs give
/// bit-identical sequences across runs; distinct partition indices give
/// statistically independent streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    partition_index: u64,
    counter: u64,
    key: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, partition_index: u64) -> Self {
        let key = mix64(
            mix64(master_seed ^ GOLDEN_GAMMA)
                .wrapping_add(mix64(partition_index.wrapping_mul(PARTITION_SALT) ^ partition_index)),
        );
        Self { master_seed, partition_index, counter: 0, key }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn partition_index(&self) -> u64 {
        self.partition_index
    }

    /// How many 64-bit outputs have been drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)));
        self.counter += 1;
        out
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * EPS53
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn next_uniform_positive(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * EPS53
    }
}

/// Receive/transmit antenna counts. The analytic engine additionally needs
/// `m_tx == 2`; the sampler itself only requires `n_rx >= m_tx >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SystemDims {
    n_rx: usize,
    m_tx: usize,
}

impl SystemDims {
    pub fn new(n_rx: usize, m_tx: usize) -> Result<Self, ChannelError> {
        if m_tx < 2 || n_rx < m_tx {
            return Err(ChannelError::InvalidDims { n_rx, m_tx });
        }
        Ok(Self { n_rx, m_tx })
    }

    /// `n` receive antennas by 2 transmitters, the configuration the whole
    /// analytic engine is built for.
    pub fn n_by_2(n_rx: usize) -> Result<Self, ChannelError> {
        Self::new(n_rx, 2)
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn m_tx(&self) -> usize {
        self.m_tx
    }
}

/// Noise variance per complex receive sample and the matching average
/// per-branch SNR under the unit-power normalization (`gamma0 * sigma0_sq = 1`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseParams {
    sigma0_sq: f64,
    gamma0: f64,
}

impl NoiseParams {
    pub fn from_gamma0(gamma0: f64) -> Self {
        assert!(gamma0.is_finite() && gamma0 > 0.0, "gamma0 must be positive, got {gamma0}");
        Self { sigma0_sq: 1.0 / gamma0, gamma0 }
    }

    pub fn from_sigma0_sq(sigma0_sq: f64) -> Self {
        assert!(
            sigma0_sq.is_finite() && sigma0_sq > 0.0,
            "sigma0_sq must be positive, got {sigma0_sq}"
        );
        Self { sigma0_sq, gamma0: 1.0 / sigma0_sq }
    }

    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }
}

/// Circularly symmetric complex Gaussian sample with the given total variance
/// (each real component carries half of it), generated by Box-Muller so one
/// sample consumes exactly two stream outputs.
pub fn sample_complex_gaussian(stream: &mut RngStream, variance: f64) -> Complex64 {
    debug_assert!(variance > 0.0, "variance must be positive");
    let u1 = stream.next_uniform_positive();
    let u2 = stream.next_uniform();
    let radius = (-2.0 * u1.ln()).sqrt() * (0.5 * variance).sqrt();
    let phase = std::f64::consts::TAU * u2;
    Complex64::new(radius * phase.cos(), radius * phase.sin())
}

/// i.i.d. Rayleigh channel matrix: every entry is unit-variance circular
/// complex Gaussian. Entries are drawn in row-major order.
pub fn sample_channel(dims: SystemDims, stream: &mut RngStream) -> crate::linalg::ComplexMatrix {
    let data = (0..dims.n_rx * dims.m_tx)
        .map(|_| sample_complex_gaussian(stream, 1.0))
        .collect();
    crate::linalg::ComplexMatrix::new(dims.n_rx, dims.m_tx, data)
        .expect("gaussian samples are finite")
}

/// AWGN vector with i.i.d. entries of variance `sigma0_sq`.
pub fn sample_noise(
    dim: usize,
    params: NoiseParams,
    stream: &mut RngStream,
) -> crate::linalg::ComplexVector {
    let data = (0..dim)
        .map(|_| sample_complex_gaussian(stream, params.sigma0_sq))
        .collect();
    crate::linalg::ComplexVector::new(data).expect("gaussian samples are finite")
}

/// Unit-power antipodal symbols, i.i.d. uniform over `{+1, -1}`.
pub fn sample_bpsk_symbols(count: usize, stream: &mut RngStream) -> Vec<f64> {
    (0..count)
        .map(|_| if stream.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
        .collect()
}
