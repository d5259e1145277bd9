//! Performance laboratory for the n-by-2 V-BLAST detector with optimal
//! ordering and zero-forcing maximal-ratio combining over i.i.d. Rayleigh
//! fading.
//!
//! The crate has two halves that check each other:
//!
//! * [`analytic`] — closed-form outage CDFs, exact average BER for
//!   non-coherent BFSK and coherent BPSK (plus a generic conditional-BER
//!   mapping), high-SNR asymptotes and block error rate.
//! * [`detector`] + [`montecarlo`] — a symbol-level simulator of the actual
//!   detection chain (optimal ordering, orthogonal projection, ZF-MRC
//!   combining, interference cancellation) with deterministic, partitionable
//!   random streams and confidence-interval estimators.
//!
//! [`validate`] runs the cross-check suite: algebraic identities, quadrature
//! oracles for every closed form, Kolmogorov-Smirnov tests of the per-step
//! SNR distributions, and Monte Carlo BER agreement.

pub mod analytic;
pub mod channel;
pub mod detector;
pub mod linalg;
pub mod montecarlo;
pub mod validate;

pub use analytic::{
    bler, q_function, AnalyticError, ModulationFamily, ModulationSpec, OrderedSnrCoefficients,
    PerformancePoint, Step,
};
pub use channel::{NoiseParams, RngStream, SystemDims};
pub use detector::{CancellationMode, DetectionStep, DetectionTrace, DetectorError};
pub use linalg::{ComplexMatrix, ComplexVector, LinalgError};
pub use montecarlo::{Estimator, PointResult, RateEstimate, SimConfig, SimResult};
pub use validate::{CheckResult, ValidationConfig, ValidationReport};
