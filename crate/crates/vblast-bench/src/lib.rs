//! Shared helpers for the benchmark suite.

use vblast_core::channel::{sample_bpsk_symbols, sample_channel, sample_noise, RngStream};
use vblast_core::linalg::{ComplexMatrix, ComplexVector};
use vblast_core::{NoiseParams, SystemDims};

/// One ready-to-detect trial: channel, transmitted symbols and the noisy
/// received vector.
pub struct Trial {
    pub channel: ComplexMatrix,
    pub symbols: Vec<f64>,
    pub received: ComplexVector,
}

pub fn make_trials(n_rx: usize, gamma0: f64, count: u64, seed: u64) -> (NoiseParams, Vec<Trial>) {
    let dims = SystemDims::n_by_2(n_rx).expect("n >= 2");
    let params = NoiseParams::from_gamma0(gamma0);
    let trials = (0..count)
        .map(|t| {
            let mut stream = RngStream::new(seed, t);
            let channel = sample_channel(dims, &mut stream);
            let symbols = sample_bpsk_symbols(2, &mut stream);
            let noise = sample_noise(n_rx, params, &mut stream);
            let received = channel
                .mat_vec(&ComplexVector::from_reals(&symbols))
                .expect("shape")
                .add(&noise);
            Trial { channel, symbols, received }
        })
        .collect();
    (params, trials)
}
