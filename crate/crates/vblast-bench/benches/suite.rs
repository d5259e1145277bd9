use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use vblast_bench::make_trials;
use vblast_core::analytic::{ber_step1, ber_step2, q_function, ModulationSpec, OrderedSnrCoefficients};
use vblast_core::detector::{analyze_channel, detect, CancellationMode};
use vblast_core::montecarlo::{run_symbol_level, Estimator, SimConfig};
use vblast_core::{SystemDims};

fn bench_detector(c: &mut Criterion) {
    let mut group = c.benchmark_group("detector");
    for n_rx in [2usize, 4, 8] {
        let (params, trials) = make_trials(n_rx, 10.0, 256, 7);
        let mut cursor = 0usize;
        group.bench_function(format!("detect_{n_rx}x2"), |b| {
            b.iter(|| {
                let t = &trials[cursor & 255];
                cursor += 1;
                black_box(
                    detect(
                        &t.channel,
                        &t.received,
                        &t.symbols,
                        &params,
                        CancellationMode::Genie,
                    )
                    .unwrap(),
                )
            })
        });
        let mut cursor = 0usize;
        group.bench_function(format!("analyze_channel_{n_rx}x2"), |b| {
            b.iter(|| {
                let t = &trials[cursor & 255];
                cursor += 1;
                black_box(analyze_channel(&t.channel, &params).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_analytic(c: &mut Criterion) {
    let mut group = c.benchmark_group("analytic");
    group.bench_function("q_function", |b| {
        let mut x = 0.0f64;
        b.iter(|| {
            x = (x + 0.37) % 8.0;
            black_box(q_function(black_box(x)))
        })
    });
    group.bench_function("coefficients_n8", |b| {
        b.iter(|| black_box(OrderedSnrCoefficients::new(8).unwrap()))
    });
    let bpsk = ModulationSpec::bpsk();
    group.bench_function("ber_steps_bpsk_n4", |b| {
        let mut g = 1.0f64;
        b.iter(|| {
            g = if g > 1e4 { 1.0 } else { g * 1.7 };
            let p1 = ber_step1(&bpsk, 4, g).unwrap();
            let p2 = ber_step2(&bpsk, 4, g).unwrap();
            black_box((p1, p2))
        })
    });
    let coeffs = OrderedSnrCoefficients::new(4).unwrap();
    group.bench_function("outage_cdf_step1_n4", |b| {
        let mut x = 0.01f64;
        b.iter(|| {
            x = if x > 20.0 { 0.01 } else { x * 1.1 };
            black_box(coeffs.outage_step1(black_box(x)))
        })
    });
    group.finish();
}

fn bench_montecarlo(c: &mut Criterion) {
    let config = SimConfig {
        dims: SystemDims::n_by_2(2).unwrap(),
        gamma0_db: vec![10.0],
        trials: 4096,
        seed: 99,
        modulation: ModulationSpec::bpsk(),
        mode: CancellationMode::Genie,
        estimator: Estimator::Symbol,
        workers: Some(1),
    };
    c.bench_function("symbol_level_4096_trials", |b| {
        b.iter(|| black_box(run_symbol_level(&config).unwrap()))
    });
}

criterion_group!(benches, bench_detector, bench_analytic, bench_montecarlo);
criterion_main!(benches);
