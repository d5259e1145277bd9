//! The cross-check suite: algebraic identities between equivalent closed
//! forms, quadrature oracles that recompute every average BER by numerical
//! integration against the outage CDFs, Kolmogorov-Smirnov tests of the
//! simulated SNR distributions, and Monte Carlo versus closed-form BER
//! agreement.
//!
//! Each check reports a measured scalar and the bound(s) it must satisfy, so
//! a report line is self-contained evidence. The statistical checks are
//! deterministic for a fixed seed.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    ber_asymptote, ber_mrc_bfsk, ber_mrc_bpsk, ber_step1, ber_step2, ber_step2_bpsk_2x2_variant,
    bler, ModulationFamily, ModulationSpec, OrderedSnrCoefficients, Step,
};
use crate::channel::{
    sample_bpsk_symbols, sample_channel, sample_noise, NoiseParams, RngStream, SystemDims,
};
use crate::detector::{detect, CancellationMode};
use crate::linalg::ComplexVector;
use crate::montecarlo::{
    collect_channel_stats, db_to_linear, estimate_noise_crosscorr, ks_statistic_sorted,
    map_blocks, run_semianalytic_ber, run_symbol_level, Estimator, SimConfig,
};

const Z95: f64 = 1.959963984540054;

/// One verified property: `pass` holds when `lo <= measured <= hi` (absent
/// bounds are unconstrained) and the measurement is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub group: String,
    pub name: String,
    pub measured: f64,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub pass: bool,
}

impl CheckResult {
    fn evaluate(group: &str, name: String, measured: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = measured.is_finite()
            && lo.is_none_or(|l| measured >= l)
            && hi.is_none_or(|h| measured <= h);
        Self { group: group.to_string(), name, measured, lo, hi, pass }
    }

    pub fn bound_description(&self) -> String {
        match (self.lo, self.hi) {
            (Some(l), Some(h)) => format!("in [{l:.3e}, {h:.3e}]"),
            (Some(l), None) => format!(">= {l:.3e}"),
            (None, Some(h)) => format!("<= {h:.3e}"),
            (None, None) => "unbounded".to_string(),
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {}/{}: measured={:.6e} bound {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.group,
            self.name,
            self.measured,
            self.bound_description()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub trials: u64,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl ValidationReport {
    pub fn group(&self, name: &str) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.group == name).collect()
    }

    pub fn group_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for c in &self.checks {
            if !names.contains(&c.group.as_str()) {
                names.push(&c.group);
            }
        }
        names
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub seed: u64,
    /// Trials per Monte Carlo check. Statistical bounds scale with this.
    pub trials: u64,
    pub workers: Option<usize>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { seed: 42, trials: 1_000_000, workers: None }
    }
}

/// Runs every check group and assembles the report.
pub fn run_full_validation(config: &ValidationConfig) -> ValidationReport {
    let mut checks = Vec::new();
    checks.extend(algebraic_checks());
    checks.extend(quadrature_checks());
    checks.extend(distribution_checks(config));
    checks.extend(ber_agreement_checks(config));
    checks.extend(asymptote_checks());
    checks.extend(bler_checks(config));
    checks.extend(ordering_checks());
    let all_pass = checks.iter().all(|c| c.pass);
    ValidationReport {
        tool: "vblast-core".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        trials: config.trials,
        checks,
        all_pass,
    }
}

// ---------------------------------------------------------------------------
// Group: algebraic identities between equivalent closed forms.
// ---------------------------------------------------------------------------

const GROUP_ALGEBRAIC: &str = "algebraic-identities";

/// Direct two-term expression for the 2x2 BFSK second-step average BER.
fn bfsk_step2_2x2_direct(g: f64) -> f64 {
     4.0 / ((4.0 + g) * (4.0 + g)) + 16.0 / ((4.0 + g) * (4.0 + g) * (4.0 + g))
}

/// Direct expression for the 2x2 BPSK first-step average BER.
fn bpsk_step1_2x2_direct(g: f64) -> f64 {
    0.5 - (g / (1.0 + g)).sqrt()
        + 0.5 * (g / (2.0 + g)).sqrt() * (1.0 + 1.0 / (4.0 * (2.0 + g)))
}

/// Direct expression for the 2x2 BPSK second-step average BER with the
/// `(2+g)^2` final denominator.
fn bpsk_step2_2x2_direct(g: f64) -> f64 {
    0.5 - 0.5
        * (g / (2.0 + g)).sqrt()
        * (1.0 + 1.0 / (2.0 + g) + 3.0 / (4.0 * (2.0 + g) * (2.0 + g)))
}

fn algebraic_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();

    // Product form vs series form of the second-step outage CDF.
    for n in 2..=5usize {
        let coeffs = OrderedSnrCoefficients::new(n).expect("n >= 2");
        let mut worst: f64 = 0.0;
        let mut x = 0.01;
        while x <= 20.0 {
            let prod = coeffs.outage_step2(x);
            let series = coeffs.outage_step2_series(x);
            worst = worst.max((prod - series).abs() / prod.abs().max(1e-300));
            x *= 1.12;
        }
        out.push(CheckResult::evaluate(
            GROUP_ALGEBRAIC,
            format!("f2-dual-form-n{n}"),
            worst,
            None,
            Some(1e-12),
        ));
    }

    // General-n second-step BFSK formula reduces to the direct 2x2 expression.
    let bfsk = ModulationSpec::bfsk();
    let mut worst: f64 = 0.0;
    for &g in &[0.01, 0.1, 1.0, 10.0, 100.0, 1e4, 1e6] {
        let reduced = ber_step2(&bfsk, 2, g).unwrap();
        let direct = bfsk_step2_2x2_direct(g);
        worst = worst.max((reduced - direct).abs() / direct);
    }
    out.push(CheckResult::evaluate(
        GROUP_ALGEBRAIC,
        "bfsk-step2-2x2-reduction".into(),
        worst,
        None,
        Some(1e-12),
    ));

    // General-n BPSK formulas reduce to the direct 2x2 expressions. The grid
    // stops at 100 because the direct reference forms subtract half-sized
    // terms and lose relative accuracy beyond that; the quadrature group
    // covers the high-SNR regime independently.
    let bpsk = ModulationSpec::bpsk();
    let mut worst1: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    for &g in &[0.01, 0.1, 1.0, 3.0, 10.0, 30.0, 100.0] {
        let r1 = ber_step1(&bpsk, 2, g).unwrap();
        let d1 = bpsk_step1_2x2_direct(g);
        worst1 = worst1.max((r1 - d1).abs() / d1);
        let r2 = ber_step2(&bpsk, 2, g).unwrap();
        let d2 = bpsk_step2_2x2_direct(g);
        worst2 = worst2.max((r2 - d2).abs() / d2);
    }
    out.push(CheckResult::evaluate(
        GROUP_ALGEBRAIC,
        "bpsk-step1-2x2-reduction".into(),
        worst1,
        None,
        Some(1e-12),
    ));
    out.push(CheckResult::evaluate(
        GROUP_ALGEBRAIC,
        "bpsk-step2-2x2-reduction".into(),
        worst2,
        None,
        Some(1e-12),
    ));

    // General-n asymptotes reduce to the 2x2 constants.
    let mut worst: f64 = 0.0;
    for &g in &[0.5, 1.0, 10.0, 1e3, 1e6] {
        let a = ber_asymptote(Step::First, &bpsk, 2, g).unwrap();
        worst = worst.max((a - 1.0 / (8.0 * g)).abs() / a);
        let a = ber_asymptote(Step::Second, &bpsk, 2, g).unwrap();
        worst = worst.max((a - 3.0 / (8.0 * g * g)).abs() / a);
        let a = ber_asymptote(Step::First, &bfsk, 2, g).unwrap();
        worst = worst.max((a - 0.5 / g).abs() / a);
        let a = ber_asymptote(Step::Second, &bfsk, 2, g).unwrap();
        worst = worst.max((a - 4.0 / (g * g)).abs() / a);
    }
    out.push(CheckResult::evaluate(
        GROUP_ALGEBRAIC,
        "asymptote-2x2-reduction".into(),
        worst,
        None,
        Some(1e-12),
    ));

    out
}

// ---------------------------------------------------------------------------
// Group: quadrature oracle.
// ---------------------------------------------------------------------------

const GROUP_QUADRATURE: &str = "quadrature-oracle";

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_refine(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive integration over fixed panels. The pure doubling scheme can
/// terminate early when all of its first few sample points miss the
/// integrand's mass (tiny CDF times decayed exponential); pinning panel
/// boundaries forces evaluations through the whole range.
fn integrate_paneled<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], tol: f64) -> f64 {
    let per_panel = tol / breaks.len() as f64;
    breaks
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], per_panel))
        .sum()
}

/// Average per-step BER recomputed by integrating the derivative of the
/// conditional BER against the step's outage CDF (integration by parts of
/// the defining average). Shares only the CDF evaluation with the closed
/// forms, so it catches any slip in the BER coefficient chains.
pub fn quadrature_step_ber(
    coeffs: &OrderedSnrCoefficients,
    modulation: &ModulationSpec,
    step: Step,
    gamma0: f64,
) -> f64 {
    match modulation.family {
        ModulationFamily::Coherent => {
            let alpha = modulation.alpha;
            let constant = modulation.beta * alpha.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
            let s_max = (80.0 / alpha).sqrt();
            let breaks: Vec<f64> =
                (0..=16).map(|i| s_max * i as f64 / 16.0).collect();
            let integrand =
                |s: f64| (-0.5 * alpha * s * s).exp() * coeffs.outage(step, s * s / gamma0);
            constant * integrate_paneled(&integrand, &breaks, 1e-11 / constant.max(1e-3))
        }
        ModulationFamily::Noncoherent => {
            let alpha = modulation.alpha;
            let constant = modulation.alpha * modulation.beta;
            let g_max = 80.0 / alpha;
            let mut breaks = vec![0.0];
            let mut edge = g_max / 512.0;
            while edge < g_max {
                breaks.push(edge);
                edge *= 2.0;
            }
            breaks.push(g_max);
            let integrand = |g: f64| (-alpha * g).exp() * coeffs.outage(step, g / gamma0);
            constant * integrate_paneled(&integrand, &breaks, 1e-11 / constant.max(1e-3))
        }
    }
}

fn quadrature_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let modulations = [ModulationSpec::bfsk(), ModulationSpec::bpsk()];
    for modulation in &modulations {
        for n in 2..=4usize {
            let coeffs = OrderedSnrCoefficients::new(n).expect("n >= 2");
            for step in [Step::First, Step::Second] {
                for &gamma0 in &[1.0, 10.0, 100.0] {
                    let closed = match step {
                        Step::First => coeffs.ber_step1(modulation, gamma0),
                        Step::Second => coeffs.ber_step2(modulation, gamma0),
                    };
                    let quad = quadrature_step_ber(&coeffs, modulation, step, gamma0);
                    let step_no = match step {
                        Step::First => 1,
                        Step::Second => 2,
                    };
                    out.push(CheckResult::evaluate(
                        GROUP_QUADRATURE,
                        format!("quad-{}-step{step_no}-n{n}-g{gamma0}", modulation.name),
                        (closed - quad).abs(),
                        None,
                        Some(1e-7),
                    ));
                }
            }
        }
    }

    // The printed 2x2 second-step BPSK variant with the (4+g)^2 denominator
    // must NOT pass the same oracle at moderate SNR.
    let coeffs = OrderedSnrCoefficients::new(2).expect("n = 2");
    let quad = quadrature_step_ber(&coeffs, &ModulationSpec::bpsk(), Step::Second, 10.0);
    out.push(CheckResult::evaluate(
        GROUP_QUADRATURE,
        "quad-rejects-printed-2x2-variant".into(),
        (ber_step2_bpsk_2x2_variant(10.0) - quad).abs(),
        Some(1e-7),
        None,
    ));
    out
}

// ---------------------------------------------------------------------------
// Groups: SNR distribution, per-trial identity, weights and noise.
// ---------------------------------------------------------------------------

const GROUP_SNR_DIST: &str = "snr-distribution";
const GROUP_IDENTITY: &str = "per-trial-identity";
const GROUP_WEIGHTS_NOISE: &str = "weights-noise";

fn channel_config(config: &ValidationConfig, n_rx: usize) -> SimConfig {
    SimConfig {
        dims: SystemDims::n_by_2(n_rx).expect("n >= 2"),
        gamma0_db: vec![10.0],
        trials: config.trials,
        seed: config.seed,
        modulation: ModulationSpec::bfsk(),
        mode: CancellationMode::Genie,
        estimator: Estimator::Semianalytic,
        workers: config.workers,
    }
}

fn distribution_checks(config: &ValidationConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let critical = 1.63 / (config.trials as f64).sqrt();
    for n in [2usize, 3] {
        let sim = channel_config(config, n);
        let stats = collect_channel_stats(&sim).expect("valid config");
        let coeffs = OrderedSnrCoefficients::new(n).expect("n >= 2");

        let mut snr1 = stats.snr1;
        let mut snr2 = stats.snr2;
        snr1.sort_by(f64::total_cmp);
        snr2.sort_by(f64::total_cmp);
        let d1 = ks_statistic_sorted(&snr1, |x| coeffs.outage_step1(x));
        let d2 = ks_statistic_sorted(&snr2, |x| coeffs.outage_step2(x));
        out.push(CheckResult::evaluate(
            GROUP_SNR_DIST,
            format!("ks-step1-n{n}"),
            d1,
            None,
            Some(critical),
        ));
        out.push(CheckResult::evaluate(
            GROUP_SNR_DIST,
            format!("ks-step2-n{n}"),
            d2,
            None,
            Some(critical),
        ));
        out.push(CheckResult::evaluate(
            GROUP_IDENTITY,
            format!("snr-identity-violations-n{n}"),
            stats.identity_violations as f64,
            None,
            Some(0.0),
        ));
        out.push(CheckResult::evaluate(
            GROUP_IDENTITY,
            format!("degenerate-channels-n{n}"),
            stats.skipped as f64,
            None,
            Some(0.0),
        ));
        out.push(CheckResult::evaluate(
            GROUP_WEIGHTS_NOISE,
            format!("weight-orthogonality-n{n}"),
            stats.max_weight_cross,
            None,
            Some(1e-10),
        ));
    }

    // After-combining noise statistics under ZF-MRC weights at n = 2. The
    // power-ratio band is 1% at one million trials (10 standard errors of
    // the exponential |xi|^2) and widens like 1/sqrt(trials) below that so
    // reduced-trial runs stay calibrated.
    let sim = channel_config(config, 2);
    let sigma0_sq = 1.0 / db_to_linear(sim.gamma0_db[0]);
    let corr = estimate_noise_crosscorr(&sim).expect("valid config");
    out.push(CheckResult::evaluate(
        GROUP_WEIGHTS_NOISE,
        "noise-crosscorr-normalized".into(),
        corr.mean_norm() / sigma0_sq,
        None,
        Some(4.0 / (config.trials as f64).sqrt()),
    ));
    let power_band = 0.01f64.max(4.0 / (config.trials as f64).sqrt());
    out.push(CheckResult::evaluate(
        GROUP_WEIGHTS_NOISE,
        "xi1-power-ratio".into(),
        corr.mean_xi1_sq / sigma0_sq,
        Some(1.0 - power_band),
        Some(1.0 + power_band),
    ));
    out.push(CheckResult::evaluate(
        GROUP_WEIGHTS_NOISE,
        "xi2-power-ratio".into(),
        corr.mean_xi2_sq / sigma0_sq,
        Some(1.0 - power_band),
        Some(1.0 + power_band),
    ));
    out
}

// ---------------------------------------------------------------------------
// Group: Monte Carlo vs closed-form BER.
// ---------------------------------------------------------------------------

const GROUP_BER: &str = "ber-agreement";

fn ber_agreement_checks(config: &ValidationConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid = vec![5.0, 10.0, 15.0];

    // Symbol-level BPSK at n = 2: counted errors against the closed forms,
    // measured in reference-based standard errors.
    let sym = SimConfig {
        dims: SystemDims::n_by_2(2).expect("n = 2"),
        gamma0_db: grid.clone(),
        trials: config.trials,
        seed: config.seed,
        modulation: ModulationSpec::bpsk(),
        mode: CancellationMode::Genie,
        estimator: Estimator::Symbol,
        workers: config.workers,
    };
    let result = run_symbol_level(&sym).expect("valid config");
    for p in &result.points {
        let eff = (p.trials - p.skipped) as f64;
        for (label, est, reference) in [
            ("ber1", p.ber_step1.value, p.analytic_ber_step1),
            ("ber2", p.ber_step2.value, p.analytic_ber_step2),
            ("bler", p.bler.value, p.analytic_bler),
        ] {
            let se = (reference * (1.0 - reference) / eff).sqrt();
            out.push(CheckResult::evaluate(
                GROUP_BER,
                format!("bpsk-symbol-{label}-n2-{}db-in-se", p.snr_db),
                (est - reference).abs() / se,
                None,
                Some(3.0),
            ));
        }
    }

    // Semi-analytic BFSK at n = 2 and 3, measured in sample standard errors.
    for n in [2usize, 3] {
        let semi = SimConfig {
            dims: SystemDims::n_by_2(n).expect("n >= 2"),
            gamma0_db: grid.clone(),
            trials: config.trials,
            seed: config.seed,
            modulation: ModulationSpec::bfsk(),
            mode: CancellationMode::Genie,
            estimator: Estimator::Semianalytic,
            workers: config.workers,
        };
        let result = run_semianalytic_ber(&semi).expect("valid config");
        for p in &result.points {
            for (label, est, reference) in [
                ("ber1", &p.ber_step1, p.analytic_ber_step1),
                ("ber2", &p.ber_step2, p.analytic_ber_step2),
            ] {
                let se = (est.hi - est.lo) / (2.0 * Z95);
                out.push(CheckResult::evaluate(
                    GROUP_BER,
                    format!("bfsk-semianalytic-{label}-n{n}-{}db-in-se", p.snr_db),
                    (est.value - reference).abs() / se,
                    None,
                    Some(3.0),
                ));
            }
        }
    }

    // Frozen anchor: the closed-form BFSK second-step BER at n = 2 and
    // 10 dB equals (32 + 4*10) / 14^3.
    let anchor = ber_step2(&ModulationSpec::bfsk(), 2, 10.0).expect("valid");
    out.push(CheckResult::evaluate(
        GROUP_BER,
        "bfsk-step2-anchor-10db".into(),
        (anchor - 0.026239067055393586).abs(),
        None,
        Some(1e-12),
    ));
    out
}

// ---------------------------------------------------------------------------
// Group: asymptote convergence.
// ---------------------------------------------------------------------------

const GROUP_ASYM: &str = "asymptote-convergence";

fn asymptote_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let gamma0 = db_to_linear(40.0);
    for modulation in [ModulationSpec::bpsk(), ModulationSpec::bfsk()] {
        for n in [2usize, 3] {
            for step in [Step::First, Step::Second] {
                let exact = match step {
                    Step::First => ber_step1(&modulation, n, gamma0).unwrap(),
                    Step::Second => ber_step2(&modulation, n, gamma0).unwrap(),
                };
                let asym = ber_asymptote(step, &modulation, n, gamma0).unwrap();
                let step_no = if step == Step::First { 1 } else { 2 };
                out.push(CheckResult::evaluate(
                    GROUP_ASYM,
                    format!("{}-step{step_no}-n{n}-ratio-at-40db", modulation.name),
                    exact / asym,
                    Some(0.95),
                    Some(1.05),
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Group: BLER domination and mode invariance.
// ---------------------------------------------------------------------------

const GROUP_BLER: &str = "bler-domination";

/// Counts trials whose block-error indicator differs between genie and
/// propagate cancellation when both run on identical channel, symbols and
/// noise. A first-step error dooms the block in both modes; a correct first
/// step makes the modes coincide, so the count must be zero.
fn dual_mode_block_mismatches(config: &ValidationConfig, n_rx: usize, snr_db: f64) -> u64 {
    let dims = SystemDims::n_by_2(n_rx).expect("n >= 2");
    let params = NoiseParams::from_gamma0(db_to_linear(snr_db));
    let seed = config.seed;
    let partials = map_blocks(config.trials, config.workers, |lo, hi| {
        let mut mismatches = 0u64;
        for t in lo..hi {
            let mut stream = RngStream::new(seed, t);
            let h = sample_channel(dims, &mut stream);
            let symbols = sample_bpsk_symbols(2, &mut stream);
            let noise = sample_noise(dims.n_rx(), params, &mut stream);
            let received = h
                .mat_vec(&ComplexVector::from_reals(&symbols))
                .expect("shape fixed")
                .add(&noise);
            let genie = detect(&h, &received, &symbols, &params, CancellationMode::Genie);
            let prop = detect(&h, &received, &symbols, &params, CancellationMode::Propagate);
            match (genie, prop) {
                (Ok(g), Ok(p)) => {
                    if g.block_error(&symbols) != p.block_error(&symbols) {
                        mismatches += 1;
                    }
                }
                _ => mismatches += 1,
            }
        }
        mismatches
    });
    partials.into_iter().sum()
}

fn bler_checks(config: &ValidationConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let gamma0 = db_to_linear(40.0);
    for modulation in [ModulationSpec::bpsk(), ModulationSpec::bfsk()] {
        for n in [2usize, 3] {
            let p1 = ber_step1(&modulation, n, gamma0).unwrap();
            let b = bler(&modulation, n, gamma0).unwrap();
            out.push(CheckResult::evaluate(
                GROUP_BLER,
                format!("{}-bler-over-ber1-n{n}-at-40db", modulation.name),
                b / p1,
                Some(1.0),
                Some(1.01),
            ));
        }
    }
    let mismatches = dual_mode_block_mismatches(config, 2, 10.0);
    out.push(CheckResult::evaluate(
        GROUP_BLER,
        "genie-propagate-block-mismatches".into(),
        mismatches as f64,
        None,
        Some(0.0),
    ));
    out
}

// ---------------------------------------------------------------------------
// Group: ordering effect against plain MRC.
// ---------------------------------------------------------------------------

const GROUP_ORDERING: &str = "ordering-effect";

fn ordering_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let gamma0 = db_to_linear(40.0);
    for modulation in [ModulationSpec::bpsk(), ModulationSpec::bfsk()] {
        let mrc = |order: usize, g: f64| match modulation.family {
            ModulationFamily::Coherent => ber_mrc_bpsk(order, g).unwrap(),
            ModulationFamily::Noncoherent => ber_mrc_bfsk(order, g).unwrap(),
        };
        for n in [2usize, 3] {
            // Ordering buys the first step 3 dB over (n-1)-branch MRC.
            let r1 = ber_step1(&modulation, n, gamma0).unwrap() / mrc(n - 1, 2.0 * gamma0);
            out.push(CheckResult::evaluate(
                GROUP_ORDERING,
                format!("{}-step1-vs-mrc-n{n}", modulation.name),
                r1,
                Some(0.9),
                Some(1.1),
            ));
            // And costs the second step a factor of two against n-branch MRC.
            let r2 = ber_step2(&modulation, n, gamma0).unwrap() / mrc(n, gamma0);
            out.push(CheckResult::evaluate(
                GROUP_ORDERING,
                format!("{}-step2-vs-mrc-n{n}", modulation.name),
                r2,
                Some(1.8),
                Some(2.2),
            ));
        }
    }
    out
}
