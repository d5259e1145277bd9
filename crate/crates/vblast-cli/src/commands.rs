//! The three subcommands: closed-form curves, Monte Carlo sweeps and the
//! validation report.

use serde::Serialize;

use vblast_core::analytic::{outage_cdf_step1, ModulationSpec, PerformancePoint};
use vblast_core::channel::SystemDims;
use vblast_core::montecarlo::{db_to_linear, run_simulation, SimConfig};
use vblast_core::validate::{run_full_validation, ValidationConfig};

use crate::args::{
    parse_modulation, parse_snr_grid, parse_threshold_list, require_rx, CurvesArgs, SimulateArgs,
    ValidateArgs,
};
use crate::output::{emit, format_sig, RunManifest, Table};
use crate::AppError;

#[derive(Serialize)]
struct CurvesEcho {
    rx: usize,
    modulation: ModulationSpec,
    snr_db: Vec<f64>,
    outage_threshold_db: Vec<f64>,
}

pub fn curves(args: CurvesArgs) -> Result<(), AppError> {
    require_rx(args.rx)?;
    let modulation = parse_modulation(&args.modulation)?;
    let grid = parse_snr_grid(&args.snr_db)?;
    let thresholds = match &args.outage_threshold_db {
        Some(text) => parse_threshold_list(text)?,
        None => Vec::new(),
    };

    let mut columns = vec!["snr_db".to_string(), "gamma0".to_string()];
    for t in &thresholds {
        columns.push(format!("f1_out_{t}db"));
    }
    columns.extend(
        ["ber1", "ber2", "bler", "ber1_asym", "ber2_asym"].map(str::to_string),
    );

    let mut rows = Vec::with_capacity(grid.len());
    for &db in &grid {
        let gamma0 = db_to_linear(db);
        let point = PerformancePoint::analytic(&modulation, args.rx, gamma0)
            .map_err(|e| AppError::Usage(e.to_string()))?;
        let mut row = vec![format_sig(db), format_sig(gamma0)];
        for &t in &thresholds {
            let normalized = db_to_linear(t) / gamma0;
            let outage = outage_cdf_step1(args.rx, normalized)
                .map_err(|e| AppError::Usage(e.to_string()))?;
            row.push(format_sig(outage));
        }
        row.push(format_sig(point.pe_step1));
        row.push(format_sig(point.pe_step2));
        row.push(format_sig(point.bler));
        row.push(format_sig(point.pe_step1_asymptote));
        row.push(format_sig(point.pe_step2_asymptote));
        rows.push(row);
    }

    let table = Table { columns, rows };
    let echo = CurvesEcho {
        rx: args.rx,
        modulation,
        snr_db: grid,
        outage_threshold_db: thresholds,
    };
    emit(&table, args.format, args.out.as_deref(), |path| {
        RunManifest::new("curves", None, serde_json::to_value(&echo).expect("echo"), path)
    })
}

pub fn simulate(args: SimulateArgs) -> Result<(), AppError> {
    require_rx(args.rx)?;
    if args.trials == 0 {
        return Err(AppError::Usage("--trials must be at least 1".to_string()));
    }
    let modulation = parse_modulation(&args.modulation)?;
    let grid = parse_snr_grid(&args.snr_db)?;
    let dims =
        SystemDims::n_by_2(args.rx).map_err(|e| AppError::Usage(e.to_string()))?;
    let config = SimConfig {
        dims,
        gamma0_db: grid,
        trials: args.trials,
        seed: args.seed,
        modulation,
        mode: args.mode.into(),
        estimator: args.estimator.into(),
        workers: args.workers,
    };
    config.validate().map_err(|e| AppError::Usage(e.to_string()))?;
    let result = run_simulation(&config).map_err(|e| AppError::Usage(e.to_string()))?;

    let columns = [
        "snr_db", "trials", "ber1_mc", "ber1_lo", "ber1_hi", "ber2_mc", "ber2_lo", "ber2_hi",
        "bler_mc", "bler_lo", "bler_hi", "ber1_ref", "ber2_ref", "bler_ref",
    ]
    .map(str::to_string)
    .to_vec();
    let rows = result
        .points
        .iter()
        .map(|p| {
            vec![
                format_sig(p.snr_db),
                p.trials.to_string(),
                format_sig(p.ber_step1.value),
                format_sig(p.ber_step1.lo),
                format_sig(p.ber_step1.hi),
                format_sig(p.ber_step2.value),
                format_sig(p.ber_step2.lo),
                format_sig(p.ber_step2.hi),
                format_sig(p.bler.value),
                format_sig(p.bler.lo),
                format_sig(p.bler.hi),
                format_sig(p.analytic_ber_step1),
                format_sig(p.analytic_ber_step2),
                format_sig(p.analytic_bler),
            ]
        })
        .collect();

    let table = Table { columns, rows };
    let seed = args.seed;
    emit(&table, args.format, args.out.as_deref(), |path| {
        RunManifest::new(
            "simulate",
            Some(seed),
            serde_json::to_value(&config).expect("config echo"),
            path,
        )
    })
}

pub fn validate(args: ValidateArgs) -> Result<(), AppError> {
    if args.trials == 0 {
        return Err(AppError::Usage("--trials must be at least 1".to_string()));
    }
    let config = ValidationConfig {
        seed: args.seed,
        trials: args.trials,
        workers: args.workers,
    };
    let report = run_full_validation(&config);

    for group in report.group_names() {
        let checks = report.group(group);
        let passed = checks.iter().filter(|c| c.pass).count();
        println!("{group}: {passed}/{} checks pass", checks.len());
        for check in checks {
            println!("  {}", check.summary_line());
        }
    }
    println!(
        "overall: {} ({} checks, seed {}, {} trials per statistical check)",
        if report.all_pass { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.seed,
        report.trials
    );

    if let Some(path) = &args.out {
        let body = serde_json::to_string_pretty(&report)
            .expect("report serializes")
            + "\n";
        std::fs::write(path, body)?;
    }

    if report.all_pass {
        Ok(())
    } else {
        let failing: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        Err(AppError::CheckFailure(format!(
            "{} check(s) failed: {}",
            failing.len(),
            failing.join(", ")
        )))
    }
}
