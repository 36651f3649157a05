//! Subcommand implementations and the error-to-exit-code policy.
//!
//! Exit codes: 0 success, 1 usage or configuration problems, 2 model
//! validation failure, 3 numeric failure, 4 consistency-check mismatch.

use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::time::Instant;

use chainent::analysis::{bounds_residual, scaling_fit, sweep, SweepRow, SweepTable};
use chainent::correlations::{extract_block, ground_state_correlations};
use chainent::entropy::{block_spectrum, entanglement_entropy};
use chainent::model::{
    spectrum_gap, validate_with, BlockSpec, Geometry, ValidationMode,
};
use chainent::oracle::{dense_entropy, dense_ground_state};
use chainent::Error;

use crate::config::{resolve, Overrides};
use crate::{Cli, Command, CommonArgs, FitArgs};

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: String) -> Self {
        Self { code: 1, message }
    }

    /// Library errors raised while interpreting config values are config
    /// problems, whatever their variant.
    pub fn in_config(err: Error) -> Self {
        Self::config(err.to_string())
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::InvalidInput(_)
            | Error::SizeCap { .. }
            | Error::BlockOutOfRange(_)
            | Error::IndexOutOfRange { .. } => 1,
            Error::ValidationFailed(_) => 2,
            Error::NonPositiveGap { .. }
            | Error::NonPositiveSymbol { .. }
            | Error::SingularMatrix(_)
            | Error::NotPositiveDefinite(_)
            | Error::ComplexEigenvalue { .. }
            | Error::DomainError { .. }
            | Error::DegenerateDesign(_) => 3,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Fit(args) => cmd_fit(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
        Command::Spectrum(args) => cmd_spectrum(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

fn overrides(args: &CommonArgs) -> Overrides<'_> {
    Overrides {
        mode: args.mode.as_deref(),
        placement: args.placement.as_deref(),
        grid: args.grid.as_deref(),
        out: args.out.as_deref(),
        bits: args.bits,
        timings: args.timings,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn mode_name(mode: ValidationMode) -> &'static str {
    match mode {
        ValidationMode::Strict => "strict",
        ValidationMode::Permissive => "permissive",
    }
}

fn unit_factor(bits: bool) -> f64 {
    if bits {
        1.0 / LN_2
    } else {
        1.0
    }
}

fn unit_name(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

fn cmd_validate(args: &CommonArgs) -> Result<i32, Failure> {
    let cfg = resolve(&args.config, &overrides(args))?;
    let report = validate_with(&cfg.couplings, cfg.mode, cfg.points);
    let mut text = format!(
        "mode={}\nmin_lambda={:.16e}\nmin_q={:.16e}\nmin_gap={:.16e}\nverdict={}\n",
        mode_name(report.mode),
        report.min_lambda,
        report.min_q,
        report.min_gap,
        if report.pass { "PASS" } else { "FAIL" },
    );
    for message in &report.messages {
        text.push_str(&format!("reason={message}\n"));
    }
    emit(&cfg.out, &text)?;
    Ok(if report.pass { 0 } else { 2 })
}

fn cmd_entropy(args: &CommonArgs) -> Result<i32, Failure> {
    let cfg = resolve(&args.config, &overrides(args))?;
    let (l_x, l_y) = cfg.block.ok_or_else(|| {
        Failure::config("a [block] section with l_x and l_y is required for entropy".into())
    })?;
    let start = Instant::now();
    let corr = ground_state_correlations(&cfg.couplings, &cfg.geometry, cfg.mode)?;
    let spec = BlockSpec::new(l_x, l_y, cfg.placement)?;
    let bp = extract_block(&corr, &spec)?;
    let result = entanglement_entropy(&block_spectrum(&bp)?)?;
    let wall_ms = if cfg.timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };

    let unit = unit_factor(cfg.bits);
    let (s, s1, s2) = (
        result.s * unit,
        result.s1.unwrap_or(0.0) * unit,
        result.s2.unwrap_or(0.0) * unit,
    );
    let text = format!(
        "l_x,l_y,S,S1,S2,wall_ms\n{l_x},{l_y},{s:.16e},{s1:.16e},{s2:.16e},{wall_ms}\n"
    );
    emit(&cfg.out, &text)?;
    eprintln!(
        "S = {:.12} {} (S1 = {:.12}, S2 = {:.12}, {} eigenvalue(s) clamped)",
        s,
        unit_name(cfg.bits),
        s1,
        s2,
        result.clamp_count,
    );
    Ok(0)
}

fn cmd_sweep(args: &CommonArgs) -> Result<i32, Failure> {
    let cfg = resolve(&args.config, &overrides(args))?;
    let (lx_grid, ly_grid) = cfg.grid.clone().ok_or_else(|| {
        Failure::config("a grid is required for sweep; pass --grid or set run.grid".into())
    })?;
    let mut table = sweep(
        &cfg.couplings,
        &cfg.geometry,
        cfg.mode,
        cfg.placement,
        &lx_grid,
        &ly_grid,
    )?;
    if cfg.bits {
        let unit = unit_factor(true);
        let rows: Vec<SweepRow> = table
            .rows()
            .iter()
            .map(|r| SweepRow {
                s: r.s * unit,
                s1: r.s1 * unit,
                s2: r.s2 * unit,
                ..*r
            })
            .collect();
        table = SweepTable::new(rows, table.fingerprint().to_string())?;
    }
    emit(&cfg.out, &table.to_csv(cfg.timings))?;
    eprintln!(
        "swept {} block(s) on a {}x{} lattice in {} units",
        table.rows().len(),
        cfg.geometry.n_x(),
        cfg.geometry.n_y(),
        unit_name(cfg.bits),
    );
    Ok(0)
}

fn cmd_fit(args: &FitArgs) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&args.csv)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", args.csv.display())))?;
    let table = SweepTable::from_csv(&text).map_err(Failure::in_config)?;
    let fit = scaling_fit(&table)?;
    let residual = bounds_residual(&table)?;
    let unit = unit_factor(args.bits);
    let report = format!(
        "b={:.16e}\na1={:.16e}\na2={:.16e}\na0={:.16e}\nrms_residual={:.16e}\n\
         residual_r_squared={:.16e}\n",
        fit.b * unit,
        fit.a1 * unit,
        fit.a2 * unit,
        fit.a0 * unit,
        fit.rms_residual * unit,
        residual.r_squared,
    );
    emit(&args.out, &report)?;
    eprintln!(
        "S ~ {:.6} l_x ln(l_y) + {:.6} l_x + {:.6} l_y + {:.6} ({})",
        fit.b * unit,
        fit.a1 * unit,
        fit.a2 * unit,
        fit.a0 * unit,
        unit_name(args.bits),
    );
    Ok(0)
}

fn cmd_oracle_check(args: &CommonArgs) -> Result<i32, Failure> {
    let cfg = resolve(&args.config, &overrides(args))?;
    let corr = ground_state_correlations(&cfg.couplings, &cfg.geometry, cfg.mode)?;
    let dense = dense_ground_state(&cfg.couplings, &cfg.geometry)?;
    let (n_x, n_y) = (cfg.geometry.n_x(), cfg.geometry.n_y());

    let mut checked = 0usize;
    let mut max_diff = 0.0f64;
    let mut worst = (0usize, 0usize);
    for l_x in 1..=n_x {
        for l_y in 1..=n_y {
            let spec = BlockSpec::new(l_x, l_y, cfg.placement)?;
            let x0 = spec.resolve(&cfg.geometry)?;
            let bp = extract_block(&corr, &spec)?;
            let structured = entanglement_entropy(&block_spectrum(&bp)?)?.s;

            let mut indices = Vec::with_capacity(l_x * l_y);
            for y in 0..l_y {
                for x in 0..l_x {
                    indices.push(y * n_x + x0 + x);
                }
            }
            let reference = dense_entropy(&dense, &indices)?.s;

            let diff = (structured - reference).abs();
            if diff > max_diff {
                max_diff = diff;
                worst = (l_x, l_y);
            }
            checked += 1;
        }
    }
    let pass = max_diff <= cfg.tolerance;
    let mut text = format!(
        "checked={checked}\nmax_abs_diff={max_diff:.3e}\ntolerance={:.3e}\nverdict={}\n",
        cfg.tolerance,
        if pass { "PASS" } else { "FAIL" },
    );
    if !pass {
        text.push_str(&format!("worst_block=l_x={},l_y={}\n", worst.0, worst.1));
    }
    emit(&cfg.out, &text)?;
    Ok(if pass { 0 } else { 4 })
}

fn cmd_spectrum(args: &CommonArgs) -> Result<i32, Failure> {
    let cfg = resolve(&args.config, &overrides(args))?;
    let gap = spectrum_gap(&cfg.couplings, &cfg.geometry, cfg.mode)?;
    let mut text = format!(
        "min_freq={:.16e}\nmax_freq={:.16e}\n",
        gap.min_freq, gap.max_freq
    );

    // The scaled minimum must not depend on the chain count.
    let mut scaled = Vec::new();
    for n_y in [4usize, 16, 64] {
        let geometry = Geometry::new(cfg.geometry.n_x(), n_y).map_err(Failure::in_config)?;
        let probe = spectrum_gap(&cfg.couplings, &geometry, cfg.mode)?;
        let value = probe.min_freq * (n_y as f64).sqrt();
        text.push_str(&format!("scaled_min_freq[n_y={n_y}]={value:.16e}\n"));
        scaled.push(value);
    }
    let hi = scaled.iter().fold(f64::MIN, |a, &b| a.max(b));
    let lo = scaled.iter().fold(f64::MAX, |a, &b| a.min(b));
    let spread = (hi - lo) / hi.abs();
    let pass = spread <= cfg.tolerance;
    text.push_str(&format!(
        "scaling_spread={spread:.3e}\nscaling_check={}\n",
        if pass { "PASS" } else { "FAIL" },
    ));
    emit(&cfg.out, &text)?;
    Ok(if pass { 0 } else { 4 })
}
