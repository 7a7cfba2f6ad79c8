//! One function per subcommand, plus the dispatcher that threads the
//! config-file defaults through. Every writer goes through `formats`, so all
//! outputs are atomic and byte-stable for a fixed seed.

use std::f64::consts::TAU;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use fraclap::continuation::{continue_branch, BaseNonlinearity, ContinuationOpts};
use fraclap::linear::{eigen_verify, solve_linear};
use fraclap::problems::{
    benjamin_ono_suite, global_residual, small_amplitude_wave_pair, ProblemFamily, ProblemSpec,
};
use fraclap::variational::{minimize_on_manifold, MinimizeOpts};
use fraclap::{KernelTable, PeriodicWave, QuadratureOperator, SpectralField, SpectralOperator};

use crate::acceptance;
use crate::config::{
    check_branch_index, check_lambda_negative, check_resolution, check_s, check_subcritical,
    pick, pick_required, Backend, BranchArgs, Cli, Command, ExamplesAction, ExamplesRunArgs,
    FileDefaults, KernelAction, KernelDumpArgs, OpAction, OpApplyArgs, SolveLinearArgs,
    SolveVariationalArgs, VerifyAllArgs,
};
use crate::formats::{
    self, EigenErrorJson, FieldJson, LinearReportJson, VariationalReportJson, WaveJson,
};

pub fn dispatch(cli: Cli) -> Result<()> {
    let file = FileDefaults::load(cli.config.as_ref())?;
    match cli.command {
        Command::Kernel { action: KernelAction::Dump(args) } => kernel_dump(args, &file),
        Command::Op { action: OpAction::Apply(args) } => op_apply(args, &file),
        Command::SolveLinear(args) => solve_linear_cmd(args, &file),
        Command::SolveVariational(args) => solve_variational_cmd(args, &file),
        Command::Branch(args) => branch_cmd(args, &file),
        Command::Examples { action: ExamplesAction::Run(args) } => examples_run(args, &file),
        Command::VerifyAll(args) => verify_all(args, &file),
    }
}

fn kernel_dump(args: KernelDumpArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick_required(args.s, file.s, "--s")?)?;
    let resolution = check_resolution(pick(args.resolution, file.resolution, 512), 2, "kernel")?;
    let tolerance = pick(args.tolerance, file.tolerance, 1e-12);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        bail!("kernel: tail tolerance must be a positive number (got {tolerance})");
    }
    let out = pick(args.out, file.out.clone(), PathBuf::from("kernel.csv"));
    let table = KernelTable::build(s, resolution, tolerance);
    formats::kernel_csv(&out, &table)?;
    println!(
        "kernel table for s = {s}: {} nodes, certified tail bound {:.3e} -> {}",
        table.nodes.len(),
        table.tail_bound,
        out.display()
    );
    Ok(())
}

fn op_apply(args: OpApplyArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick_required(args.s, file.s, "--s")?)?;
    let backend = match args.backend {
        Some(b) => b,
        None => file.backend()?.unwrap_or(Backend::Spectral),
    };
    let u = formats::load_field(&args.input)?;
    let m = u.n_modes();
    let out = pick(args.out, file.out.clone(), PathBuf::from("op-out.json"));
    let resolution =
        check_resolution(pick(args.resolution, file.resolution, 2048), 2 * m + 2, "operator")?;
    let result = match backend {
        Backend::Spectral => SpectralOperator::new(s, m).apply(&u),
        Backend::Quadrature => {
            let op = QuadratureOperator::new(s, resolution, 1e-12);
            let applied = op.apply(&u.to_grid(resolution)?);
            SpectralField::from_grid(&applied, m)?
        }
    };
    formats::save_field(&out, &result)?;
    if let Some(csv) = &args.grid_csv {
        formats::field_grid_csv(csv, &result, resolution)?;
    }
    println!(
        "applied {} operator, s = {s}, {m} modes -> {}",
        match backend {
            Backend::Spectral => "spectral",
            Backend::Quadrature => "quadrature",
        },
        out.display()
    );
    Ok(())
}

fn solve_linear_cmd(args: SolveLinearArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick_required(args.s, file.s, "--s")?)?;
    let rhs = formats::load_field(&args.rhs)?;
    let resolution = check_resolution(pick(args.resolution, file.resolution, 2048), 18, "linear")?;
    let out = pick(args.out, file.out.clone(), PathBuf::from("linear-solution.json"));
    let solution = solve_linear(&rhs, s);
    let report = eigen_verify(s, 8, resolution)
        .context("eigenvalue audit of the quadrature operator failed")?;
    let json = LinearReportJson {
        s,
        resolution,
        eigenvalue_errors: report
            .entries
            .iter()
            .map(|e| EigenErrorJson {
                k: e.k,
                expected: e.expected,
                cos_value: e.cos_value,
                sin_value: e.sin_value,
                worst_rel_err: e.worst_rel_err,
            })
            .collect(),
        solution: FieldJson::from(&solution),
    };
    formats::write_json(&out, &json)?;
    let worst = json
        .eigenvalue_errors
        .iter()
        .fold(0.0_f64, |acc, e| acc.max(e.worst_rel_err));
    println!(
        "resolvent solve at s = {s}: {} modes; eigenvalue audit worst rel. error {worst:.3e} -> {}",
        solution.n_modes(),
        out.display()
    );
    Ok(())
}

fn solve_variational_cmd(args: SolveVariationalArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick_required(args.s, file.s, "--s")?)?;
    let p = check_subcritical(s, pick_required(args.p, file.p, "--p")?)?;
    let lambda = check_lambda_negative(pick_required(args.lambda, file.lambda, "--lambda")?)?;
    let out = pick(args.out, file.out.clone(), PathBuf::from("variational-solution.json"));
    let opts = MinimizeOpts {
        n_modes: args.modes.unwrap_or(MinimizeOpts::default().n_modes),
        record_history: args.history.is_some(),
        ..Default::default()
    };
    let result = minimize_on_manifold(s, p, lambda, &opts)?;
    let json = VariationalReportJson {
        s,
        p,
        lambda,
        mu: result.mu,
        residual: result.residual,
        nonconstant_certified: result.nonconstant_certified,
        iterations: result.iterations,
        v: FieldJson::from(&result.v),
        u: FieldJson::from(&result.u),
    };
    formats::write_json(&out, &json)?;
    if let Some(history) = &args.history {
        formats::history_csv(history, &result.history)?;
    }
    println!(
        "minimizer at s = {s}, p = {p}, lambda = {lambda}: residual {:.3e}, {} -> {}",
        result.residual,
        if result.nonconstant_certified {
            "certified nonconstant"
        } else {
            "constant (well too shallow)"
        },
        out.display()
    );
    Ok(())
}

fn parse_nonlinearity(text: &str) -> Result<BaseNonlinearity> {
    match text {
        "u2" => return Ok(BaseNonlinearity::Square),
        "u3" => return Ok(BaseNonlinearity::Cube),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("custom:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(c2), Ok(c3)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
                return Ok(BaseNonlinearity::Poly { c1: 0.0, c2, c3 });
            }
        }
    }
    bail!("branch: nonlinearity must be u2, u3, or custom:<c2>,<c3> (got {text:?})")
}

fn branch_cmd(args: BranchArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick_required(args.s, file.s, "--s")?)?;
    let k = check_branch_index(pick(args.k, file.k, 1))?;
    let f_text = pick(args.f, file.f.clone(), "u3".to_string());
    let base = parse_nonlinearity(&f_text)?;
    let out = pick(args.out, file.out.clone(), PathBuf::from("branch.csv"));
    let branch = continue_branch(base, s, k, &ContinuationOpts::default())?;
    formats::branch_csv(&out, &branch)?;
    let first = branch.points.first().expect("continuation returns points");
    let last = branch.points.last().expect("continuation returns points");
    println!(
        "branch k = {k}, f = {f_text}, s = {s}: {} points, lambda {:.6} -> {:.6}, amplitude up to {:.4} -> {}",
        branch.points.len(),
        first.lambda,
        last.lambda,
        last.amplitude,
        out.display()
    );
    Ok(())
}

/// Scalar summary of the traveling-wave suite; the waves themselves go to
/// their own files.
#[derive(Serialize)]
struct BoSummaryJson {
    s: f64,
    shift_identity_error: f64,
    wave_mean: f64,
    wave_oscillation: f64,
    dg_residuals: (f64, f64),
    sign_pair_residual: f64,
    soliton_sup_error: Option<f64>,
    soliton_point_errors: Vec<(f64, f64)>,
    derivative_residuals: Vec<f64>,
}

fn examples_run(args: ExamplesRunArgs, file: &FileDefaults) -> Result<()> {
    let which = pick_required(args.which, file.which.clone(), "--which")?;
    let out_dir = pick(args.out_dir, file.out_dir.clone(), PathBuf::from("examples-out"));
    let prefix = which.replace('.', "_");
    let s = check_s(pick(args.s, file.s, 0.5))?;
    let path = |name: &str| out_dir.join(format!("{prefix}_{name}"));
    let mut rows: Vec<WaveJson> = Vec::new();

    match which.as_str() {
        "7.1" => {
            let p = check_subcritical(s, pick(args.p, file.p, 2.0))?;
            let pair = small_amplitude_wave_pair(s, p)?;
            let family = ProblemFamily::EvenPower.name();
            rows.push(WaveJson::new(family, s, p, &pair.first, pair.residuals.0));
            rows.push(WaveJson::new(family, s, p, &pair.second, pair.residuals.1));
            formats::write_json(&path("wave_a.json"), &rows[0])?;
            formats::write_json(&path("wave_b.json"), &rows[1])?;
            println!(
                "small-amplitude waves, s = {s}, p = {p}: period {:.6}, amplitude {:.4e}, residuals {:.3e} / {:.3e}",
                pair.period, pair.amplitude, pair.residuals.0, pair.residuals.1
            );
            println!("two distinct translates (crest and trough at the origin) of one wave profile");
        }
        "7.2" => {
            let p = check_subcritical(s, pick(args.p, file.p, 3.0))?;
            let spec = ProblemSpec::new(s, ProblemFamily::OddPowerPlus, p)?;
            let base = if p == 3.0 {
                BaseNonlinearity::Cube
            } else {
                BaseNonlinearity::OddPower { p }
            };
            let branch = continue_branch(base, s, 1, &ContinuationOpts::default())?;
            // The rescale below absorbs lambda into amplitude and period, so
            // stay away from lambda = 0 where it degenerates.
            let point = branch
                .points
                .iter()
                .rev()
                .find(|pt| pt.lambda > 0.05)
                .unwrap_or_else(|| branch.points.first().expect("branch has points"));
            let scale = libm::pow(point.lambda, -1.0 / (p - 1.0));
            let period = TAU * libm::pow(point.lambda / point.mu, 1.0 / (2.0 * s));
            let mut profile = point.field.clone();
            profile.scale(scale);
            let wave = PeriodicWave::new(period, profile);
            let r_pos = global_residual(&wave, &spec, 32, 1e-5)?;
            let mut negated = wave.profile.clone();
            negated.scale(-1.0);
            let neg_wave = PeriodicWave::new(period, negated);
            let r_neg = global_residual(&neg_wave, &spec, 32, 1e-5)?;
            let family = spec.family.name();
            rows.push(WaveJson::new(family, s, p, &wave, r_pos));
            rows.push(WaveJson::new(family, s, p, &neg_wave, r_neg));
            formats::write_json(&path("wave.json"), &rows[0])?;
            formats::write_json(&path("wave_negated.json"), &rows[1])?;
            println!(
                "odd-power waves, s = {s}, p = {p}: period {:.6}, amplitude {:.4e}, residuals {:.3e} / {:.3e}",
                period,
                wave.profile.amplitude(),
                r_pos,
                r_neg
            );
            println!("the negated wave solves the same equation; with u = 0 that is three solutions");
        }
        "7.3" => {
            let p = check_subcritical(s, pick(args.p, file.p, 3.0))?;
            let spec = ProblemSpec::new(s, ProblemFamily::OddPowerMinus, p)?;
            let lambda = -4.0;
            let opts = MinimizeOpts { n_modes: 320, even_only: true, ..Default::default() };
            let result = minimize_on_manifold(s, p, lambda, &opts)?;
            if !result.nonconstant_certified {
                bail!("examples: the lambda = -4 well unexpectedly failed the nonconstancy certificate");
            }
            // u solves the 2pi-periodic problem at lambda = -4; stretching
            // absorbs the multiplier into a unit-coefficient equation.
            let mag = -lambda;
            let scale = libm::pow(mag, -1.0 / (p - 1.0));
            let period = TAU * libm::pow(mag, 1.0 / (2.0 * s));
            let mut profile = result.u.clone();
            profile.scale(scale);
            let wave = PeriodicWave::new(period, profile);
            let r_pos = global_residual(&wave, &spec, 32, 1e-5)?;
            let mut negated = wave.profile.clone();
            negated.scale(-1.0);
            let neg_wave = PeriodicWave::new(period, negated);
            let r_neg = global_residual(&neg_wave, &spec, 32, 1e-5)?;
            let family = spec.family.name();
            rows.push(WaveJson::new(family, s, p, &wave, r_pos));
            rows.push(WaveJson::new(family, s, p, &neg_wave, r_neg));
            formats::write_json(&path("wave.json"), &rows[0])?;
            formats::write_json(&path("wave_negated.json"), &rows[1])?;
            println!(
                "ground-state wave, s = {s}, p = {p}: period {:.6}, amplitude {:.4e}, residuals {:.3e} / {:.3e}",
                period,
                wave.profile.amplitude(),
                r_pos,
                r_neg
            );
        }
        "bo" => {
            let report = benjamin_ono_suite(s)?;
            let family = ProblemFamily::BenjaminOnoStationary.name();
            rows.push(WaveJson::new(family, s, 2.0, &report.phase_a, report.dg_residuals.0));
            rows.push(WaveJson::new(family, s, 2.0, &report.phase_b, report.dg_residuals.1));
            formats::write_json(&path("phase_a.json"), &rows[0])?;
            formats::write_json(&path("phase_b.json"), &rows[1])?;
            for (i, lp) in report.large_period.iter().enumerate() {
                let row = WaveJson::new(family, s, 2.0, &lp.wave, lp.residual);
                formats::write_json(&path(&format!("large_{}.json", i + 1)), &row)?;
                rows.push(row);
            }
            let summary = BoSummaryJson {
                s,
                shift_identity_error: report.shift_identity_error,
                wave_mean: report.wave_mean,
                wave_oscillation: report.wave_oscillation,
                dg_residuals: report.dg_residuals,
                sign_pair_residual: report.sign_pair_residual,
                soliton_sup_error: report.soliton_sup_error,
                soliton_point_errors: report.soliton_point_errors.clone(),
                derivative_residuals: report.derivative_residuals.clone(),
            };
            formats::write_json(&path("report.json"), &summary)?;
            println!(
                "traveling-wave suite, s = {s}: shift identity {:.3e}, sign pair {:.3e}, {} large-period waves",
                report.shift_identity_error,
                report.sign_pair_residual,
                report.large_period.len()
            );
            if let Some(sup) = report.soliton_sup_error {
                println!("decaying-profile identity on |x| <= 10: sup error {sup:.3e}");
            }
        }
        other => {
            bail!("examples: unknown example {other:?}; expected 7.1, 7.2, 7.3, or bo")
        }
    }

    let summary = path("summary.csv");
    formats::summary_csv(&summary, &rows)?;
    println!("{} wave rows -> {}", rows.len(), summary.display());
    Ok(())
}

fn verify_all(args: VerifyAllArgs, file: &FileDefaults) -> Result<()> {
    let s = check_s(pick(args.s, file.s, 0.5))?;
    let seed = pick(args.seed, file.seed, 7);
    let out = pick(args.out, file.out.clone(), PathBuf::from("scorecard.json"));
    let results = acceptance::run_all(s, seed);
    for c in &results {
        println!("{}", c.line());
    }
    formats::write_json(&out, &results)?;
    let failed: Vec<String> = results
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.criterion_id.to_string())
        .collect();
    if !failed.is_empty() {
        bail!(
            "{} of {} acceptance criteria failed (criteria {}); scorecard -> {}",
            failed.len(),
            results.len(),
            failed.join(", "),
            out.display()
        );
    }
    println!("all {} criteria passed; scorecard -> {}", results.len(), out.display());
    Ok(())
}
