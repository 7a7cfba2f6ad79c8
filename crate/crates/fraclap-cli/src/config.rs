//! Argument grammar, config-file defaults, and precondition validation.
//!
//! Flags always win over the config file; the config file wins over built-in
//! defaults. Validation happens before any dispatch so that every run either
//! starts with parameters the library accepts or fails with a message naming
//! the violated precondition.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use fraclap::space::subcritical_p_bound;

#[derive(Parser, Debug)]
#[command(
    name = "fraclap",
    version,
    about = "Periodic fractional-Laplacian toolkit: kernel tables, operator \
             application, linear and variational solves, bifurcation branches, \
             worked problem families, and the acceptance scorecard"
)]
pub struct Cli {
    /// JSON file with default parameter values; explicit flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Periodized-kernel utilities.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Nonlocal-operator utilities.
    Op {
        #[command(subcommand)]
        action: OpAction,
    },
    /// Solve the shifted linear problem (L + 1)u = f for a stored field f.
    SolveLinear(SolveLinearArgs),
    /// Constrained minimization on the unit L^{p+1} sphere (lambda < 0).
    SolveVariational(SolveVariationalArgs),
    /// Continue a bifurcation branch and write the diagram CSV.
    Branch(BranchArgs),
    /// Worked problem families.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Run the full acceptance suite and write a JSON scorecard.
    VerifyAll(VerifyAllArgs),
}

#[derive(Subcommand, Debug)]
pub enum KernelAction {
    /// Tabulate the kernel with certified error bounds to CSV (z,H,err_bound).
    Dump(KernelDumpArgs),
}

#[derive(Subcommand, Debug)]
pub enum OpAction {
    /// Apply the operator to a stored field and write the result field.
    Apply(OpApplyArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExamplesAction {
    /// Solve one family and write per-solution JSON plus a summary CSV.
    Run(ExamplesRunArgs),
}

#[derive(Args, Debug)]
pub struct KernelDumpArgs {
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Number of grid cells to tabulate.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Relative tolerance passed to the kernel evaluator.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Diagonal Fourier-multiplier route.
    Spectral,
    /// Principal-value singular quadrature route.
    Quadrature,
}

#[derive(Args, Debug)]
pub struct OpApplyArgs {
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Which realization applies the operator.
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    /// Input field JSON ({"n_modes", "a", "b"}).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Output field JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Grid resolution for the quadrature backend.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Also sample the result to a two-column CSV (x, value) at --resolution.
    #[arg(long, value_name = "FILE")]
    pub grid_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveLinearArgs {
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Right-hand side field JSON.
    #[arg(long, value_name = "FILE")]
    pub rhs: PathBuf,
    /// Output report JSON (solution + per-mode eigenvalue audit).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Resolution for the eigenvalue audit.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SolveVariationalArgs {
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Nonlinearity exponent; must be subcritical for s.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Spectral parameter; the constrained minimization needs lambda < 0.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Mode count of the final resolution stage.
    #[arg(long)]
    pub modes: Option<usize>,
    /// Output solution JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Convergence-history CSV (iteration, j_tilde, grad_norm).
    #[arg(long, value_name = "FILE")]
    pub history: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BranchArgs {
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Index of the bifurcation point the branch leaves from (k >= 1).
    #[arg(long)]
    pub k: Option<usize>,
    /// Nonlinearity: u2, u3, or custom:<c2>,<c3> for c2*u^2 + c3*u^3.
    #[arg(long)]
    pub f: Option<String>,
    /// Output diagram CSV (lambda, amplitude, period, residual).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExamplesRunArgs {
    /// Which family: 7.1, 7.2, 7.3, or bo.
    #[arg(long)]
    pub which: Option<String>,
    /// Fractional order, 0 < s < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Nonlinearity exponent; must be subcritical for s.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Directory receiving the per-solution JSONs and summary.csv.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyAllArgs {
    /// Fractional order used by the s-flexible criteria (others pin their own).
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Seed for the randomized property suites.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Scorecard JSON path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Config-file schema: every key optional, flags override. Documented in
/// docs/config.md.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDefaults {
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub f: Option<String>,
    pub which: Option<String>,
    pub backend: Option<String>,
    pub resolution: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl FileDefaults {
    pub fn load(path: Option<&PathBuf>) -> Result<FileDefaults> {
        let Some(path) = path else {
            return Ok(FileDefaults::default());
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }

    pub fn backend(&self) -> Result<Option<Backend>> {
        match self.backend.as_deref() {
            None => Ok(None),
            Some("spectral") => Ok(Some(Backend::Spectral)),
            Some("quadrature") => Ok(Some(Backend::Quadrature)),
            Some(other) => {
                bail!("config: backend must be \"spectral\" or \"quadrature\" (got \"{other}\")")
            }
        }
    }
}

/// Resolve flag > config-file > built-in default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Resolve flag > config-file with no default: the parameter is mandatory.
pub fn pick_required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .with_context(|| format!("missing required parameter --{name} (no config-file value either)"))
}

/// The fractional order must satisfy 0 < s < 1 (exclusive).
pub fn check_s(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        bail!("fracspace: fractional order must satisfy 0 < s < 1 (got s = {s})");
    }
    Ok(s)
}

/// Subcritical growth: p < (1+2s)/(1-2s) when s < 1/2, any p > 1 otherwise.
pub fn check_subcritical(s: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 {
        bail!("variational: growth exponent must satisfy p > 1 (got p = {p})");
    }
    let bound = subcritical_p_bound(s);
    if p >= bound {
        bail!(
            "variational: supercritical exponent: s = {s} requires p < {bound} \
             i.e. p < (1+2s)/(1-2s) (got p = {p})"
        );
    }
    Ok(p)
}

pub fn check_lambda_negative(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda >= 0.0 {
        bail!("variational: constrained minimization requires lambda < 0 (got lambda = {lambda})");
    }
    Ok(lambda)
}

pub fn check_branch_index(k: usize) -> Result<usize> {
    if k < 1 {
        bail!("continuation: branch index must satisfy k >= 1 (got k = {k})");
    }
    Ok(k)
}

pub fn check_resolution(n: usize, least: usize, module: &str) -> Result<usize> {
    if n < least {
        bail!("{module}: resolution must be at least {least} (got {n})");
    }
    Ok(n)
}
