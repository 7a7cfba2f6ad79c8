//! Serialization of solver artifacts: the field JSON interchange format,
//! diagram/summary CSVs, and report JSONs. All writes go through a
//! temp-then-rename so a crash never leaves a half-written artifact, and all
//! numbers are formatted with locale-independent shortest-roundtrip notation
//! so reruns with the same seed produce identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fraclap::continuation::Branch;
use fraclap::variational::HistoryEntry;
use fraclap::{KernelTable, PeriodicWave, SpectralField};

/// Write via a sibling temp file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    let mut tmp_name = path
        .file_name()
        .with_context(|| format!("output path {} has no file name", path.display()))?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", tmp.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Interchange format for spectral fields: {"n_modes": m, "a": [...], "b": [...]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldJson {
    pub n_modes: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl From<&SpectralField> for FieldJson {
    fn from(u: &SpectralField) -> Self {
        FieldJson { n_modes: u.n_modes(), a: u.a.clone(), b: u.b.clone() }
    }
}

impl FieldJson {
    pub fn to_field(&self) -> Result<SpectralField> {
        if self.a.len() != self.n_modes + 1 || self.b.len() != self.n_modes + 1 {
            bail!(
                "field: coefficient arrays must hold n_modes + 1 = {} entries (got a: {}, b: {})",
                self.n_modes + 1,
                self.a.len(),
                self.b.len()
            );
        }
        if self.a.iter().chain(&self.b).any(|t| !t.is_finite()) {
            bail!("field: coefficients must be finite");
        }
        let mut u = SpectralField::zeros(self.n_modes);
        u.a.copy_from_slice(&self.a);
        u.b.copy_from_slice(&self.b);
        // The sine coefficient of the constant mode has no meaning; keep the
        // stored form canonical.
        u.b[0] = 0.0;
        Ok(u)
    }
}

pub fn load_field(path: &Path) -> Result<SpectralField> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed: FieldJson = serde_json::from_str(&text)
        .with_context(|| format!("parsing field JSON {}", path.display()))?;
    parsed.to_field()
}

pub fn save_field(path: &Path, u: &SpectralField) -> Result<()> {
    write_json(path, &FieldJson::from(u))
}

/// Two-column sample table of a field at a requested resolution.
pub fn field_grid_csv(path: &Path, u: &SpectralField, resolution: usize) -> Result<()> {
    let grid = u
        .to_grid(resolution)
        .map_err(|e| anyhow::anyhow!("field: {e}"))?;
    let mut text = String::from("x,u\n");
    let h = core::f64::consts::TAU / resolution as f64;
    for (i, v) in grid.values.iter().enumerate() {
        let _ = writeln!(text, "{:e},{:e}", i as f64 * h, v);
    }
    write_atomic(path, text.as_bytes())
}

pub fn kernel_csv(path: &Path, table: &KernelTable) -> Result<()> {
    let mut text = String::from("z,H,err_bound\n");
    for i in 0..table.nodes.len() {
        let _ = writeln!(
            text,
            "{:e},{:e},{:e}",
            table.nodes[i], table.h_values[i], table.err_bounds[i]
        );
    }
    write_atomic(path, text.as_bytes())
}

pub fn branch_csv(path: &Path, branch: &Branch) -> Result<()> {
    let mut text = String::from("lambda,amplitude,period,residual\n");
    for p in &branch.points {
        let _ = writeln!(
            text,
            "{:e},{:e},{:e},{:e}",
            p.lambda, p.amplitude, p.minimal_period, p.residual
        );
    }
    write_atomic(path, text.as_bytes())
}

pub fn history_csv(path: &Path, history: &[HistoryEntry]) -> Result<()> {
    let mut text = String::from("iteration,j_tilde,grad_norm\n");
    for e in history {
        let _ = writeln!(text, "{},{:e},{:e}", e.iteration, e.j_tilde, e.grad_norm);
    }
    write_atomic(path, text.as_bytes())
}

/// One solved wave of a catalog family, ready for JSON.
#[derive(Clone, Debug, Serialize)]
pub struct WaveJson {
    pub family: String,
    pub s: f64,
    pub p: f64,
    pub period: f64,
    pub amplitude: f64,
    pub residual: f64,
    pub profile: FieldJson,
}

impl WaveJson {
    pub fn new(family: &str, s: f64, p: f64, wave: &PeriodicWave, residual: f64) -> Self {
        WaveJson {
            family: family.to_string(),
            s,
            p,
            period: wave.period,
            amplitude: wave.profile.amplitude(),
            residual,
            profile: FieldJson::from(&wave.profile),
        }
    }
}

/// Summary row collector for `examples run`.
pub fn summary_csv(path: &Path, rows: &[WaveJson]) -> Result<()> {
    let mut text = String::from("family,s,p,period,amplitude,residual\n");
    for w in rows {
        let _ = writeln!(
            text,
            "{},{:e},{:e},{:e},{:e},{:e}",
            w.family, w.s, w.p, w.period, w.amplitude, w.residual
        );
    }
    write_atomic(path, text.as_bytes())
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenErrorJson {
    pub k: usize,
    pub expected: f64,
    pub cos_value: f64,
    pub sin_value: f64,
    pub worst_rel_err: f64,
}

/// Report for `solve-linear`: the solution plus the per-mode eigenvalue
/// audit of the quadrature operator at the same order s.
#[derive(Clone, Debug, Serialize)]
pub struct LinearReportJson {
    pub s: f64,
    pub resolution: usize,
    pub eigenvalue_errors: Vec<EigenErrorJson>,
    pub solution: FieldJson,
}

/// Solution report for `solve-variational`.
#[derive(Clone, Debug, Serialize)]
pub struct VariationalReportJson {
    pub s: f64,
    pub p: f64,
    pub lambda: f64,
    pub mu: f64,
    pub residual: f64,
    pub nonconstant_certified: bool,
    pub iterations: usize,
    pub v: FieldJson,
    pub u: FieldJson,
}
