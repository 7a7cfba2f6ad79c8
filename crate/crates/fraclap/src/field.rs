//! Truncated Fourier representation of 2π-periodic fields and its grid view.
//!
//! The Fourier side is the canonical store (the nonlocal operator is exactly
//! diagonal there); uniform grids are derived views used by quadrature and by
//! the pointwise nonlinear terms. Conversions between the two are exact for
//! band-limited data as long as the grid resolves the Nyquist bound.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

pub const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldError {
    /// Grid too coarse for the requested mode count (needs n_pts ≥ 2·n_modes + 2).
    Undersampled { n_pts: usize, n_modes: usize },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::Undersampled { n_pts, n_modes } => write!(
                f,
                "grid with {n_pts} points cannot hold {n_modes} modes (need n_pts >= 2*n_modes + 2)"
            ),
        }
    }
}

impl core::error::Error for FieldError {}

/// Real 2π-periodic field stored as a truncated Fourier series
///
///   u(x) = a[0]/2 + Σ_{j=1..n_modes} ( a[j]·cos(jx) + b[j]·sin(jx) ).
///
/// The halved constant coefficient keeps the closed-form integrals below free
/// of j = 0 special cases. Invariants: `a.len() == b.len()` and `b[0] == 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SpectralField {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(a.len(), b.len(), "cosine/sine coefficient lengths differ");
        assert!(!a.is_empty(), "field needs at least the constant mode");
        let mut b = b;
        b[0] = 0.0;
        SpectralField { a, b }
    }

    pub fn zeros(n_modes: usize) -> Self {
        SpectralField { a: vec![0.0; n_modes + 1], b: vec![0.0; n_modes + 1] }
    }

    pub fn constant(c: f64, n_modes: usize) -> Self {
        let mut u = Self::zeros(n_modes);
        u.a[0] = 2.0 * c;
        u
    }

    /// amp·cos(kx) embedded in an n_modes-truncation.
    pub fn cosine(k: usize, amp: f64, n_modes: usize) -> Self {
        assert!(k >= 1 && k <= n_modes);
        let mut u = Self::zeros(n_modes);
        u.a[k] = amp;
        u
    }

    /// amp·sin(kx) embedded in an n_modes-truncation.
    pub fn sine(k: usize, amp: f64, n_modes: usize) -> Self {
        assert!(k >= 1 && k <= n_modes);
        let mut u = Self::zeros(n_modes);
        u.b[k] = amp;
        u
    }

    pub fn n_modes(&self) -> usize {
        self.a.len() - 1
    }

    pub fn mean(&self) -> f64 {
        self.a[0] / 2.0
    }

    /// Point evaluation by direct summation (used off-grid; grid sampling goes
    /// through `to_grid`, which is cheaper and exact at the nodes).
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.a[0] / 2.0;
        for j in 1..self.a.len() {
            let (sj, cj) = libm::sincos(j as f64 * x);
            acc += self.a[j] * cj + self.b[j] * sj;
        }
        acc
    }

    /// Sample on the uniform grid x_i = 2πi/n_pts.
    pub fn to_grid(&self, n_pts: usize) -> Result<GridField, FieldError> {
        let n_modes = self.n_modes();
        if n_pts < 2 * n_modes + 2 {
            return Err(FieldError::Undersampled { n_pts, n_modes });
        }
        let (cos_t, sin_t) = trig_tables(n_pts);
        let mut values = vec![self.a[0] / 2.0; n_pts];
        for j in 1..=n_modes {
            let (aj, bj) = (self.a[j], self.b[j]);
            if aj == 0.0 && bj == 0.0 {
                continue;
            }
            let mut idx = 0;
            for v in values.iter_mut() {
                *v += aj * cos_t[idx] + bj * sin_t[idx];
                idx += j;
                if idx >= n_pts {
                    idx -= n_pts;
                }
            }
        }
        Ok(GridField { values })
    }

    /// Recover coefficients from grid samples by discrete orthogonality; exact
    /// (to rounding) whenever the samples come from an n_modes-band-limited
    /// field on a grid obeying the Nyquist bound.
    pub fn from_grid(g: &GridField, n_modes: usize) -> Result<SpectralField, FieldError> {
        let n_pts = g.len();
        if n_pts < 2 * n_modes + 2 {
            return Err(FieldError::Undersampled { n_pts, n_modes });
        }
        let (cos_t, sin_t) = trig_tables(n_pts);
        let mut u = SpectralField::zeros(n_modes);
        let w = 2.0 / n_pts as f64;
        u.a[0] = w * g.values.iter().sum::<f64>();
        for j in 1..=n_modes {
            let (mut ca, mut sa) = (0.0, 0.0);
            let mut idx = 0;
            for &v in &g.values {
                ca += v * cos_t[idx];
                sa += v * sin_t[idx];
                idx += j;
                if idx >= n_pts {
                    idx -= n_pts;
                }
            }
            u.a[j] = w * ca;
            u.b[j] = w * sa;
        }
        Ok(u)
    }

    /// Spectral derivative: d/dx maps (a_j, b_j) to (j·b_j, −j·a_j).
    pub fn derivative(&self) -> SpectralField {
        let mut d = SpectralField::zeros(self.n_modes());
        for j in 1..self.a.len() {
            d.a[j] = j as f64 * self.b[j];
            d.b[j] = -(j as f64) * self.a[j];
        }
        d
    }

    /// The shifted field u(· + τ).
    pub fn translate(&self, tau: f64) -> SpectralField {
        let mut t = self.clone();
        for j in 1..self.a.len() {
            let (sj, cj) = libm::sincos(j as f64 * tau);
            t.a[j] = self.a[j] * cj + self.b[j] * sj;
            t.b[j] = -self.a[j] * sj + self.b[j] * cj;
        }
        t
    }

    /// Copy truncated (or zero-padded) to a new mode count.
    pub fn resized(&self, n_modes: usize) -> SpectralField {
        let mut r = SpectralField::zeros(n_modes);
        let keep = self.n_modes().min(n_modes);
        r.a[..=keep].copy_from_slice(&self.a[..=keep]);
        r.b[..=keep].copy_from_slice(&self.b[..=keep]);
        r
    }

    /// Sup norm measured on a dense grid (4× Nyquist), the working definition
    /// of amplitude throughout the branch and problem modules.
    pub fn amplitude(&self) -> f64 {
        let n = (4 * (self.n_modes() + 1)).max(64);
        let g = self.to_grid(n).expect("dense grid obeys Nyquist by construction");
        g.values.iter().fold(0.0_f64, |m, &v| m.max(libm::fabs(v)))
    }

    pub fn add_scaled(&mut self, c: f64, other: &SpectralField) {
        assert_eq!(self.a.len(), other.a.len(), "mode counts differ");
        for j in 0..self.a.len() {
            self.a[j] += c * other.a[j];
            self.b[j] += c * other.b[j];
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.a.iter_mut().chain(self.b.iter_mut()) {
            *v *= c;
        }
    }

    /// Largest |coefficient| at mode indices above `j0` — the tail-decay probe
    /// used to confirm a truncation is resolved.
    pub fn tail_magnitude(&self, j0: usize) -> f64 {
        let mut m: f64 = 0.0;
        for j in j0..self.a.len() {
            m = m.max(libm::fabs(self.a[j])).max(libm::fabs(self.b[j]));
        }
        m
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, c: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(c);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}

/// Samples of a 2π-periodic field on the uniform grid x_i = 2πi/n.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub values: Vec<f64>,
}

impl GridField {
    pub fn from_fn(n_pts: usize, f: impl Fn(f64) -> f64) -> Self {
        let h = TWO_PI / n_pts as f64;
        GridField { values: (0..n_pts).map(|i| f(i as f64 * h)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h(&self) -> f64 {
        TWO_PI / self.len() as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    /// ∫₀^{2π} u dx by the periodic trapezoid rule (= h·Σ, spectrally accurate).
    pub fn integral(&self) -> f64 {
        self.h() * self.values.iter().sum::<f64>()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Pointwise map, consuming self.
    pub fn map(mut self, f: impl Fn(f64) -> f64) -> GridField {
        for v in self.values.iter_mut() {
            *v = f(*v);
        }
        self
    }
}

/// A periodic wave of arbitrary period T, stored as its 2π-periodic profile:
/// u(x) = profile(2π·x/T). Rescaled waves stay exactly band-limited in this
/// representation, so evaluation and residual checks inherit spectral
/// accuracy at any period.
#[derive(Clone, Debug)]
pub struct PeriodicWave {
    pub period: f64,
    pub profile: SpectralField,
}

impl PeriodicWave {
    pub fn new(period: f64, profile: SpectralField) -> Self {
        assert!(period > 0.0 && period.is_finite(), "period must be positive");
        PeriodicWave { period, profile }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(TWO_PI * x / self.period)
    }

    pub fn mean(&self) -> f64 {
        self.profile.mean()
    }

    pub fn amplitude(&self) -> f64 {
        self.profile.amplitude()
    }
}

/// cos/sin of the n-th roots of unity angles 2πr/n, r = 0..n. Index arithmetic
/// in the transforms reduces (i·j) mod n into this table, so grid sampling is
/// exact trigonometry with no accumulated phase drift.
fn trig_tables(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cos_t = vec![0.0; n];
    let mut sin_t = vec![0.0; n];
    let h = TWO_PI / n as f64;
    for r in 0..n {
        let (s, c) = libm::sincos(r as f64 * h);
        cos_t[r] = c;
        sin_t[r] = s;
    }
    (cos_t, sin_t)
}
