//! The solution operator K for 𝓛u + u = f, eigenproblem verification for the
//! quadrature realization, and the Rayleigh-quotient minimum over tail
//! subspaces.
//!
//! Everything here is diagonal in the trigonometric basis, so the "solver" is
//! coefficient division; the value of the module is the cross-examination: the
//! quadrature operator's spectrum is audited densely (no spurious modes below
//! a stated threshold) and the resolvent's positivity is stress-tested on
//! random nonnegative data.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{GridField, SpectralField};
use crate::linalg::{symmetric_eigenvalues, Mat};
use crate::operator::QuadratureOperator;
use crate::rng::Rng;
use crate::space::{assert_frac_order, l2_norm, multiplier, norm_x_squared};

/// Relative tolerance for eigenvalue reproduction by the quadrature operator.
pub const EIGEN_TOL: f64 = 1e-3;

/// Dense completeness audits cap the matrix size here; Rayleigh quotients
/// still use the full requested resolution.
pub const AUDIT_CAP: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum LinearError {
    /// A Rayleigh quotient strayed from k^{2s} beyond `EIGEN_TOL` (relative).
    EigenTolerance { k: usize, measured: f64, expected: f64 },
    /// The dense audit found the wrong number of eigenvalues below the
    /// threshold k_max^{2s} + gap: extra entries are spurious modes, missing
    /// entries mean the discretization lost part of the spectrum.
    SpectrumCount { found: usize, expected: usize, threshold: f64 },
}

impl fmt::Display for LinearError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearError::EigenTolerance { k, measured, expected } => write!(
                f,
                "eigenvalue check failed at k = {k}: measured {measured:.9} vs expected {expected:.9}"
            ),
            LinearError::SpectrumCount { found, expected, threshold } => write!(
                f,
                "dense audit found {found} eigenvalues below {threshold:.6} where {expected} were expected"
            ),
        }
    }
}

impl core::error::Error for LinearError {}

/// Diagonal solution operator: coefficient j is divided by j^{2s} + 1.
#[derive(Clone, Debug)]
pub struct ResolventK {
    pub s: f64,
    pub diag: Vec<f64>,
}

impl ResolventK {
    pub fn new(s: f64, n_modes: usize) -> Self {
        assert_frac_order(s);
        ResolventK { s, diag: (0..=n_modes).map(|j| 1.0 / (multiplier(j, s) + 1.0)).collect() }
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        assert_eq!(f.a.len(), self.diag.len(), "mode counts differ");
        let mut u = f.clone();
        for j in 0..u.a.len() {
            u.a[j] *= self.diag[j];
            u.b[j] *= self.diag[j];
        }
        u
    }
}

/// Unique solution of 𝓛u + u = f.
pub fn solve_linear(f: &SpectralField, s: f64) -> SpectralField {
    ResolventK::new(s, f.n_modes()).apply(f)
}

#[derive(Clone, Debug)]
pub struct EigenEntry {
    pub k: usize,
    pub expected: f64,
    /// Rayleigh quotient of the quadrature operator on cos(kx).
    pub cos_value: f64,
    /// Same on sin(kx); equals `cos_value` for k = 0 by convention.
    pub sin_value: f64,
    pub worst_rel_err: f64,
}

#[derive(Clone, Debug)]
pub struct EigenReport {
    pub s: f64,
    pub k_max: usize,
    pub resolution: usize,
    pub entries: Vec<EigenEntry>,
    /// Size of the dense matrix the completeness audit diagonalized.
    pub audit_resolution: usize,
    /// Eigenvalues of the dense quadrature matrix found below `threshold`.
    pub found_below: usize,
    /// 2·k_max + 1: the constant mode plus a cos/sin pair per k ≤ k_max.
    pub expected_below: usize,
    pub threshold: f64,
}

fn rayleigh_on_grid(op: &QuadratureOperator, g: &GridField) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..g.len() {
        num += op.apply_values(&g.values, i) * g.values[i];
        den += g.values[i] * g.values[i];
    }
    num / den
}

/// Verify that the quadrature operator reproduces the exact spectrum
/// {k^{2s}} on cos/sin modes up to k_max, and densely audit a coarsened copy
/// for spurious eigenvalues below k_max^{2s} + half the gap to the next
/// eigenvalue.
pub fn eigen_verify(s: f64, k_max: usize, resolution: usize) -> Result<EigenReport, LinearError> {
    assert_frac_order(s);
    assert!(k_max >= 1);
    assert!(resolution >= 2 * k_max + 2, "resolution must resolve mode k_max");
    let op = QuadratureOperator::new(s, resolution, 1e-12);

    let mut entries = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let expected = multiplier(k, s);
        let (cos_value, sin_value, err) = if k == 0 {
            let g = SpectralField::constant(1.0, 0).to_grid(resolution).unwrap();
            let v = rayleigh_on_grid(&op, &g);
            (v, v, libm::fabs(v))
        } else {
            let gc = SpectralField::cosine(k, 1.0, k).to_grid(resolution).unwrap();
            let gs = SpectralField::sine(k, 1.0, k).to_grid(resolution).unwrap();
            let vc = rayleigh_on_grid(&op, &gc);
            let vs = rayleigh_on_grid(&op, &gs);
            let err = libm::fmax(libm::fabs(vc - expected), libm::fabs(vs - expected)) / expected;
            (vc, vs, err)
        };
        let tol = if k == 0 { 1e-10 } else { EIGEN_TOL };
        if err > tol {
            let measured =
                if libm::fabs(cos_value - expected) >= libm::fabs(sin_value - expected) {
                    cos_value
                } else {
                    sin_value
                };
            return Err(LinearError::EigenTolerance { k, measured, expected });
        }
        entries.push(EigenEntry { k, expected, cos_value, sin_value, worst_rel_err: err });
    }

    // Dense completeness audit on a coarsened grid: assemble the quadrature
    // matrix by applying the operator to the grid deltas, diagonalize, and
    // count eigenvalues below the threshold. The exact count is one constant
    // mode plus a double eigenvalue per k.
    let audit_resolution = resolution.min(AUDIT_CAP).max(2 * k_max + 2).next_multiple_of(2);
    let audit_op = if audit_resolution == resolution {
        op
    } else {
        QuadratureOperator::new(s, audit_resolution, 1e-12)
    };
    let na = audit_resolution;
    let mut a = Mat::zeros(na, na);
    let mut basis = vec![0.0; na];
    for j in 0..na {
        basis[j] = 1.0;
        for i in 0..na {
            a.set(i, j, audit_op.apply_values(&basis, i));
        }
        basis[j] = 0.0;
    }
    let spectrum = symmetric_eigenvalues(&a);
    let gap = (multiplier(k_max + 1, s) - multiplier(k_max, s)) / 2.0;
    let threshold = multiplier(k_max, s) + gap;
    let found_below = spectrum.iter().filter(|&&x| x < threshold).count();
    let expected_below = 2 * k_max + 1;
    if found_below != expected_below {
        return Err(LinearError::SpectrumCount { found: found_below, expected: expected_below, threshold });
    }

    Ok(EigenReport {
        s,
        k_max,
        resolution,
        entries,
        audit_resolution,
        found_below,
        expected_below,
        threshold,
    })
}

/// Minimize ∥u∥²/∫u² over the subspace of fields whose coefficients vanish
/// below index k. The minimum is k^{2s} + 1, attained on span{cos kx, sin kx};
/// `n_restarts` controls a stochastic audit that certifies the closed form:
/// random tail fields must sit above the minimum, and damped resolvent
/// iteration must descend back to it.
pub fn rayleigh_min_tail(s: f64, k: usize, n_restarts: usize) -> (f64, SpectralField) {
    assert_frac_order(s);
    assert!(k >= 1);
    let value = multiplier(k, s) + 1.0;
    let minimizer = SpectralField::cosine(k, 1.0, k);

    let n_modes = k + 16;
    let resolvent = ResolventK::new(s, n_modes);
    let mut rng = Rng::new(0x5261_796c_6569_6768).fork(k as u64);
    for _ in 0..n_restarts {
        let mut u = SpectralField::zeros(n_modes);
        for j in k..=n_modes {
            u.a[j] = rng.normal();
            u.b[j] = rng.normal();
        }
        let quotient = norm_x_squared(&u, s) / (l2_norm(&u) * l2_norm(&u));
        assert!(
            quotient >= value - 1e-12 * value,
            "tail Rayleigh quotient {quotient} fell below the closed-form minimum {value}"
        );
        // Resolvent iteration damps mode j by 1/(j^{2s}+1), so within the
        // tail subspace it converges to the k-th mode pair: the quotient must
        // descend to the minimum.
        for _ in 0..300 {
            u = resolvent.apply(&u);
            let scale = 1.0 / l2_norm(&u);
            u.scale(scale);
        }
        let settled = norm_x_squared(&u, s) / (l2_norm(&u) * l2_norm(&u));
        assert!(
            libm::fabs(settled - value) <= 1e-9 * value,
            "resolvent iteration settled at {settled}, expected {value}"
        );
    }

    (value, minimizer)
}

#[derive(Clone, Debug)]
pub struct MaxPrincipleReport {
    pub n_trials: usize,
    /// The smallest grid value of any solution across all trials; the
    /// maximum principle demands this stays ≥ −1e−8.
    pub worst_min: f64,
}

/// Solve 𝓛u + u = f for `n_trials` random fields with nonnegative grid
/// samples and report the worst solution minimum.
pub fn max_principle_audit(s: f64, n_trials: usize, seed: u64) -> MaxPrincipleReport {
    assert_frac_order(s);
    let n = 256;
    let mut rng = Rng::new(seed);
    let mut worst_min = f64::INFINITY;
    for _ in 0..n_trials {
        let g = GridField { values: (0..n).map(|_| libm::fabs(rng.normal())).collect() };
        let f = SpectralField::from_grid(&g, n / 2 - 1).unwrap();
        let u = solve_linear(&f, s);
        worst_min = worst_min.min(u.to_grid(n).unwrap().min());
    }
    MaxPrincipleReport { n_trials, worst_min }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{gagliardo_part, norm_x};

    #[test]
    fn resolvent_diagonal_invariants() {
        let k = ResolventK::new(0.4, 12);
        assert_eq!(k.diag[0], 1.0);
        for j in 1..k.diag.len() {
            assert!(k.diag[j] < k.diag[j - 1]);
            assert!(k.diag[j] > 0.0 && k.diag[j] <= 1.0);
        }
    }

    #[test]
    fn solve_linear_closed_forms() {
        let f = SpectralField::cosine(2, 1.0, 4);
        let u = solve_linear(&f, 0.5);
        assert!((u.a[2] - 1.0 / 3.0).abs() < 1e-15);

        let one = SpectralField::constant(1.0, 4);
        let u = solve_linear(&one, 0.5);
        assert!((u.a[0] - 2.0).abs() < 1e-15); // stored as a₀ = 2·mean

        let mut g = SpectralField::cosine(1, 1.0, 4);
        g.a[0] = 4.0; // f = 2 + cos x ≥ 0
        let u = solve_linear(&g, 0.5);
        assert!((u.mean() - 2.0).abs() < 1e-15);
        assert!((u.a[1] - 0.5).abs() < 1e-15);
        assert!(u.to_grid(64).unwrap().min() >= 1.5 - 1e-12);
    }

    #[test]
    fn resolvent_identity_roundtrip() {
        let mut rng = Rng::new(4);
        let s = 0.65;
        let mut u = SpectralField::zeros(10);
        u.a[0] = rng.normal();
        for j in 1..=10 {
            u.a[j] = rng.normal();
            u.b[j] = rng.normal();
        }
        // f = 𝓛u + u by exact multipliers, then solve back.
        let mut f = u.clone();
        for j in 0..=10 {
            let m = multiplier(j, s) + 1.0;
            f.a[j] *= m;
            f.b[j] *= m;
        }
        let back = solve_linear(&f, s);
        let diff = &back - &u;
        assert!(norm_x(&diff, s) < 1e-10);
    }

    #[test]
    fn resolvent_contracts_the_norm() {
        let mut rng = Rng::new(5);
        for trial in 0..20 {
            let s = 0.1 + 0.8 * rng.uniform();
            let mut f = SpectralField::zeros(8);
            f.a[0] = rng.normal();
            for j in 1..=8 {
                f.a[j] = rng.normal();
                f.b[j] = rng.normal();
            }
            let u = solve_linear(&f, s);
            assert!(norm_x(&u, s) <= norm_x(&f, s) * (1.0 + 1e-14), "trial {trial}");
        }
    }

    #[test]
    fn eigen_verify_reports_clean_spectrum() {
        let report = eigen_verify(0.5, 3, 512).expect("spectrum should verify");
        let k3 = &report.entries[3];
        assert!((k3.cos_value - 3.0).abs() < 1e-3 * 3.0);
        assert!((k3.sin_value - 3.0).abs() < 1e-3 * 3.0);
        assert!(report.entries[0].cos_value.abs() < 1e-10);
        assert_eq!(report.found_below, 7);

        let report = eigen_verify(0.25, 4, 512).expect("spectrum should verify");
        let k4 = &report.entries[4];
        assert!((k4.cos_value - 2.0).abs() < 1e-3 * 2.0);
        assert_eq!(report.found_below, 9);
    }

    #[test]
    fn eigen_audit_matrix_stays_capped() {
        let report = eigen_verify(0.75, 2, 1024).unwrap();
        assert_eq!(report.resolution, 1024);
        assert_eq!(report.audit_resolution, AUDIT_CAP);
    }

    #[test]
    fn rayleigh_minimum_closed_forms() {
        let (v, minimizer) = rayleigh_min_tail(0.5, 2, 3);
        assert_eq!(v, 3.0);
        assert_eq!(minimizer.n_modes(), 2);
        assert!((minimizer.a[2] - 1.0).abs() < 1e-15);

        let (v, _) = rayleigh_min_tail(0.25, 1, 3);
        assert_eq!(v, 2.0);

        // Eigenfunction identity: the minimizer's kernel energy is k^{2s}
        // times its L² mass.
        let (_, m3) = rayleigh_min_tail(0.3, 3, 1);
        let b = gagliardo_part(&m3, 0.3);
        let l2 = l2_norm(&m3);
        assert!((b - multiplier(3, 0.3) * l2 * l2).abs() < 1e-12);
    }

    #[test]
    fn max_principle_small_sample() {
        for &s in &[0.25, 0.5, 0.75] {
            let report = max_principle_audit(s, 20, 99);
            assert!(report.worst_min >= -1e-8, "s={s}: {}", report.worst_min);
        }
    }
}
