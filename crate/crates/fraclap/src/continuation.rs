//! Bifurcation-branch continuation for 𝓛u = λu + f(u): branches of
//! small-amplitude waves peel off the trivial line at λ*_k = k^{2s}/(1+k^{2s})
//! and are followed by pseudo-arclength Newton in the normal form
//! μ(𝓛v + v) = v + f̃(v), μ = 1 − λ, restricted to even cosine fields with
//! the sign gauge a_k > 0 (the translation degeneracy of the double
//! eigenvalue is quotiented away by working in this subspace).
//!
//! The truncation f̃ replaces f outside [−1,1] by its tangent lines, which
//! bounds it by C|t| globally; branches are capped at amplitudes well below
//! 1, so on-branch f̃ ≡ f and the truncation is a harmless safeguard.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{PeriodicWave, SpectralField, TWO_PI};
use crate::linalg::{lu_solve, Mat};
use crate::operator::QuadratureOperator;
use crate::space::{assert_frac_order, multiplier};

const PI: f64 = core::f64::consts::PI;

#[derive(Clone, Debug)]
pub enum ContinuationError {
    /// f′(0) must vanish for the branch machinery to apply.
    NonflatAtZero { derivative: f64 },
    /// Newton failed even at the minimum arclength step.
    StepFailure { at_point: usize, last_lambda: f64 },
    /// The first point (anchored at the predictor amplitude) did not
    /// converge — wrong k or degenerate nonlinearity.
    SeedFailure { k: usize },
}

impl fmt::Display for ContinuationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuationError::NonflatAtZero { derivative } => {
                write!(f, "nonlinearity has f'(0) = {derivative:.3e}, expected 0")
            }
            ContinuationError::StepFailure { at_point, last_lambda } => write!(
                f,
                "continuation stalled after {at_point} points (λ = {last_lambda:.6}): Newton failed at the minimum step"
            ),
            ContinuationError::SeedFailure { k } => {
                write!(f, "could not converge the first branch point for mode k = {k}")
            }
        }
    }
}

impl core::error::Error for ContinuationError {}

/// Smooth nonlinearities with f(0) = 0 that the branch solver understands.
/// `Poly` carries an explicit linear coefficient so that the f′(0) ≠ 0
/// rejection path is reachable.
#[derive(Clone, Copy, Debug)]
pub enum BaseNonlinearity {
    Zero,
    Square,
    Cube,
    /// |t|^p, p > 1.
    AbsPower { p: f64 },
    /// |t|^{p−1} t, p > 1.
    OddPower { p: f64 },
    /// c₁t + c₂t² + c₃t³.
    Poly { c1: f64, c2: f64, c3: f64 },
}

impl BaseNonlinearity {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            BaseNonlinearity::Zero => 0.0,
            BaseNonlinearity::Square => t * t,
            BaseNonlinearity::Cube => t * t * t,
            BaseNonlinearity::AbsPower { p } => libm::pow(libm::fabs(t), p),
            BaseNonlinearity::OddPower { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    libm::copysign(libm::pow(libm::fabs(t), p), t)
                }
            }
            BaseNonlinearity::Poly { c1, c2, c3 } => t * (c1 + t * (c2 + t * c3)),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match *self {
            BaseNonlinearity::Zero => 0.0,
            BaseNonlinearity::Square => 2.0 * t,
            BaseNonlinearity::Cube => 3.0 * t * t,
            BaseNonlinearity::AbsPower { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    libm::copysign(p * libm::pow(libm::fabs(t), p - 1.0), t)
                }
            }
            BaseNonlinearity::OddPower { p } => p * libm::pow(libm::fabs(t), p - 1.0),
            BaseNonlinearity::Poly { c1, c2, c3 } => c1 + t * (2.0 * c2 + t * 3.0 * c3),
        }
    }
}

/// f replaced by its tangent lines outside [−1, 1]: C¹, identical to f on
/// [−1, 1], and globally bounded by `lipschitz_c`·|t|.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedNonlinearity {
    pub base: BaseNonlinearity,
    pub lipschitz_c: f64,
}

/// Build the truncation, computing the linear-growth constant
/// C = sup |f̃(t)|/|t|. Rejects nonlinearities with f′(0) ≠ 0.
pub fn truncate_nonlinearity(
    base: BaseNonlinearity,
) -> Result<TruncatedNonlinearity, ContinuationError> {
    let d0 = base.deriv(0.0);
    if libm::fabs(d0) > 1e-12 {
        return Err(ContinuationError::NonflatAtZero { derivative: d0 });
    }
    // On [−1,1] the ratio |f(t)/t| is scanned; outside, the linear extension's
    // ratio is monotone in 1/t, so its sup is attained at t = ±1 or t → ±∞,
    // giving |f(±1)| and |f′(±1)|.
    let mut c = 0.0_f64;
    let steps = 2000;
    for i in 1..=steps {
        let t = i as f64 / steps as f64;
        c = c.max(libm::fabs(base.eval(t)) / t);
        c = c.max(libm::fabs(base.eval(-t)) / t);
    }
    c = c.max(libm::fabs(base.eval(1.0)));
    c = c.max(libm::fabs(base.eval(-1.0)));
    c = c.max(libm::fabs(base.deriv(1.0)));
    c = c.max(libm::fabs(base.deriv(-1.0)));
    Ok(TruncatedNonlinearity { base, lipschitz_c: c })
}

impl TruncatedNonlinearity {
    pub fn eval(&self, t: f64) -> f64 {
        if t > 1.0 {
            self.base.eval(1.0) + self.base.deriv(1.0) * (t - 1.0)
        } else if t < -1.0 {
            self.base.eval(-1.0) + self.base.deriv(-1.0) * (t + 1.0)
        } else {
            self.base.eval(t)
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.base.deriv(t.clamp(-1.0, 1.0))
    }
}

/// λ*_k = k^{2s}/(1 + k^{2s}) for k = 1..k_max: the parameter values where
/// nontrivial branches leave the trivial line.
pub fn bifurcation_points(s: f64, k_max: usize) -> Vec<(usize, f64)> {
    assert_frac_order(s);
    assert!(k_max >= 1);
    (1..=k_max)
        .map(|k| {
            let m = multiplier(k, s);
            (k, m / (1.0 + m))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ContinuationOpts {
    pub n_modes: usize,
    /// Predictor amplitude for the first point off the trivial line.
    pub eps: f64,
    pub step_init: f64,
    pub step_min: f64,
    pub step_max: f64,
    /// Continuation stops once the field amplitude exceeds this.
    pub amp_max: f64,
    pub max_points: usize,
    /// Sup-norm residual target for each corrected point.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for ContinuationOpts {
    fn default() -> Self {
        ContinuationOpts {
            n_modes: 32,
            eps: 1e-3,
            step_init: 2e-3,
            step_min: 1e-4,
            step_max: 5e-2,
            amp_max: 0.3,
            max_points: 400,
            newton_tol: 1e-10,
            newton_max_iter: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub lambda: f64,
    /// Normal-form profile v (even cosine field, 2π-periodic).
    pub field: SpectralField,
    /// Sup-norm of the profile.
    pub amplitude: f64,
    /// μ = 1 − λ.
    pub mu: f64,
    /// 2π(1−λ)^{−1/(2s)}, the period of the rescaled wave family.
    pub minimal_period: f64,
    /// Sup-norm of μ(𝓛v + v) − v − f̃(v) on a dense grid.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub k: usize,
    pub s: f64,
    pub points: Vec<BranchPoint>,
    /// All fields are even cosine fields (the continuation gauge).
    pub even_symmetry: bool,
    /// Indices where the tangent's μ-component changed sign (folds).
    pub folds: Vec<usize>,
    /// (smallest, largest) amplitude along the branch.
    pub amplitude_range: (f64, f64),
}

/// Workspace for even-cosine Newton systems: coefficient layout
/// [a₀, …, a_M] with u = a₀/2 + Σ aⱼcos(jx).
struct CosineWorkspace {
    m: usize,
    n: usize,
    h: f64,
    cos_t: Vec<Vec<f64>>,
}

impl CosineWorkspace {
    fn new(m: usize) -> Self {
        let n = 8 * (m + 1);
        let h = TWO_PI / n as f64;
        let mut cos_t = vec![vec![0.0; n]; m + 1];
        for (j, row) in cos_t.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = libm::cos(j as f64 * i as f64 * h);
            }
        }
        CosineWorkspace { m, n, h, cos_t }
    }

    fn grid_of(&self, a: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let mut v = a[0] / 2.0;
                for j in 1..=self.m {
                    v += a[j] * self.cos_t[j][i];
                }
                v
            })
            .collect()
    }

    /// Cosine projection of grid values in the a-coefficient convention.
    fn project(&self, values: &[f64], out: &mut [f64]) {
        for j in 0..=self.m {
            let mut acc = 0.0;
            for i in 0..self.n {
                acc += values[i] * self.cos_t[j][i];
            }
            out[j] = acc * self.h / PI;
        }
    }
}

fn field_of(a: &[f64]) -> SpectralField {
    let mut u = SpectralField::zeros(a.len() - 1);
    u.a.copy_from_slice(a);
    u
}

/// Normal-form residual G(v, μ) = μ(𝓛v + v) − v − f̃(v) as a sup-norm over a
/// dense grid. Valid for arbitrary fields (cosine or not), which is what the
/// translation-family checks need.
pub fn normal_form_residual(v: &SpectralField, mu: f64, f: &TruncatedNonlinearity, s: f64) -> f64 {
    let m = v.n_modes();
    let mut lv_plus_v = v.clone();
    for j in 0..=m {
        let w = multiplier(j, s) + 1.0;
        lv_plus_v.a[j] *= w;
        lv_plus_v.b[j] *= w;
    }
    let n = 8 * (m + 1);
    let gv = v.to_grid(n).unwrap();
    let gl = lv_plus_v.to_grid(n).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let r = mu * gl.values[i] - gv.values[i] - f.eval(gv.values[i]);
        worst = worst.max(libm::fabs(r));
    }
    worst
}

/// One bordered Newton solve of G(a, μ) = 0 together with the constraint row
/// `constraint`(a, μ) = 0; returns the dense-grid residual on success.
#[allow(clippy::too_many_arguments)]
/// Pseudo-arclength (or amplitude) constraint: value and its gradients in
/// the cosine coefficients and in mu.
type Constraint = dyn Fn(&[f64], f64) -> (f64, Vec<f64>, f64);

#[allow(clippy::too_many_arguments)]
fn corrector(
    ws: &CosineWorkspace,
    a: &mut [f64],
    mu: &mut f64,
    f: &TruncatedNonlinearity,
    s: f64,
    constraint: &Constraint,
    tol: f64,
    max_iter: usize,
) -> Option<f64> {
    let m = ws.m;
    let d = m + 2; // coefficients + μ
    let mut proj = vec![0.0; m + 1];
    for _ in 0..max_iter {
        let grid = ws.grid_of(a);
        let fvals: Vec<f64> = grid.iter().map(|&t| f.eval(t)).collect();
        ws.project(&fvals, &mut proj);
        let mut res = vec![0.0; d];
        let mut worst = 0.0_f64;
        for j in 0..=m {
            res[j] = *mu * (multiplier(j, s) + 1.0) * a[j] - a[j] - proj[j];
            worst = worst.max(libm::fabs(res[j]));
        }
        let (cval, cgrad_a, cgrad_mu) = constraint(a, *mu);
        res[m + 1] = cval;
        if worst <= tol && libm::fabs(cval) <= tol {
            let v = field_of(a);
            return Some(normal_form_residual(&v, *mu, f, s));
        }

        let w: Vec<f64> = grid.iter().map(|&t| f.deriv(t)).collect();
        let mut jac = Mat::zeros(d, d);
        for j in 0..=m {
            for l in 0..=m {
                let mut acc = 0.0;
                for i in 0..ws.n {
                    let phi_l = if l == 0 { 0.5 } else { ws.cos_t[l][i] };
                    acc += w[i] * phi_l * ws.cos_t[j][i];
                }
                let mut entry = -acc * ws.h / PI;
                if j == l {
                    entry += *mu * (multiplier(j, s) + 1.0) - 1.0;
                }
                jac.set(j, l, entry);
            }
            jac.set(j, m + 1, (multiplier(j, s) + 1.0) * a[j]);
            jac.set(m + 1, j, cgrad_a[j]);
        }
        jac.set(m + 1, m + 1, cgrad_mu);

        let rhs: Vec<f64> = res.iter().map(|&x| -x).collect();
        let delta = lu_solve(jac, rhs)?;
        for j in 0..=m {
            a[j] += delta[j];
        }
        *mu += delta[m + 1];
    }
    // Converged iff the last iterate actually meets the tolerance.
    let v = field_of(a);
    let r = normal_form_residual(&v, *mu, f, s);
    if r <= tol * 10.0 {
        Some(r)
    } else {
        None
    }
}

/// Tangent of the solution curve at (a, μ): solves the bordered system
/// [G_z; prev_tangentᵀ]·t = [0; 1] and normalizes.
fn tangent(
    ws: &CosineWorkspace,
    a: &[f64],
    mu: f64,
    f: &TruncatedNonlinearity,
    s: f64,
    prev: &[f64],
) -> Option<Vec<f64>> {
    let m = ws.m;
    let d = m + 2;
    let grid = ws.grid_of(a);
    let w: Vec<f64> = grid.iter().map(|&t| f.deriv(t)).collect();
    let mut jac = Mat::zeros(d, d);
    for j in 0..=m {
        for l in 0..=m {
            let mut acc = 0.0;
            for i in 0..ws.n {
                let phi_l = if l == 0 { 0.5 } else { ws.cos_t[l][i] };
                acc += w[i] * phi_l * ws.cos_t[j][i];
            }
            let mut entry = -acc * ws.h / PI;
            if j == l {
                entry += mu * (multiplier(j, s) + 1.0) - 1.0;
            }
            jac.set(j, l, entry);
        }
        jac.set(j, m + 1, (multiplier(j, s) + 1.0) * a[j]);
        jac.set(m + 1, j, prev[j]);
    }
    jac.set(m + 1, m + 1, prev[m + 1]);
    let mut rhs = vec![0.0; d];
    rhs[d - 1] = 1.0;
    let t = lu_solve(jac, rhs)?;
    let norm = libm::sqrt(t.iter().map(|x| x * x).sum::<f64>());
    Some(t.iter().map(|x| x / norm).collect())
}

fn make_point(a: &[f64], mu: f64, s: f64, residual: f64) -> BranchPoint {
    let field = field_of(a);
    let lambda = 1.0 - mu;
    BranchPoint {
        lambda,
        amplitude: field.amplitude(),
        mu,
        minimal_period: TWO_PI * libm::pow(mu, -1.0 / (2.0 * s)),
        residual,
        field,
    }
}

/// Shift an even cosine field by half the lattice period π/k: modes j·k pick
/// up the factor (−1)^j. Restores the a_k > 0 gauge without leaving the
/// solution set. Only valid for fields supported on the k-lattice.
fn half_lattice_shift(a: &mut [f64], k: usize) {
    for j in (0..a.len()).step_by(k) {
        if (j / k) % 2 == 1 {
            a[j] = -a[j];
        }
    }
}

fn is_k_lattice(a: &[f64], k: usize) -> bool {
    a.iter().enumerate().all(|(j, &v)| j % k == 0 || libm::fabs(v) < 1e-10)
}

/// Follow the branch of 2π-periodic even waves bifurcating from the trivial
/// line at mode k, for 𝓛u = λu + f(u) presented in normal form. Points are
/// ordered from the bifurcation outward; continuation stops at `amp_max`.
pub fn continue_branch(
    f_base: BaseNonlinearity,
    s: f64,
    k: usize,
    opts: &ContinuationOpts,
) -> Result<Branch, ContinuationError> {
    assert_frac_order(s);
    assert!(k >= 1);
    let f = truncate_nonlinearity(f_base)?;
    let m = opts.n_modes.max(4 * k);
    let ws = CosineWorkspace::new(m);

    let mu0 = 1.0 / (1.0 + multiplier(k, s));
    let mut a = vec![0.0; m + 1];
    a[k] = opts.eps;
    let mut mu = mu0;

    // First point: anchor the k-th coefficient at the predictor amplitude.
    let eps = opts.eps;
    let anchor = move |a: &[f64], _mu: f64| -> (f64, Vec<f64>, f64) {
        let mut g = vec![0.0; a.len()];
        g[k] = 1.0;
        (a[k] - eps, g, 0.0)
    };
    let residual = corrector(
        &ws,
        &mut a,
        &mut mu,
        &f,
        s,
        &anchor,
        opts.newton_tol,
        opts.newton_max_iter,
    )
    .ok_or(ContinuationError::SeedFailure { k })?;

    let mut points = vec![make_point(&a, mu, s, residual)];
    let mut folds = Vec::new();

    // Initial tangent: seeded by the pure amplitude direction.
    let mut seed_dir = vec![0.0; m + 2];
    seed_dir[k] = 1.0;
    let mut tan = match tangent(&ws, &a, mu, &f, s, &seed_dir) {
        Some(t) => t,
        None => {
            return Ok(Branch {
                k,
                s,
                even_symmetry: true,
                folds,
                amplitude_range: range_of(&points),
                points,
            })
        }
    };
    // Orient toward growing amplitude.
    if tan[k] * libm::copysign(1.0, a[k]) < 0.0 {
        for t in tan.iter_mut() {
            *t = -*t;
        }
    }

    let mut ds = opts.step_init;
    let mut failures = 0;
    while points.len() < opts.max_points {
        let last = points.last().unwrap();
        if last.amplitude >= opts.amp_max {
            break;
        }
        let mut a_try: Vec<f64> = a.iter().zip(&tan).map(|(x, t)| x + ds * t).collect();
        let mut mu_try = mu + ds * tan[m + 1];
        let a_pred = a_try.clone();
        let mu_pred = mu_try;
        let tan_arc = tan.clone();
        let arclength = move |a: &[f64], mu: f64| -> (f64, Vec<f64>, f64) {
            let mut val = (mu - mu_pred) * tan_arc[a.len() + 1 - 1];
            for j in 0..a.len() {
                val += (a[j] - a_pred[j]) * tan_arc[j];
            }
            (val, tan_arc[..a.len()].to_vec(), tan_arc[a.len()])
        };
        match corrector(
            &ws,
            &mut a_try,
            &mut mu_try,
            &f,
            s,
            &arclength,
            opts.newton_tol,
            opts.newton_max_iter,
        ) {
            Some(res) if mu_try > 1e-6 => {
                a = a_try;
                mu = mu_try;
                failures = 0;
                // Gauge restoration: keep the k-th coefficient positive.
                if a[k] < 0.0 && is_k_lattice(&a, k) {
                    half_lattice_shift(&mut a, k);
                }
                points.push(make_point(&a, mu, s, res));
                let new_tan = match tangent(&ws, &a, mu, &f, s, &tan) {
                    Some(t) => t,
                    None => break,
                };
                if new_tan[m + 1] * tan[m + 1] < 0.0 {
                    folds.push(points.len() - 1);
                }
                tan = new_tan;
                ds = (ds * 1.2).min(opts.step_max);
            }
            _ => {
                ds *= 0.5;
                failures += 1;
                if ds < opts.step_min || failures > 8 {
                    if points.len() <= 1 {
                        return Err(ContinuationError::StepFailure {
                            at_point: points.len(),
                            last_lambda: 1.0 - mu,
                        });
                    }
                    break;
                }
            }
        }
    }

    Ok(Branch {
        k,
        s,
        even_symmetry: true,
        folds,
        amplitude_range: range_of(&points),
        points,
    })
}

fn range_of(points: &[BranchPoint]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for p in points {
        lo = lo.min(p.amplitude);
        hi = hi.max(p.amplitude);
    }
    (lo, hi)
}

/// Stretch a branch point into the wave it represents: u(x) = v(μ^{1/(2s)}x)
/// with period 2πμ^{−1/(2s)}, solving (−Δ)^s u = λu + f̃(u). The returned
/// residual is the sup over 32 off-grid points of the period-adapted
/// quadrature realization of that equation.
pub fn rescale_to_global(
    point: &BranchPoint,
    s: f64,
    f: &TruncatedNonlinearity,
) -> (PeriodicWave, f64) {
    assert!(point.mu > 0.0, "rescaling requires μ = 1 − λ > 0");
    let wave = PeriodicWave::new(point.minimal_period, point.field.clone());
    let n = (8 * (point.field.n_modes() + 1)).max(256);
    let op = QuadratureOperator::with_period(s, n, wave.period, 1e-12);
    let mut worst = 0.0_f64;
    for j in 0..32 {
        let x = wave.period * (j as f64 + 0.37) / 32.0;
        let lu = op.apply_profile_at(&wave.profile, x);
        let u = wave.eval(x);
        let r = lu - point.lambda * u - f.eval(u);
        worst = worst.max(libm::fabs(r));
    }
    (wave, worst)
}

/// Smallest positive shift at which the wave's autocorrelation returns to its
/// zero-shift value — the empirical minimal period, independent of any
/// formula. Requires a nonconstant wave.
pub fn empirical_minimal_period(wave: &PeriodicWave) -> f64 {
    let v = &wave.profile;
    let m = v.n_modes();
    // R(θ) = π(a₀²/2 + Σ (aⱼ² + bⱼ²) cos(jθ)); deficit D = R(0) − R(θ) ≥ 0
    // vanishes exactly at shifts that reproduce the wave.
    let mut energy = vec![0.0; m + 1];
    let mut osc = 0.0;
    for j in 1..=m {
        energy[j] = v.a[j] * v.a[j] + v.b[j] * v.b[j];
        osc += energy[j];
    }
    assert!(osc > 1e-28, "constant wave has no minimal period");
    // 1 − cos(jθ) written as 2·sin²(jθ/2): same deficit, but free of the
    // cancellation that would otherwise floor it near recurrences and stall
    // the refinement a few nano-radians off the true period.
    let deficit = |theta: f64| -> f64 {
        let mut d = 0.0;
        for j in 1..=m {
            let sh = libm::sin(0.5 * j as f64 * theta);
            d += energy[j] * 2.0 * sh * sh;
        }
        d
    };

    let scan = 8192;
    let dt = TWO_PI / scan as f64;
    let mut best = TWO_PI;
    let mut found = false;
    for i in 2..scan {
        let th = i as f64 * dt;
        // Local minima of the deficit that are deep enough to be candidate
        // recurrences.
        if deficit(th) <= deficit(th - dt)
            && deficit(th) <= deficit(th + dt)
            && deficit(th) < 1e-4 * osc
        {
            best = th;
            found = true;
            break;
        }
    }
    if !found {
        return wave.period;
    }
    // Golden-section refinement of the deficit minimum.
    let (mut lo, mut hi) = (best - dt, best + dt);
    let phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (deficit(x1), deficit(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = deficit(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = deficit(x2);
        }
    }
    let theta = 0.5 * (lo + hi);
    assert!(
        deficit(theta) <= 1e-8 * osc,
        "candidate recurrence did not refine to a true period"
    );
    theta / TWO_PI * wave.period
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bifurcation_point_values() {
        let pts = bifurcation_points(0.5, 4);
        assert!((pts[0].1 - 0.5).abs() < 1e-15);
        assert!((pts[3].1 - 0.8).abs() < 1e-15);
        let pts = bifurcation_points(0.25, 1);
        assert!((pts[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn truncation_constants_and_identity() {
        let sq = truncate_nonlinearity(BaseNonlinearity::Square).unwrap();
        assert!((sq.lipschitz_c - 2.0).abs() < 1e-9);
        let cu = truncate_nonlinearity(BaseNonlinearity::Cube).unwrap();
        assert!((cu.lipschitz_c - 3.0).abs() < 1e-9);
        // f̃ agrees with f inside the unit interval, tangent lines outside.
        for &t in &[-0.9, -0.3, 0.0, 0.5, 1.0] {
            assert_eq!(sq.eval(t), t * t);
        }
        assert!((sq.eval(2.5) - (1.0 + 2.0 * 1.5)).abs() < 1e-15);
        assert!((cu.eval(-3.0) - (-1.0 + 3.0 * (-2.0))).abs() < 1e-15);
        // Growth bound |f̃(t)| ≤ C|t| on a wide sample.
        for i in 1..200 {
            let t = -10.0 + 0.1 * i as f64;
            if t != 0.0 {
                assert!(sq.eval(t).abs() <= sq.lipschitz_c * t.abs() + 1e-12);
                assert!(cu.eval(t).abs() <= cu.lipschitz_c * t.abs() + 1e-12);
            }
        }
    }

    #[test]
    fn truncation_rejects_nonflat_nonlinearity() {
        let err = truncate_nonlinearity(BaseNonlinearity::Poly { c1: 1.0, c2: 0.0, c3: 0.0 })
            .unwrap_err();
        assert!(matches!(err, ContinuationError::NonflatAtZero { .. }));
    }

    #[test]
    fn zero_nonlinearity_gives_the_exact_eigenline() {
        let opts = ContinuationOpts { max_points: 20, ..Default::default() };
        let branch = continue_branch(BaseNonlinearity::Zero, 0.5, 1, &opts).unwrap();
        let mu0 = 0.5;
        for p in &branch.points {
            assert!((p.mu - mu0).abs() < 1e-10, "μ drifted to {}", p.mu);
            assert!(p.residual <= 1e-10);
        }
        // Amplitude actually grows along the eigenline.
        assert!(branch.points.last().unwrap().amplitude > branch.points[0].amplitude);
    }

    #[test]
    fn cube_branch_has_pitchfork_scaling() {
        let branch = continue_branch(BaseNonlinearity::Cube, 0.5, 1, &ContinuationOpts::default())
            .expect("cube branch continues");
        let lam_star = 0.5;
        assert!(branch.points.len() >= 10);
        // The three points nearest the bifurcation hug λ*.
        for p in &branch.points[..3] {
            assert!((p.lambda - lam_star).abs() <= 1e-2, "λ = {}", p.lambda);
        }
        // Gauge and symmetry.
        for p in &branch.points {
            assert!(p.field.a[1] > 0.0);
            assert!(p.field.b.iter().all(|&b| b == 0.0));
            assert!(p.residual <= 1e-8);
        }
        // amplitude² ≈ (4/3)(1+k^{2s})|λ−λ*|: fit the exponent on the five
        // smallest points (skip the anchor, whose amplitude is pinned).
        let pts = &branch.points[1..6];
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for p in pts {
            let x = libm::log(libm::fabs(p.lambda - lam_star));
            let y = libm::log(p.amplitude * p.amplitude);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let n = pts.len() as f64;
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((0.9..=1.1).contains(&slope), "pitchfork exponent {slope}");
        // And the predicted constant: amplitude²/(λ*−λ) ≈ (4/3)(1+1) = 8/3.
        let p = &branch.points[3];
        let ratio = p.amplitude * p.amplitude / (lam_star - p.lambda);
        assert!((ratio - 8.0 / 3.0).abs() < 0.15 * (8.0 / 3.0), "ratio {ratio}");
    }

    #[test]
    fn square_branch_spans_amplitudes() {
        let branch =
            continue_branch(BaseNonlinearity::Square, 0.5, 1, &ContinuationOpts::default())
                .expect("square branch continues");
        let (lo, hi) = branch.amplitude_range;
        assert!(lo <= 2e-3);
        assert!(hi >= 0.25);
        // Small-amplitude periods approach 4π.
        let p0 = &branch.points[1];
        assert!((p0.minimal_period - 4.0 * PI).abs() <= 0.1 * PI, "period {}", p0.minimal_period);
    }

    #[test]
    fn translated_branch_points_still_solve() {
        let branch = continue_branch(BaseNonlinearity::Cube, 0.5, 1, &ContinuationOpts::default())
            .unwrap();
        let f = truncate_nonlinearity(BaseNonlinearity::Cube).unwrap();
        let p = &branch.points[branch.points.len() / 2];
        for &tau in &[0.7, 2.1] {
            let shifted = p.field.translate(tau);
            let r = normal_form_residual(&shifted, p.mu, &f, 0.5);
            assert!(r <= 1e-8, "τ={tau}: residual {r}");
        }
    }

    #[test]
    fn rescaling_periods_are_consistent() {
        let branch = continue_branch(BaseNonlinearity::Cube, 0.5, 1, &ContinuationOpts::default())
            .unwrap();
        let f = truncate_nonlinearity(BaseNonlinearity::Cube).unwrap();
        for p in branch.points.iter().step_by(5) {
            // Definitional identity: T·μ^{1/(2s)} = 2π.
            let back = p.minimal_period * libm::pow(p.mu, 1.0 / (2.0 * 0.5));
            assert!((back - TWO_PI).abs() < 1e-12);
            let (wave, res) = rescale_to_global(p, 0.5, &f);
            assert!(res <= 1e-5, "rescaled residual {res}");
            assert!((wave.period - p.minimal_period).abs() < 1e-15);
        }
        // λ = 0.5 at s = 0.5 means period 4π; the first points sit near it.
        let near = &branch.points[1];
        assert!((near.minimal_period - 2.0 * TWO_PI).abs() < 0.2);
    }

    #[test]
    fn empirical_period_detects_the_k_lattice() {
        // Pure mode-3 profile: the wave repeats after a third of its period.
        let wave = PeriodicWave::new(TWO_PI, SpectralField::cosine(3, 1.0, 3));
        let emp = empirical_minimal_period(&wave);
        assert!((emp - TWO_PI / 3.0).abs() < 1e-9);

        // A k = 2 branch wave: autocorrelation must halve the formula period.
        let branch = continue_branch(BaseNonlinearity::Cube, 0.5, 2, &ContinuationOpts::default())
            .unwrap();
        let f = truncate_nonlinearity(BaseNonlinearity::Cube).unwrap();
        let p = branch.points.last().unwrap();
        let (wave, _) = rescale_to_global(p, 0.5, &f);
        let emp = empirical_minimal_period(&wave);
        assert!(
            (2.0 * emp - p.minimal_period).abs() <= 0.01 * p.minimal_period,
            "empirical {emp} vs formula {}",
            p.minimal_period
        );
    }
}
