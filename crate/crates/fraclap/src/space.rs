//! The solution space: closed-form inner products coming from the
//! orthogonality of the trigonometric eigenbasis, plus the exponent
//! arithmetic of the regularity bootstrap.
//!
//! Conventions: '∫' is over one 2π period; the space norm is
//! ∥u∥² = B(u) + ∫u² with B the kernel-weighted seminorm, which in
//! coefficients reads π·Σ_j (j^{2s}+1)(a_j²+b_j²) plus π·a_0²/2.

use alloc::vec::Vec;

use crate::field::SpectralField;

pub const PI: f64 = core::f64::consts::PI;

/// j^{2s} — the spectral multiplier of the nonlocal operator.
#[inline]
pub fn multiplier(j: usize, s: f64) -> f64 {
    if j == 0 { 0.0 } else { libm::pow(j as f64, 2.0 * s) }
}

pub fn assert_frac_order(s: f64) {
    assert!(s > 0.0 && s < 1.0, "fractional order must satisfy 0 < s < 1, got {s}");
}

/// The critical Sobolev exponent 2/(1−2s); infinite from s = 1/2 on.
pub fn critical_exponent(s: f64) -> f64 {
    assert_frac_order(s);
    if s < 0.5 { 2.0 / (1.0 - 2.0 * s) } else { f64::INFINITY }
}

/// The growth bound on p: nonlinearities up to (but excluding) this power keep
/// the problem subcritical. Equals critical_exponent − 1 where finite.
pub fn subcritical_p_bound(s: f64) -> f64 {
    assert_frac_order(s);
    if s < 0.5 { (1.0 + 2.0 * s) / (1.0 - 2.0 * s) } else { f64::INFINITY }
}

pub fn is_subcritical(s: f64, p: f64) -> bool {
    assert_frac_order(s);
    assert!(p > 1.0, "growth exponent must satisfy p > 1, got {p}");
    s >= 0.5 || p < subcritical_p_bound(s)
}

/// How a bootstrap iteration ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainOutcome {
    /// q_j/p reached 1/(2s): the iteration closes. `threshold_equality` marks
    /// the borderline q_j/p = 1/(2s) case, which lands in every L^m rather
    /// than a single terminal exponent.
    Terminated { threshold_equality: bool },
    /// The denominator p − 2·q_j·s dropped to ≤ 0, which jumps straight to L^∞.
    DenominatorCollapse,
    /// Step cap hit with no termination — the supercritical signature.
    CapHit,
}

#[derive(Clone, Debug)]
pub struct ExponentChain {
    pub s: f64,
    pub p: f64,
    pub chain: Vec<f64>,
    pub outcome: ChainOutcome,
}

impl ExponentChain {
    pub fn terminated(&self) -> bool {
        !matches!(self.outcome, ChainOutcome::CapHit)
    }
}

const CHAIN_CAP: usize = 1000;

/// Iterate q_{j+1} = q_j / (p − 2·q_j·s) until the integrability exponent
/// clears the classical threshold q/p ≥ 1/(2s), the denominator collapses, or
/// the step cap trips.
pub fn bootstrap_chain(s: f64, p: f64, q0: f64) -> ExponentChain {
    assert_frac_order(s);
    assert!(p > 1.0, "growth exponent must satisfy p > 1, got {p}");
    assert!(q0 > 1.0, "starting exponent must exceed 1, got {q0}");
    let threshold = 1.0 / (2.0 * s);
    let mut chain = Vec::new();
    let mut q = q0;
    for _ in 0..CHAIN_CAP {
        chain.push(q);
        let ratio = q / p;
        if ratio >= threshold * (1.0 - 1e-12) {
            let equality = libm::fabs(ratio - threshold) <= 1e-12 * threshold;
            return ExponentChain {
                s,
                p,
                chain,
                outcome: ChainOutcome::Terminated { threshold_equality: equality },
            };
        }
        let denom = p - 2.0 * q * s;
        if denom <= 0.0 {
            return ExponentChain { s, p, chain, outcome: ChainOutcome::DenominatorCollapse };
        }
        q /= denom;
    }
    ExponentChain { s, p, chain, outcome: ChainOutcome::CapHit }
}

/// ∫ u v over one period, closed form from orthogonality.
pub fn l2_inner(u: &SpectralField, v: &SpectralField) -> f64 {
    assert_eq!(u.a.len(), v.a.len(), "mode counts differ");
    let mut acc = u.a[0] * v.a[0] / 2.0;
    for j in 1..u.a.len() {
        acc += u.a[j] * v.a[j] + u.b[j] * v.b[j];
    }
    PI * acc
}

pub fn l2_norm(u: &SpectralField) -> f64 {
    libm::sqrt(l2_inner(u, u))
}

/// The kernel-weighted seminorm B(u) = π·Σ_j j^{2s}(a_j² + b_j²); vanishes
/// exactly on constants.
pub fn gagliardo_part(u: &SpectralField, s: f64) -> f64 {
    assert_frac_order(s);
    let mut acc = 0.0;
    for j in 1..u.a.len() {
        acc += multiplier(j, s) * (u.a[j] * u.a[j] + u.b[j] * u.b[j]);
    }
    PI * acc
}

/// Full space inner product ⟨u,v⟩ = B(u,v) + ∫uv.
pub fn inner_product_x(u: &SpectralField, v: &SpectralField, s: f64) -> f64 {
    assert_frac_order(s);
    assert_eq!(u.a.len(), v.a.len(), "mode counts differ");
    let mut acc = u.a[0] * v.a[0] / 2.0;
    for j in 1..u.a.len() {
        acc += (multiplier(j, s) + 1.0) * (u.a[j] * v.a[j] + u.b[j] * v.b[j]);
    }
    PI * acc
}

pub fn norm_x_squared(u: &SpectralField, s: f64) -> f64 {
    inner_product_x(u, u, s)
}

pub fn norm_x(u: &SpectralField, s: f64) -> f64 {
    libm::sqrt(norm_x_squared(u, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn critical_exponent_formula() {
        assert!((critical_exponent(0.25) - 4.0).abs() < 1e-15);
        assert!((critical_exponent(0.1) - 2.5).abs() < 1e-12);
        assert!(critical_exponent(0.5).is_infinite());
        assert!(critical_exponent(0.75).is_infinite());
    }

    #[test]
    fn subcriticality_boundary() {
        assert!(is_subcritical(0.25, 2.0)); // bound is 3
        assert!(!is_subcritical(0.25, 3.0)); // boundary excluded
        assert!(is_subcritical(0.75, 10.0)); // no bound above s = 1/2
    }

    #[test]
    #[should_panic(expected = "p > 1")]
    fn subcriticality_rejects_p_at_most_one() {
        let _ = is_subcritical(0.25, 1.0);
    }

    #[test]
    fn bootstrap_chain_matches_hand_iterated_rationals() {
        // s = 1/10, p = 7/5, q0 = 5/2 iterated exactly:
        //   q1 = (5/2)/(7/5 − 1/2)        = 25/9
        //   q2 = (25/9)/(7/5 − 5/9)       = 125/38
        //   q3 = (125/38)/(7/5 − 25/38)   = 625/141
        //   q4 = (625/141)/(7/5 − 125/141)= 3125/362
        // and q4/p = 15625/(7·362) ≈ 6.17 ≥ 1/(2s) = 5 stops the chain.
        let chain = bootstrap_chain(0.1, 1.4, 2.5);
        let expect = [2.5, 25.0 / 9.0, 125.0 / 38.0, 625.0 / 141.0, 3125.0 / 362.0];
        assert_eq!(chain.chain.len(), expect.len());
        for (got, want) in chain.chain.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert_eq!(chain.outcome, ChainOutcome::Terminated { threshold_equality: false });
        // Strictly increasing while subcritical.
        for w in chain.chain.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn bootstrap_threshold_equality_flagged() {
        // q0/p = 4/2 = 2 equals 1/(2s) = 2 at s = 1/4: stop before any step.
        let chain = bootstrap_chain(0.25, 2.0, 4.0);
        assert_eq!(chain.chain, alloc::vec![4.0]);
        assert_eq!(chain.outcome, ChainOutcome::Terminated { threshold_equality: true });
    }

    #[test]
    fn bootstrap_reports_non_termination_when_supercritical() {
        // Critical p at s = 0.1 is 1.5; at p = 1.6 the chain drifts down
        // toward the fixed point (p−1)/(2s) = 3 side and never closes.
        let chain = bootstrap_chain(0.1, 1.6, 2.5);
        assert_eq!(chain.outcome, ChainOutcome::CapHit);
        assert_eq!(chain.chain.len(), 1000);
        assert!(!chain.terminated());
    }

    #[test]
    fn bootstrap_terminates_across_subcritical_grid() {
        for &s in &[0.05, 0.15, 0.25, 0.35, 0.45] {
            let bound = subcritical_p_bound(s);
            for frac in [0.3, 0.6, 0.9] {
                let p = 1.0 + (bound - 1.0) * frac;
                let chain = bootstrap_chain(s, p, critical_exponent(s));
                assert!(
                    chain.terminated(),
                    "s={s} p={p} failed to terminate"
                );
            }
            // At or above the bound: non-termination reported.
            let chain = bootstrap_chain(s, bound, critical_exponent(s));
            assert!(!chain.terminated(), "s={s} boundary p" );
        }
    }

    #[test]
    fn inner_product_closed_forms() {
        let u = SpectralField::cosine(2, 1.0, 4);
        assert!((inner_product_x(&u, &u, 0.5) - 3.0 * PI).abs() < 1e-12);
        let c = SpectralField::cosine(3, 1.0, 4);
        let s3 = SpectralField::sine(3, 1.0, 4);
        assert!(inner_product_x(&c, &s3, 0.3).abs() < 1e-15);
        let one = SpectralField::constant(1.0, 4);
        assert!((inner_product_x(&one, &one, 0.7) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn norm_x_examples() {
        let u = SpectralField::cosine(1, 1.0, 2);
        assert!((norm_x(&u, 0.5) - libm::sqrt(2.0 * PI)).abs() < 1e-12);
        assert_eq!(norm_x(&SpectralField::zeros(3), 0.5), 0.0);
        // cos(x) + sin(2x) at s = 1/4.
        let mut v = SpectralField::zeros(4);
        v.a[1] = 1.0;
        v.b[2] = 1.0;
        let want = libm::sqrt(PI * (2.0 + libm::pow(2.0, 0.5) + 1.0));
        assert!((norm_x(&v, 0.25) - want).abs() < 1e-12);
    }

    #[test]
    fn gagliardo_part_basics() {
        let c = SpectralField::constant(5.0, 4);
        assert_eq!(gagliardo_part(&c, 0.4), 0.0);
        let u = SpectralField::cosine(3, 1.0, 4);
        assert!((gagliardo_part(&u, 0.4) - PI * libm::pow(3.0, 0.8)).abs() < 1e-12);
    }

    #[test]
    fn l2_norm_never_exceeds_x_norm() {
        let mut rng = Rng::new(23);
        for _ in 0..20 {
            let mut u = SpectralField::zeros(8);
            u.a[0] = rng.normal();
            for j in 1..=8 {
                u.a[j] = rng.normal();
                u.b[j] = rng.normal();
            }
            let s = rng.range(0.05, 0.95);
            assert!(l2_norm(&u) <= norm_x(&u, s) + 1e-12);
        }
    }

    #[test]
    fn inner_product_symmetric_bilinear_positive() {
        let mut rng = Rng::new(31);
        for _ in 0..20 {
            let mut u = SpectralField::zeros(6);
            let mut v = SpectralField::zeros(6);
            let mut w = SpectralField::zeros(6);
            u.a[0] = rng.normal();
            v.a[0] = rng.normal();
            w.a[0] = rng.normal();
            for j in 1..=6 {
                u.a[j] = rng.normal();
                u.b[j] = rng.normal();
                v.a[j] = rng.normal();
                v.b[j] = rng.normal();
                w.a[j] = rng.normal();
                w.b[j] = rng.normal();
            }
            let s = rng.range(0.1, 0.9);
            let uv = inner_product_x(&u, &v, s);
            let vu = inner_product_x(&v, &u, s);
            assert!((uv - vu).abs() <= 1e-12 * uv.abs().max(1.0));
            // Bilinearity in the first slot.
            let alpha = rng.normal();
            let mut lin = u.clone();
            lin.scale(alpha);
            lin.add_scaled(1.0, &w);
            let lhs = inner_product_x(&lin, &v, s);
            let rhs = alpha * uv + inner_product_x(&w, &v, s);
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
            // Positivity.
            assert!(norm_x_squared(&u, s) > 0.0);
        }
    }
}
