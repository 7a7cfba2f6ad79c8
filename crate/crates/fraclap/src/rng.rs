//! Seeded RNG for the stochastic audit suites.
//!
//! The randomized checks (Rayleigh-quotient restarts, linking-geometry
//! sampling, the maximum-principle sweep) must replay bit-for-bit from a
//! caller-supplied seed on every platform, so the stream is a fixed SplitMix64
//! rather than an external generator whose output could shift across versions.

/// SplitMix64 stream. Passes BigCrush-level statistics for the modest sample
/// counts used here and needs no seeding ceremony: any u64 works, including 0.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Derive an independent stream for a named sub-experiment so suites can
    /// run in any order without perturbing each other's draws.
    pub fn fork(&self, tag: u64) -> Rng {
        let mut child = Rng::new(self.state ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        child.next_u64();
        child
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from [0, 1).
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box–Muller (the spare deviate is discarded so the
    /// stream position stays a simple function of the draw count).
    pub fn normal(&mut self) -> f64 {
        let u1 = loop {
            let u = self.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }
}
