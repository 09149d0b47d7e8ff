//! Portable counter-based random streams.
//!
//! Output `i` of a stream with key `k` is `mix64(k + (i + 1) * GAMMA)`, where
//! `mix64` is the SplitMix64 finalizer. Nothing depends on platform or
//! library versions, so a simulation seeded the same way produces the same
//! noise everywhere. Substreams are split off by hashing a label into the
//! parent key, which lets every Monte Carlo frame own an independent,
//! addressable stream.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare_normal: Option<u64>,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix64(seed), counter: 0, spare_normal: None }
    }

    /// Derives an independent child stream. The parent is not advanced.
    pub fn substream(&self, label: u64) -> Self {
        Self { key: mix64(self.key ^ mix64(label.wrapping_add(GAMMA))), counter: 0, spare_normal: None }
    }

    /// Shorthand for a chain of [`substream`](Self::substream) calls.
    pub fn substream_path(&self, labels: &[u64]) -> Self {
        labels.iter().fold(self.clone(), |s, &l| s.substream(l))
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u64();
            let wide = u128::from(r) * u128::from(bound);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// Standard normal deviate via Box–Muller. Draws come in pairs; the sine
    /// branch is cached and returned by the next call.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(bits) = self.spare_normal.take() {
            return f64::from_bits(bits);
        }
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some((r * theta.sin()).to_bits());
        r * theta.cos()
    }
}
