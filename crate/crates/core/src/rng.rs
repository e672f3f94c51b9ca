//! Seeded PRNG used for every reproducible draw in the artifact.
//!
//! SplitMix64 (Steele et al., the `splittable` mix function from Java 8's
//! SplittableRandom): a single 64-bit state advanced by the golden-gamma
//! constant, output finalized with two xor-shift multiplies. Chosen so the
//! synthetic token streams and parameter draws are reproducible from a
//! documented algorithm rather than a library's unstable internals.
//! Gaussians come from the Box-Muller transform over pairs of uniforms.

/// SplitMix64 generator. State advances by 0x9E3779B97F4A7C15 per draw.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derive an independent stream from a seed and a stream tag.
    pub fn derive(seed: u64, tag: u64) -> Self {
        let mut base = SplitMix64::new(seed);
        let a = base.next_u64();
        let mut tagger = SplitMix64::new(tag.wrapping_mul(0xA24BAED4963EE407));
        SplitMix64::new(a ^ tagger.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of mantissa.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller; draws two uniforms per sample.
    pub fn gaussian(&mut self) -> f64 {
        // u1 in (0,1] so the log is finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
