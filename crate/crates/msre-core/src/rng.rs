//! Counter-based random number generation.
//!
//! Every draw is a pure function of a key built from
//! (master seed, stream tag, coordinates) and a counter. There is no
//! mutable generator state, so values are identical regardless of
//! evaluation order, caching or thread count — the property the disorder
//! transforms (shift, resample) and replica parallelism rely on.
//!
//! Mixing uses the splitmix64 finalizer, chained per absorbed word, which
//! is the usual recipe for keyed counter streams in Monte Carlo codes.

use crate::math;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream identifiers. Distinct tags keep the module streams disjoint:
/// Green's-function walkers can never perturb disorder draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    WhiteCell = 1,
    PoissonCount = 2,
    PoissonPoint = 3,
    BrownianStep = 4,
    LinearSlope = 5,
    RpsgPhase = 6,
    PeriodicCell = 7,
    Walk = 8,
    LocalInit = 9,
    Replica = 10,
    Test = 11,
}

/// An immutable key identifying one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Key(u64);

impl Key {
    pub fn new(seed: u64, stream: Stream) -> Self {
        Key(mix(seed ^ (stream as u64).wrapping_mul(GOLDEN)))
    }

    /// Fold one word into the key.
    #[inline]
    pub fn absorb(self, word: u64) -> Self {
        Key(mix(self.0.wrapping_add(GOLDEN) ^ word.wrapping_mul(GOLDEN)))
    }

    /// Fold a signed lattice coordinate into the key.
    #[inline]
    pub fn absorb_i64(self, word: i64) -> Self {
        self.absorb(word as u64)
    }

    /// Fold a whole vertex into the key.
    pub fn absorb_vertex(self, v: &[i64]) -> Self {
        let mut k = self.absorb(v.len() as u64);
        for &c in v {
            k = k.absorb_i64(c);
        }
        k
    }

    /// The `ctr`-th word of the stream.
    #[inline]
    pub fn word(self, ctr: u64) -> u64 {
        mix(self.0 ^ ctr.wrapping_mul(GOLDEN).wrapping_add(0x6a09_e667_f3bc_c909))
    }

    /// Uniform in (0, 1], 53 bits.
    #[inline]
    pub fn uniform(self, ctr: u64) -> f64 {
        ((self.word(ctr) >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard Gaussian via Box–Muller; one value per counter.
    #[inline]
    pub fn normal(self, ctr: u64) -> f64 {
        let u1 = self.uniform(2 * ctr);
        let u2 = self.uniform(2 * ctr + 1);
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * math::PI * u2)
    }

    /// Poisson(mean) count by Knuth's product method.
    ///
    /// Uses a variable number of uniforms from counters ≥ `ctr_base`;
    /// reserve a whole sub-stream for it.
    pub fn poisson(self, mean: f64, ctr_base: u64) -> u64 {
        debug_assert!(mean >= 0.0);
        if mean == 0.0 {
            return 0;
        }
        let limit = math::exp(-mean);
        let mut k = 0u64;
        let mut p = 1.0f64;
        loop {
            p *= self.uniform(ctr_base + k);
            if p < limit {
                return k;
            }
            k += 1;
        }
    }
}

/// A tiny stateful walker over a keyed stream, for Monte Carlo loops where
/// a counter-per-call interface would be clumsy. Still fully reproducible:
/// the sequence is `key.word(0), key.word(1), ...`.
#[derive(Debug, Clone)]
pub struct Counter {
    key: Key,
    ctr: u64,
}

impl Counter {
    pub fn new(key: Key) -> Self {
        Counter { key, ctr: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let w = self.key.word(self.ctr);
        self.ctr += 1;
        w
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * math::PI * u2)
    }

    /// Uniform index in `0..m`.
    #[inline]
    pub fn below(&mut self, m: u64) -> u64 {
        // Modulo bias is < 2^-50 for the small m used here.
        self.next_u64() % m
    }
}
