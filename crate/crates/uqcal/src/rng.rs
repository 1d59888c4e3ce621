//! Deterministic random streams for the synthetic generator and benchmark.
//!
//! All randomness flows through ChaCha12, a named counter-based stream
//! cipher RNG with a published specification, so streams reproduce
//! bit-for-bit across platforms. Uniform doubles take the top 53 bits of
//! each 64-bit word, mapped strictly inside (0, 1); Gaussian draws apply
//! the inverse-CDF transform to those uniforms.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::gaussian::standard_normal_quantile;

const TWO_POW_NEG_53: f64 = 1.0 / 9007199254740992.0;

/// A seeded ChaCha12 stream producing uniform and standard-normal doubles.
#[derive(Debug, Clone)]
pub struct SeededStream {
    rng: ChaCha12Rng,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw strictly inside (0, 1): (k + 0.5) * 2^-53 over the top
    /// 53 bits of the next word, so the inverse CDF is always finite.
    pub fn uniform_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    /// Uniform draw on [lo, hi).
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_open01()
    }

    /// Standard normal draw by inverse CDF of a uniform.
    pub fn standard_normal(&mut self) -> f64 {
        standard_normal_quantile(self.uniform_open01())
            .expect("uniform_open01 is strictly inside (0, 1)")
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// SplitMix64 finalizer.
fn splitmix64_mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable per-run seed: FNV-1a over (base seed, repeat index, dataset id)
/// little-endian bytes, finished with the SplitMix64 mixer.
///
/// Seeding by dataset id rather than position means adding datasets never
/// perturbs the streams of existing ones.
pub fn derive_seed(base_seed: u64, repeat: u64, dataset_id: &str) -> u64 {
    let mut h = FNV_OFFSET;
    h = fnv1a64(h, &base_seed.to_le_bytes());
    h = fnv1a64(h, &repeat.to_le_bytes());
    h = fnv1a64(h, dataset_id.as_bytes());
    splitmix64_mix(h)
}
