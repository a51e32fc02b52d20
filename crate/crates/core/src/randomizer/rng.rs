//! Seeding scheme.
//!
//! Every random quantity is drawn from a `ChaCha8Rng` (rand_chacha 0.9)
//! seeded through [`mix_seed`], a SplitMix64-based 64-bit mix. A frame's seed
//! is `mix_seed(master_seed, frame_index)`, so each frame is planned
//! independently of every other and generation order does not matter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type FrameRng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine two words into a well-distributed seed. Not symmetric.
#[inline]
pub fn mix_seed(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b ^ 0xD6E8_FEB8_6659_FD93))
}

pub fn frame_seed(master_seed: u64, frame_index: u64) -> u64 {
    mix_seed(master_seed, frame_index)
}

pub fn rng_from_seed(seed: u64) -> FrameRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_seed_gives_identical_stream() {
        let mut a = rng_from_seed(frame_seed(42, 0));
        let mut b = rng_from_seed(frame_seed(42, 0));
        for _ in 0..16 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn neighbouring_frames_get_distinct_seeds() {
        let seeds: std::collections::BTreeSet<u64> = (0..10_000).map(|i| frame_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(mix_seed(1, 2), mix_seed(2, 1));
    }

    #[test]
    fn frame_seed_is_pinned() {
        // Guards the documented mix against accidental change.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }
}
