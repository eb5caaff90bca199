//! Random stream derivation.
//!
//! Every Monte Carlo sample owns an independent ChaCha8 stream whose seed is
//! a fixed 64-bit mix of the master seed and the sample index, so results do
//! not depend on how samples are scheduled across workers.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(mix64(index.wrapping_add(1))))
}

pub fn stream(master: u64, index: u64) -> Stream {
    Stream::seed_from_u64(derive_seed(master, index))
}

pub fn stream_from_seed(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}

/// Uniform integer in `[0, bound)` by rejection on the bit length of `bound`.
///
/// Panics if `bound` is zero.
pub fn uniform_biguint_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(bound.bits() > 0, "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let top_mask = if top_bits == 32 {
        u32::MAX
    } else {
        (1u32 << top_bits) - 1
    };
    let mut digits = vec![0u32; words];
    loop {
        for d in digits.iter_mut() {
            *d = rng.random();
        }
        digits[words - 1] &= top_mask;
        let candidate = BigUint::from_slice(&digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_index_and_master() {
        let a = derive_seed(1, 0);
        assert_ne!(a, derive_seed(1, 1));
        assert_ne!(a, derive_seed(2, 0));
        assert_eq!(a, derive_seed(1, 0));
    }

    #[test]
    fn biguint_below_is_roughly_uniform() {
        let mut rng = stream_from_seed(7);
        let bound = BigUint::from(6u32);
        let mut hist = [0usize; 6];
        for _ in 0..60_000 {
            let x = uniform_biguint_below(&mut rng, &bound);
            hist[x.to_u32_digits().first().copied().unwrap_or(0) as usize] += 1;
        }
        for h in hist {
            assert!((9_400..10_600).contains(&h), "{hist:?}");
        }
    }

    #[test]
    fn biguint_below_large_bound() {
        let mut rng = stream_from_seed(3);
        let bound = BigUint::from(1u8) << 100usize;
        let bound = bound + 17u32;
        for _ in 0..100 {
            assert!(uniform_biguint_below(&mut rng, &bound) < bound);
        }
    }
}
