use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bitset::BitSet;

/// All randomized suites draw from this generator so a seed fixes the
/// whole run.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform subset of `{0, .., max_len-1}` with independent bit density 1/2.
pub fn random_bitset(rng: &mut ChaCha8Rng, max_len: u64) -> BitSet {
    let mut s = BitSet::new();
    for i in 0..max_len {
        if rng.gen::<bool>() {
            s.insert(i);
        }
    }
    s
}

/// Random set whose length is itself uniform in `0..=max_len`.
pub fn random_bitset_varlen(rng: &mut ChaCha8Rng, max_len: u64) -> BitSet {
    let len = rng.gen_range(0..=max_len);
    random_bitset(rng, len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = seeded_rng(7);
        let mut b = seeded_rng(7);
        for _ in 0..10 {
            assert_eq!(random_bitset(&mut a, 100), random_bitset(&mut b, 100));
        }
    }
}
