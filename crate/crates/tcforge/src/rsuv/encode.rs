use num_bigint::BigUint;

use crate::kernel::BitSet;

/// The set-to-number bridge: X maps to the sum of 2^i over its members, so
/// member i of the set is bit i of the number.
pub fn encode_num(x: &BitSet) -> BigUint {
    let mut bytes = Vec::with_capacity(x.words().len() * 8);
    for w in x.words() {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

pub fn decode_num(a: &BigUint) -> BitSet {
    let bytes = a.to_bytes_le();
    let mut words = Vec::with_capacity(bytes.len().div_ceil(8));
    for chunk in bytes.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        words.push(u64::from_le_bytes(buf));
    }
    BitSet::from_words(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{random_bitset_varlen, seeded_rng};
    use crate::tc0alg::{add_bits, mul_bits};

    #[test]
    fn pinned_values() {
        assert_eq!(encode_num(&BitSet::from_indices([0, 2])), BigUint::from(5u32));
        assert_eq!(encode_num(&BitSet::new()), BigUint::from(0u32));
        assert_eq!(decode_num(&BigUint::from(6u32)), BitSet::from_indices([1, 2]));
        assert_eq!(decode_num(&BigUint::from(0u32)), BitSet::new());
    }

    #[test]
    fn roundtrips_exhaustively_small() {
        for v in 0u32..1 << 12 {
            let a = BigUint::from(v);
            assert_eq!(encode_num(&decode_num(&a)), a);
        }
    }

    #[test]
    fn roundtrips_random_wide() {
        let mut rng = seeded_rng(31);
        for _ in 0..50 {
            let x = random_bitset_varlen(&mut rng, 4096);
            assert_eq!(decode_num(&encode_num(&x)), x);
        }
    }

    #[test]
    fn encoding_is_an_arithmetic_homomorphism() {
        let mut rng = seeded_rng(32);
        for _ in 0..30 {
            let x = random_bitset_varlen(&mut rng, 200);
            let y = random_bitset_varlen(&mut rng, 200);
            assert_eq!(
                encode_num(&add_bits(&x, &y)),
                encode_num(&x) + encode_num(&y)
            );
            assert_eq!(
                encode_num(&mul_bits(&x, &y)),
                encode_num(&x) * encode_num(&y)
            );
        }
    }
}
