use num_bigint::BigUint;

use super::encode::decode_num;
use crate::kernel::{set_cell, BitSet};
use crate::tc0alg::{mul_bits, CountingArray};

/// Builds the counting array for the bit set of `a` out of one bignum
/// multiplication. The bits of `a` are spread out with zero blocks of
/// length 1+|n| (n = |a|), the multiplier is a comb of n ones at the same
/// stride, and field t of the product then holds the tally of bits 0..=t,
/// which is exactly the running count at position t+1. No count is taken
/// directly; everything is read off the product.
pub fn count_via_mul(a: &BigUint) -> CountingArray {
    let mut out = CountingArray::new();
    set_cell(&mut out, 0, 0);
    let n = a.bits();
    if n == 0 {
        return out;
    }
    let x = decode_num(a);
    let stride = 2 + u64::from(64 - n.leading_zeros());
    let mut spread = BitSet::new();
    for i in x.iter() {
        spread.insert(i * stride);
    }
    let mut comb = BitSet::new();
    for j in 0..n {
        comb.insert(j * stride);
    }
    let product = mul_bits(&spread, &comb);
    // Field t occupies product bits [t*stride, (t+1)*stride); tallies stay
    // under 2^(stride-1), so fields never bleed into each other.
    for z in 1..=n {
        let base = (z - 1) * stride;
        let mut tally = 0u64;
        for u in 0..stride {
            if product.contains(base + u) {
                tally |= 1 << u;
            }
        }
        set_cell(&mut out, z, tally);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{get_cell, random_bitset_varlen, seeded_rng, set_cell, Table2D};
    use crate::rsuv::encode::encode_num;
    use crate::tc0alg::{check_numones_array, numones_array};

    fn cells(entries: &[(u64, u64)]) -> Table2D {
        let mut t = Table2D::new();
        for &(z, y) in entries {
            set_cell(&mut t, z, y);
        }
        t
    }

    #[test]
    fn pinned_arrays() {
        assert_eq!(
            count_via_mul(&BigUint::from(5u32)),
            cells(&[(0, 0), (1, 1), (2, 1), (3, 2)])
        );
        assert_eq!(count_via_mul(&BigUint::from(0u32)), cells(&[(0, 0)]));
        let full = count_via_mul(&BigUint::from(255u32));
        assert!(get_cell(&full, 8, 8));
    }

    #[test]
    fn matches_the_direct_array_on_random_inputs() {
        let mut rng = seeded_rng(33);
        for _ in 0..50 {
            let x = random_bitset_varlen(&mut rng, 256);
            let arr = count_via_mul(&encode_num(&x));
            assert_eq!(arr, numones_array(&x));
            assert!(check_numones_array(&x, &arr));
        }
    }
}
