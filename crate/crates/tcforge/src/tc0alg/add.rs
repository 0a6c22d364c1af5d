use crate::kernel::BitSet;

/// Carry into bit `i` of `X + Y`: some position below `i` generates a carry
/// and every position between it and `i` propagates one.
pub fn carry(i: u64, x: &BitSet, y: &BitSet) -> bool {
    // c is the carry into position j; the recurrence visits the witness
    // positions of the defining formula in order.
    let mut c = false;
    for j in 0..i {
        let (a, b) = (x.contains(j), y.contains(j));
        c = (a && b) || ((a ^ b) && c);
    }
    c
}

/// Addition of sets read as binary numbers: bit `i` of the result is
/// `X(i) XOR Y(i) XOR carry(i, X, Y)`.
pub fn add_bits(x: &BitSet, y: &BitSet) -> BitSet {
    let top = x.len().max(y.len()) + 1;
    let mut out = BitSet::new();
    let mut c = false;
    for i in 0..top {
        let (a, b) = (x.contains(i), y.contains(i));
        if a ^ b ^ c {
            out.insert(i);
        }
        c = (a && b) || ((a ^ b) && c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{random_bitset, seeded_rng};

    fn value(x: &BitSet) -> u128 {
        x.iter().map(|i| 1u128 << i).sum()
    }

    #[test]
    fn carry_pinned() {
        let one = BitSet::from_indices([0]);
        assert!(!carry(0, &one, &one));
        assert!(carry(1, &one, &one));
        let three = BitSet::from_indices([0, 1]);
        assert!(carry(2, &three, &one));
        assert!(!carry(1, &three, &BitSet::new()));
    }

    #[test]
    fn carry_matches_witness_form() {
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let x = random_bitset(&mut rng, 16);
            let y = random_bitset(&mut rng, 16);
            for i in 0..18 {
                let witnessed = (0..i).any(|j| {
                    x.contains(j)
                        && y.contains(j)
                        && (j + 1..i).all(|l| x.contains(l) ^ y.contains(l))
                });
                assert_eq!(carry(i, &x, &y), witnessed, "i={}", i);
            }
        }
    }

    #[test]
    fn add_pinned() {
        let y = BitSet::from_indices([1, 4]);
        assert_eq!(add_bits(&BitSet::new(), &y), y);
        assert_eq!(
            add_bits(&BitSet::from_indices([0, 1]), &BitSet::from_indices([0])),
            BitSet::from_indices([2])
        );
        assert_eq!(
            add_bits(&BitSet::from_indices([0, 2]), &BitSet::from_indices([1, 2])),
            BitSet::from_indices([0, 1, 3])
        );
    }

    #[test]
    fn add_matches_oracle_exhaustively() {
        for a in 0u64..64 {
            for b in 0u64..64 {
                let got = add_bits(&BitSet::from_words(vec![a]), &BitSet::from_words(vec![b]));
                assert_eq!(value(&got), u128::from(a + b), "{}+{}", a, b);
            }
        }
    }

    #[test]
    fn add_matches_oracle_random() {
        let mut rng = seeded_rng(12);
        for _ in 0..100 {
            let x = random_bitset(&mut rng, 120);
            let y = random_bitset(&mut rng, 120);
            assert_eq!(value(&add_bits(&x, &y)), value(&x) + value(&y));
        }
    }

    #[test]
    fn add_is_symmetric_and_associative() {
        let mut rng = seeded_rng(13);
        for _ in 0..100 {
            let x = random_bitset(&mut rng, 64);
            let y = random_bitset(&mut rng, 64);
            let z = random_bitset(&mut rng, 64);
            assert_eq!(add_bits(&x, &y), add_bits(&y, &x));
            assert_eq!(
                add_bits(&x, &add_bits(&y, &z)),
                add_bits(&add_bits(&x, &y), &z)
            );
        }
    }

    #[test]
    fn result_length_bound() {
        let mut rng = seeded_rng(14);
        for _ in 0..100 {
            let x = random_bitset(&mut rng, 40);
            let y = random_bitset(&mut rng, 40);
            assert!(add_bits(&x, &y).len() <= x.len().max(y.len()) + 1);
        }
    }
}
