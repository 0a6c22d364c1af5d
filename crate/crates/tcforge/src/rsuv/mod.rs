//! The number side of the two-sorted world: sets encoded as bignums, an
//! interpreter for the single-sorted shift-and-length vocabulary, bit
//! comprehension, counting arrays extracted from one multiplication, and
//! syntactic translations between the two languages.

pub mod countmul;
pub mod delta;
pub mod encode;
pub mod translate;

pub use countmul::count_via_mul;
pub use delta::{
    eval_delta, eval_delta_formula, open_lind_check, parse_delta, parse_delta_formula,
    DeltaEnv, DeltaError,
    DeltaFormula, DeltaParseError, DeltaTerm,
};
pub use encode::{decode_num, encode_num};
pub use translate::{flat_term, flat_translate, sharp_term, sharp_translate, TranslateError};

use num_bigint::BigUint;

/// The unique number below 2^|a| whose bit i agrees with the predicate for
/// every i below |a|.
pub fn bit_comprehension(pred: impl Fn(u64) -> bool, a: &BigUint) -> BigUint {
    let mut x = BigUint::from(0u32);
    for i in 0..a.bits() {
        if pred(i) {
            x.set_bit(i, true);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comprehension_pinned() {
        let a = BigUint::from(9u32);
        assert_eq!(bit_comprehension(|i| i % 2 == 0, &a), BigUint::from(5u32));
        assert_eq!(bit_comprehension(|_| false, &a), BigUint::from(0u32));
        let three_bits = BigUint::from(4u32);
        assert_eq!(bit_comprehension(|_| true, &three_bits), BigUint::from(7u32));
    }

    #[test]
    fn comprehension_stays_below_the_width() {
        let a = BigUint::from(100u32);
        let x = bit_comprehension(|_| true, &a);
        assert!(x < (BigUint::from(1u32) << a.bits()));
    }
}
