//! Executable threshold arithmetic on bit sets: carry-based addition,
//! counting arrays, block-decomposition row summation, multiplication, and
//! the pigeonhole collision search.

mod add;
mod counting;
mod mul;
mod php;
mod sum;

pub use add::{add_bits, carry};
pub use counting::{
    check_numones_array, modm_array, multi_counting_arrays, numones_array, CountingArray,
};
pub use mul::{mul_bits, otimes, prefix, to_string_shift};
pub use php::{concat_rows, finite_union, php_collision, tot_numones, union};
pub(crate) use sum::block_width;
pub use sum::{add_cols, block_bound_checks, ssum, sum_prime, sum_rows, transpose, SumPlan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Tc0Error {
    #[error("modulus must be at least 2, got {0}")]
    Modulus(u64),
    #[error("row {index} has length {len}, over the declared bound {bound}")]
    RowBound { index: u64, len: u64, bound: u64 },
    #[error("pigeon {0} is not mapped to any hole")]
    Unmapped(u64),
}
