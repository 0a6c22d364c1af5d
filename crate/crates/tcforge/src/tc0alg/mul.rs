use super::sum::sum_blocks;
use crate::kernel::{pair, BitSet, Table2D};

/// School multiplication table: row y holds X shifted up by y when Y(y),
/// otherwise stays empty.
pub fn otimes(x: &BitSet, y: &BitSet) -> Table2D {
    let mut out = Table2D::new();
    for b in y.iter() {
        for a in x.iter() {
            out.insert(pair(b, a + b));
        }
    }
    out
}

/// Product of sets read as binary numbers: the row sum of the school
/// table. The column tallies are accumulated during the same traversal
/// that lays out the table's rows, then feed the shared block summation
/// with the largest tally as the row bound.
pub fn mul_bits(x: &BitSet, y: &BitSet) -> BitSet {
    if x.is_empty() || y.is_empty() {
        return BitSet::new();
    }
    let m = x.len() + y.len();
    let mut counts = vec![0u64; m as usize];
    for b in y.iter() {
        for a in x.iter() {
            counts[(a + b) as usize] += 1;
        }
    }
    let n = counts.iter().copied().max().unwrap().max(1);
    sum_blocks(m, n, &counts).0
}

/// The i low-order members: {j in X : j < i}.
pub fn prefix(x: &BitSet, i: u64) -> BitSet {
    x.below(i)
}

/// The bits of c shifted up by ell: {p + ell : bit p of c set}.
pub fn to_string_shift(c: u64, ell: u64) -> BitSet {
    let mut out = BitSet::new();
    out.insert_shifted(&BitSet::from_words(vec![c]), ell);
    out
}
