use std::sync::atomic::{AtomicU64, Ordering};

use super::add::add_bits;
use super::Tc0Error;
use crate::kernel::{get_cell, numones, row_len, set_cell, BitSet, Table2D};

static BOUND_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of block-cap assertions exercised so far, process-wide. The
/// verification suites read it to confirm the caps were actually checked.
pub fn block_bound_checks() -> u64 {
    BOUND_CHECKS.load(Ordering::Relaxed)
}

/// Block decomposition record from a row summation: block width `ell`,
/// block count `k`, the `2k` block sums, and the even/odd concatenations
/// `low` and `high` whose values add up to the weighted row-length sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumPlan {
    pub n: u64,
    pub m: u64,
    pub ell: u32,
    pub k: u64,
    pub block_sums: Vec<u64>,
    pub low: BitSet,
    pub high: BitSet,
}

/// Flips a table: cell (i, j) of the result holds when cell (j, i) of `z`
/// does, for j < n, i < m.
pub fn transpose(n: u64, m: u64, z: &Table2D) -> Table2D {
    let mut out = Table2D::new();
    for j in 0..n {
        for i in 0..m {
            if get_cell(z, j, i) {
                set_cell(&mut out, i, j);
            }
        }
    }
    out
}

fn column_counts(n: u64, m: u64, z: &Table2D) -> Vec<u64> {
    (0..m)
        .map(|i| (0..n).filter(|&j| get_cell(z, j, i)).count() as u64)
        .collect()
}

fn tally_table(counts: &[u64]) -> Table2D {
    let mut out = Table2D::new();
    for (i, &c) in counts.iter().enumerate() {
        for v in 0..c {
            set_cell(&mut out, i as u64, v);
        }
    }
    out
}

/// Column tallies of an n-row table: row i of the result is `{0, .., c-1}`
/// where c counts the set bits in column i of `z`.
pub fn add_cols(n: u64, m: u64, z: &Table2D) -> Table2D {
    tally_table(&column_counts(n, m, z))
}

/// Block width for row bound n: `1 + ceil(log2 n)`, pinned to 1 for n <= 1.
pub(crate) fn block_width(n: u64) -> u32 {
    if n <= 1 {
        1
    } else {
        1 + (64 - (n - 1).leading_zeros())
    }
}

/// The long-string count behind a block value: segment j of the string
/// holds 2^j copies of a c_j-bit run inside stride-n slots, so one numones
/// over the whole string reads off the weighted sum of the counts.
fn ssum_counts(counts: &[u64], n: u64) -> u64 {
    let ell = counts.len() as u32;
    let mut y = BitSet::new();
    for (j, &c) in counts.iter().enumerate() {
        debug_assert!(c <= n);
        let copies = 1u64 << j;
        let start = (copies - 1) * n;
        for u in 0..copies {
            y.fill_range(start + u * n, start + u * n + c);
        }
    }
    numones(((1u64 << ell) - 1) * n, &y)
}

/// Weighted window sum over row lengths: the sum of `2^j * |row (a+j)|`
/// for j < ell, with ell = 0 degenerating to the single length `|row a|`.
/// Computed by counting the long string, not by arithmetic on the lengths.
pub fn ssum(w: &Table2D, a: u64, ell: u32) -> u64 {
    if ell == 0 {
        return row_len(a, w);
    }
    let counts: Vec<u64> = (0..u64::from(ell)).map(|j| row_len(a + j, w)).collect();
    let n = counts.iter().copied().max().unwrap().max(1);
    ssum_counts(&counts, n)
}

/// Caps on a block value, all consequences of every column count being at
/// most n. Shifts stay in range for any n that fits in memory.
fn assert_block_bounds(b: u64, n: u64, ell: u32) {
    BOUND_CHECKS.fetch_add(1, Ordering::Relaxed);
    let (bv, nv) = (u128::from(b), u128::from(n));
    assert!(
        bv < 1u128 << (2 * ell).min(127),
        "block sum {} breaks the 2^(2*ell) cap at ell={}",
        b,
        ell
    );
    assert!(bv < 4 * nv * nv, "block sum {} breaks the 4n^2 cap at n={}", b, n);
    assert!(
        bv < nv << ell,
        "block sum {} breaks the n*2^ell cap at n={}, ell={}",
        b,
        n,
        ell
    );
}

/// Shared block stage: collapse the m column counts into 2k block sums of
/// width ell, concatenate even blocks into `low` and odd blocks into
/// `high` (each block value sits at bit offset i*ell and spans at most
/// 2*ell bits), and finish with one string addition.
pub(crate) fn sum_blocks(m: u64, n: u64, counts: &[u64]) -> (BitSet, SumPlan) {
    let ell = block_width(n);
    let k = m.div_ceil(2 * u64::from(ell));
    let mut block_sums = Vec::with_capacity((2 * k) as usize);
    let mut low = BitSet::new();
    let mut high = BitSet::new();
    for i in 0..2 * k {
        let start = i * u64::from(ell);
        let window: Vec<u64> = (0..u64::from(ell))
            .map(|j| counts.get((start + j) as usize).copied().unwrap_or(0))
            .collect();
        let b = ssum_counts(&window, n);
        // degenerate n = 0 (no rows) uses the same clamp as block_width
        assert_block_bounds(b, n.max(1), ell);
        block_sums.push(b);
        let target = if i % 2 == 0 { &mut low } else { &mut high };
        target.insert_shifted(&BitSet::from_words(vec![b]), start);
    }
    let result = add_bits(&low, &high);
    let plan = SumPlan { n, m, ell, k, block_sums, low, high };
    (result, plan)
}

/// The weighted sum `2^i * |row i|` over i < m, by block decomposition.
/// Every row length must stay within the declared bound n.
pub fn sum_prime(m: u64, n: u64, w: &Table2D) -> Result<(BitSet, SumPlan), Tc0Error> {
    let counts: Vec<u64> = (0..m).map(|i| row_len(i, w)).collect();
    for (i, &c) in counts.iter().enumerate() {
        if c > n {
            return Err(Tc0Error::RowBound { index: i as u64, len: c, bound: n });
        }
    }
    Ok(sum_blocks(m, n, &counts))
}

/// Sum of the rows of an n-row, m-column table read as binary numbers:
/// column tallies followed by the block summation.
pub fn sum_rows(n: u64, m: u64, z: &Table2D) -> (BitSet, SumPlan) {
    let w = add_cols(n, m, z);
    sum_prime(m, n, &w).expect("column tallies stay within the row count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{random_bitset_varlen, row, seeded_rng, table_from_rows};
    use rand::Rng;

    fn value(x: &BitSet) -> u128 {
        x.iter().map(|i| 1u128 << i).sum()
    }

    fn from_rows(rows: &[&[u64]]) -> Table2D {
        table_from_rows(
            &rows
                .iter()
                .map(|r| BitSet::from_indices(r.iter().copied()))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn transpose_pinned() {
        let z = from_rows(&[&[0, 1], &[]]);
        let t = transpose(2, 2, &z);
        assert_eq!(row(0, &t), BitSet::from_indices([0]));
        assert_eq!(row(1, &t), BitSet::from_indices([0]));
        assert!(transpose(0, 0, &Table2D::new()).is_empty());
        let d = transpose(2, 2, &from_rows(&[&[0], &[1]]));
        assert_eq!(row(0, &d), BitSet::from_indices([0]));
        assert_eq!(row(1, &d), BitSet::from_indices([1]));
    }

    #[test]
    fn transpose_involutes() {
        let mut rng = seeded_rng(31);
        for _ in 0..20 {
            let rows: Vec<BitSet> = (0..5).map(|_| random_bitset_varlen(&mut rng, 7)).collect();
            let z = table_from_rows(&rows);
            assert_eq!(transpose(7, 5, &transpose(5, 7, &z)), z);
        }
    }

    #[test]
    fn add_cols_pinned() {
        let w = add_cols(2, 2, &from_rows(&[&[0], &[0]]));
        assert_eq!(row(0, &w), BitSet::from_indices([0, 1]));
        assert_eq!(row(1, &w), BitSet::new());
        assert!(add_cols(3, 4, &Table2D::new()).is_empty());
        let w = add_cols(3, 1, &from_rows(&[&[0], &[0], &[0]]));
        assert_eq!(row(0, &w), BitSet::from_indices([0, 1, 2]));
    }

    #[test]
    fn ssum_pinned() {
        let w = from_rows(&[&[0, 1], &[0]]);
        assert_eq!(ssum(&w, 0, 2), 4);
        assert_eq!(ssum(&w, 0, 0), 2);
        assert_eq!(ssum(&w, 1, 0), 1);
        assert_eq!(ssum(&Table2D::new(), 0, 3), 0);
    }

    #[test]
    fn ssum_recurrence_and_bound() {
        let mut rng = seeded_rng(32);
        for _ in 0..30 {
            let rows: Vec<BitSet> = (0..8)
                .map(|_| {
                    let c = rng.gen_range(0..6);
                    BitSet::from_indices(0..c)
                })
                .collect();
            let w = table_from_rows(&rows);
            for a in 0..4u64 {
                for ell in 1..4u32 {
                    let whole = ssum(&w, a, ell + 1);
                    let head = ssum(&w, a, ell);
                    let last = row_len(a + u64::from(ell), &w);
                    assert_eq!(whole, head + (1 << ell) * last);

                    let n = (0..u64::from(ell))
                        .map(|j| row_len(a + j, &w))
                        .max()
                        .unwrap()
                        .max(1);
                    assert!(head < n << ell);
                }
            }
        }
    }

    #[test]
    fn sum_prime_pinned() {
        let w = from_rows(&[&[0, 1], &[0]]);
        let (s, plan) = sum_prime(2, 2, &w).unwrap();
        assert_eq!(s, BitSet::from_indices([2]));
        assert_eq!(plan.ell, 2);
        assert_eq!(plan.k, 1);
        assert_eq!(plan.block_sums, vec![4, 0]);

        let (s, plan) = sum_prime(5, 3, &from_rows(&[&[0, 1, 2], &[], &[0, 1], &[0], &[0, 1, 2]]))
            .unwrap();
        assert_eq!(s, BitSet::from_indices([0, 1, 6]));
        assert_eq!(plan.block_sums, vec![11, 7]);

        let (s, _) = sum_prime(4, 3, &Table2D::new()).unwrap();
        assert!(s.is_empty());

        let err = sum_prime(1, 1, &from_rows(&[&[0, 1]]));
        assert_eq!(
            err,
            Err(Tc0Error::RowBound { index: 0, len: 2, bound: 1 })
        );
    }

    #[test]
    fn sum_prime_matches_oracle_and_plan_invariant() {
        let mut rng = seeded_rng(33);
        for _ in 0..40 {
            let m = rng.gen_range(0..12u64);
            let n = rng.gen_range(1..7u64);
            let counts: Vec<u64> = (0..m).map(|_| rng.gen_range(0..=n)).collect();
            let rows: Vec<BitSet> =
                counts.iter().map(|&c| BitSet::from_indices(0..c)).collect();
            let w = table_from_rows(&rows);
            let (s, plan) = sum_prime(m, n, &w).unwrap();

            let expect: u128 = counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (c as u128) << i)
                .sum();
            assert_eq!(value(&s), expect);

            let from_blocks: u128 = plan
                .block_sums
                .iter()
                .enumerate()
                .map(|(i, &b)| (b as u128) << (i as u32 * plan.ell))
                .sum();
            assert_eq!(value(&plan.low) + value(&plan.high), from_blocks);
            assert_eq!(from_blocks, expect);
        }
    }

    #[test]
    fn sum_rows_pinned() {
        let z = from_rows(&[&[0], &[0], &[1]]);
        let (s, _) = sum_rows(3, 2, &z);
        assert_eq!(s, BitSet::from_indices([2]));

        let x = BitSet::from_indices([0, 3, 4]);
        let (s, _) = sum_rows(1, 5, &table_from_rows(&[x.clone()]));
        assert_eq!(s, x);

        let (s, _) = sum_rows(0, 6, &Table2D::new());
        assert!(s.is_empty());
    }

    #[test]
    fn sum_rows_matches_oracle() {
        let mut rng = seeded_rng(34);
        for _ in 0..30 {
            let n = rng.gen_range(0..8u64);
            let m = rng.gen_range(1..10u64);
            let rows: Vec<BitSet> =
                (0..n).map(|_| random_bitset_varlen(&mut rng, m)).collect();
            let z = table_from_rows(&rows);
            let (s, _) = sum_rows(n, m, &z);
            let expect: u128 = rows.iter().map(|r| value(r)).sum();
            assert_eq!(value(&s), expect);
        }
    }

    #[test]
    fn row_append_law() {
        let mut rng = seeded_rng(35);
        for _ in 0..30 {
            let n = rng.gen_range(0..7u64);
            let m = rng.gen_range(1..9u64);
            let rows: Vec<BitSet> =
                (0..=n).map(|_| random_bitset_varlen(&mut rng, m)).collect();
            let z = table_from_rows(&rows);
            let (whole, _) = sum_rows(n + 1, m, &z);
            let (head, _) = sum_rows(n, m, &z);
            assert_eq!(whole, add_bits(&head, &row(n, &z)));
        }
    }
}
