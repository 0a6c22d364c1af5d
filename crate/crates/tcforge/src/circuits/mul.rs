use std::collections::BTreeMap;

use crate::tc0alg::block_width;

use super::circuit::{Builder, Circuit, InputLayout};

/// Multiplier circuit over two n-bit inputs X and Y, producing the 2n
/// product bits. Built raw, from static worst-case tally heights, so the
/// gate schema is a function of n alone and depth is the same constant for
/// every n >= 2.
///
/// The shape follows the block plan used by the arithmetic routines:
/// partial-product columns are tallied with exact thresholds, the tallies
/// are regrouped into blocks of ell = 1 + ceil(log2 n) columns, three
/// carry-save rounds shrink every block to two summands, and two
/// carry-lookahead adders (one per block parity, then one final) produce
/// the product.
pub fn compile_mul(n: u64) -> Circuit {
    assert!(n >= 1, "width must be positive");
    let layout = InputLayout::new().with_str("X", n).with_str("Y", n);
    let mut b = Builder::raw(layout);
    if n == 1 {
        let x = b.input("X", 0);
        let y = b.input("Y", 0);
        let lo = b.and(vec![x, y]);
        let hi = b.lit_false();
        return b.finish(vec![lo, hi]).expect("fixed schema is well formed");
    }
    let m = 2 * n;

    // Column p tallies the partial products X(a) & Y(p-a), expressed in
    // binary. The top column 2n-1 has no splits and stays empty.
    let mut columns: Vec<BTreeMap<u32, usize>> = Vec::new();
    for p in 0..m {
        let mut items = Vec::new();
        for a in 0..n {
            if p >= a && p - a < n {
                let xa = b.input("X", a);
                let yb = b.input("Y", p - a);
                items.push(b.and(vec![xa, yb]));
            }
        }
        columns.push(count_to_bits(&mut b, &items));
    }

    let ell = u64::from(block_width(n));
    let cap = 2 * ell;
    let num_blocks = m.div_ceil(ell);
    let f = b.lit_false();
    let mut low = vec![f; m as usize];
    let mut high = vec![f; m as usize];
    for i in 0..num_blocks {
        // Column bits land at local weight j + q. Every block value stays
        // under 2^(2 ell), so cap overflows are constant false and dropped.
        let mut bucket: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for j in 0..ell {
            let p = i * ell + j;
            if p >= m {
                break;
            }
            for (&q, &g) in &columns[p as usize] {
                let pos = j + u64::from(q);
                if pos < cap {
                    bucket.entry(pos).or_default().push(g);
                }
            }
        }
        for _ in 0..3 {
            bucket = rebucket(&mut b, &bucket, cap);
        }
        for items in bucket.values() {
            assert!(items.len() <= 2, "three rounds leave two summands");
        }
        let mut row_a = vec![f; cap as usize];
        let mut row_b = vec![f; cap as usize];
        for (&pos, items) in &bucket {
            if let Some(&g) = items.first() {
                row_a[pos as usize] = g;
            }
            if let Some(&g) = items.get(1) {
                row_b[pos as usize] = g;
            }
        }
        let sum = add_rows(&mut b, &row_a, &row_b);
        // Same-parity blocks start 2 ell apart, so their 2 ell wide sums
        // never overlap within one target row. Bits past m are zero in
        // every run: the block's shifted value is at most the product.
        let target = if i % 2 == 0 { &mut low } else { &mut high };
        for (j, &g) in sum.iter().enumerate() {
            let pos = i * ell + j as u64;
            if pos < m {
                target[pos as usize] = g;
            }
        }
    }
    let outputs = add_rows(&mut b, &low, &high);
    b.finish(outputs).expect("fixed schema is well formed")
}

/// Binary digits of the number of true wires in `items`: exact thresholds
/// isolate each possible tally, and bit q ors the tallies with bit q set.
/// Keys run over 0..bitlen(len); empty input gives an empty map.
fn count_to_bits(b: &mut Builder, items: &[usize]) -> BTreeMap<u32, usize> {
    let h = items.len() as u64;
    let mut out = BTreeMap::new();
    if h == 0 {
        return out;
    }
    let mut at_least = Vec::new();
    for v in 1..=h + 1 {
        at_least.push(b.threshold(v, items.to_vec()));
    }
    let mut exact = Vec::new();
    for v in 1..=h as usize {
        let above = b.not(at_least[v]);
        exact.push(b.and(vec![at_least[v - 1], above]));
    }
    for q in 0..64 - h.leading_zeros() {
        let cs: Vec<usize> = (1..=h)
            .filter(|v| v >> q & 1 == 1)
            .map(|v| exact[v as usize - 1])
            .collect();
        out.insert(q, b.or(cs));
    }
    out
}

/// One carry-save round: each position's tally is re-expressed in binary
/// and its digits land at higher positions. Heights shrink from h to
/// bitlen(h).
fn rebucket(
    b: &mut Builder,
    bucket: &BTreeMap<u64, Vec<usize>>,
    cap: u64,
) -> BTreeMap<u64, Vec<usize>> {
    let mut next: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (&pos, items) in bucket {
        for (q, g) in count_to_bits(b, items) {
            let shifted = pos + u64::from(q);
            if shifted < cap {
                next.entry(shifted).or_default().push(g);
            }
        }
    }
    next
}

/// Carry-lookahead adder over two equal-width gate rows. The carry into
/// position i holds when some lower position generates and everything
/// between propagates. The carry out of the top position is discarded;
/// callers guarantee it is zero.
fn add_rows(b: &mut Builder, row_a: &[usize], row_b: &[usize]) -> Vec<usize> {
    assert_eq!(row_a.len(), row_b.len());
    let w = row_a.len();
    let mut gen = Vec::with_capacity(w);
    let mut prop = Vec::with_capacity(w);
    for j in 0..w {
        let (x, y) = (row_a[j], row_b[j]);
        gen.push(b.and(vec![x, y]));
        let nx = b.not(x);
        let ny = b.not(y);
        let only_x = b.and(vec![x, ny]);
        let only_y = b.and(vec![nx, y]);
        prop.push(b.or(vec![only_x, only_y]));
    }
    let mut out = Vec::with_capacity(w);
    for i in 0..w {
        let mut ways = Vec::new();
        for j in 0..i {
            let mut chain = vec![gen[j]];
            chain.extend_from_slice(&prop[j + 1..i]);
            ways.push(b.and(chain));
        }
        let carry = b.or(ways);
        out.push(parity3(b, row_a[i], row_b[i], carry));
    }
    out
}

/// Odd parity of three wires as an or of minterms.
fn parity3(b: &mut Builder, x: usize, y: usize, z: usize) -> usize {
    let nx = b.not(x);
    let ny = b.not(y);
    let nz = b.not(z);
    let m1 = b.and(vec![x, ny, nz]);
    let m2 = b.and(vec![nx, y, nz]);
    let m3 = b.and(vec![nx, ny, z]);
    let m4 = b.and(vec![x, y, z]);
    b.or(vec![m1, m2, m3, m4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::BitSet;
    use crate::logic::Assignment;
    use crate::tc0alg::mul_bits;

    fn mask_to_set(mask: u64) -> BitSet {
        let mut s = BitSet::new();
        for b in 0..64 {
            if mask >> b & 1 == 1 {
                s.insert(b);
            }
        }
        s
    }

    fn run(c: &Circuit, x: u64, y: u64) -> u64 {
        let env = Assignment::new()
            .with_str("X", mask_to_set(x))
            .with_str("Y", mask_to_set(y));
        let bits = c.eval(&env).unwrap();
        bits.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    #[test]
    fn three_times_three() {
        let c = compile_mul(2);
        let env = Assignment::new()
            .with_str("X", mask_to_set(0b11))
            .with_str("Y", mask_to_set(0b11));
        assert_eq!(c.eval(&env).unwrap(), vec![true, false, false, true]);
    }

    #[test]
    fn four_bit_example() {
        let c = compile_mul(4);
        assert_eq!(run(&c, 0b0011, 0b0010), 0b0110);
    }

    #[test]
    fn single_bit_multiplier() {
        let c = compile_mul(1);
        assert_eq!(c.outputs().len(), 2);
        assert_eq!(run(&c, 1, 1), 1);
        assert_eq!(run(&c, 1, 0), 0);
        assert_eq!(run(&c, 0, 1), 0);
    }

    #[test]
    fn exhaustive_small_widths() {
        for n in 1..=3u64 {
            let c = compile_mul(n);
            assert_eq!(c.outputs().len(), (2 * n) as usize);
            for x in 0..1u64 << n {
                for y in 0..1u64 << n {
                    assert_eq!(run(&c, x, y), x * y, "n={} {}*{}", n, x, y);
                    let want = mul_bits(&mask_to_set(x), &mask_to_set(y));
                    assert_eq!(mask_to_set(run(&c, x, y)), want);
                }
            }
        }
    }

    #[test]
    fn random_spot_checks_width_eight() {
        use rand::{Rng, SeedableRng};
        let c = compile_mul(8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x = rng.gen_range(0..256u64);
            let y = rng.gen_range(0..256u64);
            assert_eq!(run(&c, x, y), x * y, "{}*{}", x, y);
        }
    }

    #[test]
    fn depth_is_width_independent() {
        let d4 = compile_mul(4).metrics().depth;
        for n in [8u64, 16, 32] {
            assert_eq!(compile_mul(n).metrics().depth, d4, "n={}", n);
        }
    }
}
