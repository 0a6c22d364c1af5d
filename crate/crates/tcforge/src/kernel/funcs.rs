use super::bitset::BitSet;

/// Number of elements of `x` strictly below `z`.
pub fn numones(z: u64, x: &BitSet) -> u64 {
    x.count_below(z)
}

/// Predecessor: `pd(0) = 0`.
pub fn pd(x: u64) -> u64 {
    x.saturating_sub(1)
}

/// Least position below `|x|` where `x` and `y` differ, or `|x|` when they
/// agree on all of them.
pub fn fse(x: &BitSet, y: &BitSet) -> u64 {
    let len = x.len();
    for z in 0..len {
        if x.contains(z) != y.contains(z) {
            return z;
        }
    }
    len
}

/// Least `z < t` satisfying `pred`, or `t` when none does. `pred` is
/// called at most `t` times, in ascending order.
pub fn min_witness<F: FnMut(u64) -> bool>(mut pred: F, t: u64) -> u64 {
    for z in 0..t {
        if pred(z) {
            return z;
        }
    }
    t
}

/// The set `{ z < t : pred(z) }`. `pred` is called exactly `t` times, in
/// ascending order.
pub fn comprehend<F: FnMut(u64) -> bool>(mut pred: F, t: u64) -> BitSet {
    let mut out = BitSet::new();
    for z in 0..t {
        if pred(z) {
            out.insert(z);
        }
    }
    out
}
