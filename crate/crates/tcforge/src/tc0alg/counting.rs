use super::Tc0Error;
use crate::kernel::{get_cell, pair, row, set_cell, BitSet, Table2D};

/// Table over cells `(z, y)` where `y` is the running count of a set: cell
/// `(z, y)` holds exactly when `numones(z, X) = y`, for `z` up to `|X|`.
pub type CountingArray = Table2D;

pub fn numones_array(x: &BitSet) -> CountingArray {
    let mut out = Table2D::new();
    let mut count = 0;
    for z in 0..=x.len() {
        set_cell(&mut out, z, count);
        if x.contains(z) {
            count += 1;
        }
    }
    out
}

/// Validates the counting-array conditions literally: exactly one count
/// value per position, zero at position zero, and the increment step at
/// every bit of `x`.
pub fn check_numones_array(x: &BitSet, y: &CountingArray) -> bool {
    let l = x.len();
    for z in 0..=l {
        let hits = (0..=l).filter(|&v| get_cell(y, z, v)).count();
        if hits != 1 {
            return false;
        }
    }
    if !get_cell(y, 0, 0) {
        return false;
    }
    for z in 0..l {
        for v in 0..=l {
            if get_cell(y, z, v) {
                let next = if x.contains(z) { v + 1 } else { v };
                if !get_cell(y, z + 1, next) {
                    return false;
                }
            }
        }
    }
    true
}

/// Running count modulo `m`: cell `(z, y)` holds when
/// `numones(z, X) = y (mod m)`, for `z` up to `|X|`.
pub fn modm_array(m: u64, x: &BitSet) -> Result<Table2D, Tc0Error> {
    if m < 2 {
        return Err(Tc0Error::Modulus(m));
    }
    let mut out = Table2D::new();
    let mut y = 0;
    for z in 0..=x.len() {
        set_cell(&mut out, z, y);
        if x.contains(z) {
            y = (y + 1) % m;
        }
    }
    Ok(out)
}

/// Counting arrays for rows `0..b` of `x`, all extracted from one counting
/// pass over the concatenation of the rows. Row `u` of the result, read as
/// a table, is the counting array for row `u` of `x`: its cells are pair
/// codes `(z, count)`.
pub fn multi_counting_arrays(b: u64, x: &Table2D) -> Table2D {
    let mut out = Table2D::new();
    if b == 0 {
        return out;
    }
    let rows: Vec<BitSet> = (0..b).map(|u| row(u, x)).collect();
    let w = rows.iter().map(|r| r.len()).max().unwrap().max(1);
    let mut big = BitSet::new();
    for (u, r) in rows.iter().enumerate() {
        for i in r.iter() {
            big.insert(u as u64 * w + i);
        }
    }
    // prefix[p] = numones(p, big), the single shared counting pass
    let mut prefix = Vec::with_capacity((b * w + 1) as usize);
    let mut c = 0u64;
    for p in 0..=b * w {
        prefix.push(c);
        if big.contains(p) {
            c += 1;
        }
    }
    for (u, r) in rows.iter().enumerate() {
        let u = u as u64;
        let base = prefix[(u * w) as usize];
        for z in 0..=r.len() {
            let count = prefix[(u * w + z) as usize] - base;
            set_cell(&mut out, u, pair(z, count));
        }
    }
    out
}
