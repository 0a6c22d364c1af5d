use super::bitset::BitSet;
use super::pairing::{checked_pair, pair};

/// A two-dimensional table is a plain bit set holding pair codes:
/// cell (x, y) is set exactly when `pair(x, y)` is a member.
pub type Table2D = BitSet;

pub fn set_cell(t: &mut Table2D, x: u64, y: u64) {
    t.insert(pair(x, y));
}

pub fn get_cell(t: &Table2D, x: u64, y: u64) -> bool {
    match checked_pair(x, y) {
        Some(code) => t.contains(code),
        None => false,
    }
}

/// Least `i` with `pair(x, i) >= len`; row x of a table of that length has
/// all members below this.
fn row_cap(x: u64, len: u64) -> u64 {
    if len == 0 {
        return 0;
    }
    let (mut lo, mut hi) = (0u64, len);
    // pair(x, i) >= i, so i = len is certainly past the end.
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let past = match checked_pair(x, mid) {
            Some(code) => code >= len,
            None => true,
        };
        if past {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Row `x` of the table: `{ i : pair(x, i) ∈ t }`.
pub fn row(x: u64, t: &Table2D) -> BitSet {
    let cap = row_cap(x, t.len());
    let mut out = BitSet::new();
    for i in 0..cap {
        if t.contains(pair(x, i)) {
            out.insert(i);
        }
    }
    out
}

/// Length of row `x`, i.e. one plus its largest member.
pub fn row_len(x: u64, t: &Table2D) -> u64 {
    let cap = row_cap(x, t.len());
    for i in (0..cap).rev() {
        if t.contains(pair(x, i)) {
            return i + 1;
        }
    }
    0
}

/// Number of members of row `x` strictly below `z`.
pub fn row_count_below(x: u64, t: &Table2D, z: u64) -> u64 {
    let cap = row_cap(x, t.len()).min(z);
    (0..cap).filter(|&i| t.contains(pair(x, i))).count() as u64
}

pub fn table_from_rows(rows: &[BitSet]) -> Table2D {
    let mut t = BitSet::new();
    for (x, r) in rows.iter().enumerate() {
        for i in r.iter() {
            t.insert(pair(x as u64, i));
        }
    }
    t
}

/// Extracts rows `0..count`.
pub fn table_rows(t: &Table2D, count: u64) -> Vec<BitSet> {
    (0..count).map(|x| row(x, t)).collect()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseTableError {
    #[error("table must look like [{{0,1}};{{}};{{2}}], got {0:?}")]
    BadShape(String),
    #[error("row {0}: {1}")]
    BadRow(usize, super::bitset::ParseSetError),
}

/// Parses `[{0,1};{};{2}]` into a table plus its row count.
pub fn parse_table(s: &str) -> Result<(Table2D, u64), ParseTableError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| ParseTableError::BadShape(s.to_string()))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok((BitSet::new(), 0));
    }
    let mut rows = Vec::new();
    for (n, part) in inner.split(';').enumerate() {
        let set: BitSet = part
            .trim()
            .parse()
            .map_err(|e| ParseTableError::BadRow(n, e))?;
        rows.push(set);
    }
    Ok((table_from_rows(&rows), rows.len() as u64))
}

pub fn format_table(t: &Table2D, rows: u64) -> String {
    let parts: Vec<String> = (0..rows).map(|x| row(x, t).to_string()).collect();
    format!("[{}]", parts.join(";"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_extraction() {
        let t = BitSet::from_indices([pair(1, 2)]);
        assert_eq!(row(1, &t), BitSet::from_indices([2]));
        assert_eq!(row(0, &t), BitSet::new());
        assert_eq!(row(2, &t), BitSet::new());
    }

    #[test]
    fn rows_roundtrip() {
        let rows = vec![
            BitSet::from_indices([0, 3]),
            BitSet::new(),
            BitSet::from_indices([1]),
        ];
        let t = table_from_rows(&rows);
        for (x, r) in rows.iter().enumerate() {
            assert_eq!(&row(x as u64, &t), r);
        }
        assert_eq!(row_len(0, &t), 4);
        assert_eq!(row_len(1, &t), 0);
        assert_eq!(row_len(2, &t), 2);
        assert_eq!(row_count_below(0, &t, 3), 1);
        assert_eq!(row_count_below(0, &t, 4), 2);
    }

    #[test]
    fn text_roundtrip() {
        let (t, rows) = parse_table("[{0,1};{};{2}]").unwrap();
        assert_eq!(rows, 3);
        assert_eq!(format_table(&t, rows), "[{0,1};{};{2}]");
        let (e, zero) = parse_table("[]").unwrap();
        assert!(e.is_empty());
        assert_eq!(zero, 0);
        assert!(parse_table("{0}").is_err());
    }

    #[test]
    fn row_cap_is_tight() {
        for x in 0..20 {
            for len in [0u64, 1, 5, 17, 100, 1000] {
                let cap = row_cap(x, len);
                assert!(cap == 0 || pair(x, cap - 1) < len);
                assert!(checked_pair(x, cap).map_or(true, |c| c >= len));
            }
        }
    }
}
