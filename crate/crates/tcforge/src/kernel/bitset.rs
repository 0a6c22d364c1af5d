use std::fmt;
use std::str::FromStr;

const WORD_BITS: u64 = 64;

/// A finite set of naturals stored as a dense bit vector.
///
/// `len()` is one plus the largest element (0 for the empty set), matching
/// the string-length function `|X|` of the two-sorted language. Membership
/// queries past the length return `false` rather than failing.
///
/// Invariant: `words` has no trailing zero words, so structural equality
/// coincides with set equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new() -> Self {
        BitSet { words: Vec::new() }
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut s = BitSet::new();
        for i in iter {
            s.insert(i);
        }
        s
    }

    /// Elements are the positions of set bits, with bit 0 the least
    /// significant bit of `words[0]`.
    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        BitSet { words }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: u64) {
        let w = (i / WORD_BITS) as usize;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: u64) {
        let w = (i / WORD_BITS) as usize;
        if w < self.words.len() {
            self.words[w] &= !(1u64 << (i % WORD_BITS));
            self.trim();
        }
    }

    pub fn toggle(&mut self, i: u64) {
        if self.contains(i) {
            self.remove(i);
        } else {
            self.insert(i);
        }
    }

    pub fn contains(&self, i: u64) -> bool {
        let w = (i / WORD_BITS) as usize;
        w < self.words.len() && self.words[w] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// One plus the largest element; 0 for the empty set.
    pub fn len(&self) -> u64 {
        match self.words.last() {
            None => 0,
            Some(&w) => {
                self.words.len() as u64 * WORD_BITS - u64::from(w.leading_zeros())
            }
        }
    }

    pub fn max(&self) -> Option<u64> {
        if self.is_empty() {
            None
        } else {
            Some(self.len() - 1)
        }
    }

    /// Number of elements.
    pub fn card(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Number of elements strictly below `z`.
    pub fn count_below(&self, z: u64) -> u64 {
        let full = ((z / WORD_BITS) as usize).min(self.words.len());
        let mut n: u64 = self.words[..full].iter().map(|w| u64::from(w.count_ones())).sum();
        let rem = z % WORD_BITS;
        if rem > 0 && full < self.words.len() && (z / WORD_BITS) as usize == full {
            let mask = (1u64 << rem) - 1;
            n += u64::from((self.words[full] & mask).count_ones());
        }
        n
    }

    /// Elements strictly below `i`, as a new set.
    pub fn below(&self, i: u64) -> BitSet {
        let full = (i / WORD_BITS) as usize;
        if full >= self.words.len() {
            return self.clone();
        }
        let mut words = self.words[..full].to_vec();
        let rem = i % WORD_BITS;
        if rem > 0 {
            words.push(self.words[full] & ((1u64 << rem) - 1));
        }
        BitSet::from_words(words)
    }

    /// Least element not in the set.
    pub fn first_gap(&self) -> u64 {
        for (k, &w) in self.words.iter().enumerate() {
            if w != u64::MAX {
                return k as u64 * WORD_BITS + u64::from(w.trailing_ones());
            }
        }
        self.words.len() as u64 * WORD_BITS
    }

    /// Inserts every element of `other` shifted up by `shift`.
    pub fn insert_shifted(&mut self, other: &BitSet, shift: u64) {
        if other.is_empty() {
            return;
        }
        let word_shift = (shift / WORD_BITS) as usize;
        let bit_shift = shift % WORD_BITS;
        let needed = word_shift + other.words.len() + 1;
        if self.words.len() < needed {
            self.words.resize(needed, 0);
        }
        let mut carry = 0u64;
        for (k, &w) in other.words.iter().enumerate() {
            if bit_shift == 0 {
                self.words[word_shift + k] |= w;
            } else {
                self.words[word_shift + k] |= (w << bit_shift) | carry;
                carry = w >> (WORD_BITS - bit_shift);
            }
        }
        if carry != 0 {
            let k = word_shift + other.words.len();
            self.words[k] |= carry;
        }
        self.trim();
    }

    /// Sets every index in `[from, to)`.
    pub fn fill_range(&mut self, from: u64, to: u64) {
        if from >= to {
            return;
        }
        let last_word = ((to - 1) / WORD_BITS) as usize;
        if self.words.len() <= last_word {
            self.words.resize(last_word + 1, 0);
        }
        let first_word = (from / WORD_BITS) as usize;
        if first_word == last_word {
            let lo = from % WORD_BITS;
            let hi = (to - 1) % WORD_BITS;
            self.words[first_word] |= (u64::MAX >> (WORD_BITS - 1 - hi)) & (u64::MAX << lo);
            return;
        }
        self.words[first_word] |= u64::MAX << (from % WORD_BITS);
        for w in &mut self.words[first_word + 1..last_word] {
            *w = u64::MAX;
        }
        let hi = (to - 1) % WORD_BITS;
        self.words[last_word] |= u64::MAX >> (WORD_BITS - 1 - hi);
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (k, &w) in short.words.iter().enumerate() {
            words[k] |= w;
        }
        BitSet { words }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let base = k as u64 * WORD_BITS;
            BitIter { word: w, base }
        })
    }
}

struct BitIter {
    word: u64,
    base: u64,
}

impl Iterator for BitIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if self.word == 0 {
            return None;
        }
        let tz = self.word.trailing_zeros();
        self.word &= self.word - 1;
        Some(self.base + u64::from(tz))
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseSetError {
    #[error("bit set must look like {{1,3,5}} or 0b1010, got {0:?}")]
    BadShape(String),
    #[error("bad element {0:?}: {1}")]
    BadElement(String, String),
    #[error("binary form may contain only 0 and 1, got {0:?}")]
    BadBinaryDigit(char),
}

impl FromStr for BitSet {
    type Err = ParseSetError;

    /// Accepts `{1,3,5}` (elements in any order) and `0b1010`
    /// (bit 0 rightmost).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(bits) = s.strip_prefix("0b") {
            let mut set = BitSet::new();
            let digits: Vec<char> = bits.chars().filter(|c| *c != '_').collect();
            for (k, c) in digits.iter().rev().enumerate() {
                match c {
                    '0' => {}
                    '1' => set.insert(k as u64),
                    other => return Err(ParseSetError::BadBinaryDigit(*other)),
                }
            }
            return Ok(set);
        }
        let inner = s
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| ParseSetError::BadShape(s.to_string()))?;
        let mut set = BitSet::new();
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                if inner.trim().is_empty() {
                    break;
                }
                return Err(ParseSetError::BadShape(s.to_string()));
            }
            let i: u64 = part
                .parse()
                .map_err(|e: std::num::ParseIntError| {
                    ParseSetError::BadElement(part.to_string(), e.to_string())
                })?;
            set.insert(i);
        }
        Ok(set)
    }
}

/// Formats a set as a binary numeral, bit 0 rightmost. The empty set
/// prints as `0b0`.
pub fn format_binary(s: &BitSet) -> String {
    let len = s.len();
    if len == 0 {
        return "0b0".to_string();
    }
    let mut out = String::with_capacity(len as usize + 2);
    out.push_str("0b");
    for i in (0..len).rev() {
        out.push(if s.contains(i) { '1' } else { '0' });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn len_is_one_plus_max() {
        assert_eq!(BitSet::new().len(), 0);
        assert_eq!(BitSet::from_indices([0]).len(), 1);
        assert_eq!(BitSet::from_indices([5, 9]).len(), 10);
        assert_eq!(BitSet::from_indices([63]).len(), 64);
        assert_eq!(BitSet::from_indices([64]).len(), 65);
    }

    #[test]
    fn membership_past_length_is_false() {
        let s = BitSet::from_indices([1, 2]);
        assert!(!s.contains(3));
        assert!(!s.contains(1_000_000));
    }

    #[test]
    fn removal_trims_and_preserves_equality() {
        let mut s = BitSet::from_indices([1, 200]);
        s.remove(200);
        assert_eq!(s, BitSet::from_indices([1]));
        assert_eq!(s.words().len(), 1);
    }

    #[test]
    fn count_below_matches_naive() {
        let s = BitSet::from_indices([0, 3, 64, 65, 130]);
        for z in 0..200 {
            let naive = s.iter().filter(|&i| i < z).count() as u64;
            assert_eq!(s.count_below(z), naive, "z={}", z);
        }
    }

    #[test]
    fn fill_range_matches_loop() {
        for (from, to) in [(0, 0), (0, 1), (3, 70), (64, 128), (60, 65), (1, 200)] {
            let mut a = BitSet::new();
            a.fill_range(from, to);
            let b = BitSet::from_indices(from..to);
            assert_eq!(a, b, "range {}..{}", from, to);
        }
    }

    #[test]
    fn insert_shifted_matches_loop() {
        let x = BitSet::from_indices([0, 5, 63, 64]);
        for shift in [0, 1, 63, 64, 65, 100] {
            let mut a = BitSet::new();
            a.insert_shifted(&x, shift);
            let b = BitSet::from_indices(x.iter().map(|i| i + shift));
            assert_eq!(a, b, "shift {}", shift);
        }
    }

    #[test]
    fn parse_and_format() {
        let s: BitSet = "{1,3,5}".parse().unwrap();
        assert_eq!(s, BitSet::from_indices([1, 3, 5]));
        assert_eq!(s.to_string(), "{1,3,5}");
        let b: BitSet = "0b1010".parse().unwrap();
        assert_eq!(b, BitSet::from_indices([1, 3]));
        assert_eq!(format_binary(&b), "0b1010");
        let e: BitSet = "{}".parse().unwrap();
        assert!(e.is_empty());
        assert_eq!(format_binary(&e), "0b0");
        assert!("{1,".parse::<BitSet>().is_err());
        assert!("0b12".parse::<BitSet>().is_err());
    }

    #[test]
    fn first_gap() {
        assert_eq!(BitSet::new().first_gap(), 0);
        assert_eq!(BitSet::from_indices([0, 1, 2]).first_gap(), 3);
        assert_eq!(BitSet::from_indices([1]).first_gap(), 0);
        assert_eq!(BitSet::from_indices(0..64).first_gap(), 64);
    }

    #[test]
    fn below_restricts() {
        let s = BitSet::from_indices([0, 2, 5, 70]);
        assert_eq!(s.below(3), BitSet::from_indices([0, 2]));
        assert_eq!(s.below(0), BitSet::new());
        assert_eq!(s.below(100), s);
    }
}
