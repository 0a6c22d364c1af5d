/// The pairing function `<x,y> = (x+y)(x+y+1) + 2y`.
///
/// Its range is exactly the even codes with an even triangular remainder,
/// so decoding can reject non-codes. Panics on u64 overflow; use
/// [`checked_pair`] where inputs are untrusted.
pub fn pair(x: u64, y: u64) -> u64 {
    checked_pair(x, y).expect("pair code exceeds u64")
}

pub fn checked_pair(x: u64, y: u64) -> Option<u64> {
    let s = u128::from(x) + u128::from(y);
    let code = s.checked_mul(s + 1)?.checked_add(2 * u128::from(y))?;
    u64::try_from(code).ok()
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("{0} is not a pair code")]
pub struct NotAPairCode(pub u64);

/// Inverts [`pair`], rejecting values outside its range.
pub fn unpair(z: u64) -> Result<(u64, u64), NotAPairCode> {
    // s = x+y satisfies s(s+1) <= z, maximal such s via isqrt.
    let s = (isqrt(4 * u128::from(z) + 1) - 1) / 2;
    let r = u128::from(z) - s * (s + 1);
    if r % 2 != 0 || r / 2 > s {
        return Err(NotAPairCode(z));
    }
    let y = r / 2;
    Ok(((s - y) as u64, y as u64))
}

pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let shift = (128 - n.leading_zeros()).div_ceil(2);
    let mut x = 1u128 << shift;
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            return x;
        }
        x = y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_values() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 2), 16);
        assert_eq!(pair(2, 1), 14);
        assert_eq!(unpair(0), Ok((0, 0)));
        assert_eq!(unpair(16), Ok((1, 2)));
        assert_eq!(unpair(3), Err(NotAPairCode(3)));
    }

    #[test]
    fn all_codes_are_even() {
        for x in 0..40 {
            for y in 0..40 {
                assert_eq!(pair(x, y) % 2, 0);
            }
        }
    }

    #[test]
    fn roundtrip_and_injectivity() {
        let mut seen = std::collections::HashMap::new();
        for x in 0..60u64 {
            for y in 0..60u64 {
                let z = pair(x, y);
                assert_eq!(unpair(z), Ok((x, y)));
                assert!(seen.insert(z, (x, y)).is_none(), "collision at {}", z);
            }
        }
    }

    #[test]
    fn non_codes_rejected() {
        let codes: std::collections::HashSet<u64> =
            (0..200u64).flat_map(|x| (0..200).map(move |y| pair(x, y))).collect();
        for z in 0..10_000u64 {
            assert_eq!(unpair(z).is_ok(), codes.contains(&z), "z={}", z);
        }
    }

    #[test]
    fn isqrt_exact() {
        for n in 0..5_000u128 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={}", n);
        }
        let big = u128::from(u64::MAX);
        let r = isqrt(big * big);
        assert_eq!(r, big);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(checked_pair(u64::MAX, u64::MAX), None);
        assert_eq!(checked_pair(1 << 31, 1 << 31), None);
        assert!(checked_pair(1 << 30, 1 << 30).is_some());
    }
}
