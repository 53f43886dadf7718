//! Small integer helpers for fixed-width digit strings over cell levels.

/// Smallest `e` with `base^e >= x`.
pub fn ceil_log(base: u64, x: u64) -> u32 {
    assert!(base >= 2, "base must be at least 2");
    let mut e = 0;
    let mut p: u128 = 1;
    while p < x as u128 {
        p *= base as u128;
        e += 1;
    }
    e
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Writes `value` as `width` base-`radix` digits, most significant first.
///
/// Returns `None` when the value does not fit.
pub fn to_digits(mut value: u64, radix: u64, width: usize) -> Option<Vec<u8>> {
    let mut digits = vec![0u8; width];
    for d in digits.iter_mut().rev() {
        *d = (value % radix) as u8;
        value /= radix;
    }
    (value == 0).then_some(digits)
}

/// Reads most-significant-first digits back into an integer.
pub fn from_digits<I: IntoIterator<Item = u8>>(digits: I, radix: u64) -> u64 {
    digits.into_iter().fold(0u64, |acc, d| acc * radix + u64::from(d))
}
