//! Bit gathering/scattering over qubit masks. Qubit `i` is bit `i`.

/// Packs the bits of `value` selected by `mask` into the low bits, keeping
/// their order.
#[inline]
pub fn extract(value: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut j = 0;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((value >> bit) & 1) << j;
        j += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`extract`]: spreads the low bits of `value` onto the positions
/// set in `mask`.
#[inline]
pub fn deposit(value: u64, mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    let mut j = 0;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= ((value >> j) & 1) << bit;
        j += 1;
        m &= m - 1;
    }
    out
}

/// Next larger integer with the same popcount (Gosper's hack).
#[inline]
pub fn next_same_popcount(v: u64) -> u64 {
    let c = v & v.wrapping_neg();
    let r = v.wrapping_add(c);
    (((r ^ v) >> 2) / c) | r
}
