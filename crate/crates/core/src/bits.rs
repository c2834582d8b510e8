//! Minimal-width binary helpers.

use num_bigint::BigUint;
use num_traits::PrimInt;

/// 1-based position of the most significant one-bit.
///
/// `bit_length(0)` is 1 so that a zero payload still occupies one bit of
/// the address. Zero is outside the injectivity guarantee of the hybrid
/// derivation: `0` and `1` share width 1 but `0` and `2` do not.
pub fn bit_length<T: PrimInt>(value: T) -> u32 {
    let width = (std::mem::size_of::<T>() * 8) as u32;
    (width - value.leading_zeros()).max(1)
}

/// `bit_length` for arbitrary-precision values.
pub fn bit_length_big(value: &BigUint) -> u32 {
    (value.bits() as u32).max(1)
}

/// XOR of the successive 64-bit chunks of `value`, least significant first.
pub fn xor_fold64(value: &BigUint) -> u64 {
    value.iter_u64_digits().fold(0, |acc, chunk| acc ^ chunk)
}

/// Low-order 64 bits of `value`.
pub fn low64(value: &BigUint) -> u64 {
    value.iter_u64_digits().next().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(bit_length(9_611_683_854_154_598u64), 54);
        assert_eq!(bit_length(1u8), 1);
        assert_eq!(bit_length(0u32), 1);
        assert_eq!(bit_length(u128::MAX), 128);
        assert_eq!(bit_length(-1i64 as u64), 64);
        assert_eq!(bit_length_big(&BigUint::from(0u8)), 1);
        assert_eq!(bit_length_big(&(BigUint::from(1u8) << 255u32)), 256);
    }

    #[test]
    fn folding() {
        let v = (BigUint::from(0xdead_beefu64) << 64u32) | BigUint::from(0xdead_beefu64);
        assert_eq!(xor_fold64(&v), 0);
        assert_eq!(low64(&v), 0xdead_beef);
        assert_eq!(xor_fold64(&BigUint::from(0u8)), 0);
        assert_eq!(xor_fold64(&BigUint::from(42u8)), 42);
    }
}
