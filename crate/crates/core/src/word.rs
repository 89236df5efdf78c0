//! Unsigned machine words viewed as elements of the ring of integers
//! modulo `2^BITS`.
//!
//! The word-level linear algebra and the characteristic arithmetic are
//! written against [`RingWord`] so the same code runs at full 32-bit width
//! and at reduced widths, which makes exhaustive checks cheap.

use std::fmt::{Debug, LowerHex};
use std::hash::Hash;

use num_traits::{PrimInt, Unsigned, WrappingAdd, WrappingMul, WrappingNeg, WrappingSub};

pub trait RingWord:
    PrimInt
    + Unsigned
    + WrappingAdd
    + WrappingSub
    + WrappingMul
    + WrappingNeg
    + Hash
    + Debug
    + LowerHex
    + Default
    + Send
    + Sync
    + 'static
{
    const BITS: u32;

    /// Reduces a signed integer modulo `2^BITS`.
    fn from_i64_wrapping(v: i64) -> Self;

    fn low_bit(self) -> bool {
        self & Self::one() == Self::one()
    }

    /// 2-adic valuation; `BITS` for zero.
    fn valuation(self) -> u32 {
        if self.is_zero() {
            Self::BITS
        } else {
            self.trailing_zeros()
        }
    }

    fn msb() -> Self {
        Self::one() << (Self::BITS as usize - 1)
    }

    /// Multiplicative inverse of an odd element.
    fn inverse_odd(self) -> Option<Self> {
        if !self.low_bit() {
            return None;
        }
        // Newton iteration doubles the number of correct low bits.
        let two = Self::one() + Self::one();
        let mut x = self;
        for _ in 0..6 {
            x = x.wrapping_mul(&two.wrapping_sub(&self.wrapping_mul(&x)));
        }
        Some(x)
    }

    /// `2^k` reduced modulo `2^BITS` (zero when `k >= BITS`).
    fn pow2(k: u32) -> Self {
        if k >= Self::BITS {
            Self::zero()
        } else {
            Self::one() << k as usize
        }
    }
}

macro_rules! ring_word {
    ($($t:ty),*) => {$(
        impl RingWord for $t {
            const BITS: u32 = <$t>::BITS;
            fn from_i64_wrapping(v: i64) -> Self {
                v as $t
            }
        }
    )*};
}

ring_word!(u8, u16, u32, u64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_odd_words() {
        for a in (1u32..2000).step_by(2) {
            assert_eq!(a.wrapping_mul(a.inverse_odd().unwrap()), 1);
        }
        for a in (1u8..=255).step_by(2) {
            assert_eq!(a.wrapping_mul(a.inverse_odd().unwrap()), 1);
        }
        assert_eq!(
            0xdead_beef_u64.wrapping_mul(0xdead_beef_u64.inverse_odd().unwrap()),
            1
        );
        assert!(4u32.inverse_odd().is_none());
    }

    #[test]
    fn valuation_and_signed_reduction() {
        assert_eq!(0u32.valuation(), 32);
        assert_eq!(0x1000_0000u32.valuation(), 28);
        assert_eq!(u32::from_i64_wrapping(-4), 0xffff_fffc);
        assert_eq!(u8::from_i64_wrapping(-1), 0xff);
        assert_eq!(u16::msb(), 0x8000);
    }
}
