//! Minimal signed fixed-point arithmetic on top of `BigInt`.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

/// Fractional bits.
const FRAC_BITS: u32 = 320;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn one() -> Self {
        Fixed(BigInt::from(1) << FRAC_BITS)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Fixed(BigInt::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let mantissa = if exponent == 0 {
            (bits & 0xf_ffff_ffff_ffff) << 1
        } else {
            (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
        };
        // x = mantissa * 2^(exponent - 1075)
        let shift = exponent - 1075 + FRAC_BITS as i64;
        let m = BigInt::from(mantissa) * sign;
        if shift >= 0 {
            Fixed(m << shift as u32)
        } else {
            Fixed(m >> (-shift) as u32)
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 significant bits before the final rounding.
        let bits = self.0.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.0 >> drop as u32).to_f64().unwrap();
        top * 2f64.powi((drop - FRAC_BITS as i64) as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn neg(&self) -> Self {
        Fixed(-&self.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Fixed(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Fixed(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Fixed((&self.0 * &other.0) >> FRAC_BITS)
    }

    pub fn div(&self, other: &Self) -> Self {
        Fixed((&self.0 << FRAC_BITS) / &other.0)
    }

    pub fn mul_u64(&self, n: u64) -> Self {
        Fixed(&self.0 * n)
    }

    pub fn div_u64(&self, n: u64) -> Self {
        Fixed(&self.0 / n)
    }

    pub fn halve(&self) -> Self {
        Fixed(&self.0 >> 1u32)
    }

    pub fn sqrt(&self) -> Self {
        assert!(
            self.0.sign() != Sign::Minus,
            "sqrt of negative fixed-point value"
        );
        Fixed((&self.0 << FRAC_BITS).sqrt())
    }

    pub fn abs(&self) -> Self {
        Fixed(self.0.abs())
    }

    /// pi from Machin's formula, 16 atan(1/5) - 4 atan(1/239).
    pub fn pi() -> Self {
        atan_inv(5).mul_u64(16).sub(&atan_inv(239).mul_u64(4))
    }
}

fn atan_inv(n: u64) -> Fixed {
    let n2 = n * n;
    let mut power = Fixed::one().div_u64(n);
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power = power.div_u64(n2);
        if power.is_zero() {
            break;
        }
        let term = power.div_u64(2 * k + 1);
        if k % 2 == 1 {
            sum = sum.sub(&term);
        } else {
            sum = sum.add(&term);
        }
        k += 1;
    }
    sum
}
