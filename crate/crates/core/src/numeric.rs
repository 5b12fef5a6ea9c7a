//! Big-integer logarithms, exact rounding of rational powers and nearest-integer distances.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Natural logarithm of a positive big integer.
///
/// Uses the top 64 bits as a mantissa and the bit length as the binary exponent, so the
/// result keeps full `f64` relative precision for integers of any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero(), "ln of zero");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map_or(f64::NAN, |v| Float::ln(v as f64));
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    Float::ln(top as f64) + shift as f64 * core::f64::consts::LN_2
}

/// `ln |x|` for a nonzero big integer.
pub fn ln_abs(x: &BigInt) -> f64 {
    ln_biguint(x.magnitude())
}

/// `ln |x|` for a nonzero rational.
pub fn ln_ratio(x: &BigRational) -> f64 {
    ln_abs(x.numer()) - ln_abs(x.denom())
}

/// Number of decimal digits of `x` (at least 1), from the bit length; may overshoot by one.
pub fn decimal_digits(x: &BigUint) -> u64 {
    let bits = x.bits().max(1);
    (bits as f64 * core::f64::consts::LOG10_2).floor() as u64 + 1
}

/// Distance from `x` to the nearest integer, `‖x‖`, exactly.
pub fn dist_to_int(x: &BigRational) -> BigRational {
    let den = x.denom();
    let r = x.numer().mod_floor(den);
    let other = den - &r;
    BigRational::new(r.min(other), den.clone())
}

/// Nearest integer to `x`, halves rounded up.
pub fn round_ratio(x: &BigRational) -> BigInt {
    let two = BigInt::from(2u32);
    let num = x.numer() * &two + x.denom();
    num.div_floor(&(x.denom() * two))
}

/// Converts a rational to `f64`, falling back to logarithms when the parts overflow.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * Float::exp(ln_ratio(x))
}

/// A non-negative rational exponent `num/den` small enough for exact root-taking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmallExponent {
    pub num: u32,
    pub den: u32,
}

impl SmallExponent {
    pub fn from_ratio(x: &BigRational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::OutOfRange(alloc::format!("negative exponent {x}")));
        }
        let num = x.numer().to_u32();
        let den = x.denom().to_u32();
        match (num, den) {
            (Some(num), Some(den)) if den > 0 => Ok(Self { num, den }),
            _ => Err(Error::OutOfRange(alloc::format!("exponent {x} too large for exact roots"))),
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

/// Nearest integer to `base^(num/den)`, computed exactly.
///
/// `r = floor((base^num)^(1/den))`, then `r + 1` is chosen iff `(2r + 1)^den <= 2^den base^num`.
pub fn round_pow(base: &BigUint, exp: SmallExponent) -> BigUint {
    if exp.num == 0 {
        return BigUint::one();
    }
    let powered = base.pow(exp.num);
    if exp.den == 1 {
        return powered;
    }
    let root = powered.nth_root(exp.den);
    let lhs = (&root * 2u32 + 1u32).pow(exp.den);
    let rhs = powered << exp.den as usize;
    if lhs <= rhs {
        root + 1u32
    } else {
        root
    }
}

/// Nearest integer to `base^exp` with the result clamped to at least 1.
pub fn round_pow_at_least_one(base: &BigUint, exp: SmallExponent) -> BigUint {
    let r = round_pow(base, exp);
    if r.is_zero() {
        BigUint::one()
    } else {
        r
    }
}
