//! Real scalar abstraction shared by every numeric routine in the crate.
//!
//! All linear algebra is written against [`Real`], so the same code runs in
//! `f64` for quick exploration and in double-double ([`qd::Quad`], 105-bit
//! significand) for the identity checks that need tolerances far below
//! `f64` roundoff.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{NumAssign, ToPrimitive, Zero};
use qd::Quad;

use crate::error::{Error, Result};

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + NumAssign
    + Neg<Output = Self>
    + 'static
{
    /// Significand width in bits.
    const MANTISSA_BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn abs(self) -> Self;
    fn epsilon() -> Self;

    /// Split into a leading `f64` and a correction term (zero for `f64`).
    fn to_parts(self) -> (f64, f64);
    fn from_parts(hi: f64, lo: f64) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn from_ratio(r: &BigRational) -> Self {
        let hi = r.to_f64().unwrap_or(f64::NAN);
        if !hi.is_finite() {
            return Self::from_f64(hi);
        }
        let rem = r - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
        let lo = rem.to_f64().unwrap_or(0.0);
        Self::from_parts(hi, lo)
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::one();
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn signum(self) -> Self {
        if self > Self::zero() {
            Self::one()
        } else if self < Self::zero() {
            -Self::one()
        } else {
            Self::zero()
        }
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 53;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn to_parts(self) -> (f64, f64) {
        (self, 0.0)
    }
    fn from_parts(hi: f64, lo: f64) -> Self {
        hi + lo
    }
}

impl Real for Quad {
    const MANTISSA_BITS: u32 = Quad::MANTISSA_DIGITS;

    fn from_f64(x: f64) -> Self {
        Quad::from_f64(x)
    }
    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
    fn sqrt(self) -> Self {
        if self.0 < 0.0 {
            return Quad::NAN;
        }
        Quad::sqrt(self)
    }
    fn exp(self) -> Self {
        Quad::exp(self)
    }
    fn ln(self) -> Self {
        Quad::ln(self)
    }
    fn abs(self) -> Self {
        Quad::abs(self)
    }
    fn epsilon() -> Self {
        Quad::EPSILON
    }
    fn to_parts(self) -> (f64, f64) {
        (self.0, self.1)
    }
    fn from_parts(hi: f64, lo: f64) -> Self {
        Quad::from_f64(hi).add_accurate(Quad::from_f64(lo))
    }
}

/// Squared modulus.
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Modulus.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    abs2(z).sqrt()
}

pub fn cre<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    // principal branch, non-negative real part
    let r = cabs(z);
    if r == T::zero() {
        return czero();
    }
    let two = T::from_f64(2.0);
    let re = ((r + z.re) / two).max(T::zero()).sqrt();
    let im = ((r - z.re) / two).max(T::zero()).sqrt();
    if z.im < T::zero() {
        Complex::new(re, -im)
    } else {
        Complex::new(re, im)
    }
}

/// Parse a decimal literal (`0.5`, `-1.25e-3`, `3/7`) exactly.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a decimal number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Parse a decimal literal straight into `T` without passing through `f64`.
pub fn real_from_str<T: Real>(text: &str) -> Result<T> {
    Ok(T::from_ratio(&parse_decimal(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        let r = parse_decimal("0.1").unwrap();
        assert_eq!(r, BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_decimal("-2.5e1").unwrap(), BigRational::from_integer((-25).into()));
        assert_eq!(parse_decimal("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("1/0").is_err());
    }

    #[test]
    fn quad_tenth_beats_f64() {
        let x: Quad = real_from_str("0.1").unwrap();
        let ten = Quad::from_f64(10.0);
        let err = (x * ten - Quad::ONE).abs();
        assert!(err < Quad::from_f64(1e-31), "{err:?}");
    }

    #[test]
    fn powi_negative() {
        let x = Quad::from_f64(0.5);
        assert_eq!(x.powi(-3), Quad::from_f64(8.0));
        assert_eq!(2.0f64.powi(0), 1.0);
    }

    #[test]
    fn csqrt_branch() {
        let z = csqrt(Complex::new(-3.0f64, 0.0));
        assert!((z.im - 3f64.sqrt()).abs() < 1e-15 && z.re.abs() < 1e-15);
        let w = csqrt(Complex::new(0.0f64, -2.0));
        assert!((w * w - Complex::new(0.0, -2.0)).norm() < 1e-14);
    }
}
