//! Scalars in the deformation parameter: exact Laurent polynomials in `s = q^{1/2}`,
//! the fixed-`q` evaluation context, and tagged numeric values.

mod exact;

use std::fmt;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::BlockOperator;
use crate::scalar::{parse_decimal, Real};

pub use exact::{q_int, ExactScalar, GaussRational};

/// A deformation parameter `0 < q < 1` fixed at a given precision.
///
/// Keeps the decimal text it was parsed from so results can be keyed and
/// reported without a round trip through binary floating point.
#[derive(Clone, Debug)]
pub struct QParam<T> {
    text: String,
    exact: BigRational,
    q: T,
    s: T,
    bits: u32,
}

impl<T: Real> QParam<T> {
    /// Widest precision the backend can honour.
    pub fn max_bits() -> u32 {
        T::MANTISSA_BITS + 1
    }

    /// Parse at the backend's full precision.
    pub fn parse(text: &str) -> Result<Self> {
        Self::with_precision(text, Self::max_bits())
    }

    pub fn with_precision(text: &str, bits: u32) -> Result<Self> {
        let max = Self::max_bits();
        if bits > max || (bits < 64 && bits != max) {
            return Err(Error::InvalidPrecision { got: bits, max });
        }
        let exact = parse_decimal(text).map_err(|_| Error::InvalidQ(text.to_string()))?;
        if exact <= BigRational::zero() || exact >= BigRational::one() {
            return Err(Error::InvalidQ(text.trim().to_string()));
        }
        let q = T::from_ratio(&exact);
        Ok(QParam { text: text.trim().to_string(), exact, q, s: q.sqrt(), bits })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// `q^{1/2}`.
    pub fn s(&self) -> T {
        self.s
    }

    /// `s^k = q^{k/2}`.
    pub fn spow(&self, k: i64) -> T {
        self.s.powi(k as i32)
    }

    pub fn qpow(&self, n: i64) -> T {
        self.q.powi(n as i32)
    }

    /// `q^x` for real `x`.
    pub fn qpow_real(&self, x: T) -> T {
        (x * self.q.ln()).exp()
    }

    /// `[n]`, summed termwise so nothing cancels near `q = 1`.
    pub fn qint(&self, n: i64) -> T {
        let m = n.abs();
        let mut acc = T::zero();
        for i in 0..m {
            acc += self.qpow(m - 1 - 2 * i);
        }
        if n < 0 {
            -acc
        } else {
            acc
        }
    }

    /// `[n]` for half-integer `n = twice / 2`.
    pub fn qint_half(&self, twice: i64) -> T {
        debug_assert!(twice % 2 == 0, "q-integer of a half-odd argument");
        self.qint(twice / 2)
    }

    pub fn sqrt_qint(&self, n: i64) -> T {
        self.qint(n).sqrt()
    }

    /// `[x] = (q^x - q^{-x}) / (q - q^{-1})` for real `x`.
    pub fn qbracket_real(&self, x: T) -> T {
        let num = self.qpow_real(x) - self.qpow_real(-x);
        let den = self.q - T::one() / self.q;
        num / den
    }

    /// Evaluate an exact scalar and tag the result.
    pub fn eval(&self, x: &ExactScalar) -> NumScalar<T> {
        NumScalar::new(x.eval(self), self)
    }

    pub fn same_as(&self, other: &QParam<T>) -> bool {
        self.exact == other.exact && self.bits == other.bits
    }
}

impl<T> fmt::Display for QParam<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} ({} bits)", self.text, self.bits)
    }
}

/// Complex value computed at a specific `q` and precision.
#[derive(Clone, Debug, PartialEq)]
pub struct NumScalar<T> {
    pub value: Complex<T>,
    q: BigRational,
    bits: u32,
}

impl<T: Real> NumScalar<T> {
    pub fn new(value: Complex<T>, q: &QParam<T>) -> Self {
        NumScalar { value, q: q.exact.clone(), bits: q.bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.bits != other.bits {
            return Err(Error::ParameterMismatch(format!(
                "q={} ({} bits) vs q={} ({} bits)",
                self.q, self.bits, other.q, other.bits
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(NumScalar { value: self.value + other.value, q: self.q.clone(), bits: self.bits })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(NumScalar { value: self.value - other.value, q: self.q.clone(), bits: self.bits })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(NumScalar { value: self.value * other.value, q: self.q.clone(), bits: self.bits })
    }
}

impl<T: Real> fmt::Display for NumScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}i", self.value.re.to_f64(), self.value.im.to_f64())
    }
}

/// `[M] = (q^M - q^{-M}) / (q - q^{-1})` by spectral calculus on a self-adjoint `M`.
pub fn q_bracket_op<T: Real>(m: &BlockOperator<T>, q: &QParam<T>) -> Result<BlockOperator<T>> {
    m.hermitian_fn(|x| q.qbracket_real(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use qd::Quad;

    #[test]
    fn q_bracket_of_diagonal() {
        let q = QParam::<Quad>::parse("0.5").unwrap();
        let m = BlockOperator::diagonal_real(&[Quad::from_f64(2.0), Quad::from_f64(-4.0), Quad::zero(), Quad::ONE]);
        let b = q_bracket_op(&m, &q).unwrap();
        // [-4] = -(q^3 + q + q^-1 + q^-3) = -10.625 at q = 1/2
        let expect = [2.5, -10.625, 0.0, 1.0];
        for (i, e) in expect.iter().enumerate() {
            let got = b.get(i, i).re;
            assert!((got - Quad::from_f64(*e)).abs() < Quad::from_f64(1e-28), "{i}: {got:?}");
        }
        for n in -6i64..=6 {
            let d = BlockOperator::diagonal_real(&[Quad::from_f64(n as f64)]);
            let v = q_bracket_op(&d, &q).unwrap().get(0, 0).re;
            assert!((v - q.eval(&q_int(n)).value.re).abs() < Quad::from_f64(1e-26));
        }
        let mut bad = BlockOperator::<Quad>::zeros(2);
        bad = bad.add(&BlockOperator::from_triplets(2, vec![(0, 1, crate::scalar::cone())]));
        assert!(q_bracket_op(&bad, &q).is_err());
    }

    #[test]
    fn rejects_bad_q() {
        for t in ["0", "1", "1.0", "-0.5", "2", "nope"] {
            assert!(matches!(QParam::<Quad>::parse(t), Err(Error::InvalidQ(_))), "{t}");
        }
        assert!(QParam::<Quad>::with_precision("0.5", 32).is_err());
        assert!(QParam::<Quad>::with_precision("0.5", 128).is_err());
        assert!(QParam::<Quad>::with_precision("0.5", 64).is_ok());
    }

    #[test]
    fn eval_examples() {
        let q = QParam::<Quad>::parse("0.5").unwrap();
        let v = q.eval(&q_int(2)).value;
        assert!((v.re - Quad::from_f64(2.5)).abs() < Quad::from_f64(1e-30));
        assert!(q.eval(&ExactScalar::zero()).value.re.is_zero());
        let q4 = QParam::<Quad>::parse("0.25").unwrap();
        let s = q4.eval(&ExactScalar::s_pow(1)).value.re;
        assert!((s - Quad::from_f64(0.5)).abs() < Quad::from_f64(1e-31));
    }

    #[test]
    fn mixing_parameters_is_an_error() {
        let a = QParam::<Quad>::parse("0.5").unwrap();
        let b = QParam::<Quad>::parse("0.7").unwrap();
        let c = QParam::<Quad>::with_precision("0.5", 80).unwrap();
        let x = a.eval(&q_int(2));
        assert!(x.try_mul(&b.eval(&q_int(2))).is_err());
        assert!(x.try_add(&c.eval(&q_int(2))).is_err());
        assert!(x.try_sub(&a.eval(&q_int(3))).is_ok());
    }

    #[test]
    fn numeric_qint_matches_exact() {
        let q = QParam::<Quad>::parse("0.3").unwrap();
        for n in -12..=12 {
            let d = q.qint(n) - q.eval(&q_int(n)).value.re;
            assert!(d.abs() < Quad::from_f64(1e-25), "n = {n}");
            let r = q.qbracket_real(Quad::from_f64(n as f64)) - q.qint(n);
            assert!(r.abs() < Quad::from_f64(1e-25) * (Quad::ONE + q.qint(n).abs()), "n = {n}");
        }
    }
}
