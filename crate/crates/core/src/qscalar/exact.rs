//! Exact Laurent polynomials in `s = q^{1/2}` with Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::QParam;
use crate::scalar::{czero, Real};

/// `re + i·im` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn int(n: i64) -> Self {
        GaussRational::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        GaussRational::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        Complex::new(T::from_ratio(&self.re), T::from_ratio(&self.im))
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        GaussRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

/// Finite sum `Σ c_k s^k` where `s = q^{1/2}`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    terms: BTreeMap<i32, GaussRational>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::default()
    }

    pub fn one() -> Self {
        ExactScalar::monomial(GaussRational::int(1), 0)
    }

    pub fn int(n: i64) -> Self {
        ExactScalar::monomial(GaussRational::int(n), 0)
    }

    pub fn monomial(c: GaussRational, s_exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(s_exp, c);
        }
        ExactScalar { terms }
    }

    /// `s^k = q^{k/2}`.
    pub fn s_pow(k: i32) -> Self {
        ExactScalar::monomial(GaussRational::int(1), k)
    }

    /// `q^n`.
    pub fn q_pow(n: i32) -> Self {
        ExactScalar::s_pow(2 * n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, s_exp: i32) -> GaussRational {
        self.terms.get(&s_exp).cloned().unwrap_or_else(|| GaussRational::int(0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn conj(&self) -> Self {
        ExactScalar { terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        let mut out = ExactScalar::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &(v * c));
        }
        out
    }

    fn add_term(&mut self, k: i32, c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&k) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ExactScalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Numeric value at the given deformation parameter.
    pub fn eval<T: Real>(&self, q: &QParam<T>) -> Complex<T> {
        let mut acc = czero::<T>();
        for (k, c) in &self.terms {
            acc = acc + c.to_complex::<T>() * q.spow(*k as i64);
        }
        acc
    }

    /// Largest coefficient magnitude bound `Σ |c_k|` (as f64), used for error estimates.
    pub fn coefficient_l1(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .values()
            .map(|c| c.re.abs().to_f64().unwrap_or(f64::INFINITY) + c.im.abs().to_f64().unwrap_or(f64::INFINITY))
            .sum()
    }
}

impl Add for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c);
        }
        out
    }
}

impl Sub for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let mut out = ExactScalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, &(ca * cb));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $f(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::int(n)
    }
}

impl From<GaussRational> for ExactScalar {
    fn from(c: GaussRational) -> Self {
        ExactScalar::monomial(c, 0)
    }
}

/// Canonical text form: `c * s^k` terms joined by ` + `, exponents ascending.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("{c} * s^{k}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The q-integer `[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}`.
pub fn q_int(n: i64) -> ExactScalar {
    let mut out = ExactScalar::zero();
    let m = n.abs();
    for i in 0..m {
        let e = 2 * (m - 1 - 2 * i);
        out.add_term(e as i32, &GaussRational::int(1));
    }
    if n < 0 {
        -out
    } else {
        out
    }
}

impl serde::Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[allow(dead_code)]
fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use qd::Quad;

    fn arb_gauss() -> impl Strategy<Value = GaussRational> {
        (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
            .prop_map(|(a, b, c, d)| GaussRational::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into())))
    }

    fn arb_exact() -> impl Strategy<Value = ExactScalar> {
        prop::collection::vec((-5i32..=5, arb_gauss()), 0..5).prop_map(|ts| {
            let mut x = ExactScalar::zero();
            for (k, c) in ts {
                x = &x + &ExactScalar::monomial(c, k);
            }
            x
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn ring_axioms(a in arb_exact(), b in arb_exact(), c in arb_exact()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
            prop_assert_eq!(&a * &ExactScalar::one(), a.clone());
            // canonical form: no stored zero
            prop_assert!((&a * &b).terms().all(|(_, c)| !c.is_zero()));
        }

        #[test]
        fn eval_is_ring_homomorphism(a in arb_exact(), b in arb_exact()) {
            let q = QParam::<Quad>::parse("0.7").unwrap();
            let lhs = (&a * &b).eval(&q);
            let rhs = a.eval(&q) * b.eval(&q);
            let scale = Quad::from_f64(1.0 + a.coefficient_l1() * b.coefficient_l1() * 10.0);
            let tol = scale * Quad::from_f64(2f64.powi(8 - 106));
            prop_assert!(crate::scalar::cabs(lhs - rhs) <= tol);
        }
    }

    #[test]
    fn q_int_values() {
        assert!(q_int(0).is_zero());
        assert_eq!(q_int(1), ExactScalar::one());
        assert_eq!(q_int(2), &ExactScalar::q_pow(1) + &ExactScalar::q_pow(-1));
        assert_eq!(q_int(-3), -q_int(3));
        // [n](q - q^{-1}) = q^n - q^{-n}
        for n in -8..=8 {
            let lhs = &q_int(n) * &(&ExactScalar::q_pow(1) - &ExactScalar::q_pow(-1));
            let rhs = &ExactScalar::q_pow(n as i32) - &ExactScalar::q_pow(-(n as i32));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn q_int_recursion() {
        for n in 1..20 {
            assert_eq!(&q_int(n) * &q_int(2), &q_int(n + 1) + &q_int(n - 1));
        }
    }

    #[test]
    fn q_int_three_at_half() {
        // (q^3 - q^-3)/(q - q^-1) at q = 1/2: (1/8 - 8)/(1/2 - 2) = 5.25
        let q = QParam::<Quad>::parse("0.5").unwrap();
        let v = q_int(3).eval(&q);
        assert!((v.re - Quad::from_f64(5.25)).abs() < Quad::from_f64(1e-30));
    }

    #[test]
    fn canonical_text() {
        let x = q_int(2);
        assert_eq!(x.to_string(), "1 * s^-2 + 1 * s^2");
        assert_eq!(ExactScalar::zero().to_string(), "0");
        let y = ExactScalar::monomial(GaussRational::new(BigRational::new(1.into(), 2.into()), BigRational::from_integer((-1).into())), 1);
        assert_eq!(y.to_string(), "(1/2 - 1i) * s^1");
    }
}
