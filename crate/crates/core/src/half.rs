use std::fmt;

use serde::{Deserialize, Serialize};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Same parity (both integers or both half-odd).
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.0 - other.0) % 2 == 0
    }

    /// Integer value of `self - other`; panics if the parities differ.
    pub fn diff(self, other: HalfInt) -> i64 {
        assert!(self.same_parity(other), "parity mismatch: {self} - {other}");
        ((self.0 - other.0) / 2) as i64
    }

    /// `{-self, -self+1, ..., self}`.
    pub fn range_sym(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let t = self.0;
        (0..=t).map(move |k| HalfInt(2 * k - t))
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Accepts `7/2`, `3.5` and `4`.
impl std::str::FromStr for HalfInt {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::error::Error::Parse(format!("not a half-integer: {s:?}"));
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            return num.trim().parse::<i32>().map(HalfInt).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        let neg = int.starts_with('-');
        let whole: i32 = int.parse().map_err(|_| bad())?;
        let half = match frac.trim_end_matches('0') {
            "" => 0,
            "5" => 1,
            _ => return Err(bad()),
        };
        Ok(HalfInt(2 * whole + if neg { -half } else { half }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_display() {
        let l = HalfInt::from_twice(3);
        let ms: Vec<i32> = l.range_sym().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        assert_eq!(l.to_string(), "3/2");
        assert_eq!(HalfInt::int(2).to_string(), "2");
        assert_eq!(l.diff(HalfInt::from_twice(-1)), 2);
    }

    #[test]
    fn parsing() {
        for (s, t) in [("7/2", 7), ("3.5", 7), ("4", 8), ("4.0", 8), ("-0.5", -1), ("-1/2", -1), ("0", 0)] {
            assert_eq!(s.parse::<HalfInt>().unwrap().twice(), t, "{s}");
        }
        for s in ["", "1.25", "x", "3/4", "1.5.5"] {
            assert!(s.parse::<HalfInt>().is_err(), "{s}");
        }
    }
}
