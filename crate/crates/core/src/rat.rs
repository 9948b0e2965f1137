//! Exact rational scalars.
//!
//! [`Rat`] wraps an arbitrary-precision rational number. All arithmetic is
//! exact, values are always stored in lowest terms with a positive
//! denominator, and the serde representation is the decimal-free string
//! `"p"` or `"p/q"` so that JSON output never loses precision.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// The rational `n / d`. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "rational denominator must be nonzero");
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The integer `n` as a rational.
    pub fn int(n: i64) -> Self {
        Rat(BigRational::from(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The numerator of the reduced form (sign lives here).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// The denominator of the reduced form (always positive).
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The value as an `i64`, if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "cannot invert zero");
        Rat(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let n = BigInt::from_str(num).map_err(|_| format!("invalid numerator in {s:?}"))?;
        let d = match den {
            Some(d) => BigInt::from_str(d).map_err(|_| format!("invalid denominator in {s:?}"))?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for Rat {
    fn sub_assign(&mut self, rhs: Rat) {
        self.0 -= rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl MulAssign for Rat {
    fn mul_assign(&mut self, rhs: Rat) {
        self.0 *= rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Rat::new(6, -4), Rat::new(-3, 2));
        assert_eq!(Rat::new(6, -4).to_string(), "-3/2");
        assert_eq!(Rat::new(-10, -5), Rat::int(2));
    }

    #[test]
    fn displays_integers_without_denominator() {
        assert_eq!(Rat::int(0).to_string(), "0");
        assert_eq!(Rat::new(8, 4).to_string(), "2");
        assert_eq!(Rat::new(10, 21).to_string(), "10/21");
    }

    #[test]
    fn parses_both_forms() {
        assert_eq!("2/5".parse::<Rat>().unwrap(), Rat::new(2, 5));
        assert_eq!("-7".parse::<Rat>().unwrap(), Rat::int(-7));
        assert_eq!(" 121/21 ".parse::<Rat>().unwrap(), Rat::new(121, 21));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
        assert!("x/2".parse::<Rat>().is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Rat::new(1, 7);
        let b = Rat::new(2, 7);
        let c = Rat::new(1, 3);
        let d = Rat::new(2, 3);
        assert_eq!(&a + &b + &c + &d + Rat::one(), Rat::new(50, 21) + Rat::new(1, 21));
        assert_eq!(Rat::new(8, 7) + Rat::new(121, 21), Rat::new(145, 21));
        assert_eq!(Rat::new(1, 2) * Rat::new(2, 3), Rat::new(1, 3));
        assert_eq!(Rat::new(1, 2) / Rat::new(3, 4), Rat::new(2, 3));
        assert_eq!(-Rat::new(1, 2), Rat::new(-1, 2));
        assert_eq!(Rat::new(20, 9).recip(), Rat::new(9, 20));
    }

    #[test]
    fn comparisons_are_numeric() {
        assert!(Rat::new(10, 21) < Rat::new(1, 2));
        assert!(Rat::new(2, 5) < Rat::new(10, 21));
        assert!(Rat::int(1) > Rat::new(20, 21));
    }

    #[test]
    fn serde_round_trips_as_strings() {
        let v = vec![Rat::new(2, 5), Rat::int(-3), Rat::new(145, 21)];
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["2/5","-3","145/21"]"#);
        let back: Vec<Rat> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn integer_probes() {
        assert_eq!(Rat::new(10, 2).to_i64(), Some(5));
        assert_eq!(Rat::new(1, 2).to_i64(), None);
        assert!(Rat::new(4, 2).is_integer());
        assert!(Rat::new(-1, 3).is_negative());
        assert!(Rat::new(1, 3).is_positive());
    }
}
