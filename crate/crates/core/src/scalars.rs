//! Exact scalars: odd primes, rationals extended by `+inf`, and p-adic
//! valuations of integers and rationals.
//!
//! Valuations are never floats. Cyclotomic valuations have denominators
//! `p^n - p^(n-1)` and are compared exactly.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An odd prime `p >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as an exact integer.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.to_bigint(), k as usize)
    }

    /// `p^n - p^(n-1)`, the degree of `Phi_n(1+X)`; requires `n >= 1`.
    pub fn totient_power(self, n: u32) -> u64 {
        assert!(n >= 1, "totient of p^0 is not a cyclotomic degree");
        let lower = self.0.pow(n - 1);
        lower * (self.0 - 1)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `k` with `p^k | x`, or `None` for `x = 0`.
pub fn ord_p_int(x: &BigInt, p: Prime) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let pb = p.to_bigint();
    let mut k = 0u64;
    let mut cur = x.abs();
    // strip large powers first so huge resultants do not cost one division per factor
    let mut chunk = vec![(pb.clone(), 1u64)];
    loop {
        let (last, e) = chunk.last().unwrap().clone();
        if e >= 64 {
            break;
        }
        let sq = &last * &last;
        if sq > cur {
            break;
        }
        chunk.push((sq, e * 2));
    }
    for (pw, e) in chunk.iter().rev() {
        loop {
            let (q, r) = cur.div_rem(pw);
            if !r.is_zero() {
                break;
            }
            cur = q;
            k += e;
        }
    }
    Some(k)
}

/// `ord_p(x)` as an extended rational: `inf` iff `x = 0`.
pub fn ord_p(x: &BigInt, p: Prime) -> ExtRational {
    match ord_p_int(x, p) {
        None => ExtRational::Infinity,
        Some(k) => ExtRational::from_integer(k as i64),
    }
}

/// `ord_p` of a rational number.
pub fn ord_p_rational(x: &BigRational, p: Prime) -> ExtRational {
    if x.is_zero() {
        return ExtRational::Infinity;
    }
    let num = ord_p_int(x.numer(), p).unwrap() as i64;
    let den = ord_p_int(x.denom(), p).unwrap() as i64;
    ExtRational::from_integer(num - den)
}

/// An exact rational number or `+inf`.
///
/// `(ExtRational, min, +)` is the tropical semiring: `inf` is the identity
/// for `min` and absorbs `+`; `0` is the identity for `+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    pub fn from_integer(k: i64) -> Self {
        ExtRational::Finite(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ExtRational::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinity => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    /// Multiply by a rational scalar. `inf` times a nonzero scalar stays
    /// `inf`; `inf * 0 = 0`.
    pub fn scale(&self, c: &BigRational) -> Self {
        match self {
            ExtRational::Finite(r) => ExtRational::Finite(r * c),
            ExtRational::Infinity if c.is_zero() => ExtRational::zero(),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    /// Integer value, if finite and integral.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            ExtRational::Finite(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|k| k.to_i64())
    }

    /// `p^(-k)` for `k >= 0`.
    pub fn inverse_prime_power(p: Prime, k: u32) -> Self {
        ExtRational::Finite(BigRational::new(BigInt::one(), p.pow(k)))
    }

    /// `p^e` for any integer exponent.
    pub fn prime_power(p: Prime, e: i64) -> Self {
        if e >= 0 {
            ExtRational::Finite(BigRational::from_integer(p.pow(e as u32)))
        } else {
            Self::inverse_prime_power(p, (-e) as u32)
        }
    }
}

impl Add for ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }
}

impl<'a> Add<&'a ExtRational> for &'a ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: &'a ExtRational) -> ExtRational {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinity => write!(f, "inf"),
            ExtRational::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    /// Accepts `"inf"`, `"num/den"` and plain integers.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtRational::Infinity);
        }
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
        };
        let r = match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                BigRational::new(parse(n)?, d)
            }
            None => BigRational::from_integer(parse(s)?),
        };
        Ok(ExtRational::Finite(r))
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: u64) -> Prime {
        Prime::new(k).unwrap()
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord_p(&BigInt::from(54), p(3)), ExtRational::from_integer(3));
        assert_eq!(ord_p(&BigInt::from(0), p(5)), ExtRational::Infinity);
        let x = BigInt::from(9 * 7i64.pow(4));
        assert_eq!(ord_p(&x, p(7)), ExtRational::from_integer(4));
    }

    #[test]
    fn ord_of_huge_power() {
        let x = p(3).pow(300) * BigInt::from(-7);
        assert_eq!(ord_p_int(&x, p(3)), Some(300));
    }

    #[test]
    fn rejects_bad_primes() {
        for bad in [0, 1, 2, 4, 9, 15] {
            assert_eq!(Prime::new(bad), Err(Error::InvalidPrime(bad)));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let a = ExtRational::ratio(1, 3);
        let b = ExtRational::ratio(1, 9);
        assert_eq!(a.clone().min(b.clone()), b);
        assert_eq!(ExtRational::Infinity + ExtRational::ratio(5, 2), ExtRational::Infinity);
        assert_eq!(a + ExtRational::ratio(1, 27), ExtRational::ratio(10, 27));
        assert_eq!(
            ExtRational::Infinity.min(ExtRational::ratio(2, 7)),
            ExtRational::ratio(2, 7)
        );
    }

    #[test]
    fn scale_handles_infinity() {
        let six = BigRational::from_integer(6.into());
        assert_eq!(ExtRational::ratio(1, 6).scale(&six), ExtRational::from_integer(1));
        assert_eq!(ExtRational::Infinity.scale(&six), ExtRational::Infinity);
    }

    #[test]
    fn string_form() {
        assert_eq!(ExtRational::ratio(2, 6).to_string(), "1/3");
        assert_eq!(ExtRational::from_integer(4).to_string(), "4/1");
        assert_eq!(ExtRational::Infinity.to_string(), "inf");
        assert_eq!("10/27".parse::<ExtRational>().unwrap(), ExtRational::ratio(10, 27));
        assert_eq!("inf".parse::<ExtRational>().unwrap(), ExtRational::Infinity);
        assert_eq!("-3".parse::<ExtRational>().unwrap(), ExtRational::from_integer(-3));
        assert!("1/0".parse::<ExtRational>().is_err());
        let json = serde_json::to_string(&vec![ExtRational::ratio(1, 3), ExtRational::Infinity]).unwrap();
        assert_eq!(json, r#"["1/3","inf"]"#);
    }

    #[test]
    fn ord_of_rationals() {
        let r = BigRational::new(BigInt::from(2), BigInt::from(27));
        assert_eq!(ord_p_rational(&r, p(3)), ExtRational::from_integer(-3));
    }
}
