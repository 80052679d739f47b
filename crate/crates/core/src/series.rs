//! Truncated power series in `Z_p[[X]]`, known modulo `(p^N, X^D)`.
//!
//! Used only where inverses appear (the completed matrices) and for
//! user-supplied series. Exact integer polynomials are the default carrier
//! everywhere else.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclotomic::ord_at_zeta;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::scalars::{ord_p_int, ExtRational, Prime};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    p: Prime,
    precision: u32,
    degree_cap: usize,
    modulus: BigInt,
    /// Residues in `[0, p^N)`, exactly `degree_cap` of them.
    coeffs: Vec<BigInt>,
}

/// Valuation of a truncated series at a point, as far as its precision
/// can certify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum SeriesValuation {
    /// The valuation is exactly this value.
    Exact(ExtRational),
    /// Every lift of the series has valuation at least this bound.
    AtLeast(ExtRational),
}

impl TruncatedSeries {
    pub fn zero(p: Prime, precision: u32, degree_cap: usize) -> Self {
        assert!(precision >= 1 && degree_cap >= 1, "N and D must be positive");
        TruncatedSeries {
            p,
            precision,
            degree_cap,
            modulus: p.pow(precision),
            coeffs: vec![BigInt::zero(); degree_cap],
        }
    }

    pub fn one(p: Prime, precision: u32, degree_cap: usize) -> Self {
        let mut s = Self::zero(p, precision, degree_cap);
        s.coeffs[0] = BigInt::one();
        s
    }

    pub fn from_polynomial(f: &IntPolynomial, p: Prime, precision: u32, degree_cap: usize) -> Self {
        let mut s = Self::zero(p, precision, degree_cap);
        for (i, c) in f.coeffs().iter().take(degree_cap).enumerate() {
            s.coeffs[i] = c.mod_floor(&s.modulus);
        }
        s
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.precision != other.precision || self.degree_cap != other.degree_cap {
            return Err(Error::ParamMismatch(format!(
                "(p={}, N={}, D={}) vs (p={}, N={}, D={})",
                self.p, self.precision, self.degree_cap, other.p, other.precision, other.degree_cap
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = (&*a + b).mod_floor(&self.modulus);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let d = self.degree_cap;
        let mut acc = vec![BigInt::zero(); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..d - i].iter().enumerate() {
                acc[i + j] += a * b;
            }
        }
        let mut out = self.clone();
        for (slot, v) in out.coeffs.iter_mut().zip(acc) {
            *slot = v.mod_floor(&self.modulus);
        }
        Ok(out)
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = (-&*c).mod_floor(&self.modulus);
        }
        out
    }

    /// Multiplicative inverse modulo `(p^N, X^D)`; the constant term must be
    /// a unit mod `p`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let pb = self.p.to_bigint();
        if (c0 % &pb).is_zero() {
            return Err(Error::NonUnitConstant(c0.to_string()));
        }
        let inv0 = mod_inverse(c0, &self.modulus);
        let mut g = vec![BigInt::zero(); self.degree_cap];
        g[0] = inv0.clone();
        for k in 1..self.degree_cap {
            let mut s = BigInt::zero();
            for i in 1..=k {
                s += &self.coeffs[i] * &g[k - i];
            }
            g[k] = (-s * &inv0).mod_floor(&self.modulus);
        }
        let mut out = self.clone();
        out.coeffs = g;
        Ok(out)
    }

    /// Lift to an integer polynomial with coefficients in `(-p^N/2, p^N/2]`.
    pub fn lift(&self) -> IntPolynomial {
        let half = &self.modulus / 2;
        IntPolynomial::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| if c > &half { c - &self.modulus } else { c.clone() })
                .collect(),
        )
    }

    /// Minimal coefficient valuation among nonzero residues and its index.
    /// `None` when every residue is `0 mod p^N`.
    pub fn min_coeff_valuation(&self) -> Option<(u64, usize)> {
        let mut best: Option<(u64, usize)> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(v) = ord_p_int(c, self.p) {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, i));
                }
            }
        }
        best
    }

    /// `ord_p` of the series at `zeta_{p^m} - 1`, certified against the
    /// truncation.
    ///
    /// The unknown tail `sum_{i >= D} c_i X^i` has valuation at least
    /// `D / (p^m - p^(m-1))` there and coefficient errors are multiples of
    /// `p^N`, so any computed value below `min(N, D/(p^m - p^(m-1)))` is
    /// exact; otherwise only that lower bound is known.
    pub fn ord_at_zeta(&self, m: u32) -> Result<SeriesValuation> {
        let bound = self.certified_bound(m)?;
        let v = ord_at_zeta(&self.lift(), self.p, m)?;
        Ok(if v < bound {
            SeriesValuation::Exact(v)
        } else {
            SeriesValuation::AtLeast(bound)
        })
    }

    pub fn certified_bound(&self, m: u32) -> Result<ExtRational> {
        if m == 0 {
            return Err(Error::ZeroLevel);
        }
        let tail = BigRational::new(
            BigInt::from(self.degree_cap),
            BigInt::from(self.p.totient_power(m)),
        );
        Ok(ExtRational::from_integer(self.precision as i64).min(ExtRational::Finite(tail)))
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.checked_add(rhs).expect("series in different rings")
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.checked_add(&rhs.negate()).expect("series in different rings")
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.checked_mul(rhs).expect("series in different rings")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        self.negate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn inverse_of_one_plus_x() {
        let s = TruncatedSeries::from_polynomial(&IntPolynomial::from_i64(&[1, 1]), p3(), 5, 4);
        let inv = s.inverse().unwrap();
        let expected = TruncatedSeries::from_polynomial(&IntPolynomial::from_i64(&[1, -1, 1, -1]), p3(), 5, 4);
        assert_eq!(inv, expected);
        assert_eq!(inv.coeffs()[1], BigInt::from(242));
        assert_eq!(&s * &inv, TruncatedSeries::one(p3(), 5, 4));
    }

    #[test]
    fn inverse_of_one_is_one() {
        let one = TruncatedSeries::one(p3(), 7, 6);
        assert_eq!(one.inverse().unwrap(), one);
    }

    #[test]
    fn rejects_non_unit_constant() {
        let s = TruncatedSeries::from_polynomial(&IntPolynomial::from_i64(&[3, 1]), p3(), 5, 4);
        assert_eq!(s.inverse(), Err(Error::NonUnitConstant("3".into())));
    }

    #[test]
    fn mismatched_rings() {
        let a = TruncatedSeries::one(p3(), 5, 4);
        let b = TruncatedSeries::one(p3(), 6, 4);
        assert!(matches!(a.checked_mul(&b), Err(Error::ParamMismatch(_))));
    }

    #[test]
    fn lift_is_symmetric() {
        let s = TruncatedSeries::from_polynomial(&IntPolynomial::from_i64(&[-2, 5, 0]), p3(), 2, 3);
        assert_eq!(s.lift(), IntPolynomial::from_i64(&[-2, -4]));
    }

    #[test]
    fn certified_valuation() {
        // X at zeta_9 - 1 has valuation 1/6; D = 12 gives tail bound 2
        let x = TruncatedSeries::from_polynomial(&IntPolynomial::x(), p3(), 20, 12);
        assert_eq!(x.ord_at_zeta(2).unwrap(), SeriesValuation::Exact(ExtRational::ratio(1, 6)));
        let zero = TruncatedSeries::zero(p3(), 20, 12);
        assert_eq!(
            zero.ord_at_zeta(2).unwrap(),
            SeriesValuation::AtLeast(ExtRational::from_integer(2))
        );
        // p^5 is invisible at precision 3
        let p5 = TruncatedSeries::from_polynomial(&IntPolynomial::from_i64(&[243]), p3(), 3, 40);
        assert_eq!(
            p5.ord_at_zeta(1).unwrap(),
            SeriesValuation::AtLeast(ExtRational::from_integer(3))
        );
    }
}
