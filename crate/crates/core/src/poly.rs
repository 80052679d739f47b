//! Dense univariate polynomials with arbitrary-precision integer coefficients.
//!
//! `IntPolynomial` stores coefficients in ascending degree order.
//! Invariant: the vector is empty (zero polynomial) or its last entry is nonzero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{ord_p_int, Prime};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The indeterminate `X`.
    pub fn x() -> Self {
        Self::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: BigInt, deg: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    /// From ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `(1 + X)^k` by the binomial theorem.
    pub fn one_plus_x_pow(k: u64) -> Self {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut c = BigInt::one();
        coeffs.push(c.clone());
        for i in 0..k {
            c = c * BigInt::from(k - i) / BigInt::from(i + 1);
            coeffs.push(c.clone());
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Coefficient of `X^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`; `None` if some coefficient
    /// is not divisible.
    pub fn div_exact_scalar(&self, c: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::from_coeffs(out))
    }

    /// Non-negative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Division with remainder by a divisor whose leading coefficient is
    /// `+-1`. Returns `(q, r)` with `self = q*g + r`, `deg r < deg g`.
    pub fn div_rem(&self, g: &Self) -> Result<(Self, Self)> {
        let lc = g.leading_coeff().ok_or(Error::ZeroPolynomial)?;
        if lc.abs() != BigInt::one() {
            return Err(Error::NonUnitLeading(lc.to_string()));
        }
        let dg = g.degree().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![BigInt::zero(); r.len() - dg];
        for i in (dg..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let t = &r[i] * lc; // lc = +-1, so multiplying divides
            for (j, gc) in g.coeffs.iter().enumerate() {
                r[i - dg + j] -= &t * gc;
            }
            q[i - dg] = t;
        }
        r.truncate(dg);
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    /// `self mod g` for a divisor with leading coefficient `+-1`.
    pub fn reduce_mod(&self, g: &Self) -> Result<Self> {
        self.div_rem(g).map(|(_, r)| r)
    }

    /// Quotient `self / g` if `g` divides `self` exactly (unit leading `g`).
    pub fn div_exact(&self, g: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(g)?;
        if !r.is_zero() {
            return Err(Error::DivisibilityFailed(format!(
                "remainder of degree {:?}",
                r.degree()
            )));
        }
        Ok(q)
    }

    /// Pseudo-remainder: `lc(g)^(deg f - deg g + 1) * f mod g`.
    pub fn pseudo_rem(&self, g: &Self) -> Self {
        let dg = g.degree().expect("pseudo-remainder by zero polynomial");
        let lc = g.leading_coeff().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dg {
            return self.clone();
        }
        for i in (dg..r.len()).rev() {
            let t = r[i].clone();
            for c in r[..i].iter_mut() {
                *c *= lc;
            }
            if !t.is_zero() {
                for (j, gc) in g.coeffs[..dg].iter().enumerate() {
                    r[i - dg + j] -= &t * gc;
                }
            }
            r[i] = BigInt::zero();
        }
        r.truncate(dg);
        Self::from_coeffs(r)
    }

    /// Coefficients reduced into `[0, p)`, i.e. the image in `F_p[X]`.
    pub fn mod_p(&self, p: Prime) -> Self {
        let pb = p.to_bigint();
        Self::from_coeffs(self.coeffs.iter().map(|c| c.mod_floor(&pb)).collect())
    }

    /// Minimal coefficient valuation and its first index; `None` for zero.
    pub fn min_coeff_valuation(&self, p: Prime) -> Option<(u64, usize)> {
        let mut best: Option<(u64, usize)> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(v) = ord_p_int(c, p) {
                if best.is_none_or(|(b, _)| v < b) {
                    best = Some((v, i));
                }
            }
        }
        best
    }

    /// Comma separated coefficients, low degree first.
    pub fn to_csv(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_json(&self) -> PolynomialJson {
        PolynomialJson {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            p_power: None,
        }
    }
}

/// Wire format `{"coeffs": ["c0", "c1", ...], "pPower": k}`; the optional
/// `pPower` multiplies the whole polynomial by `p^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub coeffs: Vec<String>,
    #[serde(rename = "pPower", default, skip_serializing_if = "Option::is_none")]
    pub p_power: Option<u32>,
}

impl PolynomialJson {
    pub fn to_polynomial(&self, p: Prime) -> Result<IntPolynomial> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| {
                BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let f = IntPolynomial::from_coeffs(coeffs);
        Ok(match self.p_power {
            Some(k) => f.scale(&p.pow(k)),
            None => f,
        })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}X", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}X^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i);
                let b = rhs.coeffs.get(i);
                match (a, b) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                }
            })
            .collect();
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &'a IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::from_coeffs(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        -&self
    }
}

impl Zero for IntPolynomial {
    fn zero() -> Self {
        IntPolynomial::zero()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for IntPolynomial {
    fn one() -> Self {
        IntPolynomial::one()
    }
}
