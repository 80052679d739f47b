//! The 2x2 matrices `A`, `C_i`, `H_n` and their completed variants.
//!
//! ```text
//! A   = ( a_p  1 )     C_i = (  a_p            1 )
//!       ( -1   0 )           ( -Phi_i(1+X)     0 )
//!
//! H_n = -C_1 ... C_n A^{-1}   (n > 0),    H_0 = -A^{-1}
//! ```
//!
//! Products are taken left to right in exactly this order. Writing
//! `H_n = (w#_n, Phi_n w#_{n-1}; wb_n, Phi_n wb_{n-1})` defines the
//! sharp/flat column entries extracted by [`extract_columns`].

use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::cyclotomic::{one_plus_x_inverse_pow_mod_phi, phi, phi_product};
use crate::error::{Error, Result};
use crate::poly::{IntPolynomial, PolynomialJson};
use crate::scalars::Prime;
use crate::series::TruncatedSeries;

/// A 2x2 matrix `(e11 e12; e21 e22)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2<T> {
    pub e11: T,
    pub e12: T,
    pub e21: T,
    pub e22: T,
}

impl<T> Mat2<T> {
    pub fn new(e11: T, e12: T, e21: T, e22: T) -> Self {
        Mat2 { e11, e12, e21, e22 }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Mat2<U> {
        Mat2::new(f(&self.e11), f(&self.e12), f(&self.e21), f(&self.e22))
    }

    pub fn try_map<U, E>(&self, mut f: impl FnMut(&T) -> std::result::Result<U, E>) -> std::result::Result<Mat2<U>, E> {
        Ok(Mat2::new(f(&self.e11)?, f(&self.e12)?, f(&self.e21)?, f(&self.e22)?))
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.e11, &self.e12, &self.e21, &self.e22]
    }

    pub fn left_column(&self) -> (&T, &T) {
        (&self.e11, &self.e21)
    }
}

impl<T> Mat2<T>
where
    for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T> + Neg<Output = T>,
{
    pub fn mul(&self, rhs: &Self) -> Self {
        Mat2::new(
            &(&self.e11 * &rhs.e11) + &(&self.e12 * &rhs.e21),
            &(&self.e11 * &rhs.e12) + &(&self.e12 * &rhs.e22),
            &(&self.e21 * &rhs.e11) + &(&self.e22 * &rhs.e21),
            &(&self.e21 * &rhs.e12) + &(&self.e22 * &rhs.e22),
        )
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    pub fn det(&self) -> T {
        let ad = &self.e11 * &self.e22;
        let bc = &self.e12 * &self.e21;
        &ad + &(-&bc)
    }
}

pub type PolyMatrix = Mat2<IntPolynomial>;

impl PolyMatrix {
    pub fn identity() -> Self {
        Mat2::new(
            IntPolynomial::one(),
            IntPolynomial::zero(),
            IntPolynomial::zero(),
            IntPolynomial::one(),
        )
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            e11: self.e11.to_json(),
            e12: self.e12.to_json(),
            e21: self.e21.to_json(),
            e22: self.e22.to_json(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MatrixJson {
    pub e11: PolynomialJson,
    pub e12: PolynomialJson,
    pub e21: PolynomialJson,
    pub e22: PolynomialJson,
}

fn constant(c: &BigInt) -> IntPolynomial {
    IntPolynomial::constant(c.clone())
}

pub fn build_a(a_p: &BigInt) -> PolyMatrix {
    Mat2::new(
        constant(a_p),
        IntPolynomial::one(),
        -IntPolynomial::one(),
        IntPolynomial::zero(),
    )
}

/// `A^{-1} = (0 -1; 1 a_p)`; `det A = 1`.
pub fn build_a_inv(a_p: &BigInt) -> PolyMatrix {
    Mat2::new(
        IntPolynomial::zero(),
        -IntPolynomial::one(),
        IntPolynomial::one(),
        constant(a_p),
    )
}

pub fn build_c(p: Prime, a_p: &BigInt, i: u32) -> Result<PolyMatrix> {
    Ok(Mat2::new(
        constant(a_p),
        IntPolynomial::one(),
        -phi(p, i)?,
        IntPolynomial::zero(),
    ))
}

/// `H_n = -C_1 ... C_n A^{-1}`, and `H_0 = -A^{-1} = (0 1; -1 -a_p)`.
pub fn build_hn(p: Prime, a_p: &BigInt, n: u32) -> PolyMatrix {
    let mut acc = PolyMatrix::identity();
    for i in 1..=n {
        acc = acc.mul(&build_c(p, a_p, i).unwrap());
    }
    acc.mul(&build_a_inv(a_p)).neg()
}

/// `true` when `|a_p| < 2 sqrt(p)`, the Hasse bound; outside it the
/// valuation `v = ord_p(a_p)` is no longer confined to `{1, inf}`.
pub fn within_weil_bound(p: Prime, a_p: &BigInt) -> bool {
    let a = a_p.abs();
    &a * &a < BigInt::from(4 * p.get())
}

/// The entries of `H_n = (w#_n, Phi_n w#_{n-1}; wb_n, Phi_n wb_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpFlatColumns {
    pub omega_sharp_n: IntPolynomial,
    pub omega_flat_n: IntPolynomial,
    pub omega_sharp_nminus1: IntPolynomial,
    pub omega_flat_nminus1: IntPolynomial,
}

pub fn extract_columns(h: &PolyMatrix, p: Prime, n: u32) -> Result<SharpFlatColumns> {
    let cyc = phi(p, n)?;
    let divide = |e: &IntPolynomial, which: &str| {
        e.div_exact(&cyc).map_err(|_| {
            Error::DivisibilityFailed(format!("Phi_{n}(1+X) does not divide the {which} entry of H_{n}"))
        })
    };
    Ok(SharpFlatColumns {
        omega_sharp_n: h.e11.clone(),
        omega_flat_n: h.e21.clone(),
        omega_sharp_nminus1: divide(&h.e12, "upper right")?,
        omega_flat_nminus1: divide(&h.e22, "lower right")?,
    })
}

impl SharpFlatColumns {
    pub fn reassemble(&self, p: Prime, n: u32) -> Result<PolyMatrix> {
        let cyc = phi(p, n)?;
        Ok(Mat2::new(
            self.omega_sharp_n.clone(),
            &cyc * &self.omega_sharp_nminus1,
            self.omega_flat_n.clone(),
            &cyc * &self.omega_flat_nminus1,
        ))
    }

    /// `w#_n wb_{n-1} - w#_{n-1} wb_n`.
    pub fn cross_difference(&self) -> IntPolynomial {
        &(&self.omega_sharp_n * &self.omega_flat_nminus1)
            - &(&self.omega_sharp_nminus1 * &self.omega_flat_n)
    }
}

/// Comparison of the column cross difference with `prod_{i<n} Phi_i(1+X)`
/// (forced by `det H_n`) and with `omega_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossDifferenceReport {
    pub n: u32,
    pub equals_phi_product: bool,
    pub equals_omega_nminus1: bool,
    /// `omega_{n-1} / difference`, when the difference divides it exactly.
    pub omega_over_difference: Option<String>,
}

pub fn cross_difference_report(cols: &SharpFlatColumns, p: Prime, n: u32) -> CrossDifferenceReport {
    let diff = cols.cross_difference();
    let omega_prev = crate::cyclotomic::omega(p, n - 1);
    let ratio = if diff.leading_coeff().is_some_and(|c| c.abs().is_one()) {
        omega_prev.div_exact(&diff).ok().map(|q| q.to_string())
    } else {
        None
    };
    CrossDifferenceReport {
        n,
        equals_phi_product: diff == phi_product(p, n - 1),
        equals_omega_nminus1: diff == omega_prev,
        omega_over_difference: ratio,
    }
}

/// Exponent `k_i = p^(i-1)(p-1)/2` of the unit `(1+X)^(-k_i)` in the completed
/// lower-left entry of `C_i`.
pub fn completion_exponent(p: Prime, i: u32) -> u64 {
    p.totient_power(i) / 2
}

/// `H^_n = -C^_1 ... C^_n A^{-1}` over truncated series mod `(p^N, X^D)`,
/// where `C^_i` has lower-left entry `-Phi_i(1+X) (1+X)^(-k_i)`.
pub fn build_completed_hn(
    p: Prime,
    a_p: &BigInt,
    n: u32,
    precision: u32,
    degree_cap: usize,
) -> Result<Mat2<TruncatedSeries>> {
    let lift = |f: &IntPolynomial| TruncatedSeries::from_polynomial(f, p, precision, degree_cap);
    let one_plus_x_inv = lift(&IntPolynomial::from_i64(&[1, 1])).inverse()?;
    let mut acc = PolyMatrix::identity().map(lift);
    for i in 1..=n {
        let unit = pow_series(&one_plus_x_inv, completion_exponent(p, i));
        let c = Mat2::new(
            lift(&constant(a_p)),
            lift(&IntPolynomial::one()),
            &lift(&-phi(p, i)?) * &unit,
            lift(&IntPolynomial::zero()),
        );
        acc = acc.mul(&c);
    }
    Ok(acc.mul(&build_a_inv(a_p).map(lift)).neg())
}

fn pow_series(base: &TruncatedSeries, mut e: u64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::one(base.prime(), base.precision(), base.degree_cap());
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// `H^_n` evaluated exactly in `Z[X]/Phi_m(1+X)`, i.e. at `zeta_{p^m} - 1`.
///
/// There `(1+X)^(-k)` is the polynomial `(1+X)^(p^m - k mod p^m)`, so no
/// truncation is involved. Entries are returned reduced modulo `Phi_m(1+X)`.
pub fn completed_hn_at_zeta(p: Prime, a_p: &BigInt, n: u32, m: u32) -> Result<PolyMatrix> {
    let cyc = phi(p, m)?;
    let reduce = |f: IntPolynomial| f.reduce_mod(&cyc);
    let mut acc = PolyMatrix::identity();
    for i in 1..=n {
        let unit = one_plus_x_inverse_pow_mod_phi(p, m, completion_exponent(p, i))?;
        let c = Mat2::new(
            constant(a_p),
            IntPolynomial::one(),
            reduce(&-phi(p, i)? * &unit)?,
            IntPolynomial::zero(),
        );
        acc = acc.mul(&c).try_map(|e| reduce(e.clone()))?;
    }
    acc.mul(&build_a_inv(a_p)).neg().try_map(|e| reduce(e.clone()))
}
