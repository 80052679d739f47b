//! Cyclotomic building blocks in the variable `X = gamma - 1`, and
//! valuations of integer polynomials at `zeta_{p^n} - 1`.
//!
//! Everything here lives in `Z_p[[X]]`. The `Z_p[Delta]` factor of the full
//! Iwasawa algebra has no role in the computed formulas and is not modelled.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::resultant::resultant;
use crate::scalars::{ord_p, ExtRational, Prime};

/// `Phi_{p^n}(1 + X) = sum_{t < p} (1 + X)^(p^(n-1) t)`, for `n >= 1`.
///
/// Monic, degree `p^(n-1)(p-1)`, constant term `p`, Eisenstein at `p`.
pub fn phi(p: Prime, n: u32) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let step = p.get().pow(n - 1);
    let mut acc = IntPolynomial::zero();
    for t in 0..p.get() {
        acc = &acc + &IntPolynomial::one_plus_x_pow(step * t);
    }
    Ok(acc)
}

/// `omega_n(X) = (1 + X)^(p^n) - 1`.
pub fn omega(p: Prime, n: u32) -> IntPolynomial {
    &IntPolynomial::one_plus_x_pow(p.get().pow(n)) - &IntPolynomial::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(m: u32) -> Self {
        if m.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// `omega_n^+` (product of `Phi_m(1+X)` over even `1 <= m <= n`) or
/// `omega_n^-` (odd `m`). The empty product is `1`.
pub fn omega_pm(p: Prime, n: u32, parity: Parity) -> IntPolynomial {
    (1..=n)
        .filter(|&m| Parity::of(m) == parity)
        .fold(IntPolynomial::one(), |acc, m| &acc * &phi(p, m).unwrap())
}

/// `prod_{1 <= i <= n} Phi_i(1 + X) = omega_n / X`.
pub fn phi_product(p: Prime, n: u32) -> IntPolynomial {
    (1..=n).fold(IntPolynomial::one(), |acc, m| &acc * &phi(p, m).unwrap())
}

/// `ord_p f(zeta_{p^n} - 1)`.
///
/// All Galois conjugates of `zeta_{p^n} - 1` have the same valuation, so the
/// value is `ord_p N(f(zeta - 1)) / (p^n - p^(n-1))`, and the norm is the
/// resultant `Res(Phi_n(1+X), f)`. Reducing `f` modulo `Phi_n(1+X)` (which
/// divides `omega_n`) first keeps degrees small; a zero remainder means `f`
/// vanishes at `zeta_{p^n} - 1` and the valuation is `inf`.
pub fn ord_at_zeta(f: &IntPolynomial, p: Prime, n: u32) -> Result<ExtRational> {
    let cyc = phi(p, n)?;
    ord_at_zeta_with(f, p, n, &cyc)
}

/// Same as [`ord_at_zeta`] with a precomputed `Phi_n(1+X)`.
pub fn ord_at_zeta_with(
    f: &IntPolynomial,
    p: Prime,
    n: u32,
    cyc: &IntPolynomial,
) -> Result<ExtRational> {
    let r = f.reduce_mod(cyc)?;
    if r.is_zero() {
        return Ok(ExtRational::Infinity);
    }
    let norm = resultant(cyc, &r)?;
    let degree = BigInt::from(p.totient_power(n));
    Ok(ord_p(&norm, p).scale(&BigRational::new(BigInt::one(), degree)))
}

/// `(1 + X)^(-k)` reduced modulo `Phi_m(1+X)`.
///
/// In `Z[X]/Phi_m(1+X)` the class of `1 + X` is a primitive `p^m`-th root
/// of unity, so its inverse powers are honest polynomials.
pub fn one_plus_x_inverse_pow_mod_phi(p: Prime, m: u32, k: u64) -> Result<IntPolynomial> {
    let cyc = phi(p, m)?;
    let order = p.get().pow(m);
    let e = (order - k % order) % order;
    IntPolynomial::one_plus_x_pow(e).reduce_mod(&cyc)
}

/// The monomial `prod X^(p^m - p^(m-1))` over `1 <= m <= n` of the given
/// parity, which `omega_pm(p, n, parity)` reduces to mod `p`.
pub fn omega_pm_mod_p_monomial(p: Prime, n: u32, parity: Parity) -> IntPolynomial {
    let deg: u64 = (1..=n)
        .filter(|&m| Parity::of(m) == parity)
        .map(|m| p.totient_power(m))
        .sum();
    IntPolynomial::monomial(BigInt::one(), deg as usize)
}

/// `deg(omega_{n-1}^+ mod p) + deg(omega_{n-1}^- mod p)`, which should be
/// `p^(n-1) - 1`. Needs `n >= 1`.
pub fn mod_p_dimension(p: Prime, n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let mut total = 0;
    for parity in [Parity::Even, Parity::Odd] {
        let reduced = omega_pm(p, n - 1, parity).mod_p(p);
        total += reduced.degree().ok_or(Error::ZeroPolynomial)? as u64;
    }
    Ok(total)
}
