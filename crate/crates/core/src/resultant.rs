//! Exact resultants over `Z[X]` by the subresultant pseudo-remainder sequence.
//!
//! Sign convention: `Res(f, g) = lc(f)^deg(g) * prod g(a)` over the roots `a`
//! of `f`, i.e. the determinant of the Sylvester matrix with the rows of `f`
//! on top. Downstream code only uses `|Res|` and its p-adic valuation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigInt> {
    let (mut a, mut b) = match (f.degree(), g.degree()) {
        (None, _) | (_, None) => return Err(Error::ZeroPolynomial),
        _ => (f.clone(), g.clone()),
    };
    let mut sign = BigInt::one();
    let (da0, db0) = (a.degree().unwrap(), b.degree().unwrap());
    if da0 < db0 {
        std::mem::swap(&mut a, &mut b);
        if da0 % 2 == 1 && db0 % 2 == 1 {
            sign = -sign;
        }
    }
    let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
    if db == 0 {
        return Ok(sign * num_traits::pow(b.coeff(0), da));
    }

    let ca = a.content();
    let cb = b.content();
    a = a.div_exact_scalar(&ca).unwrap();
    b = b.div_exact_scalar(&cb).unwrap();
    let t = num_traits::pow(ca, db) * num_traits::pow(cb, da);

    let mut g_ = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            sign = -sign;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        a = b;
        let divisor = &g_ * num_traits::pow(h.clone(), delta);
        b = r
            .div_exact_scalar(&divisor)
            .expect("subresultant division is exact");
        g_ = a.leading_coeff().unwrap().clone();
        // h <- h^(1 - delta) * g^delta
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g_.clone(), delta) / num_traits::pow(h, delta - 1)
        };
        let db = b.degree().unwrap();
        if db == 0 {
            let da = a.degree().unwrap();
            let lb = b.coeff(0);
            let last = if da == 0 {
                BigInt::one()
            } else {
                num_traits::pow(lb, da) / num_traits::pow(h, da - 1)
            };
            return Ok(sign * t * last);
        }
    }
}
