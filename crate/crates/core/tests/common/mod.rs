//! Slow, independent reference computations used to check the library.
//!
//! Nothing here calls into the library's resultant, valuation or q-sequence
//! code; only the polynomial container and `Prime` are shared.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use ssiwasawa::{ExtRational, IntPolynomial, Prime};

/// Determinant by fraction-free Bareiss elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester-matrix resultant, rows of `f` on top.
pub fn sylvester_resultant(f: &IntPolynomial, g: &IntPolynomial) -> BigInt {
    let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
    let size = df + dg;
    if size == 0 {
        return BigInt::one();
    }
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for r in 0..dg {
        for (i, c) in f.coeffs().iter().rev().enumerate() {
            m[r][r + i] = c.clone();
        }
    }
    for r in 0..df {
        for (i, c) in g.coeffs().iter().rev().enumerate() {
            m[dg + r][r + i] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Plain schoolbook cyclotomic `Phi_{p^n}(1+X)` by expanding the sum of
/// binomial rows.
pub fn phi_oracle(p: u64, n: u32) -> IntPolynomial {
    let step = p.pow(n - 1);
    let deg = (step * (p - 1)) as usize;
    let mut c = vec![BigInt::zero(); deg + 1];
    for t in 0..p {
        let e = (step * t) as usize;
        let mut b = BigInt::one();
        for (k, slot) in c.iter_mut().enumerate().take(e + 1) {
            *slot += &b;
            b = b * BigInt::from(e - k) / BigInt::from(k + 1);
        }
    }
    IntPolynomial::from_coeffs(c)
}

/// Norm of `f(zeta - 1)` from `Q(zeta_{p^n})` as the determinant of the
/// multiplication-by-`f` matrix on `Z[X]/Phi_n(1+X)`.
pub fn norm_oracle(f: &IntPolynomial, p: u64, n: u32) -> BigInt {
    let cyc = phi_oracle(p, n);
    let d = cyc.degree().unwrap();
    // basis X^0..X^(d-1); reduce by the monic cyclotomic
    let reduce = |mut v: Vec<BigInt>| -> Vec<BigInt> {
        for top in (d..v.len()).rev() {
            let c = v[top].clone();
            if c.is_zero() {
                continue;
            }
            for (i, k) in cyc.coeffs().iter().enumerate() {
                v[top - d + i] -= &c * k;
            }
        }
        v.truncate(d);
        v.resize(d, BigInt::zero());
        v
    };
    let fr = reduce(f.coeffs().to_vec());
    let mut cols = Vec::with_capacity(d);
    let mut cur = fr;
    for _ in 0..d {
        cols.push(cur.clone());
        let mut shifted = vec![BigInt::zero()];
        shifted.extend(cur);
        cur = reduce(shifted);
    }
    let m: Vec<Vec<BigInt>> = (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect();
    bareiss_det(m)
}

/// `ord_p` by repeated division.
pub fn ord_oracle(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.abs();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// `ord_p f(zeta_{p^n} - 1)` through [`norm_oracle`].
pub fn ord_at_zeta_oracle(f: &IntPolynomial, p: u64, n: u32) -> ExtRational {
    match ord_oracle(&norm_oracle(f, p, n), p) {
        None => ExtRational::Infinity,
        Some(v) => ExtRational::Finite(BigRational::new(
            BigInt::from(v),
            BigInt::from(p.pow(n) - p.pow(n - 1)),
        )),
    }
}

/// `q_n` by literally summing the alternating series, in `i128`.
pub fn q_oracle(p: u64, n: u32, sharp: bool) -> i128 {
    let p = p as i128;
    let alt = |hi: i64, lo: i64| -> i128 {
        let mut s = 0i128;
        for (k, e) in (lo..=hi).rev().enumerate() {
            let t = p.pow(e as u32);
            s += if k % 2 == 0 { t } else { -t };
        }
        s
    };
    let n = n as i64;
    match (sharp, n % 2 == 1) {
        (true, true) => alt(n - 1, 1),
        (true, false) => alt(n, 1),
        (false, true) => alt(n, 0),
        (false, false) => alt(n - 1, 0),
    }
}

pub fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn big(k: i64) -> BigInt {
    BigInt::from(k)
}
