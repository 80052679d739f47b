//! Valuation matrices and their min-plus product.
//!
//! The valuation matrix of `M(zeta_{p^n} - 1)` collects the entrywise
//! `ord_p`. Valuation matrices multiply in the tropical semiring
//! `(ExtRational, min, +)`; by the ultrametric inequality the valuation
//! matrix of a product is entrywise `>=` the min-plus product of the
//! factors' valuation matrices, with equality when no minimum is tied.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::{ord_at_zeta_with, phi};
use crate::error::{Error, Result};
use crate::matrix::{build_a_inv, build_c, build_hn, Mat2, PolyMatrix};
use crate::scalars::{ord_p, ExtRational, Prime};
use crate::series::{SeriesValuation, TruncatedSeries};

pub type ValuationMatrix = Mat2<ExtRational>;

impl ValuationMatrix {
    /// `(0 inf; inf 0)`, the two-sided identity of the min-plus product.
    pub fn tropical_identity() -> Self {
        Mat2::new(
            ExtRational::zero(),
            ExtRational::Infinity,
            ExtRational::Infinity,
            ExtRational::zero(),
        )
    }

    /// Entry `(i, j)` is `min_k V(i, k) + W(k, j)`.
    pub fn minplus_mul(&self, w: &ValuationMatrix) -> ValuationMatrix {
        let cell = |a: &ExtRational, b: &ExtRational, c: &ExtRational, d: &ExtRational| (a + b).min(c + d);
        Mat2::new(
            cell(&self.e11, &w.e11, &self.e12, &w.e21),
            cell(&self.e11, &w.e12, &self.e12, &w.e22),
            cell(&self.e21, &w.e11, &self.e22, &w.e21),
            cell(&self.e21, &w.e12, &self.e22, &w.e22),
        )
    }

    /// Entrywise `self >= other`.
    pub fn dominates(&self, other: &ValuationMatrix) -> bool {
        self.entries()
            .into_iter()
            .zip(other.entries())
            .all(|(a, b)| a >= b)
    }

    pub fn to_strings(&self) -> [[String; 2]; 2] {
        [
            [self.e11.to_string(), self.e12.to_string()],
            [self.e21.to_string(), self.e22.to_string()],
        ]
    }
}

pub fn minplus_mul(v: &ValuationMatrix, w: &ValuationMatrix) -> ValuationMatrix {
    v.minplus_mul(w)
}

/// Entrywise `ord_p` of `M(zeta_{p^n} - 1)`.
pub fn valuation_of_matrix_at_zeta(m: &PolyMatrix, p: Prime, n: u32) -> Result<ValuationMatrix> {
    let cyc = phi(p, n)?;
    m.try_map(|e| ord_at_zeta_with(e, p, n, &cyc))
}

/// Entrywise certified valuations of a truncated-series matrix.
pub fn valuation_of_series_matrix_at_zeta(
    m: &Mat2<TruncatedSeries>,
    n: u32,
) -> Result<Mat2<SeriesValuation>> {
    m.try_map(|e| e.ord_at_zeta(n))
}

/// Where a left column came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum LeftColumnSource {
    ClosedForm,
    MinPlusChain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeftColumn {
    pub top: ExtRational,
    pub bottom: ExtRational,
    pub source: LeftColumnSource,
}

/// Sum of `p^(-e)` over `e` in `from..=to` stepping by 2 (empty when `from > to`).
fn alternating_tail(p: Prime, from: u32, to: i64) -> ExtRational {
    (from..=to.max(0) as u32)
        .step_by(2)
        .fold(ExtRational::zero(), |acc, e| acc + ExtRational::inverse_prime_power(p, e))
}

/// Closed form for the left column of the valuation matrix of
/// `H_n(zeta_{p^n} - 1)`, with `v = ord_p(a_p)`:
///
/// ```text
/// n even:  top    = v + p^-2 + p^-4 + ... + p^(2-n)
///          bottom = p^-1 + p^-3 + ... + p^(1-n)
/// n odd:   top    = p^-1 + p^-3 + ... + p^(2-n)
///          bottom = v + p^-2 + ... + p^(1-n)
/// ```
///
/// Empty sums are 0. At `n = 1` this gives `(0, v)`, while the factor
/// chain (no `C_i` with `i < n`) and the direct valuations of
/// `-C_1 A^{-1} = -diag(1, Phi_1)` give `(0, inf)`; the two agree only
/// for `v = inf`. [`lemma_brute_force_check`] reports the mismatch.
///
/// Only `v in {1, inf}` is covered. Other values are rejected when `strict`
/// and otherwise answered by the min-plus chain of the factor patterns.
pub fn lemma_left_column(p: Prime, n: u32, v: &ExtRational, strict: bool) -> Result<LeftColumn> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let covered = v.is_infinite() || *v == ExtRational::from_integer(1);
    if !covered {
        if strict {
            return Err(Error::UnsupportedValuation(v.to_string()));
        }
        let chain = symbolic_chain(p, n, v);
        return Ok(LeftColumn {
            top: chain.e11,
            bottom: chain.e21,
            source: LeftColumnSource::MinPlusChain,
        });
    }
    let m = n as i64;
    let (top, bottom) = if n.is_multiple_of(2) {
        (v + &alternating_tail(p, 2, m - 2), alternating_tail(p, 1, m - 1))
    } else {
        (alternating_tail(p, 1, m - 2), v + &alternating_tail(p, 2, m - 1))
    };
    Ok(LeftColumn {
        top,
        bottom,
        source: LeftColumnSource::ClosedForm,
    })
}

/// Valuation pattern of `C_i(zeta_{p^n} - 1)`: `(v 0; p^(i-n) inf)` for
/// `i < n`, `(v 0; inf inf)` for `i = n`.
pub fn factor_pattern(p: Prime, n: u32, i: u32, v: &ExtRational) -> ValuationMatrix {
    let lower = if i < n {
        ExtRational::prime_power(p, i as i64 - n as i64)
    } else {
        ExtRational::Infinity
    };
    Mat2::new(v.clone(), ExtRational::zero(), lower, ExtRational::Infinity)
}

/// Min-plus chain `ord C_1 ... ord C_{n-1} ord(C_n A^{-1})` built from the
/// factor patterns, where `C_n A^{-1} = diag(1, Phi_n)` has pattern
/// `(0 inf; inf inf)`.
pub fn symbolic_chain(p: Prime, n: u32, v: &ExtRational) -> ValuationMatrix {
    let last = Mat2::new(
        ExtRational::zero(),
        ExtRational::Infinity,
        ExtRational::Infinity,
        ExtRational::Infinity,
    );
    (1..n)
        .map(|i| factor_pattern(p, n, i, v))
        .chain(std::iter::once(last))
        .fold(ValuationMatrix::tropical_identity(), |acc, f| acc.minplus_mul(&f))
}

/// The three routes to the valuation matrix of `H_n(zeta_{p^n} - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LemmaCheck {
    pub p: u64,
    pub a_p: String,
    pub n: u32,
    pub v: ExtRational,
    /// Entrywise valuations of `H_n` itself (resultant route).
    pub direct: [[String; 2]; 2],
    /// Min-plus product of the valuation matrices of the exact factors.
    pub minplus: [[String; 2]; 2],
    pub closed_form: LeftColumn,
    pub left_direct_eq_minplus: bool,
    pub left_direct_eq_closed: bool,
    pub full_direct_eq_minplus: bool,
    /// Direct valuations dominate the min-plus product (ultrametric bound).
    pub sound: bool,
    pub note: Option<String>,
}

impl LemmaCheck {
    pub fn all_agree(&self) -> bool {
        self.left_direct_eq_minplus && self.left_direct_eq_closed
    }
}

/// Valuation matrices of the factors `C_1, ..., C_{n-1}, C_n A^{-1}` at
/// `zeta_{p^n} - 1`, computed from the exact polynomial entries.
pub fn factor_valuations(p: Prime, a_p: &BigInt, n: u32) -> Result<Vec<ValuationMatrix>> {
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..n {
        out.push(valuation_of_matrix_at_zeta(&build_c(p, a_p, i)?, p, n)?);
    }
    let last = build_c(p, a_p, n)?.mul(&build_a_inv(a_p));
    out.push(valuation_of_matrix_at_zeta(&last, p, n)?);
    Ok(out)
}

pub fn lemma_brute_force_check(p: Prime, a_p: &BigInt, n: u32) -> Result<LemmaCheck> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let h = build_hn(p, a_p, n);
    let direct = valuation_of_matrix_at_zeta(&h, p, n)?;
    let minplus = factor_valuations(p, a_p, n)?
        .iter()
        .fold(ValuationMatrix::tropical_identity(), |acc, f| acc.minplus_mul(f));
    let v = ord_p(a_p, p);
    let closed = lemma_left_column(p, n, &v, false)?;
    let note = match closed.source {
        LeftColumnSource::MinPlusChain => Some(format!(
            "v = {v} is outside the closed-form range {{1, inf}}; left column from the min-plus chain"
        )),
        LeftColumnSource::ClosedForm => None,
    };
    Ok(LemmaCheck {
        p: p.get(),
        a_p: a_p.to_string(),
        n,
        left_direct_eq_minplus: direct.e11 == minplus.e11 && direct.e21 == minplus.e21,
        left_direct_eq_closed: direct.e11 == closed.top && direct.e21 == closed.bottom,
        full_direct_eq_minplus: direct == minplus,
        sound: direct.dominates(&minplus),
        direct: direct.to_strings(),
        minplus: minplus.to_strings(),
        closed_form: closed,
        v,
        note,
    })
}

/// Runs [`lemma_brute_force_check`] over a grid in parallel; results keep
/// the input order.
pub fn lemma_grid(cells: &[(Prime, BigInt, u32)]) -> Result<Vec<LemmaCheck>> {
    cells
        .par_iter()
        .map(|(p, a, n)| lemma_brute_force_check(*p, a, *n))
        .collect()
}
