//! The q-sequences, growth increments of the p-primary Sha order, and the
//! closed-form total of Perrin-Riou together with the dictionary between
//! the two sets of invariants.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranks::{modesty_select, Mu, Star};
use crate::scalars::Prime;

/// Which parity carries the sharp branch when the mu-invariants agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Sharp for odd `n`, flat for even `n`.
    #[default]
    Body,
    /// Sharp for even `n`, flat for odd `n`.
    Intro,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Body, Convention::Intro];
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Body => "body",
            Convention::Intro => "intro",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "body" => Ok(Convention::Body),
            "intro" => Ok(Convention::Intro),
            other => Err(Error::Parse(format!("unknown convention {other:?}"))),
        }
    }
}

fn pow(p: Prime, k: u32) -> BigInt {
    p.pow(k)
}

/// `floor(p^k / d)`.
fn floor_div(num: BigInt, d: &BigInt) -> BigInt {
    num.div_floor(d)
}

/// `p^hi - p^(hi-1) + ... +- p^lo`; zero when `hi < lo`.
pub fn alternating_sum(p: Prime, hi: i64, lo: i64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut sign = true;
    let mut e = hi;
    while e >= lo {
        let term = pow(p, e as u32);
        if sign {
            acc += term;
        } else {
            acc -= term;
        }
        sign = !sign;
        e -= 1;
    }
    acc
}

/// `q_n^sharp` and `q_n^flat` from the floor form:
/// `floor(p^n/(p+1))` on the branch's own parity (odd for sharp, even for
/// flat) and `floor(p^(n+1)/(p+1))` otherwise.
pub fn q_value(p: Prime, n: u32, star: Star) -> BigInt {
    let own = match star {
        Star::Sharp => n % 2 == 1,
        Star::Flat => n.is_multiple_of(2),
    };
    let e = if own { n } else { n + 1 };
    floor_div(pow(p, e), &BigInt::from(p.get() + 1))
}

/// The alternating-sum form of `q_n`.
pub fn q_value_alternating(p: Prime, n: u32, star: Star) -> BigInt {
    let n = n as i64;
    let odd = n % 2 == 1;
    match (star, odd) {
        (Star::Sharp, true) => alternating_sum(p, n - 1, 1),
        (Star::Sharp, false) => alternating_sum(p, n, 1),
        (Star::Flat, true) => alternating_sum(p, n, 0),
        (Star::Flat, false) => alternating_sum(p, n - 1, 0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QRow {
    pub n: u32,
    pub q_sharp: String,
    pub q_flat: String,
    pub q_sharp_alternating: String,
    pub q_flat_alternating: String,
    pub forms_agree: bool,
}

pub fn q_table(p: Prime, max_n: u32) -> Vec<QRow> {
    (0..=max_n)
        .into_par_iter()
        .map(|n| {
            let (s, f) = (q_value(p, n, Star::Sharp), q_value(p, n, Star::Flat));
            let (sa, fa) = (
                q_value_alternating(p, n, Star::Sharp),
                q_value_alternating(p, n, Star::Flat),
            );
            QRow {
                n,
                forms_agree: s == sa && f == fa,
                q_sharp: s.to_string(),
                q_flat: f.to_string(),
                q_sharp_alternating: sa.to_string(),
                q_flat_alternating: fa.to_string(),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthParams {
    pub a_p_zero: bool,
    pub mu_sharp: Mu,
    pub lambda_sharp: u64,
    pub mu_flat: Mu,
    pub lambda_flat: u64,
    pub r_infinity: u64,
    pub eta_trivial: bool,
}

impl GrowthParams {
    pub fn zeros(a_p_zero: bool) -> Self {
        GrowthParams {
            a_p_zero,
            mu_sharp: Mu::Finite(0),
            lambda_sharp: 0,
            mu_flat: Mu::Finite(0),
            lambda_flat: 0,
            r_infinity: 0,
            eta_trivial: true,
        }
    }
}

/// Branch selection under a convention. `Body` is the Modesty Algorithm;
/// `Intro` only swaps the parity rule.
pub fn select_branch(params: &GrowthParams, n: u32, convention: Convention) -> Result<Star> {
    let star = modesty_select(params.mu_sharp, params.mu_flat, params.a_p_zero, n)?;
    let parity_rule = params.a_p_zero || params.mu_sharp == params.mu_flat;
    Ok(match (convention, parity_rule) {
        (Convention::Intro, true) => star.swap(),
        _ => star,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthIncrement {
    pub n: u32,
    pub star: Star,
    #[serde(serialize_with = "display_string")]
    pub value: BigInt,
    /// The formula holds for large `n`; the value is computed for every `n`.
    pub asymptotic: bool,
}

/// `e_n - e_{n-1} = (p^n - p^(n-1)) mu_* + lambda_* - r_inf + q_n^*`, plus
/// one on the sharp branch when `a_p = 0` and the character is nontrivial.
pub fn growth_increment(
    params: &GrowthParams,
    p: Prime,
    n: u32,
    convention: Convention,
) -> Result<GrowthIncrement> {
    increment_with_weight(params, p, n, convention, 0)
}

/// Same as [`growth_increment`] with the mu weight `p^(n+k) - p^(n-1+k)`.
pub fn increment_with_weight(
    params: &GrowthParams,
    p: Prime,
    n: u32,
    convention: Convention,
    mu_weight_offset: u32,
) -> Result<GrowthIncrement> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let star = select_branch(params, n, convention)?;
    let (mu, lambda) = match star {
        Star::Sharp => (params.mu_sharp, params.lambda_sharp),
        Star::Flat => (params.mu_flat, params.lambda_flat),
    };
    let mu = match mu {
        Mu::Finite(m) => m,
        Mu::Infinite => return Err(Error::InfiniteBranch(star.name())),
    };
    let weight = pow(p, n + mu_weight_offset) - pow(p, n - 1 + mu_weight_offset);
    let mut value = weight * BigInt::from(mu) + BigInt::from(lambda) - BigInt::from(params.r_infinity)
        + q_value(p, n, star);
    if star == Star::Sharp && params.a_p_zero && !params.eta_trivial {
        value += 1;
    }
    Ok(GrowthIncrement {
        n,
        star,
        value,
        asymptotic: true,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PerrinRiouParams {
    pub mu_plus: i64,
    pub mu_minus: i64,
    pub lambda_plus: i64,
    pub lambda_minus: i64,
    pub s: u64,
    #[serde(with = "rational_string")]
    pub nu: BigRational,
}

impl PerrinRiouParams {
    pub fn zeros() -> Self {
        PerrinRiouParams {
            mu_plus: 0,
            mu_minus: 0,
            lambda_plus: 0,
            lambda_minus: 0,
            s: 0,
            nu: BigRational::zero(),
        }
    }

    /// `mu'_+ = mu_sharp`, `mu'_- = mu_flat`, `lambda'_+ = lambda_sharp`,
    /// `lambda'_- = lambda_flat - 1`, `s = r_inf`.
    pub fn from_dictionary(params: &GrowthParams, nu: BigRational) -> Result<Self> {
        let finite = |m: Mu| match m {
            Mu::Finite(k) => Ok(k as i64),
            Mu::Infinite => Err(Error::InfiniteBranch("dictionary")),
        };
        Ok(PerrinRiouParams {
            mu_plus: finite(params.mu_sharp)?,
            mu_minus: finite(params.mu_flat)?,
            lambda_plus: params.lambda_sharp as i64,
            lambda_minus: params.lambda_flat as i64 - 1,
            s: params.r_infinity,
            nu,
        })
    }
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(D::Error::custom)
    }
}

fn display_string<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `"a/b"` in lowest terms, or `"a"` for integers.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// `ord_p #Sha(E/Q_n)` by Perrin-Riou's formula:
///
/// ```text
/// p^(2[n/2]+1)/(p+1) mu'_+ + p^(2[(n+1)/2]+1)/(p+1) mu'_- + [p^(n+1)/(p^2-1)]
///   + (lambda'_+ - s)[n/2] + (lambda'_- - s)[(n+1)/2] + nu
/// ```
pub fn perrin_riou_total(pr: &PerrinRiouParams, p: Prime, n: u32) -> BigRational {
    let p1 = BigInt::from(p.get() + 1);
    let half = (n / 2) as i64;
    let half_up = n.div_ceil(2) as i64;
    let mu_plus = BigRational::new(pow(p, 2 * (n / 2) + 1) * pr.mu_plus, p1.clone());
    let mu_minus = BigRational::new(pow(p, 2 * n.div_ceil(2) + 1) * pr.mu_minus, p1);
    let floor = floor_term(p, n);
    let s = pr.s as i64;
    let lambdas = BigInt::from((pr.lambda_plus - s) * half + (pr.lambda_minus - s) * half_up);
    mu_plus + mu_minus + BigRational::from_integer(floor + lambdas) + &pr.nu
}

/// `[p^(n+1) / (p^2 - 1)]`.
pub fn floor_term(p: Prime, n: u32) -> BigInt {
    let q = BigInt::from(p.get());
    floor_div(pow(p, n + 1), &(&q * &q - 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FootnoteRow {
    pub n: u32,
    pub floor_n: String,
    pub floor_nminus1: String,
    pub difference: String,
    /// `q_n^sharp + 1` for odd `n`, `q_n^flat` for even `n`.
    pub expected: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FootnoteReport {
    pub p: u64,
    pub n_max: u32,
    pub rows: Vec<FootnoteRow>,
    pub all_hold: bool,
}

pub fn footnote_identity_check(p: Prime, n_max: u32) -> FootnoteReport {
    let rows: Vec<FootnoteRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (a, b) = (floor_term(p, n), floor_term(p, n - 1));
            let diff = &a - &b;
            let expected = if n % 2 == 1 {
                q_value(p, n, Star::Sharp) + 1
            } else {
                q_value(p, n, Star::Flat)
            };
            FootnoteRow {
                n,
                holds: diff == expected,
                floor_n: a.to_string(),
                floor_nminus1: b.to_string(),
                difference: diff.to_string(),
                expected: expected.to_string(),
            }
        })
        .collect();
    FootnoteReport {
        p: p.get(),
        n_max,
        all_hold: rows.iter().all(|r| r.holds),
        rows,
    }
}

/// One normalization choice tried by [`dictionary_crosscheck`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalizationChoice {
    pub convention: Convention,
    pub mu_weight_offset: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DictionaryCell {
    pub choice: NormalizationChoice,
    pub increment: Option<String>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DictionaryRow {
    pub n: u32,
    pub perrin_riou_increment: String,
    pub floor_increment: String,
    /// Floor-term difference equals the q-term it is meant to absorb.
    pub floor_matches_q: bool,
    pub cells: Vec<DictionaryCell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChoiceSummary {
    pub choice: NormalizationChoice,
    pub agreeing_levels: Vec<u32>,
    pub agrees_everywhere: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DictionaryReport {
    pub p: u64,
    pub n_from: u32,
    pub n_to: u32,
    pub params: GrowthParams,
    pub dictionary: PerrinRiouParams,
    pub requested: Convention,
    /// The Perrin-Riou formula assumes `a_p = 0` or equal mu-invariants.
    pub in_regime: bool,
    pub rows: Vec<DictionaryRow>,
    pub summary: Vec<ChoiceSummary>,
    pub matching: Vec<NormalizationChoice>,
}

/// Compares `total(n) - total(n-1)` under the dictionary with the growth
/// increment, over every convention and mu-weight offset in `{0, 1}`.
/// Diagnostic only: disagreement is reported, never an error.
pub fn dictionary_crosscheck(
    params: &GrowthParams,
    p: Prime,
    n_from: u32,
    n_to: u32,
    requested: Convention,
) -> Result<DictionaryReport> {
    if n_from == 0 || n_from > n_to {
        return Err(Error::Parse(format!("bad level range {n_from}..={n_to}")));
    }
    let pr = PerrinRiouParams::from_dictionary(params, BigRational::zero())?;
    let choices: Vec<NormalizationChoice> = Convention::ALL
        .iter()
        .flat_map(|&convention| {
            [0, 1].map(|mu_weight_offset| NormalizationChoice {
                convention,
                mu_weight_offset,
            })
        })
        .collect();
    let rows: Vec<DictionaryRow> = (n_from..=n_to)
        .into_par_iter()
        .map(|n| {
            let pri = perrin_riou_total(&pr, p, n) - perrin_riou_total(&pr, p, n - 1);
            let floor_inc = floor_term(p, n) - floor_term(p, n - 1);
            let q = if n % 2 == 1 {
                q_value(p, n, Star::Sharp) + 1
            } else {
                q_value(p, n, Star::Flat)
            };
            let cells = choices
                .iter()
                .map(|&choice| {
                    let inc = increment_with_weight(params, p, n, choice.convention, choice.mu_weight_offset).ok();
                    DictionaryCell {
                        choice,
                        agrees: inc
                            .as_ref()
                            .is_some_and(|g| BigRational::from_integer(g.value.clone()) == pri),
                        increment: inc.map(|g| g.value.to_string()),
                    }
                })
                .collect();
            DictionaryRow {
                n,
                perrin_riou_increment: fmt_rational(&pri),
                floor_matches_q: floor_inc == q,
                floor_increment: floor_inc.to_string(),
                cells,
            }
        })
        .collect();
    let summary: Vec<ChoiceSummary> = choices
        .iter()
        .enumerate()
        .map(|(i, &choice)| {
            let agreeing_levels: Vec<u32> = rows.iter().filter(|r| r.cells[i].agrees).map(|r| r.n).collect();
            ChoiceSummary {
                choice,
                agrees_everywhere: agreeing_levels.len() == rows.len(),
                agreeing_levels,
            }
        })
        .collect();
    Ok(DictionaryReport {
        p: p.get(),
        n_from,
        n_to,
        params: params.clone(),
        dictionary: pr,
        requested,
        in_regime: params.a_p_zero || params.mu_sharp == params.mu_flat,
        matching: summary.iter().filter(|s| s.agrees_everywhere).map(|s| s.choice).collect(),
        rows,
        summary,
    })
}

/// `true` when `total(n) - total(n-1)` is an integer for every `1 <= n <= n_max`.
pub fn increments_integral(pr: &PerrinRiouParams, p: Prime, n_max: u32) -> bool {
    (1..=n_max).all(|n| (perrin_riou_total(pr, p, n) - perrin_riou_total(pr, p, n - 1)).denom().is_one())
}
