//! Iwasawa invariants, characteristic and Kobayashi ranks, and the check of
//! the rank formula for the cyclic module `M_u`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::{omega, ord_at_zeta_with, phi};
use crate::error::{Error, Result};
use crate::growth::q_value;
use crate::matrix::{build_hn, extract_columns, SharpFlatColumns};
use crate::poly::IntPolynomial;
use crate::resultant::resultant;
use crate::scalars::{ord_p, ExtRational, Prime};
use crate::series::TruncatedSeries;
use crate::tropical::lemma_brute_force_check;

/// The mu-invariant; `Infinite` stands for the zero series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mu {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mu::Finite(k) => write!(f, "{k}"),
            Mu::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" => Ok(Mu::Infinite),
            t => t
                .parse()
                .map(Mu::Finite)
                .map_err(|_| Error::Parse(format!("not a mu value: {s:?}"))),
        }
    }
}

impl Serialize for Mu {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Mu::Finite(k) => s.serialize_u32(*k),
            Mu::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Mu {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(Mu::Finite(k)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Where `lambda` was read off: the first coefficient of minimal valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub index: usize,
    pub valuation: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantPair {
    pub mu: Mu,
    pub lambda: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl InvariantPair {
    fn from_min(min: Option<(u64, usize)>) -> Self {
        match min {
            None => InvariantPair {
                mu: Mu::Infinite,
                lambda: 0,
                certificate: None,
            },
            Some((valuation, index)) => InvariantPair {
                mu: Mu::Finite(valuation as u32),
                lambda: index as u64,
                certificate: Some(Certificate { index, valuation }),
            },
        }
    }
}

/// `mu` is the least coefficient valuation and `lambda` the first index
/// attaining it, which is the degree of the distinguished factor.
pub fn weierstrass_invariants(f: &IntPolynomial, p: Prime) -> InvariantPair {
    InvariantPair::from_min(f.min_coeff_valuation(p))
}

/// As [`weierstrass_invariants`] for a truncated series. Refuses when every
/// stored residue is `0 mod p^N`, since then `mu >= N` is all that is known.
pub fn series_invariants(s: &TruncatedSeries) -> Result<InvariantPair> {
    match s.min_coeff_valuation() {
        None => Err(Error::PrecisionExhausted(format!(
            "all {} coefficients vanish mod {}^{}",
            s.degree_cap(),
            s.prime(),
            s.precision()
        ))),
        some => Ok(InvariantPair::from_min(some)),
    }
}

fn times_totient(v: &ExtRational, p: Prime, n: u32) -> Result<BigInt> {
    let r = v.finite().ok_or(Error::Vanishes { n })?;
    let scaled = r * BigRational::from_integer(BigInt::from(p.totient_power(n)));
    if !scaled.is_integer() {
        return Err(Error::NonIntegral(scaled.to_string()));
    }
    Ok(scaled.to_integer())
}

/// `Upsilon_n = (p^n - p^(n-1)) ord_p f(zeta_{p^n} - 1)`.
pub fn upsilon_n(f: &IntPolynomial, p: Prime, n: u32) -> Result<BigInt> {
    let cyc = phi(p, n)?;
    times_totient(&ord_at_zeta_with(f, p, n, &cyc)?, p, n)
}

/// `ord_p Res(omega_m, f)`, the length of `Z_p[X]/(omega_m, f)`.
fn length(f: &IntPolynomial, p: Prime, m: u32) -> Result<BigInt> {
    let r = resultant(&omega(p, m), f)?;
    match ord_p(&r, p) {
        ExtRational::Infinity => Err(Error::NotCoprime { n: m }),
        v => Ok(v.to_integer().expect("valuation of an integer")),
    }
}

/// Kobayashi rank of the system `Lambda/(f, omega_m)`:
/// `length_n - length_{n-1}`.
pub fn nabla_by_lengths(f: &IntPolynomial, p: Prime, n: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    Ok(length(f, p, n)? - length(f, p, n - 1)?)
}

/// Smallest `n0 <= n_max` with `Upsilon_n = (p^n - p^(n-1)) mu + lambda`
/// for all `n0 <= n <= n_max`.
pub fn weierstrass_threshold(f: &IntPolynomial, p: Prime, n_max: u32) -> Result<Option<u32>> {
    let inv = weierstrass_invariants(f, p);
    let Mu::Finite(mu) = inv.mu else {
        return Ok(None);
    };
    let mut start = None;
    for n in 1..=n_max {
        let expected = BigInt::from(p.totient_power(n)) * mu + inv.lambda;
        if upsilon_n(f, p, n)? == expected {
            start.get_or_insert(n);
        } else {
            start = None;
        }
    }
    Ok(start)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Star {
    Sharp,
    Flat,
}

impl Star {
    pub fn swap(self) -> Self {
        match self {
            Star::Sharp => Star::Flat,
            Star::Flat => Star::Sharp,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Star::Sharp => "sharp",
            Star::Flat => "flat",
        }
    }
}

impl fmt::Display for Star {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The Modesty Algorithm: equal mu (or `a_p = 0`) picks sharp for odd `n`
/// and flat for even `n`; otherwise the smaller mu wins.
pub fn modesty_select(mu_sharp: Mu, mu_flat: Mu, a_p_zero: bool, n: u32) -> Result<Star> {
    if mu_sharp == Mu::Infinite && mu_flat == Mu::Infinite {
        return Err(Error::BothMuInfinite);
    }
    if a_p_zero || mu_sharp == mu_flat {
        return Ok(if n % 2 == 1 { Star::Sharp } else { Star::Flat });
    }
    Ok(if mu_sharp < mu_flat { Star::Sharp } else { Star::Flat })
}

/// Stand-ins for the two Coleman images of a basis element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SyntheticColemanPair {
    #[serde(skip)]
    pub p: Prime,
    #[serde(serialize_with = "display_poly")]
    pub f_sharp: IntPolynomial,
    #[serde(serialize_with = "display_poly")]
    pub f_flat: IntPolynomial,
}

fn display_poly<S: Serializer>(f: &IntPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(f)
}

/// Samples `p^mu * D * U` where `D` is distinguished of degree `lambda`
/// with constant term `p c`, `p` not dividing `c`, and `U` has constant
/// term 1. Resamples until the result is nonzero at every `zeta_{p^m} - 1`
/// with `m <= avoid_levels`.
pub fn sample_series<R: Rng>(p: Prime, mu: u32, lambda: u32, avoid_levels: u32, rng: &mut R) -> IntPolynomial {
    let q = p.get() as i64;
    let cycs: Vec<IntPolynomial> = (1..=avoid_levels).map(|m| phi(p, m).unwrap()).collect();
    loop {
        let mut d = vec![BigInt::from(0); lambda as usize + 1];
        d[lambda as usize] = BigInt::from(1);
        if lambda > 0 {
            let mut c0 = 0;
            while c0 % q == 0 {
                c0 = rng.gen_range(-(q - 1)..=(q - 1));
            }
            d[0] = BigInt::from(q * c0);
            for c in d.iter_mut().take(lambda as usize).skip(1) {
                *c = BigInt::from(q * rng.gen_range(-2i64..=2));
            }
        }
        let unit_len = rng.gen_range(1..=3usize);
        let mut u = vec![BigInt::from(1)];
        u.extend((1..unit_len).map(|_| BigInt::from(rng.gen_range(-3i64..=3))));
        let f = (&IntPolynomial::from_coeffs(d) * &IntPolynomial::from_coeffs(u)).scale(&p.pow(mu));
        let vanishes = cycs
            .iter()
            .any(|c| f.reduce_mod(c).map(|r| r.is_zero()).unwrap_or(true));
        if !vanishes {
            return f;
        }
    }
}

impl SyntheticColemanPair {
    pub fn sample<R: Rng>(
        p: Prime,
        sharp: (u32, u32),
        flat: (u32, u32),
        avoid_levels: u32,
        rng: &mut R,
    ) -> Self {
        let f_sharp = sample_series(p, sharp.0, sharp.1, avoid_levels, rng);
        let f_flat = sample_series(p, flat.0, flat.1, avoid_levels, rng);
        SyntheticColemanPair { p, f_sharp, f_flat }
    }

    pub fn get(&self, star: Star) -> &IntPolynomial {
        match star {
            Star::Sharp => &self.f_sharp,
            Star::Flat => &self.f_flat,
        }
    }
}

fn check_unit(p: Prime, u: &BigInt) -> Result<()> {
    if (u % p.to_bigint()) == BigInt::from(0) {
        return Err(Error::NonUnitMultiplier {
            p: p.get(),
            u: u.to_string(),
        });
    }
    Ok(())
}

/// `omega_n^# f_# + u omega_n^b f_b + Phi_n omega_{n-1}^# f_# + u Phi_n omega_{n-1}^b f_b`.
pub fn build_m_generator(
    cols: &SharpFlatColumns,
    pair: &SyntheticColemanPair,
    u: &BigInt,
    n: u32,
) -> Result<IntPolynomial> {
    check_unit(pair.p, u)?;
    let cyc = phi(pair.p, n)?;
    let sharp = &(&cols.omega_sharp_n + &(&cyc * &cols.omega_sharp_nminus1)) * &pair.f_sharp;
    let flat = &(&cols.omega_flat_n + &(&cyc * &cols.omega_flat_nminus1)) * &pair.f_flat;
    Ok(&sharp + &flat.scale(u))
}

/// `nabla_n M = (p^n - p^(n-1)) ord_p (omega_n^# f_# + u omega_n^b f_b)(zeta_{p^n} - 1)`.
pub fn nabla_m(
    cols: &SharpFlatColumns,
    pair: &SyntheticColemanPair,
    u: &BigInt,
    p: Prime,
    n: u32,
) -> Result<BigInt> {
    check_unit(p, u)?;
    let combo = &(&cols.omega_sharp_n * &pair.f_sharp) + &(&cols.omega_flat_n * &pair.f_flat).scale(u);
    upsilon_n(&combo, p, n)
}

/// Why a level is outside the range where the rank formula is claimed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SkipReason {
    /// Some `lambda >= p^(n-1)`, so `Upsilon_n` need not be `phi mu + lambda`.
    LambdaTooLarge,
    /// The closed-form left column differs from the direct valuations.
    LemmaMismatch,
    /// The two terms `omega_n^* f_*(zeta)` have equal valuation.
    Tie,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModestyLevel {
    pub n: u32,
    pub star: Star,
    pub q: String,
    pub upsilon_star: String,
    pub expected: String,
    /// `(u, nabla_n M_u)` for every tested unit.
    pub nabla: Vec<(String, String)>,
    /// `Upsilon_n` of the full generator, which must equal `nabla` since
    /// `Phi_n` vanishes at `zeta_{p^n} - 1`.
    pub generator_upsilon: Vec<String>,
    pub u_independent: bool,
    pub skip: Option<SkipReason>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModestyReport {
    pub p: u64,
    pub a_p: String,
    pub sharp: InvariantPair,
    pub flat: InvariantPair,
    pub pair: SyntheticColemanPair,
    pub levels: Vec<ModestyLevel>,
    /// Smallest `n` from which the identity holds at every later level.
    pub equality_from: Option<u32>,
    /// Every level not skipped satisfies the identity and u-independence.
    pub valid_levels_hold: bool,
}

/// Valuations of `omega_n^* f_*` at `zeta_{p^n} - 1` for both branches.
fn term_valuations(cols: &SharpFlatColumns, pair: &SyntheticColemanPair, p: Prime, n: u32) -> Result<(ExtRational, ExtRational)> {
    let cyc = phi(p, n)?;
    let t = |w: &IntPolynomial, f: &IntPolynomial| -> Result<ExtRational> {
        Ok(ord_at_zeta_with(w, p, n, &cyc)? + ord_at_zeta_with(f, p, n, &cyc)?)
    };
    Ok((t(&cols.omega_sharp_n, &pair.f_sharp)?, t(&cols.omega_flat_n, &pair.f_flat)?))
}

/// Evaluates the rank identity `nabla_n M = q_n^* + Upsilon_n(f_*)` at one
/// level, for every unit in `units`.
pub fn modesty_level(
    pair: &SyntheticColemanPair,
    a_p: &BigInt,
    units: &[BigInt],
    n: u32,
) -> Result<ModestyLevel> {
    let p = pair.p;
    let h = build_hn(p, a_p, n);
    let cols = extract_columns(&h, p, n)?;
    let inv_sharp = weierstrass_invariants(&pair.f_sharp, p);
    let inv_flat = weierstrass_invariants(&pair.f_flat, p);
    let star = modesty_select(inv_sharp.mu, inv_flat.mu, a_p == &BigInt::from(0), n)?;
    let q = q_value(p, n, star);
    let ups = upsilon_n(pair.get(star), p, n)?;
    let expected = &q + &ups;

    let mut nabla = Vec::with_capacity(units.len());
    let mut generator_upsilon = Vec::with_capacity(units.len());
    for u in units {
        let v = nabla_m(&cols, pair, u, p, n)?;
        let g = build_m_generator(&cols, pair, u, n)?;
        generator_upsilon.push(upsilon_n(&g, p, n)?.to_string());
        nabla.push((u.to_string(), v));
    }
    let u_independent = nabla.windows(2).all(|w| w[0].1 == w[1].1);

    let threshold = p.pow(n - 1);
    let skip = if BigInt::from(inv_sharp.lambda.max(inv_flat.lambda)) >= threshold {
        Some(SkipReason::LambdaTooLarge)
    } else if !lemma_brute_force_check(p, a_p, n)?.left_direct_eq_closed {
        Some(SkipReason::LemmaMismatch)
    } else {
        let (ts, tf) = term_valuations(&cols, pair, p, n)?;
        (ts == tf).then_some(SkipReason::Tie)
    };
    let holds = u_independent && nabla.iter().all(|(_, v)| *v == expected);
    Ok(ModestyLevel {
        n,
        star,
        q: q.to_string(),
        upsilon_star: ups.to_string(),
        expected: expected.to_string(),
        nabla: nabla.into_iter().map(|(u, v)| (u, v.to_string())).collect(),
        generator_upsilon,
        u_independent,
        skip,
        holds,
    })
}

pub fn modesty_report(
    pair: &SyntheticColemanPair,
    a_p: &BigInt,
    units: &[BigInt],
    n_max: u32,
) -> Result<ModestyReport> {
    let levels = (1..=n_max)
        .map(|n| modesty_level(pair, a_p, units, n))
        .collect::<Result<Vec<_>>>()?;
    let mut equality_from = None;
    for l in &levels {
        if l.holds {
            equality_from.get_or_insert(l.n);
        } else {
            equality_from = None;
        }
    }
    Ok(ModestyReport {
        p: pair.p.get(),
        a_p: a_p.to_string(),
        sharp: weierstrass_invariants(&pair.f_sharp, pair.p),
        flat: weierstrass_invariants(&pair.f_flat, pair.p),
        valid_levels_hold: levels.iter().all(|l| l.skip.is_some() || l.holds),
        pair: pair.clone(),
        levels,
        equality_from,
    })
}

/// The units `{1, 2, 1 + a_p}` with duplicates removed.
pub fn default_units(a_p: &BigInt) -> Vec<BigInt> {
    let mut units: Vec<BigInt> = Vec::new();
    for u in [BigInt::from(1), BigInt::from(2), a_p + 1] {
        if !units.contains(&u) {
            units.push(u);
        }
    }
    units
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModestyGridSpec {
    pub p: u64,
    pub mu_values: Vec<u32>,
    pub lambda_values: Vec<u32>,
    pub a_p_values: Vec<i64>,
    pub n_max: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModestyGridSummary {
    pub cells: usize,
    pub levels_checked: usize,
    pub levels_skipped: usize,
    pub failures: usize,
    pub skipped_by_reason: Vec<(SkipReason, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModestyGridReport {
    pub spec: ModestyGridSpec,
    pub reports: Vec<ModestyReport>,
    pub summary: ModestyGridSummary,
}

/// Every `(mu_#, lambda_#, mu_b, lambda_b, a_p)` combination, each with its
/// own sampled pair. Cell `i` draws from stream `i` of a ChaCha generator
/// seeded with `spec.seed`, so the output does not depend on scheduling.
pub fn modesty_grid(spec: &ModestyGridSpec) -> Result<ModestyGridReport> {
    let p = Prime::new(spec.p)?;
    let mut cells = Vec::new();
    for &a in &spec.a_p_values {
        for &ms in &spec.mu_values {
            for &ls in &spec.lambda_values {
                for &mf in &spec.mu_values {
                    for &lf in &spec.lambda_values {
                        cells.push((BigInt::from(a), (ms, ls), (mf, lf)));
                    }
                }
            }
        }
    }
    let reports = cells
        .par_iter()
        .enumerate()
        .map(|(i, (a, s, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let pair = SyntheticColemanPair::sample(p, *s, *f, spec.n_max, &mut rng);
            modesty_report(&pair, a, &default_units(a), spec.n_max)
        })
        .collect::<Result<Vec<_>>>()?;

    let levels = reports.iter().flat_map(|r| &r.levels);
    let mut skipped_by_reason: Vec<(SkipReason, usize)> = [SkipReason::LambdaTooLarge, SkipReason::LemmaMismatch, SkipReason::Tie]
        .into_iter()
        .map(|r| (r, 0))
        .collect();
    let (mut checked, mut skipped, mut failures) = (0, 0, 0);
    for l in levels {
        match l.skip {
            Some(reason) => {
                skipped += 1;
                skipped_by_reason.iter_mut().find(|(r, _)| *r == reason).unwrap().1 += 1;
            }
            None => {
                checked += 1;
                if !l.holds {
                    failures += 1;
                }
            }
        }
    }
    Ok(ModestyGridReport {
        spec: spec.clone(),
        summary: ModestyGridSummary {
            cells: reports.len(),
            levels_checked: checked,
            levels_skipped: skipped,
            failures,
            skipped_by_reason,
        },
        reports,
    })
}
