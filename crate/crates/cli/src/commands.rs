use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use ssiwasawa::cyclotomic::phi_product;
use ssiwasawa::growth::{
    dictionary_crosscheck, footnote_identity_check, growth_increment, q_table, Convention, GrowthParams,
};
use ssiwasawa::matrix::{build_completed_hn, build_hn, completed_hn_at_zeta};
use ssiwasawa::ranks::{
    default_units, modesty_grid, modesty_report, nabla_by_lengths, series_invariants, upsilon_n,
    weierstrass_invariants, weierstrass_threshold, InvariantPair, ModestyGridSpec, ModestyReport, Mu, SkipReason,
    SyntheticColemanPair,
};
use ssiwasawa::tropical::{
    lemma_brute_force_check, valuation_of_matrix_at_zeta, valuation_of_series_matrix_at_zeta, LeftColumnSource,
};
use ssiwasawa::poly::PolynomialJson;
use ssiwasawa::{Error, IntPolynomial, Mat2, Prime, SeriesValuation, TruncatedSeries};

use crate::report::{Report, Table};

/// Largest `p^n` handled without `--force`.
const TRACTABLE: u128 = 2000;

fn guard(p: Prime, n: u32, force: bool) -> Result<()> {
    let size = (p.get() as u128).checked_pow(n);
    if !force && size.is_none_or(|s| s > TRACTABLE) {
        bail!("p^n = {}^{} exceeds {TRACTABLE}; pass --force to run anyway", p, n);
    }
    Ok(())
}

fn positive_level(n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::ZeroLevel.into());
    }
    Ok(n)
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn matrix_rows(label: &str, m: &[[String; 2]; 2]) -> Vec<String> {
    vec![label.into(), m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone()]
}

fn entries_table(title: String) -> Table {
    Table::new(title, &["route", "e11", "e12", "e21", "e22"])
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QseqArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 10)]
    pub max_n: u32,
}

pub fn qseq(a: &QseqArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let rows = q_table(p, a.max_n);
    let mut t = Table::new(
        format!("q_n for p = {p}"),
        &["n", "q_sharp", "q_flat", "q_sharp_alt", "q_flat_alt", "agree"],
    );
    for r in &rows {
        t.push(vec![
            r.n.to_string(),
            r.q_sharp.clone(),
            r.q_flat.clone(),
            r.q_sharp_alternating.clone(),
            r.q_flat_alternating.clone(),
            yes_no(r.forms_agree),
        ]);
    }
    Ok(Report {
        passed: rows.iter().all(|r| r.forms_agree),
        tables: vec![t],
        notes: Vec::new(),
        result: json!({ "p": p.get(), "rows": rows }),
    })
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct ValmatArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub ap: i64,
    #[arg(long)]
    pub level: u32,
    /// Skip the p^n <= 2000 size guard.
    #[arg(long)]
    pub force: bool,
}

pub fn valmat(a: &ValmatArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let n = positive_level(a.level)?;
    guard(p, n, a.force)?;
    let check = lemma_brute_force_check(p, &BigInt::from(a.ap), n)?;

    let mut m = entries_table(format!("valuations of H_{n} at zeta_{{{p}^{n}}} - 1, a_p = {}, v = {}", a.ap, check.v));
    m.push(matrix_rows("direct", &check.direct));
    m.push(matrix_rows("min-plus", &check.minplus));
    let source = match check.closed_form.source {
        LeftColumnSource::ClosedForm => "closed form",
        LeftColumnSource::MinPlusChain => "chain pattern",
    };
    m.push(vec![
        source.into(),
        check.closed_form.top.to_string(),
        "-".into(),
        check.closed_form.bottom.to_string(),
        "-".into(),
    ]);

    let closed_ok = check.closed_form.source == LeftColumnSource::MinPlusChain || check.left_direct_eq_closed;
    let mut c = Table::new("checks", &["check", "result"]);
    for (name, ok) in [
        ("left column: direct = min-plus", check.left_direct_eq_minplus),
        ("left column: direct = closed form", check.left_direct_eq_closed),
        ("full matrix: direct = min-plus", check.full_direct_eq_minplus),
        ("direct dominates min-plus", check.sound),
    ] {
        c.push(vec![name.into(), yes_no(ok)]);
    }

    let mut notes: Vec<String> = check.note.iter().cloned().collect();
    if !closed_ok {
        notes.push("the closed-form left column disagrees with the direct valuations".into());
    }
    Ok(Report {
        passed: check.sound && check.left_direct_eq_minplus && closed_ok,
        tables: vec![m, c],
        notes,
        result: serde_json::to_value(&check)?,
    })
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct GrowthFlags {
    #[arg(long, default_value_t = 0)]
    pub ap: i64,
    #[arg(long, default_value_t = Convention::Body)]
    pub convention: Convention,
    #[arg(long, default_value_t = Mu::Finite(0))]
    pub mu_sharp: Mu,
    #[arg(long, default_value_t = 0)]
    pub lambda_sharp: u64,
    #[arg(long, default_value_t = Mu::Finite(0))]
    pub mu_flat: Mu,
    #[arg(long, default_value_t = 0)]
    pub lambda_flat: u64,
    /// Rank of E(K_inf), the constant r_inf.
    #[arg(long, default_value_t = 0)]
    pub r_inf: u64,
    /// The character eta is nontrivial.
    #[arg(long)]
    pub eta_nontrivial: bool,
}

impl GrowthFlags {
    fn params(&self) -> GrowthParams {
        GrowthParams {
            a_p_zero: self.ap == 0,
            mu_sharp: self.mu_sharp,
            lambda_sharp: self.lambda_sharp,
            mu_flat: self.mu_flat,
            lambda_flat: self.lambda_flat,
            r_infinity: self.r_inf,
            eta_trivial: !self.eta_nontrivial,
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct GrowthArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 1)]
    pub min_n: u32,
    #[arg(long, default_value_t = 6)]
    pub max_n: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub flags: GrowthFlags,
}

pub fn growth(a: &GrowthArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let from = positive_level(a.min_n)?;
    if from > a.max_n {
        bail!("--min-n {} exceeds --max-n {}", from, a.max_n);
    }
    let params = a.flags.params();
    let incs = (from..=a.max_n)
        .map(|n| growth_increment(&params, p, n, a.flags.convention))
        .collect::<ssiwasawa::Result<Vec<_>>>()?;
    let base = from - 1;
    let mut t = Table::new(
        format!("e_n - e_(n-1) for p = {p}, {} convention", a.flags.convention),
        &["n", "branch", "increment", &format!("e_n - e_{base}")],
    );
    let mut total = BigInt::from(0);
    let mut cumulative = Vec::with_capacity(incs.len());
    for inc in &incs {
        total += &inc.value;
        cumulative.push(total.to_string());
        t.push(vec![inc.n.to_string(), inc.star.to_string(), inc.value.to_string(), total.to_string()]);
    }
    Ok(Report {
        passed: true,
        tables: vec![t],
        notes: vec!["increments are the large-n formula evaluated at every listed n".into()],
        result: json!({
            "p": p.get(),
            "params": params,
            "convention": a.flags.convention,
            "base": base,
            "increments": incs,
            "cumulative": cumulative,
        }),
    })
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct PrcheckArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 10)]
    pub max_n: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub flags: GrowthFlags,
}

pub fn prcheck(a: &PrcheckArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let n_max = positive_level(a.max_n)?;
    let foot = footnote_identity_check(p, n_max);
    let mut f = Table::new(
        format!("floor(p^(n+1)/(p^2-1)) differences for p = {p}"),
        &["n", "floor_n", "floor_n-1", "difference", "expected", "holds"],
    );
    for r in &foot.rows {
        f.push(vec![
            r.n.to_string(),
            r.floor_n.clone(),
            r.floor_nminus1.clone(),
            r.difference.clone(),
            r.expected.clone(),
            yes_no(r.holds),
        ]);
    }

    let params = a.flags.params();
    let dict = dictionary_crosscheck(&params, p, 1, n_max, a.flags.convention)?;
    let labels: Vec<String> = dict
        .summary
        .iter()
        .map(|s| format!("{}+{}", s.choice.convention, s.choice.mu_weight_offset))
        .collect();
    let mut headers = vec!["n", "perrin_riou", "floor_inc", "floor=q"];
    headers.extend(labels.iter().map(String::as_str));
    let mut d = Table::new("dictionary cross-check (* marks agreement)", &headers);
    for r in &dict.rows {
        let mut row = vec![
            r.n.to_string(),
            r.perrin_riou_increment.clone(),
            r.floor_increment.clone(),
            yes_no(r.floor_matches_q),
        ];
        row.extend(r.cells.iter().map(|c| match &c.increment {
            Some(v) if c.agrees => format!("{v}*"),
            Some(v) => v.clone(),
            None => "-".into(),
        }));
        d.push(row);
    }

    let mut notes = Vec::new();
    if dict.matching.is_empty() {
        notes.push("no normalization choice agrees at every level (diagnostic only)".into());
    } else {
        let m: Vec<String> = dict
            .matching
            .iter()
            .map(|c| format!("{}+{}", c.convention, c.mu_weight_offset))
            .collect();
        notes.push(format!("agreeing at every level: {}", m.join(", ")));
    }
    if !dict.in_regime {
        notes.push("a_p != 0 with unequal mu lies outside the regime of the Perrin-Riou formula".into());
    }
    Ok(Report {
        passed: foot.all_hold,
        tables: vec![f, d],
        notes,
        result: json!({ "footnote": foot, "dictionary": dict }),
    })
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct MtestArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value_t = 0)]
    pub ap: i64,
    #[arg(long, default_value_t = 0)]
    pub mu_sharp: u32,
    #[arg(long, default_value_t = 0)]
    pub lambda_sharp: u32,
    #[arg(long, default_value_t = 0)]
    pub mu_flat: u32,
    #[arg(long, default_value_t = 0)]
    pub lambda_flat: u32,
    #[arg(long, default_value_t = 4)]
    pub max_n: u32,
    /// Run every combination of the value lists instead of one pair.
    #[arg(long)]
    pub grid: bool,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub mu_values: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    pub lambda_values: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0,3,-3")]
    pub ap_values: Vec<i64>,
    /// Skip the p^n <= 2000 size guard.
    #[arg(long)]
    pub force: bool,
}

fn skip_label(s: Option<SkipReason>) -> String {
    match s {
        None => "-".into(),
        Some(SkipReason::LambdaTooLarge) => "lambda>=p^(n-1)".into(),
        Some(SkipReason::LemmaMismatch) => "closed form off".into(),
        Some(SkipReason::Tie) => "tie".into(),
    }
}

fn invariant_cells(inv: &InvariantPair) -> (String, String) {
    (inv.mu.to_string(), inv.lambda.to_string())
}

fn single_report_tables(r: &ModestyReport) -> Vec<Table> {
    let mut inv = Table::new(format!("sampled pair, p = {}, a_p = {}", r.p, r.a_p), &["branch", "mu", "lambda", "series"]);
    for (name, i, f) in [("sharp", &r.sharp, &r.pair.f_sharp), ("flat", &r.flat, &r.pair.f_flat)] {
        let (mu, lambda) = invariant_cells(i);
        inv.push(vec![name.into(), mu, lambda, f.to_string()]);
    }
    let mut lv = Table::new(
        "nabla_n M = q_n + Upsilon_n(f)",
        &["n", "branch", "q", "upsilon", "expected", "nabla", "skip", "holds"],
    );
    for l in &r.levels {
        let nabla = l.nabla.iter().map(|(u, v)| format!("u={u}:{v}")).collect::<Vec<_>>().join(" ");
        lv.push(vec![
            l.n.to_string(),
            l.star.to_string(),
            l.q.clone(),
            l.upsilon_star.clone(),
            l.expected.clone(),
            nabla,
            skip_label(l.skip),
            yes_no(l.holds),
        ]);
    }
    vec![inv, lv]
}

pub fn mtest(a: &MtestArgs, seed: u64) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let n_max = positive_level(a.max_n)?;
    guard(p, n_max, a.force)?;
    if a.grid {
        let spec = ModestyGridSpec {
            p: p.get(),
            mu_values: a.mu_values.clone(),
            lambda_values: a.lambda_values.clone(),
            a_p_values: a.ap_values.clone(),
            n_max,
            seed,
        };
        let grid = modesty_grid(&spec)?;
        let mut cells = Table::new(
            format!("grid cells, p = {p}, seed = {seed}"),
            &["cell", "a_p", "sharp mu/lambda", "flat mu/lambda", "equality_from", "valid levels hold"],
        );
        for (i, r) in grid.reports.iter().enumerate() {
            let (ms, ls) = invariant_cells(&r.sharp);
            let (mf, lf) = invariant_cells(&r.flat);
            cells.push(vec![
                i.to_string(),
                r.a_p.clone(),
                format!("{ms}/{ls}"),
                format!("{mf}/{lf}"),
                r.equality_from.map_or("-".into(), |n| n.to_string()),
                yes_no(r.valid_levels_hold),
            ]);
        }
        let s = &grid.summary;
        let mut sum = Table::new("summary", &["cells", "checked", "skipped", "failures"]);
        sum.push(vec![
            s.cells.to_string(),
            s.levels_checked.to_string(),
            s.levels_skipped.to_string(),
            s.failures.to_string(),
        ]);
        let notes = s
            .skipped_by_reason
            .iter()
            .map(|(r, k)| format!("skipped ({}): {k}", skip_label(Some(*r))))
            .collect();
        return Ok(Report {
            passed: s.failures == 0,
            tables: vec![cells, sum],
            notes,
            result: serde_json::to_value(&grid)?,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pair = SyntheticColemanPair::sample(p, (a.mu_sharp, a.lambda_sharp), (a.mu_flat, a.lambda_flat), n_max, &mut rng);
    let ap = BigInt::from(a.ap);
    let r = modesty_report(&pair, &ap, &default_units(&ap), n_max)?;
    let notes = vec![match r.equality_from {
        Some(n) => format!("identity holds for every n >= {n} up to {n_max}"),
        None => format!("identity fails at n = {n_max}"),
    }];
    Ok(Report {
        passed: r.valid_levels_hold,
        tables: single_report_tables(&r),
        notes,
        result: serde_json::to_value(&r)?,
    })
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "camelCase")]
#[command(group(ArgGroup::new("source").required(true).args(["coeffs", "input"])))]
pub struct InvariantsArgs {
    #[arg(long)]
    pub prime: u64,
    /// Coefficients `c0,c1,...`, lowest degree first.
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// JSON file `{"coeffs": [...], "pPower": k}`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Multiply `--coeffs` by p^k.
    #[arg(long)]
    pub p_power: Option<u32>,
    /// Treat the input as a series known modulo p^N.
    #[arg(long, requires = "degree_cap")]
    pub precision: Option<u32>,
    /// ... and modulo X^D.
    #[arg(long, requires = "precision")]
    pub degree_cap: Option<usize>,
    /// Tabulate Upsilon_m and nabla_m for m = 1..=levels.
    #[arg(long, default_value_t = 0)]
    pub levels: u32,
}

fn read_polynomial(a: &InvariantsArgs, p: Prime) -> Result<IntPolynomial> {
    let wire = match (&a.coeffs, &a.input) {
        (Some(c), _) => PolynomialJson {
            coeffs: c.split(',').map(|s| s.trim().to_string()).collect(),
            p_power: a.p_power,
        },
        (None, Some(path)) => {
            if a.p_power.is_some() {
                bail!("--p-power applies to --coeffs; put pPower in the JSON file");
            }
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<PolynomialJson>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, None) => bail!("one of --coeffs or --input is required"),
    };
    Ok(wire.to_polynomial(p)?)
}

fn level_value(r: ssiwasawa::Result<BigInt>) -> ssiwasawa::Result<Option<BigInt>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Vanishes { .. } | Error::NotCoprime { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn opt_str(v: &Option<BigInt>) -> String {
    v.as_ref().map_or("inf".into(), |x| x.to_string())
}

fn series_valuation_str(v: &SeriesValuation) -> String {
    match v {
        SeriesValuation::Exact(x) => x.to_string(),
        SeriesValuation::AtLeast(b) => format!(">={b}"),
    }
}

pub fn invariants(a: &InvariantsArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let f = read_polynomial(a, p)?;
    let mut inv_table = Table::new(format!("Weierstrass invariants, p = {p}"), &["mu", "lambda", "certificate"]);

    if let (Some(n_prec), Some(cap)) = (a.precision, a.degree_cap) {
        if n_prec == 0 || cap == 0 {
            bail!("--precision and --degree-cap must be positive");
        }
        let s = TruncatedSeries::from_polynomial(&f, p, n_prec, cap);
        let inv = series_invariants(&s)?;
        push_invariants(&mut inv_table, &inv);
        let mut lv = Table::new("ord at zeta_{p^m} - 1", &["m", "ord"]);
        let mut vals = Vec::new();
        for m in 1..=a.levels {
            let v = s.ord_at_zeta(m)?;
            lv.push(vec![m.to_string(), series_valuation_str(&v)]);
            vals.push(json!({ "m": m, "ord": v }));
        }
        let mut tables = vec![inv_table];
        if a.levels > 0 {
            tables.push(lv);
        }
        return Ok(Report {
            passed: true,
            tables,
            notes: vec![format!("series known modulo ({p}^{n_prec}, X^{cap})")],
            result: json!({ "p": p.get(), "precision": n_prec, "degreeCap": cap, "invariants": inv, "levels": vals }),
        });
    }

    if f.is_zero() {
        bail!("the zero polynomial has no Weierstrass invariants");
    }
    let inv = weierstrass_invariants(&f, p);
    push_invariants(&mut inv_table, &inv);
    let mut tables = vec![inv_table];
    let mut rows = Vec::new();
    let mut passed = true;
    let mut notes = Vec::new();
    if a.levels > 0 {
        guard(p, a.levels, false)?;
        let mut lv = Table::new(
            "Upsilon_m and nabla_m",
            &["m", "upsilon", "nabla", "phi(p^m) mu + lambda", "agree"],
        );
        for m in 1..=a.levels {
            let ups = level_value(upsilon_n(&f, p, m))?;
            let nab = level_value(nabla_by_lengths(&f, p, m))?;
            let formula = match inv.mu {
                Mu::Finite(mu) => Some(BigInt::from(p.totient_power(m)) * mu + inv.lambda),
                Mu::Infinite => None,
            };
            let agree = ups == nab;
            passed &= agree;
            lv.push(vec![m.to_string(), opt_str(&ups), opt_str(&nab), opt_str(&formula), yes_no(agree)]);
            rows.push(json!({
                "m": m,
                "upsilon": ups.as_ref().map(|x| x.to_string()),
                "nabla": nab.as_ref().map(|x| x.to_string()),
                "formula": formula.as_ref().map(|x| x.to_string()),
                "agree": agree,
            }));
        }
        tables.push(lv);
        let threshold = weierstrass_threshold(&f, p, a.levels)?;
        notes.push(match threshold {
            Some(n) => format!("Upsilon_m = phi(p^m) mu + lambda for every m >= {n} up to {}", a.levels),
            None => format!("Upsilon_m differs from phi(p^m) mu + lambda at m = {}", a.levels),
        });
    }
    Ok(Report {
        passed,
        tables,
        notes,
        result: json!({ "p": p.get(), "series": f.to_json(), "invariants": inv, "levels": rows }),
    })
}

fn push_invariants(t: &mut Table, inv: &InvariantPair) {
    let cert = inv
        .certificate
        .map_or("-".into(), |c| format!("ord_p c_{} = {}", c.index, c.valuation));
    t.push(vec![inv.mu.to_string(), inv.lambda.to_string(), cert]);
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
#[serde(rename_all = "camelCase")]
pub struct HnArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub ap: i64,
    #[arg(long)]
    pub level: u32,
    /// Print valuations at zeta_{p^m} - 1 instead of coefficients.
    #[arg(long, value_name = "M")]
    pub eval_at_zeta: Option<u32>,
    /// Use the completed matrices with the (1+X)^(-k_i) units.
    #[arg(long)]
    pub completed: bool,
    /// p-adic precision N of the truncated completed matrix.
    #[arg(long, default_value_t = 20)]
    pub precision: u32,
    /// X-adic precision D of the truncated completed matrix.
    #[arg(long, default_value_t = 256)]
    pub degree_cap: usize,
    /// Skip the p^n <= 2000 size guard.
    #[arg(long)]
    pub force: bool,
}

fn strings<T: ToString>(m: &Mat2<T>) -> [[String; 2]; 2] {
    [[m.e11.to_string(), m.e12.to_string()], [m.e21.to_string(), m.e22.to_string()]]
}

pub fn hn(a: &HnArgs) -> Result<Report> {
    let p = Prime::new(a.prime)?;
    let n = a.level;
    let ap = BigInt::from(a.ap);
    if a.precision == 0 || a.degree_cap == 0 {
        bail!("--precision and --degree-cap must be positive");
    }
    guard(p, n.max(a.eval_at_zeta.unwrap_or(0)), a.force)?;

    match (a.completed, a.eval_at_zeta) {
        (false, None) => {
            let h = build_hn(p, &ap, n);
            let det_ok = h.det() == phi_product(p, n);
            let mut t = Table::new(format!("H_{n}, p = {p}, a_p = {ap}"), &["entry", "polynomial"]);
            for (name, e) in ["e11", "e12", "e21", "e22"].iter().zip(h.entries()) {
                t.push(vec![name.to_string(), e.to_string()]);
            }
            let notes = vec![format!("det H_{n} = prod Phi_i(1+X) for i <= {n}: {}", yes_no(det_ok))];
            Ok(Report {
                passed: det_ok,
                tables: vec![t],
                notes,
                result: json!({ "p": p.get(), "ap": a.ap, "n": n, "matrix": h.to_json(), "determinantIdentity": det_ok }),
            })
        }
        (false, Some(m)) => {
            let m = positive_level(m)?;
            let v = valuation_of_matrix_at_zeta(&build_hn(p, &ap, n), p, m)?;
            let s = v.to_strings();
            let mut t = entries_table(format!("ord_p of H_{n}(zeta_{{{p}^{m}}} - 1), a_p = {ap}"));
            t.push(matrix_rows("exact", &s));
            Ok(Report {
                passed: true,
                tables: vec![t],
                notes: Vec::new(),
                result: json!({ "p": p.get(), "ap": a.ap, "n": n, "m": m, "valuations": s }),
            })
        }
        (true, Some(m)) => {
            let m = positive_level(m)?;
            let exact = valuation_of_matrix_at_zeta(&completed_hn_at_zeta(p, &ap, n, m)?, p, m)?;
            let trunc = valuation_of_series_matrix_at_zeta(&build_completed_hn(p, &ap, n, a.precision, a.degree_cap)?, m)?;
            let consistent = exact
                .entries()
                .into_iter()
                .zip(trunc.entries())
                .all(|(x, t)| match t {
                    SeriesValuation::Exact(v) => v == x,
                    SeriesValuation::AtLeast(b) => b <= x,
                });
            let mut t = entries_table(format!("ord_p of completed H_{n}(zeta_{{{p}^{m}}} - 1), a_p = {ap}"));
            t.push(matrix_rows("exact", &strings(&exact)));
            t.push(matrix_rows("truncated", &strings(&trunc.map(series_valuation_str))));
            Ok(Report {
                passed: consistent,
                tables: vec![t],
                notes: vec![format!(
                    "truncated route works modulo ({p}^{}, X^{}); consistent with exact: {}",
                    a.precision,
                    a.degree_cap,
                    yes_no(consistent)
                )],
                result: json!({
                    "p": p.get(), "ap": a.ap, "n": n, "m": m,
                    "exact": strings(&exact),
                    "truncated": [[trunc.e11, trunc.e12], [trunc.e21, trunc.e22]],
                    "consistent": consistent,
                }),
            })
        }
        (true, None) => {
            let h = build_completed_hn(p, &ap, n, a.precision, a.degree_cap)?;
            let lifted = h.map(|s| s.lift());
            let mut t = Table::new(
                format!("completed H_{n} mod ({p}^{}, X^{}), a_p = {ap}", a.precision, a.degree_cap),
                &["entry", "coefficients"],
            );
            for (name, e) in ["e11", "e12", "e21", "e22"].iter().zip(lifted.entries()) {
                t.push(vec![name.to_string(), if e.is_zero() { "0".into() } else { e.to_csv() }]);
            }
            Ok(Report {
                passed: true,
                tables: vec![t],
                notes: Vec::new(),
                result: json!({
                    "p": p.get(), "ap": a.ap, "n": n,
                    "precision": a.precision, "degreeCap": a.degree_cap,
                    "matrix": lifted.to_json(),
                }),
            })
        }
    }
}
