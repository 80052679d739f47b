//! Acceptance suite. Runs each criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use num_bigint::BigInt;
use ssiwasawa::cyclotomic::{mod_p_dimension, omega, omega_pm, omega_pm_mod_p_monomial, phi_product, Parity};
use ssiwasawa::growth::{dictionary_crosscheck, footnote_identity_check, q_table, q_value, Convention, GrowthParams};
use ssiwasawa::matrix::{
    build_completed_hn, build_hn, completed_hn_at_zeta, cross_difference_report, extract_columns,
};
use ssiwasawa::ranks::{
    modesty_grid, nabla_by_lengths, sample_series, upsilon_n, weierstrass_invariants, ModestyGridSpec, Mu, Star,
};
use ssiwasawa::tropical::{lemma_brute_force_check, valuation_of_matrix_at_zeta, valuation_of_series_matrix_at_zeta};
use ssiwasawa::SeriesValuation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of one criterion: pass flag and a one-line detail.
type Outcome = (bool, String);

fn valuation_lemma() -> Outcome {
    let mut cells: Vec<(u64, i64, u32)> = Vec::new();
    for a in [0, 3, -3] {
        for n in 1..=4 {
            cells.push((3, a, n));
        }
    }
    for n in 1..=3 {
        cells.push((5, 0, n));
    }
    let mut failures = Vec::new();
    for &(p, a, n) in &cells {
        let chk = lemma_brute_force_check(prime(p), &big(a), n).unwrap();
        let h = build_hn(prime(p), &big(a), n);
        let oracle = (ord_at_zeta_oracle(&h.e11, p, n), ord_at_zeta_oracle(&h.e21, p, n));
        let crate_direct = (chk.direct[0][0].clone(), chk.direct[1][0].clone());
        let oracle_ok = (oracle.0.to_string(), oracle.1.to_string()) == crate_direct;
        if !(chk.all_agree() && oracle_ok) {
            failures.push(format!(
                "(p={p}, a_p={a}, n={n}): direct=({}, {}) minplus=({}, {}) closed=({}, {})",
                chk.direct[0][0],
                chk.direct[1][0],
                chk.minplus[0][0],
                chk.minplus[1][0],
                chk.closed_form.top,
                chk.closed_form.bottom
            ));
        }
    }
    if failures.is_empty() {
        (true, format!("{} cells, three routes and norm oracle agree", cells.len()))
    } else {
        (false, format!("{}/{} cells disagree: {}", failures.len(), cells.len(), failures.join("; ")))
    }
}

fn determinant_identity() -> Outcome {
    let mut checked = 0;
    let mut omega_matches = 0;
    for p in [3, 5] {
        for a in [0, p as i64, -(p as i64)] {
            for n in 1..=5 {
                let q = prime(p);
                let h = build_hn(q, &big(a), n);
                if h.det() != phi_product(q, n) {
                    return (false, format!("det H_{n} wrong for p={p} a_p={a}"));
                }
                let cols = extract_columns(&h, q, n).unwrap();
                let rep = cross_difference_report(&cols, q, n);
                if !rep.equals_phi_product || cols.cross_difference() != phi_product(q, n - 1) {
                    return (false, format!("cross difference wrong for p={p} a_p={a} n={n}"));
                }
                if cols.cross_difference() == omega(q, n - 1) {
                    omega_matches += 1;
                }
                checked += 1;
            }
        }
    }
    (
        true,
        format!(
            "{checked} cases; cross difference = prod_{{i<n}} Phi_i, equals omega_{{n-1}} in {omega_matches} of them"
        ),
    )
}

fn q_consistency() -> Outcome {
    for p in [3, 5, 7] {
        for row in q_table(prime(p), 12) {
            let (s, f) = (q_oracle(p, row.n, true), q_oracle(p, row.n, false));
            if !row.forms_agree || row.q_sharp != s.to_string() || row.q_flat != f.to_string() {
                return (false, format!("p={p} n={}: {row:?}", row.n));
            }
        }
    }
    let spots = q_value(prime(3), 3, Star::Sharp) == big(6) && q_value(prime(3), 2, Star::Flat) == big(2);
    (spots, format!("p in {{3,5,7}}, n <= 12; q_3^sharp(3)=6, q_2^flat(3)=2: {spots}"))
}

fn footnote() -> Outcome {
    for p in [3u64, 5, 7] {
        let rep = footnote_identity_check(prime(p), 10);
        // independent floor arithmetic in i128
        for row in &rep.rows {
            let f = |k: u32| (p as i128).pow(k + 1) / ((p as i128).pow(2) - 1);
            let diff = f(row.n) - f(row.n - 1);
            let want = if row.n % 2 == 1 { q_oracle(p, row.n, true) + 1 } else { q_oracle(p, row.n, false) };
            if diff != want || row.difference != diff.to_string() || !row.holds {
                return (false, format!("p={p} n={}", row.n));
            }
        }
    }
    (true, "p in {3,5,7}, 1 <= n <= 10".into())
}

fn weierstrass_ranks() -> Outcome {
    let p = prime(3);
    let mut rng = ChaCha8Rng::seed_from_u64(20240521);
    let mut series = 0;
    let mut checks = 0;
    for mu in 0..=3u32 {
        for lambda in 0..=8u32 {
            for _ in 0..6 {
                let f = sample_series(p, mu, lambda, 5, &mut rng);
                let inv = weierstrass_invariants(&f, p);
                if (inv.mu, inv.lambda) != (Mu::Finite(mu), lambda as u64) {
                    return (false, format!("sampler missed ({mu}, {lambda}): {f}"));
                }
                series += 1;
                for n in 1..=5u32 {
                    if 3u64.pow(n - 1) <= lambda as u64 {
                        continue;
                    }
                    let expected = BigInt::from(p.totient_power(n)) * mu + lambda;
                    let ups = upsilon_n(&f, p, n).unwrap();
                    let nab = nabla_by_lengths(&f, p, n).unwrap();
                    if ups != expected || nab != ups {
                        return (false, format!("f={f} n={n}: upsilon={ups} nabla={nab} expected={expected}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    (series >= 200, format!("{series} series, {checks} (series, n) checks"))
}

fn modesty_proposition() -> Outcome {
    let spec = ModestyGridSpec {
        p: 3,
        mu_values: vec![0, 1, 2],
        lambda_values: (0..=4).collect(),
        a_p_values: vec![0, 3, -3],
        n_max: 4,
        seed: 7,
    };
    let report = modesty_grid(&spec).unwrap();
    let s = &report.summary;
    let u_dependent = report
        .reports
        .iter()
        .flat_map(|r| &r.levels)
        .filter(|l| l.skip.is_none() && !l.u_independent)
        .count();
    let generator_mismatch = report
        .reports
        .iter()
        .flat_map(|r| &r.levels)
        .filter(|l| l.generator_upsilon.iter().zip(&l.nabla).any(|(g, (_, v))| g != v))
        .count();
    let skipped: Vec<String> = s.skipped_by_reason.iter().map(|(r, k)| format!("{r:?}={k}")).collect();
    let ok = s.failures == 0 && u_dependent == 0 && generator_mismatch == 0 && s.levels_checked > 0;
    (
        ok,
        format!(
            "{} cells, {} levels checked, {} failures, skipped [{}]",
            s.cells,
            s.levels_checked,
            s.failures,
            skipped.join(", ")
        ),
    )
}

fn completed_matrices() -> Outcome {
    let p = prime(3);
    let (precision, degree_cap) = (20, 256);
    let mut compared = 0;
    for a in [0, 3, -3] {
        let a = big(a);
        for n in 1..=3 {
            let plain = build_hn(p, &a, n);
            let truncated = build_completed_hn(p, &a, n, precision, degree_cap).unwrap();
            for m in 1..=n {
                let want = valuation_of_matrix_at_zeta(&plain, p, m).unwrap();
                let exact = valuation_of_matrix_at_zeta(&completed_hn_at_zeta(p, &a, n, m).unwrap(), p, m).unwrap();
                if exact != want {
                    return (false, format!("exact route a_p={a} n={n} m={m}: {exact:?} vs {want:?}"));
                }
                let series = valuation_of_series_matrix_at_zeta(&truncated, m).unwrap();
                for (got, w) in series.entries().into_iter().zip(want.entries()) {
                    let fine = match got {
                        SeriesValuation::Exact(v) => v == w,
                        SeriesValuation::AtLeast(b) => w.is_infinite() || w >= b,
                    };
                    let certified_finite = !w.is_infinite() && matches!(got, SeriesValuation::Exact(_));
                    if !fine || (!w.is_infinite() && !certified_finite) {
                        return (false, format!("N={precision} route a_p={a} n={n} m={m}: {got:?} vs {w}"));
                    }
                }
                compared += 1;
            }
        }
    }
    (true, format!("{compared} (a_p, n, m) cases at N={precision}, D={degree_cap}"))
}

fn mod_p_count() -> Outcome {
    let p = prime(3);
    for n in 1..=5u32 {
        for parity in [Parity::Even, Parity::Odd] {
            if omega_pm(p, n - 1, parity).mod_p(p) != omega_pm_mod_p_monomial(p, n - 1, parity) {
                return (false, format!("omega_{}^{parity:?} mod 3", n - 1));
            }
        }
        let want: u64 = (1..n).map(|m| 3u64.pow(m) - 3u64.pow(m - 1)).sum();
        let got = mod_p_dimension(p, n).unwrap();
        if got != want || got != 3u64.pow(n - 1) - 1 {
            return (false, format!("n={n}: dimension {got}, expected {want}"));
        }
    }
    (true, "p=3, n <= 5".into())
}

fn dictionary() -> Outcome {
    let mut sets = vec![GrowthParams::zeros(true), GrowthParams::zeros(false)];
    for (ms, ls, mf, lf, r) in [(0, 1, 0, 2, 0), (1, 2, 1, 1, 1), (0, 0, 0, 3, 2), (1, 0, 1, 0, 0)] {
        for a_p_zero in [true, false] {
            sets.push(GrowthParams {
                a_p_zero,
                mu_sharp: Mu::Finite(ms),
                lambda_sharp: ls,
                mu_flat: Mu::Finite(mf),
                lambda_flat: lf,
                r_infinity: r,
                eta_trivial: true,
            });
        }
    }
    let mut table = Vec::new();
    for p in [3, 5] {
        for params in &sets {
            let a = dictionary_crosscheck(params, prime(p), 2, 10, Convention::Body).unwrap();
            let b = dictionary_crosscheck(params, prime(p), 2, 10, Convention::Body).unwrap();
            if serde_json::to_string(&a).unwrap() != serde_json::to_string(&b).unwrap() {
                return (false, "report not deterministic".into());
            }
            let complete = a.rows.len() == 9 && a.rows.iter().all(|r| r.cells.len() == 4) && a.summary.len() == 4;
            if !complete {
                return (false, "report incomplete".into());
            }
            if !a.rows.iter().all(|r| r.floor_matches_q) {
                return (false, format!("floor term mismatch at p={p}"));
            }
            let matching: Vec<String> =
                a.matching.iter().map(|c| format!("{}+{}", c.convention, c.mu_weight_offset)).collect();
            table.push(format!("p={p} {:?}:[{}]", short(params), matching.join(",")));
        }
    }
    (true, format!("{} reports; matching choices: {}", table.len(), table.join(" ")))
}

fn short(g: &GrowthParams) -> String {
    format!(
        "a0={} mu=({},{}) la=({},{}) r={}",
        g.a_p_zero as u8, g.mu_sharp, g.mu_flat, g.lambda_sharp, g.lambda_flat, g.r_infinity
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("valuation lemma", valuation_lemma),
        ("determinant identity", determinant_identity),
        ("q-sequence consistency", q_consistency),
        ("footnote identity", footnote),
        ("weierstrass/rank agreement", weierstrass_ranks),
        ("modesty proposition grid", modesty_proposition),
        ("completed matrices", completed_matrices),
        ("mod-p dimension count", mod_p_count),
        ("dictionary diagnostic", dictionary),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}) [{:.1}s]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
