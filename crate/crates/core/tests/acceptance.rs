//! One line per acceptance criterion. Exits nonzero if a criterion fails
//! other than the single known-unattainable item in criterion 1.

mod common;

use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestRunner};
use sharpbasis::basis::Space;
use sharpbasis::eta::euler_product;
use sharpbasis::leveldata::{get_level, uncorrected_level, validate};
use sharpbasis::verify::{
    al_identity_check, duality_check, genfun_check, scan_all, theta_check, up_lemma_check, CheckReport,
};
use sharpbasis::{BasisCache, Error, QSeries};

const LEVELS: [i64; 4] = [6, 10, 12, 18];

struct Line {
    pass: bool,
    /// Failed, but only in a way recorded as unattainable.
    known: bool,
    detail: String,
    level18: bool,
}

fn line(pass: bool, detail: String, level18: bool) -> Line {
    Line { pass, known: false, detail, level18 }
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn failed(reports: &[(i64, CheckReport)]) -> Vec<String> {
    reports
        .iter()
        .filter(|(_, r)| !r.passed)
        .map(|(n, r)| format!("N={n} {} {:?}", r.check, r.counterexamples.first()))
        .collect()
}

fn criterion1() -> Line {
    let t = Instant::now();
    let mut checked = 0;
    let mut mismatches = Vec::new();
    let mut level18 = true;
    let mut compare = |n: i64, name: &str, computed: QSeries, printed: &QSeries| {
        checked += 1;
        if let Some(e) = computed.first_difference(printed) {
            if n == 18 {
                level18 = false;
            }
            mismatches.push((n, name.to_string(), e, printed.render_terms(3), computed.render_terms(3)));
        }
    };
    for n in [6, 12] {
        let d = get_level(n).unwrap();
        let printed = d.hauptmodul.printed.as_ref().unwrap();
        compare(n, "psi", d.hauptmodul_series(printed.prec()).unwrap(), printed);
    }
    for (n, name) in [(6, "f_{2,-2}"), (12, "f_{2,-4}"), (10, "f_{4,-6}"), (10, "f_{2,-2}"), (18, "f_{2,-6}")] {
        let d = get_level(n).unwrap();
        let w = d.weight_forms.iter().find(|w| w.name == name).unwrap();
        let printed = w.printed.as_ref().unwrap();
        compare(n, name, w.expand(printed.prec()).unwrap(), printed);
        if let Some(exp) = &w.expected {
            compare(n, &format!("{name} (corrected)"), w.expand(exp.prec()).unwrap(), exp);
        }
    }
    let elapsed = t.elapsed();
    let only_known = mismatches.len() == 1 && mismatches[0].0 == 10 && mismatches[0].1 == "f_{2,-2}";
    let detail = if mismatches.is_empty() {
        format!("{checked} expansions match, {}", secs(elapsed))
    } else {
        let m = mismatches
            .iter()
            .map(|(n, name, e, p, c)| format!("N={n} {name} differs at q^{e}: printed {p}, computed {c}"))
            .collect::<Vec<_>>()
            .join("; ");
        let why = if only_known {
            " (unattainable: the printed order 3 contradicts n0(2) = 2 and the printed quotient's own offset 2; \
             the corrected form matches its frozen expansion)"
        } else {
            ""
        };
        format!("{} of {checked} comparisons match; {m}{why}, {}", checked - mismatches.len(), secs(elapsed))
    };
    Line { pass: mismatches.is_empty() && elapsed < Duration::from_secs(1), known: only_known, detail, level18 }
}

fn criterion2(cache: &BasisCache) -> Line {
    let t = Instant::now();
    let mut elements = 0;
    let mut bad = Vec::new();
    for n in LEVELS {
        let d = get_level(n).unwrap();
        for k in (-4..=6).step_by(2) {
            for space in [Space::M, Space::S] {
                let lo = sharpbasis::basis::first_index(d, k, space).unwrap();
                for m in lo..=30 {
                    elements += 1;
                    match cache.element(n, k, space, m, 61) {
                        Ok(e) if e.expansion.is_integral() => {}
                        Ok(_) => bad.push(format!("N={n} k={k} {space} m={m} not integral")),
                        Err(err) => bad.push(format!("N={n} k={k} {space} m={m}: {err}")),
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    let l18 = !bad.iter().any(|b| b.starts_with("N=18"));
    line(
        bad.is_empty() && el < Duration::from_secs(60),
        format!("{elements} elements integral through q^60 ({} bad), {}", bad.len(), secs(el)),
        l18,
    )
}

fn criterion3(cache: &BasisCache) -> Line {
    let mut reports = Vec::new();
    for n in LEVELS {
        for k in (-4..=6).step_by(2) {
            reports.push((n, duality_check(cache, n, k, 30, 60).unwrap()));
        }
    }
    let cases: u64 = reports.iter().map(|(_, r)| r.cases).sum();
    let bad = failed(&reports);
    let l18 = reports.iter().filter(|(n, _)| *n == 18).all(|(_, r)| r.passed);
    line(bad.is_empty(), format!("{cases} comparisons incl. constant terms, {} failing {bad:?}", bad.len()), l18)
}

fn criterion4(cache: &BasisCache) -> Line {
    let mut reports = Vec::new();
    for n in LEVELS {
        for k in [-2, 0, 2, 4] {
            reports.push((n, genfun_check(cache, n, k, 8, 32).unwrap()));
        }
    }
    let cells: u64 = reports.iter().map(|(_, r)| r.cases).sum();
    let vacuous = reports.iter().any(|(_, r)| r.vacuous);
    let bad = failed(&reports);
    let l18 = reports.iter().filter(|(n, _)| *n == 18).all(|(_, r)| r.passed);
    line(bad.is_empty() && !vacuous, format!("{cells} admissible cells over 16 (N, k), {} failing {bad:?}", bad.len()), l18)
}

fn criterion5(cache: &BasisCache) -> Line {
    let reports: Vec<_> = LEVELS.iter().map(|&n| (n, theta_check(cache, n, 20, 60).unwrap())).collect();
    let named = reports[0].1.notes.iter().any(|s| s.contains("g_{2,1}"));
    let bad = failed(&reports);
    let l18 = reports[3].1.passed;
    line(
        bad.is_empty() && named,
        format!("theta(f_0,m) = -m g_2,m for m <= 20 on 4 levels; ladder g_2,1 at level 6 equals its eta quotient: {named}"),
        l18,
    )
}

fn criterion6(cache: &BasisCache) -> Line {
    let reports: Vec<_> = [12, 18].iter().map(|&n| (n, up_lemma_check(cache, n, 24, 40).unwrap())).collect();
    let zeros: Vec<&String> = reports.iter().flat_map(|(_, r)| r.notes.iter()).collect();
    let bad = failed(&reports);
    line(bad.is_empty(), format!("m <= 24, 40 terms each; {zeros:?}"), reports[1].1.passed)
}

fn criterion7() -> Line {
    let cache = BasisCache::new();
    let t = Instant::now();
    let scans = scan_all(&cache, 4, 4, 400).unwrap();
    let el = t.elapsed();
    let rows: usize = scans.iter().map(|s| s.rows.len()).sum();
    let failures: u64 = scans.iter().map(|s| s.report.failures).sum();
    let zero: u64 = scans.iter().map(|s| s.zero_rows).sum();
    let no_claim: u64 = scans.iter().map(|s| s.no_claim_rows).sum();
    let l18 = scans.iter().filter(|s| s.rows.first().is_some_and(|r| r.level == 18)).all(|s| s.report.passed);
    line(
        failures == 0 && el < Duration::from_secs(600),
        format!("8 pairs, {rows} rows, {failures} failing, {zero} zero, {no_claim} without a claim, cold cache {}", secs(el)),
        l18,
    )
}

fn criterion8(cache: &BasisCache) -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, p, want) in [(6, 2, 2), (6, 3, 1), (10, 2, 1)] {
        match al_identity_check(cache, n, p, &[1, 5, 7], 2, 40) {
            Ok(r) => {
                let unique = !r.notes.iter().any(|s| s.contains("both signs"));
                let derived = r.notes.iter().any(|s| s.contains(&format!("{p}^{want} |")));
                ok &= r.passed && unique && derived;
                let sign = r.notes.iter().find(|s| s.starts_with("sign")).cloned().unwrap_or_default();
                parts.push(format!("({n},{p}) {} {sign}", if r.passed && unique && derived { "ok" } else { "FAIL" }));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("({n},{p}) {e}"));
            }
        }
    }
    line(ok, format!("{}; U_2 f_0,r at level 6 divisible by 4 from the identity", parts.join(", ")), true)
}

fn criterion9() -> Line {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    let strat = (common::arb_series(64), common::arb_series(64), common::arb_series(64));
    let ring = runner.run(&strat, |(a, b, c)| {
        common::ring_axioms(&a, &b, &c).map_err(proptest::test_runner::TestCaseError::fail)
    });
    let euler = euler_product(65) == common::direct_euler(65);
    line(ring.is_ok() && euler, format!("1000 random triples: {ring:?}; euler product through q^64 matches: {euler}"), true)
}

fn criterion10(level18: bool) -> Line {
    let runs: Vec<Vec<String>> = (0..2)
        .map(|_| {
            let d = uncorrected_level(18).unwrap();
            validate(&d, 64)
                .failures()
                .filter(|c| c.error.as_deref() == Some("FractionalValuation"))
                .map(|c| c.name.clone())
                .collect()
        })
        .collect();
    let direct = matches!(
        uncorrected_level(18).unwrap().weight_form(2).unwrap().expand(10),
        Err(Error::FractionalValuation { .. })
    );
    let ok = !runs[0].is_empty() && runs[0] == runs[1] && direct && level18;
    line(
        ok,
        format!("uncorrected level 18 fails with FractionalValuation in {:?} (twice, identical); corrected level 18 passes 1-7: {level18}", runs[0]),
        true,
    )
}

fn main() {
    let cache = BasisCache::new();
    let mut lines: Vec<Line> = Vec::new();
    lines.push(criterion1());
    lines.push(criterion2(&cache));
    lines.push(criterion3(&cache));
    lines.push(criterion4(&cache));
    lines.push(criterion5(&cache));
    lines.push(criterion6(&cache));
    lines.push(criterion7());
    let level18 = lines.iter().all(|l| l.level18);
    lines.push(criterion8(&cache));
    lines.push(criterion9());
    lines.push(criterion10(level18));
    let mut unexpected = 0;
    for (i, l) in lines.iter().enumerate() {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {tag}  {}", i + 1, l.detail);
        if !l.pass && !l.known {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures", lines.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
