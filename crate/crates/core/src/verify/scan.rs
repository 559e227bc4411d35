//! `p`-adic valuations of `a_0^(N)(p^a r, p^b s)` against the claimed
//! congruence bounds.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{params, valuation, CheckReport};
use crate::basis::{BasisCache, Space};
use crate::error::{Error, Result};
use crate::leveldata::get_level;

/// The eight `(N, p)` pairs with congruence statements.
pub fn scan_pairs() -> [(i64, u64); 8] {
    [(6, 2), (6, 3), (10, 2), (10, 5), (12, 2), (12, 3), (18, 2), (18, 3)]
}

/// First three positive integers prime to `p`.
pub fn default_residues(p: u64) -> Vec<i64> {
    (1..).filter(|r| r % p as i64 != 0).take(3).collect()
}

/// Which bound applies to a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// Coefficient 0; valuation infinite.
    Zero,
    NoClaim,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::Zero => "zero",
            RowStatus::NoClaim => "no claim",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationRow {
    #[serde(rename = "N")]
    pub level: i64,
    pub p: u64,
    pub a: u32,
    pub b: u32,
    pub r: i64,
    pub s: i64,
    pub m: i64,
    pub n: i64,
    #[serde(with = "crate::basis::bigint_string")]
    pub coeff: BigInt,
    /// `None` for a zero coefficient.
    pub valuation: Option<u32>,
    /// Claimed exponent; `None` where nothing is claimed.
    pub bound: Option<u32>,
    pub case: Case,
    pub status: RowStatus,
}

/// Smallest `valuation - bound` over the nonzero rows of one case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sharpness {
    pub case: String,
    pub rows: u64,
    pub min_margin: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<ValuationRow>,
    pub report: CheckReport,
    pub zero_rows: u64,
    pub no_claim_rows: u64,
    pub sharpness: Vec<Sharpness>,
}

/// Strong or weak routing for `(N, p, r)` and the claimed exponent for
/// `(a, b)`.
pub fn claimed_bound(level: i64, p: u64, r: i64, a: u32, b: u32) -> Result<(Case, Option<u32>)> {
    let (case, above, below): (Case, u32, Option<u32>) = match (level, p) {
        (6, 2) | (12, 2) => (Case::Strong, 2, Some(2)),
        (18, 2) if r % 3 == 0 => (Case::Strong, 2, Some(2)),
        (18, 2) => (Case::Weak, 0, None),
        (6, 3) | (18, 3) => (Case::Strong, 1, Some(1)),
        (12, 3) if r % 2 == 0 => (Case::Strong, 1, Some(1)),
        (12, 3) => (Case::Weak, 0, None),
        (10, 2) => (Case::Strong, 1, Some(1)),
        (10, 5) => (Case::Strong, 0, None),
        _ => return Err(Error::UnsupportedPair { level: level as u64, p }),
    };
    let bound = match a.cmp(&b) {
        std::cmp::Ordering::Greater => Some(a - b + above),
        std::cmp::Ordering::Less => below,
        std::cmp::Ordering::Equal => None,
    };
    Ok((case, bound))
}

fn case_label(row: &ValuationRow) -> String {
    let side = if row.a > row.b { "a>b" } else { "b>a" };
    let case = match row.case {
        Case::Strong => "strong",
        Case::Weak => "weak",
    };
    format!("{side} {case}")
}

/// All rows `(a, b, r, s)` with `a <= a_max`, `b <= b_max`, `p^a r <= n_cap`
/// and `p^b s <= n_cap`. With `require_weak`, only rows routed to the weak
/// case are kept, and the pair must have some.
#[allow(clippy::too_many_arguments)]
pub fn congruence_scan(
    cache: &BasisCache,
    level: i64,
    p: u64,
    a_max: u32,
    b_max: u32,
    r_set: &[i64],
    s_set: &[i64],
    n_cap: i64,
    require_weak: bool,
) -> Result<ScanReport> {
    get_level(level)?;
    claimed_bound(level, p, 1, 0, 0)?;
    for &x in r_set.iter().chain(s_set) {
        if x <= 0 || x % p as i64 == 0 {
            return Err(Error::InvalidArgument(format!("{x} must be positive and prime to {p}")));
        }
    }
    let pi = p as i64;
    let mut r = CheckReport::new(
        "scan",
        params([
            ("level", level.into()),
            ("p", p.into()),
            ("a_max", a_max.into()),
            ("b_max", b_max.into()),
            ("r", Value::from(r_set.to_vec())),
            ("s", Value::from(s_set.to_vec())),
            ("n_cap", n_cap.into()),
            ("require_weak", require_weak.into()),
        ]),
    );
    r.window = format!("a <= {a_max}, b <= {b_max}, m, n <= {n_cap}");
    let ms: Vec<(u32, i64)> = (0..=a_max)
        .flat_map(|a| r_set.iter().map(move |&x| (a, x)))
        .filter(|&(a, x)| pi.checked_pow(a).and_then(|q| q.checked_mul(x)).is_some_and(|m| m <= n_cap))
        .collect();
    let ns: Vec<(u32, i64)> = (0..=b_max)
        .flat_map(|b| s_set.iter().map(move |&x| (b, x)))
        .filter(|&(b, x)| pi.checked_pow(b).and_then(|q| q.checked_mul(x)).is_some_and(|n| n <= n_cap))
        .collect();
    let m_top = ms.iter().map(|&(a, x)| pi.pow(a) * x).max();
    let n_top = ns.iter().map(|&(b, x)| pi.pow(b) * x).max();
    if let (Some(m_top), Some(n_top)) = (m_top, n_top) {
        cache.reserve(level, 0, Space::M, m_top, n_top + 1)?;
        r.need(n_top + 1);
    }
    let mut rows = Vec::new();
    for &(a, x) in &ms {
        let m = pi.pow(a) * x;
        let f = cache.f(level, 0, m, n_top.unwrap_or(0) + 1)?;
        for &(b, y) in &ns {
            let n = pi.pow(b) * y;
            let (case, bound) = claimed_bound(level, p, x, a, b)?;
            if require_weak && case != Case::Weak {
                continue;
            }
            let coeff = f.coeff(n)?;
            let nu = valuation(&coeff, p);
            let status = match (bound, nu) {
                (None, _) => RowStatus::NoClaim,
                (Some(_), None) => RowStatus::Zero,
                (Some(e), Some(v)) if v >= e => RowStatus::Pass,
                (Some(_), Some(_)) => RowStatus::Fail,
            };
            rows.push(ValuationRow { level, p, a, b, r: x, s: y, m, n, coeff, valuation: nu, bound, case, status });
        }
    }
    if require_weak && rows.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no rows of ({level}, {p}) fall under a weaker bound with r in {r_set:?}"
        )));
    }
    let mut sharp: BTreeMap<String, Sharpness> = BTreeMap::new();
    let (mut zero_rows, mut no_claim_rows) = (0, 0);
    for row in &rows {
        match row.status {
            RowStatus::NoClaim => no_claim_rows += 1,
            RowStatus::Zero => {
                zero_rows += 1;
                r.compare(&[row.m, row.n], "", "", true);
            }
            RowStatus::Pass | RowStatus::Fail => {
                let (v, e) = (row.valuation.unwrap_or(0), row.bound.unwrap_or(0));
                r.compare(&[row.m, row.n], format!("nu_{p} >= {e}"), format!("nu_{p} = {v} ({})", row.coeff), v >= e);
                let label = case_label(row);
                let entry = sharp.entry(label.clone()).or_insert(Sharpness { case: label, rows: 0, min_margin: None });
                entry.rows += 1;
                let margin = v as i64 - e as i64;
                entry.min_margin = Some(entry.min_margin.map_or(margin, |x| x.min(margin)));
            }
        }
    }
    r.notes.push(format!(
        "{} rows: {} checked, {} zero, {} without a claim",
        rows.len(),
        r.cases - zero_rows,
        zero_rows,
        no_claim_rows
    ));
    Ok(ScanReport {
        rows,
        report: r.finish(),
        zero_rows,
        no_claim_rows,
        sharpness: sharp.into_values().collect(),
    })
}

/// Every pair of [`scan_pairs`] with the default residues, in parallel;
/// results in pair order.
pub fn scan_all(cache: &BasisCache, a_max: u32, b_max: u32, n_cap: i64) -> Result<Vec<ScanReport>> {
    use rayon::prelude::*;
    scan_pairs()
        .par_iter()
        .map(|&(n, p)| {
            let res = default_residues(p);
            congruence_scan(cache, n, p, a_max, b_max, &res, &res, n_cap, false)
        })
        .collect()
}

impl ScanReport {
    /// Columns `N,p,a,b,r,s,m,n,coeff,valuation,bound,status`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        w.write_record(["N", "p", "a", "b", "r", "s", "m", "n", "coeff", "valuation", "bound", "status"])
            .map_err(io)?;
        for row in &self.rows {
            w.write_record([
                row.level.to_string(),
                row.p.to_string(),
                row.a.to_string(),
                row.b.to_string(),
                row.r.to_string(),
                row.s.to_string(),
                row.m.to_string(),
                row.n.to_string(),
                row.coeff.to_string(),
                row.valuation.map_or("inf".into(), |v| v.to_string()),
                row.bound.map_or(String::new(), |v| v.to_string()),
                row.status.as_str().to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned table followed by the summary.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3} {:>2} {:>2} {:>2} {:>3} {:>3} {:>5} {:>5} {:>5} {:>5} {:<8} coeff",
            "N", "p", "a", "b", "r", "s", "m", "n", "nu", "bound", "status"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:>3} {:>2} {:>2} {:>2} {:>3} {:>3} {:>5} {:>5} {:>5} {:>5} {:<8} {}",
                row.level,
                row.p,
                row.a,
                row.b,
                row.r,
                row.s,
                row.m,
                row.n,
                row.valuation.map_or("inf".into(), |v| v.to_string()),
                row.bound.map_or("-".into(), |v| v.to_string()),
                row.status.as_str(),
                row.coeff
            );
        }
        for s in &self.sharpness {
            let margin = s.min_margin.map_or("-".into(), |m| m.to_string());
            let _ = writeln!(out, "sharpness  {:<12} rows {:<5} min(nu - bound) {}", s.case, s.rows, margin);
        }
        out.push_str(&self.report.render_text());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routing() {
        assert_eq!(claimed_bound(6, 2, 1, 3, 1).unwrap(), (Case::Strong, Some(4)));
        assert_eq!(claimed_bound(6, 2, 1, 1, 2).unwrap(), (Case::Strong, Some(2)));
        assert_eq!(claimed_bound(6, 2, 1, 2, 2).unwrap(), (Case::Strong, None));
        assert_eq!(claimed_bound(10, 5, 1, 2, 1).unwrap(), (Case::Strong, Some(1)));
        assert_eq!(claimed_bound(10, 5, 1, 1, 2).unwrap(), (Case::Strong, None));
        assert_eq!(claimed_bound(18, 2, 3, 2, 0).unwrap(), (Case::Strong, Some(4)));
        assert_eq!(claimed_bound(18, 2, 1, 2, 0).unwrap(), (Case::Weak, Some(2)));
        assert_eq!(claimed_bound(18, 2, 1, 0, 2).unwrap(), (Case::Weak, None));
        assert_eq!(claimed_bound(12, 3, 2, 2, 1).unwrap(), (Case::Strong, Some(2)));
        assert_eq!(claimed_bound(12, 3, 1, 2, 1).unwrap(), (Case::Weak, Some(1)));
        assert!(claimed_bound(6, 5, 1, 1, 0).is_err());
    }

    #[test]
    fn residues() {
        assert_eq!(default_residues(2), vec![1, 3, 5]);
        assert_eq!(default_residues(3), vec![1, 2, 4]);
        assert_eq!(default_residues(5), vec![1, 2, 3]);
    }

    #[test]
    fn small_scan() {
        let c = BasisCache::new();
        let rep = congruence_scan(&c, 6, 2, 3, 2, &[1], &[1], 40, false).unwrap();
        assert!(rep.report.passed, "{}", rep.render_text());
        let row = rep.rows.iter().find(|r| r.a == 1 && r.b == 2).unwrap();
        assert_eq!((row.m, row.n, row.bound), (2, 4, Some(2)));
        let row = rep.rows.iter().find(|r| r.a == 3 && r.b == 1).unwrap();
        assert_eq!((row.m, row.n, row.bound), (8, 2, Some(4)));
        assert!(row.valuation.is_none_or(|v| v >= 4));
        let csv = rep.to_csv().unwrap();
        assert!(csv.starts_with("N,p,a,b,r,s,m,n,coeff,valuation,bound,status\n"));
        assert_eq!(csv.lines().count(), rep.rows.len() + 1);
    }
}
