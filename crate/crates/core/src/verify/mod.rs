//! Mechanical checks of the basis identities: duality, the generating
//! function, `theta`, the `U_p` level-lowering lemma, the Atkin-Lehner
//! identities and the congruence scans.

mod scan;

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::basis::{decompose_in_hauptmodul, first_index, BasisCache, Space};
use crate::error::{Error, Result};
use crate::leveldata::get_level;
use crate::operators::{al_sum_with, theta, u_p};
use crate::series::{QSeries, Rational};

pub use scan::{claimed_bound, congruence_scan, default_residues, scan_all, scan_pairs, Case, RowStatus, ScanReport, Sharpness, ValuationRow};

/// Stored counterexamples per report; the total is in `failures`.
pub const MAX_COUNTEREXAMPLES: usize = 25;

/// One failed comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub indices: Vec<i64>,
    pub expected: String,
    pub got: String,
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    /// Human description of what was compared.
    pub window: String,
    /// Number of individual comparisons made.
    pub cases: u64,
    /// No comparison was possible in the window.
    pub vacuous: bool,
    pub passed: bool,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
    /// Largest absolute q-precision requested.
    pub precision: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(check: &str, params: BTreeMap<String, Value>) -> Self {
        CheckReport {
            check: check.into(),
            params,
            window: String::new(),
            cases: 0,
            vacuous: false,
            passed: true,
            failures: 0,
            counterexamples: Vec::new(),
            precision: 0,
            notes: Vec::new(),
        }
    }

    fn compare(&mut self, indices: &[i64], expected: impl fmt::Display, got: impl fmt::Display, ok: bool) {
        self.cases += 1;
        if !ok {
            self.fail(indices, expected, got);
        }
    }

    fn fail(&mut self, indices: &[i64], expected: impl fmt::Display, got: impl fmt::Display) {
        self.passed = false;
        self.failures += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample {
                indices: indices.to_vec(),
                expected: expected.to_string(),
                got: got.to_string(),
            });
        }
    }

    fn need(&mut self, prec: i64) {
        self.precision = self.precision.max(prec);
    }

    fn finish(mut self) -> Self {
        if self.cases == 0 {
            self.vacuous = true;
        }
        self
    }

    /// Aligned key/value text.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())))
            .collect::<Vec<_>>()
            .join(" ");
        let status = match (self.passed, self.vacuous) {
            (true, true) => "pass (vacuous: empty window)",
            (true, false) => "pass",
            (false, _) => "FAIL",
        };
        let _ = writeln!(out, "{:<10} {}", "check", self.check);
        let _ = writeln!(out, "{:<10} {}", "params", params);
        let _ = writeln!(out, "{:<10} {}", "window", self.window);
        let _ = writeln!(out, "{:<10} {}", "cases", self.cases);
        let _ = writeln!(out, "{:<10} {}", "precision", self.precision);
        let _ = writeln!(out, "{:<10} {}", "result", status);
        for n in &self.notes {
            let _ = writeln!(out, "{:<10} {}", "note", n);
        }
        if !self.counterexamples.is_empty() {
            let _ = writeln!(out, "{:<10} {} (showing {})", "failures", self.failures, self.counterexamples.len());
            for c in &self.counterexamples {
                let idx = c.indices.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
                let _ = writeln!(out, "  ({idx:<12}) expected {:<24} got {}", c.expected, c.got);
            }
        }
        out
    }
}

fn params<const K: usize>(pairs: [(&str, Value); K]) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn check_weight(k: i64) -> Result<()> {
    if k % 2 != 0 {
        return Err(Error::OddWeight(k));
    }
    Ok(())
}

/// Exact `p`-adic valuation; `None` for zero.
pub fn valuation(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

/// `a_k(m, n) = -b_{2-k}(n, m)` for `-n0(k) <= m <= m_max` and
/// `-n1(2-k) <= n <= n_max`, together with the vanishing constant term of
/// `f_{k,m} g_{2-k,n}`, which equals `a_k(m, n) + b_{2-k}(n, m)`.
pub fn duality_check(cache: &BasisCache, level: i64, k: i64, m_max: i64, n_max: i64) -> Result<CheckReport> {
    check_weight(k)?;
    let data = get_level(level)?;
    let m0 = first_index(data, k, Space::M)?;
    let n0 = first_index(data, 2 - k, Space::S)?;
    let mut r = CheckReport::new(
        "duality",
        params([
            ("level", level.into()),
            ("weight", k.into()),
            ("m_max", m_max.into()),
            ("n_max", n_max.into()),
        ]),
    );
    r.window = format!("{m0} <= m <= {m_max}, {n0} <= n <= {n_max}");
    if m_max >= m0 && n_max >= n0 {
        cache.reserve(level, k, Space::M, m_max, n_max + 1)?;
        cache.reserve(level, 2 - k, Space::S, n_max, m_max + 1)?;
        r.need(n_max.max(m_max) + 1);
    }
    for m in m0..=m_max {
        let f = cache.f(level, k, m, n_max + 1)?;
        for n in n0..=n_max {
            let g = cache.g(level, 2 - k, n, m_max + 1)?;
            let a = f.coeff(n)?;
            let b = g.coeff(m)?;
            r.compare(&[m, n, 0], &a, -&b, a == -&b);
            let ct = f.expansion.product_coeff(&g.expansion, 0)?;
            let sum = Rational::from_integer(&a + &b);
            r.compare(&[m, n, 1], format!("{sum} = 0"), &ct, ct == sum && ct.is_zero());
        }
    }
    r.notes.push("indices (m, n, 0): coefficient duality; (m, n, 1): constant term".into());
    Ok(r.finish())
}

/// Two-variable form of the generating function:
/// `(F(y) - F(x)) sum_{m=-n0}^{m_max} f_{k,m}(x) y^m = f_{k,-n0}(x) g_{2-k,n0+1}(y)`
/// with `F = f_{0,1}`, `x = q_tau`, `y = q_z`. Each side is kept as a map
/// from the `x`-exponent to a series in `y`; a cell `(i, j)` is compared
/// when every contribution to it is known, i.e. `j < min(z_prec, m_max)`
/// and `i < z_prec - m_max`.
pub fn genfun_check(cache: &BasisCache, level: i64, k: i64, m_max: i64, z_prec: i64) -> Result<CheckReport> {
    check_weight(k)?;
    let data = get_level(level)?;
    let n0 = data.n0(k)?;
    let m_lo = -n0;
    let mut r = CheckReport::new(
        "genfun",
        params([
            ("level", level.into()),
            ("weight", k.into()),
            ("m_max", m_max.into()),
            ("z_prec", z_prec.into()),
        ]),
    );
    if m_max < m_lo + 1 {
        r.window = "no admissible cells".into();
        return Ok(r.finish());
    }
    let gi = first_index(data, 2 - k, Space::S)?;
    if gi != n0 + 1 {
        return Err(Error::InvalidArgument(format!(
            "first index of the dual space is {gi}, expected {}",
            n0 + 1
        )));
    }
    let x_prec = z_prec;
    let y_prec = z_prec.min(m_max);
    let i_lo = -m_max - 1;
    let i_hi = x_prec - m_max;
    r.need(z_prec.max(x_prec + 1));
    if i_hi <= i_lo || y_prec <= -1 {
        r.window = "no admissible cells".into();
        return Ok(r.finish());
    }
    let big_f_x = cache.f(level, 0, 1, x_prec + 1)?.expansion.clone();
    let big_f_y = cache.f(level, 0, 1, z_prec)?.expansion.clone();
    let g_y = cache.g(level, 2 - k, n0 + 1, z_prec)?.expansion.clone();
    let f: Vec<QSeries> = (m_lo..=m_max)
        .map(|m| cache.f(level, k, m, x_prec + 1).map(|e| e.expansion.clone()))
        .collect::<Result<_>>()?;
    let ff: Vec<QSeries> = f.iter().map(|s| &big_f_x * s).collect();
    let mut cells = 0u64;
    for i in i_lo..i_hi {
        // S_i(y) = sum_m a_k(m, i) y^m, known below y^(m_max + 1)
        let s_i = QSeries::from_coeffs(
            m_lo,
            f.iter().map(|s| s.coeff(i)).collect::<Result<Vec<_>>>()?,
            m_max + 1,
        );
        // (F * f_{k,m})(x) at x^i, as a series in y
        let t_i = QSeries::from_coeffs(
            m_lo,
            ff.iter().map(|s| s.coeff(i)).collect::<Result<Vec<_>>>()?,
            m_max + 1,
        );
        let lhs = &(&big_f_y * &s_i) - &t_i;
        let rhs = g_y.scale(&f[0].coeff(i)?);
        let j_hi = y_prec.min(lhs.prec()).min(rhs.prec());
        for j in (-n0 - 1).min(lhs.valuation()).min(rhs.valuation())..j_hi {
            let (a, b) = (rhs.coeff(j)?, lhs.coeff(j)?);
            cells += 1;
            r.compare(&[i, j], &a, &b, a == b);
        }
    }
    r.window = format!("x^i y^j with {i_lo} <= i < {i_hi}, j < {y_prec}");
    r.notes.push(format!("{cells} admissible cells; sum over {m_lo} <= m <= {m_max}"));
    Ok(r.finish())
}

/// `theta(f_{0,m}) = -m g_{2,m}` for `1 <= m <= m_max`, plus agreement of
/// the ladder with every named eta quotient `g_{k,m}` or `f_{k,m}` of the
/// level.
pub fn theta_check(cache: &BasisCache, level: i64, m_max: i64, prec: i64) -> Result<CheckReport> {
    let data = get_level(level)?;
    let mut r = CheckReport::new(
        "theta",
        params([("level", level.into()), ("m_max", m_max.into()), ("prec", prec.into())]),
    );
    r.window = format!("1 <= m <= {m_max}, exponents below q^{prec}");
    r.need(prec);
    let lo = first_index(data, 2, Space::S)?.max(1);
    for m in lo..=m_max {
        let f = cache.f(level, 0, m, prec)?;
        let g = cache.g(level, 2, m, prec)?;
        let lhs = theta(&f.expansion).truncate(prec);
        let rhs = g.expansion.scale_int(&BigInt::from(-m)).truncate(prec);
        match lhs.first_difference(&rhs) {
            None => r.compare(&[m], "", "", true),
            Some(n) => r.compare(&[m, n], rhs.coeff(n)?, lhs.coeff(n)?, false),
        }
    }
    for named in &data.named {
        let Some((space, k, m)) = parse_basis_name(&named.name) else { continue };
        let ladder = cache.element(level, k, space, m, prec)?.expansion.truncate(prec);
        let direct = named.quotient.expand_series(prec)?;
        r.notes.push(format!("named {} compared with the ladder", named.name));
        match direct.first_difference(&ladder) {
            None => r.compare(&[m], "", "", true),
            Some(n) => r.compare(&[m, n], direct.coeff(n)?, ladder.coeff(n)?, false),
        }
    }
    Ok(r.finish())
}

/// `f_{k,m}` / `g_{k,m}` names.
fn parse_basis_name(name: &str) -> Option<(Space, i64, i64)> {
    let space = match name.chars().next()? {
        'f' => Space::M,
        'g' => Space::S,
        _ => return None,
    };
    let inner = name.get(1..)?.strip_prefix("_{")?.strip_suffix('}')?;
    let (k, m) = inner.split_once(',')?;
    Some((space, k.trim().parse().ok()?, m.trim().parse().ok()?))
}

/// `U_p f_{0,m}^(N) = f_{0,m/p}^(6)` when `p | m` and `0` otherwise, for
/// `(N, p) = (12, 2), (18, 3)`, compared on `terms` coefficients from the
/// valuation of the image.
pub fn up_lemma_check(cache: &BasisCache, level: i64, m_max: i64, terms: i64) -> Result<CheckReport> {
    let p: i64 = match level {
        12 => 2,
        18 => 3,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "the level-lowering lemma covers levels 12 and 18, not {level}"
            )))
        }
    };
    let mut r = CheckReport::new(
        "uplemma",
        params([
            ("level", level.into()),
            ("p", p.into()),
            ("m_max", m_max.into()),
            ("terms", terms.into()),
        ]),
    );
    let data = get_level(level)?;
    let lo = first_index(data, 0, Space::M)?.max(1);
    r.window = format!("{lo} <= m <= {m_max}, {terms} terms of U_{p} f_{{0,m}}");
    let mut zeros = 0;
    for m in lo..=m_max {
        let val = -(m / p);
        let prec = p * (val + terms);
        r.need(prec);
        let img = u_p(&cache.f(level, 0, m, prec)?.expansion.truncate(prec), p as u64);
        if img.prec() - val.min(img.valuation()) < terms {
            return Err(Error::InsufficientPrecision {
                context: format!("U_{p} f_{{0,{m}}}"),
                have: img.prec(),
                needed: Some(val + terms),
            });
        }
        if m % p == 0 {
            let target = cache.f(6, 0, m / p, img.prec())?.expansion.truncate(img.prec());
            match target.first_difference(&img) {
                None => r.compare(&[m], "", "", true),
                Some(n) => r.compare(&[m, n], target.coeff(n)?, img.coeff(n)?, false),
            }
        } else {
            zeros += 1;
            match img.terms().next() {
                None => r.compare(&[m], "", "", true),
                Some((n, c)) => r.compare(&[m, n], 0, c, false),
            }
        }
    }
    r.notes.push(format!("{zeros} indices with U_{p} image identically zero"));
    Ok(r.finish())
}

/// Atkin-Lehner identities for `(level, p)`. Base case: with
/// `-f_{0,r} = sum c_i psi_alt^i`, the series `p U_p f_{0,r} - sum c_i
/// (sign scale psi_cusp)^i` is a constant. Inductive case, `1 <= a <= a_max`:
/// with `G = U_p f_{0,p^a r} - f_{0,p^(a-1) r}` and `f_{0,p^a r} = sum c_i
/// psi_alt^i`, the series `p G - (p - 1) sum c_i (sign scale psi_cusp)^i` is
/// a constant. The sign is chosen empirically and compared with the
/// fixture; the divisibility `nu_p(U_p f_{0,r}) >= nu_p(scale) - 1` is then
/// derived from the integrality of the `c_i` and of `psi_cusp`.
pub fn al_identity_check(cache: &BasisCache, level: i64, p: u64, r_set: &[i64], a_max: u32, terms: i64) -> Result<CheckReport> {
    let data = get_level(level)?;
    let aux = data.aux(p)?;
    let pi = p as i64;
    let mut rep = CheckReport::new(
        "al",
        params([
            ("level", level.into()),
            ("p", p.into()),
            ("r", Value::from(r_set.to_vec())),
            ("a_max", a_max.into()),
            ("terms", terms.into()),
        ]),
    );
    rep.window = format!("r in {r_set:?}, 0 <= a <= {a_max}, exponents 1..{terms}");
    for &r in r_set {
        if r <= 0 || r % pi == 0 {
            return Err(Error::InvalidArgument(format!("r = {r} must be positive and prime to {p}")));
        }
    }
    // Each identity: (label indices, U_p side times p, coefficients, factor).
    struct Identity {
        idx: [i64; 2],
        lhs: QSeries,
        coeffs: Vec<Rational>,
        factor: i64,
    }
    let mut ids = Vec::new();
    let mut max_pole = 0;
    for &r in r_set {
        for a in 0..=a_max {
            let m = pi.pow(a) * r;
            let prec = pi * (terms + 1);
            rep.need(prec);
            let f = cache.f(level, 0, m, prec)?.expansion.clone();
            let up = u_p(&f, p);
            let (g, sign_of_f, factor) = if a == 0 {
                (up, -1, 1)
            } else {
                let lower = cache.f(level, 0, m / pi, terms + 1)?.expansion.clone();
                (&up - &lower, 1, pi - 1)
            };
            let alt = aux.alt_hauptmodul.expand_series(terms + 1 + m)?;
            let target = f.truncate(terms + 1).scale_int(&BigInt::from(sign_of_f));
            let dec = decompose_in_hauptmodul(&target, &alt, 0)?;
            if !dec.residual.is_zero() {
                rep.notes.push(format!("f_{{0,{m}}} leaves a residual in psi_alt"));
            }
            max_pole = max_pole.max(dec.coeffs.len());
            ids.push(Identity {
                idx: [r, a as i64],
                lhs: g.scale_int(&BigInt::from(pi)),
                coeffs: dec.coeffs,
                factor,
            });
        }
    }
    let cusp = aux.cusp_function.expand_series(terms + 1)?;
    let holds = |sign: i64, id: &Identity| -> Option<i64> {
        let lambda = Rational::from_integer(BigInt::from(sign * aux.scale));
        let rhs = al_sum_with(&id.coeffs, &lambda, &cusp).scale_int(&BigInt::from(id.factor));
        let diff = (&id.lhs - &rhs).truncate(terms + 1);
        let first = diff.terms().map(|(n, _)| n).find(|&n| n != 0);
        first
    };
    let working: Vec<i64> = [1, -1].into_iter().filter(|&s| ids.iter().all(|id| holds(s, id).is_none())).collect();
    let sign = match working.as_slice() {
        [s] => *s,
        [] => return Err(Error::NoConsistentSign { level: data.level, p }),
        _ => {
            rep.notes.push("both signs satisfy the identities in this window".into());
            aux.sign
        }
    };
    for id in &ids {
        rep.compare(&id.idx, "constant", "constant", holds(sign, id).is_none());
    }
    rep.compare(&[0, 0], format!("sign {}", aux.sign), format!("sign {sign}"), sign == aux.sign);
    rep.notes.push(format!("sign {sign}, lambda = {}", sign * aux.scale));

    // Divisibility corollary from the base identities.
    let bound = valuation(&BigInt::from(aux.scale), p).unwrap_or(0).saturating_sub(1);
    let cusp_integral = cusp.is_integral() && cusp.valuation() >= 0;
    for id in ids.iter().filter(|id| id.idx[1] == 0) {
        let integral = id.coeffs.iter().all(|c| c.is_integer());
        rep.compare(&[id.idx[0], -1], "integral c_i and psi_cusp", format!("{integral}, {cusp_integral}"), integral && cusp_integral);
        let up = id.lhs.scale(&Rational::new(BigInt::one(), BigInt::from(pi)));
        for n in 1..=terms {
            let c = up.integer_coeff(n)?;
            if let Some(v) = valuation(&c, p) {
                rep.compare(&[id.idx[0], n], format!("nu_{p} >= {bound}"), format!("nu_{p} = {v}"), v >= bound);
            }
        }
    }
    rep.notes.push(format!("derived divisibility: {p}^{bound} | coefficients of U_{p} f_{{0,r}}"));
    Ok(rep.finish())
}
