//! Per-level constants: Hauptmoduls, weight-raising forms, cusp polynomials
//! and the auxiliary functions behind the `U_p` congruences.
//!
//! The data lives in `fixtures/level{N}.toml`, one document per level, in the
//! eta-quotient grammar of [`crate::eta`]. Each fixture records the printed
//! source form next to the form actually used wherever the two differ:
//!
//! - `printed_expr` is the combination as printed, `expr` the one used;
//! - `printed` is the displayed leading expansion, `expansion` (when
//!   present) the corrected expectation.
//!
//! Two printed combinations do not define the claimed forms. In
//! `f_{2,-6}^(18)` the sixth term carries `eta(12z)`, whose q-offset is
//! `-1/4`; replacing it by `eta(18z)` is the only divisor swap with an
//! integral offset and gives `q^6 + O(q^7)`. In `f_{2,-4}^(12)` the fourth
//! term carries `eta(12z)^-1`, of weight `9/2`; the exponent `-6` restores
//! weight 2 and gives `q^4 + O(q^5)`. [`correction_candidates`] repeats both
//! searches from the printed text.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{cusp_count, EtaCombination, EtaQuotient};
use crate::series::{parse_expansion, parse_rational, QSeries, Rational};

/// Version of the fixture schema and data.
pub const FIXTURE_VERSION: u32 = 1;

/// Levels with embedded fixtures.
pub const SUPPORTED_LEVELS: [u64; 4] = [6, 10, 12, 18];

const FIXTURES: [(u64, &str); 4] = [
    (6, include_str!("../fixtures/level6.toml")),
    (10, include_str!("../fixtures/level10.toml")),
    (12, include_str!("../fixtures/level12.toml")),
    (18, include_str!("../fixtures/level18.toml")),
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureDoc {
    level: u64,
    fixture_version: u32,
    hauptmodul: HauptmodulDoc,
    weight_forms: Vec<WeightFormDoc>,
    cusp_polynomial: Vec<i64>,
    printed_cusp_polynomial: Option<Vec<i64>>,
    #[serde(default)]
    named: Vec<NamedDoc>,
    #[serde(default)]
    aux: Vec<AuxDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HauptmodulDoc {
    quotient: String,
    constant: String,
    printed: Option<String>,
    printed_prec: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFormDoc {
    name: String,
    weight: i64,
    order: i64,
    expr: Option<String>,
    construction: Option<String>,
    printed_expr: Option<String>,
    printed: Option<String>,
    printed_prec: Option<i64>,
    expansion: Option<String>,
    expansion_prec: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedDoc {
    name: String,
    expr: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxDoc {
    prime: u64,
    alt_hauptmodul: String,
    cusp_function: String,
    cusp: String,
    cusp_valuation: i64,
    scale: i64,
    printed_scale: i64,
    sign: i64,
}

/// `psi^(N)`: an eta quotient plus an additive constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Hauptmodul {
    pub quotient: EtaQuotient,
    pub constant: Rational,
    /// Displayed leading expansion, if the source prints one.
    pub printed: Option<QSeries>,
}

impl Hauptmodul {
    /// Expansion known below `q^prec`.
    pub fn expand(&self, prec: i64) -> Result<QSeries> {
        let s = self.quotient.expand_series(prec)?;
        Ok(&s + &QSeries::monomial(self.constant.clone(), 0, prec))
    }
}

/// How a weight form is built.
#[derive(Clone, Debug, PartialEq)]
pub enum FormExpr {
    Eta(EtaCombination),
    /// `-theta(psi) / P(psi)` for the Hauptmodul `psi` and cusp polynomial
    /// `P`: weight 2, order `deg P - 1` at infinity, no other zeros.
    ThetaOverCusp { hauptmodul: Hauptmodul, cusp_poly: Vec<BigInt> },
}

/// Fixture spelling of [`FormExpr::ThetaOverCusp`].
pub const THETA_OVER_CUSP: &str = "-theta(psi) / cusp(psi)";

impl FormExpr {
    /// The eta combination, if the form is one.
    pub fn eta(&self) -> Option<&EtaCombination> {
        match self {
            FormExpr::Eta(c) => Some(c),
            FormExpr::ThetaOverCusp { .. } => None,
        }
    }

    fn weight(&self) -> Rational {
        match self {
            FormExpr::Eta(c) => c.weight(),
            FormExpr::ThetaOverCusp { .. } => Rational::from_integer(BigInt::from(2)),
        }
    }

    fn expand(&self, prec: i64) -> Result<QSeries> {
        match self {
            FormExpr::Eta(c) => c.expand(prec),
            FormExpr::ThetaOverCusp { hauptmodul, cusp_poly } => {
                let deg = cusp_poly.len() as i64 - 1;
                let psi = hauptmodul.expand(prec - deg)?;
                let num = crate::operators::theta(&psi).scale(&-Rational::one());
                let den = eval_poly(cusp_poly, &psi);
                Ok(&num * &den.reciprocal()?)
            }
        }
    }
}

impl std::fmt::Display for FormExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormExpr::Eta(c) => write!(f, "{c}"),
            FormExpr::ThetaOverCusp { .. } => f.write_str(THETA_OVER_CUSP),
        }
    }
}

/// A weight-raising form `q^order + O(q^(order+1))` without zeros or poles
/// away from the cusp at infinity.
#[derive(Clone, Debug)]
pub struct WeightForm {
    pub name: String,
    pub weight: i64,
    pub order: i64,
    pub expr: FormExpr,
    /// Source text of the combination as printed, when it differs from
    /// `expr`.
    pub printed_expr: Option<String>,
    /// Displayed leading expansion.
    pub printed: Option<QSeries>,
    /// Corrected expectation, when the displayed one is wrong.
    pub expected: Option<QSeries>,
}

impl WeightForm {
    pub fn expand(&self, prec: i64) -> Result<QSeries> {
        self.expr.expand(prec)
    }

    /// The expansion the computed series must agree with.
    pub fn reference(&self) -> Option<&QSeries> {
        self.expected.as_ref().or(self.printed.as_ref())
    }
}

/// Named auxiliary quotient, e.g. `g_{2,1}^(6)`.
#[derive(Clone, Debug)]
pub struct NamedForm {
    pub name: String,
    pub quotient: EtaQuotient,
}

/// Atkin-Lehner data for one prime `p | N`: `psi_alt` is a Hauptmodul with
/// integer expansion `q^-1 + O(1)`, and `psi_alt | W = sign * scale *
/// cusp_function`.
#[derive(Clone, Debug, Serialize)]
pub struct AuxData {
    pub prime: u64,
    #[serde(serialize_with = "ser_display")]
    pub alt_hauptmodul: EtaQuotient,
    #[serde(serialize_with = "ser_display")]
    pub cusp_function: EtaQuotient,
    pub cusp: String,
    pub cusp_valuation: i64,
    pub scale: i64,
    pub printed_scale: i64,
    pub sign: i64,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// All constants for one level.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: u64,
    pub hauptmodul: Hauptmodul,
    pub weight_forms: Vec<WeightForm>,
    /// Ascending integer coefficients of the cusp polynomial.
    pub cusp_poly: Vec<BigInt>,
    /// The polynomial as printed, when it differs.
    pub printed_cusp_poly: Option<Vec<BigInt>>,
    pub named: Vec<NamedForm>,
    pub aux: Vec<AuxData>,
}

fn expansion(text: Option<&String>, prec: Option<i64>, what: &str) -> Result<Option<QSeries>> {
    match (text, prec) {
        (None, None) => Ok(None),
        (Some(t), Some(p)) => Ok(Some(parse_expansion(t, p)?)),
        _ => Err(Error::Fixture(format!("{what}: expansion and its precision must be given together"))),
    }
}

impl LevelData {
    /// Parses a fixture document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: FixtureDoc = toml::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
        if doc.fixture_version != FIXTURE_VERSION {
            return Err(Error::Fixture(format!(
                "fixture version {} (expected {FIXTURE_VERSION})",
                doc.fixture_version
            )));
        }
        let n = doc.level;
        let h = &doc.hauptmodul;
        let hauptmodul = Hauptmodul {
            quotient: EtaQuotient::parse(n, &h.quotient)?,
            constant: parse_rational(&h.constant)?,
            printed: expansion(h.printed.as_ref(), h.printed_prec, "hauptmodul")?,
        };
        let ints = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        let cusp_poly = ints(&doc.cusp_polynomial);
        let mut weight_forms = Vec::new();
        for w in &doc.weight_forms {
            let expr = match (&w.expr, &w.construction) {
                (Some(e), None) => FormExpr::Eta(EtaCombination::parse(n, e)?),
                (None, Some(c)) if c == THETA_OVER_CUSP => FormExpr::ThetaOverCusp {
                    hauptmodul: hauptmodul.clone(),
                    cusp_poly: cusp_poly.clone(),
                },
                (None, Some(c)) => return Err(Error::Fixture(format!("{}: unknown construction `{c}`", w.name))),
                _ => return Err(Error::Fixture(format!("{}: give exactly one of expr and construction", w.name))),
            };
            weight_forms.push(WeightForm {
                name: w.name.clone(),
                weight: w.weight,
                order: w.order,
                expr,
                printed_expr: w.printed_expr.clone(),
                printed: expansion(w.printed.as_ref(), w.printed_prec, &w.name)?,
                expected: expansion(w.expansion.as_ref(), w.expansion_prec, &w.name)?,
            });
        }
        if weight_forms.iter().all(|w| w.weight != 2) {
            return Err(Error::Fixture(format!("level {n}: no weight 2 form")));
        }
        let named = doc
            .named
            .iter()
            .map(|d| {
                Ok(NamedForm {
                    name: d.name.clone(),
                    quotient: EtaQuotient::parse(n, &d.expr)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let aux = doc
            .aux
            .iter()
            .map(|a| {
                if a.sign.abs() != 1 {
                    return Err(Error::Fixture(format!("aux sign must be +1 or -1, got {}", a.sign)));
                }
                Ok(AuxData {
                    prime: a.prime,
                    alt_hauptmodul: EtaQuotient::parse(n, &a.alt_hauptmodul)?,
                    cusp_function: EtaQuotient::parse(n, &a.cusp_function)?,
                    cusp: a.cusp.clone(),
                    cusp_valuation: a.cusp_valuation,
                    scale: a.scale,
                    printed_scale: a.printed_scale,
                    sign: a.sign,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelData {
            level: n,
            hauptmodul,
            weight_forms,
            cusp_poly,
            printed_cusp_poly: doc.printed_cusp_polynomial.as_deref().map(ints),
            named,
            aux,
        })
    }

    /// Same data with every weight form and the cusp polynomial replaced by
    /// their printed versions.
    pub fn uncorrected(&self) -> Result<Self> {
        let mut out = self.clone();
        if let Some(p) = &self.printed_cusp_poly {
            out.cusp_poly = p.clone();
        }
        for w in &mut out.weight_forms {
            if let Some(text) = &w.printed_expr {
                w.expr = FormExpr::Eta(EtaCombination::parse(self.level, text)?);
                w.expected = None;
            }
        }
        Ok(out)
    }

    pub fn weight_form(&self, weight: i64) -> Option<&WeightForm> {
        self.weight_forms.iter().find(|w| w.weight == weight)
    }

    /// Weight forms and exponents whose product has weight `k` and the
    /// largest order at infinity: `f_2^(k/2)`, or at level 10 with `k = 4l +
    /// k'`, `f_4^l f_2^(k'/2)`.
    pub fn weight_decomposition(&self, k: i64) -> Result<Vec<(&WeightForm, i64)>> {
        if k % 2 != 0 {
            return Err(Error::OddWeight(k));
        }
        let w2 = self.weight_form(2).expect("checked at load");
        Ok(match self.weight_form(4) {
            Some(w4) => vec![(w4, k.div_euclid(4)), (w2, k.rem_euclid(4) / 2)],
            None => vec![(w2, k / 2)],
        })
    }

    /// Maximal order of vanishing at infinity in `M_k^#(N)`.
    pub fn n0(&self, k: i64) -> Result<i64> {
        Ok(self.weight_decomposition(k)?.iter().map(|(w, e)| w.order * e).sum())
    }

    /// Maximal order of vanishing at infinity in `S_k^#(N)`.
    pub fn n1(&self, k: i64) -> Result<i64> {
        Ok(self.n0(k)? - self.cusp_poly_degree())
    }

    pub fn cusp_poly_degree(&self) -> i64 {
        self.cusp_poly.len() as i64 - 1
    }

    /// The Hauptmodul expansion known below `q^prec`.
    pub fn hauptmodul_series(&self, prec: i64) -> Result<QSeries> {
        self.hauptmodul.expand(prec)
    }

    /// Atkin-Lehner data for the prime `p`.
    pub fn aux(&self, p: u64) -> Result<&AuxData> {
        self.aux
            .iter()
            .find(|a| a.prime == p)
            .ok_or(Error::UnsupportedPair { level: self.level, p })
    }

    pub fn named(&self, name: &str) -> Option<&NamedForm> {
        self.named.iter().find(|f| f.name == name)
    }
}

/// Evaluates an integer polynomial (ascending coefficients) at a series.
pub fn eval_poly(coeffs: &[BigInt], x: &QSeries) -> QSeries {
    let deg = coeffs.len().saturating_sub(1) as i64;
    let mut acc = QSeries::zero(x.prec() - deg * x.valuation().min(0));
    for c in coeffs.iter().rev() {
        acc = &acc * x;
        acc = &acc + &QSeries::monomial(Rational::from_integer(c.clone()), 0, acc.prec());
    }
    acc
}

static REGISTRY: OnceLock<BTreeMap<u64, std::result::Result<LevelData, String>>> = OnceLock::new();

fn registry() -> &'static BTreeMap<u64, std::result::Result<LevelData, String>> {
    REGISTRY.get_or_init(|| {
        FIXTURES
            .iter()
            .map(|(n, text)| (*n, LevelData::from_toml(text).map_err(|e| e.to_string())))
            .collect()
    })
}

/// Constants for level `n`.
pub fn get_level(n: i64) -> Result<&'static LevelData> {
    let key = u64::try_from(n).map_err(|_| Error::UnsupportedLevel(n))?;
    match registry().get(&key) {
        None => Err(Error::UnsupportedLevel(n)),
        Some(Ok(d)) => Ok(d),
        Some(Err(e)) => Err(Error::Fixture(e.clone())),
    }
}

/// Level `n` with the printed (uncorrected) weight-form combinations.
pub fn uncorrected_level(n: i64) -> Result<LevelData> {
    get_level(n)?.uncorrected()
}

/// Embedded fixture text for level `n`.
pub fn fixture_text(n: i64) -> Result<&'static str> {
    FIXTURES
        .iter()
        .find(|(l, _)| *l as i64 == n)
        .map(|(_, t)| *t)
        .ok_or(Error::UnsupportedLevel(n))
}

/// Ascending coefficients of the cusp polynomial.
pub fn cusp_polynomial(n: i64) -> Result<Vec<BigInt>> {
    Ok(get_level(n)?.cusp_poly.clone())
}

/// One named check inside a [`ValidationReport`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Error variant that made the check fail, if any.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ValidationReport {
    pub level: u64,
    pub prec: i64,
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// True if some check failed with the given error variant.
    pub fn failed_with(&self, kind: &str) -> bool {
        self.failures().any(|c| c.error.as_deref() == Some(kind))
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let name = name.into();
        self.checks.push(match outcome {
            Ok((passed, detail)) => ValidationCheck { name, passed, detail, error: None },
            Err(e) => ValidationCheck {
                name,
                passed: false,
                detail: e.to_string(),
                error: Some(e.kind().to_string()),
            },
        });
    }
}

fn leading(s: &QSeries) -> String {
    s.truncate(s.valuation().saturating_add(4).min(s.prec())).to_string()
}

fn check_shape(s: &QSeries, order: i64) -> (bool, String) {
    let ok = s.valuation() == order && s.leading_coeff().is_some_and(|c| c.is_one()) && s.is_integral();
    (ok, format!("expected q^{order} + O(q^{}) with integer coefficients, got {}", order + 1, leading(s)))
}

fn check_reference(s: &QSeries, reference: &QSeries) -> (bool, String) {
    let ok = s.prec() >= reference.prec() && s.agrees_with(reference);
    (ok, format!("reference {reference}, computed {}", s.truncate(reference.prec())))
}

fn character_check(q: &EtaQuotient) -> (bool, String) {
    let ok = q.has_trivial_character();
    let detail = format!(
        "sum d r_d = {}, sum (N/d) r_d = {}, prod d^r_d {} a square",
        q.factors().iter().map(|(&d, &r)| d as i64 * r).sum::<i64>(),
        q.factors().iter().map(|(&d, &r)| (q.level() / d) as i64 * r).sum::<i64>(),
        if q.has_square_discriminant() { "is" } else { "is not" },
    );
    (ok, detail)
}

fn ligozat_matches_offset(q: &EtaQuotient) -> Result<(bool, String)> {
    let at_inf = q.ligozat_order(q.level())?;
    let offset = q.offset();
    Ok((at_inf == offset, format!("order at oo {at_inf}, q-offset {offset}")))
}

/// Runs the invariants of one level's data at precision `prec`.
pub fn validate(data: &LevelData, prec: i64) -> ValidationReport {
    let n = data.level;
    let mut report = ValidationReport { level: n, prec, checks: Vec::new() };

    let psi = data.hauptmodul_series(prec);
    report.record(
        "hauptmodul shape",
        psi.as_ref().map_err(clone_err).map(|s| {
            let ok = s.valuation() == -1
                && s.leading_coeff().is_some_and(|c| c.is_one())
                && s.coeff(0).is_ok_and(|c| c.is_zero())
                && s.is_integral();
            (ok, format!("expected q^-1 + O(q), got {}", leading(s)))
        }),
    );
    if let (Ok(s), Some(r)) = (&psi, &data.hauptmodul.printed) {
        report.record("hauptmodul printed expansion", Ok(check_reference(s, r)));
    }
    report.record("hauptmodul ligozat", ligozat_matches_offset(&data.hauptmodul.quotient));
    report.record("hauptmodul trivial character", Ok(character_check(&data.hauptmodul.quotient)));

    for w in &data.weight_forms {
        let weight_ok = w.expr.weight() == Rational::from_integer(BigInt::from(w.weight));
        report.record(
            format!("{} weight", w.name),
            Ok((weight_ok, format!("declared {}, computed {}", w.weight, w.expr.weight()))),
        );
        match w.expand(prec) {
            Ok(s) => {
                report.record(format!("{} leading term", w.name), Ok(check_shape(&s, w.order)));
                if let Some(r) = w.reference() {
                    report.record(format!("{} reference expansion", w.name), Ok(check_reference(&s, r)));
                }
            }
            Err(e) => report.record(format!("{} expansion", w.name), Err(e)),
        }
        for (i, t) in w.expr.eta().map(|c| c.terms()).unwrap_or_default().iter().enumerate() {
            if t.factors().keys().all(|d| n % d == 0) {
                report.record(format!("{} term {} ligozat", w.name, i + 1), ligozat_matches_offset(t));
                report.record(format!("{} term {} trivial character", w.name, i + 1), Ok(character_check(t)));
            }
        }
    }

    let cusps = cusp_count(n) as i64;
    report.record(
        "cusp polynomial degree",
        Ok((
            data.cusp_poly_degree() == cusps - 1,
            format!("degree {}, cusps {cusps}", data.cusp_poly_degree()),
        )),
    );
    report.record(
        "n1(2) = -1",
        data.n1(2).map(|v| (v == -1, format!("n1(2) = {v}"))),
    );

    for f in &data.named {
        let q = &f.quotient;
        let outcome = (|| {
            let mut orders = Vec::new();
            let mut ok = true;
            for c in (1..=n).filter(|c| n % c == 0) {
                let o = q.ligozat_order(c)?;
                if c != n && o <= Rational::zero() {
                    ok = false;
                }
                orders.push(format!("c={c}: {o}"));
            }
            ok &= q.ligozat_order(n)? == q.offset();
            Ok((ok, format!("orders {}", orders.join(", "))))
        })();
        report.record(format!("{} vanishes away from oo", f.name), outcome);
    }

    for a in &data.aux {
        report.record(
            format!("p={} alternative hauptmodul", a.prime),
            a.alt_hauptmodul.expand_series(prec).map(|s| {
                let ok = s.valuation() == -1 && s.leading_coeff().is_some_and(|c| c.is_one()) && s.is_integral();
                (ok, format!("expected q^-1 + O(1), got {}", leading(&s)))
            }),
        );
        report.record(
            format!("p={} cusp function valuation", a.prime),
            a.cusp_function.expand_series(prec).map(|s| {
                let ok = s.valuation() == a.cusp_valuation && s.is_integral();
                (ok, format!("expected valuation {}, got {}", a.cusp_valuation, leading(&s)))
            }),
        );
    }
    report
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::FractionalValuation { term, offset } => Error::FractionalValuation {
            term: term.clone(),
            offset: offset.clone(),
        },
        other => Error::Fixture(other.to_string()),
    }
}

/// [`validate`] on the embedded data for level `n`.
pub fn validate_level(n: i64, prec: i64) -> Result<ValidationReport> {
    Ok(validate(get_level(n)?, prec))
}

/// A single-term repair of a printed combination.
#[derive(Clone, Debug)]
pub struct Correction {
    /// Zero-based index of the repaired term.
    pub term: usize,
    pub description: String,
    pub combination: EtaCombination,
}

/// Searches single-factor repairs of the printed form of `form` at level
/// `n`: for each term with the wrong weight or a non-integral q-offset,
/// every divisor swap `eta(d) -> eta(d')` with `d' | N` and every exponent
/// change that restores the weight. A repair is accepted when the
/// combination expands to `q^order + O(q^(order+1))` with integer
/// coefficients below `q^prec`.
pub fn correction_candidates(n: i64, form: &str, prec: i64) -> Result<Vec<Correction>> {
    let data = get_level(n)?;
    let w = data
        .weight_forms
        .iter()
        .find(|w| w.name == form)
        .ok_or_else(|| Error::InvalidArgument(format!("no weight form `{form}` at level {n}")))?;
    let Some(text) = &w.printed_expr else {
        return Ok(Vec::new());
    };
    let level = data.level;
    let terms = EtaCombination::parse_terms(level, text)?;
    let twice = 2 * w.weight;
    let divisors: Vec<u64> = (1..=level).filter(|d| level % d == 0).collect();
    let mut out = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        if t.twice_weight() == twice && t.offset().is_integer() {
            continue;
        }
        let mut candidates: Vec<(String, EtaQuotient)> = Vec::new();
        for (&d, &r) in t.factors() {
            for &d2 in divisors.iter().filter(|&&d2| d2 != d) {
                candidates.push((format!("eta({d}) -> eta({d2})"), t.replace_divisor(d, d2)?));
            }
            let r2 = r + twice - t.twice_weight();
            if r2 != r {
                let factors = t.factors().iter().map(|(&e, &s)| (e, if e == d { r2 } else { s }));
                if let Ok(q) = EtaQuotient::new(level, factors, t.scalar().clone()) {
                    candidates.push((format!("eta({d})^{r} -> eta({d})^{r2}"), q));
                }
            }
        }
        for (description, q) in candidates {
            if q.twice_weight() != twice || !q.offset().is_integer() {
                continue;
            }
            let mut new_terms = terms.clone();
            new_terms[i] = q;
            let Ok(comb) = EtaCombination::new(new_terms) else { continue };
            let Ok(s) = comb.expand(prec) else { continue };
            if check_shape(&s, w.order).0 {
                out.push(Correction { term: i, description, combination: comb });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_levels_load_and_validate() {
        for n in SUPPORTED_LEVELS {
            let r = validate_level(n as i64, 64).unwrap();
            assert!(r.passed(), "level {n}: {:#?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn unsupported_levels() {
        for n in [-6, 0, 1, 7, 24] {
            assert!(matches!(get_level(n), Err(Error::UnsupportedLevel(m)) if m == n));
        }
    }

    #[test]
    fn n0_and_n1() {
        let cases = [(6, [(0, 0), (2, 2), (4, 4), (-2, -2)]), (12, [(0, 0), (2, 4), (4, 8), (-2, -4)]),
            (18, [(0, 0), (2, 6), (4, 12), (-2, -6)]), (10, [(0, 0), (2, 2), (4, 6), (-2, -4)])];
        for (n, ks) in cases {
            let d = get_level(n).unwrap();
            for (k, n0) in ks {
                assert_eq!(d.n0(k).unwrap(), n0, "level {n} weight {k}");
            }
            assert_eq!(d.n1(2).unwrap(), -1);
        }
        assert!(matches!(get_level(6).unwrap().n0(3), Err(Error::OddWeight(3))));
    }

    #[test]
    fn level10_weight_split() {
        let d = get_level(10).unwrap();
        // k = 6 = 4*1 + 2: n0 = 6 + 2
        assert_eq!(d.n0(6).unwrap(), 8);
        // k = -6 = 4*(-2) + 2: n0 = -12 + 2
        assert_eq!(d.n0(-6).unwrap(), -10);
    }

    #[test]
    fn cusp_polynomials() {
        let p = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        assert_eq!(cusp_polynomial(6).unwrap(), p(&[-60, -23, 2, 1]));
        assert_eq!(get_level(6).unwrap().printed_cusp_poly, Some(p(&[0, 9, -10, 1])));
        assert_eq!(cusp_polynomial(18).unwrap(), p(&[0, -8, 0, 0, -7, 0, 0, 1]));
        assert_eq!(cusp_polynomial(10).unwrap(), p(&[-6, -7, 0, 1]));
    }

    #[test]
    fn eval_poly_matches_direct_sum() {
        let psi = get_level(6).unwrap().hauptmodul_series(20).unwrap();
        let poly = cusp_polynomial(6).unwrap();
        let direct = &(&(&psi.pow(3).unwrap() + &psi.pow(2).unwrap().scale_int(&BigInt::from(2)))
            - &psi.scale_int(&BigInt::from(23)))
            - &QSeries::one(20).scale_int(&BigInt::from(60));
        let horner = eval_poly(&poly, &psi);
        assert!(horner.agrees_with(&direct));
        assert_eq!(horner.valuation(), -3);
        assert!(horner.prec() >= direct.prec());
    }

    #[test]
    fn uncorrected_level18_fails_with_fractional_valuation() {
        let d = uncorrected_level(18).unwrap();
        let r = validate(&d, 64);
        assert!(!r.passed());
        assert!(r.failed_with("FractionalValuation"));
    }

    #[test]
    fn uncorrected_level10_has_a_character() {
        let d = uncorrected_level(10).unwrap();
        let r = validate(&d, 64);
        let bad: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(bad.contains(&"f_{2,-2} term 1 trivial character"), "{bad:?}");
    }

    #[test]
    fn uncorrected_level12_has_mixed_weight() {
        assert!(matches!(uncorrected_level(12), Err(Error::MixedWeight { .. })));
    }

    #[test]
    fn unique_corrections() {
        let c18 = correction_candidates(18, "f_{2,-6}", 30).unwrap();
        assert_eq!(c18.len(), 1);
        assert_eq!(c18[0].description, "eta(12) -> eta(18)");
        assert_eq!(Some(&c18[0].combination), get_level(18).unwrap().weight_forms[0].expr.eta());
        let c12 = correction_candidates(12, "f_{2,-4}", 30).unwrap();
        assert_eq!(c12.len(), 1);
        assert_eq!(c12[0].description, "eta(12)^-1 -> eta(12)^-6");
        assert_eq!(Some(&c12[0].combination), get_level(12).unwrap().weight_forms[0].expr.eta());
    }

    #[test]
    fn fixture_rejects_bad_version() {
        let text = fixture_text(6).unwrap().replace("fixture_version = 1", "fixture_version = 9");
        assert!(matches!(LevelData::from_toml(&text), Err(Error::Fixture(_))));
    }
}
