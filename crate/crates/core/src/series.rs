//! Truncated Laurent series in `q` with exact rational coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^v, q^(v+1), ..., q^(prec-1)`
//! densely, where `v` is the valuation and `prec` is an exclusive precision
//! bound: every coefficient at an exponent `>= prec` is unknown, not zero.
//!
//! Internally the coefficients share one positive denominator, so series with
//! integer coefficients (the common case for eta quotients and basis
//! elements) are handled with plain big-integer arithmetic.
//!
//! Precision is propagated pessimistically:
//!
//! - `a + b` is known below `min(a.prec, b.prec)`;
//! - `a * b` is known below `min(a.prec + b.val, b.prec + a.val)`;
//! - `1 / a` keeps the relative precision `a.prec - a.val`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar used for every coefficient.
pub type Rational = BigRational;

/// Working precision used when a caller does not ask for one: this many terms
/// beyond the valuation.
pub const DEFAULT_RELATIVE_PRECISION: i64 = 256;

/// Truncated Laurent series `sum_{n >= valuation} c_n q^n + O(q^prec)`.
///
/// Values are immutable after construction. `PartialEq` compares the exact
/// stored representation (same valuation, precision and coefficients); use
/// [`QSeries::agrees_with`] for mathematical equality on the precision
/// overlap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    valuation: i64,
    prec: i64,
    /// `numer[i] / denom` is the coefficient of `q^(valuation + i)`;
    /// `numer.len() == prec - valuation`.
    numer: Vec<BigInt>,
    denom: BigInt,
}

impl QSeries {
    /// The series `O(q^prec)`.
    pub fn zero(prec: i64) -> Self {
        QSeries {
            valuation: prec,
            prec,
            numer: Vec::new(),
            denom: BigInt::one(),
        }
    }

    /// The constant series `1 + O(q^prec)`.
    pub fn one(prec: i64) -> Self {
        Self::monomial(Rational::one(), 0, prec)
    }

    /// `c q^exponent + O(q^prec)`.
    pub fn monomial(c: Rational, exponent: i64, prec: i64) -> Self {
        if exponent >= prec {
            return Self::zero(prec);
        }
        let mut coeffs = vec![Rational::zero(); (prec - exponent) as usize];
        coeffs[0] = c;
        Self::from_coeffs(exponent, coeffs, prec)
    }

    /// Builds a series from dense rational coefficients starting at
    /// `q^valuation`. Missing coefficients below `prec` are zero and extra
    /// ones at or beyond `prec` are dropped.
    pub fn from_coeffs(valuation: i64, coeffs: Vec<Rational>, prec: i64) -> Self {
        let len = (prec - valuation).max(0) as usize;
        let denom = coeffs
            .iter()
            .take(len)
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut numer: Vec<BigInt> = coeffs
            .into_iter()
            .take(len)
            .map(|c| {
                let (n, d) = c.into_raw();
                n * (&denom / d)
            })
            .collect();
        numer.resize(len, BigInt::zero());
        Self::from_parts(valuation, numer, denom, prec)
    }

    /// Builds a series with integer coefficients.
    pub fn from_integers(valuation: i64, coeffs: Vec<BigInt>, prec: i64) -> Self {
        let len = (prec - valuation).max(0) as usize;
        let mut numer = coeffs;
        numer.resize(len, BigInt::zero());
        Self::from_parts(valuation, numer, BigInt::one(), prec)
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64s(valuation: i64, coeffs: &[i64], prec: i64) -> Self {
        Self::from_integers(valuation, coeffs.iter().map(|&c| BigInt::from(c)).collect(), prec)
    }

    /// Raw constructor: `numer[i] / denom` is the coefficient of
    /// `q^(valuation + i)`. Restores canonical form.
    pub(crate) fn from_parts(valuation: i64, mut numer: Vec<BigInt>, denom: BigInt, prec: i64) -> Self {
        debug_assert!(!denom.is_zero());
        let len = (prec - valuation).max(0) as usize;
        numer.truncate(len);
        numer.resize(len, BigInt::zero());
        let mut s = QSeries {
            valuation: valuation.min(prec),
            prec,
            numer,
            denom,
        };
        s.canonicalize();
        s
    }

    fn canonicalize(&mut self) {
        let lead = self.numer.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.numer.clear();
                self.valuation = self.prec;
                self.denom = BigInt::one();
                return;
            }
            Some(0) => {}
            Some(k) => {
                self.numer.drain(..k);
                self.valuation += k as i64;
            }
        }
        if self.denom.is_negative() {
            self.denom = -std::mem::take(&mut self.denom);
            for c in &mut self.numer {
                *c = -std::mem::take(c);
            }
        }
        if self.denom.is_one() {
            return;
        }
        let mut g = self.denom.clone();
        for c in &self.numer {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.denom /= &g;
            for c in &mut self.numer {
                if !c.is_zero() {
                    *c /= &g;
                }
            }
        }
    }

    /// Lowest exponent with a nonzero stored coefficient; equals `prec` for a
    /// series that is zero to its precision.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Exclusive precision bound.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of known coefficients from the valuation on.
    pub fn relative_prec(&self) -> i64 {
        self.prec - self.valuation
    }

    /// True if every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    /// True if every stored coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    /// Common denominator of the stored coefficients.
    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub(crate) fn numerators(&self) -> &[BigInt] {
        &self.numer
    }

    /// Coefficient of `q^n`.
    pub fn coeff(&self, n: i64) -> Result<Rational> {
        if n >= self.prec {
            return Err(Error::PrecisionExceeded { exponent: n, prec: self.prec });
        }
        if n < self.valuation {
            return Ok(Rational::zero());
        }
        let c = &self.numer[(n - self.valuation) as usize];
        Ok(Rational::new(c.clone(), self.denom.clone()))
    }

    /// Coefficient of `q^n` as an integer; fails with `IntegralityViolation`
    /// if it is not one.
    pub fn integer_coeff(&self, n: i64) -> Result<BigInt> {
        if n >= self.prec {
            return Err(Error::PrecisionExceeded { exponent: n, prec: self.prec });
        }
        if n < self.valuation {
            return Ok(BigInt::zero());
        }
        let c = &self.numer[(n - self.valuation) as usize];
        if self.denom.is_one() {
            return Ok(c.clone());
        }
        let (q, r) = c.div_rem(&self.denom);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::IntegralityViolation {
                exponent: n,
                value: Rational::new(c.clone(), self.denom.clone()).to_string(),
            })
        }
    }

    /// Leading coefficient, if the series is nonzero to its precision.
    pub fn leading_coeff(&self) -> Option<Rational> {
        self.numer
            .first()
            .map(|c| Rational::new(c.clone(), self.denom.clone()))
    }

    /// Nonzero terms `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Rational)> + '_ {
        self.numer.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| {
            (self.valuation + i as i64, Rational::new(c.clone(), self.denom.clone()))
        })
    }

    /// All coefficients from `from` (inclusive) to `to` (exclusive).
    pub fn coeffs_range(&self, from: i64, to: i64) -> Result<Vec<Rational>> {
        (from..to).map(|n| self.coeff(n)).collect()
    }

    /// Forgets every coefficient at or beyond `prec`.
    pub fn truncate(&self, prec: i64) -> QSeries {
        if prec >= self.prec {
            return self.clone();
        }
        let len = (prec - self.valuation).max(0) as usize;
        Self::from_parts(
            self.valuation.min(prec),
            self.numer[..len.min(self.numer.len())].to_vec(),
            self.denom.clone(),
            prec,
        )
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            valuation: self.valuation + k,
            prec: self.prec + k,
            numer: self.numer.clone(),
            denom: self.denom.clone(),
        }
    }

    /// Substitution `q -> q^d` for `d >= 1`.
    pub fn dilate(&self, d: i64) -> QSeries {
        assert!(d >= 1, "dilation factor must be positive");
        if d == 1 {
            return self.clone();
        }
        let len = (d * (self.prec - self.valuation)).max(0) as usize;
        let mut numer = vec![BigInt::zero(); len];
        for (i, c) in self.numer.iter().enumerate() {
            numer[i * d as usize] = c.clone();
        }
        QSeries {
            valuation: d * self.valuation,
            prec: d * self.prec,
            numer,
            denom: self.denom.clone(),
        }
    }

    /// Multiplication by an exact scalar.
    pub fn scale(&self, c: &Rational) -> QSeries {
        if c.is_zero() {
            return Self::zero(self.prec);
        }
        let numer = self.numer.iter().map(|x| x * c.numer()).collect();
        Self::from_parts(self.valuation, numer, &self.denom * c.denom(), self.prec)
    }

    /// Multiplication by an integer scalar.
    pub fn scale_int(&self, c: &BigInt) -> QSeries {
        self.scale(&Rational::from_integer(c.clone()))
    }

    /// Sum `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &QSeries) -> QSeries {
        let prec = self.prec.min(other.prec);
        if c.is_zero() || other.valuation >= prec {
            return self.truncate(prec);
        }
        if self.valuation >= prec {
            return other.scale(c).truncate(prec);
        }
        let val = self.valuation.min(other.valuation);
        let len = (prec - val) as usize;
        // common denominator: lcm(d_self, d_other * c.den)
        let other_den = &other.denom * c.denom();
        let denom = self.denom.lcm(&other_den);
        let f_self = &denom / &self.denom;
        let f_other = (&denom / &other_den) * c.numer();
        let mut numer = vec![BigInt::zero(); len];
        let off_self = (self.valuation - val) as usize;
        for (i, x) in self.numer.iter().enumerate() {
            let k = off_self + i;
            if k >= len {
                break;
            }
            numer[k] = if f_self.is_one() { x.clone() } else { x * &f_self };
        }
        let off_other = (other.valuation - val) as usize;
        for (i, x) in other.numer.iter().enumerate() {
            let k = off_other + i;
            if k >= len {
                break;
            }
            if !x.is_zero() {
                numer[k] += x * &f_other;
            }
        }
        Self::from_parts(val, numer, denom, prec)
    }

    /// Exact Cauchy product with pessimistic precision.
    ///
    /// Convolves the integer numerators and divides by the product of the
    /// denominators; bit-identical to [`QSeries::mul_schoolbook`].
    pub fn mul_series(&self, other: &QSeries) -> QSeries {
        let prec = (self.prec + other.valuation).min(other.prec + self.valuation);
        let val = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() || val >= prec {
            return Self::zero(prec);
        }
        let len = (prec - val) as usize;
        let mut out = vec![BigInt::zero(); len];
        let (short, long) = if self.numer.len() <= other.numer.len() {
            (&self.numer, &other.numer)
        } else {
            (&other.numer, &self.numer)
        };
        for (i, a) in short.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            let upto = (len - i).min(long.len());
            for (slot, b) in out[i..i + upto].iter_mut().zip(&long[..upto]) {
                if !b.is_zero() {
                    *slot += a * b;
                }
            }
        }
        Self::from_parts(val, out, &self.denom * &other.denom, prec)
    }

    /// Reference kernel: coefficientwise schoolbook convolution over
    /// [`Rational`]. Kept for cross-checking [`QSeries::mul_series`].
    pub fn mul_schoolbook(&self, other: &QSeries) -> QSeries {
        let prec = (self.prec + other.valuation).min(other.prec + self.valuation);
        let val = self.valuation + other.valuation;
        if self.is_zero() || other.is_zero() || val >= prec {
            return Self::zero(prec);
        }
        let len = (prec - val) as usize;
        let a: Vec<Rational> = (0..self.numer.len())
            .map(|i| Rational::new(self.numer[i].clone(), self.denom.clone()))
            .collect();
        let b: Vec<Rational> = (0..other.numer.len())
            .map(|i| Rational::new(other.numer[i].clone(), other.denom.clone()))
            .collect();
        let mut out = vec![Rational::zero(); len];
        for (k, slot) in out.iter_mut().enumerate() {
            for i in 0..=k {
                if i < a.len() && k - i < b.len() {
                    *slot += &a[i] * &b[k - i];
                }
            }
        }
        Self::from_coeffs(val, out, prec)
    }

    /// Multiplicative inverse, keeping the relative precision.
    pub fn reciprocal(&self) -> Result<QSeries> {
        if self.is_zero() {
            return Err(Error::ZeroLeadingTerm);
        }
        let len = self.numer.len();
        let lead = &self.numer[0];
        let val = -self.valuation;
        let prec = val + len as i64;
        if lead.abs().is_one() {
            // 1/(N/d) = d * (1/N) with N having unit leading coefficient.
            let unit = lead.clone();
            let mut inv: Vec<BigInt> = Vec::with_capacity(len);
            inv.push(unit.clone());
            for k in 1..len {
                let mut acc = BigInt::zero();
                for i in 1..=k {
                    let a = &self.numer[i];
                    if !a.is_zero() {
                        acc += a * &inv[k - i];
                    }
                }
                // b_k = -(1/lead) * acc, and 1/lead == lead for a unit
                inv.push(-(acc * &unit));
            }
            let numer = inv.into_iter().map(|c| c * &self.denom).collect();
            return Ok(Self::from_parts(val, numer, BigInt::one(), prec));
        }
        let coeffs: Vec<Rational> = self
            .numer
            .iter()
            .map(|c| Rational::new(c.clone(), self.denom.clone()))
            .collect();
        let lead_inv = coeffs[0].recip();
        let mut inv: Vec<Rational> = Vec::with_capacity(len);
        inv.push(lead_inv.clone());
        for k in 1..len {
            let mut acc = Rational::zero();
            for i in 1..=k {
                if !coeffs[i].is_zero() {
                    acc += &coeffs[i] * &inv[k - i];
                }
            }
            inv.push(-(acc * &lead_inv));
        }
        Ok(Self::from_coeffs(val, inv, prec))
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// [`QSeries::reciprocal`]. `a^0` is `1` with the relative precision of
    /// `a`.
    pub fn pow(&self, e: i64) -> Result<QSeries> {
        if e == 0 {
            return Ok(Self::one(self.relative_prec()));
        }
        let base = if e < 0 { self.reciprocal()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut result: Option<QSeries> = None;
        let mut power = base;
        loop {
            if n & 1 == 1 {
                result = Some(match result {
                    None => power.clone(),
                    Some(r) => r.mul_series(&power),
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            power = power.mul_series(&power);
        }
        Ok(result.expect("nonzero exponent"))
    }

    /// Coefficient of `q^t` in `self * other` without forming the product.
    pub fn product_coeff(&self, other: &QSeries, t: i64) -> Result<Rational> {
        let prec = (self.prec + other.valuation).min(other.prec + self.valuation);
        if t >= prec {
            return Err(Error::PrecisionExceeded { exponent: t, prec });
        }
        let mut acc = BigInt::zero();
        for (i, a) in self.numer.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = self.valuation + i as i64;
            let j = t - e - other.valuation;
            if j < 0 {
                break;
            }
            if let Some(b) = other.numer.get(j as usize) {
                acc += a * b;
            }
        }
        Ok(Rational::new(acc, &self.denom * &other.denom))
    }

    /// Lowest exponent below the common precision where the two series
    /// differ.
    pub fn first_difference(&self, other: &QSeries) -> Option<i64> {
        let prec = self.prec.min(other.prec);
        let start = self.valuation.min(other.valuation);
        if self.denom == other.denom {
            return (start..prec).find(|&n| self.raw(n) != other.raw(n));
        }
        (start..prec).find(|&n| {
            // compare a/d1 with b/d2 by cross multiplication
            self.raw(n) * &other.denom != other.raw(n) * &self.denom
        })
    }

    fn raw(&self, n: i64) -> BigInt {
        if n < self.valuation || n >= self.prec {
            BigInt::zero()
        } else {
            self.numer[(n - self.valuation) as usize].clone()
        }
    }

    /// Equality on the overlap of the two precisions.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        self.first_difference(other).is_none()
    }

    /// Equality on the overlap, requiring the overlap to reach `window_end`
    /// (exclusive).
    pub fn agrees_through(&self, other: &QSeries, window_end: i64) -> Result<bool> {
        let overlap = self.prec.min(other.prec);
        if overlap < window_end {
            return Err(Error::InsufficientPrecision {
                context: "series comparison".into(),
                have: overlap,
                needed: Some(window_end),
            });
        }
        Ok(self.agrees_with(other))
    }

    /// Renders the first `max_terms` nonzero terms without the `O(q^prec)`
    /// tail, e.g. `q^-1 + 6q + 4q^2 - 3q^3`.
    pub fn render_terms(&self, max_terms: usize) -> String {
        let mut out = String::new();
        for (i, (e, c)) in self.terms().take(max_terms).enumerate() {
            write_term(&mut out, i == 0, e, &c);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn write_term(out: &mut String, first: bool, e: i64, c: &Rational) {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let unit = mag.is_one();
    if e == 0 {
        out.push_str(&mag.to_string());
        return;
    }
    if !unit {
        out.push_str(&mag.to_string());
    }
    out.push('q');
    if e != 1 {
        out.push('^');
        out.push_str(&e.to_string());
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            write_term(&mut out, i == 0, e, &c);
        }
        if out.is_empty() {
            write!(f, "O(q^{})", self.prec)
        } else {
            write!(f, "{} + O(q^{})", out, self.prec)
        }
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        self.add_scaled(&Rational::one(), rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self.add_scaled(&-Rational::one(), rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            valuation: self.valuation,
            prec: self.prec,
            numer: self.numer.iter().map(|c| -c).collect(),
            denom: self.denom.clone(),
        }
    }
}

impl Add for QSeries {
    type Output = QSeries;
    fn add(self, rhs: QSeries) -> QSeries {
        &self + &rhs
    }
}

impl Sub for QSeries {
    type Output = QSeries;
    fn sub(self, rhs: QSeries) -> QSeries {
        &self - &rhs
    }
}

impl Mul for QSeries {
    type Output = QSeries;
    fn mul(self, rhs: QSeries) -> QSeries {
        &self * &rhs
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

/// Parses an exact rational such as `-3` or `25/216`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok();
            let d = BigInt::from_str(d.trim()).ok();
            match (n, d) {
                (Some(n), Some(d)) if !d.is_zero() => Some(Rational::new(n, d)),
                _ => None,
            }
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    };
    parsed.ok_or_else(|| Error::Parse {
        input: s.to_string(),
        reason: "expected an integer or a fraction a/b".into(),
    })
}

/// Parses a finite expansion in the rendered form `q^-1 + 6q + 4q^2 - 3q^3`
/// (also `25/216q^2`, `-q`, `7`) as a series known below `q^prec`.
pub fn parse_expansion(text: &str, prec: i64) -> Result<QSeries> {
    let err = |reason: &str| Error::Parse {
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<(i64, Rational)> = Vec::new();
    let mut rest = compact.as_str();
    if rest.is_empty() || rest == "0" {
        return Ok(QSeries::zero(prec));
    }
    while !rest.is_empty() {
        let mut sign = Rational::one();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if !terms.is_empty() {
            return Err(err("expected `+` or `-` between terms"));
        }
        let end = rest[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(rest.len());
        // a `-` right after `^` belongs to the exponent
        let mut end = end;
        while end < rest.len() && rest.as_bytes()[end - 1] == b'^' {
            end = rest[end + 1..].find(['+', '-']).map(|i| i + end + 1).unwrap_or(rest.len());
        }
        let term = &rest[..end];
        rest = &rest[end..];
        let (coef, exp) = match term.find('q') {
            None => (parse_rational(term)?, 0),
            Some(i) => {
                let coef = if i == 0 { Rational::one() } else { parse_rational(&term[..i])? };
                let tail = &term[i + 1..];
                let exp = if tail.is_empty() {
                    1
                } else {
                    tail.strip_prefix('^')
                        .and_then(|e| e.parse::<i64>().ok())
                        .ok_or_else(|| err("bad exponent"))?
                };
                (coef, exp)
            }
        };
        terms.push((exp, sign * coef));
    }
    let val = terms.iter().map(|t| t.0).min().unwrap_or(prec).min(prec);
    let mut coeffs = vec![Rational::zero(); (prec - val).max(0) as usize];
    for (e, c) in terms {
        if e >= prec {
            return Err(err("term lies beyond the stated precision"));
        }
        coeffs[(e - val) as usize] += c;
    }
    Ok(QSeries::from_coeffs(val, coeffs, prec))
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    valuation: i64,
    prec: i64,
    coeffs: Vec<String>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self
            .numer
            .iter()
            .map(|c| Rational::new(c.clone(), self.denom.clone()).to_string())
            .collect();
        SeriesRepr {
            valuation: self.valuation,
            prec: self.prec,
            coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.valuation > repr.prec || repr.coeffs.len() as i64 > repr.prec - repr.valuation {
            return Err(serde::de::Error::custom("coefficients extend beyond the precision bound"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(QSeries::from_coeffs(repr.valuation, coeffs, repr.prec))
    }
}
