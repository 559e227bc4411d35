//! Dedekind eta quotients and their q-expansions.
//!
//! `eta(d z) = q^(d/24) prod_{n >= 1} (1 - q^(d n))`, so a quotient
//! `prod eta(d z)^(r_d)` is `q^offset` times a power series with constant
//! term 1, where `offset = sum r_d d / 24`.
//!
//! Quotients are written in a normalized text form, one factor per divisor:
//!
//! ```text
//! eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8
//! 25/216 * eta(1)^8 * eta(2)^-4 - 11/144 * eta(1)^3 * eta(2)^-3
//! ```
//!
//! The second line is an [`EtaCombination`]: scalar-tagged quotients joined
//! by `+` and `-`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::series::{parse_rational, QSeries, Rational};

/// `prod_{n >= 1} (1 - q^n) + O(q^prec)` via the pentagonal number theorem.
pub fn euler_product(prec: i64) -> QSeries {
    let len = prec.max(0) as usize;
    let mut coeffs = vec![BigInt::zero(); len];
    if len > 0 {
        coeffs[0] = BigInt::one();
    }
    for k in 1i64.. {
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 >= prec {
            break;
        }
        coeffs[g1 as usize] = sign.clone();
        if g2 < prec {
            coeffs[g2 as usize] = sign;
        }
    }
    QSeries::from_integers(0, coeffs, prec.max(0))
}

/// `prod eta(d z)^(r_d)` times an exact scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotient {
    level: u64,
    factors: BTreeMap<u64, i64>,
    scalar: Rational,
}

/// Result of [`EtaQuotient::expand`]: the quotient equals
/// `scalar * q^offset * unit`.
#[derive(Clone, Debug)]
pub struct EtaExpansion {
    pub offset: Rational,
    pub unit: QSeries,
}

impl EtaQuotient {
    /// Builds a quotient; zero exponents are dropped.
    pub fn new(level: u64, factors: impl IntoIterator<Item = (u64, i64)>, scalar: Rational) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (d, r) in factors {
            if d == 0 {
                return Err(Error::InvalidArgument("eta divisor must be positive".into()));
            }
            *map.entry(d).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        if map.is_empty() {
            return Err(Error::InvalidArgument("eta quotient has no factors".into()));
        }
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        Ok(EtaQuotient { level, factors: map, scalar })
    }

    /// Parses the normalized text form, optionally prefixed by a scalar and
    /// `*`.
    pub fn parse(level: u64, text: &str) -> Result<Self> {
        let comb = EtaCombination::parse(level, text)?;
        let mut terms = comb.terms;
        if terms.len() != 1 {
            return Err(Error::Parse {
                input: text.to_string(),
                reason: "expected a single eta quotient".into(),
            });
        }
        Ok(terms.remove(0))
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn factors(&self) -> &BTreeMap<u64, i64> {
        &self.factors
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn with_scalar(&self, scalar: Rational) -> Self {
        EtaQuotient { scalar, ..self.clone() }
    }

    /// Same factors on a different level (used when a divisor is swapped for
    /// candidate corrections).
    pub fn replace_divisor(&self, from: u64, to: u64) -> Result<Self> {
        let mut factors: Vec<(u64, i64)> = self.factors.iter().map(|(&d, &r)| (d, r)).collect();
        for f in &mut factors {
            if f.0 == from {
                f.0 = to;
            }
        }
        EtaQuotient::new(self.level, factors, self.scalar.clone())
    }

    /// `sum r_d`, i.e. twice the weight.
    pub fn twice_weight(&self) -> i64 {
        self.factors.values().sum()
    }

    /// `(-1)^k prod d^r_d` is a rational square, `k` the (integral) weight.
    pub fn has_square_discriminant(&self) -> bool {
        let tw = self.twice_weight();
        if tw % 2 != 0 || (tw / 2) % 2 != 0 {
            return false;
        }
        let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
        for (&d, &r) in &self.factors {
            let mut d = d;
            let mut p = 2;
            while d > 1 {
                while d % p == 0 {
                    *exps.entry(p).or_default() += r;
                    d /= p;
                }
                p += 1;
            }
        }
        exps.values().all(|e| e % 2 == 0)
    }

    /// Modular on `Gamma_0(N)` with trivial character: both order sums are
    /// divisible by 24 and the discriminant is a square.
    pub fn has_trivial_character(&self) -> bool {
        let n = self.level;
        let s: i64 = self.factors.iter().map(|(&d, &r)| d as i64 * r).sum();
        let t: i64 = self.factors.iter().map(|(&d, &r)| (n / d) as i64 * r).sum();
        s % 24 == 0 && t % 24 == 0 && self.has_square_discriminant()
    }

    /// Weight `(sum r_d) / 2`, possibly half-integral.
    pub fn weight(&self) -> Rational {
        Rational::new(BigInt::from(self.twice_weight()), BigInt::from(2))
    }

    /// Exact q-offset `sum r_d d / 24`.
    pub fn offset(&self) -> Rational {
        let num: i64 = self.factors.iter().map(|(&d, &r)| d as i64 * r).sum();
        Rational::new(BigInt::from(num), BigInt::from(24))
    }

    /// Offset and unit series (constant term 1, scalar not applied), the unit
    /// known below `q^prec`.
    pub fn expand(&self, prec: i64) -> EtaExpansion {
        let prec = prec.max(1);
        let base = euler_product(prec);
        let mut unit = QSeries::one(prec);
        for (&d, &r) in &self.factors {
            let factor = base.dilate(d as i64).truncate(prec);
            let mut power = factor
                .pow(r.abs())
                .expect("euler product has unit constant term");
            if r < 0 {
                power = power.reciprocal().expect("unit constant term");
            }
            unit = &unit * &power;
        }
        EtaExpansion {
            offset: self.offset(),
            unit,
        }
    }

    /// The quotient as a series known below `q^abs_prec`, scalar included.
    /// Fails with `FractionalValuation` if the offset is not an integer.
    pub fn expand_series(&self, abs_prec: i64) -> Result<QSeries> {
        let offset = self.integral_offset()?;
        let rel = (abs_prec - offset).max(1);
        let EtaExpansion { unit, .. } = self.expand(rel);
        Ok(unit.shift(offset).scale(&self.scalar).truncate(abs_prec.max(offset)))
    }

    fn integral_offset(&self) -> Result<i64> {
        let offset = self.offset();
        if !offset.is_integer() {
            return Err(Error::FractionalValuation {
                term: self.to_string(),
                offset: offset.to_string(),
            });
        }
        Ok(offset.to_integer().to_i64().expect("offset fits in i64"))
    }

    /// Order of vanishing at a cusp `a/c` of `Gamma_0(level)`:
    /// `level / (24 gcd(c^2, level)) * sum gcd(c, d)^2 r_d / d`.
    pub fn ligozat_order(&self, c: u64) -> Result<Rational> {
        let n = self.level;
        if c == 0 || n % c != 0 {
            return Err(Error::InvalidCusp { c, level: n });
        }
        if let Some((&d, _)) = self.factors.iter().find(|(&d, _)| n % d != 0) {
            return Err(Error::InvalidArgument(format!("eta({d}) does not divide level {n}")));
        }
        let mut sum = Rational::zero();
        for (&d, &r) in &self.factors {
            let g = c.gcd(&d);
            sum += Rational::new(BigInt::from(g * g) * r, BigInt::from(d));
        }
        let scale = Rational::new(BigInt::from(n), BigInt::from(24 * (c * c).gcd(&n)));
        Ok(sum * scale)
    }

    fn fmt_factors(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (d, r)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *r == 1 {
                write!(f, "eta({d})")?;
            } else {
                write!(f, "eta({d})^{r}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.scalar.is_one() {
            write!(f, "{} * ", self.scalar)?;
        }
        self.fmt_factors(f)
    }
}

/// Rational linear combination of eta quotients of equal weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaCombination {
    terms: Vec<EtaQuotient>,
}

impl EtaCombination {
    pub fn new(terms: Vec<EtaQuotient>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty eta combination".into()))?;
        let w = first.twice_weight();
        if let Some(bad) = terms.iter().find(|t| t.twice_weight() != w) {
            return Err(Error::MixedWeight {
                first: first.weight().to_string(),
                second: bad.weight().to_string(),
            });
        }
        Ok(EtaCombination { terms })
    }

    pub fn single(q: EtaQuotient) -> Self {
        EtaCombination { terms: vec![q] }
    }

    pub fn terms(&self) -> &[EtaQuotient] {
        &self.terms
    }

    pub fn level(&self) -> u64 {
        self.terms[0].level
    }

    pub fn weight(&self) -> Rational {
        self.terms[0].weight()
    }

    /// Parses `[scalar *] quotient` terms separated by `+` / `-`.
    pub fn parse(level: u64, text: &str) -> Result<Self> {
        Parser::new(level, text).combination()
    }

    /// Parses the same grammar as [`EtaCombination::parse`] without the
    /// equal-weight check.
    pub fn parse_terms(level: u64, text: &str) -> Result<Vec<EtaQuotient>> {
        Parser::new(level, text).term_list()
    }

    /// Sum of all terms as one series known below `q^abs_prec`.
    pub fn expand(&self, abs_prec: i64) -> Result<QSeries> {
        for t in &self.terms {
            t.integral_offset()?;
        }
        let mut total: Option<QSeries> = None;
        for t in &self.terms {
            let s = t.expand_series(abs_prec)?;
            total = Some(match total {
                None => s,
                Some(acc) => &acc + &s,
            });
        }
        Ok(total.expect("nonempty").truncate(abs_prec))
    }

    /// Replaces one term.
    pub fn with_term(&self, index: usize, term: EtaQuotient) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms[index] = term;
        EtaCombination::new(terms)
    }
}

impl fmt::Display for EtaCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.scalar.is_negative();
            let mag = t.scalar.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag} * ")?;
            }
            t.fmt_factors(f)?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    level: u64,
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(level: u64, input: &'a str) -> Self {
        Parser {
            level,
            input,
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            input: self.input.to_string(),
            reason: format!("{} (at byte {})", reason.into(), self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos]
            .parse::<i64>()
            .map_err(|_| self.err("expected an integer"))
    }

    fn combination(self) -> Result<EtaCombination> {
        EtaCombination::new(self.term_list()?)
    }

    fn term_list(mut self) -> Result<Vec<EtaQuotient>> {
        let mut terms = Vec::new();
        let mut negate = self.eat(b'-');
        loop {
            let mut term = self.term()?;
            if negate {
                term.scalar = -term.scalar;
            }
            terms.push(term);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                Some(_) => return Err(self.err("expected `+`, `-` or end of input")),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<EtaQuotient> {
        let mut scalar = Rational::one();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'/') {
                self.pos += 1;
            }
            scalar = parse_rational(&self.input[start..self.pos])?;
            self.expect(b'*')?;
        }
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            if !self.input[self.pos..].starts_with("eta") {
                return Err(self.err("expected `eta(`"));
            }
            self.pos += 3;
            self.expect(b'(')?;
            let d = self.integer()?;
            if d <= 0 {
                return Err(self.err("eta argument must be a positive integer"));
            }
            self.expect(b')')?;
            let r = if self.eat(b'^') { self.integer()? } else { 1 };
            factors.push((d as u64, r));
            if !self.eat(b'*') {
                break;
            }
        }
        EtaQuotient::new(self.level, factors, scalar)
    }
}

/// Number of cusps of `Gamma_0(n)`: `sum_{d | n} phi(gcd(d, n/d))`.
pub fn cusp_count(n: u64) -> u64 {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| euler_phi(d.gcd(&(n / d))))
        .sum()
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    // Multiplies out prod_{n < prec} (1 - q^n) with i64 arithmetic.
    fn direct_product(prec: usize) -> Vec<i64> {
        let mut c = vec![0i64; prec];
        c[0] = 1;
        for n in 1..prec {
            for i in (n..prec).rev() {
                c[i] -= c[i - n];
            }
        }
        c
    }

    #[test]
    fn euler_product_matches_direct_product() {
        let direct = direct_product(65);
        let e = euler_product(65);
        for (n, c) in direct.iter().enumerate() {
            assert_eq!(e.coeff(n as i64).unwrap(), r(*c, 1), "q^{n}");
        }
        assert_eq!(&direct[..8], &[1, -1, -1, 0, 0, 1, 0, 1]);
        assert_eq!(direct[12], -1);
        assert_eq!(euler_product(13).coeff(12).unwrap(), r(-1, 1));
        assert_eq!(euler_product(8).coeff(0).unwrap(), r(1, 1));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let text = "eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8";
        let q = EtaQuotient::parse(6, text).unwrap();
        assert_eq!(q.to_string(), text);
        assert_eq!(q.factors().get(&6), Some(&-8));
        let c = EtaCombination::parse(18, "25/216 * eta(1)^4 * eta(2)^-4 - 11/144*eta(1)^3*eta(2)^-3 + eta(3)^-1 * eta(9)").unwrap();
        assert_eq!(c.terms().len(), 3);
        assert_eq!(c.terms()[1].scalar(), &r(-11, 144));
        assert_eq!(c.terms()[2].scalar(), &r(1, 1));
        let again = EtaCombination::parse(18, &c.to_string()).unwrap();
        assert_eq!(again, c);
        let neg = EtaCombination::parse(6, "-eta(1)^2 * eta(2)^-2").unwrap();
        assert_eq!(neg.terms()[0].scalar(), &r(-1, 1));
    }

    #[test]
    fn parse_errors() {
        assert!(EtaQuotient::parse(6, "eta(0)^2").is_err());
        assert!(EtaQuotient::parse(6, "eta(2)^").is_err());
        assert!(EtaQuotient::parse(6, "eta(2) eta(3)").is_err());
        assert!(EtaQuotient::parse(6, "eta(2)^2 - eta(3)^2").is_err());
        assert!(EtaQuotient::parse(6, "eta(2)^2 * eta(2)^-2").is_err());
        assert!(matches!(
            EtaCombination::parse(6, "eta(1)^2 + eta(1)^4"),
            Err(Error::MixedWeight { .. })
        ));
    }

    #[test]
    fn hauptmodul_quotient_expansion() {
        let q = EtaQuotient::parse(6, "eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8").unwrap();
        let e = q.expand(10);
        assert_eq!(e.offset, r(-1, 1));
        let expect = [1, 4, 6, 4, -3, -12, -8, 12, 30, 20];
        for (n, c) in expect.iter().enumerate() {
            assert_eq!(e.unit.coeff(n as i64).unwrap(), r(*c, 1));
        }
        assert_eq!(q.weight(), r(0, 1));
    }

    #[test]
    fn single_eta_is_euler_product() {
        let q = EtaQuotient::parse(1, "eta(1)").unwrap();
        let e = q.expand(30);
        assert_eq!(e.offset, r(1, 24));
        assert_eq!(e.unit, euler_product(30));
    }

    #[test]
    fn fractional_offset_is_reported() {
        let q = EtaQuotient::parse(18, "1/972 * eta(1)^-6 * eta(2)^9 * eta(3)^8 * eta(6)^-6 * eta(9)^-2 * eta(12)").unwrap();
        assert_eq!(q.offset(), r(-1, 4));
        assert!(matches!(q.expand_series(10), Err(Error::FractionalValuation { .. })));
    }

    #[test]
    fn weights() {
        let f = EtaQuotient::parse(6, "eta(1)^2 * eta(2)^-4 * eta(3)^-6 * eta(6)^12").unwrap();
        assert_eq!(f.weight(), r(2, 1));
        let g = EtaQuotient::parse(10, "eta(2)^14 * eta(5)^8 * eta(1)^-8 * eta(10)^-6").unwrap();
        assert_eq!(g.weight(), r(4, 1));
        let half = EtaQuotient::parse(1, "eta(1)").unwrap();
        assert_eq!(half.weight(), r(1, 2));
    }

    #[test]
    fn ligozat_orders() {
        let psi = EtaQuotient::parse(6, "eta(1)^-4 * eta(2)^8 * eta(3)^4 * eta(6)^-8").unwrap();
        assert_eq!(psi.ligozat_order(6).unwrap(), r(-1, 1));
        let g = EtaQuotient::parse(6, "eta(2)^6 * eta(3)^8 * eta(6)^-10").unwrap();
        for c in [1, 2, 3] {
            assert!(g.ligozat_order(c).unwrap() > r(0, 1), "c = {c}");
        }
        assert_eq!(g.ligozat_order(6).unwrap(), r(-1, 1));
        let delta = EtaQuotient::parse(1, "eta(1)^24").unwrap();
        assert_eq!(delta.ligozat_order(1).unwrap(), r(1, 1));
        assert!(matches!(psi.ligozat_order(4), Err(Error::InvalidCusp { c: 4, level: 6 })));
    }

    #[test]
    fn expansion_truncation_is_coherent() {
        let q = EtaQuotient::parse(10, "eta(2)^14 * eta(5)^8 * eta(1)^-8 * eta(10)^-6").unwrap();
        let big = q.expand(80).unit;
        let small = q.expand(30).unit;
        assert_eq!(big.truncate(30), small);
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(cusp_count(1), 1);
        assert_eq!(cusp_count(6), 4);
        assert_eq!(cusp_count(10), 4);
        assert_eq!(cusp_count(12), 6);
        assert_eq!(cusp_count(18), 8);
    }
}
