//! Canonical bases `f_{k,m}^(N) = q^-m + O(q^(n0+1))` of `M_k^#(N)` and
//! `g_{k,m}^(N) = q^-m + O(q^(n1+1))` of `S_k^#(N)`.
//!
//! Each `(N, k, space)` ladder starts from the element of largest order at
//! infinity (a product of weight forms, times the cusp polynomial of the
//! Hauptmodul for `S`), and each further element is the Hauptmodul times the
//! previous one with the coefficients in the gap cleared by subtracting
//! earlier elements.

mod cache;
mod ladder;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leveldata::{eval_poly, LevelData};
use crate::series::{QSeries, Rational};

pub use cache::{cache_clear, cache_info, BasisCache, CacheEntryInfo, CACHE_FORMAT_VERSION};
pub use ladder::Ladder;

/// `M` for `M_k^#(N)`, `S` for `S_k^#(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    M,
    S,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::M => "M",
            Space::S => "S",
        })
    }
}

impl std::str::FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(Space::M),
            "S" | "s" => Ok(Space::S),
            _ => Err(Error::InvalidArgument(format!("space must be M or S, got `{s}`"))),
        }
    }
}

/// One computed `f_{k,m}^(N)` or `g_{k,m}^(N)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub level: u64,
    pub weight: i64,
    pub index: i64,
    pub space: Space,
    pub expansion: QSeries,
    /// Ascending coefficients `c_i` with `element = first * sum c_i psi^i`;
    /// for `S` the first factor is the `M` element and the cusp polynomial is
    /// folded into the coefficients.
    #[serde(with = "bigint_strings")]
    pub haupt_poly: Vec<BigInt>,
}

impl BasisElement {
    /// Integer coefficient of `q^n`.
    pub fn coeff(&self, n: i64) -> Result<BigInt> {
        self.expansion.integer_coeff(n)
    }

    /// Exclusive bound of the known coefficients.
    pub fn prec(&self) -> i64 {
        self.expansion.prec()
    }
}

pub(crate) mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Largest vanishing order at infinity in the space: `n0` for `M`, `n1` for
/// `S`.
pub fn gap(data: &LevelData, k: i64, space: Space) -> Result<i64> {
    match space {
        Space::M => data.n0(k),
        Space::S => data.n1(k),
    }
}

/// Smallest valid index `m`: `-gap`.
pub fn first_index(data: &LevelData, k: i64, space: Space) -> Result<i64> {
    Ok(-gap(data, k, space)?)
}

/// The element of index `-gap`, with `rel_prec` known coefficients from its
/// valuation on.
pub fn first_element(data: &LevelData, k: i64, space: Space, rel_prec: i64) -> Result<BasisElement> {
    let rel_prec = rel_prec.max(1);
    let mut prod = QSeries::one(rel_prec);
    for (w, e) in data.weight_decomposition(k)? {
        let s = w.expand(w.order + rel_prec)?;
        prod = &prod * &s.pow(e)?;
    }
    let mut poly = vec![BigInt::one()];
    if space == Space::S {
        let psi = data.hauptmodul_series(rel_prec - 1)?;
        prod = &prod * &eval_poly(&data.cusp_poly, &psi);
        poly = data.cusp_poly.clone();
    }
    let index = first_index(data, k, space)?;
    check_element_shape(data, k, index, &prod)?;
    Ok(BasisElement {
        level: data.level,
        weight: k,
        index,
        space,
        expansion: prod,
        haupt_poly: poly,
    })
}

pub(crate) fn check_element_shape(data: &LevelData, k: i64, index: i64, s: &QSeries) -> Result<()> {
    if !s.is_integral() {
        let n = (s.valuation()..s.prec())
            .find(|&n| s.integer_coeff(n).is_err())
            .unwrap_or(s.valuation());
        return Err(Error::IntegralityViolation {
            exponent: n,
            value: s.coeff(n)?.to_string(),
        });
    }
    if s.valuation() != -index || !s.leading_coeff().is_some_and(|c| c.is_one()) {
        return Err(Error::NonUnitPivot {
            level: data.level,
            weight: k,
            exponent: -index,
            pivot: s.coeff(-index).map(|c| c.to_string()).unwrap_or_else(|_| "unknown".into()),
        });
    }
    Ok(())
}

/// Result of [`decompose_in_hauptmodul`].
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Ascending coefficients `c_0, ..., c_M`.
    pub coeffs: Vec<Rational>,
    pub residual: QSeries,
}

/// Writes `f = sum_{i} c_i psi^i + residual` with `residual = O(q^(gap+1))`,
/// peeling the principal part from the top. `psi` must be `q^-1 + O(1)`.
pub fn decompose_in_hauptmodul(f: &QSeries, psi: &QSeries, gap: i64) -> Result<Decomposition> {
    if psi.valuation() != -1 || !psi.leading_coeff().is_some_and(|c| c.is_one()) {
        return Err(Error::InvalidArgument("hauptmodul must start with q^-1".into()));
    }
    let low = (-gap).max(0);
    let top = -f.valuation();
    if top < low {
        return Ok(Decomposition { coeffs: Vec::new(), residual: f.clone() });
    }
    let mut powers = vec![QSeries::one(psi.prec() + 1)];
    for i in 1..=top {
        let next = &powers[i as usize - 1] * psi;
        powers.push(next);
    }
    let mut residual = f.clone();
    let mut coeffs = vec![Rational::zero(); top as usize + 1];
    for i in (low..=top).rev() {
        if residual.prec() <= -i {
            return Err(Error::InsufficientPrecision {
                context: "hauptmodul decomposition".into(),
                have: residual.prec(),
                needed: Some(gap + 1),
            });
        }
        let c = residual.coeff(-i)?;
        if !c.is_zero() {
            residual = residual.add_scaled(&-c.clone(), &powers[i as usize]);
        }
        coeffs[i as usize] = c;
    }
    if residual.prec() <= gap {
        return Err(Error::InsufficientPrecision {
            context: "hauptmodul decomposition residual".into(),
            have: residual.prec(),
            needed: Some(gap + 1),
        });
    }
    Ok(Decomposition { coeffs, residual })
}

/// Integer roots, with multiplicity, of a polynomial with rational
/// coefficients (ascending order).
pub fn integer_roots(poly: &[Rational]) -> Vec<BigInt> {
    let mut p: Vec<Rational> = poly.to_vec();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        roots.push(BigInt::zero());
    }
    if p.len() <= 1 {
        return roots;
    }
    // clear denominators; integer roots divide the constant term
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let c0 = (&p[0] * Rational::from_integer(lcm)).to_integer().abs();
    let Some(c0) = c0.to_u64() else { return roots };
    let mut candidates = Vec::new();
    let mut d = 1u64;
    while d * d <= c0 {
        if c0 % d == 0 {
            candidates.push(d);
            candidates.push(c0 / d);
        }
        d += 1;
    }
    candidates.sort_unstable();
    candidates.dedup();
    for d in candidates {
        for x in [BigInt::from(d), -BigInt::from(d)] {
            while p.len() > 1 {
                let (q, rem) = synthetic_division(&p, &Rational::from_integer(x.clone()));
                if !rem.is_zero() {
                    break;
                }
                p = q;
                roots.push(x.clone());
            }
        }
    }
    roots.sort();
    roots
}

fn synthetic_division(p: &[Rational], x: &Rational) -> (Vec<Rational>, Rational) {
    let n = p.len();
    let mut q = vec![Rational::zero(); n - 1];
    let mut acc = Rational::zero();
    for i in (0..n).rev() {
        acc = &acc * x + &p[i];
        if i > 0 {
            q[i - 1] = acc.clone();
        }
    }
    (q, acc)
}

/// Builds `f_{k,m}` (or `g_{k,m}`) without the ladder: divides `q^-m` by
/// the first element and reads the polynomial in the Hauptmodul off the
/// principal part.
pub fn direct_element(data: &LevelData, k: i64, space: Space, m: i64, rel_prec: i64) -> Result<BasisElement> {
    let m0 = first_index(data, k, space)?;
    if m < m0 {
        return Err(Error::IndexBelowRange { m, min: m0 });
    }
    let first = first_element(data, k, space, rel_prec)?;
    let inv = first.expansion.reciprocal()?;
    let target = QSeries::monomial(Rational::one(), -m, -m + rel_prec).mul_series(&inv);
    let psi = data.hauptmodul_series(rel_prec - 1)?;
    let dec = decompose_in_hauptmodul(&target, &psi, 0)?;
    let poly_ser = eval_poly_rational(&dec.coeffs, &psi);
    let expansion = &first.expansion * &poly_ser;
    check_element_shape(data, k, m, &expansion)?;
    let mut haupt = Vec::new();
    for c in &dec.coeffs {
        if !c.is_integer() {
            return Err(Error::IntegralityViolation { exponent: 0, value: c.to_string() });
        }
        haupt.push(c.to_integer());
    }
    if space == Space::S {
        haupt = poly_mul(&haupt, &data.cusp_poly);
    }
    Ok(BasisElement {
        level: data.level,
        weight: k,
        index: m,
        space,
        expansion,
        haupt_poly: haupt,
    })
}

fn eval_poly_rational(coeffs: &[Rational], x: &QSeries) -> QSeries {
    let deg = coeffs.len().saturating_sub(1) as i64;
    let mut acc = QSeries::zero(x.prec() - deg * x.valuation().min(0));
    for c in coeffs.iter().rev() {
        acc = &acc * x;
        acc = &acc + &QSeries::monomial(c.clone(), 0, acc.prec());
    }
    acc
}

pub(crate) fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leveldata::get_level;

    fn r(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    #[test]
    fn first_elements() {
        let d6 = get_level(6).unwrap();
        let f = first_element(d6, 2, Space::M, 20).unwrap();
        assert_eq!(f.expansion.render_terms(5), "q^2 - 2q^3 + 3q^4 - q^6 + 7q^8");
        let one = first_element(d6, 0, Space::M, 20).unwrap();
        assert_eq!(one.expansion, QSeries::one(20));
        let g = first_element(d6, 2, Space::S, 20).unwrap();
        assert_eq!(g.index, 1);
        assert_eq!(g.expansion.valuation(), -1);
        assert_eq!(g.haupt_poly, d6.cusp_poly);
    }

    #[test]
    fn decomposition_examples() {
        let psi = get_level(6).unwrap().hauptmodul_series(30).unwrap();
        let sq = &psi * &psi;
        let dec = decompose_in_hauptmodul(&sq, &psi, 0).unwrap();
        assert_eq!(dec.coeffs, vec![r(0), r(0), r(1)]);
        assert!(dec.residual.is_zero());
        // f_{0,2} = psi^2 - 12
        let f2 = QSeries::from_i64s(-2, &[1, 0, 0, 8, 30], 3);
        let dec = decompose_in_hauptmodul(&f2, &psi, 0).unwrap();
        assert_eq!(dec.coeffs, vec![r(-12), r(0), r(1)]);
        assert!(dec.residual.valuation() >= 1);
        let one = decompose_in_hauptmodul(&QSeries::one(30), &psi, 0).unwrap();
        assert_eq!(one.coeffs, vec![r(1)]);
        assert!(one.residual.is_zero());
    }

    #[test]
    fn level6_cusp_values_from_g21() {
        let d6 = get_level(6).unwrap();
        let g = d6.named("g_{2,1}").unwrap().quotient.expand_series(40).unwrap();
        let f = d6.weight_form(2).unwrap().expand(42).unwrap();
        let ratio = &g * &f.reciprocal().unwrap();
        let psi = d6.hauptmodul_series(40).unwrap();
        let dec = decompose_in_hauptmodul(&ratio, &psi, 0).unwrap();
        assert!(dec.residual.is_zero());
        assert_eq!(dec.coeffs.last().unwrap(), &r(1));
        let roots: Vec<i64> = integer_roots(&dec.coeffs).iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(roots, vec![-4, -3, 5]);
    }

    #[test]
    fn cusp_polynomial_roots() {
        let rat = |v: &[BigInt]| v.iter().map(|c| Rational::from_integer(c.clone())).collect::<Vec<_>>();
        let roots = |n: i64| -> Vec<i64> {
            integer_roots(&rat(&get_level(n).unwrap().cusp_poly))
                .iter()
                .map(|x| x.to_i64().unwrap())
                .collect()
        };
        assert_eq!(roots(6), vec![-4, -3, 5]);
        assert_eq!(roots(12), vec![-3, -1, 0, 1, 3]);
        assert_eq!(roots(10), vec![-2, -1, 3]);
        // x^7 - 7x^4 - 8x = x (x^3 - 8)(x^3 + 1)
        assert_eq!(roots(18), vec![-1, 0, 2]);
    }

    #[test]
    fn space_parsing() {
        assert_eq!("S".parse::<Space>().unwrap(), Space::S);
        assert!("X".parse::<Space>().is_err());
    }
}
