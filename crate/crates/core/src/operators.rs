//! `theta = q d/dq`, `U_p`, `V_p`, and the Atkin-Lehner sums that the
//! `U_p` congruence arguments reduce to.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::leveldata::get_level;
use crate::series::{QSeries, Rational};

/// Which operator, for reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorTag {
    Theta,
    U(u64),
    V(u64),
}

impl OperatorTag {
    pub fn apply(self, s: &QSeries) -> QSeries {
        match self {
            OperatorTag::Theta => theta(s),
            OperatorTag::U(p) => u_p(s, p),
            OperatorTag::V(p) => v_p(s, p),
        }
    }
}

/// `sum a(n) q^n -> sum n a(n) q^n`; precision unchanged.
pub fn theta(s: &QSeries) -> QSeries {
    let v = s.valuation();
    let numer: Vec<BigInt> = s
        .numerators()
        .iter()
        .enumerate()
        .map(|(i, c)| c * (v + i as i64))
        .collect();
    QSeries::from_parts(v, numer, s.denominator().clone(), s.prec())
}

/// `sum a(n) q^n -> sum a(p n) q^n`, known below `q^floor(prec / p)`.
pub fn u_p(s: &QSeries, p: u64) -> QSeries {
    assert!(p >= 1, "U_p needs p >= 1");
    let p = p as i64;
    let prec = s.prec().div_euclid(p);
    let val = (s.valuation() + p - 1).div_euclid(p).min(prec);
    let numer: Vec<BigInt> = (val..prec)
        .map(|n| {
            let e = p * n;
            if e < s.valuation() {
                BigInt::zero()
            } else {
                s.numerators()[(e - s.valuation()) as usize].clone()
            }
        })
        .collect();
    QSeries::from_parts(val, numer, s.denominator().clone(), prec)
}

/// `f(z) -> f(p z)`, i.e. `q -> q^p`; precision scaled by `p`.
pub fn v_p(s: &QSeries, p: u64) -> QSeries {
    s.dilate(p as i64)
}

/// `sum_i c_i (sign * scale * psi_cusp)^i` for the Atkin-Lehner data of
/// `(level, p)`, known below `q^prec`.
pub fn al_sum(level: i64, p: u64, coeffs: &[Rational], sign: i64, prec: i64) -> Result<QSeries> {
    let data = get_level(level)?;
    let aux = data.aux(p)?;
    if sign.abs() != 1 {
        return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")));
    }
    let lambda = Rational::from_integer(BigInt::from(sign * aux.scale));
    let cusp = aux.cusp_function.expand_series(prec)?;
    Ok(al_sum_with(coeffs, &lambda, &cusp))
}

/// `sum_i c_i (lambda * h)^i` for a power series `h`.
pub fn al_sum_with(coeffs: &[Rational], lambda: &Rational, h: &QSeries) -> QSeries {
    let scaled = h.scale(lambda);
    let mut acc = QSeries::zero(h.prec().max(0));
    for c in coeffs.iter().rev() {
        acc = &acc * &scaled;
        acc = &acc + &QSeries::monomial(c.clone(), 0, acc.prec());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn s(v: i64, c: &[i64], p: i64) -> QSeries {
        QSeries::from_i64s(v, c, p)
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&s(-1, &[1, 0, 6, 4], 3)), s(-1, &[-1, 0, 6, 8], 3));
        assert!(theta(&QSeries::one(10)).is_zero());
        assert_eq!(theta(&QSeries::one(10)).prec(), 10);
    }

    #[test]
    fn u_p_examples() {
        let psi = s(-1, &[1, 0, 6, 4, -3], 4);
        let u = u_p(&psi, 2);
        assert_eq!(u.prec(), 2);
        assert_eq!(u.coeff(1).unwrap(), Rational::from_integer(4.into()));
        // q^-2 + q^3 + O(q^6)
        let t = s(-2, &[1, 0, 0, 0, 0, 1, 0, 0], 6);
        let ut = u_p(&t, 2);
        assert_eq!(ut.valuation(), -1);
        assert_eq!(ut.prec(), 3);
        assert_eq!(ut.coeff(0).unwrap(), Rational::zero());
        assert_eq!(ut.coeff(1).unwrap(), Rational::zero());
        // negative precision floors
        assert_eq!(u_p(&QSeries::zero(-3), 2).prec(), -2);
    }

    #[test]
    fn v_p_examples() {
        let t = s(-1, &[1, 0, 1], 2);
        let v = v_p(&t, 3);
        assert_eq!(v.render_terms(5), "q^-3 + q^3");
        assert_eq!(v.prec(), 6);
        assert_eq!(v_p(&QSeries::one(5), 7), QSeries::one(5).dilate(7));
        assert_eq!(u_p(&v, 3), t);
    }

    #[test]
    fn al_sum_examples() {
        let one = al_sum(6, 2, &[Rational::one()], -1, 20).unwrap();
        assert!(one.agrees_with(&QSeries::one(20)));
        let lin = al_sum(6, 2, &[Rational::zero(), Rational::one()], -1, 20).unwrap();
        let cusp = get_level(6).unwrap().aux(2).unwrap().cusp_function.expand_series(20).unwrap();
        assert!(lin.agrees_with(&cusp.scale_int(&BigInt::from(-8))));
        let lin10 = al_sum(10, 2, &[Rational::zero(), Rational::one()], -1, 20).unwrap();
        assert_eq!(lin10.valuation(), 1);
        assert_eq!(lin10.leading_coeff().unwrap(), Rational::from_integer((-4).into()));
        assert!(matches!(al_sum(12, 2, &[], 1, 10), Err(Error::UnsupportedPair { level: 12, p: 2 })));
    }
}
