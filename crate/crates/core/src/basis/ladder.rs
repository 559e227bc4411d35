use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{check_element_shape, first_element, first_index, gap, BasisElement, Space};
use crate::error::{Error, Result};
use crate::leveldata::LevelData;
use crate::series::{QSeries, Rational};

/// The elements of one `(N, k, space)` basis from index `-gap` upward, all
/// sharing the relative precision `rel_prec`: the element of index `m` is
/// known below `q^(rel_prec - m)`.
#[derive(Clone, Debug)]
pub struct Ladder {
    level: u64,
    weight: i64,
    space: Space,
    gap: i64,
    first: i64,
    rel_prec: i64,
    psi: QSeries,
    elements: Vec<Arc<BasisElement>>,
}

impl Ladder {
    pub fn new(data: &LevelData, weight: i64, space: Space, rel_prec: i64) -> Result<Self> {
        let rel_prec = rel_prec.max(2);
        let first = first_element(data, weight, space, rel_prec)?;
        let psi = data.hauptmodul_series(rel_prec - 1)?;
        Ok(Ladder {
            level: data.level,
            weight,
            space,
            gap: gap(data, weight, space)?,
            first: first_index(data, weight, space)?,
            rel_prec,
            psi,
            elements: vec![Arc::new(first)],
        })
    }

    /// Rebuilds a ladder from stored elements (all checked for shape and
    /// common relative precision).
    pub(crate) fn from_elements(data: &LevelData, weight: i64, space: Space, rel_prec: i64, elements: Vec<BasisElement>) -> Result<Self> {
        let mut ladder = Ladder::new(data, weight, space, rel_prec)?;
        let first = ladder.first;
        if elements.is_empty() || elements[0] != *ladder.elements[0] {
            return Err(Error::Cache("stored first element does not match a fresh computation".into()));
        }
        for (i, e) in elements.into_iter().enumerate().skip(1) {
            let m = first + i as i64;
            if e.index != m || e.level != data.level || e.weight != weight || e.space != space || e.prec() != rel_prec - m {
                return Err(Error::Cache(format!("stored element {m} is inconsistent")));
            }
            check_element_shape(data, weight, m, &e.expansion)?;
            ladder.elements.push(Arc::new(e));
        }
        Ok(ladder)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn gap(&self) -> i64 {
        self.gap
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }

    pub fn rel_prec(&self) -> i64 {
        self.rel_prec
    }

    /// Largest index built so far.
    pub fn top_index(&self) -> i64 {
        self.first + self.elements.len() as i64 - 1
    }

    pub fn elements(&self) -> &[Arc<BasisElement>] {
        &self.elements
    }

    /// Precision bound of the element of index `m`.
    pub fn prec_of(&self, m: i64) -> i64 {
        self.rel_prec - m
    }

    /// The element of index `m`, extending the ladder as needed.
    pub fn element(&mut self, m: i64) -> Result<Arc<BasisElement>> {
        if m < self.first {
            return Err(Error::IndexBelowRange { m, min: self.first });
        }
        while self.top_index() < m {
            self.step()?;
        }
        Ok(self.elements[(m - self.first) as usize].clone())
    }

    fn step(&mut self) -> Result<()> {
        let m = self.top_index() + 1;
        let prev = self.elements.last().expect("ladder is never empty");
        let mut cand = &self.psi * &prev.expansion;
        let mut poly = Vec::with_capacity(prev.haupt_poly.len() + 1);
        poly.push(BigInt::zero());
        poly.extend(prev.haupt_poly.iter().cloned());
        for t in (-m + 1)..=self.gap {
            let c = cand.integer_coeff(t)?;
            if c.is_zero() {
                continue;
            }
            let lower = &self.elements[(-t - self.first) as usize];
            cand = cand.add_scaled(&-Rational::from_integer(c.clone()), &lower.expansion);
            for (slot, x) in poly.iter_mut().zip(&lower.haupt_poly) {
                *slot -= &c * x;
            }
        }
        if cand.valuation() != -m || cand.coeff(-m)? != Rational::from_integer(1.into()) {
            return Err(Error::NonUnitPivot {
                level: self.level,
                weight: self.weight,
                exponent: -m,
                pivot: cand.coeff(-m).map(|c| c.to_string()).unwrap_or_else(|_| "unknown".into()),
            });
        }
        if !cand.is_integral() {
            let n = (cand.valuation()..cand.prec())
                .find(|&n| cand.integer_coeff(n).is_err())
                .unwrap_or(-m);
            return Err(Error::IntegralityViolation { exponent: n, value: cand.coeff(n)?.to_string() });
        }
        self.elements.push(Arc::new(BasisElement {
            level: self.level,
            weight: self.weight,
            index: m,
            space: self.space,
            expansion: cand,
            haupt_poly: poly,
        }));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leveldata::get_level;

    #[test]
    fn level6_weight0() {
        let d = get_level(6).unwrap();
        let mut l = Ladder::new(d, 0, Space::M, 40).unwrap();
        let f1 = l.element(1).unwrap();
        assert_eq!(f1.expansion.render_terms(4), "q^-1 + 6q + 4q^2 - 3q^3");
        assert_eq!(f1.prec(), 39);
        let f2 = l.element(2).unwrap();
        assert_eq!(f2.expansion.render_terms(3), "q^-2 + 8q + 30q^2");
        // f_{0,2} = psi^2 - 12
        assert_eq!(f2.haupt_poly, vec![BigInt::from(-12), BigInt::zero(), BigInt::from(1)]);
    }

    #[test]
    fn level6_weight2_cusp_space() {
        let d = get_level(6).unwrap();
        let mut l = Ladder::new(d, 2, Space::S, 40).unwrap();
        let g = l.element(1).unwrap();
        assert_eq!(g.expansion.render_terms(4), "q^-1 - 6q - 8q^2 + 9q^3");
        assert!(matches!(l.element(-3), Err(Error::IndexBelowRange { m: -3, min: 1 })));
    }

    #[test]
    fn ladder_agrees_with_direct_construction() {
        for n in [6, 10, 12, 18] {
            let d = get_level(n).unwrap();
            for k in [-2, 0, 2, 4] {
                for space in [Space::M, Space::S] {
                    let mut l = Ladder::new(d, k, space, 60).unwrap();
                    let m0 = l.first_index();
                    for m in [m0, m0 + 1, m0 + 5, m0 + 11] {
                        let a = l.element(m).unwrap();
                        let b = super::super::direct_element(d, k, space, m, 60).unwrap();
                        assert!(a.expansion.agrees_with(&b.expansion), "N={n} k={k} {space} m={m}");
                        assert_eq!(a.haupt_poly, b.haupt_poly, "N={n} k={k} {space} m={m}");
                    }
                }
            }
        }
    }
}
