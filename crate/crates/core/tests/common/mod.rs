#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use sharpbasis::{QSeries, Rational};

/// Series with valuation in `-4..4`, relative precision `1..=rel`, and
/// coefficients `n/d` with small `n`, `d`.
pub fn arb_series(rel: i64) -> impl Strategy<Value = QSeries> {
    (-4i64..4, 1..=rel, 1i64..4).prop_flat_map(|(v, r, d)| {
        prop::collection::vec(-9i64..10, r as usize).prop_map(move |cs| {
            let coeffs = cs
                .into_iter()
                .map(|c| Rational::new(BigInt::from(c), BigInt::from(d)))
                .collect();
            QSeries::from_coeffs(v, coeffs, v + r)
        })
    })
}

/// The ring axioms on one triple, each side compared on the overlap of
/// the two precisions.
pub fn ring_axioms(a: &QSeries, b: &QSeries, c: &QSeries) -> Result<(), String> {
    let checks = [
        ("add assoc", &(&(a + b) + c), &(a + &(b + c))),
        ("add comm", &(a + b), &(b + a)),
        ("mul assoc", &(&(a * b) * c), &(a * &(b * c))),
        ("mul comm", &(a * b), &(b * a)),
        ("distrib", &(a * &(b + c)), &(&(a * b) + &(a * c))),
        ("add inverse", &(a - a), &QSeries::zero(a.prec())),
        ("mul identity", &(a * &QSeries::one(64)), a),
    ];
    for (name, x, y) in checks {
        if !x.agrees_with(y) {
            return Err(format!("{name}: {x} vs {y}"));
        }
    }
    Ok(())
}

/// `prod_{n >= 1} (1 - q^n)` through `q^(prec - 1)`, one factor at a time.
pub fn direct_euler(prec: i64) -> QSeries {
    let mut s = QSeries::one(prec);
    for n in 1..prec {
        s = &s - &s.shift(n).truncate(prec);
    }
    s
}
