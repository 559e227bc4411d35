//! Frozen values from an independent computation: truncated eta products
//! expanded by direct multiplication and `f_{0,m}` obtained by reducing
//! `psi^m` against lower powers of `psi`.

use num_bigint::BigInt;
use sharpbasis::basis::Space;
use sharpbasis::leveldata::get_level;
use sharpbasis::operators::{u_p, v_p};
use sharpbasis::{BasisCache, EtaCombination, QSeries};

const A0: &[(i64, i64, [i64; 12])] = &[
    (6, 1, [6, 4, -3, -12, -8, 12, 30, 20, -30, -72, -46, 60]),
    (6, 2, [8, 30, 24, -36, -144, -123, 192, 588, 456, -696, -2016, -1452]),
    (6, 3, [-9, 36, 186, 180, -351, -1364, -1260, 2196, 7467, 6264, -10260, -32772]),
    (6, 4, [-48, -72, 240, 1230, 1376, -2904, -11904, -11636, 21840, 79632, 70976, -123627]),
    (6, 8, [160, 2352, 5856, -23272, -159552, -246768, 705280, 3772974, 4776864, -11554656, -53741952, -60359736]),
    (10, 1, [1, 2, 2, -2, -1, 0, -4, -2, 5, 2, 0, 8]),
    (10, 2, [4, 5, 0, 6, 4, -14, -16, 2, -12, -13, 48, 48]),
    (10, 3, [6, 0, 16, 24, -9, -16, 12, -72, -118, 48, 72, -32]),
    (10, 4, [-8, 12, 32, 13, 24, 96, -64, -242, -40, -148, -544, 338]),
    (10, 8, [-16, 8, -192, -484, 304, 736, -384, 4637, 9648, -4888, -9792, 4896]),
    (12, 1, [2, 0, 1, 0, 0, 0, -2, 0, -2, 0, 2, 0]),
    (12, 2, [0, 6, 0, 4, 0, -3, 0, -12, 0, -8, 0, 12]),
    (12, 3, [3, 0, 14, 0, 9, 0, -12, 0, -41, 0, -36, 0]),
    (12, 4, [0, 8, 0, 30, 0, 24, 0, -36, 0, -144, 0, -123]),
    (12, 8, [0, -48, 0, -72, 0, 240, 0, 1230, 0, 1376, 0, -2904]),
    (18, 1, [0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0]),
    (18, 2, [2, 0, 0, 3, 0, 0, 0, 0, 0, -3, 0, 0]),
    (18, 3, [0, 0, 6, 0, 0, 4, 0, 0, -3, 0, 0, -12]),
    (18, 4, [0, 6, 0, 0, 8, 0, 0, 7, 0, 0, -16, 0]),
    (18, 8, [-8, 0, 0, 14, 0, 0, 64, 0, 0, 120, 0, 0]),
];

#[test]
fn weight_zero_coefficients() {
    let cache = BasisCache::new();
    for &(n, m, ref expected) in A0 {
        for (i, &e) in expected.iter().enumerate() {
            let got = cache.a_coeff(n, 0, m, i as i64 + 1).unwrap();
            assert_eq!(got, BigInt::from(e), "a_0^({n})({m}, {})", i + 1);
        }
        // gap: nothing between q^-m and q^1
        let f = cache.f(n, 0, m, 2).unwrap();
        for e in -m + 1..=0 {
            assert_eq!(f.coeff(e).unwrap(), BigInt::from(0));
        }
    }
}

#[test]
fn weight_two_cusp_forms_are_derivatives() {
    // b_2(m, n) = -n a_0(m, n) / m
    let cache = BasisCache::new();
    for &(n, m, ref expected) in A0 {
        for (i, &e) in expected.iter().enumerate() {
            let k = i as i64 + 1;
            assert_eq!(cache.b_coeff(n, 2, m, k).unwrap() * m, BigInt::from(-k * e), "b_2^({n})({m}, {k})");
        }
    }
}

fn series(text: &str, prec: i64) -> QSeries {
    sharpbasis::series::parse_expansion(text, prec).unwrap()
}

#[test]
fn printed_expansions() {
    let d6 = get_level(6).unwrap();
    assert!(d6.hauptmodul_series(4).unwrap().agrees_with(&series("q^-1 + 6q + 4q^2 - 3q^3", 4)));
    let f6 = d6.weight_form(2).unwrap().expand(9).unwrap();
    assert_eq!(f6, series("q^2 - 2q^3 + 3q^4 - q^6 + 7q^8", 9));
    let d12 = get_level(12).unwrap();
    assert!(d12.hauptmodul_series(7).unwrap().agrees_with(&series("q^-1 + 2q + q^3", 7)));
}

#[test]
fn level_ten_weight_two_form() {
    let d = get_level(10).unwrap();
    let f = d.weight_form(2).unwrap().expand(17).unwrap();
    assert_eq!(f, series("q^2 + 3q^4 - 4q^5 + 4q^6 + 7q^8 - 3q^10 + 12q^12 + 8q^14 - 16q^15 + 15q^16", 17));
    // the printed quotient has the right weight but not the right order
    let printed = EtaCombination::parse(10, "eta(2)^-1 * eta(10)^5").unwrap().expand(6).unwrap();
    assert_eq!(printed, series("q^2 + q^4", 6));
}

#[test]
fn corrected_weight_forms_are_dilations() {
    let base = get_level(6).unwrap().weight_form(2).unwrap().expand(40).unwrap();
    let f12 = get_level(12).unwrap().weight_form(2).unwrap().expand(60).unwrap();
    let f18 = get_level(18).unwrap().weight_form(2).unwrap().expand(90).unwrap();
    assert!(f12.agrees_with(&v_p(&base, 2)));
    assert!(f18.agrees_with(&v_p(&base, 3)));
    assert_eq!(f18.render_terms(5), "q^6 - 2q^9 + 3q^12 - q^18 + 7q^24");
}

#[test]
fn named_quotient_and_level_lowering() {
    let cache = BasisCache::new();
    let g = cache.element(6, 2, Space::S, 1, 30).unwrap();
    let eta = EtaCombination::parse(6, "eta(2)^6 * eta(3)^8 * eta(6)^-10").unwrap().expand(30).unwrap();
    assert!(g.expansion.agrees_with(&eta));
    assert_eq!(eta.render_terms(4), "q^-1 - 6q - 8q^2 + 9q^3");
    let f = cache.f(18, 0, 3, 120).unwrap();
    let psi6 = get_level(6).unwrap().hauptmodul_series(40).unwrap();
    assert!(u_p(&f.expansion.truncate(120), 3).agrees_with(&psi6));
    assert_eq!(cache.a_coeff(12, 0, 2, 2).unwrap(), BigInt::from(6));
    assert_eq!(cache.a_coeff(12, 0, 2, 4).unwrap(), BigInt::from(4));
}
