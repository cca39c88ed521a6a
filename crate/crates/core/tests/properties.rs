use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use seifert_cs::cft::{s_matrix, FramingConvention};
use seifert_cs::lie::{
    casimir_scaled, dominant_weight_multiplicities, weyl_character, weyl_dimension_u64, weyl_orbit,
};
use seifert_cs::pairings::fit_quasi_polynomial;
use seifert_cs::seifert::seifert_with;
use seifert_cs::verlinde::verlinde_dimension_with;
use seifert_cs::ym2::{ym2_partition, YM2Request};
use seifert_cs::{build_root_system, CartanElement, RootSystem, Series, Weight};

fn a(r: usize) -> RootSystem {
    build_root_system(Series::A, r).unwrap()
}

fn dominant(r: usize, max: i64) -> impl Strategy<Value = Weight> {
    proptest::collection::vec(0..=max, r).prop_map(Weight)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn characters_are_weyl_invariant(r in 1usize..=3, seed in proptest::collection::vec(-1.5f64..1.5, 3), hw in dominant(3, 3)) {
        let rs = a(r);
        let hw = Weight(hw.0[..r].to_vec());
        let x = CartanElement::from_real(&seed[..r]);
        let base = weyl_character(&rs, &hw, &x).unwrap();
        for el in rs.weyl().unwrap().elements() {
            let moved = weyl_character(&rs, &hw, &el.act_point(&rs, &x)).unwrap();
            prop_assert!((moved - base).norm() <= 1e-9 * base.norm().max(1.0));
        }
    }

    #[test]
    fn dimension_is_sum_of_multiplicities(r in 1usize..=3, hw in dominant(3, 3)) {
        let rs = a(r);
        let hw = Weight(hw.0[..r].to_vec());
        let total: u64 = dominant_weight_multiplicities(&rs, &hw)
            .unwrap()
            .iter()
            .map(|(mu, m)| m * weyl_orbit(&rs, mu).unwrap().len() as u64)
            .sum();
        prop_assert_eq!(total, weyl_dimension_u64(&rs, &hw).unwrap());
    }

    #[test]
    fn casimir_is_nonnegative_and_zero_only_at_zero(r in 1usize..=4, hw in dominant(4, 5)) {
        let rs = a(r);
        let hw = Weight(hw.0[..r].to_vec());
        let c = casimir_scaled(&rs, &hw);
        prop_assert!(c >= 0);
        prop_assert_eq!(c == 0, hw.is_zero());
    }

    #[test]
    fn character_at_zero_is_dimension(r in 1usize..=3, hw in dominant(3, 4)) {
        let rs = a(r);
        let hw = Weight(hw.0[..r].to_vec());
        let chi = weyl_character(&rs, &hw, &CartanElement::zero(r)).unwrap();
        let d = weyl_dimension_u64(&rs, &hw).unwrap() as f64;
        prop_assert!((chi - Complex64::new(d, 0.0)).norm() <= 1e-9 * d);
    }

    #[test]
    fn quasi_polynomials_are_reproduced_exactly(
        period in 1usize..=3,
        degree in 0usize..=3,
        coeffs in proptest::collection::vec(-20i64..=20, 12),
    ) {
        // integer coefficients per residue class, leading ones made nonzero
        let class = |c: usize| -> Vec<i64> {
            let mut v: Vec<i64> = coeffs[c * 4..c * 4 + degree + 1].to_vec();
            if v[degree] == 0 { v[degree] = 1; }
            v
        };
        let value = |k: i64| -> BigInt {
            let cs = class(k.rem_euclid(period as i64) as usize);
            cs.iter().rev().fold(BigInt::from(0), |acc, &c| acc * k + c)
        };
        let n = (period * (degree + 4)) as i64;
        let samples: Vec<(i64, BigInt)> = (1..=n).map(|k| (k, value(k))).collect();
        let qp = fit_quasi_polynomial(&samples, 3, 3).unwrap();
        prop_assert!(qp.period <= period && period % qp.period == 0);
        prop_assert!(qp.degree <= degree);
        for k in 1..=(n + 10) {
            prop_assert_eq!(qp.eval(k), BigRational::from_integer(value(k)));
        }
    }

    #[test]
    fn genus_one_counts_weights(r in 1usize..=2, k in 1u32..=8) {
        let md = s_matrix(&a(r), k).unwrap();
        prop_assert_eq!(verlinde_dimension_with(&md, 1, &[]).unwrap() as usize, md.len());
    }

    #[test]
    fn fusion_coefficients_are_nonnegative_integers(k in 1u32..=6, i in 0usize..7, j in 0usize..7) {
        let md = s_matrix(&a(1), k).unwrap();
        let (i, j) = (i % md.len(), j % md.len());
        for c in 0..md.len() {
            let n = md.fusion(i, j, c);
            prop_assert!(n.im.abs() < 1e-9);
            prop_assert!((n.re - n.re.round()).abs() < 1e-9 && n.re.round() >= 0.0);
        }
    }

    #[test]
    fn orientation_reversal_conjugates(k in 1u32..=5, g in 0u32..=2, p in 1i64..=6, labelled in proptest::bool::ANY) {
        let md = s_matrix(&a(1), k).unwrap();
        let labels = if labelled { vec![Weight(vec![1])] } else { vec![] };
        let plus = seifert_with(&md, g, p, &labels, FramingConvention::Bare, false).unwrap();
        let minus = seifert_with(&md, g, -p, &labels, FramingConvention::Bare, false).unwrap();
        prop_assert!((plus.value() - minus.value().conj()).norm() < 1e-10);
    }

    #[test]
    fn framing_only_changes_the_phase(r in 1usize..=2, k in 1u32..=4, g in 0u32..=2, p in -4i64..=4) {
        let md = s_matrix(&a(r), k).unwrap();
        let bare = seifert_with(&md, g, p, &[], FramingConvention::Bare, false).unwrap();
        let canonical = seifert_with(&md, g, p, &[], FramingConvention::Canonical, false).unwrap();
        prop_assert!((bare.modulus - canonical.modulus).abs() < 1e-10);
    }

    #[test]
    fn ym2_decreases_in_epsilon(g in 2u32..=4, e1 in 0.0f64..2.0, de in 0.01f64..2.0) {
        let z = |e: f64| ym2_partition(&YM2Request {
            rs: a(1),
            genus: g,
            epsilon: e,
            cutoff: None,
            target_tol: 1e-12,
        }).unwrap().value;
        prop_assert!(z(e1 + de) < z(e1));
    }
}
