use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torsion_quads::classifier::FamilyTable;
use torsion_quads::curve_forms::*;
use torsion_quads::numeric::P1;
use torsion_quads::qseries::{verify_quad, Constancy, CONSTANCY_TOL};

const SAMPLES: usize = 100;

fn omega() -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0)
}

fn series_constant(case: u8) -> Complex64 {
    let m = FamilyTable::instantiate(12).into_iter().find(|m| m.case == case).unwrap();
    match verify_quad(&m.quad, 8, CONSTANCY_TOL).unwrap().constancy {
        Constancy::Constant { re, im } => Complex64::new(re, im),
        c => panic!("case {case}: {c:?}"),
    }
}

#[test]
fn every_case_is_constant_and_agrees_with_the_series() {
    for case in 1..=11 {
        let s = sweep(case, SAMPLES, 0x1000 + case as u64).unwrap();
        assert!(s.spread < 1e-9, "case {case}: spread {}", s.spread);
        assert!(s.max_residual < 1e-8, "case {case}: residual {}", s.max_residual);
        let q = series_constant(case);
        assert!((s.constant - q).norm() < 1e-8, "case {case}: {} vs {}", s.constant, q);
        let tag = s.tag.unwrap_or_else(|| panic!("case {case}: {} has no tag", s.constant));
        assert_eq!(Some(tag), FamilyTable::instantiate(12).iter().find(|m| m.case == case).map(|m| m.constant));
    }
}

#[test]
fn case_ten_cross_ratios_are_plus_or_minus_i() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..SAMPLES {
        let p = sample_jac(&mut rng);
        for a in Branch::ALL {
            for b in Branch::ALL {
                let c = verify_case_10(&p, a, b).unwrap();
                let expected = if a == b { -Complex64::i() } else { Complex64::i() };
                assert!((c.cross_ratio - expected).norm() < 1e-9, "{:?} {:?}: {}", a, b, c.cross_ratio);
                assert!((c.j6 - 0.5).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn cases_six_and_seven_reach_both_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    for _ in 0..SAMPLES {
        let c = verify_cases_6_7(&sample_jac(&mut rng)).unwrap();
        assert!((c.case6.cross_ratio + omega() * omega()).norm() < 1e-9);
        assert!(c.case6.j6.norm() < 1e-9);
        assert!((c.case7.j6 - 8.0 / 3.0).norm() < 1e-9);
        assert!(c.case6.residual < 1e-8 && c.case7.residual < 1e-8);
    }
}

#[test]
fn hessian_cases_have_the_displayed_cross_ratios() {
    let mut rng = ChaCha8Rng::seed_from_u64(389);
    let w = omega();
    for _ in 0..SAMPLES {
        let p = sample_hess(&mut rng);
        for k in 0..3 {
            let c = verify_cases_3_8_9(&p, k).unwrap();
            assert!(c.case3.j6.norm() < 1e-9);
            assert!((c.case8.cross_ratio - w).norm() < 1e-9, "{}", c.case8.cross_ratio);
            assert!((c.case8.j6 - 8.0 / 3.0).norm() < 1e-9);
            assert!((c.case9.cross_ratio + w * w).norm() < 1e-9, "{}", c.case9.cross_ratio);
            let c11 = verify_case_11(&p, k).unwrap();
            assert!(c11.j6.norm() < 1e-9 && c11.residual < 1e-8);
        }
    }
}

fn jac_param() -> impl Strategy<Value = JacParam> {
    (0.3..3.0f64, 0.0..std::f64::consts::TAU)
        .prop_filter_map("degenerate", |(r, a)| JacParam::new(Complex64::from_polar(r, a)).ok())
}

fn p1_point() -> impl Strategy<Value = P1> {
    prop_oneof![
        1 => Just(P1::Infinity),
        9 => (0.1..5.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| P1::Finite(Complex64::from_polar(r, a))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn doubling_commutes_with_two_torsion_translation(p in jac_param(), x in p1_point(), k in 0usize..4) {
        // [2](P + T) = [2]P, and x ↦ −x is P ↦ P + (−δ, 0)
        let t = TwoTorsion::ALL[k];
        let a = jac_double_x(jac_translate(x, t), &p);
        let b = jac_double_x(x, &p);
        let scale = match (a, b) {
            (P1::Finite(u), P1::Finite(v)) => u.norm().max(v.norm()).max(1.0),
            _ => 1.0,
        };
        prop_assert!(distance(a, b) < 1e-9 * scale, "{:?} {:?}", a, b);
    }

    #[test]
    fn translations_form_a_klein_group(x in p1_point(), i in 0usize..4, j in 0usize..4) {
        let (s, t) = (TwoTorsion::ALL[i], TwoTorsion::ALL[j]);
        let st = jac_translate(jac_translate(x, s), t);
        let ts = jac_translate(jac_translate(x, t), s);
        prop_assert!(distance(st, ts) < 1e-12);
        prop_assert!(distance(jac_translate(jac_translate(x, s), s), x) < 1e-12);
    }
}

fn distance(a: P1, b: P1) -> f64 {
    match (a, b) {
        (P1::Infinity, P1::Infinity) => 0.0,
        (P1::Finite(u), P1::Finite(v)) => (u - v).norm() / (1.0 + u.norm() * v.norm()),
        (P1::Finite(u), P1::Infinity) | (P1::Infinity, P1::Finite(u)) => 1.0 / u.norm().max(1e-300),
    }
}
