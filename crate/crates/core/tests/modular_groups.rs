use proptest::prelude::*;
use torsion_quads::goodness::{good_quad, Goodness};
use torsion_quads::level::Level;
use torsion_quads::modular_groups::*;
use torsion_quads::sl2::{act, sl2_order, stabilizer_gamma_s};
use torsion_quads::{Mat2, Mat2ModN, Quad};

fn quad(max_n: u32) -> impl Strategy<Value = Quad> {
    (2..=max_n).prop_flat_map(|n| {
        let len = Level::new(n).len();
        prop::sample::subsequence((0..len as u16).collect::<Vec<_>>(), 4)
            .prop_map(move |ix| Level::new(n).quad([ix[0], ix[1], ix[2], ix[3]]))
    })
}

#[test]
fn delta_order_is_orbit_invariant() {
    let s5 = level_five_quad();
    let base = delta_s(&s5, DELTA_TERMS, DELTA_TOL).unwrap();
    for g in [Mat2::new(1, 1, 0, 1), Mat2::new(0, -1, 1, 0), Mat2::new(2, 1, 1, 1), Mat2::new(1, 2, 1, 3)] {
        let moved = act(&g.unwrap(), &s5);
        let r = delta_s(&moved, DELTA_TERMS, DELTA_TOL).unwrap();
        assert_eq!(r.delta_s.len(), base.delta_s.len(), "{moved}");
        assert_eq!(r.gamma_s.len(), base.gamma_s.len(), "{moved}");
    }
}

#[test]
fn good_quads_of_prime_order_have_proper_delta() {
    for text in ["0,1/5;0,2/5;1/5,0;2/5,0", "0,1/5;0,2/5;1/5,1/5;2/5,3/5", "0,1/7;1/7,2/7;2/7,1/7;3/7,5/7"] {
        let s: Quad = text.parse().unwrap();
        assert!(matches!(good_quad(&s), Goodness::Good { .. }), "{text}");
        let r = delta_s(&s, 3, DELTA_TOL).unwrap();
        assert!((r.delta_s.len() as u64) < sl2_order(r.n), "{text}");
        assert!(r.gamma_s.is_subset(&r.delta_s));
    }
}

#[test]
fn level_five_quads_partition_order_five_points() {
    let r = level_five_partition(DELTA_TERMS, DELTA_TOL).unwrap();
    assert!(r.pairwise_disjoint && r.covers_order_n && r.mu_equal);
    assert_eq!(r.order_n_points, 12);
    let size = torsion_quads::qseries::mu_series(&level_five_quad(), DELTA_TERMS).unwrap().max_abs();
    assert!(r.max_mu_difference < DELTA_TOL * size);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn stabilizers_are_closed(s in quad(8)) {
        let g = stabilizer_gamma_s(&s);
        prop_assert!(g.is_subgroup());
        prop_assert!(g.contains(&Mat2ModN::minus_identity(g.n())));
    }

    #[test]
    fn delta_is_a_subgroup_containing_gamma(s in quad(4)) {
        let r = delta_s(&s, 2, DELTA_TOL);
        prop_assume!(!matches!(r, Err(torsion_quads::Error::Degenerate(_))));
        let r = r.unwrap();
        prop_assert!(r.delta_s.is_subgroup());
        prop_assert!(r.gamma_s.is_subset(&r.delta_s));
    }
}
