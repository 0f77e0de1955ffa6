use proptest::prelude::*;
use torus_weyl::lattice::{symplectic_product, CenterIndex, ChordIndex, Phase, TorusSpace};
use torus_weyl::operators::{reflection, translation};
use torus_weyl::random::{random_operator, seeded};
use torus_weyl::symbols::{
    center_symbol, chord_symbol, extend_center, extend_chord, operator_from_center, operator_from_chord,
};

fn space() -> impl Strategy<Value = TorusSpace> {
    (1usize..6, prop_oneof![Just(0.0), 0.0..1.0f64], prop_oneof![Just(0.0), 0.0..1.0f64])
        .prop_map(|(n, p, q)| TorusSpace::new(n, p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wedge_is_antisymmetric(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
        let (u, v) = ([a, b], [c, d]);
        prop_assert_eq!(symplectic_product(u, v), -symplectic_product(v, u));
        prop_assert_eq!(symplectic_product(u, u), 0.0);
    }

    #[test]
    fn exact_phases_add(a in -50i128..50, b in 1i128..40, c in -50i128..50, d in 1i128..40) {
        let x = Phase::from_ratio(a, b);
        let y = Phase::from_ratio(c, d);
        prop_assert!((x + y).same_phase(&Phase::from_turns(x.turns() + y.turns()), 1e-12));
        prop_assert!((x - x).same_phase(&Phase::zero(), 0.0));
    }

    #[test]
    fn symbols_round_trip(s in space(), seed in any::<u64>()) {
        let a = random_operator(&s, &mut seeded(seed));
        prop_assert!(operator_from_chord(&chord_symbol(&a)).max_abs_diff(&a) < 1e-10);
        prop_assert!(operator_from_center(&center_symbol(&a)).max_abs_diff(&a) < 1e-10);
    }

    #[test]
    fn extended_symbols_are_traces(s in space(), seed in any::<u64>(), r in -12i64..12, q in -12i64..12) {
        let a = random_operator(&s, &mut seeded(seed));
        let ch = extend_chord(&chord_symbol(&a), r, q);
        let direct = (&a * &translation(&s, ChordIndex::new(-r, -q))).trace();
        prop_assert!((ch - direct).norm() < 1e-10);
        let ce = extend_center(&center_symbol(&a), r, q);
        let direct = (&a * &reflection(&s, CenterIndex::new(r, q))).trace();
        prop_assert!((ce - direct).norm() < 1e-10);
    }
}
