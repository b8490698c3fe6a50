mod common;

use common::good_poly;
use num_bigint::BigUint;
use proptest::prelude::*;
use ramsey_forge::coloring::{
    collapse_to_t, lift_from_nat, lift_transfer_holds, Memoized, NatColoring, PolyColoring, PolyOracle,
};
use ramsey_forge::poly::GoodPoly;

fn battery() -> Vec<PolyColoring> {
    vec![
        lift_from_nat(NatColoring::modulo(2).unwrap(), 2).unwrap(),
        lift_from_nat(NatColoring::modulo(5).unwrap(), 3).unwrap(),
        collapse_to_t(lift_from_nat(NatColoring::modulo(3).unwrap(), 2).unwrap()),
    ]
}

proptest! {
    #[test]
    fn lift_is_evaluation(p in good_poly(1, 6, 9), m in 2u32..12, base in 2u32..5) {
        let inner = NatColoring::modulo(m).unwrap();
        let lifted = lift_from_nat(inner.clone(), base).unwrap();
        let value = p.evaluate_at(&BigUint::from(base));
        prop_assert_eq!(lifted.color(&p).unwrap(), inner.color(&value).unwrap());
    }

    #[test]
    fn colors_are_deterministic_and_in_range(p in good_poly(3, 3, 4)) {
        for c in battery() {
            let a = c.color(&p).unwrap();
            prop_assert_eq!(a, c.color(&p).unwrap());
            prop_assert!(a.0 < c.color_count());
        }
    }

    #[test]
    fn reducibility_is_deterministic(p in good_poly(4, 1, 4), u in good_poly(1, 5, 4)) {
        let c = PolyColoring::Reducibility;
        for q in [&p, &u] {
            let a = c.color(q).unwrap();
            prop_assert_eq!(a, c.color(q).unwrap());
            prop_assert!(a.0 < 2);
        }
    }

    #[test]
    fn memoized_agrees(ps in prop::collection::vec(good_poly(2, 3, 3), 1..20)) {
        let c = lift_from_nat(NatColoring::modulo(7).unwrap(), 2).unwrap();
        let m = Memoized::new(c.clone());
        for p in ps.iter().chain(ps.iter()) {
            prop_assert_eq!(m.color(p).unwrap(), c.color(p).unwrap());
        }
    }

    #[test]
    fn lifted_monochromatic_sets_evaluate_monochromatic(ps in prop::collection::vec(good_poly(1, 4, 6), 1..6)) {
        let inner = NatColoring::modulo(3).unwrap();
        let lifted = lift_from_nat(inner.clone(), 2).unwrap();
        let c0 = lifted.color(&ps[0]).unwrap();
        let mono: Vec<GoodPoly> = ps.into_iter().filter(|p| lifted.color(p).unwrap() == c0).collect();
        prop_assert!(lift_transfer_holds(&inner, 2, &mono).unwrap());
    }
}

#[test]
fn table_outside_domain_is_an_error() {
    let c = lift_from_nat(NatColoring::table(vec![0, 1, 0]).unwrap(), 2).unwrap();
    assert!(c.color(&"t".parse().unwrap()).is_ok());
    assert!(c.color(&"t^2".parse().unwrap()).is_err());
}
