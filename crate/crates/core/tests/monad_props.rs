mod common;

use famkit::monad::{check_monad_laws_on, unit_transformation, validate_monad_rep};
use famkit::presheaf::{find_isos, graph, path};
use famkit::zoo::{free_category_monad, free_monoid_monad, identity_monad};
use famkit::Op;
use proptest::prelude::*;

#[test]
fn validation_implies_laws_at_smaller_bounds() {
    let fixtures = [path(2), graph(2, &[(0, 1), (1, 0)]), graph(1, &[(0, 0)]), graph(3, &[(0, 1), (0, 1), (1, 2)])];
    let m = free_category_monad();
    assert!(validate_monad_rep(&m, 3).passed());
    // the unit needs paths of length 1
    assert!(matches!(check_monad_laws_on(&m, &fixtures[0], 0), Err(famkit::FamError::BoundTooSmall(_))));
    for b in 1..=3 {
        for x in &fixtures {
            let r = check_monad_laws_on(&m, x, b).unwrap();
            assert!(r.passed(), "bound {b}: {:?}", r.failures.first());
        }
    }
    let id = identity_monad(&famkit::fincat::g1());
    assert!(validate_monad_rep(&id, 1).passed());
    for x in &fixtures {
        assert!(check_monad_laws_on(&id, x, 0).unwrap().passed());
    }
}

#[test]
fn free_monoid_laws_on_sets() {
    let m = free_monoid_monad();
    let rep = famkit::famrep::FreeMonoidRep::new();
    for n in 0..=2 {
        assert!(check_monad_laws_on(&m, &rep.set(n), 3).unwrap().passed());
    }
}

#[test]
fn free_category_arities_are_pairwise_distinct() {
    // one basic operation per arity shape: paths of different lengths are not isomorphic
    let m = free_category_monad();
    for a in 0..=4 {
        for b in 0..=4 {
            let isos = find_isos(&m.rep.arity(1, &Op::nat(a)), &m.rep.arity(1, &Op::nat(b))).unwrap();
            assert_eq!(isos.len(), usize::from(a == b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn laws_and_cartesian_squares_on_random_graphs(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_graph(&mut rng, 3, 4);
        let r = check_monad_laws_on(&free_category_monad(), &x, 2).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures.first());
    }

    #[test]
    fn unit_is_injective(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_graph(&mut rng, 4, 6);
        let (_, eta) = unit_transformation(&free_category_monad(), &x, 2).unwrap();
        prop_assert!(eta.is_injective());
    }
}
