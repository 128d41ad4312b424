//! Every shipped monad validates at its default bound.

use famkit::famrep::evaluate;
use famkit::fincat::{g1, semicube};
use famkit::monad::validate_monad_rep;
use famkit::presheaf::find_isos;
use famkit::zoo::{
    crossed_group_monad, cubical_monad, cyclic_group, factorization_monad, free_category_monad, free_monoid_monad, identity_monad,
    reedy_simplex_data, reflexive_graph_data, reversal_group, symmetric_cube_group,
};
use famkit::{MonadRep, Presheaf};
use std::sync::Arc;

fn assert_validates(m: &MonadRep) {
    let r = validate_monad_rep(m, m.default_bound);
    assert!(r.passed(), "{} at {}: {:?}", m.name, m.default_bound, &r.failures[..r.failures.len().min(3)]);
}

#[test]
fn path_and_word_monads() {
    assert_validates(&free_category_monad());
    assert_validates(&free_monoid_monad());
}

#[test]
fn identity_monads() {
    assert_validates(&identity_monad(&g1()));
    assert_validates(&identity_monad(&Arc::new(semicube(2))));
}

#[test]
fn factorization_monads() {
    for d in [reedy_simplex_data(2), reflexive_graph_data()] {
        assert_validates(&factorization_monad(&d).unwrap());
    }
}

#[test]
fn crossed_group_monads() {
    for cg in [reversal_group(1), reversal_group(2), cyclic_group(2), symmetric_cube_group(2, false), symmetric_cube_group(3, false)] {
        assert_validates(&crossed_group_monad(&cg).unwrap());
    }
}

#[test]
fn cubical_monad_at_default_bound() {
    assert_validates(&cubical_monad(2, 3));
}

#[test]
fn reedy_free_algebras_on_representables_are_representable() {
    let d = reedy_simplex_data(2);
    let m = factorization_monad(&d).unwrap();
    let base = m.base().clone();
    let total = &d.total;
    // base morphism k is the plus morphism of total morphism plus_of[k]
    let (_, to_plus) = d.plus_category();
    let mut plus_of = vec![usize::MAX; base.n_morphisms()];
    for (t, k) in to_plus.iter().enumerate() {
        if let Some(k) = k {
            plus_of[*k] = t;
        }
    }
    for b in 0..base.n_objects() {
        let ev = evaluate(m.rep.as_ref(), &Presheaf::representable(&base, b), 0).unwrap();
        let sizes = (0..base.n_objects()).map(|c| total.hom(c, b).len()).collect();
        let action = (0..base.n_morphisms())
            .map(|k| {
                let i = plus_of[k];
                let (src, dst) = (total.src(i), total.dst(i));
                total.hom(dst, b).iter().map(|&f| total.hom(src, b).iter().position(|&g| g == total.compose(f, i)).unwrap()).collect()
            })
            .collect();
        let restricted = Presheaf::new(base.clone(), sizes, action).unwrap();
        assert!(!find_isos(&ev.tx, &restricted).unwrap().is_empty(), "T y({b})");
    }
}
