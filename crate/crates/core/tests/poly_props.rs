mod common;

use std::sync::Arc;

use famkit::famrep::{identity_rep, FreeCategoryRep};
use famkit::fincat::{check_category_laws, g1, CatFunctor};
use famkit::poly::{
    check_distributivity, check_gamma_evaluation, check_replacement, competitors, compose_polynomials, distributivity_pullback,
    familial_replacement, gamma, strict_pullback, ClassifiedOpfibration, Polynomial,
};
use famkit::FamRep;
use proptest::prelude::*;

fn free() -> FamRep {
    Arc::new(FreeCategoryRep::new())
}

/// Every lift `(i₀, id)` at `x` is cocartesian: morphisms out of `(b, x)` over `j ∘ i₀`
/// factor uniquely through it by a morphism over `j`.
fn lifts_are_cocartesian(p: &ClassifiedOpfibration) -> bool {
    let (t, base) = (&p.total, &p.base);
    let proj = p.projection();
    (0..base.n_morphisms()).all(|i0| {
        (0..p.fibers[base.src(i0)].n_objects()).all(|x| {
            let l = p.lift(i0, x);
            t.hom_from(t.src(l)).into_iter().all(|k| {
                base.hom(base.dst(i0), proj.obj[t.dst(k)]).iter().filter(|&&j| base.compose(j, i0) == proj.mor[k]).all(|&j| {
                    t.hom(t.dst(l), t.dst(k)).iter().filter(|&&h| proj.mor[h] == j && t.compose(h, l) == k).count() == 1
                })
            })
        })
    })
}

fn square_of(p: &Polynomial, q: &Polynomial) -> CatFunctor {
    strict_pullback(&p.p1, &q.p3).unwrap().1
}

#[test]
fn totals_are_categories_with_cocartesian_lifts() {
    let g = gamma(free().as_ref(), 2).unwrap();
    let gg = compose_polynomials(&gamma(free().as_ref(), 1).unwrap(), &gamma(free().as_ref(), 1).unwrap()).unwrap();
    let id = gamma(identity_rep(&g1()).as_ref(), 0).unwrap();
    for p in [&g, &gg, &id] {
        assert!(check_category_laws(&p.opf.total).passed());
        assert!(lifts_are_cocartesian(&p.opf), "{}", p.name);
    }
}

#[test]
fn distributivity_against_all_restricted_competitors() {
    let (g1p, g2p) = (gamma(free().as_ref(), 1).unwrap(), gamma(free().as_ref(), 2).unwrap());
    for (p, q) in [(&g1p, &g1p), (&g1p, &g2p)] {
        let u = square_of(p, q);
        assert!(u.source.n_objects() <= 50);
        let dp = distributivity_pullback(&u, &p.opf).unwrap();
        let comps = competitors(&dp, &p.opf).unwrap();
        let r = check_distributivity(&u, &p.opf, &dp, &comps).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn gamma_evaluates_like_the_representation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_graph(&mut rng, 4, 6);
        prop_assert!(check_gamma_evaluation(free().as_ref(), 2, &x).unwrap().passed());
        prop_assert!(check_gamma_evaluation(identity_rep(&g1()).as_ref(), 0, &x).unwrap().passed());
    }

    #[test]
    fn replacement_preserves_evaluation(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let x = common::random_graph(&mut rng, 3, 4);
        let g = gamma(free().as_ref(), 1).unwrap();
        let gg = compose_polynomials(&g, &g).unwrap();
        let (rp, pi) = familial_replacement(&gg).unwrap();
        prop_assert!(check_replacement(&gg, &rp, &pi, &x).unwrap().passed());
    }
}
