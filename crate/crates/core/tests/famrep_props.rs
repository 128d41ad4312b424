mod common;

use std::sync::Arc;

use famkit::famrep::{
    apply_rep_morphism, associator, check_cartesian, check_natural_iso, compose, composite_comparison, evaluate, identity_rep, left_unitor,
    map_cells, right_unitor, FreeCategoryRep, RepMorphism, TransformationSample,
};
use famkit::fincat::g1;
use famkit::presheaf::{find_isos, hom_positions, hom_set, path};
use famkit::{Evaluation, FamRep, Presheaf, PresheafMorphism};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn free() -> FamRep {
    Arc::new(FreeCategoryRep::new())
}

/// `1X → X`: the cell `(∗, x: y(c) → X)` goes to `x(id_c)`.
fn identity_counit(ev: &Evaluation) -> PresheafMorphism {
    let base = ev.tx.base.clone();
    let pos = hom_positions(&base);
    PresheafMorphism { comps: (0..base.n_objects()).map(|c| ev.cells[c].iter().map(|oc| oc.fill.comps[c][pos[base.id(c)]]).collect()).collect() }
}

/// Naturality squares of `φ` along `h: X → Y`.
fn rep_morphism_square(phi: &RepMorphism, x: &Presheaf, y: &Presheaf, h: &PresheafMorphism, bound: usize) -> TransformationSample {
    let (sx, sy) = (evaluate(phi.source.as_ref(), x, bound).unwrap(), evaluate(phi.source.as_ref(), y, bound).unwrap());
    let (tx, ty) = (evaluate(phi.target.as_ref(), x, bound).unwrap(), evaluate(phi.target.as_ref(), y, bound).unwrap());
    let maps = [
        map_cells(&sx, &sy, h).unwrap(),
        apply_rep_morphism(phi, &sx, &tx).unwrap(),
        apply_rep_morphism(phi, &sy, &ty).unwrap(),
        map_cells(&tx, &ty, h).unwrap(),
    ];
    TransformationSample::new(phi.source.name(), &sx.tx, &sy.tx, &tx.tx, &ty.tx, maps)
}

#[test]
fn structural_maps_are_the_canonical_comparisons() {
    let (fc, id) = (free(), identity_rep(&g1()));
    let b = 2;
    for x in [path(2), famkit::presheaf::cycle(2)] {
        let sx = evaluate(fc.as_ref(), &x, b).unwrap();
        // λ: (1S)X → SX agrees with (1S)X ≅ 1(SX) → SX
        let one_s = compose(id.clone(), fc.clone(), b).unwrap();
        let ev = evaluate(one_s.as_ref(), &x, b).unwrap();
        let one_sx = evaluate(id.as_ref(), &sx.tx, b).unwrap();
        let lam = apply_rep_morphism(&left_unitor(&fc, b).unwrap(), &ev, &sx).unwrap();
        let canon = composite_comparison(&one_s, &ev, &sx, &one_sx).unwrap().then(&identity_counit(&one_sx));
        assert_eq!(lam, canon);
        // ρ: (S1)X → SX agrees with (S1)X ≅ S(1X) → SX
        let s_one = compose(fc.clone(), id.clone(), b).unwrap();
        let ev = evaluate(s_one.as_ref(), &x, b).unwrap();
        let one_x = evaluate(id.as_ref(), &x, b).unwrap();
        let s_one_x = evaluate(fc.as_ref(), &one_x.tx, b).unwrap();
        let rho = apply_rep_morphism(&right_unitor(&fc, b).unwrap(), &ev, &sx).unwrap();
        let canon = composite_comparison(&s_one, &ev, &one_x, &s_one_x).unwrap().then(&map_cells(&s_one_x, &sx, &identity_counit(&one_x)).unwrap());
        assert_eq!(rho, canon);
        // α: ((RS)T)X → (R(ST))X agrees with both routes to R(S(TX))
        let rs = compose(fc.clone(), fc.clone(), b).unwrap();
        let st = compose(fc.clone(), fc.clone(), b).unwrap();
        let rs_t = compose(rs.clone(), fc.clone(), b).unwrap();
        let r_st = compose(fc.clone(), st.clone(), b).unwrap();
        let (ev_a, ev_b) = (evaluate(rs_t.as_ref(), &x, b).unwrap(), evaluate(r_st.as_ref(), &x, b).unwrap());
        let alpha = apply_rep_morphism(&associator(&fc, &fc, &fc, b).unwrap(), &ev_a, &ev_b).unwrap();
        let tx = &sx;
        let rs_tx = evaluate(rs.as_ref(), &tx.tx, b).unwrap();
        let s_tx = evaluate(fc.as_ref(), &tx.tx, b).unwrap();
        let r_s_tx = evaluate(fc.as_ref(), &s_tx.tx, b).unwrap();
        let left = composite_comparison(&rs_t, &ev_a, tx, &rs_tx).unwrap().then(&composite_comparison(&rs, &rs_tx, &s_tx, &r_s_tx).unwrap());
        let st_x = evaluate(st.as_ref(), &x, b).unwrap();
        let r_st_x = evaluate(fc.as_ref(), &st_x.tx, b).unwrap();
        let inner = composite_comparison(&st, &st_x, tx, &s_tx).unwrap();
        let right = composite_comparison(&r_st, &ev_b, &st_x, &r_st_x).unwrap().then(&map_cells(&r_st_x, &r_s_tx, &inner).unwrap());
        assert_eq!(alpha.then(&right), left);
        assert!(check_natural_iso("associator", &alpha, &ev_a.tx, &ev_b.tx).passed());
    }
}

#[test]
fn structural_components_are_isomorphisms() {
    let fc = free();
    for phi in [left_unitor(&fc, 3).unwrap(), right_unitor(&fc, 3).unwrap(), associator(&fc, &fc, &fc, 2).unwrap()] {
        for (c, comps) in phi.components.iter().enumerate() {
            for (t, (pt, pe)) in comps {
                let isos = find_isos(&phi.source.arity(c, t), &phi.target.arity(c, pt)).unwrap();
                assert!(isos.contains(pe), "{t}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn map_cells_is_functorial(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fc = free();
        let xs: Vec<Presheaf> = (0..3).map(|_| common::random_graph(&mut rng, 3, 3)).collect();
        let Some(f) = hom_set(&xs[0], &xs[1]).unwrap().choose(&mut rng).cloned() else { return Ok(()) };
        let Some(g) = hom_set(&xs[1], &xs[2]).unwrap().choose(&mut rng).cloned() else { return Ok(()) };
        let ev: Vec<Evaluation> = xs.iter().map(|x| evaluate(fc.as_ref(), x, 2).unwrap()).collect();
        let tf = map_cells(&ev[0], &ev[1], &f).unwrap();
        let tg = map_cells(&ev[1], &ev[2], &g).unwrap();
        prop_assert_eq!(map_cells(&ev[0], &ev[2], &f.then(&g)).unwrap(), tf.then(&tg));
        prop_assert_eq!(map_cells(&ev[0], &ev[0], &PresheafMorphism::identity(&xs[0])).unwrap(), PresheafMorphism::identity(&ev[0].tx));
    }

    #[test]
    fn composite_evaluation_is_iterated(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let fc = free();
        let ff = compose(fc.clone(), fc.clone(), 2).unwrap();
        let x = common::random_graph(&mut rng, 3, 3);
        let ev_c = evaluate(ff.as_ref(), &x, 2).unwrap();
        let ev_i = evaluate(fc.as_ref(), &x, 2).unwrap();
        let ev_o = evaluate(fc.as_ref(), &ev_i.tx, 2).unwrap();
        let m = composite_comparison(&ff, &ev_c, &ev_i, &ev_o).unwrap();
        prop_assert!(check_natural_iso("comparison", &m, &ev_c.tx, &ev_o.tx).passed());
    }

    #[test]
    fn rep_morphisms_are_cartesian(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (x, y, h) = common::random_graph_morphism(&mut rng);
        let fc = free();
        let mut samples = Vec::new();
        for phi in [left_unitor(&fc, 2).unwrap(), right_unitor(&fc, 2).unwrap(), RepMorphism::identity(&fc, 2)] {
            samples.push(rep_morphism_square(&phi, &x, &y, &h, 2));
        }
        let r = check_cartesian(&samples);
        prop_assert!(r.passed(), "{:?}", r.failures.first());
    }
}
