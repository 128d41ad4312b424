mod common;

use std::sync::Arc;

use famkit::fincat::{build_from_presentation, g1, semicube, FinCategory, Generator, Presentation};
use famkit::presheaf::{colimit_presheaves, coyoneda, hom_set, PresheafDiagram};
use famkit::{Presheaf, PresheafMorphism};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn bases() -> Vec<Arc<FinCategory>> {
    vec![g1(), Arc::new(semicube(2))]
}

/// The span `1 ← 0 → 2`.
fn span() -> Arc<FinCategory> {
    let p = Presentation {
        objects: vec!["0".into(), "1".into(), "2".into()],
        generators: vec![Generator { name: "l".into(), src: 0, dst: 1 }, Generator { name: "r".into(), src: 0, dst: 2 }],
        relations: Vec::new(),
        cap: 100,
    };
    Arc::new(build_from_presentation(&p).unwrap())
}

/// Families `(f_j: D_j → T)` compatible with the diagram, enumerated from the hom-sets alone.
fn cocones(d: &PresheafDiagram, t: &Presheaf) -> Vec<Vec<PresheafMorphism>> {
    let homs: Vec<Vec<PresheafMorphism>> = d.objects.iter().map(|x| hom_set(x, t).unwrap()).collect();
    let mut out = vec![Vec::new()];
    for h in &homs {
        out = out.into_iter().flat_map(|pre| h.iter().map(move |f| [pre.clone(), vec![f.clone()]].concat())).collect();
    }
    out.retain(|fs| d.shape.morphisms().iter().enumerate().all(|(u, m)| d.maps[u].then(&fs[m.dst]) == fs[m.src]));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yoneda_is_evaluation_at_the_identity(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for base in bases() {
            let x = common::random_presheaf(&mut rng, &base, 30);
            for c in 0..base.n_objects() {
                let y = Presheaf::representable(&base, c);
                let homs = hom_set(&y, &x).unwrap();
                let id_pos = base.hom(c, c).iter().position(|&j| j == base.id(c)).unwrap();
                let mut at_id: Vec<usize> = homs.iter().map(|h| h.comps[c][id_pos]).collect();
                at_id.sort_unstable();
                prop_assert_eq!(at_id, (0..x.sizes[c]).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn coyoneda_reconstructs(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for base in bases() {
            let x = common::random_presheaf(&mut rng, &base, 30);
            let (col, cmp) = coyoneda(&x).unwrap();
            prop_assert!(cmp.check_natural(&col.apex, &x).passed());
            prop_assert!(cmp.inverse().is_some());
            prop_assert_eq!(&col.apex.sizes, &x.sizes);
        }
    }

    #[test]
    fn pushouts_are_universal(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let base = g1();
        let a = common::random_graph(&mut rng, 2, 1);
        let b = common::random_graph(&mut rng, 3, 2);
        let c = common::random_graph(&mut rng, 3, 2);
        let (Some(l), Some(r)) = (hom_set(&a, &b).unwrap().choose(&mut rng).cloned(), hom_set(&a, &c).unwrap().choose(&mut rng).cloned()) else {
            return Ok(());
        };
        let shape = span();
        let id = |x: &Presheaf| PresheafMorphism::identity(x);
        // morphisms of the span in table order: identities and l, r
        let maps = shape.morphisms().iter().map(|m| match (m.src, m.dst) {
            (0, 1) => l.clone(),
            (0, 2) => r.clone(),
            (0, 0) => id(&a),
            (1, 1) => id(&b),
            _ => id(&c),
        }).collect();
        let d = PresheafDiagram { shape, objects: vec![a, b, c], maps };
        let col = colimit_presheaves(&d, &base).unwrap();
        for (u, m) in d.shape.morphisms().iter().enumerate() {
            prop_assert_eq!(d.maps[u].then(&col.injections[m.dst]), col.injections[m.src].clone());
        }
        let t = common::random_graph(&mut rng, 3, 4);
        let from_apex = hom_set(&col.apex, &t).unwrap();
        let mut induced: Vec<Vec<PresheafMorphism>> = from_apex.iter().map(|h| col.injections.iter().map(|i| i.then(h)).collect()).collect();
        let mut direct = cocones(&d, &t);
        prop_assert_eq!(induced.len(), from_apex.len());
        induced.sort();
        induced.dedup();
        direct.sort();
        // existence and uniqueness of the factorization
        prop_assert_eq!(induced.len(), from_apex.len());
        prop_assert_eq!(induced, direct);
    }

    #[test]
    fn composition_is_associative_and_unital(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let xs: Vec<Presheaf> = (0..4).map(|_| common::random_graph(&mut rng, 3, 3)).collect();
        let mut maps = Vec::new();
        for w in xs.windows(2) {
            match hom_set(&w[0], &w[1]).unwrap().choose(&mut rng) {
                Some(h) => maps.push(h.clone()),
                None => return Ok(()),
            }
        }
        let (f, g, h) = (&maps[0], &maps[1], &maps[2]);
        prop_assert_eq!(f.then(g).then(h), f.then(&g.then(h)));
        prop_assert_eq!(PresheafMorphism::identity(&xs[0]).then(f), f.clone());
        prop_assert_eq!(f.then(&PresheafMorphism::identity(&xs[1])), f.clone());
        prop_assert_eq!(hom_set(&xs[0], &xs[1]).unwrap(), hom_set(&xs[0], &xs[1]).unwrap());
    }
}
