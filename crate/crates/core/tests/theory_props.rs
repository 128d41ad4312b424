mod common;

use famkit::fincat::{build_from_presentation, check_category_laws, Generator, Presentation};
use famkit::monad::free_algebra;
use famkit::presheaf::graph;
use famkit::theory::{check_model, nerve, theory_category};
use famkit::zoo::{category_algebra, free_category_monad};
use famkit::{Op, Presheaf, TheorySlice};
use proptest::prelude::*;
use rand::Rng;

fn chains(n_max: usize) -> Vec<(usize, Op)> {
    let mut ops = vec![(0, Op::nat(0))];
    ops.extend((1..=n_max).map(|n| (1, Op::nat(n))));
    ops
}

fn slice() -> &'static TheorySlice {
    static S: std::sync::OnceLock<TheorySlice> = std::sync::OnceLock::new();
    S.get_or_init(|| theory_category(&free_category_monad(), &chains(3), 3).unwrap())
}

/// A graph on up to 4 vertices with edges going up, so paths have length ≤ 3.
fn upward_edges(seed: u64) -> (usize, Vec<(usize, usize)>) {
    let mut rng = common::rng(seed);
    let v = rng.gen_range(1..=4);
    let edges: Vec<(usize, usize)> = if v == 1 {
        Vec::new()
    } else {
        (0..rng.gen_range(0..=5))
            .map(|_| {
                let a = rng.gen_range(0..v - 1);
                (a, rng.gen_range(a + 1..v))
            })
            .collect()
    };
    (v, edges)
}

fn upward_graph(seed: u64) -> Presheaf {
    let (v, edges) = upward_edges(seed);
    graph(v, &edges)
}

#[test]
fn theory_slices_are_categories() {
    let m = free_category_monad();
    for n in 1..=3 {
        let s = theory_category(&m, &chains(n), n).unwrap();
        assert!(check_category_laws(&s.cat).passed());
    }
    // a slice without the vertex object is still a category
    let s = theory_category(&m, &[(1, Op::nat(1)), (1, Op::nat(2))], 2).unwrap();
    assert!(check_category_laws(&s.cat).passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nerves_of_free_algebras_are_models(seed in any::<u64>()) {
        let m = free_category_monad();
        let x = upward_graph(seed);
        let a = free_algebra(&m, &x, 3).unwrap();
        let n = nerve(&m, &a, slice()).unwrap();
        prop_assert!(n.check().passed());
        let r = check_model(slice(), &n).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures.first());
    }

    #[test]
    fn nerves_of_small_categories_are_models(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (v, edges) = upward_edges(seed);
        // the free category on the graph, with a random commuting relation
        let gens: Vec<Generator> = edges.iter().enumerate().map(|(e, &(src, dst))| Generator { name: format!("e{e}"), src, dst }).collect();
        let mut p = Presentation { objects: (0..v).map(|o| o.to_string()).collect(), generators: gens, relations: Vec::new(), cap: 1000 };
        if p.generators.len() >= 2 && rng.gen_bool(0.5) {
            let (a, b) = (&p.generators[0], &p.generators[1]);
            if a.src == b.src && a.dst == b.dst {
                p.relations.push((vec![1], vec![0]));
            }
        }
        let cat = build_from_presentation(&p).unwrap();
        let m = free_category_monad();
        let a = category_algebra(&m, &cat, 3).unwrap();
        let n = nerve(&m, &a, slice()).unwrap();
        let r = check_model(slice(), &n).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures.first());
    }
}
