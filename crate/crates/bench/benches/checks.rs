use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use famkit::famrep::FreeCategoryRep;
use famkit::monad::{check_monad_laws_on, validate_monad_rep};
use famkit::poly::{compose_polynomials, familial_replacement, gamma};
use famkit::presheaf::{coyoneda, cycle, hom_set};
use famkit::theory::theory_category;
use famkit::zoo::{check_crossed_group_axioms, free_category_monad, reversal_group};
use famkit::{evaluate, FamRep};
use famkit_bench::{chains, tangled_graph};

fn presheaves(c: &mut Criterion) {
    let x = tangled_graph();
    c.bench_function("hom_set tangled -> cycle3", |b| b.iter(|| hom_set(&x, &cycle(3)).unwrap()));
    c.bench_function("coyoneda tangled", |b| b.iter(|| coyoneda(&x).unwrap()));
}

fn monads(c: &mut Criterion) {
    let m = free_category_monad();
    let x = tangled_graph();
    c.bench_function("evaluate free category, bound 4", |b| b.iter(|| evaluate(m.rep.as_ref(), &x, 4).unwrap()));
    c.bench_function("laws on tangled graph, bound 2", |b| b.iter(|| check_monad_laws_on(&m, &x, 2).unwrap()));
    c.bench_function("validate free category, bound 3", |b| b.iter(|| validate_monad_rep(&m, 3)));
    c.bench_function("theory slice, chains to 3", |b| b.iter(|| theory_category(&m, &chains(3), 3).unwrap()));
    let cg = reversal_group(2);
    c.bench_function("crossed group axioms, reversal 2", |b| b.iter(|| check_crossed_group_axioms(&cg)));
}

fn polynomials(c: &mut Criterion) {
    let free: FamRep = Arc::new(FreeCategoryRep::new());
    let g = gamma(free.as_ref(), 2).unwrap();
    c.bench_function("gamma free category, bound 2", |b| b.iter(|| gamma(free.as_ref(), 2).unwrap()));
    c.bench_function("compose and replace, bound 2", |b| {
        b.iter(|| familial_replacement(&compose_polynomials(&g, &g).unwrap()).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = presheaves, monads, polynomials
}
criterion_main!(benches);
