//! Seeded random graphs, presheaves and graph morphisms.
#![allow(dead_code)]

use std::sync::Arc;

use famkit::fincat::FinCategory;
use famkit::presheaf::{coproduct, graph, hom_set, quotient};
use famkit::{Presheaf, PresheafMorphism};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A graph with 1..=max_v vertices and 0..=max_e edges, loops and parallel edges allowed.
pub fn random_graph(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize) -> Presheaf {
    let v = rng.gen_range(1..=max_v);
    let e = rng.gen_range(0..=max_e);
    let edges: Vec<(usize, usize)> = (0..e).map(|_| (rng.gen_range(0..v), rng.gen_range(0..v))).collect();
    graph(v, &edges)
}

/// A random quotient of a coproduct of representables, with at most `max_cells` cells.
pub fn random_presheaf(rng: &mut ChaCha8Rng, base: &Arc<FinCategory>, max_cells: usize) -> Presheaf {
    let mut parts = Vec::new();
    let mut total = 0;
    loop {
        let c = rng.gen_range(0..base.n_objects());
        let y = Presheaf::representable(base, c);
        if total + y.n_cells() > max_cells {
            break;
        }
        total += y.n_cells();
        parts.push(y);
        if rng.gen_bool(0.3) {
            break;
        }
    }
    let sum = coproduct(&parts, base).expect("same base").apex;
    let mut pairs = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let c = rng.gen_range(0..base.n_objects());
        if sum.sizes[c] >= 2 {
            pairs.push((c, rng.gen_range(0..sum.sizes[c]), rng.gen_range(0..sum.sizes[c])));
        }
    }
    quotient(&sum, &pairs).0
}

/// A graph morphism between small random graphs; retries until the hom-set is nonempty.
pub fn random_graph_morphism(rng: &mut ChaCha8Rng) -> (Presheaf, Presheaf, PresheafMorphism) {
    loop {
        let x = random_graph(rng, 3, 3);
        let y = random_graph(rng, 3, 4);
        let homs = hom_set(&x, &y).expect("same base");
        if let Some(h) = homs.choose(rng) {
            return (x, y, h.clone());
        }
    }
}
