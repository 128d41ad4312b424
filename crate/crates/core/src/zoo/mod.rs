//! Example monads: free categories and monoids, identity monads, monads from
//! factorization systems and crossed groups, and the cubical pasting monad.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{FamError, Result};
use crate::famrep::{element_index, evaluate, identity_rep, map_cells, transform_cells, FamRep, FreeCategoryRep, FreeMonoidRep, Op, OperationCell, TransformationSample};
use crate::fincat::{generated_by_functions, FinCategory, FunctionGenerator};
use crate::monad::{Algebra, MonadRep};
use crate::presheaf::{graph, hom_positions, Presheaf, PresheafMorphism};

mod crossed;
mod cubical;
mod factorization;

pub use crossed::*;
pub use cubical::*;
pub use factorization::*;

fn nat(t: &Op) -> usize {
    match t {
        Op::Nat(v) if v.len() == 1 => v[0],
        other => panic!("expected a length, got {other}"),
    }
}

#[allow(dead_code)]
fn nat_vec(t: &Op) -> &[usize] {
    match t {
        Op::Nat(v) => v,
        other => panic!("expected a tuple, got {other}"),
    }
}

/// Paths in graphs: `e` picks the length-0 and length-1 paths, `m` adds lengths.
pub fn free_category_monad() -> MonadRep {
    let rep: FamRep = Arc::new(FreeCategoryRep::new());
    MonadRep::new(
        "free-category",
        rep,
        Op::nat,
        |c, _t, f| if c == 0 { Op::nat(0) } else { Op::nat(f[1].iter().map(nat).sum()) },
        4,
    )
    .expect("endo-representation")
}

/// The free category monad with `m` dropping the last inner label.
pub fn broken_free_category_monad() -> MonadRep {
    let good = free_category_monad();
    let mult = |c: usize, _t: &Op, f: &[Vec<Op>]| {
        if c == 0 || f[1].is_empty() {
            Op::nat(0)
        } else {
            Op::nat(f[1][..f[1].len() - 1].iter().map(nat).sum())
        }
    };
    let unit_w = {
        let good = good.clone();
        Arc::new(move |c: usize| good.unit_iso(c).expect("free category unit"))
    };
    // initial segment of the glued path
    let mult_w = Arc::new(move |c: usize, t: &Op, f: &[Vec<Op>]| {
        let full = good.mult_iso(c, t, f).expect("free category multiplication");
        let k = nat(&mult(c, t, f));
        PresheafMorphism { comps: vec![full.comps[0][..=k].to_vec(), full.comps[1][..k].to_vec()] }
    });
    let rep: FamRep = Arc::new(FreeCategoryRep::new());
    MonadRep::new("broken-free-category", rep, Op::nat, mult, 4).expect("endo-representation").with_witnesses(unit_w, mult_w)
}

/// Words over a set: `e = 1`, `m` adds lengths. Arities are discrete, so witnesses are explicit.
pub fn free_monoid_monad() -> MonadRep {
    let rep: FamRep = Arc::new(FreeMonoidRep::new());
    let m = MonadRep::new("free-monoid", rep, |_| Op::nat(1), |_, _, f| Op::nat(f[0].iter().map(nat).sum()), 4)
        .expect("endo-representation");
    let twice = m.twice().clone();
    let unit_w = Arc::new(|_c: usize| PresheafMorphism { comps: vec![vec![0]] });
    let mult_w = Arc::new(move |c: usize, t: &Op, f: &[Vec<Op>]| {
        let col = twice.colimit(c, &Op::comp(t.clone(), f.to_vec()));
        let mut comps = Vec::new();
        for (i, k) in f[0].iter().enumerate() {
            for j in 0..nat(k) {
                comps.push(col.injections[i].comps[0][j]);
            }
        }
        PresheafMorphism { comps: vec![comps] }
    });
    m.with_witnesses(unit_w, mult_w)
}

/// `(S⁰, E⁰)` with its unique monoid structure.
pub fn identity_monad(c: &Arc<FinCategory>) -> MonadRep {
    let m = MonadRep::new("identity", identity_rep(c), |_| Op::Elt(0), |_, _, _| Op::Elt(0), 0).expect("endo-representation");
    yoneda_witnesses(m, |d, _| d)
}

/// Explicit witnesses for a monad whose arities are representables: `E(t) = y(b)`
/// with `b = target(c, t)`. The colimit over `∫y(b)` is the value at `(b, id_b)`.
pub(crate) fn yoneda_witnesses(m: MonadRep, target: impl Fn(usize, &Op) -> usize + Send + Sync + 'static) -> MonadRep {
    let twice = m.twice().clone();
    let base = m.base().clone();
    let pos = hom_positions(&base);
    let unit_w = {
        let base = base.clone();
        Arc::new(move |d: usize| PresheafMorphism::identity(&Presheaf::representable(&base, d)))
    };
    let mult_w = Arc::new(move |d: usize, t: &Op, f: &[Vec<Op>]| {
        let col = twice.colimit(d, &Op::comp(t.clone(), f.to_vec()));
        let b = target(d, t);
        let yb = Presheaf::representable(&base, b);
        col.injections[element_index(&yb, b, pos[base.id(b)])].clone()
    });
    m.with_witnesses(unit_w, mult_w)
}

pub(crate) use crate::presheaf::representable_map as yoneda_map;

/// A category as an algebra of the free category monad: vertices are objects,
/// edges are all morphisms, and a path is sent to its composite in the table.
pub fn category_algebra(m: &MonadRep, cat: &FinCategory, bound: usize) -> Result<Algebra> {
    let edges: Vec<(usize, usize)> = cat.morphisms().iter().map(|f| (f.src, f.dst)).collect();
    let carrier = graph(cat.n_objects(), &edges);
    Algebra::from_fn(m, carrier, bound, &|c, oc| {
        if c == 0 {
            return Ok(oc.fill.comps[0][0]);
        }
        let es = &oc.fill.comps[1];
        match es.split_first() {
            None => Ok(cat.id(oc.fill.comps[0][0])),
            Some((&first, rest)) => {
                let mut acc = first;
                for &e in rest {
                    acc = cat
                        .try_compose(e, acc)
                        .ok_or_else(|| FamError::NonFunctorialInput(format!("path through {} is not composable", cat.morphism(e).name)))?;
                }
                Ok(acc)
            }
        }
    })
}

/// Word doubling `w ↦ ww` on the free monoid: natural but not cartesian.
/// Squares along `2 → 1` and the swap of `2`, with words up to `bound` letters.
pub fn word_doubling_samples(bound: usize) -> Result<Vec<TransformationSample>> {
    let rep = FreeMonoidRep::new();
    let (x, y) = (rep.set(2), rep.set(1));
    let double = |_: usize, oc: &OperationCell| {
        let w = &oc.fill.comps[0];
        Some(OperationCell { op: Op::nat(2 * w.len()), fill: PresheafMorphism { comps: vec![[w.as_slice(), w.as_slice()].concat()] } })
    };
    let maps = [("2→1", y.clone(), PresheafMorphism { comps: vec![vec![0, 0]] }), ("swap", x.clone(), PresheafMorphism { comps: vec![vec![1, 0]] })];
    let tx = evaluate(&rep, &x, bound)?;
    let t2x = evaluate(&rep, &x, 2 * bound)?;
    let mut out = Vec::new();
    for (name, z, h) in maps {
        let tz = evaluate(&rep, &z, bound)?;
        let t2z = evaluate(&rep, &z, 2 * bound)?;
        let top = map_cells(&tx, &tz, &h)?;
        let bottom = map_cells(&t2x, &t2z, &h)?;
        let left = transform_cells(&tx, &t2x, &double)?;
        let right = transform_cells(&tz, &t2z, &double)?;
        out.push(TransformationSample::new(format!("doubling along {name}"), &tx.tx, &tz.tx, &t2x.tx, &t2z.tx, [top, left, right, bottom]));
    }
    Ok(out)
}

/// Tag of a generating function: kind (`'d'` face, `'s'` degeneracy), target
/// dimension, index, and side (cube faces only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenTag {
    pub kind: char,
    pub dim: usize,
    pub index: usize,
    pub side: usize,
}

/// A category generated by functions, with words, tags and the function of every morphism.
#[derive(Debug, Clone)]
pub struct Generated {
    pub cat: Arc<FinCategory>,
    pub gens: Vec<FunctionGenerator>,
    pub tags: Vec<GenTag>,
    pub words: Vec<Vec<usize>>,
    pub maps: Vec<Vec<usize>>,
    by_word: HashMap<(usize, Vec<usize>), usize>,
    by_tag: HashMap<GenTag, usize>,
}

impl Generated {
    pub fn new(objects: Vec<(String, usize)>, gens: Vec<FunctionGenerator>, tags: Vec<GenTag>, cap: usize) -> Result<Self> {
        let (cat, words) = generated_by_functions(&objects, &gens, cap)?;
        let mut maps = Vec::with_capacity(words.len());
        let mut by_word = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            let src = cat.src(i);
            let mut f: Vec<usize> = (0..objects[src].1).collect();
            for &g in w {
                f = f.iter().map(|&x| gens[g].map[x]).collect();
            }
            maps.push(f);
            by_word.insert((src, w.clone()), i);
        }
        let by_tag = tags.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        Ok(Generated { cat: Arc::new(cat), gens, tags, words, maps, by_word, by_tag })
    }

    /// The morphism with the given source and normal-form word.
    pub fn morphism_of(&self, src: usize, word: &[usize]) -> Option<usize> {
        self.by_word.get(&(src, word.to_vec())).copied()
    }

    /// The morphism of a single generator.
    pub fn generator(&self, g: usize) -> usize {
        self.morphism_of(self.gens[g].src, &[g]).expect("generator is its own normal form")
    }

    pub fn gen_by_tag(&self, t: GenTag) -> Option<usize> {
        self.by_tag.get(&t).copied()
    }
}

/// `Δ≤n` generated by cofaces `d{k}_{i}: [k-1] → [k]` (skip `i`) and
/// codegeneracies `s{k}_{i}: [k+1] → [k]` (repeat `i`).
pub fn simplex_category(n: usize) -> Generated {
    let objects: Vec<(String, usize)> = (0..=n).map(|k| (format!("[{k}]"), k + 1)).collect();
    let (mut gens, mut tags) = (Vec::new(), Vec::new());
    for k in 1..=n {
        for i in 0..=k {
            gens.push(FunctionGenerator {
                name: format!("d{k}_{i}"),
                src: k - 1,
                dst: k,
                map: (0..k).map(|x| if x < i { x } else { x + 1 }).collect(),
            });
            tags.push(GenTag { kind: 'd', dim: k, index: i, side: 0 });
        }
    }
    for k in 0..n {
        for i in 0..=k {
            gens.push(FunctionGenerator {
                name: format!("s{k}_{i}"),
                src: k + 1,
                dst: k,
                map: (0..k + 2).map(|x| if x <= i { x } else { x - 1 }).collect(),
            });
            tags.push(GenTag { kind: 's', dim: k, index: i, side: 0 });
        }
    }
    Generated::new(objects, gens, tags, 100_000).expect("simplex category")
}

/// Cubes `s^0..s^n` on vertex sets `{0,1}^k` (coordinate `p` is bit `p-1`), with faces
/// `d{k}_{i}{e}` inserting `e` at coordinate `i`, and optionally degeneracies
/// `s{k}_{i}: s^{k+1} → s^k` (`0 ≤ i ≤ k`) forgetting coordinate `i+1`.
pub fn cube_category(n: usize, degeneracies: bool) -> Generated {
    let objects: Vec<(String, usize)> = (0..=n).map(|k| (format!("s{k}"), 1usize << k)).collect();
    let (mut gens, mut tags) = (Vec::new(), Vec::new());
    for k in 1..=n {
        for i in 1..=k {
            for e in 0..2usize {
                let map = (0..1usize << (k - 1))
                    .map(|v| {
                        let low = v & ((1 << (i - 1)) - 1);
                        let high = (v >> (i - 1)) << i;
                        high | (e << (i - 1)) | low
                    })
                    .collect();
                gens.push(FunctionGenerator { name: format!("d{k}_{i}{e}"), src: k - 1, dst: k, map });
                tags.push(GenTag { kind: 'd', dim: k, index: i, side: e });
            }
        }
    }
    if degeneracies {
        for k in 0..n {
            for i in 0..=k {
                // drop bit i (coordinate i+1)
                let map = (0..1usize << (k + 1))
                    .map(|v| {
                        let low = v & ((1 << i) - 1);
                        let high = (v >> (i + 1)) << i;
                        high | low
                    })
                    .collect();
                gens.push(FunctionGenerator { name: format!("s{k}_{i}"), src: k + 1, dst: k, map });
                tags.push(GenTag { kind: 's', dim: k, index: i, side: 0 });
            }
        }
    }
    Generated::new(objects, gens, tags, 1_000_000).expect("cube category")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::famrep::check_cartesian;

    #[test]
    fn word_doubling_is_not_cartesian() {
        let samples = word_doubling_samples(2).unwrap();
        let r = check_cartesian(&samples);
        assert!(!r.passed());
        assert!(r.failures.iter().all(|f| f.location.starts_with("doubling along 2→1")));
        assert!(check_cartesian(&samples[1..]).passed());
    }
}
