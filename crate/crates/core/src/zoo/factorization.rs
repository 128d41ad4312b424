//! Monads from factorization systems `C = C₊ ∘ C₋`.

use std::sync::Arc;

use super::{yoneda_map, yoneda_witnesses, simplex_category};
use crate::error::{FamError, Result};
use crate::famrep::{Beyond, Family, Op, OperationCell};
use crate::fincat::{build_with_words, FinCategory, Generator, Presentation};
use crate::monad::MonadRep;
use crate::presheaf::{hom_positions, Presheaf, PresheafMorphism};
use crate::report::Report;
use crate::theory::{check_isomorphism, theory_category};

/// A category with two wide subcategories such that every morphism factors
/// uniquely as a `minus` morphism followed by a `plus` morphism.
#[derive(Debug, Clone)]
pub struct FactorizationData {
    pub name: String,
    pub total: Arc<FinCategory>,
    pub plus: Vec<bool>,
    pub minus: Vec<bool>,
}

impl FactorizationData {
    /// Check the invariants; returns `(plus, minus)` for every morphism.
    pub fn factorizations(&self) -> Result<Vec<(usize, usize)>> {
        let c = &self.total;
        let n = c.n_morphisms();
        if self.plus.len() != n || self.minus.len() != n {
            return Err(FamError::Malformed("subcategory masks do not match the morphism count".into()));
        }
        for o in 0..c.n_objects() {
            let id = c.id(o);
            if !self.plus[id] || !self.minus[id] {
                return Err(FamError::NotWide(format!("identity of {} is missing", c.object_name(o))));
            }
        }
        for (mask, side) in [(&self.plus, "plus"), (&self.minus, "minus")] {
            for g in (0..n).filter(|&g| mask[g]) {
                for f in (0..n).filter(|&f| mask[f]) {
                    if let Some(h) = c.try_compose(g, f) {
                        if !mask[h] {
                            return Err(FamError::NotClosed(format!(
                                "{side}: {} ∘ {} = {}",
                                c.morphism(g).name,
                                c.morphism(f).name,
                                c.morphism(h).name
                            )));
                        }
                    }
                }
            }
        }
        let mut factor: Vec<Option<(usize, usize)>> = vec![None; n];
        for q in (0..n).filter(|&q| self.minus[q]) {
            for p in (0..n).filter(|&p| self.plus[p]) {
                let Some(h) = c.try_compose(p, q) else { continue };
                if let Some((p0, q0)) = factor[h] {
                    let show = |p: usize, q: usize| format!("{} ∘ {}", c.morphism(p).name, c.morphism(q).name);
                    return Err(FamError::NonUniqueFactorization {
                        morphism: c.morphism(h).name.clone(),
                        first: show(p0, q0),
                        second: show(p, q),
                    });
                }
                factor[h] = Some((p, q));
            }
        }
        factor
            .into_iter()
            .enumerate()
            .map(|(h, f)| f.ok_or_else(|| FamError::Malformed(format!("{} has no factorization", c.morphism(h).name))))
            .collect()
    }

    /// The subcategory `C₊` and the map from total morphisms to `C₊` morphisms.
    pub fn plus_category(&self) -> (FinCategory, Vec<Option<usize>>) {
        let objs: Vec<usize> = (0..self.total.n_objects()).collect();
        let mors: Vec<usize> = (0..self.total.n_morphisms()).filter(|&i| self.plus[i]).collect();
        self.total.subcategory_on(&objs, &mors)
    }
}

/// `S_c = C₋`-morphisms out of `c` (as `Elt` of their total index), `E(t: c → b) = y₊(b)`.
pub struct FactorizationRep {
    name: String,
    total: Arc<FinCategory>,
    plus: Arc<FinCategory>,
    to_plus: Vec<Option<usize>>,
    from_plus: Vec<usize>,
    minus_out: Vec<Vec<usize>>,
    factor: Vec<(usize, usize)>,
    pos: Vec<usize>,
}

impl FactorizationRep {
    pub fn new(d: &FactorizationData) -> Result<Self> {
        let factor = d.factorizations()?;
        let (plus, to_plus) = d.plus_category();
        let mut from_plus = vec![0; plus.n_morphisms()];
        for (i, p) in to_plus.iter().enumerate() {
            if let Some(p) = p {
                from_plus[*p] = i;
            }
        }
        let total = d.total.clone();
        let minus_out = (0..total.n_objects())
            .map(|c| (0..total.n_morphisms()).filter(|&i| d.minus[i] && total.src(i) == c).collect())
            .collect();
        let pos = hom_positions(&plus);
        Ok(FactorizationRep { name: d.name.clone(), total, plus: Arc::new(plus), to_plus, from_plus, minus_out, factor, pos })
    }

    fn elt(t: &Op) -> usize {
        match t {
            Op::Elt(k) => *k,
            other => panic!("expected a morphism, got {other}"),
        }
    }

    /// Unique factorization of `t ∘ i` for `i ∈ C₊`, as `(C₊ index, total minus index)`.
    fn pushed(&self, i: usize, t: usize) -> (usize, usize) {
        let (p, q) = self.factor[self.total.compose(t, self.from_plus[i])];
        (self.to_plus[p].expect("plus part lies in C₊"), q)
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        &self.total
    }
}

impl Family for FactorizationRep {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        &self.plus
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        &self.plus
    }
    fn ops(&self, c: usize, _bound: usize) -> Vec<Op> {
        self.minus_out[c].iter().map(|&t| Op::Elt(t)).collect()
    }
    fn grade(&self, _c: usize, _t: &Op) -> usize {
        0
    }
    fn beyond(&self, _bound: usize) -> Beyond {
        Beyond::Nothing
    }
    fn arity(&self, _c: usize, t: &Op) -> Presheaf {
        Presheaf::representable(&self.plus, self.total.dst(Self::elt(t)))
    }
    fn restrict(&self, i: usize, t: &Op) -> Op {
        Op::Elt(self.pushed(i, Self::elt(t)).1)
    }
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism {
        yoneda_map(&self.plus, &self.pos, self.pushed(i, Self::elt(t)).0)
    }
}

/// `e(c) = id_c`, `m(t, f) = f(id_b) ∘ t` in `C₋`.
pub fn factorization_monad(d: &FactorizationData) -> Result<MonadRep> {
    let rep = Arc::new(FactorizationRep::new(d)?);
    let total = rep.total.clone();
    let plus = rep.plus.clone();
    let pos = rep.pos.clone();
    let (t1, t2, t3) = (total.clone(), total.clone(), total);
    let m = MonadRep::new(
        format!("factorization:{}", d.name),
        rep,
        move |c| Op::Elt(t1.id(c)),
        move |_c, t, f| {
            let t = FactorizationRep::elt(t);
            let b = t2.dst(t);
            let s = FactorizationRep::elt(&f[b][pos[plus.id(b)]]);
            Op::Elt(t2.compose(s, t))
        },
        0,
    )?;
    Ok(yoneda_witnesses(m, move |_c, t| t3.dst(FactorizationRep::elt(t))))
}

/// Compare `Θ_T` of [`factorization_monad`] on the unary operations with the
/// total category: `f = p∘q` goes to the map picking `(q, y₊(p))`.
pub fn check_factorization_theory(d: &FactorizationData) -> Result<Report> {
    let rep = FactorizationRep::new(d)?;
    let m = factorization_monad(d)?;
    let total = &rep.total;
    let ops: Vec<(usize, Op)> = (0..total.n_objects()).map(|o| (o, m.e(o))).collect();
    let slice = theory_category(&m, &ops, 0)?;
    let mut mor = Vec::with_capacity(total.n_morphisms());
    for f in 0..total.n_morphisms() {
        let (p, q) = rep.factor[f];
        let p = rep.to_plus[p].ok_or_else(|| FamError::Malformed("plus part lies outside C₊".into()))?;
        let cell = OperationCell { op: Op::Elt(q), fill: yoneda_map(&rep.plus, &rep.pos, p) };
        let (a, b) = (total.src(f), total.dst(f));
        let k = slice.evals[b]
            .lookup(a, &cell)
            .ok_or_else(|| FamError::Malformed(format!("cell for {} is not enumerated", total.morphism(f).name)))?;
        mor.push(slice.from_cell(b, a, k)?);
    }
    let objs: Vec<usize> = (0..total.n_objects()).collect();
    Ok(check_isomorphism("theory_is_total", total, &slice.cat, &objs, &mor))
}

/// `Δ≤n` with `C₊` the injections and `C₋` the surjections.
pub fn reedy_simplex_data(n: usize) -> FactorizationData {
    let s = simplex_category(n);
    let sizes: Vec<usize> = (0..=n).map(|k| k + 1).collect();
    let plus = s
        .maps
        .iter()
        .map(|f| {
            let mut v = f.clone();
            v.sort_unstable();
            v.dedup();
            v.len() == f.len()
        })
        .collect();
    let minus = s
        .maps
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut v = f.clone();
            v.sort_unstable();
            v.dedup();
            v.len() == sizes[s.cat.dst(i)]
        })
        .collect();
    FactorizationData { name: format!("reedy-delta{n}"), total: s.cat, plus, minus }
}

fn graph_data(name: &str, gens: &[(&str, usize, usize)], relations: Vec<(Vec<usize>, Vec<usize>)>, plus_gens: &[usize]) -> FactorizationData {
    let p = Presentation {
        objects: vec!["0".into(), "1".into()],
        generators: gens.iter().map(|&(n, s, d)| Generator { name: n.into(), src: s, dst: d }).collect(),
        relations,
        cap: 1000,
    };
    let (cat, words) = build_with_words(&p).expect("graph factorization presentation");
    let plus = words.iter().map(|w| w.iter().all(|g| plus_gens.contains(g))).collect();
    let minus = words.iter().map(|w| w.iter().all(|g| !plus_gens.contains(g))).collect();
    FactorizationData { name: name.into(), total: Arc::new(cat), plus, minus }
}

/// Reflexive graphs: `s, t: 0 → 1` and `r: 1 → 0` with `r∘s = r∘t = id`;
/// `C₊ = {s, t}` is the graph index category and `C₋ = {r}`.
pub fn reflexive_graph_data() -> FactorizationData {
    graph_data(
        "reflexive-graph",
        &[("s", 0, 1), ("t", 0, 1), ("r", 1, 0)],
        vec![(vec![0, 2], vec![]), (vec![1, 2], vec![])],
        &[0, 1],
    )
}

/// Non-unique factorization: `q, q′: a → b` in `C₋` and an idempotent
/// `p: b → b` in `C₊` with `p∘q = p∘q′ = q′`, so `q′ = id∘q′ = p∘q`.
pub fn doubled_factorization_data() -> FactorizationData {
    let p = Presentation {
        objects: vec!["a".into(), "b".into()],
        generators: vec![
            Generator { name: "q".into(), src: 0, dst: 1 },
            Generator { name: "q'".into(), src: 0, dst: 1 },
            Generator { name: "p".into(), src: 1, dst: 1 },
        ],
        relations: vec![(vec![0, 2], vec![1]), (vec![1, 2], vec![1]), (vec![2, 2], vec![2])],
        cap: 100,
    };
    let (cat, words) = build_with_words(&p).expect("doubled factorization presentation");
    let plus = words.iter().map(|w| w.iter().all(|&g| g == 2)).collect();
    let minus = words.iter().map(|w| w.iter().all(|&g| g != 2)).collect();
    FactorizationData { name: "doubled-factorization".into(), total: Arc::new(cat), plus, minus }
}
