//! The theory category `Θ_T` on a chosen set of operations, nerves of
//! algebras, and the model (generalized Segal) condition.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{FamError, Result};
use crate::famrep::{evaluate, Evaluation, Op, OperationCell};
use crate::fincat::{check_category_laws, FinCategory, Morphism};
use crate::monad::{check_algebra, flatten_cell, unit_map, Algebra, MonadRep};
use crate::presheaf::{category_of_elements, hom_set, limit_sets, Presheaf, PresheafMorphism, SetDiagram};
use crate::report::Report;

/// The full subcategory of free algebras `TEt` for chosen operations `(c, t)`.
/// A morphism `TEa → TEb` is a presheaf map `Ea → TEb`.
#[derive(Clone)]
pub struct TheorySlice {
    pub monad: MonadRep,
    pub ops: Vec<(usize, Op)>,
    pub bound: usize,
    pub arities: Vec<Presheaf>,
    pub evals: Vec<Evaluation>,
    /// `η: Ea → TEa`, the identity of object `a`.
    pub units: Vec<PresheafMorphism>,
    /// `homs[a][b]`: all maps `Ea → TEb`, in enumeration order.
    pub homs: Vec<Vec<Vec<PresheafMorphism>>>,
    pub offset: Vec<Vec<usize>>,
    index: Vec<Vec<HashMap<PresheafMorphism, usize>>>,
    pub cat: Arc<FinCategory>,
}

impl TheorySlice {
    pub fn n_objects(&self) -> usize {
        self.ops.len()
    }

    /// Morphism index of `f: Ea → TEb`.
    pub fn morphism_of(&self, a: usize, b: usize, f: &PresheafMorphism) -> Option<usize> {
        self.index[a][b].get(f).map(|&k| self.offset[a][b] + k)
    }

    /// `(a, b, f)` of a morphism index.
    pub fn kleisli(&self, i: usize) -> (usize, usize, &PresheafMorphism) {
        let m = self.cat.morphism(i);
        (m.src, m.dst, &self.homs[m.src][m.dst][i - self.offset[m.src][m.dst]])
    }

    /// `g ∘ f` for `f: Ea → TEb`, `g: Eb → TEc`: flatten `f` followed by `Tg`.
    pub fn kleisli_compose(&self, b: usize, c: usize, g: &PresheafMorphism, f: &PresheafMorphism) -> Result<PresheafMorphism> {
        let (lower, upper) = (&self.evals[c], &self.evals[b]);
        let mut comps = Vec::with_capacity(f.comps.len());
        for (d, v) in f.comps.iter().enumerate() {
            let mut comp = Vec::with_capacity(v.len());
            for &k in v {
                let oc = &upper.cells[d][k];
                let flat = flatten_cell(&self.monad, lower, d, &oc.op, &oc.fill.then(g))?;
                comp.push(lower.lookup(d, &flat).ok_or_else(|| {
                    FamError::BoundTooSmall(format!("composite cell {} lies beyond bound {}", flat.op, self.bound))
                })?);
            }
            comps.push(comp);
        }
        Ok(PresheafMorphism { comps })
    }

    /// The object `TEe(d)`, if chosen.
    pub fn unary(&self, d: usize) -> Option<usize> {
        let e = self.monad.e(d);
        self.ops.iter().position(|(c, t)| *c == d && *t == e)
    }

    /// The map `TEe(c) → TEb` whose value on the generic cell `id_c` is cell `k` of `TEb` at `c`.
    pub fn from_cell(&self, b: usize, c: usize, k: usize) -> Result<usize> {
        let a = self.unary(c).ok_or_else(|| FamError::MissingUnaryObjects(format!("no unary object at {}", self.monad.base().object_name(c))))?;
        let base = self.monad.base();
        let ue = self.monad.unit_iso(c)?;
        let tx = &self.evals[b].tx;
        let f = PresheafMorphism {
            comps: ue.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&p| tx.action[base.hom(d, c)[p]][k]).collect()).collect(),
        };
        self.morphism_of(a, b, &f).ok_or_else(|| FamError::Malformed("Yoneda extension is not natural".into()))
    }
}

/// `Θ_T` on the chosen operations; every `TEt` must be exact within `bound`.
pub fn theory_category(m: &MonadRep, ops: &[(usize, Op)], bound: usize) -> Result<TheorySlice> {
    let base = m.base().clone();
    let rep = m.rep.as_ref();
    let mut arities = Vec::new();
    let mut evals = Vec::new();
    let mut units = Vec::new();
    for (c, t) in ops {
        if *c >= base.n_objects() {
            return Err(FamError::Malformed(format!("object {c} out of range")));
        }
        let et = rep.arity(*c, t);
        let ev = evaluate(rep, &et, bound)?;
        if !ev.exact {
            return Err(FamError::InexactTruncation(format!(
                "T E({t}) at {} has operations beyond bound {bound}",
                base.object_name(*c)
            )));
        }
        units.push(unit_map(m, &et, &ev)?);
        arities.push(et);
        evals.push(ev);
    }
    let k = ops.len();
    let mut homs = vec![Vec::with_capacity(k); k];
    let mut offset = vec![vec![0; k]; k];
    let mut index = vec![Vec::with_capacity(k); k];
    let mut morphisms = Vec::new();
    let name = |a: usize| format!("TE({},{})", base.object_name(ops[a].0), ops[a].1);
    for a in 0..k {
        for b in 0..k {
            let hs = hom_set(&arities[a], &evals[b].tx)?;
            offset[a][b] = morphisms.len();
            for j in 0..hs.len() {
                morphisms.push(Morphism { name: format!("{}→{}#{j}", name(a), name(b)), src: a, dst: b });
            }
            index[a].push(hs.iter().cloned().enumerate().map(|(j, f)| (f, j)).collect::<HashMap<_, _>>());
            homs[a].push(hs);
        }
    }
    let mut slice = TheorySlice {
        monad: m.clone(),
        ops: ops.to_vec(),
        bound,
        arities,
        evals,
        units,
        homs,
        offset,
        index,
        cat: Arc::new(FinCategory::discrete(Vec::new())),
    };
    let identities = (0..k)
        .map(|a| slice.morphism_of(a, a, &slice.units[a]).ok_or_else(|| FamError::Malformed("η is not natural".into())))
        .collect::<Result<Vec<_>>>()?;
    let n = morphisms.len();
    let mut table = HashMap::new();
    for f in 0..n {
        let (a, b) = (morphisms[f].src, morphisms[f].dst);
        let fm = &slice.homs[a][b][f - slice.offset[a][b]];
        for c in 0..k {
            for (j, gm) in slice.homs[b][c].iter().enumerate() {
                let h = slice.kleisli_compose(b, c, gm, fm)?;
                let hi = slice.morphism_of(a, c, &h).ok_or_else(|| FamError::Malformed("Kleisli composite is not natural".into()))?;
                table.insert((slice.offset[b][c] + j, f), hi);
            }
        }
    }
    let objects = (0..k).map(name).collect();
    slice.cat = Arc::new(FinCategory::from_fn(objects, morphisms, identities, |g, f| table[&(g, f)])?);
    Ok(slice)
}

/// `N A: TEt ↦ Hom(Et, A)`, acting by Kleisli precomposition followed by the structure map.
pub fn nerve(m: &MonadRep, a: &Algebra, slice: &TheorySlice) -> Result<Presheaf> {
    let r = check_algebra(m, a)?;
    if let Some(f) = r.failures.first() {
        return Err(FamError::InvalidAlgebra(format!("{}: {}", f.location, f.witness)));
    }
    let k = slice.n_objects();
    let cells: Vec<Vec<PresheafMorphism>> = slice.arities.iter().map(|e| hom_set(e, &a.carrier)).collect::<Result<_>>()?;
    let index: Vec<HashMap<&PresheafMorphism, usize>> = cells.iter().map(|v| v.iter().enumerate().map(|(j, f)| (f, j)).collect()).collect();
    let mut action = Vec::with_capacity(slice.cat.n_morphisms());
    for i in 0..slice.cat.n_morphisms() {
        let (src, dst, phi) = slice.kleisli(i);
        let upper = &slice.evals[dst];
        let mut row = Vec::with_capacity(cells[dst].len());
        for alpha in &cells[dst] {
            let mut comps = Vec::with_capacity(phi.comps.len());
            for (d, v) in phi.comps.iter().enumerate() {
                let mut comp = Vec::with_capacity(v.len());
                for &x in v {
                    let oc = &upper.cells[d][x];
                    let pushed = OperationCell { op: oc.op.clone(), fill: oc.fill.then(alpha) };
                    let j = a
                        .cells
                        .lookup(d, &pushed)
                        .ok_or_else(|| FamError::BoundTooSmall(format!("cell {} of TA lies beyond bound {}", oc.op, a.bound)))?;
                    comp.push(a.structure.comps[d][j]);
                }
                comps.push(comp);
            }
            let res = PresheafMorphism { comps };
            row.push(*index[src].get(&res).ok_or_else(|| FamError::InvalidAlgebra("structure map breaks naturality".into()))?);
        }
        action.push(row);
    }
    Presheaf::new(slice.cat.clone(), (0..k).map(|b| cells[b].len()).collect(), action)
}

/// Adjoin a cell at object `o` that restricts like cell `like` along every
/// non-identity map. Functorial when `id_o` only factors through identities,
/// e.g. when `o` is a top-dimensional object of the slice.
pub fn adjoin_cell(x: &Presheaf, o: usize, like: usize) -> Result<Presheaf> {
    let base = x.base.clone();
    if like >= x.sizes[o] {
        return Err(FamError::Malformed(format!("object {} has no cell {like}", base.object_name(o))));
    }
    let mut sizes = x.sizes.clone();
    sizes[o] += 1;
    let mut action = x.action.clone();
    for (i, row) in action.iter_mut().enumerate() {
        let m = base.morphism(i);
        if m.dst != o {
            continue;
        }
        let image = if base.is_identity(i) { x.sizes[o] } else { row[like] };
        row.push(image);
    }
    let y = Presheaf::new(base, sizes, action)?;
    let r = y.check();
    if let Some(f) = r.failures.first() {
        return Err(FamError::NonFunctorialInput(format!("{}: {}", f.location, f.witness)));
    }
    Ok(y)
}

/// For every chosen `TEt`, compare `X_{TEt}` with the limit of `X` over `∫Et`,
/// where `(d, x)` goes to `TEe(d)`. Operations `t = e(c)` are skipped.
pub fn check_model(slice: &TheorySlice, x: &Presheaf) -> Result<Report> {
    let m = &slice.monad;
    let base = m.base().clone();
    let rep = m.rep.as_ref();
    if !Arc::ptr_eq(&x.base, &slice.cat) && *x.base != *slice.cat {
        return Err(FamError::BaseMismatch);
    }
    let mut r = Report::new("theta_model");
    for (a, (c, t)) in slice.ops.iter().enumerate() {
        if *t == m.e(*c) {
            r.instances_checked += 1;
            continue;
        }
        let et = &slice.arities[a];
        let el = category_of_elements(et);
        let unary: Vec<Option<usize>> = (0..base.n_objects()).map(|d| slice.unary(d)).collect();
        if let Some(d) = (0..base.n_objects()).find(|&d| et.sizes[d] > 0 && unary[d].is_none()) {
            return Err(FamError::MissingUnaryObjects(format!(
                "TE(e({})) is needed for {}",
                base.object_name(d),
                slice.cat.object_name(a)
            )));
        }
        // every object reached below has cells, hence a unary object
        let unary: Vec<usize> = unary.into_iter().map(|u| u.unwrap_or(usize::MAX)).collect();
        // the element (d, y) as a map TEe(d) → TEt
        let mut legs = Vec::with_capacity(el.element.len());
        for &(d, y) in &el.element {
            let ue = m.unit_iso(d)?;
            let f = PresheafMorphism {
                comps: ue.comps.iter().enumerate().map(|(d2, v)| v.iter().map(|&p| et.action[base.hom(d2, d)[p]][y]).collect()).collect(),
            };
            let f = f.then(&slice.units[a]);
            legs.push(slice.morphism_of(unary[d], a, &f).ok_or_else(|| FamError::Malformed("element map is not natural".into()))?);
        }
        // ∫Et → ∫S → Θ_T on morphisms: i ↦ T E(i_{e(d)})
        let shape = Arc::new(el.cat.opposite());
        let mut maps = Vec::with_capacity(el.cat.n_morphisms());
        for (u, mu) in el.cat.morphisms().iter().enumerate() {
            let i = el.proj_mor[u];
            let (d_src, d_dst) = (el.element[mu.src].0, el.element[mu.dst].0);
            let e_dst = m.e(d_dst);
            if rep.restrict(i, &e_dst) != m.e(d_src) {
                return Err(FamError::Malformed(format!("unit is not natural along {}", base.morphism(i).name)));
            }
            let f = rep.arity_map(i, &e_dst).then(&slice.units[unary[d_dst]]);
            let phi = slice
                .morphism_of(unary[d_src], unary[d_dst], &f)
                .ok_or_else(|| FamError::Malformed("arity map is not natural".into()))?;
            maps.push(x.action[phi].clone());
        }
        let sets = el.element.iter().map(|&(d, _)| x.sizes[unary[d]]).collect();
        let diagram = SetDiagram { shape, sets, maps };
        let limit = limit_sets(&diagram);
        let index: HashMap<&Vec<usize>, usize> = limit.iter().enumerate().map(|(j, v)| (v, j)).collect();
        let name = slice.cat.object_name(a).to_string();
        let mut hit = vec![None; limit.len()];
        for cell in 0..x.sizes[a] {
            let tuple: Vec<usize> = legs.iter().map(|&l| x.action[l][cell]).collect();
            match index.get(&tuple) {
                None => {
                    r.fail(format!("comparison at {name}"), format!("cell {} is not a compatible family", x.label(a, cell)));
                }
                Some(&j) => {
                    if let Some(prev) = hit[j].replace(cell) {
                            r.fail(
                            format!("comparison at {name}"),
                            format!("not injective: cells {} and {} have the same restrictions", x.label(a, prev), x.label(a, cell)),
                        );
                    }
                }
            }
        }
        for (j, h) in hit.iter().enumerate() {
            if h.is_none() {
                r.fail(format!("comparison at {name}"), format!("not surjective: compatible family {:?} has no cell", limit[j]));
            }
        }
        r.instances_checked += 1;
    }
    Ok(r)
}

/// Whether the assignment `obj`, `mor` is an isomorphism `from → to` of categories.
pub fn check_isomorphism(name: &str, from: &FinCategory, to: &FinCategory, obj: &[usize], mor: &[usize]) -> Report {
    let mut r = Report::new(name);
    let bijective = |v: &[usize], n: usize| {
        let mut seen = vec![false; n];
        v.len() == n && v.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
    };
    r.check(bijective(obj, to.n_objects()), || "objects".into(), || "not a bijection".into());
    r.check(bijective(mor, to.n_morphisms()), || "morphisms".into(), || "not a bijection".into());
    if !r.passed() {
        return r;
    }
    for (i, f) in from.morphisms().iter().enumerate() {
        let g = to.morphism(mor[i]);
        r.check(g.src == obj[f.src] && g.dst == obj[f.dst], || format!("endpoints of {}", f.name), || g.name.clone());
    }
    for c in 0..from.n_objects() {
        r.check(mor[from.id(c)] == to.id(obj[c]), || format!("identity of {}", from.object_name(c)), || to.morphism(mor[from.id(c)]).name.clone());
    }
    for g in 0..from.n_morphisms() {
        for f in 0..from.n_morphisms() {
            let Some(gf) = from.try_compose(g, f) else { continue };
            let img = to.compose(mor[g], mor[f]);
            r.check(img == mor[gf], || format!("{} ∘ {}", from.morphism(g).name, from.morphism(f).name), || {
                format!("{} vs {}", to.morphism(img).name, to.morphism(mor[gf]).name)
            });
        }
    }
    r
}

/// Category laws of the slice, as required of every output of [`theory_category`].
pub fn check_theory(slice: &TheorySlice) -> Report {
    check_category_laws(&slice.cat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monad::free_algebra;
    use crate::presheaf::{graph, path};
    use crate::zoo::{category_algebra, free_category_monad, identity_monad};

    fn chains(n_max: usize) -> Vec<(usize, Op)> {
        let mut ops = vec![(0, Op::nat(0))];
        ops.extend((1..=n_max).map(|n| (1, Op::nat(n))));
        ops
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn free_category_theory_is_delta() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(3), 3).unwrap();
        assert!(check_theory(&s).passed());
        for a in 0..4 {
            for b in 0..4 {
                // monotone maps [a] → [b]
                assert_eq!(s.cat.hom(a, b).len(), binom(a + b + 1, a + 1), "Θ([{a}], [{b}])");
            }
        }
        assert_eq!(s.cat.hom(1, 2).len(), 6);
    }

    #[test]
    fn identity_theory_is_base() {
        let c = Arc::new(crate::fincat::semicube(2));
        let m = identity_monad(&c);
        let ops: Vec<(usize, Op)> = (0..c.n_objects()).map(|d| (d, Op::Elt(0))).collect();
        let s = theory_category(&m, &ops, 0).unwrap();
        let pos = crate::presheaf::hom_positions(&c);
        let mor: Vec<usize> = (0..c.n_morphisms())
            .map(|i| {
                let f = c.morphism(i);
                let k = pos[i];
                s.from_cell(f.dst, f.src, k).unwrap()
            })
            .collect();
        let objs: Vec<usize> = (0..c.n_objects()).collect();
        assert!(check_isomorphism("identity", &c, &s.cat, &objs, &mor).passed());
    }

    #[test]
    fn nerve_of_free_category_on_path2() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(3), 3).unwrap();
        let a = free_algebra(&m, &path(2), 3).unwrap();
        let n = nerve(&m, &a, &s).unwrap();
        assert!(n.check().passed());
        assert_eq!(n.sizes, vec![3, 6, 10, 15]);
        assert!(check_model(&s, &n).unwrap().passed());
    }

    #[test]
    fn nerve_of_terminal_algebra_is_terminal() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(2), 2).unwrap();
        let one = crate::fincat::FinCategory::terminal();
        let a = category_algebra(&m, &one, 2).unwrap();
        let n = nerve(&m, &a, &s).unwrap();
        assert_eq!(n.sizes, vec![1; 3]);
    }

    #[test]
    fn padded_nerve_fails() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(3), 3).unwrap();
        let a = free_algebra(&m, &path(2), 3).unwrap();
        let n = nerve(&m, &a, &s).unwrap();
        assert!(adjoin_cell(&n, 2, 0).is_err());
        let padded = adjoin_cell(&n, 3, 0).unwrap();
        let r = check_model(&s, &padded).unwrap();
        assert!(!r.passed());
        assert!(r.failures[0].witness.contains("not injective"));
    }

    #[test]
    fn missing_unary_objects() {
        let m = free_category_monad();
        let s = theory_category(&m, &[(1, Op::nat(2))], 2).unwrap();
        let x = Presheaf::terminal(&s.cat);
        assert!(matches!(check_model(&s, &x), Err(FamError::MissingUnaryObjects(_))));
    }

    /// Strings of composable morphisms of `cat`, acted on by composing along sub-paths.
    fn strings(s: &TheorySlice, cat: &FinCategory) -> Presheaf {
        let edges: Vec<(usize, usize)> = cat.morphisms().iter().map(|f| (f.src, f.dst)).collect();
        let g = graph(cat.n_objects(), &edges);
        let cells: Vec<Vec<PresheafMorphism>> = s.arities.iter().map(|e| hom_set(e, &g).unwrap()).collect();
        let mut action = Vec::new();
        for i in 0..s.cat.n_morphisms() {
            let (src, dst, phi) = s.kleisli(i);
            let ev = &s.evals[dst];
            let row = cells[dst]
                .iter()
                .map(|w| {
                    let vs = phi.comps[0].iter().map(|&k| w.comps[0][ev.cells[0][k].fill.comps[0][0]]).collect();
                    let es = phi.comps[1]
                        .iter()
                        .map(|&k| {
                            let fill = &ev.cells[1][k].fill;
                            let start = w.comps[0][fill.comps[0][0]];
                            fill.comps[1].iter().fold(cat.id(start), |acc, &e| cat.compose(w.comps[1][e], acc))
                        })
                        .collect();
                    let v = PresheafMorphism { comps: vec![vs, es] };
                    cells[src].iter().position(|u| *u == v).unwrap()
                })
                .collect();
            action.push(row);
        }
        Presheaf::new(s.cat.clone(), cells.iter().map(Vec::len).collect(), action).unwrap()
    }

    /// Composable `n`-strings counted directly from the hom-sets.
    fn count_strings(cat: &FinCategory, n: usize) -> usize {
        let k = cat.n_objects();
        let mut ends = vec![1usize; k];
        for _ in 0..n {
            let mut next = vec![0; k];
            for f in cat.morphisms() {
                next[f.dst] += ends[f.src];
            }
            ends = next;
        }
        ends.iter().sum()
    }

    fn two_arrows() -> FinCategory {
        // x --f--> y --g--> z with h = g∘f, plus an idempotent e on y
        let p = crate::fincat::Presentation {
            objects: vec!["x".into(), "y".into(), "z".into()],
            generators: [("f", 0, 1), ("g", 1, 2), ("e", 1, 1)]
                .iter()
                .map(|&(name, src, dst)| crate::fincat::Generator { name: name.into(), src, dst })
                .collect(),
            relations: vec![(vec![2, 2], vec![2]), (vec![0, 2], vec![0]), (vec![2, 1], vec![1])],
            cap: 1000,
        };
        crate::fincat::build_from_presentation(&p).unwrap()
    }

    #[test]
    fn segal_condition_on_strings() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(3), 3).unwrap();
        let cat = two_arrows();
        let x = strings(&s, &cat);
        assert!(x.check().passed());
        for n in 0..=3 {
            assert_eq!(x.sizes[n], count_strings(&cat, n));
        }
        assert!(check_model(&s, &x).unwrap().passed());
        let a = category_algebra(&m, &cat, 3).unwrap();
        let nv = nerve(&m, &a, &s).unwrap();
        assert_eq!(nv.sizes, x.sizes);
        assert_eq!(nv.action, x.action);
    }

    #[test]
    fn nerve_distinguishes_compositions() {
        // one object, two idempotents a, b with ab = a or ab = b
        let m = free_category_monad();
        let s = theory_category(&m, &chains(2), 2).unwrap();
        let monoid = |ab: usize| {
            let objects = vec!["*".to_string()];
            let morphisms = ["1", "a", "b"].iter().map(|n| Morphism { name: n.to_string(), src: 0, dst: 0 }).collect();
            FinCategory::from_fn(objects, morphisms, vec![0], |g, f| match (g, f) {
                (0, x) | (x, 0) => x,
                (1, 2) => ab,
                (2, 1) => ab,
                (x, _) => x,
            })
            .unwrap()
        };
        let n1 = nerve(&m, &category_algebra(&m, &monoid(1), 2).unwrap(), &s).unwrap();
        let n2 = nerve(&m, &category_algebra(&m, &monoid(2), 2).unwrap(), &s).unwrap();
        assert_eq!(n1.sizes, n2.sizes);
        assert_ne!(n1.action, n2.action);
    }

    #[test]
    fn yoneda_inside_theta() {
        let m = free_category_monad();
        let s = theory_category(&m, &chains(3), 3).unwrap();
        for b in 0..4 {
            let a = free_algebra(&m, &s.arities[b], 3).unwrap();
            let n = nerve(&m, &a, &s).unwrap();
            for a2 in 0..4 {
                assert_eq!(n.sizes[a2], s.cat.hom(a2, b).len());
            }
            assert!(check_model(&s, &n).unwrap().passed());
        }
    }
}
