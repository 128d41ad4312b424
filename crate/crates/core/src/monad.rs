//! Monad representations `(S, E, e, m)`, the induced `η` and `μ`, their law
//! and cartesianness checks, and algebras.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{FamError, Result};
use crate::famrep::{
    composite_unchecked, element_index, element_of, evaluate, map_cells, ops_presheaf, transform_cells, CompositeRep,
    Evaluation, FamRep, Family, Op, OpPresheaf, OperationCell, TransformationSample,
};
use crate::fincat::FinCategory;
use crate::presheaf::{find_isos, hom_set, hom_set_filtered, is_rigid, same_base, Presheaf, PresheafMorphism};
use crate::report::Report;

pub type UnitFn = Arc<dyn Fn(usize) -> Op + Send + Sync>;
pub type MultFn = Arc<dyn Fn(usize, &Op, &[Vec<Op>]) -> Op + Send + Sync>;
/// `e_E(c): E(e(c)) → y(c)`.
pub type UnitWitness = Arc<dyn Fn(usize) -> PresheafMorphism + Send + Sync>;
/// `m_E(t, f): E(m(t, f)) → EE(t, f)`.
pub type MultWitness = Arc<dyn Fn(usize, &Op, &[Vec<Op>]) -> PresheafMorphism + Send + Sync>;

#[derive(Default)]
struct Caches {
    unit: HashMap<usize, PresheafMorphism>,
    mult: HashMap<(usize, Op), PresheafMorphism>,
    ops: HashMap<usize, Arc<OpPresheaf>>,
    flat: HashMap<(usize, Op, usize), Arc<Vec<Vec<Vec<Op>>>>>,
}

/// An endo-representation with unit and multiplication assignments.
#[derive(Clone)]
pub struct MonadRep {
    pub name: String,
    pub rep: FamRep,
    pub unit: UnitFn,
    pub mult: MultFn,
    pub unit_witness: Option<UnitWitness>,
    pub mult_witness: Option<MultWitness>,
    /// Witnesses are found by isomorphism search and must be unique.
    pub rigid: bool,
    pub default_bound: usize,
    twice: Arc<CompositeRep>,
    thrice: Arc<CompositeRep>,
    caches: Arc<Mutex<Caches>>,
}

impl MonadRep {
    pub fn new(
        name: impl Into<String>,
        rep: FamRep,
        unit: impl Fn(usize) -> Op + Send + Sync + 'static,
        mult: impl Fn(usize, &Op, &[Vec<Op>]) -> Op + Send + Sync + 'static,
        default_bound: usize,
    ) -> Result<Self> {
        if !same_base(rep.source_base(), rep.target_base()) {
            return Err(FamError::BaseMismatch);
        }
        let twice = composite_unchecked(rep.clone(), rep.clone(), default_bound);
        let thrice = composite_unchecked(twice.clone(), rep.clone(), default_bound);
        Ok(MonadRep {
            name: name.into(),
            rep,
            unit: Arc::new(unit),
            mult: Arc::new(mult),
            unit_witness: None,
            mult_witness: None,
            rigid: true,
            default_bound,
            twice,
            thrice,
            caches: Default::default(),
        })
    }

    /// Supply the arity witnesses explicitly; clears the rigid flag.
    pub fn with_witnesses(mut self, unit: UnitWitness, mult: MultWitness) -> Self {
        self.unit_witness = Some(unit);
        self.mult_witness = Some(mult);
        self.rigid = false;
        self.caches = Default::default();
        self
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        self.rep.target_base()
    }

    pub fn e(&self, c: usize) -> Op {
        (self.unit)(c)
    }

    pub fn m(&self, c: usize, t: &Op, f: &[Vec<Op>]) -> Op {
        (self.mult)(c, t, f)
    }

    /// The composite representation `SS`.
    pub fn twice(&self) -> &Arc<CompositeRep> {
        &self.twice
    }

    /// `(SS)S`.
    pub fn thrice(&self) -> &Arc<CompositeRep> {
        &self.thrice
    }

    pub fn unit_iso(&self, c: usize) -> Result<PresheafMorphism> {
        if let Some(w) = self.caches.lock().unwrap().unit.get(&c) {
            return Ok(w.clone());
        }
        let w = match &self.unit_witness {
            Some(f) => f(c),
            None => unique_iso(&self.rep.arity(c, &self.e(c)), &Presheaf::representable(self.base(), c), || {
                format!("E(e({})) ≅ y({})", self.base().object_name(c), self.base().object_name(c))
            })?,
        };
        self.caches.lock().unwrap().unit.insert(c, w.clone());
        Ok(w)
    }

    pub fn mult_iso(&self, c: usize, t: &Op, f: &[Vec<Op>]) -> Result<PresheafMorphism> {
        let key = (c, Op::comp(t.clone(), f.to_vec()));
        if let Some(w) = self.caches.lock().unwrap().mult.get(&key) {
            return Ok(w.clone());
        }
        let w = match &self.mult_witness {
            Some(g) => g(c, t, f),
            None => {
                let col = self.twice.colimit(c, &key.1);
                unique_iso(&self.rep.arity(c, &self.m(c, t, f)), &col.apex, || format!("E(m{}) ≅ EE{}", key.1, key.1))?
            }
        };
        self.caches.lock().unwrap().mult.insert(key, w.clone());
        Ok(w)
    }

    /// `S` truncated at `bound`.
    pub fn ops(&self, bound: usize) -> Result<Arc<OpPresheaf>> {
        if let Some(p) = self.caches.lock().unwrap().ops.get(&bound) {
            return Ok(p.clone());
        }
        let p = Arc::new(ops_presheaf(self.rep.as_ref(), bound)?);
        self.caches.lock().unwrap().ops.insert(bound, p.clone());
        Ok(p)
    }

    /// Labellings `f: Et → S` with `m(t, f)` of grade at most `bound`.
    pub fn flat_labellings(&self, c: usize, t: &Op, bound: usize) -> Result<Arc<Vec<Vec<Vec<Op>>>>> {
        let key = (c, t.clone(), bound);
        if let Some(v) = self.caches.lock().unwrap().flat.get(&key) {
            return Ok(v.clone());
        }
        let s = self.ops(bound)?;
        let et = self.rep.arity(c, t);
        let mut out = Vec::new();
        for f in hom_set(&et, &s.ps)? {
            let labels = op_labels(&s.ops, &f);
            if self.rep.grade(c, &self.m(c, t, &labels)) <= bound {
                out.push(labels);
            }
        }
        let out = Arc::new(out);
        self.caches.lock().unwrap().flat.insert(key, out.clone());
        Ok(out)
    }
}

fn unique_iso(x: &Presheaf, y: &Presheaf, what: impl Fn() -> String) -> Result<PresheafMorphism> {
    if x.sizes != y.sizes {
        return Err(FamError::AxiomsFailed(format!("{}: cell counts {:?} vs {:?}", what(), x.sizes, y.sizes)));
    }
    let mut isos = find_isos(x, y)?;
    match isos.len() {
        1 => Ok(isos.pop().unwrap()),
        0 => Err(FamError::AxiomsFailed(format!("{}: no isomorphism", what()))),
        n => Err(FamError::AxiomsFailed(format!("{}: {n} isomorphisms, arity not rigid", what()))),
    }
}

fn is_iso(w: &PresheafMorphism, x: &Presheaf, y: &Presheaf) -> bool {
    x.sizes == y.sizes && w.inverse().is_some()
}

fn op_labels(ops: &[Vec<Op>], f: &PresheafMorphism) -> Vec<Vec<Op>> {
    f.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&k| ops[d][k].clone()).collect()).collect()
}

/// `F ∘ g` on labels: `out[d][x] = labels[d][g[d][x]]`.
fn pull_labels(labels: &[Vec<Op>], g: &PresheafMorphism) -> Vec<Vec<Op>> {
    g.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&k| labels[d][k].clone()).collect()).collect()
}

/// Check the coherence data of a monad representation on operations up to `bound`.
pub fn validate_monad_rep(m: &MonadRep, bound: usize) -> Report {
    let mut r = Report::new("validate_monad_rep");
    if let Err(e) = validate_into(m, bound, &mut r) {
        r.fail("bound", e.to_string());
    }
    r
}

fn validate_into(m: &MonadRep, bound: usize, r: &mut Report) -> Result<()> {
    let c = m.base().clone();
    let rep = m.rep.as_ref();
    let s = m.ops(bound)?;
    let name = |d: usize| c.object_name(d).to_string();

    for d in 0..c.n_objects() {
        let e = m.e(d);
        if rep.grade(d, &e) > bound {
            return Err(FamError::BoundTooSmall(format!("e({}) = {e} exceeds the bound", name(d))));
        }
    }
    if m.rigid {
        for d in 0..c.n_objects() {
            for t in &s.ops[d] {
                r.check(is_rigid(&rep.arity(d, t)), || format!("rigid at {} {t}", name(d)), || "arity has automorphisms".into());
            }
        }
    }

    // unit: naturality of e, e_E an isomorphism and natural
    let mut unit_iso = Vec::new();
    for d in 0..c.n_objects() {
        match m.unit_iso(d) {
            Ok(w) => {
                let (ed, yd) = (rep.arity(d, &m.e(d)), Presheaf::representable(&c, d));
                let ok = is_iso(&w, &ed, &yd) && w.check_natural(&ed, &yd).passed();
                r.check(ok, || format!("unit arity at {}", name(d)), || "e_E is not a natural isomorphism".into());
                unit_iso.push(Some(w));
            }
            Err(e) => {
                r.check(false, || format!("unit arity at {}", name(d)), || e.to_string());
                unit_iso.push(None);
            }
        }
    }
    let pos = crate::presheaf::hom_positions(&c);
    for i in 0..c.n_morphisms() {
        let (src, dst) = (c.src(i), c.dst(i));
        let ok = rep.restrict(i, &m.e(dst)) == m.e(src);
        r.check(ok, || format!("e natural along {}", c.morphism(i).name), || format!("{} vs {}", rep.restrict(i, &m.e(dst)), m.e(src)));
        if let (true, Some(w0), Some(w1)) = (ok, &unit_iso[src], &unit_iso[dst]) {
            // y(i) ∘ e_E(c′) = e_E(c) ∘ E(i_{e(c)})
            let yi = PresheafMorphism {
                comps: (0..c.n_objects()).map(|e| c.hom(e, src).iter().map(|&j| pos[c.compose(i, j)]).collect()).collect(),
            };
            let lhs = w0.then(&yi);
            let rhs = rep.arity_map(i, &m.e(dst)).then(w1);
            r.check(lhs == rhs, || format!("e_E natural along {}", c.morphism(i).name), || "squares differ".into());
        }
    }

    // unit laws
    for d in 0..c.n_objects() {
        let Some(ue) = &unit_iso[d] else { continue };
        let ed = m.e(d);
        for t in &s.ops[d] {
            let et = rep.arity(d, t);
            // left: m(e(c), t̄ ∘ e_E) = t
            let f: Vec<Vec<Op>> = ue
                .comps
                .iter()
                .enumerate()
                .map(|(d2, v)| v.iter().map(|&p| rep.restrict(c.hom(d2, d)[p], t)).collect())
                .collect();
            let lt = m.m(d, &ed, &f);
            r.check(lt == *t, || format!("left unit at {} {t}", name(d)), || format!("m(e, t̄) = {lt}"));
            if lt == *t {
                if let Ok(me) = m.mult_iso(d, &ed, &f) {
                    let col = m.twice.colimit(d, &Op::comp(ed.clone(), f.clone()));
                    let ee = rep.arity(d, &ed);
                    let mut ok = true;
                    for (e, cells) in me.comps.iter().enumerate() {
                        for (z, &v) in cells.iter().enumerate() {
                            let (jx, w) = col.reps[e][v];
                            let (d2, xz) = element_of(&ee, jx);
                            let jm = c.hom(d2, d)[ue.comps[d2][xz]];
                            ok &= rep.arity_map(jm, t).comps[e][w] == z;
                        }
                    }
                    r.check(ok, || format!("left unit arity at {} {t}", name(d)), || "m_E does not reduce to the identity".into());
                }
            }
            // right: m(t, e ∘ !) = t
            let g: Vec<Vec<Op>> = et.sizes.iter().enumerate().map(|(d2, &n)| vec![m.e(d2); n]).collect();
            let rt = m.m(d, t, &g);
            r.check(rt == *t, || format!("right unit at {} {t}", name(d)), || format!("m(t, e) = {rt}"));
            if rt == *t {
                if let Ok(me) = m.mult_iso(d, t, &g) {
                    let col = m.twice.colimit(d, &Op::comp(t.clone(), g.clone()));
                    let mut ok = true;
                    for (e, cells) in me.comps.iter().enumerate() {
                        for (z, &v) in cells.iter().enumerate() {
                            let (jx, w) = col.reps[e][v];
                            let (d2, x) = element_of(&et, jx);
                            match &unit_iso[d2] {
                                Some(u2) => ok &= et.action[c.hom(e, d2)[u2.comps[e][w]]][x] == z,
                                None => ok = false,
                            }
                        }
                    }
                    r.check(ok, || format!("right unit arity at {} {t}", name(d)), || "m_E does not reduce to the identity".into());
                }
            }
        }
    }

    // multiplication: witnesses, naturality, associativity
    for d in 0..c.n_objects() {
        for t in &s.ops[d] {
            let et = rep.arity(d, t);
            for f in m.flat_labellings(d, t, bound)?.iter() {
                let tf = Op::comp(t.clone(), f.clone());
                let mt = m.m(d, t, f);
                let me = match m.mult_iso(d, t, f) {
                    Ok(w) => {
                        let col = m.twice.colimit(d, &tf);
                        let emt = rep.arity(d, &mt);
                        let ok = is_iso(&w, &emt, &col.apex) && w.check_natural(&emt, &col.apex).passed();
                        r.check(ok, || format!("mult arity at {} {tf}", name(d)), || "m_E is not a natural isomorphism".into());
                        ok.then_some(w)
                    }
                    Err(e) => {
                        r.check(false, || format!("mult arity at {} {tf}", name(d)), || e.to_string());
                        None
                    }
                };
                for i in c.hom_into(d) {
                    let src_op = m.twice.restrict(i, &tf);
                    let (st, sf) = src_op.split().unwrap();
                    let lhs = m.m(c.src(i), st, sf);
                    let rhs = rep.restrict(i, &mt);
                    r.check(lhs == rhs, || format!("m natural along {} at {tf}", c.morphism(i).name), || format!("{lhs} vs {rhs}"));
                    if lhs != rhs {
                        continue;
                    }
                    if let (Some(me), Ok(me0)) = (&me, m.mult_iso(c.src(i), st, sf)) {
                        let a = me0.then(&m.twice.arity_map(i, &tf));
                        let b = rep.arity_map(i, &mt).then(me);
                        r.check(a == b, || format!("m_E natural along {} at {tf}", c.morphism(i).name), || "squares differ".into());
                    }
                }
                if let Some(me) = me {
                    associativity_at(m, d, t, &et, f, &me, bound, r)?;
                }
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn associativity_at(
    m: &MonadRep,
    d: usize,
    t: &Op,
    et: &Presheaf,
    f: &[Vec<Op>],
    me: &PresheafMorphism,
    bound: usize,
    r: &mut Report,
) -> Result<()> {
    let rep = m.rep.as_ref();
    let c = m.base();
    let tf = Op::comp(t.clone(), f.to_vec());
    let s = m.m(d, t, f);
    let ee = m.twice.colimit(d, &tf);
    let me_inv = me.inverse().expect("checked invertible");
    for fp in m.flat_labellings(d, &s, bound)?.iter() {
        // F: EE(t, f) → S with F ∘ m_E = F′
        let big_f = pull_labels(fp, &me_inv);
        let lhs = m.m(d, &s, fp);
        let g: Vec<Vec<Op>> = (0..et.sizes.len())
            .map(|e| {
                (0..et.sizes[e])
                    .map(|x| {
                        let inj = &ee.injections[element_index(et, e, x)];
                        m.m(e, &f[e][x], &pull_labels(&big_f, inj))
                    })
                    .collect()
            })
            .collect();
        let rhs = m.m(d, t, &g);
        let here = || format!("associativity at {} (({t};..),{})", c.object_name(d), Op::comp(s.clone(), fp.clone()));
        r.check(lhs == rhs, here, || format!("{lhs} vs {rhs}"));
        if lhs != rhs {
            continue;
        }
        let w_col = m.thrice.colimit(d, &Op::comp(tf.clone(), big_f.clone()));
        let (Ok(m_a), Ok(m_b)) = (m.mult_iso(d, &s, fp), m.mult_iso(d, t, &g)) else {
            r.check(false, here, || "missing multiplication witness".into());
            continue;
        };
        let col_a = m.twice.colimit(d, &Op::comp(s.clone(), fp.clone()));
        let col_b = m.twice.colimit(d, &Op::comp(t.clone(), g.clone()));
        let es = rep.arity(d, &s);
        let mut ok = true;
        for (e, cells) in m_a.comps.iter().enumerate() {
            for z in 0..cells.len() {
                // route through m_E(s, F′) then m_E(t, f)
                let (jx, w) = col_a.reps[e][m_a.comps[e][z]];
                let (e2, x2) = element_of(&es, jx);
                let v = me.comps[e2][x2];
                let wa = w_col.injections[element_index(&ee.apex, e2, v)].comps[e][w];
                // route through m_E(t, G) then m_E(f(x), F ∘ inj_x)
                let (jx, u) = col_b.reps[e][m_b.comps[e][z]];
                let (e1, x) = element_of(et, jx);
                let inj = &ee.injections[jx];
                let fx_labels = pull_labels(&big_f, inj);
                let wb = match m.mult_iso(e1, &f[e1][x], &fx_labels) {
                    Ok(mi) => {
                        let inner = m.twice.colimit(e1, &Op::comp(f[e1][x].clone(), fx_labels.clone()));
                        let (jy, w) = inner.reps[e][mi.comps[e][u]];
                        let efx = rep.arity(e1, &f[e1][x]);
                        let (e3, y) = element_of(&efx, jy);
                        let v = inj.comps[e3][y];
                        Some(w_col.injections[element_index(&ee.apex, e3, v)].comps[e][w])
                    }
                    Err(_) => None,
                };
                ok &= wb == Some(wa);
            }
        }
        r.check(ok, || format!("associativity arity at {} {tf}", c.object_name(d)), || "the two gluings differ".into());
    }
    Ok(())
}

/// `η_X: X → TX` into an evaluation of `T` at `X`.
pub fn unit_map(m: &MonadRep, x: &Presheaf, tx: &Evaluation) -> Result<PresheafMorphism> {
    let c = m.base();
    let mut comps = Vec::with_capacity(c.n_objects());
    for d in 0..c.n_objects() {
        let ue = m.unit_iso(d)?;
        let e = m.e(d);
        let mut comp = Vec::with_capacity(x.sizes[d]);
        for a in 0..x.sizes[d] {
            let fill = PresheafMorphism {
                comps: ue.comps.iter().enumerate().map(|(d2, v)| v.iter().map(|&p| x.action[c.hom(d2, d)[p]][a]).collect()).collect(),
            };
            let cell = OperationCell { op: e.clone(), fill };
            comp.push(tx.lookup(d, &cell).ok_or_else(|| FamError::BoundTooSmall(format!("unit cell {e} is not enumerated")))?);
        }
        comps.push(comp);
    }
    Ok(PresheafMorphism { comps })
}

pub fn unit_transformation(m: &MonadRep, x: &Presheaf, bound: usize) -> Result<(Evaluation, PresheafMorphism)> {
    let tx = evaluate(m.rep.as_ref(), x, bound)?;
    let eta = unit_map(m, x, &tx)?;
    Ok((tx, eta))
}

/// Flatten `(t, f: Et → TY)` to a cell of `TY`'s underlying `T Y`, glued through `m_E`.
pub fn flatten_cell(m: &MonadRep, lower: &Evaluation, c: usize, t: &Op, f: &PresheafMorphism) -> Result<OperationCell> {
    let rep = m.rep.as_ref();
    let s: Vec<Vec<Op>> = f.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&k| lower.cells[d][k].op.clone()).collect()).collect();
    let op = m.m(c, t, &s);
    let me = m.mult_iso(c, t, &s)?;
    let col = m.twice.colimit(c, &Op::comp(t.clone(), s));
    let et = rep.arity(c, t);
    let fill = PresheafMorphism {
        comps: me
            .comps
            .iter()
            .enumerate()
            .map(|(e, v)| {
                v.iter()
                    .map(|&cls| {
                        let (j, z) = col.reps[e][cls];
                        let (d, x) = element_of(&et, j);
                        lower.cells[d][f.comps[d][x]].fill.comps[e][z]
                    })
                    .collect()
            })
            .collect(),
    };
    Ok(OperationCell { op, fill })
}

/// `μ`: cells `(t, f: Et → lower)` of `upper` flattened into `lower`.
pub fn mult_map(m: &MonadRep, lower: &Evaluation, upper: &Evaluation) -> Result<PresheafMorphism> {
    let mut comps = Vec::with_capacity(upper.cells.len());
    for (c, cells) in upper.cells.iter().enumerate() {
        let mut comp = Vec::with_capacity(cells.len());
        for oc in cells {
            let flat = flatten_cell(m, lower, c, &oc.op, &oc.fill)?;
            comp.push(
                lower.lookup(c, &flat).ok_or_else(|| FamError::BoundTooSmall(format!("flattening {} is not enumerated", flat.op)))?,
            );
        }
        comps.push(comp);
    }
    Ok(PresheafMorphism { comps })
}

/// `T X, T²X, …` where level `k` holds the cells whose total flattening has grade
/// at most `bound`; `flat[k][c][i]` is that flattened operation.
#[derive(Debug, Clone)]
pub struct Tower {
    pub levels: Vec<Evaluation>,
    pub flat: Vec<Vec<Vec<Op>>>,
}

/// The flat-bounded cells `(t, f: Et → lower)`.
pub fn extend(m: &MonadRep, lower: &Evaluation, lower_flat: &[Vec<Op>], bound: usize) -> Result<(Evaluation, Vec<Vec<Op>>)> {
    let c = m.base();
    let rep = m.rep.as_ref();
    let mut cells = Vec::with_capacity(c.n_objects());
    let mut flat = Vec::with_capacity(c.n_objects());
    for d in 0..c.n_objects() {
        let (mut here, mut fl) = (Vec::new(), Vec::new());
        for t in rep.ops(d, bound) {
            let et = rep.arity(d, &t);
            for labels in m.flat_labellings(d, &t, bound)?.iter() {
                let allowed = |e: usize, x: usize, y: usize| lower_flat[e][y] == labels[e][x];
                for f in hom_set_filtered(&et, &lower.tx, &allowed, false)? {
                    here.push(OperationCell { op: t.clone(), fill: f });
                    fl.push(m.m(d, &t, labels));
                }
            }
        }
        cells.push(here);
        flat.push(fl);
    }
    Ok((Evaluation::from_cells(rep, cells, false)?, flat))
}

pub fn tower(m: &MonadRep, x: &Presheaf, bound: usize, depth: usize) -> Result<Tower> {
    let first = evaluate(m.rep.as_ref(), x, bound)?;
    let first_flat = first.cells.iter().map(|v| v.iter().map(|oc| oc.op.clone()).collect()).collect();
    let mut t = Tower { levels: vec![first], flat: vec![first_flat] };
    for k in 1..depth {
        let (ev, fl) = extend(m, &t.levels[k - 1], &t.flat[k - 1], bound)?;
        t.levels.push(ev);
        t.flat.push(fl);
    }
    Ok(t)
}

/// `μ_X: T²X → TX` on the flat-bounded cells.
pub fn mult_transformation(m: &MonadRep, x: &Presheaf, bound: usize) -> Result<(Tower, PresheafMorphism)> {
    let t = tower(m, x, bound, 2)?;
    let mu = mult_map(m, &t.levels[0], &t.levels[1])?;
    Ok((t, mu))
}

fn eta_cell(m: &MonadRep, ty: &Presheaf, c: usize, y: usize) -> Result<OperationCell> {
    let b = m.base();
    let ue = m.unit_iso(c)?;
    let fill = PresheafMorphism {
        comps: ue.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&p| ty.action[b.hom(d, c)[p]][y]).collect()).collect(),
    };
    Ok(OperationCell { op: m.e(c), fill })
}

/// Monad laws on `X, TX, T²X, T³X`, and pullback checks of the `η` and `μ`
/// naturality squares along `X → 1` and a few endomorphisms of `X`.
pub fn check_monad_laws_on(m: &MonadRep, x: &Presheaf, bound: usize) -> Result<Report> {
    let mut r = Report::new("monad_laws");
    let c = m.base().clone();
    let tw = tower(m, x, bound, 3)?;
    let (l1, l2, l3) = (&tw.levels[0], &tw.levels[1], &tw.levels[2]);
    let eta = unit_map(m, x, l1)?;
    let mu = mult_map(m, l1, l2)?;
    for d in 0..c.n_objects() {
        for (k, y) in l1.cells[d].iter().enumerate() {
            let et = eta_cell(m, &l1.tx, d, k)?;
            let a = flatten_cell(m, l1, d, &et.op, &et.fill)?;
            r.check(a == *y, || format!("μ∘ηT at {} cell {}", c.object_name(d), l1.tx.label(d, k)), || format!("got {}", a.op));
            let b = flatten_cell(m, l1, d, &y.op, &y.fill.then(&eta))?;
            r.check(b == *y, || format!("μ∘Tη at {} cell {}", c.object_name(d), l1.tx.label(d, k)), || format!("got {}", b.op));
        }
        for (k, z) in l3.cells[d].iter().enumerate() {
            let inner = flatten_cell(m, l2, d, &z.op, &z.fill)?;
            let a = flatten_cell(m, l1, d, &inner.op, &inner.fill)?;
            let b = flatten_cell(m, l1, d, &z.op, &z.fill.then(&mu))?;
            r.check(
                a == b,
                || format!("μ∘μT = μ∘Tμ at {} cell {}", c.object_name(d), l3.tx.label(d, k)),
                || format!("{} vs {}", a.op, b.op),
            );
        }
    }

    let mut targets: Vec<(String, Presheaf, PresheafMorphism)> = Vec::new();
    let one = Presheaf::terminal(&c);
    let bang = PresheafMorphism { comps: x.sizes.iter().map(|&n| vec![0; n]).collect() };
    targets.push(("X→1".into(), one, bang));
    let id = PresheafMorphism::identity(x);
    for (k, h) in hom_set(x, x)?.into_iter().filter(|h| *h != id).take(3).enumerate() {
        targets.push((format!("endo{k}"), x.clone(), h));
    }
    let mut samples = Vec::new();
    for (name, y, h) in targets {
        samples.extend(squares_along(m, (x, &tw), &y, &h, &name, bound)?);
    }
    r.absorb(crate::famrep::check_cartesian(&samples));
    Ok(r)
}

fn squares_along(
    m: &MonadRep,
    (x, tw): (&Presheaf, &Tower),
    y: &Presheaf,
    h: &PresheafMorphism,
    name: &str,
    bound: usize,
) -> Result<[TransformationSample; 2]> {
    let (l1, l2) = (&tw.levels[0], &tw.levels[1]);
    let ty = tower(m, y, bound, 2)?;
    let (ly1, ly2) = (&ty.levels[0], &ty.levels[1]);
    let th = map_cells(l1, ly1, h)?;
    let (eta, eta_y) = (unit_map(m, x, l1)?, unit_map(m, y, ly1)?);
    let eta_sq = TransformationSample::new(format!("η along {name}"), x, y, &l1.tx, &ly1.tx, [h.clone(), eta, eta_y, th.clone()]);
    let tth = map_cells(l2, ly2, &th)?;
    let (mu, mu_y) = (mult_map(m, l1, l2)?, mult_map(m, ly1, ly2)?);
    let mu_sq = TransformationSample::new(format!("μ along {name}"), &l2.tx, &ly2.tx, &l1.tx, &ly1.tx, [tth, mu, mu_y, th]);
    Ok([eta_sq, mu_sq])
}

/// The `η` and `μ` naturality squares along `h: X → Y`, for [`check_cartesian`](crate::famrep::check_cartesian).
pub fn naturality_squares(m: &MonadRep, x: &Presheaf, y: &Presheaf, h: &PresheafMorphism, bound: usize) -> Result<[TransformationSample; 2]> {
    let tw = tower(m, x, bound, 2)?;
    squares_along(m, (x, &tw), y, h, "h", bound)
}

/// A `T`-algebra on operations up to `bound`: `structure: TA → A`.
#[derive(Debug, Clone)]
pub struct Algebra {
    pub carrier: Presheaf,
    pub bound: usize,
    pub cells: Evaluation,
    pub structure: PresheafMorphism,
}

impl Algebra {
    pub fn from_fn(m: &MonadRep, carrier: Presheaf, bound: usize, f: &dyn Fn(usize, &OperationCell) -> Result<usize>) -> Result<Self> {
        let cells = evaluate(m.rep.as_ref(), &carrier, bound)?;
        let structure = PresheafMorphism {
            comps: cells.cells.iter().enumerate().map(|(c, v)| v.iter().map(|oc| f(c, oc)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?,
        };
        Ok(Algebra { carrier, bound, cells, structure })
    }
}

/// `(TX, μ_X)`; requires the evaluation at `bound` to be exact.
pub fn free_algebra(m: &MonadRep, x: &Presheaf, bound: usize) -> Result<Algebra> {
    let tx = evaluate(m.rep.as_ref(), x, bound)?;
    if !tx.exact {
        return Err(FamError::InexactTruncation(format!("{} on the given presheaf has operations beyond bound {bound}", m.name)));
    }
    let ttx = evaluate(m.rep.as_ref(), &tx.tx, bound)?;
    let structure = mult_map(m, &tx, &ttx)?;
    Ok(Algebra { carrier: tx.tx.clone(), bound, cells: ttx, structure })
}

/// Unit law, multiplication law on flat-bounded cells, and naturality of the structure map.
pub fn check_algebra(m: &MonadRep, a: &Algebra) -> Result<Report> {
    let mut r = Report::new("algebra");
    let c = m.base().clone();
    r.absorb(a.structure.check_natural(&a.cells.tx, &a.carrier));
    let eta = unit_map(m, &a.carrier, &a.cells)?;
    for d in 0..c.n_objects() {
        for x in 0..a.carrier.sizes[d] {
            let back = a.structure.comps[d][eta.comps[d][x]];
            r.check(back == x, || format!("unit law at {} {}", c.object_name(d), a.carrier.label(d, x)), || {
                format!("returns {}", a.carrier.label(d, back))
            });
        }
    }
    let flat: Vec<Vec<Op>> = a.cells.cells.iter().map(|v| v.iter().map(|oc| oc.op.clone()).collect()).collect();
    let (upper, _) = extend(m, &a.cells, &flat, a.bound)?;
    for d in 0..c.n_objects() {
        for (k, oc) in upper.cells[d].iter().enumerate() {
            let fl = flatten_cell(m, &a.cells, d, &oc.op, &oc.fill)?;
            let lhs = a.structure.comps[d][a.cells.lookup(d, &fl).ok_or_else(|| FamError::BoundTooSmall("flattened cell".into()))?];
            let inner = OperationCell { op: oc.op.clone(), fill: oc.fill.then(&a.structure) };
            let rhs = a.structure.comps[d][a.cells.lookup(d, &inner).ok_or_else(|| FamError::BoundTooSmall("inner cell".into()))?];
            r.check(
                lhs == rhs,
                || format!("multiplication law at {} cell {}", c.object_name(d), upper.tx.label(d, k)),
                || format!("{} vs {}", a.carrier.label(d, lhs), a.carrier.label(d, rhs)),
            );
        }
    }
    Ok(r)
}

/// Tabulate `φ_X: TX → T′X` from a cellwise transformation and compare it against `T h`.
pub fn transformation_sample(
    name: &str,
    tx: &Evaluation,
    ty: &Evaluation,
    t2x: &Evaluation,
    t2y: &Evaluation,
    h: &PresheafMorphism,
    phi: &dyn Fn(usize, &OperationCell) -> Option<OperationCell>,
) -> Result<TransformationSample> {
    let top = map_cells(tx, ty, h)?;
    let left = transform_cells(tx, t2x, phi)?;
    let right = transform_cells(ty, t2y, phi)?;
    let bottom = map_cells(t2x, t2y, h)?;
    Ok(TransformationSample::new(name, &tx.tx, &ty.tx, &t2x.tx, &t2y.tx, [top, left, right, bottom]))
}
