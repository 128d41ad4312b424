//! Familial representations `(S, E)`: evaluation of `TX_c = ∐_{t∈S_c} Hom(Et, X)`,
//! representation morphisms, identities, composites and their coherence cells.
//!
//! A representation may have infinitely many operations. It is then accessed
//! through [`Family`], which enumerates operations up to a size grade and says
//! how exactness of a truncated evaluation can be decided.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{FamError, Result};
use crate::fincat::FinCategory;
use crate::presheaf::{
    category_of_elements, colimit_presheaves, first_iso, has_hom, hom_positions, hom_set, hom_set_filtered,
    pullback_defect, same_base, Colimit, Presheaf, PresheafDiagram, PresheafMorphism, Square,
};
use crate::report::Report;

/// An operation of a representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// The k-th element of a finite operation set.
    Elt(usize),
    /// A tuple of natural numbers (path lengths, word lengths, grid sizes).
    Nat(Vec<usize>),
    /// A composite operation `(t, f)`; `f[d][x]` is the inner operation at cell `x` of `(Et)_d`.
    Comp(Box<Op>, Vec<Vec<Op>>),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Elt(k) => write!(f, "#{k}"),
            Op::Nat(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Op::Nat(v) => {
                write!(f, "(")?;
                for (i, n) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, ")")
            }
            Op::Comp(t, inner) => {
                write!(f, "({t};")?;
                let mut first = true;
                for cells in inner {
                    for op in cells {
                        write!(f, "{}{op}", if first { "" } else { "," })?;
                        first = false;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl Op {
    pub fn nat(n: usize) -> Op {
        Op::Nat(vec![n])
    }

    pub fn comp(t: Op, f: Vec<Vec<Op>>) -> Op {
        Op::Comp(Box::new(t), f)
    }

    pub fn split(&self) -> Option<(&Op, &Vec<Vec<Op>>)> {
        match self {
            Op::Comp(t, f) => Some((t, f)),
            _ => None,
        }
    }
}

/// How to decide whether an evaluation truncated at a bound is exact.
#[derive(Debug, Clone)]
pub enum Beyond {
    /// No operation exceeds the bound.
    Nothing,
    /// Exact iff none of these operations `(c, t)` has a filling in `X`.
    Probes(Vec<(usize, Op)>),
    /// Exactness cannot be decided; reported as inexact.
    Unknown,
}

/// A familial representation `(S, E)` from presheaves on `source_base` (C′)
/// to presheaves on `target_base` (C).
pub trait Family: Send + Sync {
    fn name(&self) -> String;
    fn source_base(&self) -> &Arc<FinCategory>;
    fn target_base(&self) -> &Arc<FinCategory>;
    /// Operations at `c` with grade at most `bound`, in canonical order.
    fn ops(&self, c: usize, bound: usize) -> Vec<Op>;
    fn grade(&self, c: usize, t: &Op) -> usize;
    fn beyond(&self, bound: usize) -> Beyond;
    /// The arity `Et`, a presheaf on the source base.
    fn arity(&self, c: usize, t: &Op) -> Presheaf;
    /// `S_i(t)` for `i: c' → c` and `t ∈ S_c`.
    fn restrict(&self, i: usize, t: &Op) -> Op;
    /// `E(i_t): E(S_i t) → E(t)`.
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism;
    fn as_composite(&self) -> Option<&CompositeRep> {
        None
    }
}

pub type FamRep = Arc<dyn Family>;

/// The operations of a representation up to a bound, as a presheaf on the target base.
#[derive(Debug, Clone)]
pub struct OpPresheaf {
    pub ps: Presheaf,
    pub ops: Vec<Vec<Op>>,
    pub index: Vec<HashMap<Op, usize>>,
}

impl OpPresheaf {
    /// Build from per-object operation lists; restrictions must stay inside.
    pub fn from_ops(rep: &dyn Family, ops: Vec<Vec<Op>>) -> Result<Self> {
        let base = rep.target_base().clone();
        let index: Vec<HashMap<Op, usize>> =
            ops.iter().map(|v| v.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect()).collect();
        let mut action = Vec::with_capacity(base.n_morphisms());
        for (i, m) in base.morphisms().iter().enumerate() {
            let mut row = Vec::with_capacity(ops[m.dst].len());
            for t in &ops[m.dst] {
                let r = rep.restrict(i, t);
                match index[m.src].get(&r) {
                    Some(&k) => row.push(k),
                    None => {
                        return Err(FamError::BoundTooSmall(format!(
                            "restriction of {t} along {} is {r}, outside the bounded operations",
                            m.name
                        )))
                    }
                }
            }
            action.push(row);
        }
        let labels = ops.iter().map(|v| v.iter().map(|t| t.to_string()).collect()).collect();
        let sizes = ops.iter().map(Vec::len).collect();
        let ps = Presheaf::new(base, sizes, action)?.with_labels(labels);
        Ok(OpPresheaf { ps, ops, index })
    }
}

/// `S` truncated at `bound`.
pub fn ops_presheaf(rep: &dyn Family, bound: usize) -> Result<OpPresheaf> {
    let ops = (0..rep.target_base().n_objects()).map(|c| rep.ops(c, bound)).collect();
    OpPresheaf::from_ops(rep, ops)
}

/// Check that `S` and `E` are functorial on the bounded operations.
pub fn check_rep(rep: &dyn Family, bound: usize) -> Report {
    let mut r = Report::new("representation_functoriality");
    let sp = match ops_presheaf(rep, bound) {
        Ok(s) => s,
        Err(e) => {
            r.fail("operations", e.to_string());
            return r;
        }
    };
    r.absorb(sp.ps.check());
    let c = rep.target_base();
    for d in 0..c.n_objects() {
        for t in &sp.ops[d] {
            let e = rep.arity(d, t);
            r.absorb(e.check());
            let id = rep.arity_map(c.id(d), t);
            r.check(id == PresheafMorphism::identity(&e), || format!("E(id) at {t}"), || "not the identity".into());
        }
    }
    for g in 0..c.n_morphisms() {
        let dst = c.dst(g);
        for t in &sp.ops[dst] {
            let st = rep.restrict(g, t);
            let eg = rep.arity_map(g, t);
            r.absorb(eg.check_natural(&rep.arity(c.src(g), &st), &rep.arity(dst, t)));
            for f in 0..c.n_morphisms() {
                let Some(gf) = c.try_compose(g, f) else { continue };
                let lhs = rep.arity_map(gf, t);
                let rhs = rep.arity_map(f, &st).then(&eg);
                r.check(
                    lhs == rhs,
                    || format!("E({} ∘ {}) at {t}", c.morphism(g).name, c.morphism(f).name),
                    || "arity maps are not functorial".into(),
                );
            }
        }
    }
    r
}

/// A representation given by finite tables.
#[derive(Debug, Clone)]
pub struct TableRep {
    pub name: String,
    pub source: Arc<FinCategory>,
    /// `S` as a presheaf on the target base; operation `k` at `c` is `Op::Elt(k)`.
    pub s: Presheaf,
    pub arities: Vec<Vec<Presheaf>>,
    /// `maps[i][k] = E(i_k)` for each operation `k` at the target of `i`.
    pub maps: Vec<Vec<PresheafMorphism>>,
    pub grades: Vec<Vec<usize>>,
}

impl TableRep {
    /// Grades default to the total cell count of each arity.
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        s: Presheaf,
        arities: Vec<Vec<Presheaf>>,
        maps: Vec<Vec<PresheafMorphism>>,
    ) -> Result<Self> {
        let grades = arities.iter().map(|v| v.iter().map(Presheaf::n_cells).collect()).collect();
        let rep = TableRep { name: name.into(), source, s, arities, maps, grades };
        rep.validate_shape()?;
        Ok(rep)
    }

    fn validate_shape(&self) -> Result<()> {
        let c = &self.s.base;
        if self.arities.len() != c.n_objects() || self.maps.len() != c.n_morphisms() {
            return Err(FamError::Malformed(format!("{}: table shape does not match the base", self.name)));
        }
        for d in 0..c.n_objects() {
            if self.arities[d].len() != self.s.sizes[d] {
                return Err(FamError::Malformed(format!("{}: arity count at {}", self.name, c.object_name(d))));
            }
            for a in &self.arities[d] {
                if !same_base(&a.base, &self.source) {
                    return Err(FamError::BaseMismatch);
                }
            }
        }
        for i in 0..c.n_morphisms() {
            if self.maps[i].len() != self.s.sizes[c.dst(i)] {
                return Err(FamError::Malformed(format!("{}: arity maps along {}", self.name, c.morphism(i).name)));
            }
        }
        Ok(())
    }

    fn elt(t: &Op) -> usize {
        match t {
            Op::Elt(k) => *k,
            other => panic!("table representation has no operation {other}"),
        }
    }
}

impl Family for TableRep {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        &self.source
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        &self.s.base
    }
    fn ops(&self, c: usize, bound: usize) -> Vec<Op> {
        (0..self.s.sizes[c]).filter(|&k| self.grades[c][k] <= bound).map(Op::Elt).collect()
    }
    fn grade(&self, c: usize, t: &Op) -> usize {
        self.grades[c][Self::elt(t)]
    }
    fn beyond(&self, bound: usize) -> Beyond {
        let over: Vec<(usize, Op)> = (0..self.s.sizes.len())
            .flat_map(|c| (0..self.s.sizes[c]).filter(move |&k| self.grades[c][k] > bound).map(move |k| (c, Op::Elt(k))))
            .collect();
        if over.is_empty() {
            Beyond::Nothing
        } else {
            Beyond::Probes(over)
        }
    }
    fn arity(&self, c: usize, t: &Op) -> Presheaf {
        self.arities[c][Self::elt(t)].clone()
    }
    fn restrict(&self, i: usize, t: &Op) -> Op {
        Op::Elt(self.s.action[i][Self::elt(t)])
    }
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism {
        self.maps[i][Self::elt(t)].clone()
    }
}

/// `(S⁰, E⁰)`: one operation `∗_c` per object with arity `y(c)`.
pub fn identity_rep(c: &Arc<FinCategory>) -> FamRep {
    let s = Presheaf::terminal(c).with_labels(c.objects().iter().map(|o| vec![format!("*_{o}")]).collect());
    let arities = (0..c.n_objects()).map(|d| vec![Presheaf::representable(c, d)]).collect();
    let pos = hom_positions(c);
    let maps = c
        .morphisms()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            // y(i): y(c') → y(c), j ↦ i ∘ j
            let comps = (0..c.n_objects()).map(|e| c.hom(e, m.src).iter().map(|&j| pos[c.compose(i, j)]).collect()).collect();
            vec![PresheafMorphism { comps }]
        })
        .collect();
    let grades = vec![vec![0]; c.n_objects()];
    Arc::new(TableRep { name: "identity".into(), source: c.clone(), s, arities, maps, grades })
}

/// Free category on a graph: `S_0 = {0}`, `S_1 = ℕ`, `E(n)` the path with `n` edges.
#[derive(Debug)]
pub struct FreeCategoryRep {
    base: Arc<FinCategory>,
}

impl FreeCategoryRep {
    pub fn new() -> Self {
        FreeCategoryRep { base: crate::fincat::g1() }
    }

    fn len(t: &Op) -> usize {
        match t {
            Op::Nat(v) if v.len() == 1 => v[0],
            other => panic!("free category has no operation {other}"),
        }
    }
}

impl Default for FreeCategoryRep {
    fn default() -> Self {
        Self::new()
    }
}

impl Family for FreeCategoryRep {
    fn name(&self) -> String {
        "free-category".into()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        &self.base
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        &self.base
    }
    fn ops(&self, c: usize, bound: usize) -> Vec<Op> {
        if c == 0 {
            vec![Op::nat(0)]
        } else {
            (0..=bound).map(Op::nat).collect()
        }
    }
    fn grade(&self, _c: usize, t: &Op) -> usize {
        Self::len(t)
    }
    fn beyond(&self, bound: usize) -> Beyond {
        Beyond::Probes(vec![(1, Op::nat(bound + 1))])
    }
    fn arity(&self, _c: usize, t: &Op) -> Presheaf {
        crate::presheaf::path(Self::len(t))
    }
    fn restrict(&self, i: usize, t: &Op) -> Op {
        if self.base.is_identity(i) {
            t.clone()
        } else {
            Op::nat(0)
        }
    }
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism {
        let n = Self::len(t);
        if self.base.is_identity(i) {
            return PresheafMorphism::identity(&crate::presheaf::path(n));
        }
        let v = if self.base.morphism(i).name == "s" { 0 } else { n };
        PresheafMorphism { comps: vec![vec![v], vec![]] }
    }
}

/// Free monoid on a set: operations `n ∈ ℕ` with arity the `n`-element set.
#[derive(Debug)]
pub struct FreeMonoidRep {
    base: Arc<FinCategory>,
}

impl FreeMonoidRep {
    pub fn new() -> Self {
        static ONE: std::sync::OnceLock<Arc<FinCategory>> = std::sync::OnceLock::new();
        FreeMonoidRep { base: ONE.get_or_init(|| Arc::new(FinCategory::terminal())).clone() }
    }

    pub fn set(&self, n: usize) -> Presheaf {
        Presheaf::new(self.base.clone(), vec![n], vec![(0..n).collect()]).expect("finite set")
    }

    fn len(t: &Op) -> usize {
        match t {
            Op::Nat(v) if v.len() == 1 => v[0],
            other => panic!("free monoid has no operation {other}"),
        }
    }
}

impl Default for FreeMonoidRep {
    fn default() -> Self {
        Self::new()
    }
}

impl Family for FreeMonoidRep {
    fn name(&self) -> String {
        "free-monoid".into()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        &self.base
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        &self.base
    }
    fn ops(&self, _c: usize, bound: usize) -> Vec<Op> {
        (0..=bound).map(Op::nat).collect()
    }
    fn grade(&self, _c: usize, t: &Op) -> usize {
        Self::len(t)
    }
    fn beyond(&self, bound: usize) -> Beyond {
        Beyond::Probes(vec![(0, Op::nat(bound + 1))])
    }
    fn arity(&self, _c: usize, t: &Op) -> Presheaf {
        self.set(Self::len(t))
    }
    fn restrict(&self, _i: usize, t: &Op) -> Op {
        t.clone()
    }
    fn arity_map(&self, _i: usize, t: &Op) -> PresheafMorphism {
        PresheafMorphism::identity(&self.set(Self::len(t)))
    }
}

/// Object index of the element `(c, x)` in `∫X`.
pub fn element_index(x: &Presheaf, c: usize, cell: usize) -> usize {
    x.sizes[..c].iter().sum::<usize>() + cell
}

/// The element `(c, x)` with the given object index in `∫X`.
pub fn element_of(x: &Presheaf, mut j: usize) -> (usize, usize) {
    for (c, &n) in x.sizes.iter().enumerate() {
        if j < n {
            return (c, j);
        }
        j -= n;
    }
    panic!("element index out of range")
}

/// The composite representation `(SS′, EE′)`.
pub struct CompositeRep {
    pub outer: FamRep,
    pub inner: FamRep,
    pub bound: usize,
    cache: Mutex<HashMap<(usize, Op), Arc<Colimit>>>,
}

impl CompositeRep {
    /// `EE′(t, f) = colim_{x ∈ ∫Et} E′(f(x))`, with its cocone.
    pub fn colimit(&self, c: usize, op: &Op) -> Arc<Colimit> {
        if let Some(col) = self.cache.lock().unwrap().get(&(c, op.clone())) {
            return col.clone();
        }
        let (t, f) = op.split().expect("composite operation");
        let et = self.outer.arity(c, t);
        let el = category_of_elements(&et);
        let objects: Vec<Presheaf> = el.element.iter().map(|&(d, x)| self.inner.arity(d, &f[d][x])).collect();
        let maps = (0..el.cat.n_morphisms())
            .map(|u| {
                let (d, x) = el.element[el.cat.dst(u)];
                self.inner.arity_map(el.proj_mor[u], &f[d][x])
            })
            .collect();
        let diagram = PresheafDiagram { shape: el.cat.clone(), objects, maps };
        let col = Arc::new(colimit_presheaves(&diagram, self.inner.source_base()).expect("arities share a base"));
        self.cache.lock().unwrap().insert((c, op.clone()), col.clone());
        col
    }
}

impl Family for CompositeRep {
    fn name(&self) -> String {
        format!("{}∘{}", self.outer.name(), self.inner.name())
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        self.inner.source_base()
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        self.outer.target_base()
    }
    fn ops(&self, c: usize, bound: usize) -> Vec<Op> {
        let inner = ops_presheaf(self.inner.as_ref(), bound).expect("inner operations are closed under restriction");
        let mut out = Vec::new();
        for t in self.outer.ops(c, bound) {
            let et = self.outer.arity(c, &t);
            for f in hom_set(&et, &inner.ps).expect("bases match") {
                let labels = f.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&k| inner.ops[d][k].clone()).collect()).collect();
                out.push(Op::comp(t.clone(), labels));
            }
        }
        out
    }
    fn grade(&self, c: usize, op: &Op) -> usize {
        let (t, f) = op.split().expect("composite operation");
        let mut g = self.outer.grade(c, t);
        for (d, cells) in f.iter().enumerate() {
            for s in cells {
                g = g.max(self.inner.grade(d, s));
            }
        }
        g
    }
    fn beyond(&self, bound: usize) -> Beyond {
        match (self.outer.beyond(bound), self.inner.beyond(bound)) {
            (Beyond::Nothing, Beyond::Nothing) => Beyond::Nothing,
            _ => Beyond::Unknown,
        }
    }
    fn arity(&self, c: usize, op: &Op) -> Presheaf {
        self.colimit(c, op).apex.clone()
    }
    fn restrict(&self, i: usize, op: &Op) -> Op {
        let (t, f) = op.split().expect("composite operation");
        let eit = self.outer.arity_map(i, t);
        let nf = eit.comps.iter().enumerate().map(|(d, v)| v.iter().map(|&x| f[d][x].clone()).collect()).collect();
        Op::comp(self.outer.restrict(i, t), nf)
    }
    fn arity_map(&self, i: usize, op: &Op) -> PresheafMorphism {
        let c = self.outer.target_base();
        let (t, _) = op.split().expect("composite operation");
        let src_op = self.restrict(i, op);
        let src = self.colimit(c.src(i), &src_op);
        let dst = self.colimit(c.dst(i), op);
        let eit = self.outer.arity_map(i, t);
        let et_src = self.outer.arity(c.src(i), &self.outer.restrict(i, t));
        let et = self.outer.arity(c.dst(i), t);
        let comps = src
            .reps
            .iter()
            .enumerate()
            .map(|(e, reps)| {
                reps.iter()
                    .map(|&(j, w)| {
                        let (d, x) = element_of(&et_src, j);
                        let jj = element_index(&et, d, eit.comps[d][x]);
                        dst.injections[jj].comps[e][w]
                    })
                    .collect()
            })
            .collect();
        PresheafMorphism { comps }
    }
    fn as_composite(&self) -> Option<&CompositeRep> {
        Some(self)
    }
}

/// Compose representations; `bound` truncates the operations checked for closure.
pub fn compose(outer: FamRep, inner: FamRep, bound: usize) -> Result<FamRep> {
    if !same_base(outer.source_base(), inner.target_base()) {
        return Err(FamError::BaseMismatch);
    }
    let rep = composite_unchecked(outer, inner, bound);
    ops_presheaf(rep.as_ref(), bound)?;
    let rep: FamRep = rep;
    Ok(rep)
}

/// The composite without the closure check at `bound`.
pub fn composite_unchecked(outer: FamRep, inner: FamRep, bound: usize) -> Arc<CompositeRep> {
    Arc::new(CompositeRep { outer, inner, bound, cache: Mutex::new(HashMap::new()) })
}

/// An element of `TX_c`: an operation with a filling `Et → X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationCell {
    pub op: Op,
    pub fill: PresheafMorphism,
}

/// `TX` with the operation cell behind every element.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub tx: Presheaf,
    pub cells: Vec<Vec<OperationCell>>,
    pub index: Vec<HashMap<OperationCell, usize>>,
    pub exact: bool,
}

impl Evaluation {
    pub fn lookup(&self, c: usize, cell: &OperationCell) -> Option<usize> {
        self.index[c].get(cell).copied()
    }

    /// Assemble from explicit cells; the action is `(t, f) ↦ (S_i t, f ∘ E(i_t))`.
    pub fn from_cells(rep: &dyn Family, cells: Vec<Vec<OperationCell>>, exact: bool) -> Result<Self> {
        let base = rep.target_base().clone();
        let index: Vec<HashMap<OperationCell, usize>> =
            cells.iter().map(|v| v.iter().cloned().enumerate().map(|(k, oc)| (oc, k)).collect()).collect();
        let mut action = Vec::with_capacity(base.n_morphisms());
        for (i, m) in base.morphisms().iter().enumerate() {
            let mut row = Vec::with_capacity(cells[m.dst].len());
            let mut memo: HashMap<Op, (Op, PresheafMorphism)> = HashMap::new();
            for oc in &cells[m.dst] {
                let (st, eit) = memo
                    .entry(oc.op.clone())
                    .or_insert_with(|| (rep.restrict(i, &oc.op), rep.arity_map(i, &oc.op)))
                    .clone();
                let restricted = OperationCell { fill: eit.then(&oc.fill), op: st };
                match index[m.src].get(&restricted) {
                    Some(&k) => row.push(k),
                    None => {
                        return Err(FamError::BoundTooSmall(format!(
                            "restriction of a {} cell along {} leaves the enumerated cells",
                            oc.op, m.name
                        )))
                    }
                }
            }
            action.push(row);
        }
        let labels = cells.iter().map(|v| v.iter().enumerate().map(|(k, oc)| format!("{}[{k}]", oc.op)).collect()).collect();
        let sizes = cells.iter().map(Vec::len).collect();
        let tx = Presheaf::new(base, sizes, action)?.with_labels(labels);
        Ok(Evaluation { tx, cells, index, exact })
    }
}

/// `TX` truncated to operations of grade at most `arity_bound`, with an exactness flag.
pub fn evaluate(rep: &dyn Family, x: &Presheaf, arity_bound: usize) -> Result<Evaluation> {
    if !same_base(rep.source_base(), &x.base) {
        return Err(FamError::BaseMismatch);
    }
    let c = rep.target_base();
    let mut cells = Vec::with_capacity(c.n_objects());
    for d in 0..c.n_objects() {
        let mut here = Vec::new();
        for t in rep.ops(d, arity_bound) {
            let et = rep.arity(d, &t);
            for f in hom_set(&et, x)? {
                here.push(OperationCell { op: t.clone(), fill: f });
            }
        }
        cells.push(here);
    }
    let exact = match rep.beyond(arity_bound) {
        Beyond::Nothing => true,
        Beyond::Probes(ps) => {
            let mut none = true;
            for (d, t) in ps {
                if has_hom(&rep.arity(d, &t), x)? {
                    none = false;
                    break;
                }
            }
            none
        }
        Beyond::Unknown => false,
    };
    Evaluation::from_cells(rep, cells, exact)
}

/// `T(h)`: `(t, f) ↦ (t, h ∘ f)`.
pub fn map_cells(tx: &Evaluation, ty: &Evaluation, h: &PresheafMorphism) -> Result<PresheafMorphism> {
    transform_cells(tx, ty, &|_, oc| Some(OperationCell { op: oc.op.clone(), fill: oc.fill.then(h) }))
}

/// Tabulate a cellwise map between evaluations.
pub fn transform_cells(
    src: &Evaluation,
    dst: &Evaluation,
    f: &dyn Fn(usize, &OperationCell) -> Option<OperationCell>,
) -> Result<PresheafMorphism> {
    let mut comps = Vec::with_capacity(src.cells.len());
    for (c, cells) in src.cells.iter().enumerate() {
        let mut comp = Vec::with_capacity(cells.len());
        for oc in cells {
            let image = f(c, oc).ok_or_else(|| FamError::BoundTooSmall(format!("no image for a {} cell", oc.op)))?;
            let k = dst
                .lookup(c, &image)
                .ok_or_else(|| FamError::BoundTooSmall(format!("image {} of a {} cell is not enumerated", image.op, oc.op)))?;
            comp.push(k);
        }
        comps.push(comp);
    }
    Ok(PresheafMorphism { comps })
}

/// A morphism of representations: `φ_S` and isomorphisms `φ_E(t): E t → E′(φ_S t)`,
/// tabulated on the operations of grade at most `bound`.
#[derive(Clone)]
pub struct RepMorphism {
    pub source: FamRep,
    pub target: FamRep,
    pub bound: usize,
    pub components: Vec<HashMap<Op, (Op, PresheafMorphism)>>,
}

impl RepMorphism {
    pub fn identity(rep: &FamRep, bound: usize) -> Self {
        let components = (0..rep.target_base().n_objects())
            .map(|c| {
                rep.ops(c, bound)
                    .into_iter()
                    .map(|t| {
                        let id = PresheafMorphism::identity(&rep.arity(c, &t));
                        (t.clone(), (t, id))
                    })
                    .collect()
            })
            .collect();
        RepMorphism { source: rep.clone(), target: rep.clone(), bound, components }
    }

    /// Naturality of `φ_S` and `φ_E`, and invertibility of every `φ_E(t)`.
    pub fn check(&self) -> Report {
        let mut r = Report::new("rep_morphism");
        let c = self.source.target_base().clone();
        for d in 0..c.n_objects() {
            for (t, (pt, pe)) in &self.components[d] {
                let (e, e2) = (self.source.arity(d, t), self.target.arity(d, pt));
                r.absorb(pe.check_natural(&e, &e2));
                r.check(pe.inverse().is_some() && e.sizes == e2.sizes, || format!("φ_E at {t}"), || "not invertible".into());
            }
        }
        for i in 0..c.n_morphisms() {
            for (t, (pt, pe)) in &self.components[c.dst(i)] {
                let st = self.source.restrict(i, t);
                let Some((pst, pse)) = self.components[c.src(i)].get(&st) else {
                    r.fail(format!("{} at {t}", c.morphism(i).name), "restriction outside the tabulated operations");
                    continue;
                };
                r.check(
                    *pst == self.target.restrict(i, pt),
                    || format!("φ_S natural along {} at {t}", c.morphism(i).name),
                    || format!("{pst} vs {}", self.target.restrict(i, pt)),
                );
                let lhs = pse.then(&self.target.arity_map(i, pt));
                let rhs = self.source.arity_map(i, t).then(pe);
                r.check(lhs == rhs, || format!("φ_E natural along {} at {t}", c.morphism(i).name), || "squares differ".into());
            }
        }
        r
    }
}

/// `(t, f) ↦ (φ_S t, f ∘ φ_E(t)⁻¹)`.
pub fn apply_rep_morphism(phi: &RepMorphism, tx: &Evaluation, t2x: &Evaluation) -> Result<PresheafMorphism> {
    let mut inv: HashMap<(usize, Op), PresheafMorphism> = HashMap::new();
    for (c, m) in phi.components.iter().enumerate() {
        for (t, (_, pe)) in m {
            let i = pe.inverse().ok_or_else(|| FamError::Malformed(format!("φ_E at {t} is not invertible")))?;
            inv.insert((c, t.clone()), i);
        }
    }
    transform_cells(tx, t2x, &|c, oc| {
        let (pt, _) = phi.components[c].get(&oc.op)?;
        let i = inv.get(&(c, oc.op.clone()))?;
        Some(OperationCell { op: pt.clone(), fill: i.then(&oc.fill) })
    })
}

/// One naturality square family of a transformation `α: T → T′` along `h: X → Y`.
#[derive(Debug, Clone)]
pub struct TransformationSample {
    pub name: String,
    pub sizes: [Vec<usize>; 4],
    /// `T h`
    pub top: PresheafMorphism,
    /// `α_X`
    pub left: PresheafMorphism,
    /// `α_Y`
    pub right: PresheafMorphism,
    /// `T′ h`
    pub bottom: PresheafMorphism,
}

impl TransformationSample {
    pub fn new(
        name: impl Into<String>,
        tx: &Presheaf,
        ty: &Presheaf,
        t2x: &Presheaf,
        t2y: &Presheaf,
        maps: [PresheafMorphism; 4],
    ) -> Self {
        let [top, left, right, bottom] = maps;
        TransformationSample {
            name: name.into(),
            sizes: [tx.sizes.clone(), ty.sizes.clone(), t2x.sizes.clone(), t2y.sizes.clone()],
            top,
            left,
            right,
            bottom,
        }
    }
}

/// Every naturality square must be a pullback.
pub fn check_cartesian(samples: &[TransformationSample]) -> Report {
    let mut r = Report::new("cartesian");
    for s in samples {
        for c in 0..s.sizes[0].len() {
            let sq = Square {
                sizes: [s.sizes[0][c], s.sizes[1][c], s.sizes[2][c], s.sizes[3][c]],
                top: s.top.comps[c].clone(),
                left: s.left.comps[c].clone(),
                right: s.right.comps[c].clone(),
                bottom: s.bottom.comps[c].clone(),
            };
            match pullback_defect(&sq) {
                Ok(None) => r.check(true, String::new, String::new),
                Ok(Some(w)) => r.check(false, || format!("{} at object {c}", s.name), || w),
                Err(e) => r.check(false, || format!("{} at object {c}", s.name), || e.to_string()),
            }
        }
    }
    r
}

fn composite(rep: &FamRep) -> Result<&CompositeRep> {
    rep.as_composite().ok_or_else(|| FamError::Malformed(format!("{} is not a composite", rep.name())))
}

/// `λ: identity ∘ rep ⇒ rep`, `(∗_c, t̄) ↦ t`.
pub fn left_unitor(rep: &FamRep, bound: usize) -> Result<RepMorphism> {
    let c = rep.target_base().clone();
    let src = compose(identity_rep(&c), rep.clone(), bound)?;
    let comp = composite(&src)?;
    let pos = hom_positions(&c);
    let mut components = Vec::new();
    for d in 0..c.n_objects() {
        let mut m = HashMap::new();
        for op in src.ops(d, bound) {
            let (_, f) = op.split().unwrap();
            let t = f[d][pos[c.id(d)]].clone();
            let col = comp.colimit(d, &op);
            let yd = Presheaf::representable(&c, d);
            let comps = col
                .reps
                .iter()
                .enumerate()
                .map(|(e, reps)| {
                    reps.iter()
                        .map(|&(j, w)| {
                            let (d2, k) = element_of(&yd, j);
                            let jm = c.hom(d2, d)[k];
                            rep.arity_map(jm, &t).comps[e][w]
                        })
                        .collect()
                })
                .collect();
            m.insert(op, (t, PresheafMorphism { comps }));
        }
        components.push(m);
    }
    Ok(RepMorphism { source: src, target: rep.clone(), bound, components })
}

/// `ρ: rep ∘ identity ⇒ rep`, `(t, !) ↦ t`.
pub fn right_unitor(rep: &FamRep, bound: usize) -> Result<RepMorphism> {
    let c2 = rep.source_base().clone();
    let src = compose(rep.clone(), identity_rep(&c2), bound)?;
    let comp = composite(&src)?;
    let mut components = Vec::new();
    for d in 0..rep.target_base().n_objects() {
        let mut m = HashMap::new();
        for op in src.ops(d, bound) {
            let t = op.split().unwrap().0.clone();
            let et = rep.arity(d, &t);
            let col = comp.colimit(d, &op);
            let comps = col
                .reps
                .iter()
                .enumerate()
                .map(|(e, reps)| {
                    reps.iter()
                        .map(|&(j, w)| {
                            let (d2, x) = element_of(&et, j);
                            let jm = c2.hom(e, d2)[w];
                            et.action[jm][x]
                        })
                        .collect()
                })
                .collect();
            m.insert(op, (t, PresheafMorphism { comps }));
        }
        components.push(m);
    }
    Ok(RepMorphism { source: src, target: rep.clone(), bound, components })
}

/// `α: (r1 r2) r3 ⇒ r1 (r2 r3)`, `((t, f), F) ↦ (t, x ↦ (f(x), F ∘ inj_x))`.
pub fn associator(r1: &FamRep, r2: &FamRep, r3: &FamRep, bound: usize) -> Result<RepMorphism> {
    let r12 = compose(r1.clone(), r2.clone(), bound)?;
    let r23 = compose(r2.clone(), r3.clone(), bound)?;
    let src = compose(r12.clone(), r3.clone(), bound)?;
    let tgt = compose(r1.clone(), r23.clone(), bound)?;
    let (c12, c23, csrc, ctgt) = (composite(&r12)?, composite(&r23)?, composite(&src)?, composite(&tgt)?);
    let mut components = Vec::new();
    for d in 0..r1.target_base().n_objects() {
        let mut m = HashMap::new();
        for op in src.ops(d, bound) {
            let (tf, big_f) = op.split().unwrap();
            let (t, f) = tf.split().unwrap();
            let et = r1.arity(d, t);
            let ee = c12.colimit(d, tf);
            // G(x) = (f(x), F ∘ inj_x)
            let g: Vec<Vec<Op>> = (0..et.sizes.len())
                .map(|e| {
                    (0..et.sizes[e])
                        .map(|x| {
                            let inj = &ee.injections[element_index(&et, e, x)];
                            let fx = inj
                                .comps
                                .iter()
                                .enumerate()
                                .map(|(e2, v)| v.iter().map(|&y| big_f[e2][y].clone()).collect())
                                .collect();
                            Op::comp(f[e][x].clone(), fx)
                        })
                        .collect()
                })
                .collect();
            let top = Op::comp(t.clone(), g.clone());
            let col_src = csrc.colimit(d, &op);
            let col_tgt = ctgt.colimit(d, &top);
            let ee_apex = &ee.apex;
            let comps = col_src
                .reps
                .iter()
                .enumerate()
                .map(|(e3, reps)| {
                    reps.iter()
                        .map(|&(jv, w)| {
                            let (e2, v) = element_of(ee_apex, jv);
                            let (jx, y) = ee.reps[e2][v];
                            let (e, x) = element_of(&et, jx);
                            let e2fx = r2.arity(e, &f[e][x]);
                            let inner = c23.colimit(e, &g[e][x]);
                            let u = inner.injections[element_index(&e2fx, e2, y)].comps[e3][w];
                            col_tgt.injections[jx].comps[e3][u]
                        })
                        .collect()
                })
                .collect();
            m.insert(op, (top, PresheafMorphism { comps }));
        }
        components.push(m);
    }
    Ok(RepMorphism { source: src, target: tgt, bound, components })
}

/// Search for an isomorphism of representations on the operations up to `bound`.
/// `φ_E(t)` is taken to be the first arity isomorphism compatible with the
/// faces already chosen, which is exhaustive when arities are rigid.
pub fn find_rep_iso(r1: &FamRep, r2: &FamRep, bound: usize) -> Result<Option<RepMorphism>> {
    if !same_base(r1.target_base(), r2.target_base()) || !same_base(r1.source_base(), r2.source_base()) {
        return Err(FamError::BaseMismatch);
    }
    let (p1, p2) = (ops_presheaf(r1.as_ref(), bound)?, ops_presheaf(r2.as_ref(), bound)?);
    if p1.ps.sizes != p2.ps.sizes {
        return Ok(None);
    }
    let a1: Vec<Vec<Presheaf>> = p1.ops.iter().enumerate().map(|(c, v)| v.iter().map(|t| r1.arity(c, t)).collect()).collect();
    let a2: Vec<Vec<Presheaf>> = p2.ops.iter().enumerate().map(|(c, v)| v.iter().map(|t| r2.arity(c, t)).collect()).collect();
    let cache: std::cell::RefCell<HashMap<(usize, usize, usize), Option<PresheafMorphism>>> = Default::default();
    let iso = |c: usize, k: usize, k2: usize| -> Option<PresheafMorphism> {
        if let Some(v) = cache.borrow().get(&(c, k, k2)) {
            return v.clone();
        }
        let v = if a1[c][k].sizes == a2[c][k2].sizes { first_iso(&a1[c][k], &a2[c][k2]).ok().flatten() } else { None };
        cache.borrow_mut().insert((c, k, k2), v.clone());
        v
    };
    let cbase = r1.target_base().clone();
    let mut found = None;
    crate::presheaf::visit_homs(&p1.ps, &p2.ps, &|c, k, k2| iso(c, k, k2).is_some(), true, &mut |phi| {
        let components: Vec<HashMap<Op, (Op, PresheafMorphism)>> = (0..cbase.n_objects())
            .map(|c| {
                (0..p1.ops[c].len())
                    .map(|k| {
                        let k2 = phi.comps[c][k];
                        (p1.ops[c][k].clone(), (p2.ops[c][k2].clone(), iso(c, k, k2).unwrap()))
                    })
                    .collect()
            })
            .collect();
        let m = RepMorphism { source: r1.clone(), target: r2.clone(), bound, components };
        if m.check().passed() {
            found = Some(m);
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// The comparison `(SS′)X ≅ S(S′X)`: `((t, f), g) ↦ (t, x ↦ (f(x), g ∘ inj_x))`.
pub fn composite_comparison(
    comp: &FamRep,
    ev_comp: &Evaluation,
    ev_inner: &Evaluation,
    ev_outer: &Evaluation,
) -> Result<PresheafMorphism> {
    let cr = composite(comp)?;
    transform_cells(ev_comp, ev_outer, &|c, oc| {
        let (t, f) = oc.op.split()?;
        let et = cr.outer.arity(c, t);
        let col = cr.colimit(c, &oc.op);
        let comps = (0..et.sizes.len())
            .map(|e| {
                (0..et.sizes[e])
                    .map(|x| {
                        let inj = &col.injections[element_index(&et, e, x)];
                        let inner = OperationCell { op: f[e][x].clone(), fill: inj.then(&oc.fill) };
                        ev_inner.lookup(e, &inner)
                    })
                    .collect::<Option<Vec<usize>>>()
            })
            .collect::<Option<Vec<Vec<usize>>>>()?;
        Some(OperationCell { op: t.clone(), fill: PresheafMorphism { comps } })
    })
}

/// Check that a tabulated map between presheaves is a natural bijection.
pub fn check_natural_iso(name: &str, m: &PresheafMorphism, x: &Presheaf, y: &Presheaf) -> Report {
    let mut r = Report::new(name);
    r.absorb(m.check_natural(x, y));
    r.check(m.inverse().is_some() && x.sizes == y.sizes, || "components".into(), || "not bijective".into());
    r
}

/// All fillings of an operation's arity landing in the given cells.
pub fn fillings_over(et: &Presheaf, x: &Presheaf, allowed: &dyn Fn(usize, usize, usize) -> bool) -> Result<Vec<PresheafMorphism>> {
    hom_set_filtered(et, x, allowed, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{find_isos, graph, path};

    fn free_cat() -> FamRep {
        Arc::new(FreeCategoryRep::new())
    }

    /// Directed paths in a DAG, including the empty ones.
    fn path_count_oracle(n_vertices: usize, edges: &[(usize, usize)], max_len: usize) -> (usize, usize) {
        let mut total = n_vertices;
        let mut frontier: Vec<usize> = (0..n_vertices).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for &v in &frontier {
                for &(s, t) in edges {
                    if s == v {
                        next.push(t);
                    }
                }
            }
            total += next.len();
            frontier = next;
        }
        (n_vertices, total)
    }

    #[test]
    fn free_category_on_path2() {
        let ev = evaluate(free_cat().as_ref(), &path(2), 4).unwrap();
        assert_eq!(ev.tx.sizes, vec![3, 6]);
        assert_eq!(path_count_oracle(3, &[(0, 1), (1, 2)], 4), (3, 6));
        assert!(ev.exact);
        assert!(ev.tx.check().passed());
        let ev1 = evaluate(free_cat().as_ref(), &path(2), 1).unwrap();
        assert!(!ev1.exact);
    }

    #[test]
    fn identity_rep_evaluates_to_x() {
        let x = graph(3, &[(0, 1), (1, 1), (2, 0)]);
        let id = identity_rep(&crate::fincat::g1());
        assert!(check_rep(id.as_ref(), 3).passed());
        let ev = evaluate(id.as_ref(), &x, 0).unwrap();
        assert!(ev.exact);
        assert!(!find_isos(&ev.tx, &x).unwrap().is_empty());
    }

    #[test]
    fn free_monoid_word_count() {
        let m = FreeMonoidRep::new();
        let x = m.set(2);
        let ev = evaluate(&m, &x, 3).unwrap();
        // words over two letters of length ≤ 3
        let oracle: usize = (0..=3).map(|k| 2usize.pow(k)).sum();
        assert_eq!(ev.tx.sizes, vec![oracle]);
        assert_eq!(oracle, 15);
    }

    #[test]
    fn map_cells_functorial_and_injective_on_inclusion() {
        let fc = free_cat();
        let (p1, p2) = (path(1), path(2));
        let incl = PresheafMorphism { comps: vec![vec![0, 1], vec![0]] };
        let (e1, e2) = (evaluate(fc.as_ref(), &p1, 3).unwrap(), evaluate(fc.as_ref(), &p2, 3).unwrap());
        let m = map_cells(&e1, &e2, &incl).unwrap();
        assert!(m.is_injective());
        assert!(m.check_natural(&e1.tx, &e2.tx).passed());
        let id = map_cells(&e2, &e2, &PresheafMorphism::identity(&p2)).unwrap();
        assert_eq!(id, PresheafMorphism::identity(&e2.tx));
        // constant map onto a loop: surjective onto loop walks of each length ≤ 3
        let lp = graph(1, &[(0, 0)]);
        let el = evaluate(fc.as_ref(), &lp, 3).unwrap();
        let to_loop = PresheafMorphism { comps: vec![vec![0, 0, 0], vec![0, 0]] };
        let m2 = map_cells(&e2, &el, &to_loop).unwrap();
        let image: std::collections::HashSet<usize> = m2.comps[1].iter().copied().collect();
        assert_eq!(image.len(), 3); // lengths 0, 1, 2 are hit; length 3 is not
        assert_eq!(el.tx.sizes[1], 4);
    }

    #[test]
    fn composite_of_free_category_glues_paths() {
        let fc = free_cat();
        let ff = compose(fc.clone(), fc.clone(), 3).unwrap();
        let op = Op::comp(Op::nat(2), vec![vec![Op::nat(0); 3], vec![Op::nat(1), Op::nat(3)]]);
        let a = ff.arity(1, &op);
        assert_eq!(find_isos(&a, &path(4)).unwrap().len(), 1);
        assert!(check_rep(ff.as_ref(), 2).passed());
    }

    #[test]
    fn composite_of_free_monoid_is_sum() {
        let fm: FamRep = Arc::new(FreeMonoidRep::new());
        let mm = compose(fm.clone(), fm.clone(), 3).unwrap();
        let op = Op::comp(Op::nat(3), vec![vec![Op::nat(1), Op::nat(0), Op::nat(2)]]);
        assert_eq!(mm.arity(0, &op).sizes, vec![3]);
    }

    #[test]
    fn composite_evaluation_matches_iterated() {
        let fc = free_cat();
        let ff = compose(fc.clone(), fc.clone(), 2).unwrap();
        let x = path(2);
        let ev_c = evaluate(ff.as_ref(), &x, 2).unwrap();
        let ev_i = evaluate(fc.as_ref(), &x, 2).unwrap();
        let ev_o = evaluate(fc.as_ref(), &ev_i.tx, 2).unwrap();
        let m = composite_comparison(&ff, &ev_c, &ev_i, &ev_o).unwrap();
        assert!(check_natural_iso("comparison", &m, &ev_c.tx, &ev_o.tx).passed());
    }

    #[test]
    fn unitors_and_associator_are_valid() {
        let fc = free_cat();
        let l = left_unitor(&fc, 3).unwrap();
        assert!(l.check().passed());
        let key = Op::comp(Op::Elt(0), vec![vec![Op::nat(0), Op::nat(0)], vec![Op::nat(3)]]);
        assert_eq!(l.components[1][&key].0, Op::nat(3));
        let r = right_unitor(&fc, 3).unwrap();
        assert!(r.check().passed());
        let a = associator(&fc, &fc, &fc, 2).unwrap();
        assert!(a.check().passed());
    }

    #[test]
    fn unitors_agree_on_identity() {
        let id = identity_rep(&crate::fincat::g1());
        let l = left_unitor(&id, 1).unwrap();
        let r = right_unitor(&id, 1).unwrap();
        for c in 0..2 {
            for (op, (t, e)) in &l.components[c] {
                let (t2, e2) = &r.components[c][op];
                assert_eq!((t, e), (t2, e2));
            }
        }
    }

    #[test]
    fn apply_identity_and_unit_inclusion() {
        let fc = free_cat();
        let x = path(2);
        let ev = evaluate(fc.as_ref(), &x, 3).unwrap();
        let id = apply_rep_morphism(&RepMorphism::identity(&fc, 3), &ev, &ev).unwrap();
        assert_eq!(id, PresheafMorphism::identity(&ev.tx));
        // the unit inclusion identity_rep → free category: ∗_0 ↦ 0, ∗_1 ↦ 1
        let idr = identity_rep(&crate::fincat::g1());
        let components = (0..2)
            .map(|c| {
                let t = Op::nat(c);
                let e = if c == 0 {
                    PresheafMorphism { comps: vec![vec![0], vec![]] }
                } else {
                    PresheafMorphism { comps: vec![vec![0, 1], vec![0]] }
                };
                let mut m = HashMap::new();
                m.insert(Op::Elt(0), (t, e));
                m
            })
            .collect();
        let phi = RepMorphism { source: idr.clone(), target: fc.clone(), bound: 3, components };
        assert!(phi.check().passed(), "{:?}", phi.check().failures);
        let ev_id = evaluate(idr.as_ref(), &x, 3).unwrap();
        let inc = apply_rep_morphism(&phi, &ev_id, &ev).unwrap();
        assert!(inc.is_injective());
        assert_eq!(ev_id.tx.sizes, vec![3, 2]);
        assert_eq!(ev.tx.sizes, vec![3, 6]);
    }

    #[test]
    fn rep_iso_search_finds_unitor_shape() {
        let fc = free_cat();
        let l = compose(identity_rep(&crate::fincat::g1()), fc.clone(), 2).unwrap();
        assert!(find_rep_iso(&l, &fc, 2).unwrap().is_some());
    }
}
