//! Finite presheaves, natural transformations, and the (co)limit and Hom
//! toolkit: backtracking enumeration of natural transformations, pointwise
//! colimits by union-find, categories of elements, isomorphism search,
//! pullback checks and limits of finite set diagrams.

use std::sync::Arc;

use crate::error::{FamError, Result};
use crate::fincat::{FinCategory, Morphism};
use crate::report::Report;

const UNSET: usize = usize::MAX;

/// A contravariant functor from `base` to finite sets. Cells at `c` are `0..sizes[c]`;
/// a morphism `i: c' → c` acts by `action[i]: X_c → X_{c'}`.
#[derive(Debug, Clone)]
pub struct Presheaf {
    pub base: Arc<FinCategory>,
    pub sizes: Vec<usize>,
    pub action: Vec<Vec<usize>>,
    /// Optional display labels; empty means cells are shown by index.
    pub labels: Vec<Vec<String>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        same_base(&self.base, &other.base) && self.sizes == other.sizes && self.action == other.action
    }
}

pub fn same_base(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Presheaf {
    /// Build without checking functoriality; see [`Presheaf::check`].
    pub fn new(base: Arc<FinCategory>, sizes: Vec<usize>, action: Vec<Vec<usize>>) -> Result<Self> {
        if sizes.len() != base.n_objects() || action.len() != base.n_morphisms() {
            return Err(FamError::Malformed("presheaf shape does not match its base".into()));
        }
        for (i, m) in base.morphisms().iter().enumerate() {
            if action[i].len() != sizes[m.dst] || action[i].iter().any(|&v| v >= sizes[m.src]) {
                return Err(FamError::Malformed(format!("action of {} is not a function", m.name)));
            }
        }
        Ok(Presheaf { base, sizes, action, labels: Vec::new() })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = labels;
        self
    }

    pub fn empty(base: &Arc<FinCategory>) -> Self {
        let action = base.morphisms().iter().map(|_| Vec::new()).collect();
        Presheaf { base: base.clone(), sizes: vec![0; base.n_objects()], action, labels: Vec::new() }
    }

    /// The terminal presheaf `*`.
    pub fn terminal(base: &Arc<FinCategory>) -> Self {
        let action = base.morphisms().iter().map(|_| vec![0]).collect();
        Presheaf { base: base.clone(), sizes: vec![1; base.n_objects()], action, labels: Vec::new() }
    }

    /// The representable `y(c)`; its cells at `d` are the morphisms `d → c` in hom order.
    pub fn representable(base: &Arc<FinCategory>, c: usize) -> Self {
        let k = base.n_objects();
        let sizes = (0..k).map(|d| base.hom(d, c).len()).collect();
        let pos = hom_positions(base);
        let action = base
            .morphisms()
            .iter()
            .enumerate()
            .map(|(i, m)| base.hom(m.dst, c).iter().map(|&j| pos[base.compose(j, i)]).collect())
            .collect();
        let labels = (0..k)
            .map(|d| base.hom(d, c).iter().map(|&j| base.morphism(j).name.clone()).collect())
            .collect();
        Presheaf { base: base.clone(), sizes, action, labels }
    }

    pub fn n_cells(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn restrict(&self, i: usize, x: usize) -> usize {
        self.action[i][x]
    }

    pub fn label(&self, c: usize, x: usize) -> String {
        self.labels
            .get(c)
            .and_then(|l| l.get(x))
            .cloned()
            .unwrap_or_else(|| format!("{}#{}", self.base.object_name(c), x))
    }

    /// Functoriality: identities act trivially and `X_{g∘f} = X_f ∘ X_g`.
    pub fn check(&self) -> Report {
        let b = &self.base;
        let mut r = Report::new("presheaf_functoriality");
        for c in 0..b.n_objects() {
            let id = b.id(c);
            for x in 0..self.sizes[c] {
                r.check(self.action[id][x] == x, || format!("id_{} at {}", b.object_name(c), x), || "identity moves a cell".into());
            }
        }
        for g in 0..b.n_morphisms() {
            for f in 0..b.n_morphisms() {
                let Some(gf) = b.try_compose(g, f) else { continue };
                for x in 0..self.sizes[b.dst(g)] {
                    let lhs = self.action[gf][x];
                    let rhs = self.action[f][self.action[g][x]];
                    r.check(
                        lhs == rhs,
                        || format!("{} ∘ {} at cell {}", b.morphism(g).name, b.morphism(f).name, self.label(b.dst(g), x)),
                        || format!("{} vs {}", lhs, rhs),
                    );
                }
            }
        }
        r
    }
}

/// `pos[j]` is the position of `j` inside its hom-set.
pub fn hom_positions(base: &FinCategory) -> Vec<usize> {
    let mut pos = vec![0; base.n_morphisms()];
    for a in 0..base.n_objects() {
        for b in 0..base.n_objects() {
            for (k, &j) in base.hom(a, b).iter().enumerate() {
                pos[j] = k;
            }
        }
    }
    pos
}

/// A natural transformation, given by its components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresheafMorphism {
    pub comps: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn identity(x: &Presheaf) -> Self {
        PresheafMorphism { comps: x.sizes.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn apply(&self, c: usize, x: usize) -> usize {
        self.comps[c][x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PresheafMorphism) -> PresheafMorphism {
        PresheafMorphism {
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(c, comp)| comp.iter().map(|&v| other.comps[c][v]).collect())
                .collect(),
        }
    }

    /// Inverse of a componentwise bijection.
    pub fn inverse(&self) -> Option<PresheafMorphism> {
        let mut comps = Vec::with_capacity(self.comps.len());
        for comp in &self.comps {
            let mut inv = vec![UNSET; comp.len()];
            for (x, &y) in comp.iter().enumerate() {
                if y >= inv.len() || inv[y] != UNSET {
                    return None;
                }
                inv[y] = x;
            }
            comps.push(inv);
        }
        Some(PresheafMorphism { comps })
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(|comp| {
            let mut seen = std::collections::HashSet::new();
            comp.iter().all(|v| seen.insert(*v))
        })
    }

    /// Every naturality square, exhaustively.
    pub fn check_natural(&self, x: &Presheaf, y: &Presheaf) -> Report {
        let b = &x.base;
        let mut r = Report::new("naturality");
        if !same_base(&x.base, &y.base) || self.comps.len() != b.n_objects() {
            r.fail("shape", "base mismatch");
            return r;
        }
        for c in 0..b.n_objects() {
            if self.comps[c].len() != x.sizes[c] || self.comps[c].iter().any(|&v| v >= y.sizes[c]) {
                r.fail(format!("component at {}", b.object_name(c)), "not a function between the cell sets");
                return r;
            }
        }
        for (i, m) in b.morphisms().iter().enumerate() {
            for cell in 0..x.sizes[m.dst] {
                let lhs = self.comps[m.src][x.action[i][cell]];
                let rhs = y.action[i][self.comps[m.dst][cell]];
                r.check(
                    lhs == rhs,
                    || format!("{} at {}", m.name, x.label(m.dst, cell)),
                    || format!("{} vs {}", y.label(m.src, lhs), y.label(m.src, rhs)),
                );
            }
        }
        r
    }
}

/// Candidate filter for [`hom_set_filtered`]: `(object, source cell, target cell)`.
pub type CellFilter<'a> = &'a dyn Fn(usize, usize, usize) -> bool;

/// All natural transformations `x → y`, deterministically ordered.
pub fn hom_set(x: &Presheaf, y: &Presheaf) -> Result<Vec<PresheafMorphism>> {
    hom_set_filtered(x, y, &|_, _, _| true, false)
}

/// Natural transformations whose cell assignments all pass `allowed`;
/// with `injective`, only componentwise injections.
pub fn hom_set_filtered(x: &Presheaf, y: &Presheaf, allowed: CellFilter, injective: bool) -> Result<Vec<PresheafMorphism>> {
    let mut out = Vec::new();
    visit_homs(x, y, allowed, injective, &mut |m| {
        out.push(m.clone());
        true
    })?;
    Ok(out)
}

/// Count natural transformations without storing them.
pub fn count_homs(x: &Presheaf, y: &Presheaf) -> Result<usize> {
    let mut n = 0;
    visit_homs(x, y, &|_, _, _| true, false, &mut |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

/// Whether at least one natural transformation `x → y` exists.
pub fn has_hom(x: &Presheaf, y: &Presheaf) -> Result<bool> {
    let mut found = false;
    visit_homs(x, y, &|_, _, _| true, false, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

struct HomSearch<'a> {
    x: &'a Presheaf,
    y: &'a Presheaf,
    allowed: CellFilter<'a>,
    injective: bool,
    cells: Vec<(usize, usize)>,
    assign: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize)>,
    /// `into[c]` lists the morphisms with target `c`.
    into: Vec<Vec<usize>>,
}

impl HomSearch<'_> {
    fn set(&mut self, c: usize, cell: usize, v: usize) -> bool {
        let cur = self.assign[c][cell];
        if cur != UNSET {
            return cur == v;
        }
        if !(self.allowed)(c, cell, v) || (self.injective && self.used[c][v]) {
            return false;
        }
        self.assign[c][cell] = v;
        if self.injective {
            self.used[c][v] = true;
        }
        self.trail.push((c, cell));
        true
    }

    fn assign_with_faces(&mut self, c: usize, cell: usize, v: usize) -> bool {
        if !self.set(c, cell, v) {
            return false;
        }
        for k in 0..self.into[c].len() {
            let i = self.into[c][k];
            let src = self.x.base.src(i);
            let (xc, yc) = (self.x.action[i][cell], self.y.action[i][v]);
            if !self.set(src, xc, yc) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, cell) = self.trail.pop().unwrap();
            if self.injective {
                self.used[c][self.assign[c][cell]] = false;
            }
            self.assign[c][cell] = UNSET;
        }
    }

    fn run(&mut self, pos: usize, emit: &mut dyn FnMut(&PresheafMorphism) -> bool) -> bool {
        let mut pos = pos;
        while pos < self.cells.len() && self.assign[self.cells[pos].0][self.cells[pos].1] != UNSET {
            pos += 1;
        }
        if pos == self.cells.len() {
            return emit(&PresheafMorphism { comps: self.assign.clone() });
        }
        let (c, cell) = self.cells[pos];
        for v in 0..self.y.sizes[c] {
            let mark = self.trail.len();
            if self.assign_with_faces(c, cell, v) && !self.run(pos + 1, emit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }
}

/// Backtracking enumeration; `emit` returns false to stop early.
pub fn visit_homs(
    x: &Presheaf,
    y: &Presheaf,
    allowed: CellFilter,
    injective: bool,
    emit: &mut dyn FnMut(&PresheafMorphism) -> bool,
) -> Result<()> {
    if !same_base(&x.base, &y.base) {
        return Err(FamError::BaseMismatch);
    }
    let b = &x.base;
    if injective && x.sizes.iter().zip(&y.sizes).any(|(a, c)| a > c) {
        return Ok(());
    }
    let order = b.objects_by_incoming();
    let cells = order.iter().flat_map(|&c| (0..x.sizes[c]).map(move |k| (c, k))).collect();
    let mut into = vec![Vec::new(); b.n_objects()];
    for (i, m) in b.morphisms().iter().enumerate() {
        if !b.is_identity(i) {
            into[m.dst].push(i);
        }
    }
    let mut s = HomSearch {
        x,
        y,
        allowed,
        injective,
        cells,
        assign: x.sizes.iter().map(|&n| vec![UNSET; n]).collect(),
        used: y.sizes.iter().map(|&n| vec![false; n]).collect(),
        trail: Vec::new(),
        into,
    };
    s.run(0, emit);
    Ok(())
}

/// All isomorphisms `x → y`.
pub fn find_isos(x: &Presheaf, y: &Presheaf) -> Result<Vec<PresheafMorphism>> {
    if !same_base(&x.base, &y.base) {
        return Err(FamError::BaseMismatch);
    }
    if x.sizes != y.sizes {
        return Ok(Vec::new());
    }
    hom_set_filtered(x, y, &|_, _, _| true, true)
}

/// The first isomorphism in enumeration order, if any.
pub fn first_iso(x: &Presheaf, y: &Presheaf) -> Result<Option<PresheafMorphism>> {
    if !same_base(&x.base, &y.base) {
        return Err(FamError::BaseMismatch);
    }
    if x.sizes != y.sizes {
        return Ok(None);
    }
    let mut found = None;
    visit_homs(x, y, &|_, _, _| true, true, &mut |m| {
        found = Some(m.clone());
        false
    })?;
    Ok(found)
}

pub fn is_rigid(x: &Presheaf) -> bool {
    let mut n = 0;
    visit_homs(x, x, &|_, _, _| true, true, &mut |_| {
        n += 1;
        n < 2
    })
    .expect("same base");
    n == 1
}

/// Disjoint-set forest whose roots are always the least member.
#[derive(Debug, Clone)]
pub struct LeastUnionFind {
    parent: Vec<usize>,
}

impl LeastUnionFind {
    pub fn new(n: usize) -> Self {
        LeastUnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Class index of every element, classes numbered by their least member.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut class = vec![UNSET; n];
        let mut count = 0;
        for a in 0..n {
            let r = self.find(a);
            if class[r] == UNSET {
                class[r] = count;
                count += 1;
            }
            class[a] = class[r];
        }
        (class, count)
    }
}

/// A diagram of presheaves over one base, indexed by `shape`.
#[derive(Debug, Clone)]
pub struct PresheafDiagram {
    pub shape: Arc<FinCategory>,
    pub objects: Vec<Presheaf>,
    /// One morphism `D_j → D_j'` per shape morphism `j → j'`.
    pub maps: Vec<PresheafMorphism>,
}

/// A colimit with its cocone and, for each apex cell, the least `(j, cell)` representing it.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub apex: Presheaf,
    pub injections: Vec<PresheafMorphism>,
    pub reps: Vec<Vec<(usize, usize)>>,
}

/// Pointwise colimit: disjoint union quotiented by the zigzag relation.
pub fn colimit_presheaves(d: &PresheafDiagram, base: &Arc<FinCategory>) -> Result<Colimit> {
    for x in &d.objects {
        if !same_base(&x.base, base) {
            return Err(FamError::BaseMismatch);
        }
    }
    let nj = d.objects.len();
    let k = base.n_objects();
    let mut sizes = vec![0; k];
    let mut injections: Vec<PresheafMorphism> = (0..nj).map(|_| PresheafMorphism { comps: vec![Vec::new(); k] }).collect();
    let mut reps = vec![Vec::new(); k];
    let mut labels = vec![Vec::new(); k];
    for c in 0..k {
        let mut offset = vec![0; nj + 1];
        for j in 0..nj {
            offset[j + 1] = offset[j] + d.objects[j].sizes[c];
        }
        let mut uf = LeastUnionFind::new(offset[nj]);
        for (u, m) in d.shape.morphisms().iter().enumerate() {
            if d.shape.is_identity(u) {
                continue;
            }
            for x in 0..d.objects[m.src].sizes[c] {
                uf.union(offset[m.src] + x, offset[m.dst] + d.maps[u].comps[c][x]);
            }
        }
        let (class, count) = uf.classes();
        sizes[c] = count;
        reps[c] = vec![(0, 0); count];
        let mut filled = vec![false; count];
        for j in 0..nj {
            injections[j].comps[c] = (0..d.objects[j].sizes[c]).map(|x| class[offset[j] + x]).collect();
            for x in 0..d.objects[j].sizes[c] {
                let cl = class[offset[j] + x];
                if !filled[cl] {
                    filled[cl] = true;
                    reps[c][cl] = (j, x);
                }
            }
        }
        labels[c] = reps[c]
            .iter()
            .map(|&(j, x)| format!("[{}:{}]", j, d.objects[j].label(c, x)))
            .collect();
    }
    let action = base
        .morphisms()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            (0..sizes[m.dst])
                .map(|cl| {
                    let (j, x) = reps[m.dst][cl];
                    injections[j].comps[m.src][d.objects[j].action[i][x]]
                })
                .collect()
        })
        .collect();
    let apex = Presheaf { base: base.clone(), sizes, action, labels };
    Ok(Colimit { apex, injections, reps })
}

/// Disjoint union of presheaves over one base, with its coprojections.
pub fn coproduct(xs: &[Presheaf], base: &Arc<FinCategory>) -> Result<Colimit> {
    let shape = Arc::new(FinCategory::discrete((0..xs.len()).map(|j| j.to_string()).collect()));
    let maps = xs.iter().map(PresheafMorphism::identity).collect();
    colimit_presheaves(&PresheafDiagram { shape, objects: xs.to_vec(), maps }, base)
}

/// Quotient by the smallest congruence identifying each given pair `(c, a, b)`.
pub fn quotient(x: &Presheaf, pairs: &[(usize, usize, usize)]) -> (Presheaf, PresheafMorphism) {
    let b = &x.base;
    let k = b.n_objects();
    let mut offset = vec![0; k + 1];
    for c in 0..k {
        offset[c + 1] = offset[c] + x.sizes[c];
    }
    let mut uf = LeastUnionFind::new(offset[k]);
    let mut pending: Vec<(usize, usize, usize)> = pairs.to_vec();
    while let Some((c, p, q)) = pending.pop() {
        let (rp, rq) = (uf.find(offset[c] + p), uf.find(offset[c] + q));
        if rp == rq {
            continue;
        }
        uf.union(rp, rq);
        for (i, m) in b.morphisms().iter().enumerate() {
            if m.dst == c && !b.is_identity(i) {
                pending.push((m.src, x.action[i][p], x.action[i][q]));
            }
        }
    }
    let mut comps = Vec::with_capacity(k);
    let mut sizes = vec![0; k];
    let mut reps = Vec::with_capacity(k);
    for c in 0..k {
        let mut local = std::collections::BTreeMap::new();
        let mut comp = Vec::with_capacity(x.sizes[c]);
        let mut rep = Vec::new();
        for cell in 0..x.sizes[c] {
            let r = uf.find(offset[c] + cell);
            let next = local.len();
            let cl = *local.entry(r).or_insert_with(|| {
                rep.push(cell);
                next
            });
            comp.push(cl);
        }
        sizes[c] = local.len();
        comps.push(comp);
        reps.push(rep);
    }
    let action = b
        .morphisms()
        .iter()
        .enumerate()
        .map(|(i, m)| reps[m.dst].iter().map(|&cell| comps[m.src][x.action[i][cell]]).collect())
        .collect();
    let labels = (0..k).map(|c| reps[c].iter().map(|&cell| x.label(c, cell)).collect()).collect();
    (Presheaf { base: b.clone(), sizes, action, labels }, PresheafMorphism { comps })
}

/// The category of elements `∫X` with its projection to the base.
#[derive(Debug, Clone)]
pub struct Elements {
    pub cat: Arc<FinCategory>,
    /// Object index of each element `(c, x)`.
    pub index: Vec<Vec<usize>>,
    /// `(c, x)` of each object.
    pub element: Vec<(usize, usize)>,
    /// Base morphism under each morphism of `∫X`.
    pub proj_mor: Vec<usize>,
    /// Morphism of `∫X` for base morphism `i` and a cell of `X` at its target.
    pub mor_index: Vec<Vec<usize>>,
}

impl Elements {
    pub fn proj_obj(&self, o: usize) -> usize {
        self.element[o].0
    }
}

/// `∫X`: objects `(c, x)`, and one morphism `i_x: (c', X_i x) → (c, x)` per `i: c' → c`.
pub fn category_of_elements(x: &Presheaf) -> Elements {
    let b = &x.base;
    let mut index = vec![Vec::new(); b.n_objects()];
    let mut element = Vec::new();
    let mut objects = Vec::new();
    for c in 0..b.n_objects() {
        for cell in 0..x.sizes[c] {
            index[c].push(element.len());
            element.push((c, cell));
            objects.push(format!("({},{})", b.object_name(c), x.label(c, cell)));
        }
    }
    // morphism id of (i, x) where x ∈ X_{dst i}
    let mut mor_id: Vec<Vec<usize>> = Vec::with_capacity(b.n_morphisms());
    let mut morphisms = Vec::new();
    let mut proj_mor = Vec::new();
    let mut target_cell = Vec::new();
    for (i, m) in b.morphisms().iter().enumerate() {
        let mut ids = Vec::with_capacity(x.sizes[m.dst]);
        for cell in 0..x.sizes[m.dst] {
            ids.push(morphisms.len());
            morphisms.push(Morphism {
                name: format!("{}@{}", m.name, x.label(m.dst, cell)),
                src: index[m.src][x.action[i][cell]],
                dst: index[m.dst][cell],
            });
            proj_mor.push(i);
            target_cell.push(cell);
        }
        mor_id.push(ids);
    }
    let identities = element.iter().map(|&(c, cell)| mor_id[b.id(c)][cell]).collect();
    let cat = FinCategory::from_fn(objects, morphisms, identities, |g, f| {
        mor_id[b.compose(proj_mor[g], proj_mor[f])][target_cell[g]]
    })
    .expect("category of elements");
    Elements { cat: Arc::new(cat), index, element, proj_mor, mor_index: mor_id }
}

/// `y(f): y(a) → y(b)` for `f: a → b`, with `pos` from [`hom_positions`].
pub fn representable_map(base: &FinCategory, pos: &[usize], f: usize) -> PresheafMorphism {
    let a = base.src(f);
    PresheafMorphism {
        comps: (0..base.n_objects()).map(|d| base.hom(d, a).iter().map(|&j| pos[base.compose(f, j)]).collect()).collect(),
    }
}

/// The colimit of `∫X → C → PSh(C)`, `(c, x) ↦ y(c)`, with the comparison
/// `[(c, x), g] ↦ X(g)(x)` from its apex to `X`.
pub fn coyoneda(x: &Presheaf) -> Result<(Colimit, PresheafMorphism)> {
    let base = &x.base;
    let el = category_of_elements(x);
    let pos = hom_positions(base);
    let objects = el.element.iter().map(|&(c, _)| Presheaf::representable(base, c)).collect();
    let maps = el.proj_mor.iter().map(|&i| representable_map(base, &pos, i)).collect();
    let col = colimit_presheaves(&PresheafDiagram { shape: el.cat.clone(), objects, maps }, base)?;
    let comps = (0..base.n_objects())
        .map(|d| {
            col.reps[d]
                .iter()
                .map(|&(j, k)| {
                    let (c, cell) = el.element[j];
                    x.action[base.hom(d, c)[k]][cell]
                })
                .collect()
        })
        .collect();
    Ok((col, PresheafMorphism { comps }))
}

/// A commuting square of finite sets:
/// `top: A → B`, `left: A → C`, `right: B → D`, `bottom: C → D`.
#[derive(Debug, Clone)]
pub struct Square {
    pub sizes: [usize; 4],
    pub top: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub bottom: Vec<usize>,
}

/// Why the comparison `A → B ×_D C` fails to be a bijection, or `None` for a pullback.
pub fn pullback_defect(sq: &Square) -> Result<Option<String>> {
    let [a, b, c, _] = sq.sizes;
    for x in 0..a {
        if sq.right[sq.top[x]] != sq.bottom[sq.left[x]] {
            return Err(FamError::NonCommutingSquare(format!("element {x} of the corner")));
        }
    }
    let mut hit = std::collections::HashMap::new();
    for x in 0..a {
        if let Some(prev) = hit.insert((sq.top[x], sq.left[x]), x) {
            return Ok(Some(format!("corner elements {prev} and {x} both map to ({}, {})", sq.top[x], sq.left[x])));
        }
    }
    for p in 0..b {
        for q in 0..c {
            if sq.right[p] == sq.bottom[q] && !hit.contains_key(&(p, q)) {
                return Ok(Some(format!("fiber-product element ({p}, {q}) is not hit")));
            }
        }
    }
    Ok(None)
}

pub fn is_pullback_square(sq: &Square) -> Result<bool> {
    pullback_defect(sq).map(|d| d.is_none())
}

/// A covariant diagram of finite sets.
#[derive(Debug, Clone)]
pub struct SetDiagram {
    pub shape: Arc<FinCategory>,
    pub sets: Vec<usize>,
    pub maps: Vec<Vec<usize>>,
}

impl SetDiagram {
    pub fn check(&self) -> Report {
        let s = &self.shape;
        let mut r = Report::new("set_diagram_functoriality");
        for g in 0..s.n_morphisms() {
            for f in 0..s.n_morphisms() {
                let Some(gf) = s.try_compose(g, f) else { continue };
                for x in 0..self.sets[s.src(f)] {
                    r.check(
                        self.maps[gf][x] == self.maps[g][self.maps[f][x]],
                        || format!("{} ∘ {} at {x}", s.morphism(g).name, s.morphism(f).name),
                        || "not functorial".into(),
                    );
                }
            }
        }
        r
    }
}

/// Compatible families, in lexicographic order of the tuples.
pub fn limit_sets(d: &SetDiagram) -> Vec<Vec<usize>> {
    let s = &d.shape;
    let k = s.n_objects();
    let mut out_of = vec![Vec::new(); k];
    for (u, m) in s.morphisms().iter().enumerate() {
        if !s.is_identity(u) {
            out_of[m.src].push(u);
        }
    }
    let mut assign = vec![UNSET; k];
    let mut result = Vec::new();
    fn go(
        j: usize,
        d: &SetDiagram,
        out_of: &[Vec<usize>],
        assign: &mut Vec<usize>,
        result: &mut Vec<Vec<usize>>,
    ) {
        let k = assign.len();
        if j == k {
            result.push(assign.clone());
            return;
        }
        if assign[j] != UNSET {
            go(j + 1, d, out_of, assign, result);
            return;
        }
        for x in 0..d.sets[j] {
            let saved = assign.clone();
            assign[j] = x;
            let mut ok = true;
            // propagate along outgoing maps, and check maps into j from assigned objects
            for &u in &out_of[j] {
                let t = d.shape.dst(u);
                let v = d.maps[u][x];
                if assign[t] == UNSET {
                    assign[t] = v;
                } else if assign[t] != v {
                    ok = false;
                    break;
                }
            }
            if ok {
                ok = (0..d.shape.n_morphisms()).all(|u| {
                    let m = d.shape.morphism(u);
                    let (a, b) = (assign[m.src], assign[m.dst]);
                    a == UNSET || b == UNSET || d.maps[u][a] == b
                });
            }
            if ok {
                go(j + 1, d, out_of, assign, result);
            }
            *assign = saved;
        }
    }
    go(0, d, &out_of, &mut assign, &mut result);
    result.sort();
    result.dedup();
    result
}

/// Directed graph as a presheaf on `0 ⇉ 1`; `edges[e] = (source, target)`.
pub fn graph(n_vertices: usize, edges: &[(usize, usize)]) -> Presheaf {
    let g1 = crate::fincat::g1();
    let s = g1.morphism_index("s").unwrap();
    let t = g1.morphism_index("t").unwrap();
    let mut action = vec![Vec::new(); g1.n_morphisms()];
    action[g1.id(0)] = (0..n_vertices).collect();
    action[g1.id(1)] = (0..edges.len()).collect();
    action[s] = edges.iter().map(|e| e.0).collect();
    action[t] = edges.iter().map(|e| e.1).collect();
    Presheaf::new(g1, vec![n_vertices, edges.len()], action).expect("graph")
}

/// The path with `n` edges `0 → 1 → … → n`.
pub fn path(n: usize) -> Presheaf {
    let edges: Vec<(usize, usize)> = (0..n).map(|k| (k, k + 1)).collect();
    graph(n + 1, &edges)
}

/// The directed cycle on `n` vertices.
pub fn cycle(n: usize) -> Presheaf {
    let edges: Vec<(usize, usize)> = (0..n).map(|k| (k, (k + 1) % n)).collect();
    graph(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{g1, semicube};

    #[test]
    fn coyoneda_rebuilds_path_and_cycle() {
        for x in [path(2), cycle(3), Presheaf::empty(&g1())] {
            let (col, cmp) = coyoneda(&x).unwrap();
            assert_eq!(col.apex.sizes, x.sizes);
            assert!(cmp.check_natural(&col.apex, &x).passed());
            assert!(cmp.inverse().is_some());
        }
    }

    #[test]
    fn yoneda_counts() {
        let x = cycle(3);
        for c in 0..2 {
            let y = Presheaf::representable(&g1(), c);
            assert_eq!(hom_set(&y, &x).unwrap().len(), x.sizes[c]);
        }
    }

    #[test]
    fn path_into_cycle_matches_walk_oracle() {
        let c = cycle(3);
        let walks = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .filter(|&(a, b)| c.action[3][a] == c.action[2][b])
            .count();
        assert_eq!(hom_set(&path(2), &cycle(3)).unwrap().len(), walks);
    }

    #[test]
    fn maps_into_terminal_and_out_of_empty() {
        let x = path(3);
        assert_eq!(hom_set(&x, &Presheaf::terminal(&g1())).unwrap().len(), 1);
        assert_eq!(hom_set(&Presheaf::empty(&g1()), &x).unwrap().len(), 1);
        assert!(hom_set(&x, &Presheaf::empty(&g1())).unwrap().is_empty());
    }

    #[test]
    fn pushout_of_edges_is_path2() {
        // y(1) ← y(0) → y(1), gluing target of the first edge to source of the second
        let b = g1();
        let shape = Arc::new(
            crate::fincat::build_from_presentation(&crate::fincat::Presentation {
                objects: vec!["v".into(), "a".into(), "b".into()],
                generators: vec![
                    crate::fincat::Generator { name: "l".into(), src: 0, dst: 1 },
                    crate::fincat::Generator { name: "r".into(), src: 0, dst: 2 },
                ],
                relations: vec![],
                cap: 10,
            })
            .unwrap(),
        );
        let v = Presheaf::representable(&b, 0);
        let e = Presheaf::representable(&b, 1);
        let s = b.morphism_index("s").unwrap();
        let t = b.morphism_index("t").unwrap();
        let pos = hom_positions(&b);
        let pick = |m: usize| PresheafMorphism { comps: vec![vec![pos[m]], vec![]] };
        let mut maps = vec![PresheafMorphism::identity(&v); shape.n_morphisms()];
        maps[shape.id(1)] = PresheafMorphism::identity(&e);
        maps[shape.id(2)] = PresheafMorphism::identity(&e);
        maps[shape.morphism_index("l").unwrap()] = pick(t);
        maps[shape.morphism_index("r").unwrap()] = pick(s);
        let col = colimit_presheaves(&PresheafDiagram { shape, objects: vec![v, e.clone(), e], maps }, &b).unwrap();
        assert_eq!(col.apex.sizes, vec![3, 2]);
        assert_eq!(find_isos(&col.apex, &path(2)).unwrap().len(), 1);
    }

    #[test]
    fn empty_colimit_is_initial() {
        let shape = Arc::new(FinCategory::discrete(vec![]));
        let col = colimit_presheaves(&PresheafDiagram { shape, objects: vec![], maps: vec![] }, &g1()).unwrap();
        assert_eq!(col.apex.n_cells(), 0);
    }

    #[test]
    fn elements_of_path2() {
        let el = category_of_elements(&path(2));
        assert_eq!(el.cat.n_objects(), 5);
        let non_id = (0..el.cat.n_morphisms()).filter(|&m| !el.cat.is_identity(m)).count();
        assert_eq!(non_id, 4);
        assert!(crate::fincat::check_category_laws(&el.cat).passed());
    }

    #[test]
    fn elements_of_representable_is_slice() {
        let b = Arc::new(semicube(2));
        let el = category_of_elements(&Presheaf::representable(&b, 2));
        let into: usize = (0..3).map(|d| b.hom(d, 2).len()).sum();
        assert_eq!(el.cat.n_objects(), into);
        assert_eq!(category_of_elements(&Presheaf::empty(&b)).cat.n_objects(), 0);
    }

    #[test]
    fn isos_and_rigidity() {
        assert_eq!(find_isos(&path(2), &path(2)).unwrap().len(), 1);
        assert!(is_rigid(&path(2)));
        assert!(find_isos(&path(2), &cycle(3)).unwrap().is_empty());
        assert_eq!(find_isos(&cycle(3), &cycle(3)).unwrap().len(), 3);
    }

    #[test]
    fn pullback_squares() {
        let id = Square { sizes: [2, 2, 2, 2], top: vec![0, 1], left: vec![0, 1], right: vec![0, 1], bottom: vec![0, 1] };
        assert!(is_pullback_square(&id).unwrap());
        let fat = Square { sizes: [3, 2, 2, 2], top: vec![0, 1, 1], left: vec![0, 1, 1], right: vec![0, 1], bottom: vec![0, 1] };
        assert!(!is_pullback_square(&fat).unwrap());
        let bad = Square { sizes: [1, 2, 2, 2], top: vec![0], left: vec![1], right: vec![0, 1], bottom: vec![0, 1] };
        assert!(is_pullback_square(&bad).is_err());
    }

    #[test]
    fn limits() {
        let one = Arc::new(FinCategory::terminal());
        assert_eq!(limit_sets(&SetDiagram { shape: one, sets: vec![4], maps: vec![(0..4).collect()] }).len(), 4);
        let two = Arc::new(FinCategory::discrete(vec!["a".into(), "b".into()]));
        let d = SetDiagram { shape: two, sets: vec![2, 3], maps: vec![vec![0, 1], vec![0, 1, 2]] };
        assert_eq!(limit_sets(&d).len(), 6);
        // equalizer of f = const 0 and g = (0,0,1)
        let g1 = g1();
        let (s, t) = (g1.morphism_index("s").unwrap(), g1.morphism_index("t").unwrap());
        let mut maps = vec![Vec::new(); 4];
        maps[g1.id(0)] = vec![0, 1, 2];
        maps[g1.id(1)] = vec![0, 1];
        maps[s] = vec![0, 0, 0];
        maps[t] = vec![0, 0, 1];
        let lim = limit_sets(&SetDiagram { shape: g1, sets: vec![3, 2], maps });
        let firsts: Vec<usize> = lim.iter().map(|v| v[0]).collect();
        assert_eq!(firsts, vec![0, 1]);
    }

    #[test]
    fn quotient_identifies_faces() {
        let (q, m) = quotient(&path(2), &[(1, 0, 1)]);
        assert_eq!(q.sizes, vec![1, 1]);
        assert!(q.check().passed());
        assert!(m.check_natural(&path(2), &q).passed());
    }
}
