//! Name resolution for a loaded [`WorkspaceDoc`].
//!
//! Names not defined in the document fall back to built-in fixtures, written
//! as a constructor name with an optional trailing size (`path2`, `reversal2`).

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use famkit::famrep::{compose, identity_rep, FreeCategoryRep, FreeMonoidRep, TableRep};
use famkit::fincat::{check_category_laws, g1, semicube};
use famkit::presheaf::{cycle, first_iso, graph, path};
use famkit::theory::TheorySlice;
use famkit::zoo::{
    broken_free_category_monad, broken_reversal_group, cube_category, cubical_monad, cyclic_group, doubled_factorization_data,
    free_category_monad, free_monoid_monad, grid, identity_monad, reedy_simplex_data, reflexive_graph_data, reversal_group,
    semicube_base, simplex_category, symmetric_cube_group, CrossedGroup, CubicalRep, FactorizationData,
};
use famkit::{theory_category, FamRep, FinCategory, MonadRep, Op, Presheaf, PresheafMorphism};

use crate::doc::{Builtin, CategoryDoc, CrossedGroupDoc, FactorizationDoc, PresheafDoc, RepDoc, TableRepDoc, WorkspaceDoc};

/// Where a monad comes from. Factorization and crossed-group data carry
/// invariants that are checked before the monad is built.
#[derive(Clone)]
pub enum MonadSource {
    Direct(MonadRep),
    Factorization(FactorizationData),
    Crossed(CrossedGroup),
}

impl MonadSource {
    pub fn build(&self) -> Result<MonadRep, String> {
        match self {
            MonadSource::Direct(m) => Ok(m.clone()),
            MonadSource::Factorization(d) => famkit::zoo::factorization_monad(d).map_err(|e| e.to_string()),
            MonadSource::Crossed(cg) => famkit::zoo::crossed_group_monad(cg).map_err(|e| e.to_string()),
        }
    }
}

pub struct Workspace {
    pub doc: WorkspaceDoc,
    pub default_bound: usize,
    categories: RefCell<HashMap<String, Arc<FinCategory>>>,
    slices: RefCell<HashMap<String, Arc<TheorySlice>>>,
    presheaves: RefCell<HashMap<String, Presheaf>>,
    reps: RefCell<HashMap<String, FamRep>>,
    monads: RefCell<HashMap<String, MonadSource>>,
    crossed: RefCell<HashMap<String, CrossedGroup>>,
    factorizations: RefCell<HashMap<String, FactorizationData>>,
    resolving: RefCell<Vec<String>>,
}

/// `path2` → `("path", Some(2))`.
pub fn split_size(name: &str) -> (&str, Option<usize>) {
    let head = name.trim_end_matches(|c: char| c.is_ascii_digit());
    (head, name[head.len()..].parse().ok())
}

impl Workspace {
    pub fn new(doc: WorkspaceDoc, default_bound: usize) -> Self {
        Workspace {
            doc,
            default_bound,
            categories: Default::default(),
            slices: Default::default(),
            presheaves: Default::default(),
            reps: Default::default(),
            monads: Default::default(),
            crossed: Default::default(),
            factorizations: Default::default(),
            resolving: Default::default(),
        }
    }

    /// Resolve and validate every entry of the document.
    pub fn validate(&self) -> Result<(), String> {
        for name in self.doc.categories.keys() {
            let c = self.category(name)?;
            let r = check_category_laws(&c);
            if let Some(f) = r.failures.first() {
                return Err(format!("category {name}: {}: {}", f.location, f.witness));
            }
        }
        for name in self.doc.presheaves.keys() {
            let x = self.presheaf(name)?;
            if let Some(f) = x.check().failures.first() {
                return Err(format!("presheaf {name}: {}: {}", f.location, f.witness));
            }
        }
        for name in self.doc.representations.keys() {
            self.rep(name)?;
        }
        for name in self.doc.crossed_groups.keys() {
            self.crossed_group(name)?;
        }
        for name in self.doc.factorizations.keys() {
            self.factorization(name)?;
        }
        for name in self.doc.monads.keys() {
            self.monad_source(name)?;
        }
        Ok(())
    }

    fn guard<T>(&self, kind: &str, name: &str, f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
        let key = format!("{kind} {name}");
        if self.resolving.borrow().contains(&key) {
            return Err(format!("{key} refers to itself"));
        }
        self.resolving.borrow_mut().push(key);
        let out = f();
        self.resolving.borrow_mut().pop();
        out.map_err(|e| if e.starts_with(kind) { e } else { format!("{kind} {name}: {e}") })
    }

    pub fn category(&self, name: &str) -> Result<Arc<FinCategory>, String> {
        if let Some(c) = self.categories.borrow().get(name) {
            return Ok(c.clone());
        }
        let c = self.guard("category", name, || match self.doc.categories.get(name) {
            Some(CategoryDoc::Table(t)) => t.build().map(Arc::new),
            Some(CategoryDoc::Presented(p)) => p.build().map(Arc::new),
            Some(CategoryDoc::Builtin(b)) => self.builtin_category(name, b),
            None => {
                let (head, n) = split_size(name);
                let b = match (head, n) {
                    ("g", Some(1)) => Builtin::new("g1"),
                    ("terminal", None) => Builtin::new("terminal"),
                    ("semicube" | "simplex" | "cube" | "cubical-base", Some(n)) => Builtin::new(head).with("n", n),
                    _ => return Err("not defined and not a built-in category".into()),
                };
                self.builtin_category(name, &b)
            }
        })?;
        self.categories.borrow_mut().insert(name.into(), c.clone());
        Ok(c)
    }

    fn builtin_category(&self, name: &str, b: &Builtin) -> Result<Arc<FinCategory>, String> {
        Ok(match b.builtin.as_str() {
            "g1" => g1(),
            "terminal" => Arc::new(FinCategory::terminal()),
            "semicube" => Arc::new(semicube(b.usize("n")?)),
            "cubical-base" => semicube_base(b.usize("n")?).cat().clone(),
            "simplex" => simplex_category(b.usize("n")?).cat,
            "cube" => cube_category(b.usize("n")?, !b.params.contains_key("degeneracies") || b.flag("degeneracies")).cat,
            "theory" => {
                let monad = self.monad(&b.string("monad")?)?;
                let bound = b.usize_or("bound", self.default_bound)?;
                let ops = match b.params.get("ops") {
                    None => default_ops(&monad, bound)?,
                    Some(v) => {
                        let specs: Vec<String> = serde_json::from_value(v.clone()).map_err(|_| "ops must be a list of strings".to_string())?;
                        specs.iter().map(|s| parse_op(&monad, s)).collect::<Result<_, _>>()?
                    }
                };
                let slice = theory_category(&monad, &ops, bound).map_err(|e| e.to_string())?;
                let cat = slice.cat.clone();
                self.slices.borrow_mut().insert(name.into(), Arc::new(slice));
                cat
            }
            other => return Err(format!("unknown built-in category `{other}`")),
        })
    }

    /// The theory slice behind a category built as `{"builtin": "theory"}`.
    pub fn slice(&self, category: &str) -> Result<Arc<TheorySlice>, String> {
        self.category(category)?;
        self.slices.borrow().get(category).cloned().ok_or_else(|| format!("category {category} is not a theory category"))
    }

    /// The name of the workspace category a presheaf lives on, if it is a table.
    pub fn presheaf_category(&self, name: &str) -> Option<String> {
        match self.doc.presheaves.get(name)? {
            PresheafDoc::Table(t) => Some(t.category.clone()),
            PresheafDoc::Builtin(b) => b.string("category").ok(),
        }
    }

    pub fn presheaf(&self, name: &str) -> Result<Presheaf, String> {
        if let Some(x) = self.presheaves.borrow().get(name) {
            return Ok(x.clone());
        }
        let x = self.guard("presheaf", name, || match self.doc.presheaves.get(name) {
            Some(PresheafDoc::Table(t)) => t.build(&self.category(&t.category)?),
            Some(PresheafDoc::Builtin(b)) => self.builtin_presheaf(b),
            None => match split_size(name) {
                ("path" | "cycle", Some(n)) => self.builtin_presheaf(&Builtin::new(split_size(name).0).with("n", n)),
                _ => Err("not defined and not a built-in presheaf".into()),
            },
        })?;
        self.presheaves.borrow_mut().insert(name.into(), x.clone());
        Ok(x)
    }

    fn builtin_presheaf(&self, b: &Builtin) -> Result<Presheaf, String> {
        let base = || self.category(&b.string("category")?);
        Ok(match b.builtin.as_str() {
            "path" => path(b.usize("n")?),
            "cycle" => cycle(b.usize("n")?),
            "graph" => {
                let edges: Vec<(usize, usize)> = serde_json::from_value(b.params.get("edges").cloned().unwrap_or_default())
                    .map_err(|_| "graph needs `edges` as [[src, dst], ...]".to_string())?;
                let n = b.usize("vertices")?;
                if edges.iter().any(|&(s, t)| s >= n || t >= n) {
                    return Err("edge endpoint out of range".into());
                }
                graph(n, &edges)
            }
            "grid" => grid(b.usize("n")?, &b.usizes("dims")?).map_err(|e| e.to_string())?,
            "terminal" => Presheaf::terminal(&base()?),
            "empty" => Presheaf::empty(&base()?),
            "representable" => {
                let c = base()?;
                let o = b.string("object")?;
                let k = c.object_index(&o).ok_or_else(|| format!("unknown object `{o}`"))?;
                Presheaf::representable(&c, k)
            }
            other => return Err(format!("unknown built-in presheaf `{other}`")),
        })
    }

    pub fn rep(&self, name: &str) -> Result<FamRep, String> {
        if let Some(r) = self.reps.borrow().get(name) {
            return Ok(r.clone());
        }
        let r = self.guard("representation", name, || match self.doc.representations.get(name) {
            Some(RepDoc::Table(t)) => self.table_rep(name, t).map(|r| Arc::new(r) as FamRep),
            Some(RepDoc::Compose(c)) => {
                let (outer, inner) = (self.rep(&c.compose.0)?, self.rep(&c.compose.1)?);
                compose(outer, inner, c.bound).map_err(|e| e.to_string())
            }
            Some(RepDoc::Builtin(b)) => self.builtin_rep(b),
            None => match name {
                "free-category" | "free-monoid" => self.builtin_rep(&Builtin::new(name)),
                _ => self.monad(name).map(|m| m.rep.clone()).map_err(|_| "not defined and not a built-in representation or monad".into()),
            },
        })?;
        self.reps.borrow_mut().insert(name.into(), r.clone());
        Ok(r)
    }

    fn builtin_rep(&self, b: &Builtin) -> Result<FamRep, String> {
        Ok(match b.builtin.as_str() {
            "free-category" => Arc::new(FreeCategoryRep::new()),
            "free-monoid" => Arc::new(FreeMonoidRep::new()),
            "identity" => identity_rep(&self.category(&b.string("category")?)?),
            "cubical" => Arc::new(CubicalRep::new(b.usize("n")?)),
            "monad" => self.monad(&b.string("monad")?)?.rep.clone(),
            other => return Err(format!("unknown built-in representation `{other}`")),
        })
    }

    fn table_rep(&self, name: &str, t: &TableRepDoc) -> Result<TableRep, String> {
        let (source, target) = (self.category(&t.source)?, self.category(&t.target)?);
        for o in t.operations.keys() {
            target.object_index(o).ok_or_else(|| format!("unknown object `{o}`"))?;
        }
        let ops: Vec<Vec<&crate::doc::OperationDoc>> =
            target.objects().iter().map(|o| t.operations.get(o).map(|v| v.iter().collect()).unwrap_or_default()).collect();
        let op_index = |c: usize, n: &str| ops[c].iter().position(|o| o.name == n).ok_or_else(|| format!("unknown operation `{n}` at {}", target.object_name(c)));
        let mut arities = Vec::new();
        for (c, v) in ops.iter().enumerate() {
            let mut row = Vec::new();
            for o in v {
                let a = self.presheaf(&o.arity)?;
                if *a.base != *source {
                    return Err(format!("arity of `{}` at {} is not on the source category", o.name, target.object_name(c)));
                }
                row.push(Presheaf { base: source.clone(), ..a });
            }
            arities.push(row);
        }
        for m in t.restrictions.keys().chain(t.arity_maps.keys()) {
            target.morphism_index(m).ok_or_else(|| format!("unknown morphism `{m}`"))?;
        }
        let mut action = Vec::new();
        let mut maps = Vec::new();
        for (i, m) in target.morphisms().iter().enumerate() {
            let mut row = Vec::new();
            let mut mrow = Vec::new();
            for (k, o) in ops[m.dst].iter().enumerate() {
                let r = match t.restrictions.get(&m.name).and_then(|r| r.get(&o.name)) {
                    Some(n) => op_index(m.src, n)?,
                    None if target.is_identity(i) => k,
                    None => return Err(format!("restriction of `{}` along `{}` missing", o.name, m.name)),
                };
                let (from, to) = (&arities[m.src][r], &arities[m.dst][k]);
                let map = match t.arity_maps.get(&m.name).and_then(|a| a.get(&o.name)) {
                    Some(cells) => cell_map(&source, from, to, cells)?,
                    None if target.is_identity(i) => PresheafMorphism::identity(to),
                    None => return Err(format!("arity map of `{}` along `{}` missing", o.name, m.name)),
                };
                if let Some(f) = map.check_natural(from, to).failures.first() {
                    return Err(format!("arity map of `{}` along `{}`: {}: {}", o.name, m.name, f.location, f.witness));
                }
                row.push(r);
                mrow.push(map);
            }
            action.push(row);
            maps.push(mrow);
        }
        let sizes = ops.iter().map(Vec::len).collect();
        let labels = ops.iter().map(|v| v.iter().map(|o| o.name.clone()).collect()).collect();
        let s = Presheaf::new(target.clone(), sizes, action).map_err(|e| e.to_string())?.with_labels(labels);
        if let Some(f) = s.check().failures.first() {
            return Err(format!("operations: {}: {}", f.location, f.witness));
        }
        let mut rep = TableRep::new(name, source, s, arities, maps).map_err(|e| e.to_string())?;
        for (c, v) in ops.iter().enumerate() {
            for (k, o) in v.iter().enumerate() {
                if let Some(g) = o.grade {
                    rep.grades[c][k] = g;
                }
            }
        }
        Ok(rep)
    }

    pub fn crossed_group(&self, name: &str) -> Result<CrossedGroup, String> {
        if let Some(cg) = self.crossed.borrow().get(name) {
            return Ok(cg.clone());
        }
        let cg = self.guard("crossed group", name, || {
            let b = match self.doc.crossed_groups.get(name) {
                Some(CrossedGroupDoc::Table(t)) => return t.build(name, &self.category(&t.category)?),
                Some(CrossedGroupDoc::Builtin(b)) => b.clone(),
                None => match split_size(name) {
                    ("broken-reversal", None) => Builtin::new("broken-reversal"),
                    ("reversal" | "cyclic" | "symmetric", Some(n)) => Builtin::new(split_size(name).0).with("n", n),
                    ("symmetric-degenerate", Some(n)) => Builtin::new("symmetric").with("n", n).with("degeneracies", true),
                    _ => return Err("not defined and not a built-in crossed group".into()),
                },
            };
            Ok(match b.builtin.as_str() {
                "reversal" => reversal_group(b.usize("n")?),
                "cyclic" => cyclic_group(b.usize("n")?),
                "symmetric" => symmetric_cube_group(b.usize("n")?, b.flag("degeneracies")),
                "broken-reversal" => broken_reversal_group(),
                other => return Err(format!("unknown built-in crossed group `{other}`")),
            })
        })?;
        self.crossed.borrow_mut().insert(name.into(), cg.clone());
        Ok(cg)
    }

    pub fn factorization(&self, name: &str) -> Result<FactorizationData, String> {
        if let Some(d) = self.factorizations.borrow().get(name) {
            return Ok(d.clone());
        }
        let d = self.guard("factorization", name, || {
            let b = match self.doc.factorizations.get(name) {
                Some(FactorizationDoc::Table(t)) => return t.build(name, &self.category(&t.category)?),
                Some(FactorizationDoc::Builtin(b)) => b.clone(),
                None => match split_size(name) {
                    ("reedy-simplex", n) => Builtin::new("reedy-simplex").with("n", n.unwrap_or(2)),
                    ("reflexive-graph" | "doubled-factorization", None) => Builtin::new(name),
                    _ => return Err("not defined and not a built-in factorization".into()),
                },
            };
            Ok(match b.builtin.as_str() {
                "reedy-simplex" => reedy_simplex_data(b.usize("n")?),
                "reflexive-graph" => reflexive_graph_data(),
                "doubled-factorization" => doubled_factorization_data(),
                other => return Err(format!("unknown built-in factorization `{other}`")),
            })
        })?;
        self.factorizations.borrow_mut().insert(name.into(), d.clone());
        Ok(d)
    }

    pub fn monad_source(&self, name: &str) -> Result<MonadSource, String> {
        if let Some(m) = self.monads.borrow().get(name) {
            return Ok(m.clone());
        }
        let m = self.guard("monad", name, || {
            let b = match self.doc.monads.get(name) {
                Some(b) => b.clone(),
                None => match name {
                    "free-category" | "broken-free-category" | "free-monoid" => Builtin::new(name),
                    "cubical" => Builtin::new("cubical").with("n_max", 2).with("grid_bound", 3),
                    _ if self.factorization(name).is_ok() => Builtin::new("factorization").with("data", name),
                    _ if self.crossed_group(name).is_ok() => Builtin::new("crossed").with("group", name),
                    _ => return Err("not defined and not a built-in monad".into()),
                },
            };
            self.builtin_monad(&b)
        })?;
        self.monads.borrow_mut().insert(name.into(), m.clone());
        Ok(m)
    }

    fn builtin_monad(&self, b: &Builtin) -> Result<MonadSource, String> {
        Ok(match b.builtin.as_str() {
            "free-category" => MonadSource::Direct(free_category_monad()),
            "broken-free-category" => MonadSource::Direct(broken_free_category_monad()),
            "free-monoid" => MonadSource::Direct(free_monoid_monad()),
            "identity" => MonadSource::Direct(identity_monad(&self.category(&b.string("category")?)?)),
            "cubical" => MonadSource::Direct(cubical_monad(b.usize("n_max")?, b.usize("grid_bound")?)),
            "factorization" => MonadSource::Factorization(self.factorization(&b.string("data")?)?),
            "crossed" => MonadSource::Crossed(self.crossed_group(&b.string("group")?)?),
            other => return Err(format!("unknown built-in monad `{other}`")),
        })
    }

    pub fn monad(&self, name: &str) -> Result<MonadRep, String> {
        self.monad_source(name)?.build().map_err(|e| format!("monad {name}: {e}"))
    }
}

fn cell_map(
    base: &FinCategory,
    from: &Presheaf,
    to: &Presheaf,
    cells: &std::collections::BTreeMap<String, std::collections::BTreeMap<String, String>>,
) -> Result<PresheafMorphism, String> {
    let mut comps = Vec::new();
    for c in 0..base.n_objects() {
        let o = base.object_name(c);
        let empty = Default::default();
        let map = cells.get(o).unwrap_or(&empty);
        let mut comp = Vec::new();
        for k in 0..from.sizes[c] {
            let l = from.label(c, k);
            let img = map.get(&l).ok_or_else(|| format!("cell `{l}` at {o} has no image"))?;
            comp.push((0..to.sizes[c]).find(|&j| to.label(c, j) == *img).ok_or_else(|| format!("no cell `{img}` at {o}"))?);
        }
        comps.push(comp);
    }
    Ok(PresheafMorphism { comps })
}

/// `<object>:<op>` with `<op>` one of `n`, `a,b,…`, `(a,b,…)`, `#k`.
pub fn parse_op(m: &MonadRep, text: &str) -> Result<(usize, Op), String> {
    let base = m.base();
    let (obj, op) = text.split_once(':').ok_or_else(|| format!("operation `{text}` is not of the form object:op"))?;
    let c = base.object_index(obj).ok_or_else(|| format!("unknown object `{obj}`"))?;
    let op = op.trim();
    let t = if let Some(k) = op.strip_prefix('#') {
        Op::Elt(k.parse().map_err(|_| format!("bad operation `{op}`"))?)
    } else {
        let inner = op.trim_start_matches('(').trim_end_matches(')');
        let v: Vec<usize> = inner.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| format!("bad operation `{op}`"))?;
        Op::Nat(v)
    };
    Ok((c, t))
}

pub fn show_op(m: &MonadRep, (c, t): &(usize, Op)) -> String {
    let t = match t {
        Op::Nat(v) => v.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    };
    format!("{}:{t}", m.base().object_name(*c))
}

/// Units `e(c)` first, then every operation within `bound` whose arity is
/// not isomorphic to one already chosen.
pub fn default_ops(m: &MonadRep, bound: usize) -> Result<Vec<(usize, Op)>, String> {
    let base = m.base();
    let rep = m.rep.as_ref();
    let mut chosen: Vec<(usize, Op)> = (0..base.n_objects()).map(|c| (c, m.e(c))).collect();
    let mut arities: Vec<Presheaf> = chosen.iter().map(|(c, t)| rep.arity(*c, t)).collect();
    for c in 0..base.n_objects() {
        for t in rep.ops(c, bound) {
            let a = rep.arity(c, &t);
            let mut seen = false;
            for b in &arities {
                if first_iso(b, &a).map_err(|e| e.to_string())?.is_some() {
                    seen = true;
                    break;
                }
            }
            if !seen {
                chosen.push((c, t));
                arities.push(a);
            }
        }
    }
    Ok(chosen)
}
