//! The JSON workspace document and conversions between it and core values.
//!
//! Every entry is either a table (explicit data) or a reference to a built-in
//! constructor, `{"builtin": name, ...params}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use famkit::fincat::{Generator, Morphism, Presentation};
use famkit::zoo::{CrossedGroup, FactorizationData, FiniteGroup};
use famkit::{FinCategory, Presheaf};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDoc {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub categories: BTreeMap<String, CategoryDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub presheaves: BTreeMap<String, PresheafDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub representations: BTreeMap<String, RepDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub monads: BTreeMap<String, Builtin>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub crossed_groups: BTreeMap<String, CrossedGroupDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub factorizations: BTreeMap<String, FactorizationDoc>,
}

/// `{"builtin": name, ...params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Builtin {
    pub builtin: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, Value>,
}

impl Builtin {
    pub fn new(name: impl Into<String>) -> Self {
        Builtin { builtin: name.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn usize(&self, key: &str) -> Result<usize, String> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .map(|n| n as usize)
            .ok_or_else(|| format!("builtin {} needs a non-negative integer `{key}`", self.builtin))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        if self.params.contains_key(key) {
            self.usize(key)
        } else {
            Ok(default)
        }
    }

    pub fn string(&self, key: &str) -> Result<String, String> {
        self.params
            .get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| format!("builtin {} needs a string `{key}`", self.builtin))
    }

    pub fn flag(&self, key: &str) -> bool {
        self.params.get(key).and_then(Value::as_bool).unwrap_or(false)
    }

    pub fn usizes(&self, key: &str) -> Result<Vec<usize>, String> {
        serde_json::from_value(self.params.get(key).cloned().unwrap_or(Value::Null))
            .map_err(|_| format!("builtin {} needs an integer list `{key}`", self.builtin))
    }
}

/// Dispatch on the keys present, so that diagnostics name the intended form.
fn by_key<T, E: serde::de::Error>(
    v: Value,
    forms: &[(&str, fn(Value) -> serde_json::Result<T>)],
    what: &str,
) -> Result<T, E> {
    let obj = v.as_object().ok_or_else(|| E::custom(format!("{what} must be an object")))?;
    for (key, parse) in forms {
        if obj.contains_key(*key) {
            return parse(v).map_err(|e| E::custom(format!("{what}: {e}")));
        }
    }
    let keys: Vec<&str> = forms.iter().map(|(k, _)| *k).collect();
    Err(E::custom(format!("{what} needs one of the keys {keys:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// A category as a full composition table. Identities not named in
/// `identities` are added as `id_<object>`; `compose` lists `[g, f, g∘f]`
/// for every composable pair of non-identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableCategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub identities: BTreeMap<String, String>,
    #[serde(default)]
    pub compose: Vec<[String; 3]>,
}

/// A finitely presented category; words are in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationDoc {
    pub objects: Vec<String>,
    pub generators: Vec<MorphismDoc>,
    #[serde(default)]
    pub relations: Vec<(Vec<String>, Vec<String>)>,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CategoryDoc {
    Builtin(Builtin),
    Table(TableCategoryDoc),
    Presented(PresentationDoc),
}

impl<'de> Deserialize<'de> for CategoryDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        by_key(
            Value::deserialize(d)?,
            &[
                ("builtin", |v| serde_json::from_value(v).map(CategoryDoc::Builtin)),
                ("generators", |v| serde_json::from_value(v).map(CategoryDoc::Presented)),
                ("morphisms", |v| serde_json::from_value(v).map(CategoryDoc::Table)),
            ],
            "category",
        )
    }
}

/// A presheaf by its cells (object → labels) and actions
/// (morphism `c′ → c` → map from labels at `c` to labels at `c′`).
/// Identity actions may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablePresheafDoc {
    pub category: String,
    pub cells: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub actions: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PresheafDoc {
    Builtin(Builtin),
    Table(TablePresheafDoc),
}

impl<'de> Deserialize<'de> for PresheafDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        by_key(
            Value::deserialize(d)?,
            &[
                ("builtin", |v| serde_json::from_value(v).map(PresheafDoc::Builtin)),
                ("cells", |v| serde_json::from_value(v).map(PresheafDoc::Table)),
            ],
            "presheaf",
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub name: String,
    /// A presheaf on the source category.
    pub arity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<usize>,
}

/// A representation by finite tables: operations per target object,
/// restrictions `S_i`, and arity maps `E(i_t): E(S_i t) → E(t)` given cell by
/// cell. Entries along identities may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRepDoc {
    pub source: String,
    pub target: String,
    pub operations: BTreeMap<String, Vec<OperationDoc>>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub arity_maps: BTreeMap<String, BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>>,
}

/// The composite of two representations, truncated at `bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeDoc {
    pub compose: (String, String),
    pub bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RepDoc {
    Builtin(Builtin),
    Table(TableRepDoc),
    Compose(ComposeDoc),
}

impl<'de> Deserialize<'de> for RepDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        by_key(
            Value::deserialize(d)?,
            &[
                ("builtin", |v| serde_json::from_value(v).map(RepDoc::Builtin)),
                ("compose", |v| serde_json::from_value(v).map(RepDoc::Compose)),
                ("operations", |v| serde_json::from_value(v).map(RepDoc::Table)),
            ],
            "representation",
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub elements: Vec<String>,
    /// `mult[g][h] = g·h`, by element name.
    pub mult: Vec<Vec<String>>,
    pub unit: String,
}

/// A crossed group by tables: `restrict[i][g] = Gi(g)` and `action[i][g] = g_*(i)`,
/// listed in the element order of `G_{dst i}`. Entries along identities may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableCrossedGroupDoc {
    pub category: String,
    pub groups: BTreeMap<String, GroupDoc>,
    #[serde(default)]
    pub restrict: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub action: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CrossedGroupDoc {
    Builtin(Builtin),
    Table(TableCrossedGroupDoc),
}

impl<'de> Deserialize<'de> for CrossedGroupDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        by_key(
            Value::deserialize(d)?,
            &[
                ("builtin", |v| serde_json::from_value(v).map(CrossedGroupDoc::Builtin)),
                ("groups", |v| serde_json::from_value(v).map(CrossedGroupDoc::Table)),
            ],
            "crossed group",
        )
    }
}

/// Wide subcategories by their non-identity morphisms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFactorizationDoc {
    pub category: String,
    pub plus: Vec<String>,
    pub minus: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FactorizationDoc {
    Builtin(Builtin),
    Table(TableFactorizationDoc),
}

impl<'de> Deserialize<'de> for FactorizationDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        by_key(
            Value::deserialize(d)?,
            &[
                ("builtin", |v| serde_json::from_value(v).map(FactorizationDoc::Builtin)),
                ("plus", |v| serde_json::from_value(v).map(FactorizationDoc::Table)),
            ],
            "factorization",
        )
    }
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize, String> {
    names.iter().position(|n| n == name).ok_or_else(|| format!("unknown {what} `{name}`"))
}

fn morphism_of(cat: &FinCategory, name: &str) -> Result<usize, String> {
    cat.morphism_index(name).ok_or_else(|| format!("unknown morphism `{name}`"))
}

fn object_of(cat: &FinCategory, name: &str) -> Result<usize, String> {
    cat.object_index(name).ok_or_else(|| format!("unknown object `{name}`"))
}

impl TableCategoryDoc {
    pub fn build(&self) -> Result<FinCategory, String> {
        let mut morphisms = Vec::new();
        for m in &self.morphisms {
            morphisms.push(Morphism {
                name: m.name.clone(),
                src: index_of(&self.objects, &m.src, "object")?,
                dst: index_of(&self.objects, &m.dst, "object")?,
            });
        }
        for o in self.identities.keys() {
            index_of(&self.objects, o, "object")?;
        }
        let mut identities = Vec::new();
        for (c, o) in self.objects.iter().enumerate() {
            let name = self.identities.get(o).cloned().unwrap_or_else(|| format!("id_{o}"));
            let i = match morphisms.iter().position(|m| m.name == name) {
                Some(i) => i,
                None => {
                    morphisms.push(Morphism { name, src: c, dst: c });
                    morphisms.len() - 1
                }
            };
            identities.push(i);
        }
        let names: Vec<String> = morphisms.iter().map(|m| m.name.clone()).collect();
        let mut entries = Vec::new();
        for [g, f, h] in &self.compose {
            entries.push((index_of(&names, g, "morphism")?, index_of(&names, f, "morphism")?, index_of(&names, h, "morphism")?));
        }
        FinCategory::from_table(self.objects.clone(), morphisms, identities, &entries).map_err(|e| e.to_string())
    }

    /// The full table of `cat`, identities named explicitly.
    pub fn of(cat: &FinCategory) -> Self {
        let name = |i: usize| cat.morphism(i).name.clone();
        let objects = cat.objects().to_vec();
        let morphisms = cat
            .morphisms()
            .iter()
            .map(|m| MorphismDoc { name: m.name.clone(), src: objects[m.src].clone(), dst: objects[m.dst].clone() })
            .collect();
        let identities = (0..cat.n_objects()).map(|c| (objects[c].clone(), name(cat.id(c)))).collect();
        let mut compose = Vec::new();
        for g in 0..cat.n_morphisms() {
            for f in 0..cat.n_morphisms() {
                if cat.is_identity(g) || cat.is_identity(f) {
                    continue;
                }
                if let Some(h) = cat.try_compose(g, f) {
                    compose.push([name(g), name(f), name(h)]);
                }
            }
        }
        TableCategoryDoc { objects, morphisms, identities, compose }
    }
}

impl PresentationDoc {
    pub fn build(&self) -> Result<FinCategory, String> {
        let mut generators = Vec::new();
        for g in &self.generators {
            generators.push(Generator {
                name: g.name.clone(),
                src: index_of(&self.objects, &g.src, "object")?,
                dst: index_of(&self.objects, &g.dst, "object")?,
            });
        }
        let names: Vec<String> = self.generators.iter().map(|g| g.name.clone()).collect();
        let word = |w: &[String]| w.iter().map(|g| index_of(&names, g, "generator")).collect::<Result<Vec<_>, _>>();
        let mut relations = Vec::new();
        for (l, r) in &self.relations {
            relations.push((word(l)?, word(r)?));
        }
        let p = Presentation { objects: self.objects.clone(), generators, relations, cap: self.cap };
        famkit::fincat::build_from_presentation(&p).map_err(|e| e.to_string())
    }
}

/// Labels of `x`, replaced by `<object>#<k>` when they are missing or repeat.
fn cell_labels(x: &Presheaf) -> Vec<Vec<String>> {
    (0..x.sizes.len())
        .map(|c| {
            let given: Vec<String> = (0..x.sizes[c]).map(|k| x.label(c, k)).collect();
            let mut seen = std::collections::HashSet::new();
            if given.iter().all(|l| seen.insert(l.clone())) {
                given
            } else {
                (0..x.sizes[c]).map(|k| format!("{}#{k}", x.base.object_name(c))).collect()
            }
        })
        .collect()
}

impl TablePresheafDoc {
    pub fn build(&self, base: &Arc<FinCategory>) -> Result<Presheaf, String> {
        for o in self.cells.keys() {
            object_of(base, o)?;
        }
        let labels: Vec<Vec<String>> =
            base.objects().iter().map(|o| self.cells.get(o).cloned().unwrap_or_default()).collect();
        for (c, ls) in labels.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = ls.iter().find(|l| !seen.insert(*l)) {
                return Err(format!("cell `{dup}` repeats at object {}", base.object_name(c)));
            }
        }
        for m in self.actions.keys() {
            morphism_of(base, m)?;
        }
        let mut action = Vec::with_capacity(base.n_morphisms());
        for (i, m) in base.morphisms().iter().enumerate() {
            let row = match self.actions.get(&m.name) {
                None if base.is_identity(i) => (0..labels[m.dst].len()).collect(),
                None => return Err(format!("action of `{}` missing", m.name)),
                Some(map) => {
                    let mut row = Vec::with_capacity(labels[m.dst].len());
                    for l in &labels[m.dst] {
                        let img = map.get(l).ok_or_else(|| format!("action of `{}` misses cell `{l}`", m.name))?;
                        row.push(index_of(&labels[m.src], img, "cell")?);
                    }
                    if map.len() != row.len() {
                        return Err(format!("action of `{}` names cells not at {}", m.name, base.object_name(m.dst)));
                    }
                    row
                }
            };
            action.push(row);
        }
        let sizes = labels.iter().map(Vec::len).collect();
        Ok(Presheaf::new(base.clone(), sizes, action).map_err(|e| e.to_string())?.with_labels(labels))
    }

    pub fn of(category: &str, x: &Presheaf) -> Self {
        let base = &x.base;
        let labels = cell_labels(x);
        let cells = (0..base.n_objects()).map(|c| (base.object_name(c).to_string(), labels[c].clone())).collect();
        let actions = base
            .morphisms()
            .iter()
            .enumerate()
            .filter(|(i, _)| !base.is_identity(*i))
            .map(|(i, m)| {
                let map = x.action[i].iter().enumerate().map(|(k, &v)| (labels[m.dst][k].clone(), labels[m.src][v].clone())).collect();
                (m.name.clone(), map)
            })
            .collect();
        TablePresheafDoc { category: category.to_string(), cells, actions }
    }
}

impl GroupDoc {
    pub fn build(&self) -> Result<FiniteGroup, String> {
        let idx = |n: &String| index_of(&self.elements, n, "group element");
        let mult = self.mult.iter().map(|row| row.iter().map(idx).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
        let g = FiniteGroup { names: self.elements.clone(), mult, unit: idx(&self.unit)? };
        g.check()?;
        Ok(g)
    }

    pub fn of(g: &FiniteGroup) -> Self {
        GroupDoc {
            elements: g.names.clone(),
            mult: g.mult.iter().map(|row| row.iter().map(|&h| g.names[h].clone()).collect()).collect(),
            unit: g.names[g.unit].clone(),
        }
    }
}

impl TableCrossedGroupDoc {
    pub fn build(&self, name: &str, base: &Arc<FinCategory>) -> Result<CrossedGroup, String> {
        for o in self.groups.keys() {
            object_of(base, o)?;
        }
        let mut groups = Vec::new();
        for o in base.objects() {
            groups.push(match self.groups.get(o) {
                Some(g) => g.build().map_err(|e| format!("group at {o}: {e}"))?,
                None => FiniteGroup::trivial(),
            });
        }
        for m in self.restrict.keys().chain(self.action.keys()) {
            morphism_of(base, m)?;
        }
        let (mut restrict, mut action) = (Vec::new(), Vec::new());
        for (i, m) in base.morphisms().iter().enumerate() {
            let (gd, gs) = (&groups[m.dst], &groups[m.src]);
            let r = match self.restrict.get(&m.name) {
                Some(v) => v.iter().map(|g| index_of(&gs.names, g, "group element")).collect::<Result<Vec<_>, _>>()?,
                None if base.is_identity(i) => (0..gd.order()).collect(),
                None if gd.order() == 1 => vec![gs.unit],
                None => return Err(format!("restriction along `{}` missing", m.name)),
            };
            let a = match self.action.get(&m.name) {
                Some(v) => v.iter().map(|f| morphism_of(base, f)).collect::<Result<Vec<_>, _>>()?,
                None if base.is_identity(i) || gd.order() == 1 => vec![i; gd.order()],
                None => return Err(format!("action on `{}` missing", m.name)),
            };
            if r.len() != gd.order() || a.len() != gd.order() {
                return Err(format!("tables along `{}` need one entry per element of G_{}", m.name, base.object_name(m.dst)));
            }
            restrict.push(r);
            action.push(a);
        }
        Ok(CrossedGroup { name: name.to_string(), base: base.clone(), groups, restrict, action })
    }

    pub fn of(category: &str, cg: &CrossedGroup) -> Self {
        let base = &cg.base;
        let groups = (0..base.n_objects()).map(|c| (base.object_name(c).to_string(), GroupDoc::of(&cg.groups[c]))).collect();
        let live = |i: usize| !base.is_identity(i);
        let restrict = (0..base.n_morphisms())
            .filter(|&i| live(i))
            .map(|i| {
                let gs = &cg.groups[base.src(i)];
                (base.morphism(i).name.clone(), cg.restrict[i].iter().map(|&g| gs.names[g].clone()).collect())
            })
            .collect();
        let action = (0..base.n_morphisms())
            .filter(|&i| live(i))
            .map(|i| (base.morphism(i).name.clone(), cg.action[i].iter().map(|&f| base.morphism(f).name.clone()).collect()))
            .collect();
        TableCrossedGroupDoc { category: category.to_string(), groups, restrict, action }
    }
}

impl TableFactorizationDoc {
    pub fn build(&self, name: &str, total: &Arc<FinCategory>) -> Result<FactorizationData, String> {
        let mask = |names: &[String]| -> Result<Vec<bool>, String> {
            let mut m: Vec<bool> = (0..total.n_morphisms()).map(|i| total.is_identity(i)).collect();
            for n in names {
                m[morphism_of(total, n)?] = true;
            }
            Ok(m)
        };
        Ok(FactorizationData { name: name.to_string(), total: total.clone(), plus: mask(&self.plus)?, minus: mask(&self.minus)? })
    }

    pub fn of(category: &str, d: &FactorizationData) -> Self {
        let t = &d.total;
        let pick = |mask: &[bool]| (0..t.n_morphisms()).filter(|&i| mask[i] && !t.is_identity(i)).map(|i| t.morphism(i).name.clone()).collect();
        TableFactorizationDoc { category: category.to_string(), plus: pick(&d.plus), minus: pick(&d.minus) }
    }
}

pub fn parse(text: &str) -> Result<WorkspaceDoc, String> {
    if text.trim().is_empty() {
        return Ok(WorkspaceDoc::default());
    }
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn dump(doc: &WorkspaceDoc) -> String {
    serde_json::to_string_pretty(doc).expect("workspace documents serialize")
}
