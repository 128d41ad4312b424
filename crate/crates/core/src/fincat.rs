//! Finite categories with a total composition table, functors between them,
//! and two builders: quotients of free categories by relations, and
//! subcategories of finite sets generated by explicit functions.
//!
//! Words are always written in application order: `[f, g]` denotes `g ∘ f`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{FamError, Result};
use crate::report::Report;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    /// `table[g * n + f] = g ∘ f`, or `NONE` when not composable.
    table: Vec<u32>,
    homs: Vec<Vec<usize>>,
}

impl FinCategory {
    /// Build from an explicit composition function, queried on every composable pair.
    pub fn from_fn(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        mut compose: impl FnMut(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = morphisms.len();
        if identities.len() != objects.len() {
            return Err(FamError::Malformed("one identity per object required".into()));
        }
        for m in &morphisms {
            if m.src >= objects.len() || m.dst >= objects.len() {
                return Err(FamError::Malformed(format!("morphism {} has unknown endpoint", m.name)));
            }
        }
        for (c, &i) in identities.iter().enumerate() {
            if i >= n || morphisms[i].src != c || morphisms[i].dst != c {
                return Err(FamError::Malformed(format!("identity of object {} is not an endomorphism", objects[c])));
            }
        }
        let mut table = vec![NONE; n * n];
        for g in 0..n {
            for f in 0..n {
                if morphisms[f].dst == morphisms[g].src {
                    let h = compose(g, f);
                    if h >= n {
                        return Err(FamError::Malformed(format!("composite of {} and {} out of range", morphisms[g].name, morphisms[f].name)));
                    }
                    table[g * n + f] = h as u32;
                }
            }
        }
        Ok(Self::assemble(objects, morphisms, identities, table))
    }

    /// Build from a list of `(g, f, g∘f)` entries; every composable pair must appear.
    pub fn from_table(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        entries: &[(usize, usize, usize)],
    ) -> Result<Self> {
        let n = morphisms.len();
        let mut map = HashMap::new();
        for &(g, f, h) in entries {
            if g >= n || f >= n || h >= n {
                return Err(FamError::Malformed("composition entry out of range".into()));
            }
            map.insert((g, f), h);
        }
        let ids = identities.clone();
        let mut missing = None;
        let cat = Self::from_fn(objects, morphisms.clone(), identities, |g, f| {
            if let Some(&h) = map.get(&(g, f)) {
                h
            } else if ids.contains(&g) {
                f
            } else if ids.contains(&f) {
                g
            } else {
                missing.get_or_insert((g, f));
                0
            }
        })?;
        if let Some((g, f)) = missing {
            return Err(FamError::Malformed(format!(
                "composite of {} after {} not given",
                morphisms[g].name, morphisms[f].name
            )));
        }
        Ok(cat)
    }

    fn assemble(objects: Vec<String>, morphisms: Vec<Morphism>, identities: Vec<usize>, table: Vec<u32>) -> Self {
        let k = objects.len();
        let mut homs = vec![Vec::new(); k * k];
        for (i, m) in morphisms.iter().enumerate() {
            homs[m.src * k + m.dst].push(i);
        }
        FinCategory { objects, morphisms, identities, table, homs }
    }

    /// The category with one object and only its identity.
    pub fn terminal() -> Self {
        Self::discrete(vec!["*".into()])
    }

    pub fn discrete(objects: Vec<String>) -> Self {
        let morphisms = objects
            .iter()
            .enumerate()
            .map(|(c, o)| Morphism { name: format!("id_{o}"), src: c, dst: c })
            .collect();
        let identities = (0..objects.len()).collect();
        Self::from_fn(objects, morphisms, identities, |g, _| g).expect("discrete category")
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, c: usize) -> &str {
        &self.objects[c]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, i: usize) -> &Morphism {
        &self.morphisms[i]
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn src(&self, i: usize) -> usize {
        self.morphisms[i].src
    }

    pub fn dst(&self, i: usize) -> usize {
        self.morphisms[i].dst
    }

    pub fn id(&self, c: usize) -> usize {
        self.identities[c]
    }

    pub fn is_identity(&self, i: usize) -> bool {
        self.identities[self.morphisms[i].src] == i
    }

    /// Morphisms `a → b` in index order.
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a * self.objects.len() + b]
    }

    /// All morphisms out of `a`, in index order.
    pub fn hom_from(&self, a: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&i| self.morphisms[i].src == a).collect()
    }

    /// All morphisms with target `b`, in index order.
    pub fn hom_into(&self, b: usize) -> Vec<usize> {
        (0..self.morphisms.len()).filter(|&i| self.morphisms[i].dst == b).collect()
    }

    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        let h = self.table[g * self.morphisms.len() + f];
        (h != NONE).then_some(h as usize)
    }

    /// `g ∘ f`; panics when `f` and `g` are not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f).unwrap_or_else(|| {
            panic!("{} and {} are not composable", self.morphisms[g].name, self.morphisms[f].name)
        })
    }

    /// Overwrite one composition entry. Used to build counterexamples.
    pub fn with_composite(mut self, g: usize, f: usize, h: usize) -> Self {
        let n = self.morphisms.len();
        self.table[g * n + f] = h as u32;
        self
    }

    pub fn opposite(&self) -> FinCategory {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| Morphism { name: format!("{}^op", m.name), src: m.dst, dst: m.src })
            .collect();
        let n = self.morphisms.len();
        let mut table = vec![NONE; n * n];
        for g in 0..n {
            for f in 0..n {
                // g ∘op f = f ∘ g
                table[g * n + f] = self.table[f * n + g];
            }
        }
        Self::assemble(self.objects.clone(), morphisms, self.identities.clone(), table)
    }

    /// Ranking of objects by the number of morphisms into them, largest first.
    /// For direct categories this puts higher-degree objects first.
    pub fn objects_by_incoming(&self) -> Vec<usize> {
        let k = self.objects.len();
        let mut order: Vec<usize> = (0..k).collect();
        let incoming = |c: usize| (0..k).map(|a| self.hom(a, c).len()).sum::<usize>();
        order.sort_by_key(|&c| (std::cmp::Reverse(incoming(c)), c));
        order
    }

    /// Full subcategory on the given objects, in the given order.
    pub fn full_subcategory(&self, objs: &[usize]) -> (FinCategory, Vec<usize>) {
        let mut keep = Vec::new();
        let mut pos = vec![None; self.objects.len()];
        for (k, &c) in objs.iter().enumerate() {
            pos[c] = Some(k);
        }
        for (i, m) in self.morphisms.iter().enumerate() {
            if pos[m.src].is_some() && pos[m.dst].is_some() {
                keep.push(i);
            }
        }
        let (sub, _) = self.subcategory_on(objs, &keep);
        (sub, keep)
    }

    /// Subcategory with the given objects and morphisms (assumed closed).
    pub fn subcategory_on(&self, objs: &[usize], mors: &[usize]) -> (FinCategory, Vec<Option<usize>>) {
        let mut opos = vec![None; self.objects.len()];
        for (k, &c) in objs.iter().enumerate() {
            opos[c] = Some(k);
        }
        let mut mpos = vec![None; self.morphisms.len()];
        for (k, &m) in mors.iter().enumerate() {
            mpos[m] = Some(k);
        }
        let objects = objs.iter().map(|&c| self.objects[c].clone()).collect();
        let morphisms: Vec<Morphism> = mors
            .iter()
            .map(|&m| {
                let mm = &self.morphisms[m];
                Morphism { name: mm.name.clone(), src: opos[mm.src].unwrap(), dst: opos[mm.dst].unwrap() }
            })
            .collect();
        let identities = objs.iter().map(|&c| mpos[self.identities[c]].unwrap()).collect();
        let n = morphisms.len();
        let mut table = vec![NONE; n * n];
        for (a, &g) in mors.iter().enumerate() {
            for (b, &f) in mors.iter().enumerate() {
                if let Some(h) = self.try_compose(g, f) {
                    table[a * n + b] = mpos[h].map(|x| x as u32).unwrap_or(NONE);
                }
            }
        }
        (Self::assemble(objects, morphisms, identities, table), mpos)
    }
}

/// Exhaustively check the category axioms; every violation is reported.
/// Keys constraining an isomorphism search: images must carry equal keys.
pub struct IsoKeys<'a, K> {
    pub obj_a: &'a dyn Fn(usize) -> K,
    pub obj_b: &'a dyn Fn(usize) -> K,
    pub mor_a: &'a dyn Fn(usize) -> K,
    pub mor_b: &'a dyn Fn(usize) -> K,
}

/// Visit the isomorphisms `a → b` (object map, morphism map) that preserve keys,
/// until `visit` returns false.
pub fn visit_isomorphisms<K: Ord + Clone>(
    a: &FinCategory,
    b: &FinCategory,
    keys: &IsoKeys<'_, K>,
    visit: &mut dyn FnMut(&[usize], &[usize]) -> bool,
) {
    let (k, n) = (a.n_objects(), a.n_morphisms());
    if k != b.n_objects() || n != b.n_morphisms() {
        return;
    }
    let sig = |c: &FinCategory, key: &dyn Fn(usize) -> K, x: usize, y: usize| {
        let mut v: Vec<K> = c.hom(x, y).iter().map(|&m| key(m)).collect();
        v.sort();
        v
    };
    let sig_a: Vec<Vec<Vec<K>>> = (0..k).map(|x| (0..k).map(|y| sig(a, keys.mor_a, x, y)).collect()).collect();
    let sig_b: Vec<Vec<Vec<K>>> = (0..k).map(|x| (0..k).map(|y| sig(b, keys.mor_b, x, y)).collect()).collect();
    let ka: Vec<K> = (0..k).map(|x| (keys.obj_a)(x)).collect();
    let kb: Vec<K> = (0..k).map(|x| (keys.obj_b)(x)).collect();
    let mka: Vec<K> = (0..n).map(|m| (keys.mor_a)(m)).collect();
    let mkb: Vec<K> = (0..n).map(|m| (keys.mor_b)(m)).collect();
    // composable triples (g, f, g∘f) indexed by each participant
    let mut triples: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
    for g in 0..n {
        for f in 0..n {
            if let Some(h) = a.try_compose(g, f) {
                if a.is_identity(g) || a.is_identity(f) {
                    continue;
                }
                triples[g].push((g, f, h));
                triples[f].push((g, f, h));
                triples[h].push((g, f, h));
            }
        }
    }
    struct Search<'s, K> {
        a: &'s FinCategory,
        b: &'s FinCategory,
        sig_a: &'s [Vec<Vec<K>>],
        sig_b: &'s [Vec<Vec<K>>],
        ka: &'s [K],
        kb: &'s [K],
        mka: &'s [K],
        mkb: &'s [K],
        triples: &'s [Vec<(usize, usize, usize)>],
        obj: Vec<usize>,
        used_obj: Vec<bool>,
        mor: Vec<usize>,
        used_mor: Vec<bool>,
        order: Vec<usize>,
        stop: bool,
    }
    const UNSET: usize = usize::MAX;
    impl<K: Ord + Clone> Search<'_, K> {
        fn objects(&mut self, x: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) {
            if self.stop {
                return;
            }
            if x == self.a.n_objects() {
                self.prepare_morphisms();
                self.morphisms(0, visit);
                return;
            }
            for y in 0..self.b.n_objects() {
                if self.used_obj[y] || self.ka[x] != self.kb[y] {
                    continue;
                }
                let ok = (0..=x).all(|z| {
                    let w = if z == x { y } else { self.obj[z] };
                    self.sig_a[x][z] == self.sig_b[y][w] && self.sig_a[z][x] == self.sig_b[w][y]
                });
                if !ok {
                    continue;
                }
                self.obj[x] = y;
                self.used_obj[y] = true;
                self.objects(x + 1, visit);
                self.used_obj[y] = false;
                self.obj[x] = UNSET;
                if self.stop {
                    return;
                }
            }
        }

        fn candidates(&self, m: usize) -> Vec<usize> {
            let f = self.a.morphism(m);
            if self.a.is_identity(m) {
                return vec![self.b.id(self.obj[f.src])];
            }
            self.b.hom(self.obj[f.src], self.obj[f.dst]).iter().copied().filter(|&m2| self.mka[m] == self.mkb[m2]).collect()
        }

        fn prepare_morphisms(&mut self) {
            let mut order: Vec<(usize, usize)> = (0..self.a.n_morphisms()).map(|m| (self.candidates(m).len(), m)).collect();
            order.sort();
            self.order = order.into_iter().map(|(_, m)| m).collect();
        }

        fn morphisms(&mut self, j: usize, visit: &mut dyn FnMut(&[usize], &[usize]) -> bool) {
            if self.stop {
                return;
            }
            if j == self.order.len() {
                if !visit(&self.obj, &self.mor) {
                    self.stop = true;
                }
                return;
            }
            let m = self.order[j];
            for m2 in self.candidates(m) {
                if self.used_mor[m2] {
                    continue;
                }
                self.mor[m] = m2;
                let ok = self.triples[m].iter().all(|&(g, f, h)| {
                    let (g2, f2, h2) = (self.mor[g], self.mor[f], self.mor[h]);
                    g2 == UNSET || f2 == UNSET || h2 == UNSET || self.b.try_compose(g2, f2) == Some(h2)
                });
                if ok {
                    self.used_mor[m2] = true;
                    self.morphisms(j + 1, visit);
                    self.used_mor[m2] = false;
                }
                self.mor[m] = UNSET;
                if self.stop {
                    return;
                }
            }
        }
    }
    let mut s = Search {
        a,
        b,
        sig_a: &sig_a,
        sig_b: &sig_b,
        ka: &ka,
        kb: &kb,
        mka: &mka,
        mkb: &mkb,
        triples: &triples,
        obj: vec![UNSET; k],
        used_obj: vec![false; k],
        mor: vec![UNSET; n],
        used_mor: vec![false; n],
        order: Vec::new(),
        stop: false,
    };
    s.objects(0, visit);
}

/// The first key-preserving isomorphism `a → b`, if any.
pub fn find_isomorphism<K: Ord + Clone>(a: &FinCategory, b: &FinCategory, keys: &IsoKeys<'_, K>) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut found = None;
    visit_isomorphisms(a, b, keys, &mut |o, m| {
        found = Some((o.to_vec(), m.to_vec()));
        false
    });
    found
}

pub fn check_category_laws(c: &FinCategory) -> Report {
    let mut r = Report::new("category_laws");
    let n = c.n_morphisms();
    let name = |i: usize| c.morphism(i).name.clone();
    for g in 0..n {
        for f in 0..n {
            let composable = c.dst(f) == c.src(g);
            let entry = c.try_compose(g, f);
            match (composable, entry) {
                (true, Some(h)) => r.check(
                    c.src(h) == c.src(f) && c.dst(h) == c.dst(g),
                    || format!("{} ∘ {}", name(g), name(f)),
                    || format!("composite {} has wrong endpoints", name(h)),
                ),
                (true, None) => r.check(false, || format!("{} ∘ {}", name(g), name(f)), || "composite missing".into()),
                (false, Some(h)) => r.check(
                    false,
                    || format!("{} ∘ {}", name(g), name(f)),
                    || format!("defined as {} on a non-composable pair", name(h)),
                ),
                (false, None) => {}
            }
        }
    }
    for f in 0..n {
        let (s, t) = (c.src(f), c.dst(f));
        let left = c.try_compose(c.id(t), f);
        r.check(left == Some(f), || format!("id ∘ {}", name(f)), || format!("got {:?}", left.map(name)));
        let right = c.try_compose(f, c.id(s));
        r.check(right == Some(f), || format!("{} ∘ id", name(f)), || format!("got {:?}", right.map(name)));
    }
    for h in 0..n {
        for g in 0..n {
            if c.dst(g) != c.src(h) {
                continue;
            }
            let Some(hg) = c.try_compose(h, g) else { continue };
            for f in c.hom_into_src(g) {
                let a = c.try_compose(g, f).and_then(|gf| c.try_compose(h, gf));
                let b = c.try_compose(hg, f);
                r.check(
                    a == b,
                    || format!("{} ∘ {} ∘ {}", name(h), name(g), name(f)),
                    || format!("h∘(g∘f) = {:?} but (h∘g)∘f = {:?}", a.map(name), b.map(name)),
                );
            }
        }
    }
    r
}

impl FinCategory {
    /// All morphisms whose target is the source of `g`.
    fn hom_into_src(&self, g: usize) -> Vec<usize> {
        let s = self.src(g);
        (0..self.n_objects()).flat_map(|a| self.hom(a, s).iter().copied()).collect()
    }
}

/// A functor between finite categories, given by object and morphism maps.
#[derive(Debug, Clone)]
pub struct CatFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj: Vec<usize>,
    pub mor: Vec<usize>,
}

impl CatFunctor {
    pub fn identity(c: &Arc<FinCategory>) -> Self {
        CatFunctor {
            source: c.clone(),
            target: c.clone(),
            obj: (0..c.n_objects()).collect(),
            mor: (0..c.n_morphisms()).collect(),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &CatFunctor) -> CatFunctor {
        CatFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            obj: self.obj.iter().map(|&o| other.obj[o]).collect(),
            mor: self.mor.iter().map(|&m| other.mor[m]).collect(),
        }
    }

    /// Check endpoints, identities and composition exhaustively.
    pub fn check(&self) -> Report {
        let (s, t) = (&self.source, &self.target);
        let mut r = Report::new("functor_laws");
        if self.obj.len() != s.n_objects() || self.mor.len() != s.n_morphisms() {
            r.fail("shape", "object or morphism map has the wrong length");
            return r;
        }
        for i in 0..s.n_morphisms() {
            let m = self.mor[i];
            r.check(
                t.src(m) == self.obj[s.src(i)] && t.dst(m) == self.obj[s.dst(i)],
                || s.morphism(i).name.clone(),
                || format!("image {} has wrong endpoints", t.morphism(m).name),
            );
        }
        for c in 0..s.n_objects() {
            r.check(
                self.mor[s.id(c)] == t.id(self.obj[c]),
                || format!("id_{}", s.object_name(c)),
                || "identity not preserved".into(),
            );
        }
        for g in 0..s.n_morphisms() {
            for f in 0..s.n_morphisms() {
                if let Some(gf) = s.try_compose(g, f) {
                    let img = t.try_compose(self.mor[g], self.mor[f]);
                    r.check(
                        img == Some(self.mor[gf]),
                        || format!("{} ∘ {}", s.morphism(g).name, s.morphism(f).name),
                        || "composition not preserved".into(),
                    );
                }
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// Generators and relations for a finitely presented category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    /// Pairs of parallel words (application order). An empty side denotes
    /// the identity at the other side's source. A longer side rewrites to a
    /// shorter one; equal-length pairs rewrite left to right.
    pub relations: Vec<(Vec<usize>, Vec<usize>)>,
    pub cap: usize,
}

fn shortlex(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

struct Rewriter {
    rules: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Rewriter {
    const MAX_STEPS: usize = 100_000;

    fn normal_form(&self, mut w: Vec<usize>) -> Result<Vec<usize>> {
        for _ in 0..Self::MAX_STEPS {
            let hit = self.rules.iter().find_map(|(lhs, rhs)| {
                if lhs.len() > w.len() {
                    return None;
                }
                (0..=w.len() - lhs.len()).find(|&p| w[p..p + lhs.len()] == lhs[..]).map(|p| (p, lhs.len(), rhs))
            });
            match hit {
                Some((p, n, rhs)) => {
                    w.splice(p..p + n, rhs.iter().copied());
                }
                None => return Ok(w),
            }
        }
        Err(FamError::MalformedRelation("rewriting does not terminate".into()))
    }
}

impl Presentation {
    fn word_endpoints(&self, w: &[usize]) -> Result<Option<(usize, usize)>> {
        if w.is_empty() {
            return Ok(None);
        }
        for &g in w {
            if g >= self.generators.len() {
                return Err(FamError::MalformedRelation(format!("unknown generator index {g}")));
            }
        }
        for pair in w.windows(2) {
            if self.generators[pair[0]].dst != self.generators[pair[1]].src {
                return Err(FamError::MalformedRelation(format!(
                    "{} then {} is not composable",
                    self.generators[pair[0]].name, self.generators[pair[1]].name
                )));
            }
        }
        Ok(Some((self.generators[w[0]].src, self.generators[*w.last().unwrap()].dst)))
    }

    fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(FamError::Malformed("cap must be positive".into()));
        }
        for g in &self.generators {
            if g.src >= self.objects.len() || g.dst >= self.objects.len() {
                return Err(FamError::Malformed(format!("generator {} has unknown endpoint", g.name)));
            }
        }
        for (l, r) in &self.relations {
            match (self.word_endpoints(l)?, self.word_endpoints(r)?) {
                (None, None) => return Err(FamError::MalformedRelation("both sides empty".into())),
                (Some((s, t)), None) | (None, Some((s, t))) if s != t => {
                    return Err(FamError::MalformedRelation("word equated to an identity is not an endomorphism".into()))
                }
                (Some(a), Some(b)) if a != b => {
                    return Err(FamError::MalformedRelation("sides are not parallel".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Quotient of the free category on the generators by the relations.
pub fn build_from_presentation(p: &Presentation) -> Result<FinCategory> {
    build_with_words(p).map(|(c, _)| c)
}

/// As [`build_from_presentation`], also returning the normal-form word of each morphism.
pub fn build_with_words(p: &Presentation) -> Result<(FinCategory, Vec<Vec<usize>>)> {
    p.validate()?;
    let rules = p
        .relations
        .iter()
        .filter(|(l, r)| l != r)
        .map(|(l, r)| {
            // longer words rewrite to shorter ones; equal lengths follow the stated direction
            if r.len() > l.len() {
                (r.clone(), l.clone())
            } else {
                (l.clone(), r.clone())
            }
        })
        .collect();
    let rw = Rewriter { rules };
    // key: (src, normal-form word)
    let mut seen: BTreeMap<(usize, Vec<usize>), ()> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for c in 0..p.objects.len() {
        seen.insert((c, Vec::new()), ());
        queue.push_back((c, Vec::new()));
    }
    let dst_of = |src: usize, w: &[usize]| w.last().map(|&g| p.generators[g].dst).unwrap_or(src);
    while let Some((s, w)) = queue.pop_front() {
        let t = dst_of(s, &w);
        for (gi, g) in p.generators.iter().enumerate() {
            if g.src != t {
                continue;
            }
            let mut ext = w.clone();
            ext.push(gi);
            let nf = rw.normal_form(ext)?;
            let key = (s, nf);
            if !seen.contains_key(&key) {
                if seen.len() >= p.cap {
                    return Err(FamError::CapExceeded { cap: p.cap });
                }
                seen.insert(key.clone(), ());
                queue.push_back(key);
            }
        }
    }
    let mut keys: Vec<(usize, Vec<usize>)> = seen.into_keys().collect();
    keys.sort_by(|a, b| shortlex(&a.1, &b.1).then(a.0.cmp(&b.0)));
    let index: HashMap<(usize, Vec<usize>), usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let morphisms: Vec<Morphism> = keys
        .iter()
        .map(|(s, w)| Morphism {
            name: if w.is_empty() {
                format!("id_{}", p.objects[*s])
            } else {
                w.iter().map(|&g| p.generators[g].name.as_str()).collect::<Vec<_>>().join(";")
            },
            src: *s,
            dst: dst_of(*s, w),
        })
        .collect();
    let identities = (0..p.objects.len()).map(|c| index[&(c, Vec::new())]).collect();
    let mut failure = None;
    let cat = FinCategory::from_fn(p.objects.clone(), morphisms, identities, |g, f| {
        let (s, wf) = &keys[f];
        let mut w = wf.clone();
        for &gen in &keys[g].1 {
            w.push(gen);
            match rw.normal_form(w) {
                Ok(nf) => w = nf,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f;
                }
            }
        }
        index[&(*s, w)]
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((cat, keys.into_iter().map(|(_, w)| w).collect()))
}

/// A generating function between finite sets `0..n`.
#[derive(Debug, Clone)]
pub struct FunctionGenerator {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub map: Vec<usize>,
}

/// The subcategory of finite sets generated by the given functions, with the
/// shortlex-least generating word of every morphism. Objects are `(name, size)`.
pub fn generated_by_functions(
    objects: &[(String, usize)],
    gens: &[FunctionGenerator],
    cap: usize,
) -> Result<(FinCategory, Vec<Vec<usize>>)> {
    for g in gens {
        if g.src >= objects.len()
            || g.dst >= objects.len()
            || g.map.len() != objects[g.src].1
            || g.map.iter().any(|&v| v >= objects[g.dst].1)
        {
            return Err(FamError::Malformed(format!("generator {} is not a function", g.name)));
        }
    }
    type Key = (usize, usize, Vec<usize>);
    let mut found: HashMap<Key, Vec<usize>> = HashMap::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    for (c, (_, n)) in objects.iter().enumerate() {
        let k = (c, c, (0..*n).collect());
        found.insert(k.clone(), Vec::new());
        queue.push_back(k);
    }
    while let Some(key) = queue.pop_front() {
        let word = found[&key].clone();
        for (gi, g) in gens.iter().enumerate() {
            if g.src != key.1 {
                continue;
            }
            let f: Vec<usize> = key.2.iter().map(|&x| g.map[x]).collect();
            let nk = (key.0, g.dst, f);
            if !found.contains_key(&nk) {
                if found.len() >= cap {
                    return Err(FamError::CapExceeded { cap });
                }
                let mut w = word.clone();
                w.push(gi);
                found.insert(nk.clone(), w);
                queue.push_back(nk);
            }
        }
    }
    let mut entries: Vec<(Key, Vec<usize>)> = found.into_iter().collect();
    entries.sort_by(|a, b| shortlex(&a.1, &b.1).then(a.0 .0.cmp(&b.0 .0)));
    let index: HashMap<Key, usize> = entries.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
    let morphisms = entries
        .iter()
        .map(|((s, t, _), w)| Morphism {
            name: if w.is_empty() {
                format!("id_{}", objects[*s].0)
            } else {
                w.iter().map(|&g| gens[g].name.as_str()).collect::<Vec<_>>().join(";")
            },
            src: *s,
            dst: *t,
        })
        .collect();
    let identities = (0..objects.len())
        .map(|c| index[&(c, c, (0..objects[c].1).collect())])
        .collect();
    let cat = FinCategory::from_fn(objects.iter().map(|o| o.0.clone()).collect(), morphisms, identities, |g, f| {
        let (s, _, ff) = &entries[f].0;
        let (_, t, gg) = &entries[g].0;
        index[&(*s, *t, ff.iter().map(|&x| gg[x]).collect())]
    })?;
    let words = entries.into_iter().map(|(_, w)| w).collect();
    Ok((cat, words))
}

/// The walking parallel pair `0 ⇉ 1`, shared so graphs compare cheaply.
pub fn g1() -> Arc<FinCategory> {
    static G1: std::sync::OnceLock<Arc<FinCategory>> = std::sync::OnceLock::new();
    G1.get_or_init(|| Arc::new(graph_index())).clone()
}

/// The walking parallel pair `0 ⇉ 1` with source `s` and target `t`.
pub fn graph_index() -> FinCategory {
    build_from_presentation(&Presentation {
        objects: vec!["0".into(), "1".into()],
        generators: vec![
            Generator { name: "s".into(), src: 0, dst: 1 },
            Generator { name: "t".into(), src: 0, dst: 1 },
        ],
        relations: vec![],
        cap: 16,
    })
    .expect("graph index category")
}

/// Presentation of the semicube category truncated at dimension `n`:
/// faces `d{k}_{i}{e}: s^{k-1} → s^k` for `1 ≤ i ≤ k`, `e ∈ {0,1}`, subject to
/// `d_{j,e'} ∘ d_{i,e} = d_{i,e} ∘ d_{j-1,e'}` for `i < j`, oriented so that
/// normal forms insert coordinates in increasing position order.
pub fn semicube_presentation(n: usize) -> Presentation {
    let objects: Vec<String> = (0..=n).map(|k| format!("s{k}")).collect();
    let mut generators = Vec::new();
    let mut gid = HashMap::new();
    for k in 1..=n {
        for i in 1..=k {
            for e in 0..2 {
                gid.insert((k, i, e), generators.len());
                generators.push(Generator { name: format!("d{k}_{i}{e}"), src: k - 1, dst: k });
            }
        }
    }
    let mut relations = Vec::new();
    for k in 2..=n {
        // s^{k-2} → s^{k-1} → s^k
        for j in 2..=k {
            for i in 1..j {
                for e in 0..2 {
                    for e2 in 0..2 {
                        let lhs = vec![gid[&(k - 1, i, e)], gid[&(k, j, e2)]];
                        let rhs = vec![gid[&(k - 1, j - 1, e2)], gid[&(k, i, e)]];
                        relations.push((rhs, lhs));
                    }
                }
            }
        }
    }
    Presentation { objects, generators, relations, cap: 100_000 }
}

/// The semicube category `□_δ,≤n`.
pub fn semicube(n: usize) -> FinCategory {
    build_from_presentation(&semicube_presentation(n)).expect("semicube presentation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_isomorphisms(a: &FinCategory, b: &FinCategory) -> usize {
        let unit = |_: usize| ();
        let keys = IsoKeys { obj_a: &unit, obj_b: &unit, mor_a: &unit, mor_b: &unit };
        let mut n = 0;
        visit_isomorphisms(a, b, &keys, &mut |_, _| {
            n += 1;
            true
        });
        n
    }

    #[test]
    fn automorphism_counts() {
        // swap the two endpoint maps
        assert_eq!(count_isomorphisms(&g1(), &g1()), 2);
        // coordinate swap and the simultaneous reflection of both coordinates;
        // reflecting one coordinate alone would reverse only half of the edges
        assert_eq!(count_isomorphisms(&semicube(2), &semicube(2)), 4);
        assert_eq!(count_isomorphisms(&semicube(1), &semicube(2)), 0);
        let (o, m) = find_isomorphism(&semicube(2), &semicube(2), &IsoKeys { obj_a: &|x| x, obj_b: &|x| x, mor_a: &|_| 0, mor_b: &|_| 0 }).unwrap();
        assert_eq!(o, vec![0, 1, 2]);
        let f = CatFunctor { source: Arc::new(semicube(2)), target: Arc::new(semicube(2)), obj: o, mor: m };
        assert!(f.check().passed());
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn terminal_has_one_morphism() {
        let p = Presentation { objects: vec!["*".into()], generators: vec![], relations: vec![], cap: 4 };
        let c = build_from_presentation(&p).unwrap();
        assert_eq!(c.n_morphisms(), 1);
        assert!(check_category_laws(&c).passed());
    }

    #[test]
    fn parallel_pair_has_four_morphisms() {
        let g = graph_index();
        assert_eq!(g.n_morphisms(), 4);
        assert_eq!(g.hom(0, 1).len(), 2);
        assert!(check_category_laws(&g).passed());
    }

    #[test]
    fn semicube_hom_counts_match_face_oracle() {
        // A face s^m → s^n picks m free coordinates and fixes the rest to 0 or 1.
        let c = semicube(2);
        assert_eq!(c.hom(0, 2).len(), 4);
        assert_eq!(c.hom(1, 2).len(), 4);
        let c3 = semicube(3);
        for m in 0..=3 {
            for n in 0..=3 {
                let expected = if m <= n { binom(n, m) << (n - m) } else { 0 };
                assert_eq!(c3.hom(m, n).len(), expected, "Hom(s{m}, s{n})");
            }
        }
        assert!(check_category_laws(&c3).passed());
    }

    #[test]
    fn corrupted_table_reports_one_violation() {
        let g = graph_index();
        let s = g.morphism_index("s").unwrap();
        let t = g.morphism_index("t").unwrap();
        let id1 = g.id(1);
        let bad = g.with_composite(id1, s, t);
        let r = check_category_laws(&bad);
        assert!(!r.passed());
        assert_eq!(r.failures.len(), 1, "{:?}", r.failures);
    }

    #[test]
    fn cap_is_enforced() {
        let p = Presentation {
            objects: vec!["*".into()],
            generators: vec![Generator { name: "f".into(), src: 0, dst: 0 }],
            relations: vec![],
            cap: 10,
        };
        assert_eq!(build_from_presentation(&p), Err(FamError::CapExceeded { cap: 10 }));
    }

    #[test]
    fn non_parallel_relation_is_rejected() {
        let p = Presentation {
            objects: vec!["0".into(), "1".into()],
            generators: vec![Generator { name: "f".into(), src: 0, dst: 1 }],
            relations: vec![(vec![0], vec![])],
            cap: 10,
        };
        assert!(matches!(build_from_presentation(&p), Err(FamError::MalformedRelation(_))));
    }

    #[test]
    fn reflexive_graph_index_has_seven_morphisms() {
        let p = Presentation {
            objects: vec!["0".into(), "1".into()],
            generators: vec![
                Generator { name: "s".into(), src: 0, dst: 1 },
                Generator { name: "t".into(), src: 0, dst: 1 },
                Generator { name: "r".into(), src: 1, dst: 0 },
            ],
            relations: vec![(vec![0, 2], vec![]), (vec![1, 2], vec![])],
            cap: 50,
        };
        let c = build_from_presentation(&p).unwrap();
        assert_eq!(c.n_morphisms(), 7);
        assert!(check_category_laws(&c).passed());
    }

    #[test]
    fn generated_simplex_category_counts() {
        // Δ≤2 from cofaces and codegeneracies; |Hom([m],[n])| = C(m+n+1, m+1).
        let objects: Vec<(String, usize)> = (0..3).map(|n| (format!("[{n}]"), n + 1)).collect();
        let mut gens = Vec::new();
        for n in 1..=2 {
            for i in 0..=n {
                let map = (0..n).map(|x| if x < i { x } else { x + 1 }).collect();
                gens.push(FunctionGenerator { name: format!("d{n}_{i}"), src: n - 1, dst: n, map });
            }
        }
        for n in 0..2 {
            for i in 0..=n {
                let map = (0..n + 2).map(|x| if x <= i { x } else { x - 1 }).collect();
                gens.push(FunctionGenerator { name: format!("s{n}_{i}"), src: n + 1, dst: n, map });
            }
        }
        let (c, words) = generated_by_functions(&objects, &gens, 1000).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                assert_eq!(c.hom(m, n).len(), binom(m + n + 1, m + 1));
            }
        }
        assert_eq!(words.len(), c.n_morphisms());
        assert!(check_category_laws(&c).passed());
    }

    #[test]
    fn opposite_is_a_category() {
        let c = semicube(2).opposite();
        assert!(check_category_laws(&c).passed());
        assert_eq!(c.hom(2, 0).len(), 4);
    }

    #[test]
    fn rebuild_is_deterministic() {
        let p = semicube_presentation(2);
        assert_eq!(build_from_presentation(&p).unwrap(), build_from_presentation(&p).unwrap());
    }
}
