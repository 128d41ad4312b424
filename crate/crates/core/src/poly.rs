//! Split opfibrations given by classifying functors, polynomials between finite
//! categories, their evaluation on presheaves, composition and familial replacement.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{FamError, Result};
use crate::famrep::{evaluate, ops_presheaf, Family, OperationCell};
use crate::fincat::{visit_isomorphisms, CatFunctor, FinCategory, IsoKeys, Morphism};
use crate::presheaf::{category_of_elements, same_base, Elements, LeastUnionFind, Presheaf, PresheafMorphism};
use crate::report::Report;

/// The opfibration `∮Φ → B` of a functor `Φ: B → Cat`.
#[derive(Debug, Clone)]
pub struct ClassifiedOpfibration {
    pub base: Arc<FinCategory>,
    pub fibers: Vec<Arc<FinCategory>>,
    /// `Φ(i): Φ(b) → Φ(b′)` for each `i: b → b′`.
    pub transport: Vec<CatFunctor>,
    pub total: Arc<FinCategory>,
    /// `(b, x)` of each total object.
    pub objects: Vec<(usize, usize)>,
    pub object_index: Vec<Vec<usize>>,
    /// `(i₀, x, i₁)` of each total morphism, with `i₁: Φ(i₀)(x) → x′`.
    pub morphisms: Vec<(usize, usize, usize)>,
    morphism_index: HashMap<(usize, usize, usize), usize>,
}

impl ClassifiedOpfibration {
    pub fn object(&self, b: usize, x: usize) -> usize {
        self.object_index[b][x]
    }

    pub fn morphism(&self, i0: usize, x: usize, i1: usize) -> usize {
        self.morphism_index[&(i0, x, i1)]
    }

    /// The cocartesian lift `(i₀, id)` at `x`.
    pub fn lift(&self, i0: usize, x: usize) -> usize {
        let y = self.transport[i0].obj[x];
        self.morphism(i0, x, self.fibers[self.base.dst(i0)].id(y))
    }

    /// The inclusion `J_b: Φ(b) → ∮Φ`.
    pub fn fiber_inclusion(&self, b: usize) -> CatFunctor {
        let f = &self.fibers[b];
        let idb = self.base.id(b);
        CatFunctor {
            source: f.clone(),
            target: self.total.clone(),
            obj: (0..f.n_objects()).map(|x| self.object(b, x)).collect(),
            mor: (0..f.n_morphisms()).map(|m| self.morphism(idb, f.src(m), m)).collect(),
        }
    }

    pub fn projection(&self) -> CatFunctor {
        CatFunctor {
            source: self.total.clone(),
            target: self.base.clone(),
            obj: self.objects.iter().map(|o| o.0).collect(),
            mor: self.morphisms.iter().map(|m| m.0).collect(),
        }
    }
}

/// `∮Φ`: objects `(b, x)`, morphisms `(i₀, i₁)`, composite
/// `(i′₀, i′₁) ∘ (i₀, i₁) = (i′₀ ∘ i₀, i′₁ ∘ Φ(i′₀)(i₁))`.
pub fn grothendieck(base: Arc<FinCategory>, fibers: Vec<Arc<FinCategory>>, transport: Vec<CatFunctor>) -> Result<ClassifiedOpfibration> {
    if fibers.len() != base.n_objects() || transport.len() != base.n_morphisms() {
        return Err(FamError::Malformed("one fiber per object and one transport per morphism required".into()));
    }
    for (i, t) in transport.iter().enumerate() {
        let (s, d) = (base.src(i), base.dst(i));
        let name = &base.morphism(i).name;
        if !same_base(&t.source, &fibers[s]) || !same_base(&t.target, &fibers[d]) {
            return Err(FamError::NonFunctorialInput(format!("transport along {name} has the wrong endpoints")));
        }
        if let Some(f) = t.check().failures.first() {
            return Err(FamError::NonFunctorialInput(format!("transport along {name}: {} {}", f.location, f.witness)));
        }
    }
    for b in 0..base.n_objects() {
        let t = &transport[base.id(b)];
        let f = &fibers[b];
        if t.obj.iter().enumerate().any(|(x, &y)| x != y) || t.mor.iter().enumerate().any(|(m, &n)| m != n) {
            return Err(FamError::NonFunctorialInput(format!("transport along id_{} is not the identity", f.n_objects())));
        }
    }
    for g in 0..base.n_morphisms() {
        for f in 0..base.n_morphisms() {
            let Some(h) = base.try_compose(g, f) else { continue };
            let comp = transport[f].then(&transport[g]);
            if comp.obj != transport[h].obj || comp.mor != transport[h].mor {
                return Err(FamError::NonFunctorialInput(format!(
                    "transport along {} ∘ {} is not the composite",
                    base.morphism(g).name,
                    base.morphism(f).name
                )));
            }
        }
    }
    let mut objects = Vec::new();
    let mut object_index = Vec::with_capacity(base.n_objects());
    let mut names = Vec::new();
    for b in 0..base.n_objects() {
        let mut row = Vec::with_capacity(fibers[b].n_objects());
        for x in 0..fibers[b].n_objects() {
            row.push(objects.len());
            objects.push((b, x));
            names.push(format!("({},{})", base.object_name(b), fibers[b].object_name(x)));
        }
        object_index.push(row);
    }
    let mut morphisms = Vec::new();
    let mut morphism_index = HashMap::new();
    let mut mors = Vec::new();
    for i0 in 0..base.n_morphisms() {
        let (b, b2) = (base.src(i0), base.dst(i0));
        let fib = &fibers[b2];
        for x in 0..fibers[b].n_objects() {
            let y = transport[i0].obj[x];
            for x2 in 0..fib.n_objects() {
                for &i1 in fib.hom(y, x2) {
                    morphism_index.insert((i0, x, i1), morphisms.len());
                    morphisms.push((i0, x, i1));
                    mors.push(Morphism {
                        name: format!("({},{}@{})", base.morphism(i0).name, fib.morphism(i1).name, fibers[b].object_name(x)),
                        src: object_index[b][x],
                        dst: object_index[b2][x2],
                    });
                }
            }
        }
    }
    let identities = objects.iter().map(|&(b, x)| morphism_index[&(base.id(b), x, fibers[b].id(x))]).collect();
    let total = FinCategory::from_fn(names, mors, identities, |g, f| {
        let (j0, _, j1) = morphisms[g];
        let (i0, x, i1) = morphisms[f];
        let h1 = fibers[base.dst(j0)].compose(j1, transport[j0].mor[i1]);
        morphism_index[&(base.compose(j0, i0), x, h1)]
    })?;
    Ok(ClassifiedOpfibration { base, fibers, transport, total: Arc::new(total), objects, object_index, morphisms, morphism_index })
}

/// `∫φ: ∫X → ∫Y` for a presheaf map `φ: X → Y`.
pub fn elements_functor(src: &Elements, dst: &Elements, phi: &PresheafMorphism) -> CatFunctor {
    CatFunctor {
        source: src.cat.clone(),
        target: dst.cat.clone(),
        obj: src.element.iter().map(|&(d, y)| dst.index[d][phi.comps[d][y]]).collect(),
        mor: (0..src.cat.n_morphisms())
            .map(|u| {
                let (d, y) = src.element[src.cat.dst(u)];
                dst.mor_index[src.proj_mor[u]][phi.comps[d][y]]
            })
            .collect(),
    }
}

/// A polynomial `C′ ← A → B → C` with `A → B` a split opfibration.
#[derive(Debug, Clone)]
pub struct Polynomial {
    pub name: String,
    /// `C′`.
    pub source: Arc<FinCategory>,
    /// `C`.
    pub target: Arc<FinCategory>,
    /// `p₂: A → B`.
    pub opf: ClassifiedOpfibration,
    /// `p₁: A → C′`.
    pub p1: CatFunctor,
    /// `p₃: B → C`.
    pub p3: CatFunctor,
    pub very_fibrous: bool,
    pub quasi_familial: bool,
    pub familial: bool,
}

impl Polynomial {
    /// `p₁` restricted to the fiber over `b`.
    pub fn fiber_leg(&self, b: usize) -> CatFunctor {
        self.opf.fiber_inclusion(b).then(&self.p1)
    }

    /// Functoriality of the legs and every claimed property.
    pub fn check(&self) -> Report {
        let mut r = Report::new(format!("polynomial {}", self.name));
        let mut p1 = self.p1.check();
        p1.check = "p1".into();
        r.absorb(p1);
        let mut p3 = self.p3.check();
        p3.check = "p3".into();
        r.absorb(p3);
        if self.very_fibrous {
            r.absorb(check_very_fibrous(self));
        }
        if self.familial {
            r.absorb(check_two_sided(self, true));
        } else if self.quasi_familial {
            r.absorb(check_two_sided(self, false));
        }
        r
    }
}

/// Every `i: c → F(d)` has exactly one lift with target `d`.
pub fn check_discrete_fibration(f: &CatFunctor) -> Report {
    let (s, t) = (&f.source, &f.target);
    let mut r = Report::new("discrete_fibration");
    for d in 0..s.n_objects() {
        let mut count = vec![0usize; t.n_morphisms()];
        for &m in &s.hom_into(d) {
            count[f.mor[m]] += 1;
        }
        for &i in &t.hom_into(f.obj[d]) {
            r.check(count[i] == 1, || format!("{} over {}", t.morphism(i).name, s.object_name(d)), || format!("{} lifts", count[i]));
        }
    }
    r
}

/// Whether `m` is cartesian for `f`.
pub fn is_cartesian(f: &CatFunctor, m: usize) -> bool {
    let (s, t) = (&f.source, &f.target);
    let (y1, y) = (s.src(m), s.dst(m));
    s.hom_into(y).into_iter().all(|k| {
        let y2 = s.src(k);
        t.hom(f.obj[y2], f.obj[y1]).iter().filter(|&&h| t.compose(f.mor[m], h) == f.mor[k]).all(|&h| {
            s.hom(y2, y1).iter().filter(|&&k2| f.mor[k2] == h && s.compose(m, k2) == k).count() == 1
        })
    })
}

/// Every `i: c → F(d)` has a cartesian lift.
pub fn check_fibration(f: &CatFunctor) -> Report {
    let (s, t) = (&f.source, &f.target);
    let mut r = Report::new("fibration");
    for d in 0..s.n_objects() {
        let into = s.hom_into(d);
        for &i in &t.hom_into(f.obj[d]) {
            let ok = into.iter().any(|&m| f.mor[m] == i && is_cartesian(f, m));
            r.check(ok, || format!("{} over {}", t.morphism(i).name, s.object_name(d)), || "no cartesian lift".into());
        }
    }
    r
}

/// `p₃` is a discrete fibration.
pub fn check_very_fibrous(p: &Polynomial) -> Report {
    let mut r = check_discrete_fibration(&p.p3);
    r.check = "very_fibrous".into();
    r
}

/// `(p₁, p₂)` is a (discrete) two-sided fibration and `p₃` a discrete fibration:
/// each fiber is (discretely) fibered over `C′`, cocartesian lifts lie over
/// identities, and transports preserve cartesian morphisms.
pub fn check_two_sided(p: &Polynomial, discrete: bool) -> Report {
    let mut r = Report::new(if discrete { "familial" } else { "quasi_familial" });
    r.absorb(check_very_fibrous(p));
    let opf = &p.opf;
    let c1 = &p.source;
    for b in 0..opf.base.n_objects() {
        let leg = p.fiber_leg(b);
        let mut sub = if discrete { check_discrete_fibration(&leg) } else { check_fibration(&leg) };
        sub.check = format!("fiber over {}", opf.base.object_name(b));
        r.absorb(sub);
    }
    for (i0, m) in opf.base.morphisms().iter().enumerate() {
        for x in 0..opf.fibers[m.src].n_objects() {
            let k = p.p1.mor[opf.lift(i0, x)];
            r.check(c1.is_identity(k), || format!("lift of {} at {}", m.name, opf.fibers[m.src].object_name(x)), || {
                format!("lies over {}", c1.morphism(k).name)
            });
        }
        if !discrete {
            let leg = p.fiber_leg(m.src);
            let leg2 = p.fiber_leg(m.dst);
            for u in 0..opf.fibers[m.src].n_morphisms() {
                if is_cartesian(&leg, u) {
                    let v = opf.transport[i0].mor[u];
                    r.check(is_cartesian(&leg2, v), || format!("transport along {}", m.name), || {
                        format!("{} is not sent to a cartesian morphism", opf.fibers[m.src].morphism(u).name)
                    });
                }
            }
        }
    }
    r
}

/// `C ← C → C → C` with terminal fibers.
pub fn identity_polynomial(c: &Arc<FinCategory>) -> Polynomial {
    let one = Arc::new(FinCategory::terminal());
    let fibers = vec![one.clone(); c.n_objects()];
    let transport = (0..c.n_morphisms()).map(|_| CatFunctor::identity(&one)).collect();
    let opf = grothendieck(c.clone(), fibers, transport).expect("terminal fibers");
    let p1 = opf.projection().clone();
    let p1 = CatFunctor { target: c.clone(), ..p1 };
    Polynomial {
        name: format!("1_{}", c.n_objects()),
        source: c.clone(),
        target: c.clone(),
        p3: CatFunctor::identity(c),
        p1,
        opf,
        very_fibrous: true,
        quasi_familial: false,
        familial: false,
    }
}

/// `C ← C^→ → C → C` with legs `dom`, `cod`, identity; the fiber over `c` is `C/c`.
pub fn arrow_polynomial(c: &Arc<FinCategory>) -> Result<Polynomial> {
    let mut fibers = Vec::with_capacity(c.n_objects());
    // per slice: underlying morphism of each slice morphism, and (k, a, b) ↦ index
    let mut slices: Vec<(Vec<usize>, HashMap<(usize, usize, usize), usize>)> = Vec::new();
    for o in 0..c.n_objects() {
        let objs = c.hom_into(o);
        let mut mors = Vec::new();
        let mut under = Vec::new();
        let mut index = HashMap::new();
        for (a, &f) in objs.iter().enumerate() {
            for (b, &g) in objs.iter().enumerate() {
                for &k in c.hom(c.src(f), c.src(g)) {
                    if c.compose(g, k) == f {
                        index.insert((k, a, b), mors.len());
                        under.push(k);
                        mors.push(Morphism { name: c.morphism(k).name.clone(), src: a, dst: b });
                    }
                }
            }
        }
        let ends: Vec<(usize, usize)> = mors.iter().map(|m| (m.src, m.dst)).collect();
        let names = objs.iter().map(|&f| c.morphism(f).name.clone()).collect();
        let ids = objs.iter().enumerate().map(|(a, &f)| index[&(c.id(c.src(f)), a, a)]).collect();
        let cat = FinCategory::from_fn(names, mors, ids, |g, f| index[&(c.compose(under[g], under[f]), ends[f].0, ends[g].1)])?;
        fibers.push(Arc::new(cat));
        slices.push((under, index));
    }
    let mut transport = Vec::with_capacity(c.n_morphisms());
    for i in 0..c.n_morphisms() {
        let (s, d) = (c.src(i), c.dst(i));
        let (src_objs, dst_objs) = (c.hom_into(s), c.hom_into(d));
        let pos: HashMap<usize, usize> = dst_objs.iter().enumerate().map(|(k, &f)| (f, k)).collect();
        let obj: Vec<usize> = src_objs.iter().map(|&f| pos[&c.compose(i, f)]).collect();
        let fs = &fibers[s];
        let mor = (0..fs.n_morphisms()).map(|m| slices[d].1[&(slices[s].0[m], obj[fs.src(m)], obj[fs.dst(m)])]).collect();
        transport.push(CatFunctor { source: fibers[s].clone(), target: fibers[d].clone(), obj, mor });
    }
    let opf = grothendieck(c.clone(), fibers, transport)?;
    let p1 = CatFunctor {
        source: opf.total.clone(),
        target: c.clone(),
        obj: opf.objects.iter().map(|&(o, x)| c.src(c.hom_into(o)[x])).collect(),
        mor: opf.morphisms.iter().map(|&(i0, _, i1)| slices[c.dst(i0)].0[i1]).collect(),
    };
    Ok(Polynomial {
        name: "arrow".into(),
        source: c.clone(),
        target: c.clone(),
        p3: CatFunctor::identity(c),
        p1,
        opf,
        very_fibrous: true,
        quasi_familial: true,
        familial: true,
    })
}

/// `γ(S, E)`: `B = ∫S` on the operations up to `bound`, `A = ∮(∫E)`.
pub fn gamma(rep: &dyn Family, bound: usize) -> Result<Polynomial> {
    let ops = ops_presheaf(rep, bound)?;
    let el = category_of_elements(&ops.ps);
    let b = el.cat.clone();
    let fib_el: Vec<Elements> = el.element.iter().map(|&(c, k)| category_of_elements(&rep.arity(c, &ops.ops[c][k]))).collect();
    let transport = (0..b.n_morphisms())
        .map(|u| {
            let (c, k) = el.element[b.dst(u)];
            let phi = rep.arity_map(el.proj_mor[u], &ops.ops[c][k]);
            elements_functor(&fib_el[b.src(u)], &fib_el[b.dst(u)], &phi)
        })
        .collect();
    let opf = grothendieck(b.clone(), fib_el.iter().map(|e| e.cat.clone()).collect(), transport)?;
    let p1 = CatFunctor {
        source: opf.total.clone(),
        target: rep.source_base().clone(),
        obj: opf.objects.iter().map(|&(bb, x)| fib_el[bb].element[x].0).collect(),
        mor: opf.morphisms.iter().map(|&(i0, _, i1)| fib_el[b.dst(i0)].proj_mor[i1]).collect(),
    };
    let p3 = CatFunctor { source: b, target: rep.target_base().clone(), obj: el.element.iter().map(|e| e.0).collect(), mor: el.proj_mor.clone() };
    Ok(Polynomial {
        name: format!("γ({})", rep.name()),
        source: rep.source_base().clone(),
        target: rep.target_base().clone(),
        opf,
        p1,
        p3,
        very_fibrous: true,
        quasi_familial: true,
        familial: true,
    })
}

/// `∮(Φ ∘ u)` over `C` for `u: C → B`, with the functor `∮u` to the total of `p`.
pub fn pullback_opfibration(p: &ClassifiedOpfibration, u: &CatFunctor) -> Result<(ClassifiedOpfibration, CatFunctor)> {
    if !same_base(&u.target, &p.base) {
        return Err(FamError::BaseMismatch);
    }
    let fibers = u.obj.iter().map(|&b| p.fibers[b].clone()).collect();
    let transport = u.mor.iter().map(|&i| p.transport[i].clone()).collect();
    let q = grothendieck(u.source.clone(), fibers, transport)?;
    let over = CatFunctor {
        source: q.total.clone(),
        target: p.total.clone(),
        obj: q.objects.iter().map(|&(c, x)| p.object(u.obj[c], x)).collect(),
        mor: q.morphisms.iter().map(|&(j0, x, j1)| p.morphism(u.mor[j0], x, j1)).collect(),
    };
    Ok((q, over))
}

/// The strict pullback `A ×_C B` of `f: A → C` and `g: B → C`, with its projections.
pub fn strict_pullback(f: &CatFunctor, g: &CatFunctor) -> Result<(Arc<FinCategory>, CatFunctor, CatFunctor)> {
    if !same_base(&f.target, &g.target) {
        return Err(FamError::BaseMismatch);
    }
    let (a, b) = (&f.source, &g.source);
    let mut objs = Vec::new();
    let mut obj_index = HashMap::new();
    for x in 0..a.n_objects() {
        for y in 0..b.n_objects() {
            if f.obj[x] == g.obj[y] {
                obj_index.insert((x, y), objs.len());
                objs.push((x, y));
            }
        }
    }
    let mut by_image: HashMap<usize, Vec<usize>> = HashMap::new();
    for n in 0..b.n_morphisms() {
        by_image.entry(g.mor[n]).or_default().push(n);
    }
    let mut mors = Vec::new();
    let mut mor_index = HashMap::new();
    let mut named = Vec::new();
    for m in 0..a.n_morphisms() {
        for &n in by_image.get(&f.mor[m]).map(Vec::as_slice).unwrap_or(&[]) {
            mor_index.insert((m, n), mors.len());
            mors.push((m, n));
            named.push(Morphism {
                name: format!("({},{})", a.morphism(m).name, b.morphism(n).name),
                src: obj_index[&(a.src(m), b.src(n))],
                dst: obj_index[&(a.dst(m), b.dst(n))],
            });
        }
    }
    let names = objs.iter().map(|&(x, y)| format!("({},{})", a.object_name(x), b.object_name(y))).collect();
    let ids = objs.iter().map(|&(x, y)| mor_index[&(a.id(x), b.id(y))]).collect();
    let cat = Arc::new(FinCategory::from_fn(names, named, ids, |h, k| {
        let ((m1, n1), (m2, n2)) = (mors[h], mors[k]);
        mor_index[&(a.compose(m1, m2), b.compose(n1, n2))]
    })?);
    let pa = CatFunctor { source: cat.clone(), target: a.clone(), obj: objs.iter().map(|o| o.0).collect(), mor: mors.iter().map(|m| m.0).collect() };
    let pb = CatFunctor { source: cat.clone(), target: b.clone(), obj: objs.iter().map(|o| o.1).collect(), mor: mors.iter().map(|m| m.1).collect() };
    Ok((cat, pa, pb))
}

/// Whether `obj`, `mor` are bijections onto the target of `f`.
fn bijective(f: &CatFunctor) -> bool {
    let onto = |v: &[usize], n: usize| {
        let mut seen = vec![false; n];
        v.len() == n && v.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    };
    onto(&f.obj, f.target.n_objects()) && onto(&f.mor, f.target.n_morphisms())
}

/// The comparison from `∮(Φ ∘ u)` to the strict pullback of `p` along `u` is an isomorphism.
pub fn check_pullback(p: &ClassifiedOpfibration, u: &CatFunctor, q: &ClassifiedOpfibration, over: &CatFunctor) -> Result<Report> {
    let mut r = Report::new("opfibration_pullback");
    let (pb, _, _) = strict_pullback(&p.projection(), u)?;
    let mut pairs_obj = HashMap::new();
    let mut pairs_mor = HashMap::new();
    let names: HashMap<&str, usize> = pb.objects().iter().enumerate().map(|(k, n)| (n.as_str(), k)).collect();
    let _ = names;
    // recover the pair of each pullback object and morphism from the projections
    let (_, pa, pc) = strict_pullback(&p.projection(), u)?;
    for o in 0..pb.n_objects() {
        pairs_obj.insert((pa.obj[o], pc.obj[o]), o);
    }
    for m in 0..pb.n_morphisms() {
        pairs_mor.insert((pa.mor[m], pc.mor[m]), m);
    }
    let proj = q.projection();
    let mut obj = Vec::with_capacity(q.total.n_objects());
    for o in 0..q.total.n_objects() {
        match pairs_obj.get(&(over.obj[o], proj.obj[o])) {
            Some(&k) => obj.push(k),
            None => {
                r.fail(format!("object {}", q.total.object_name(o)), "not in the pullback");
                return Ok(r);
            }
        }
    }
    let mut mor = Vec::with_capacity(q.total.n_morphisms());
    for m in 0..q.total.n_morphisms() {
        match pairs_mor.get(&(over.mor[m], proj.mor[m])) {
            Some(&k) => mor.push(k),
            None => {
                r.fail(format!("morphism {}", q.total.morphism(m).name), "not in the pullback");
                return Ok(r);
            }
        }
    }
    let gamma = CatFunctor { source: q.total.clone(), target: pb.clone(), obj, mor };
    r.absorb(gamma.check());
    r.check(bijective(&gamma), || "comparison".into(), || "not bijective".into());
    Ok(r)
}

/// All functors `F` with `u ∘ F = j`.
fn sections(u: &CatFunctor, j: &CatFunctor) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (d, x) = (&j.source, &u.source);
    let mut over_obj: HashMap<usize, Vec<usize>> = HashMap::new();
    for o in 0..x.n_objects() {
        over_obj.entry(u.obj[o]).or_default().push(o);
    }
    let obj_cands: Vec<Vec<usize>> = (0..d.n_objects()).map(|o| over_obj.get(&j.obj[o]).cloned().unwrap_or_default()).collect();
    let mut out = Vec::new();
    let mut obj = vec![usize::MAX; d.n_objects()];
    fn objects(
        k: usize,
        d: &FinCategory,
        x: &FinCategory,
        u: &CatFunctor,
        j: &CatFunctor,
        cands: &[Vec<usize>],
        obj: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if k == d.n_objects() {
            let mut mor = vec![usize::MAX; d.n_morphisms()];
            morphisms(0, d, x, u, j, obj, &mut mor, out);
            return;
        }
        for &o in &cands[k] {
            obj[k] = o;
            // every morphism between assigned objects needs a candidate image
            let ok = (0..=k).all(|y| {
                d.hom(y, k).iter().chain(d.hom(k, y).iter()).all(|&m| {
                    x.hom(obj[d.src(m)], obj[d.dst(m)]).iter().any(|&n| u.mor[n] == j.mor[m])
                })
            });
            if ok {
                objects(k + 1, d, x, u, j, cands, obj, out);
            }
        }
        obj[k] = usize::MAX;
    }
    #[allow(clippy::too_many_arguments)]
    fn morphisms(
        m: usize,
        d: &FinCategory,
        x: &FinCategory,
        u: &CatFunctor,
        j: &CatFunctor,
        obj: &[usize],
        mor: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        if m == d.n_morphisms() {
            let ok = (0..d.n_morphisms()).all(|g| {
                (0..d.n_morphisms()).all(|f| match d.try_compose(g, f) {
                    Some(h) => x.try_compose(mor[g], mor[f]) == Some(mor[h]),
                    None => true,
                })
            });
            if ok {
                out.push((obj.to_vec(), mor.clone()));
            }
            return;
        }
        let cands: Vec<usize> = if d.is_identity(m) {
            vec![x.id(obj[d.src(m)])]
        } else {
            x.hom(obj[d.src(m)], obj[d.dst(m)]).iter().copied().filter(|&n| u.mor[n] == j.mor[m]).collect()
        };
        for n in cands {
            mor[m] = n;
            morphisms(m + 1, d, x, u, j, obj, mor, out);
        }
        mor[m] = usize::MAX;
    }
    objects(0, d, x, u, j, &obj_cands, &mut obj, &mut out);
    out
}

/// The distributivity pullback of `u: X → A` along `p: A ↠ B`.
#[derive(Debug, Clone)]
pub struct DistributivityPullback {
    /// `Y`, with objects `(b, f: Φ(b) → X)` such that `u ∘ f = J_b`.
    pub y: Arc<FinCategory>,
    /// `(b, f.obj, f.mor)` per object of `Y`.
    pub sections: Vec<(usize, Vec<usize>, Vec<usize>)>,
    /// `(i, σ)` per morphism of `Y`, `σ_x: f(x) → f′(Φ(i)(x))`.
    pub transformations: Vec<(usize, Vec<usize>)>,
    pub v: CatFunctor,
    /// `q: Z ↠ Y`, the pullback of `p` along `v`.
    pub z: ClassifiedOpfibration,
    /// `Z → A`.
    pub z_over: CatFunctor,
    /// `w: Z → X`.
    pub w: CatFunctor,
    section_index: HashMap<(usize, Vec<usize>, Vec<usize>), usize>,
    transformation_index: HashMap<(usize, usize, usize, Vec<usize>), usize>,
}

impl DistributivityPullback {
    pub fn section(&self, b: usize, obj: &[usize], mor: &[usize]) -> Option<usize> {
        self.section_index.get(&(b, obj.to_vec(), mor.to_vec())).copied()
    }

    pub fn transformation(&self, src: usize, dst: usize, i: usize, sigma: &[usize]) -> Option<usize> {
        self.transformation_index.get(&(src, dst, i, sigma.to_vec())).copied()
    }
}

pub fn distributivity_pullback(u: &CatFunctor, p: &ClassifiedOpfibration) -> Result<DistributivityPullback> {
    if !same_base(&u.target, &p.total) {
        return Err(FamError::BaseMismatch);
    }
    let x = &u.source;
    let base = &p.base;
    let mut secs = Vec::new();
    let mut section_index = HashMap::new();
    let mut by_base: Vec<Vec<usize>> = vec![Vec::new(); base.n_objects()];
    for b in 0..base.n_objects() {
        for (obj, mor) in sections(u, &p.fiber_inclusion(b)) {
            section_index.insert((b, obj.clone(), mor.clone()), secs.len());
            by_base[b].push(secs.len());
            secs.push((b, obj, mor));
        }
    }
    let mut trans: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut named = Vec::new();
    let mut transformation_index = HashMap::new();
    for i in 0..base.n_morphisms() {
        let (b, b2) = (base.src(i), base.dst(i));
        let fib = &p.fibers[b];
        let t = &p.transport[i];
        for &s in &by_base[b] {
            for &s2 in &by_base[b2] {
                let (f, f2) = (&secs[s], &secs[s2]);
                // candidates for each σ_x
                let cands: Vec<Vec<usize>> = (0..fib.n_objects())
                    .map(|xo| {
                        let lift = p.lift(i, xo);
                        x.hom(f.1[xo], f2.1[t.obj[xo]]).iter().copied().filter(|&n| u.mor[n] == lift).collect()
                    })
                    .collect();
                let mut sigma = vec![usize::MAX; fib.n_objects()];
                let mut found = Vec::new();
                natural_families(0, fib, x, t, f, f2, &cands, &mut sigma, &mut found);
                for sg in found {
                    transformation_index.insert((s, s2, i, sg.clone()), trans.len());
                    named.push(Morphism { name: format!("({}#{})", base.morphism(i).name, trans.len()), src: s, dst: s2 });
                    trans.push((i, sg));
                }
            }
        }
    }
    let ids: Vec<usize> = (0..secs.len())
        .map(|s| {
            let (b, obj, _) = &secs[s];
            let sg: Vec<usize> = obj.iter().map(|&o| x.id(o)).collect();
            transformation_index[&(s, s, base.id(*b), sg)]
        })
        .collect();
    let names = secs.iter().enumerate().map(|(k, (b, _, _))| format!("({},f{k})", base.object_name(*b))).collect();
    let y = Arc::new(FinCategory::from_fn(names, named.clone(), ids, |g, f| {
        let ((j, tau), (i, sigma)) = (&trans[g], &trans[f]);
        let t = &p.transport[*i];
        let comp: Vec<usize> = sigma.iter().enumerate().map(|(xo, &s)| x.compose(tau[t.obj[xo]], s)).collect();
        transformation_index[&(named[f].src, named[g].dst, base.compose(*j, *i), comp)]
    })?);
    let v = CatFunctor { source: y.clone(), target: base.clone(), obj: secs.iter().map(|s| s.0).collect(), mor: trans.iter().map(|t| t.0).collect() };
    let (z, z_over) = pullback_opfibration(p, &v)?;
    let w = CatFunctor {
        source: z.total.clone(),
        target: x.clone(),
        obj: z.objects.iter().map(|&(s, xo)| secs[s].1[xo]).collect(),
        mor: z
            .morphisms
            .iter()
            .map(|&(j0, xo, j1)| {
                let s2 = y.dst(j0);
                x.compose(secs[s2].2[j1], trans[j0].1[xo])
            })
            .collect(),
    };
    Ok(DistributivityPullback { y, sections: secs, transformations: trans, v, z, z_over, w, section_index, transformation_index })
}

#[allow(clippy::too_many_arguments)]
fn natural_families(
    k: usize,
    fib: &FinCategory,
    x: &FinCategory,
    t: &CatFunctor,
    f: &(usize, Vec<usize>, Vec<usize>),
    f2: &(usize, Vec<usize>, Vec<usize>),
    cands: &[Vec<usize>],
    sigma: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == fib.n_objects() {
        out.push(sigma.clone());
        return;
    }
    for &s in &cands[k] {
        sigma[k] = s;
        // naturality on morphisms between assigned objects
        let ok = (0..=k).all(|y| {
            fib.hom(y, k).iter().chain(fib.hom(k, y).iter()).all(|&m| {
                let (a, b) = (fib.src(m), fib.dst(m));
                x.compose(f2.2[t.mor[m]], sigma[a]) == x.compose(sigma[b], f.2[m])
            })
        });
        if ok {
            natural_families(k + 1, fib, x, t, f, f2, cands, sigma, out);
        }
    }
    sigma[k] = usize::MAX;
}

/// The walking arrow `0 → 1`.
fn arrow_category() -> FinCategory {
    let objects = vec!["0".to_string(), "1".to_string()];
    let morphisms = vec![
        Morphism { name: "id0".into(), src: 0, dst: 0 },
        Morphism { name: "id1".into(), src: 1, dst: 1 },
        Morphism { name: "a".into(), src: 0, dst: 1 },
    ];
    FinCategory::from_fn(objects, morphisms, vec![0, 1], |g, f| if g == 2 { 2 } else { f }).expect("arrow")
}

/// A competitor square: `v′: Y′ → B` and `w′: Z′ → X` with `Z′ = ∮(Φ ∘ v′)`.
#[derive(Debug, Clone)]
pub struct Competitor {
    pub v: CatFunctor,
    pub w: CatFunctor,
    /// The functor `Y′ → Y` the competitor was restricted from, if any.
    pub expected: Option<CatFunctor>,
}

/// Competitors restricted from `Y` along every object, every morphism and the identity.
pub fn competitors(dp: &DistributivityPullback, p: &ClassifiedOpfibration) -> Result<Vec<Competitor>> {
    let y = &dp.y;
    let mut shapes: Vec<CatFunctor> = vec![CatFunctor::identity(y)];
    let one = Arc::new(FinCategory::terminal());
    for o in 0..y.n_objects() {
        shapes.push(CatFunctor { source: one.clone(), target: y.clone(), obj: vec![o], mor: vec![y.id(o)] });
    }
    let arrow = Arc::new(arrow_category());
    for m in 0..y.n_morphisms() {
        if y.is_identity(m) {
            continue;
        }
        let (s, d) = (y.src(m), y.dst(m));
        shapes.push(CatFunctor { source: arrow.clone(), target: y.clone(), obj: vec![s, d], mor: vec![y.id(s), y.id(d), m] });
    }
    let mut out = Vec::with_capacity(shapes.len());
    for g in shapes {
        let v = g.then(&dp.v);
        let (z2, _) = pullback_opfibration(p, &v)?;
        let w = CatFunctor {
            source: z2.total.clone(),
            target: dp.w.target.clone(),
            obj: z2.objects.iter().map(|&(c, xo)| dp.w.obj[dp.z.object(g.obj[c], xo)]).collect(),
            mor: z2.morphisms.iter().map(|&(j0, xo, j1)| dp.w.mor[dp.z.morphism(g.mor[j0], xo, j1)]).collect(),
        };
        out.push(Competitor { v, w, expected: Some(g) });
    }
    Ok(out)
}

/// Construct `(ℓ, k)` for each competitor and verify `v∘k = v′`, `q∘ℓ = k∘q′`,
/// `w∘ℓ = w′`, and that `k` is the functor the competitor was restricted from.
pub fn check_distributivity(u: &CatFunctor, p: &ClassifiedOpfibration, dp: &DistributivityPullback, comps: &[Competitor]) -> Result<Report> {
    let mut r = Report::new("distributivity_pullback");
    let uw = dp.w.then(u);
    r.check(uw.obj == dp.z_over.obj && uw.mor == dp.z_over.mor, || "square".into(), || "u ∘ w differs from Z → A".into());
    for (n, comp) in comps.iter().enumerate() {
        let (z2, over2) = pullback_opfibration(p, &comp.v)?;
        let y2 = &comp.v.source;
        let x = &u.source;
        let uw2 = comp.w.then(u);
        if uw2.obj != over2.obj || uw2.mor != over2.mor {
            r.fail(format!("competitor {n}"), "not a square over A");
            continue;
        }
        let mut kobj = Vec::with_capacity(y2.n_objects());
        for c in 0..y2.n_objects() {
            let b = comp.v.obj[c];
            let fib = &p.fibers[b];
            let obj: Vec<usize> = (0..fib.n_objects()).map(|xo| comp.w.obj[z2.object(c, xo)]).collect();
            let mor: Vec<usize> = (0..fib.n_morphisms()).map(|m| comp.w.mor[z2.morphism(y2.id(c), fib.src(m), m)]).collect();
            match dp.section(b, &obj, &mor) {
                Some(s) => kobj.push(s),
                None => {
                    r.fail(format!("competitor {n}: k at {}", y2.object_name(c)), "no matching section");
                    break;
                }
            }
        }
        if kobj.len() != y2.n_objects() {
            continue;
        }
        let mut kmor = Vec::with_capacity(y2.n_morphisms());
        for j in 0..y2.n_morphisms() {
            let i = comp.v.mor[j];
            let fib = &p.fibers[comp.v.obj[y2.src(j)]];
            let sigma: Vec<usize> = (0..fib.n_objects()).map(|xo| comp.w.mor[z2.lift(j, xo)]).collect();
            match dp.transformation(kobj[y2.src(j)], kobj[y2.dst(j)], i, &sigma) {
                Some(t) => kmor.push(t),
                None => {
                    r.fail(format!("competitor {n}: k at {}", y2.morphism(j).name), "no matching transformation");
                    break;
                }
            }
        }
        if kmor.len() != y2.n_morphisms() {
            continue;
        }
        let k = CatFunctor { source: y2.clone(), target: dp.y.clone(), obj: kobj, mor: kmor };
        r.absorb(k.check());
        let vk = k.then(&dp.v);
        r.check(vk.obj == comp.v.obj && vk.mor == comp.v.mor, || format!("competitor {n}: v ∘ k"), || "differs from v′".into());
        let l = CatFunctor {
            source: z2.total.clone(),
            target: dp.z.total.clone(),
            obj: z2.objects.iter().map(|&(c, xo)| dp.z.object(k.obj[c], xo)).collect(),
            mor: z2.morphisms.iter().map(|&(j0, xo, j1)| dp.z.morphism(k.mor[j0], xo, j1)).collect(),
        };
        r.absorb(l.check());
        let ql = l.then(&dp.z.projection());
        let kq = z2.projection().then(&k);
        r.check(ql.obj == kq.obj && ql.mor == kq.mor, || format!("competitor {n}: q ∘ ℓ"), || "differs from k ∘ q′".into());
        let wl = l.then(&dp.w);
        r.check(wl.obj == comp.w.obj && wl.mor == comp.w.mor, || format!("competitor {n}: w ∘ ℓ"), || "differs from w′".into());
        if let Some(g) = &comp.expected {
            r.check(g.obj == k.obj && g.mor == k.mor, || format!("competitor {n}: uniqueness"), || "k differs from the restriction".into());
        }
        let _ = x;
    }
    Ok(r)
}

/// `P_d(p)(X)`: `c`-cells are `(b, a)` with `b` over `c` and `a` a functor
/// `Φ(b) → ∫X` over `C′`, recorded as one cell of `X` per fiber object.
#[derive(Debug, Clone)]
pub struct PdEvaluation {
    pub presheaf: Presheaf,
    pub cells: Vec<Vec<(usize, Vec<usize>)>>,
    pub index: Vec<HashMap<(usize, Vec<usize>), usize>>,
}

/// Cell assignments `a` on the fiber over `b` with `X(p₁ m)(a_{x′}) = a_x` for every `m: x → x′`.
fn labellings(p: &Polynomial, b: usize, x: &Presheaf) -> Vec<Vec<usize>> {
    let fib = &p.opf.fibers[b];
    let leg = p.fiber_leg(b);
    let n = fib.n_objects();
    let mut out = Vec::new();
    let mut a = vec![usize::MAX; n];
    fn go(k: usize, fib: &FinCategory, leg: &CatFunctor, x: &Presheaf, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == fib.n_objects() {
            out.push(a.clone());
            return;
        }
        for cell in 0..x.sizes[leg.obj[k]] {
            a[k] = cell;
            let ok = (0..=k).all(|y| {
                fib.hom(y, k).iter().chain(fib.hom(k, y).iter()).all(|&m| x.action[leg.mor[m]][a[fib.dst(m)]] == a[fib.src(m)])
            });
            if ok {
                go(k + 1, fib, leg, x, a, out);
            }
        }
        a[k] = usize::MAX;
    }
    go(0, fib, &leg, x, &mut a, &mut out);
    out
}

pub fn pd_evaluate(p: &Polynomial, x: &Presheaf) -> Result<PdEvaluation> {
    let vf = check_very_fibrous(p);
    if let Some(f) = vf.failures.first() {
        return Err(FamError::NotVeryFibrous(format!("{}: {}", f.location, f.witness)));
    }
    if !same_base(&x.base, &p.source) {
        return Err(FamError::BaseMismatch);
    }
    let c = &p.target;
    let bcat = &p.opf.base;
    let mut cells: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); c.n_objects()];
    for b in 0..bcat.n_objects() {
        for a in labellings(p, b, x) {
            cells[p.p3.obj[b]].push((b, a));
        }
    }
    let index: Vec<HashMap<(usize, Vec<usize>), usize>> =
        cells.iter().map(|v| v.iter().cloned().enumerate().map(|(k, cell)| (cell, k)).collect()).collect();
    // unique lift of each i: c′ → p₃(b) with target b
    let mut lift: HashMap<(usize, usize), usize> = HashMap::new();
    for j in 0..bcat.n_morphisms() {
        lift.insert((bcat.dst(j), p.p3.mor[j]), j);
    }
    let mut action = Vec::with_capacity(c.n_morphisms());
    for i in 0..c.n_morphisms() {
        let row = cells[c.dst(i)]
            .iter()
            .map(|(b, a)| {
                let j = lift[&(*b, i)];
                let b2 = bcat.src(j);
                let t = &p.opf.transport[j];
                let a2: Vec<usize> = (0..p.opf.fibers[b2].n_objects())
                    .map(|y| x.action[p.p1.mor[p.opf.lift(j, y)]][a[t.obj[y]]])
                    .collect();
                index[c.src(i)]
                    .get(&(b2, a2))
                    .copied()
                    .ok_or_else(|| FamError::NonFunctorialInput(format!("restriction along {} is not a functor over C′", c.morphism(i).name)))
            })
            .collect::<Result<Vec<_>>>()?;
        action.push(row);
    }
    let presheaf = Presheaf::new(c.clone(), cells.iter().map(Vec::len).collect(), action)?;
    Ok(PdEvaluation { presheaf, cells, index })
}

/// `P_d(γ(S, E))(X) ≅ T(X)` as a natural bijection, cell `(t, a) ↦ (t, a)`.
pub fn check_gamma_evaluation(rep: &dyn Family, bound: usize, x: &Presheaf) -> Result<Report> {
    let p = gamma(rep, bound)?;
    let pd = pd_evaluate(&p, x)?;
    let ev = evaluate(rep, x, bound)?;
    let ops = ops_presheaf(rep, bound)?;
    let el = category_of_elements(&ops.ps);
    let mut comps = Vec::with_capacity(pd.cells.len());
    for (c, cells) in pd.cells.iter().enumerate() {
        let mut comp = Vec::with_capacity(cells.len());
        for (b, a) in cells {
            let (c2, k) = el.element[*b];
            let t = &ops.ops[c2][k];
            let et = rep.arity(c2, t);
            let fel = category_of_elements(&et);
            let fill = PresheafMorphism {
                comps: (0..et.sizes.len()).map(|d| (0..et.sizes[d]).map(|y| a[fel.index[d][y]]).collect()).collect(),
            };
            let oc = OperationCell { op: t.clone(), fill };
            comp.push(ev.lookup(c, &oc).ok_or_else(|| FamError::Malformed(format!("cell of {t} is not in T(X)")))?);
        }
        comps.push(comp);
    }
    let m = PresheafMorphism { comps };
    Ok(crate::famrep::check_natural_iso("gamma_evaluation", &m, &pd.presheaf, &ev.tx))
}

/// The composite `p ∘ q` for `q: C″ → C′` and `p: C′ → C`.
pub fn compose_polynomials(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    compose_with_data(p, q).map(|c| c.poly)
}

/// A composite together with the distributivity pullback it was built from.
#[derive(Debug, Clone)]
pub struct Composite {
    pub poly: Polynomial,
    pub dp: DistributivityPullback,
    /// `A ×_{C′} B′ → B′`, the leg to the middle-right category of `q`.
    pub to_inner: CatFunctor,
}

impl Composite {
    /// Objects of `B′` hit by the section at `y`, listed for the fiber objects of `p` over `c′`.
    pub fn labels(&self, p: &Polynomial, y: usize, c: usize) -> Vec<usize> {
        let (b, fobj, _) = &self.dp.sections[y];
        (0..p.opf.fibers[*b].n_objects())
            .filter(|&x| p.p1.obj[p.opf.object(*b, x)] == c)
            .map(|x| self.to_inner.obj[fobj[x]])
            .collect()
    }
}

pub fn compose_with_data(p: &Polynomial, q: &Polynomial) -> Result<Composite> {
    if !same_base(&p.source, &q.target) {
        return Err(FamError::DomainMismatch(format!("{} expects {} objects, {} provides {}", p.name, p.source.n_objects(), q.name, q.target.n_objects())));
    }
    let (_, pr_a, pr_b) = strict_pullback(&p.p1, &q.p3)?;
    let dp = distributivity_pullback(&pr_a, &p.opf)?;
    let y = dp.y.clone();
    let qf = &q.opf;
    // Φ̄(b, f) = ∮(Φ_p(b) → B′ → Cat)
    let mut inner = Vec::with_capacity(y.n_objects());
    for (b, fobj, fmor) in &dp.sections {
        let fib = p.opf.fibers[*b].clone();
        let fibers = fobj.iter().map(|&o| qf.fibers[pr_b.obj[o]].clone()).collect();
        let transport = fmor.iter().map(|&m| qf.transport[pr_b.mor[m]].clone()).collect();
        inner.push(grothendieck(fib, fibers, transport)?);
    }
    let mut transport = Vec::with_capacity(y.n_morphisms());
    for (j, (i, sigma)) in dp.transformations.iter().enumerate() {
        let (s, d) = (y.src(j), y.dst(j));
        let (src, dst) = (&inner[s], &inner[d]);
        let ti = &p.opf.transport[*i];
        let push = |xo: usize| &qf.transport[pr_b.mor[sigma[xo]]];
        let obj = src.objects.iter().map(|&(xo, z)| dst.object(ti.obj[xo], push(xo).obj[z])).collect();
        let mor = src
            .morphisms
            .iter()
            .map(|&(m0, z, m1)| {
                let (xo, x2) = (src.base.src(m0), src.base.dst(m0));
                dst.morphism(ti.mor[m0], push(xo).obj[z], push(x2).mor[m1])
            })
            .collect();
        transport.push(CatFunctor { source: src.total.clone(), target: dst.total.clone(), obj, mor });
    }
    let opf = grothendieck(y.clone(), inner.iter().map(|g| g.total.clone()).collect(), transport)?;
    let bq = &qf.base;
    let p1 = CatFunctor {
        source: opf.total.clone(),
        target: q.source.clone(),
        obj: opf
            .objects
            .iter()
            .map(|&(s, o)| {
                let (xo, z) = inner[s].objects[o];
                q.p1.obj[qf.object(pr_b.obj[dp.sections[s].1[xo]], z)]
            })
            .collect(),
        mor: opf
            .morphisms
            .iter()
            .map(|&(j0, o, j1)| {
                let (s, s2) = (y.src(j0), y.dst(j0));
                let (xo, z) = inner[s].objects[o];
                let (m0, _, m1) = inner[s2].morphisms[j1];
                let sigma = pr_b.mor[dp.transformations[j0].1[xo]];
                let beta = bq.compose(pr_b.mor[dp.sections[s2].2[m0]], sigma);
                q.p1.mor[qf.morphism(beta, z, m1)]
            })
            .collect(),
    };
    let p3 = dp.v.then(&p.p3);
    let poly = Polynomial {
        name: format!("{}∘{}", p.name, q.name),
        source: q.source.clone(),
        target: p.target.clone(),
        opf,
        p1,
        p3,
        very_fibrous: p.very_fibrous && q.very_fibrous,
        quasi_familial: p.quasi_familial && q.quasi_familial,
        familial: false,
    };
    Ok(Composite { poly, dp, to_inner: pr_b })
}

/// `|p|`: each fiber replaced by the discrete fibration of connected components
/// of its fibers over `C′`, with the collapse `π: A → |A|`.
pub fn familial_replacement(p: &Polynomial) -> Result<(Polynomial, CatFunctor)> {
    let qf = check_two_sided(p, false);
    if let Some(f) = qf.failures.first() {
        return Err(FamError::NotQuasiFamilial(format!("{}: {}", f.location, f.witness)));
    }
    let opf = &p.opf;
    let c1 = &p.source;
    let mut comp_of: Vec<Vec<usize>> = Vec::with_capacity(opf.base.n_objects());
    let mut presheaves = Vec::with_capacity(opf.base.n_objects());
    for b in 0..opf.base.n_objects() {
        let fib = &opf.fibers[b];
        let leg = p.fiber_leg(b);
        let mut uf = LeastUnionFind::new(fib.n_objects());
        for m in 0..fib.n_morphisms() {
            if c1.is_identity(leg.mor[m]) {
                uf.union(fib.src(m), fib.dst(m));
            }
        }
        let (class, _) = uf.classes();
        // number components per object of C′ in order of first appearance
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut sizes = vec![0; c1.n_objects()];
        let mut rep_of: Vec<Vec<usize>> = vec![Vec::new(); c1.n_objects()];
        let mut comp = vec![0; fib.n_objects()];
        for y in 0..fib.n_objects() {
            let c = leg.obj[y];
            let k = *local.entry(class[y]).or_insert_with(|| {
                sizes[c] += 1;
                rep_of[c].push(y);
                sizes[c] - 1
            });
            comp[y] = k;
        }
        let action = (0..c1.n_morphisms())
            .map(|i| {
                let d = c1.dst(i);
                rep_of[d]
                    .iter()
                    .map(|&y| {
                        let m = fib.hom_into(y).into_iter().find(|&m| leg.mor[m] == i).expect("fibration has lifts");
                        comp[fib.src(m)]
                    })
                    .collect()
            })
            .collect();
        presheaves.push(Presheaf::new(c1.clone(), sizes, action)?);
        comp_of.push(comp);
    }
    let els: Vec<Elements> = presheaves.iter().map(category_of_elements).collect();
    let transport = (0..opf.base.n_morphisms())
        .map(|i| {
            let (s, d) = (opf.base.src(i), opf.base.dst(i));
            let t = &opf.transport[i];
            let fib = &opf.fibers[s];
            let leg = p.fiber_leg(s);
            let mut comps: Vec<Vec<usize>> = presheaves[s].sizes.iter().map(|&n| vec![usize::MAX; n]).collect();
            for y in 0..fib.n_objects() {
                comps[leg.obj[y]][comp_of[s][y]] = comp_of[d][t.obj[y]];
            }
            elements_functor(&els[s], &els[d], &PresheafMorphism { comps })
        })
        .collect();
    let ropf = grothendieck(opf.base.clone(), els.iter().map(|e| e.cat.clone()).collect(), transport)?;
    let pi_obj = |b: usize, y: usize| {
        let leg = p.p1.obj[opf.object(b, y)];
        els[b].index[leg][comp_of[b][y]]
    };
    let pi = CatFunctor {
        source: opf.total.clone(),
        target: ropf.total.clone(),
        obj: opf.objects.iter().map(|&(b, y)| ropf.object(b, pi_obj(b, y))).collect(),
        mor: opf
            .morphisms
            .iter()
            .map(|&(i0, y, i1)| {
                let (b, b2) = (opf.base.src(i0), opf.base.dst(i0));
                let fib2 = &opf.fibers[b2];
                let y2 = fib2.dst(i1);
                let k = p.p1.mor[opf.morphism(opf.base.id(b2), fib2.src(i1), i1)];
                ropf.morphism(i0, pi_obj(b, y), els[b2].mor_index[k][comp_of[b2][y2]])
            })
            .collect(),
    };
    let p1 = CatFunctor {
        source: ropf.total.clone(),
        target: c1.clone(),
        obj: ropf.objects.iter().map(|&(b, e)| els[b].element[e].0).collect(),
        mor: ropf.morphisms.iter().map(|&(i0, _, i1)| els[opf.base.dst(i0)].proj_mor[i1]).collect(),
    };
    let rp = Polynomial {
        name: format!("|{}|", p.name),
        source: p.source.clone(),
        target: p.target.clone(),
        opf: ropf,
        p1,
        p3: p.p3.clone(),
        very_fibrous: true,
        quasi_familial: true,
        familial: true,
    };
    Ok((rp, pi))
}

/// `P_d(p)(X) ≅ P_d(|p|)(X)` through `π`: a cell `(b, a′)` of `|p|` goes to `a′ ∘ π`.
pub fn check_replacement(p: &Polynomial, rp: &Polynomial, pi: &CatFunctor, x: &Presheaf) -> Result<Report> {
    let lhs = pd_evaluate(rp, x)?;
    let rhs = pd_evaluate(p, x)?;
    let comps = lhs
        .cells
        .iter()
        .enumerate()
        .map(|(c, cells)| {
            cells
                .iter()
                .map(|(b, a)| {
                    let fib = &p.opf.fibers[*b];
                    let a2: Vec<usize> = (0..fib.n_objects()).map(|y| a[rp.opf.objects[pi.obj[p.opf.object(*b, y)]].1]).collect();
                    rhs.index[c].get(&(*b, a2)).copied().ok_or_else(|| FamError::Malformed("collapsed cell is not a labelling".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::famrep::check_natural_iso("familial_replacement", &PresheafMorphism { comps }, &lhs.presheaf, &rhs.presheaf))
}

/// An isomorphism of polynomials: `u₁: B ≅ B′` over `C` and `u₀: A ≅ A′`
/// over `C′` and `u₁`.
#[derive(Debug, Clone)]
pub struct PolynomialIso {
    pub base: (Vec<usize>, Vec<usize>),
    pub total: (Vec<usize>, Vec<usize>),
}

pub fn find_polynomial_iso(p: &Polynomial, q: &Polynomial) -> Option<PolynomialIso> {
    if !same_base(&p.source, &q.source) || !same_base(&p.target, &q.target) {
        return None;
    }
    let (pa, qa) = (&p.opf.total, &q.opf.total);
    if pa.n_objects() != qa.n_objects() || pa.n_morphisms() != qa.n_morphisms() {
        return None;
    }
    let (pp, qp) = (p.opf.projection(), q.opf.projection());
    let mut found = None;
    let bkeys = IsoKeys {
        obj_a: &|o| vec![p.p3.obj[o], p.opf.fibers[o].n_objects(), p.opf.fibers[o].n_morphisms()],
        obj_b: &|o| vec![q.p3.obj[o], q.opf.fibers[o].n_objects(), q.opf.fibers[o].n_morphisms()],
        mor_a: &|m| vec![p.p3.mor[m]],
        mor_b: &|m| vec![q.p3.mor[m]],
    };
    visit_isomorphisms(&p.opf.base, &q.opf.base, &bkeys, &mut |bo, bm| {
        let akeys = IsoKeys {
            obj_a: &|o| vec![p.p1.obj[o], bo[pp.obj[o]]],
            obj_b: &|o| vec![q.p1.obj[o], qp.obj[o]],
            mor_a: &|m| vec![p.p1.mor[m], bm[pp.mor[m]]],
            mor_b: &|m| vec![q.p1.mor[m], qp.mor[m]],
        };
        let mut hit = None;
        visit_isomorphisms(pa, qa, &akeys, &mut |ao, am| {
            hit = Some((ao.to_vec(), am.to_vec()));
            false
        });
        match hit {
            Some(t) => {
                found = Some(PolynomialIso { base: (bo.to_vec(), bm.to_vec()), total: t });
                false
            }
            None => true,
        }
    });
    found
}
