//! Crossed groups on a category, their total categories and monads.

use std::sync::Arc;

use super::{cube_category, simplex_category, yoneda_map, yoneda_witnesses, GenTag, Generated};
use crate::error::{FamError, Result};
use crate::famrep::{Beyond, Family, Op, OperationCell};
use crate::fincat::{FinCategory, Morphism};
use crate::monad::MonadRep;
use crate::presheaf::{hom_positions, Presheaf, PresheafMorphism};
use crate::report::Report;
use crate::theory::{check_isomorphism, theory_category};

/// A finite group as a multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub names: Vec<String>,
    /// `mult[g][h] = g·h`.
    pub mult: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn trivial() -> Self {
        FiniteGroup { names: vec!["e".into()], mult: vec![vec![0]], unit: 0 }
    }

    /// `ℤ/n`, element `k` written `τ^k`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| if k == 0 { "e".into() } else { format!("τ^{k}") }).collect();
        let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup { names, mult, unit: 0 }
    }

    /// `(ℤ/2)^n` on bitmasks, bit `p-1` being coordinate `p`.
    pub fn reversals(n: usize) -> Self {
        let k = 1usize << n;
        let names = (0..k)
            .map(|g| (0..n).map(|p| if g >> p & 1 == 1 { 't' } else { '1' }).collect::<String>())
            .collect();
        let mult = (0..k).map(|a| (0..k).map(|b| a ^ b).collect()).collect();
        FiniteGroup { names, mult, unit: 0 }
    }

    /// `Σ_n` on the permutations of `1..=n` in lexicographic one-line order,
    /// with `(g·h)(x) = g(h(x))`.
    pub fn symmetric(n: usize) -> (Self, Vec<Vec<usize>>) {
        let perms = permutations(n);
        let index: std::collections::HashMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let names = perms
            .iter()
            .map(|p| if n == 0 { "()".into() } else { p.iter().map(|x| (x + 1).to_string()).collect::<String>() })
            .collect();
        let mult = perms
            .iter()
            .map(|g| perms.iter().map(|h| index[&h.iter().map(|&x| g[x]).collect::<Vec<_>>()]).collect())
            .collect();
        let unit = index[&(0..n).collect::<Vec<_>>()];
        (FiniteGroup { names, mult, unit }, perms)
    }

    pub fn inverse(&self, g: usize) -> Option<usize> {
        (0..self.order()).find(|&h| self.mult[g][h] == self.unit && self.mult[h][g] == self.unit)
    }

    /// Closure, unit, associativity and inverses.
    pub fn check(&self) -> std::result::Result<(), String> {
        let n = self.order();
        if self.unit >= n || self.mult.len() != n || self.mult.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err("multiplication table is not closed".into());
        }
        for g in 0..n {
            if self.mult[self.unit][g] != g || self.mult[g][self.unit] != g {
                return Err(format!("{} is not fixed by the unit", self.names[g]));
            }
            if self.inverse(g).is_none() {
                return Err(format!("{} has no inverse", self.names[g]));
            }
            for h in 0..n {
                for k in 0..n {
                    if self.mult[self.mult[g][h]][k] != self.mult[g][self.mult[h][k]] {
                        return Err(format!("({}·{})·{} ≠ {}·({}·{})", self.names[g], self.names[h], self.names[k], self.names[g], self.names[h], self.names[k]));
                    }
                }
            }
        }
        Ok(())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                go(n, cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

/// A crossed group on `base`: groups `G_c`, restrictions `Gi: G_c → G_c′` for
/// `i: c′ → c`, and the action `g_*` on morphisms into `c`.
#[derive(Debug, Clone)]
pub struct CrossedGroup {
    pub name: String,
    pub base: Arc<FinCategory>,
    pub groups: Vec<FiniteGroup>,
    /// `restrict[i][g] = Gi(g)` for `g ∈ G_{dst i}`.
    pub restrict: Vec<Vec<usize>>,
    /// `action[i][g] = g_*(i)` for `g ∈ G_{dst i}`.
    pub action: Vec<Vec<usize>>,
}

impl CrossedGroup {
    /// Extend generator data along normal-form words using
    /// `g_*(i∘i′) = g_*(i) ∘ (Gi(g))_*(i′)` and `G(i∘i′) = Gi′ ∘ Gi`.
    /// `gen_act` returns a generator index.
    pub fn from_generators(
        name: impl Into<String>,
        gen: &Generated,
        groups: Vec<FiniteGroup>,
        gen_restrict: &dyn Fn(usize, usize) -> usize,
        gen_act: &dyn Fn(usize, usize) -> usize,
    ) -> Self {
        let cat = gen.cat.clone();
        let n = cat.n_morphisms();
        let mut restrict = vec![Vec::new(); n];
        let mut action = vec![Vec::new(); n];
        // normal forms are shortlex-sorted, so prefixes come first
        for i in 0..n {
            let order = groups[cat.dst(i)].order();
            let w = &gen.words[i];
            match w.split_last() {
                None => {
                    restrict[i] = (0..order).collect();
                    action[i] = vec![i; order];
                }
                Some((&last, rest)) => {
                    let prefix = gen.morphism_of(cat.src(i), rest).expect("prefix of a normal form");
                    let (r, a): (Vec<usize>, Vec<usize>) = (0..order)
                        .map(|g| {
                            let h = gen_restrict(last, g);
                            (restrict[prefix][h], cat.compose(gen.generator(gen_act(last, g)), action[prefix][h]))
                        })
                        .unzip();
                    restrict[i] = r;
                    action[i] = a;
                }
            }
        }
        CrossedGroup { name: name.into(), base: cat, groups, restrict, action }
    }

    /// Trivial groups everywhere.
    pub fn trivial(base: &Arc<FinCategory>) -> Self {
        let n = base.n_morphisms();
        CrossedGroup {
            name: "trivial".into(),
            base: base.clone(),
            groups: vec![FiniteGroup::trivial(); base.n_objects()],
            restrict: vec![vec![0]; n],
            action: (0..n).map(|i| vec![i]).collect(),
        }
    }

    fn show(&self, i: usize) -> &str {
        &self.base.morphism(i).name
    }

    fn elt(&self, c: usize, g: usize) -> &str {
        &self.groups[c].names[g]
    }
}

/// Group tables, functoriality of `G`, the left action of `G_c` on each
/// `Hom(c′, c)`, and axioms (a)–(d), exhaustively.
pub fn check_crossed_group_axioms(cg: &CrossedGroup) -> Report {
    let mut r = Report::new("crossed_group_axioms");
    let c = &cg.base;
    let n = c.n_morphisms();
    for (o, g) in cg.groups.iter().enumerate() {
        let res = g.check();
        r.check(res.is_ok(), || format!("group at {}", c.object_name(o)), || res.clone().unwrap_err());
    }
    if r.status != crate::report::Status::Pass
        || cg.restrict.len() != n
        || cg.action.len() != n
        || (0..n).any(|i| cg.restrict[i].len() != cg.groups[c.dst(i)].order() || cg.action[i].len() != cg.groups[c.dst(i)].order())
    {
        r.fail("shape", "tables do not match the groups");
        return r;
    }
    for i in 0..n {
        let (a, b) = (c.src(i), c.dst(i));
        for g in 0..cg.groups[b].order() {
            let j = cg.action[i][g];
            r.check(
                cg.restrict[i][g] < cg.groups[a].order(),
                || format!("G{} at {}", cg.show(i), cg.elt(b, g)),
                || "lands outside the group".into(),
            );
            r.check(
                c.src(j) == a && c.dst(j) == b,
                || format!("{}_*({})", cg.elt(b, g), cg.show(i)),
                || format!("{} has the wrong type", cg.show(j)),
            );
        }
    }
    if r.status != crate::report::Status::Pass {
        return r;
    }
    for o in 0..c.n_objects() {
        let id = c.id(o);
        for g in 0..cg.groups[o].order() {
            r.check(cg.restrict[id][g] == g, || format!("functoriality: G(id_{}) at {}", c.object_name(o), cg.elt(o, g)), || {
                format!("gives {}", cg.elt(o, cg.restrict[id][g]))
            });
            r.check(cg.action[id][g] == id, || format!("axiom (b) at {} for {}", c.object_name(o), cg.elt(o, g)), || {
                format!("{}_*(id) = {}", cg.elt(o, g), cg.show(cg.action[id][g]))
            });
        }
        let go = &cg.groups[o];
        for i in c.hom_into(o) {
            r.check(cg.action[i][go.unit] == i, || format!("left action: e_*({})", cg.show(i)), || {
                format!("gives {}", cg.show(cg.action[i][go.unit]))
            });
            for g in 0..go.order() {
                for h in 0..go.order() {
                    let lhs = cg.action[i][go.mult[g][h]];
                    let rhs = cg.action[cg.action[i][h]][g];
                    r.check(lhs == rhs, || format!("left action: ({}·{})_*({})", cg.elt(o, g), cg.elt(o, h), cg.show(i)), || {
                        format!("{} vs {}", cg.show(lhs), cg.show(rhs))
                    });
                }
            }
        }
        for a in 0..c.n_objects() {
            let hom = c.hom(a, o);
            for g in 0..cg.groups[o].order() {
                let mut img: Vec<usize> = hom.iter().map(|&i| cg.action[i][g]).collect();
                img.sort_unstable();
                img.dedup();
                r.check(img.len() == hom.len(), || format!("{}_* on Hom({}, {})", cg.elt(o, g), c.object_name(a), c.object_name(o)), || {
                    "is not a permutation".into()
                });
            }
        }
    }
    for i in 0..n {
        let (a, b) = (c.src(i), c.dst(i));
        let (ga, gb) = (&cg.groups[a], &cg.groups[b]);
        for g in 0..gb.order() {
            for ip in c.hom_into(a) {
                let a2 = c.src(ip);
                let comp = c.compose(i, ip);
                let h = cg.restrict[i][g];
                let lhs = cg.action[comp][g];
                let rhs = c.compose(cg.action[i][g], cg.action[ip][h]);
                r.check(lhs == rhs, || format!("axiom (a) at i={}, i′={}, g={}", cg.show(i), cg.show(ip), cg.elt(b, g)), || {
                    format!("{} vs {}", cg.show(lhs), cg.show(rhs))
                });
                let lhs = cg.restrict[comp][g];
                let rhs = cg.restrict[ip][h];
                r.check(lhs == rhs, || format!("functoriality: G({}∘{}) at {}", cg.show(i), cg.show(ip), cg.elt(b, g)), || {
                    format!("{} vs {}", cg.elt(a2, lhs), cg.elt(a2, rhs))
                });
            }
            for h in 0..gb.order() {
                let lhs = cg.restrict[i][gb.mult[g][h]];
                let twisted = cg.restrict[cg.action[i][h]][g];
                let rhs = ga.mult[twisted][cg.restrict[i][h]];
                r.check(lhs == rhs, || format!("axiom (c) at i={}, g={}, h={}", cg.show(i), cg.elt(b, g), cg.elt(b, h)), || {
                    format!("{} vs {}", cg.elt(a, lhs), cg.elt(a, rhs))
                });
            }
        }
        r.check(cg.restrict[i][gb.unit] == ga.unit, || format!("axiom (d) at {}", cg.show(i)), || {
            format!("G{}(e) = {}", cg.show(i), cg.elt(a, cg.restrict[i][gb.unit]))
        });
    }
    r
}

/// Morphisms `(i, g)` with `i: c′ → c`, `g ∈ G_c′`, composed by
/// `(i,g) ∘ (i′,h) = (i ∘ g_*(i′), Gi′(g) · h)`. Index `offset[i] + g`.
pub fn total_category(cg: &CrossedGroup) -> Result<FinCategory> {
    let report = check_crossed_group_axioms(cg);
    if let Some(f) = report.failures.first() {
        return Err(FamError::AxiomsFailed(format!("{}: {}", f.location, f.witness)));
    }
    let c = &cg.base;
    let mut offset = Vec::with_capacity(c.n_morphisms());
    let mut decode = Vec::new();
    let mut morphisms = Vec::new();
    for i in 0..c.n_morphisms() {
        let a = c.src(i);
        offset.push(decode.len());
        for g in 0..cg.groups[a].order() {
            decode.push((i, g));
            morphisms.push(Morphism { name: format!("({},{})", c.morphism(i).name, cg.elt(a, g)), src: a, dst: c.dst(i) });
        }
    }
    let identities = (0..c.n_objects()).map(|o| offset[c.id(o)] + cg.groups[o].unit).collect();
    FinCategory::from_fn(c.objects().to_vec(), morphisms, identities, |x, y| {
        let ((i, g), (ip, h)) = (decode[x], decode[y]);
        let j = c.compose(i, cg.action[ip][g]);
        let k = cg.groups[c.src(ip)].mult[cg.restrict[ip][g]][h];
        offset[j] + k
    })
}

/// Compare `Θ_T` of [`crossed_group_monad`] on the unary operations with
/// [`total_category`]: `(i, g)` goes to the map `y(a) → T y(c)` picking `(g, y(i))`.
pub fn check_theory_is_total(cg: &CrossedGroup) -> Result<Report> {
    let total = total_category(cg)?;
    let m = crossed_group_monad(cg)?;
    let c = &cg.base;
    let pos = hom_positions(c);
    let ops: Vec<(usize, Op)> = (0..c.n_objects()).map(|o| (o, m.e(o))).collect();
    let slice = theory_category(&m, &ops, 0)?;
    let mut mor = Vec::with_capacity(total.n_morphisms());
    for i in 0..c.n_morphisms() {
        let (a, b) = (c.src(i), c.dst(i));
        for g in 0..cg.groups[a].order() {
            let cell = OperationCell { op: Op::Elt(g), fill: yoneda_map(c, &pos, i) };
            let k = slice.evals[b]
                .lookup(a, &cell)
                .ok_or_else(|| FamError::Malformed(format!("cell ({}, {}) is not enumerated", c.morphism(i).name, cg.elt(a, g))))?;
            mor.push(slice.from_cell(b, a, k)?);
        }
    }
    let objs: Vec<usize> = (0..c.n_objects()).collect();
    Ok(check_isomorphism("theory_is_total", &total, &slice.cat, &objs, &mor))
}

/// `S = G`, `E(g ∈ G_c) = y(c)`, `E(i_g) = y(g_*(i))`.
pub struct CrossedGroupRep {
    cg: CrossedGroup,
    pos: Vec<usize>,
}

fn elt(t: &Op) -> usize {
    match t {
        Op::Elt(k) => *k,
        other => panic!("expected a group element, got {other}"),
    }
}

impl Family for CrossedGroupRep {
    fn name(&self) -> String {
        self.cg.name.clone()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        &self.cg.base
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        &self.cg.base
    }
    fn ops(&self, c: usize, _bound: usize) -> Vec<Op> {
        (0..self.cg.groups[c].order()).map(Op::Elt).collect()
    }
    fn grade(&self, _c: usize, _t: &Op) -> usize {
        0
    }
    fn beyond(&self, _bound: usize) -> Beyond {
        Beyond::Nothing
    }
    fn arity(&self, c: usize, _t: &Op) -> Presheaf {
        Presheaf::representable(&self.cg.base, c)
    }
    fn restrict(&self, i: usize, t: &Op) -> Op {
        Op::Elt(self.cg.restrict[i][elt(t)])
    }
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism {
        yoneda_map(&self.cg.base, &self.pos, self.cg.action[i][elt(t)])
    }
}

/// `e(c) = e_c`, `m(g, f) = f(id_c) · g`.
pub fn crossed_group_monad(cg: &CrossedGroup) -> Result<MonadRep> {
    let report = check_crossed_group_axioms(cg);
    if let Some(f) = report.failures.first() {
        return Err(FamError::AxiomsFailed(format!("{}: {}", f.location, f.witness)));
    }
    let pos = hom_positions(&cg.base);
    let rep = Arc::new(CrossedGroupRep { cg: cg.clone(), pos: pos.clone() });
    let (g1, g2) = (cg.clone(), cg.clone());
    let m = MonadRep::new(
        format!("crossed:{}", cg.name),
        rep,
        move |c| Op::Elt(g1.groups[c].unit),
        move |c, t, f| {
            let h = elt(&f[c][pos[g2.base.id(c)]]);
            Op::Elt(g2.groups[c].mult[h][elt(t)])
        },
        0,
    )?;
    Ok(yoneda_witnesses(m, |c, _| c))
}

/// Reversals `{1,τ}^k` on the semicube category `□_δ,≤n`:
/// `g_*(δ_{i,ε}) = δ_{i,ε⊕g_i}` and `Gδ_{i,ε}(g)` forgets coordinate `i`.
pub fn reversal_group(n: usize) -> CrossedGroup {
    let gen = cube_category(n, false);
    let groups = (0..=n).map(FiniteGroup::reversals).collect();
    let tags = gen.tags.clone();
    let drop_bit = |g: usize, i: usize| (g & ((1 << (i - 1)) - 1)) | ((g >> i) << (i - 1));
    CrossedGroup::from_generators(
        "reversal",
        &gen,
        groups,
        &|k, g| drop_bit(g, tags[k].index),
        &|k, g| {
            let t = tags[k];
            gen.gen_by_tag(GenTag { side: t.side ^ (g >> (t.index - 1) & 1), ..t }).expect("face generator")
        },
    )
}

/// [`reversal_group`] on `□_δ,≤2` with the reversal `t1` acting trivially on
/// `δ_{1,0}: s¹ → s²`, which breaks axiom (a).
pub fn broken_reversal_group() -> CrossedGroup {
    let mut cg = reversal_group(2);
    cg.name = "broken-reversal".into();
    let d = cg.base.morphism_index("d1_10").expect("face d1_10");
    cg.action[d][1] = d;
    cg
}

/// Coordinate permutations `Σ_k` on the cube category `□≤n`, or on `□_δ,≤n`
/// when `degeneracies` is false:
/// `γ_*(δ_{i,ε}) = δ_{γ(i),ε}`, `γ_*(σ_i) = σ_{γ(i)}`; `Gδ_{i,ε}(γ)` deletes `i`
/// and `Gσ_i(γ)` moves `i′` along with `i`. The degeneracy `σ_0` forgetting the
/// first coordinate is fixed by every `γ`, and `Gσ_0(γ)` fixes that coordinate.
pub fn symmetric_cube_group(n: usize, degeneracies: bool) -> CrossedGroup {
    let gen = cube_category(n, degeneracies);
    let sym: Vec<(FiniteGroup, Vec<Vec<usize>>)> = (0..=n).map(FiniteGroup::symmetric).collect();
    let index: Vec<std::collections::HashMap<Vec<usize>, usize>> =
        sym.iter().map(|(_, ps)| ps.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect()).collect();
    let perms: Vec<Vec<Vec<usize>>> = sym.iter().map(|(_, p)| p.clone()).collect();
    let groups = sym.into_iter().map(|(g, _)| g).collect();
    let tags = gen.tags.clone();
    let restrict = |k: usize, g: usize| -> usize {
        let t = tags[k];
        let gamma = &perms[t.dim][g];
        if t.kind == 'd' {
            index[t.dim - 1][&perm_delete(gamma, t.index - 1)]
        } else if t.index == 0 {
            let p: Vec<usize> = std::iter::once(0).chain(gamma.iter().map(|x| x + 1)).collect();
            index[t.dim + 1][&p]
        } else {
            index[t.dim + 1][&perm_split(gamma, t.index - 1)]
        }
    };
    let act = |k: usize, g: usize| -> usize {
        let t = tags[k];
        if t.kind == 's' && t.index == 0 {
            return k;
        }
        let gi = perms[t.dim][g][t.index - 1];
        gen.gen_by_tag(GenTag { index: gi + 1, ..t }).expect("generator")
    };
    CrossedGroup::from_generators("symmetric", &gen, groups, &restrict, &act)
}

/// `γ` with the point `i` removed from its domain, both sides renumbered (0-based).
pub fn perm_delete(gamma: &[usize], i: usize) -> Vec<usize> {
    let gi = gamma[i];
    (0..gamma.len()).filter(|&x| x != i).map(|x| if gamma[x] > gi { gamma[x] - 1 } else { gamma[x] }).collect()
}

/// `γ` on `{0..i, i′, i+1..}` with `i′` following `i` (0-based).
pub fn perm_split(gamma: &[usize], i: usize) -> Vec<usize> {
    let gi = gamma[i];
    (0..=gamma.len())
        .map(|x| {
            if x == i + 1 {
                gi + 1
            } else {
                let y = gamma[if x <= i { x } else { x - 1 }];
                if y <= gi { y } else { y + 1 }
            }
        })
        .collect()
}

/// The cyclic crossed simplicial group on `Δ≤n`, `[k] ↦ ℤ/(k+1)`, from
/// `τδ_i = δ_{i-1}τ`, `τδ_0 = δ_k`, `τσ_i = σ_{i-1}τ`, `τσ_0 = σ_kτ²`.
pub fn cyclic_group(n: usize) -> CrossedGroup {
    let gen = simplex_category(n);
    let groups = (0..=n).map(|k| FiniteGroup::cyclic(k + 1)).collect();
    let tags = gen.tags.clone();
    let src_order = |k: usize| gen.gens[k].src + 1;
    // τ acting on one generator: (image generator, G(gen)(τ))
    let step = |k: usize| -> (usize, usize) {
        let t = tags[k];
        let (idx, twist) = match (t.kind, t.index) {
            ('d', 0) => (t.dim, 0),
            ('d', i) => (i - 1, 1),
            ('s', 0) => (t.dim, 2),
            (_, i) => (i - 1, 1),
        };
        (gen.gen_by_tag(GenTag { index: idx, ..t }).expect("generator"), twist % src_order(k))
    };
    // τ^j = τ · τ^{j-1}
    let walk = |k: usize, j: usize| -> (usize, usize) {
        let (mut cur, mut res) = (k, 0);
        for _ in 0..j {
            let (next, tw) = step(cur);
            res = (tw + res) % src_order(k);
            cur = next;
        }
        (cur, res)
    };
    CrossedGroup::from_generators("cyclic", &gen, groups, &|k, g| walk(k, g).1, &|k, g| walk(k, g).0)
}
