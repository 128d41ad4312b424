//! Grids of cubes and the cubical pasting monad on `□_δ,≤n`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{cube_category, Generated};
use crate::error::{FamError, Result};
use crate::famrep::{Beyond, Family, Op, OperationCell};
use crate::fincat::FinCategory;
use crate::monad::{Algebra, MonadRep};
use crate::presheaf::{hom_set_filtered, Presheaf, PresheafMorphism};
use crate::report::Report;

/// `□_δ,≤n` with, for every morphism `s^a → s^b`, which output coordinates are
/// fixed (`Some(ε)`) and which carry the input coordinates in order (`None`).
#[derive(Debug)]
pub struct CubeBase {
    pub n: usize,
    pub gen: Generated,
    pub faces: Vec<Vec<Option<bool>>>,
}

impl CubeBase {
    fn new(n: usize) -> Self {
        let gen = cube_category(n, false);
        let faces = (0..gen.cat.n_morphisms())
            .map(|f| {
                let b = gen.cat.dst(f);
                let map = &gen.maps[f];
                (0..b)
                    .map(|p| {
                        let bits: Vec<usize> = map.iter().map(|&w| w >> p & 1).collect();
                        if bits.iter().all(|&x| x == bits[0]) {
                            Some(bits[0] == 1)
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        CubeBase { n, gen, faces }
    }

    pub fn cat(&self) -> &Arc<FinCategory> {
        &self.gen.cat
    }
}

/// The shared semicube base of dimension `n`, so grids and monads agree on it.
pub fn semicube_base(n: usize) -> Arc<CubeBase> {
    static BASES: OnceLock<Mutex<HashMap<usize, Arc<CubeBase>>>> = OnceLock::new();
    let mut bases = BASES.get_or_init(Default::default).lock().unwrap();
    bases.entry(n).or_insert_with(|| Arc::new(CubeBase::new(n))).clone()
}

/// One direction of a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Point(usize),
    Interval(usize),
}

/// The `k₁ × ⋯ × k_d` grid: an `m`-cell chooses a point or an interval in every
/// direction, with exactly `m` intervals.
#[derive(Debug, Clone)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub cells: Vec<Vec<Vec<Slot>>>,
    pub index: Vec<HashMap<Vec<Slot>, usize>>,
    pub presheaf: Presheaf,
}

fn restrict_cell(cell: &[Slot], face: &[Option<bool>]) -> Vec<Slot> {
    let mut p = 0;
    cell.iter()
        .map(|&s| match s {
            Slot::Interval(j) => {
                let out = match face[p] {
                    None => Slot::Interval(j),
                    Some(e) => Slot::Point(j + e as usize),
                };
                p += 1;
                out
            }
            pt => pt,
        })
        .collect()
}

impl Grid {
    pub fn new(base: &CubeBase, dims: &[usize]) -> Result<Self> {
        if dims.len() > base.n {
            return Err(FamError::DimensionExceeded { requested: dims.len(), max: base.n });
        }
        let mut cells: Vec<Vec<Vec<Slot>>> = vec![Vec::new(); base.n + 1];
        let mut cur = Vec::new();
        fn go(dims: &[usize], cur: &mut Vec<Slot>, cells: &mut Vec<Vec<Vec<Slot>>>) {
            if cur.len() == dims.len() {
                let m = cur.iter().filter(|s| matches!(s, Slot::Interval(_))).count();
                cells[m].push(cur.clone());
                return;
            }
            let k = dims[cur.len()];
            for j in 0..=k {
                cur.push(Slot::Point(j));
                go(dims, cur, cells);
                cur.pop();
                if j < k {
                    cur.push(Slot::Interval(j));
                    go(dims, cur, cells);
                    cur.pop();
                }
            }
        }
        go(dims, &mut cur, &mut cells);
        let index: Vec<HashMap<Vec<Slot>, usize>> =
            cells.iter().map(|v| v.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()).collect();
        let cat = base.cat();
        let action = (0..cat.n_morphisms())
            .map(|f| {
                let a = cat.src(f);
                cells[cat.dst(f)].iter().map(|c| index[a][&restrict_cell(c, &base.faces[f])]).collect()
            })
            .collect();
        let labels = cells
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| {
                        let parts: Vec<String> = c
                            .iter()
                            .map(|s| match s {
                                Slot::Point(j) => j.to_string(),
                                Slot::Interval(j) => format!("[{j},{}]", j + 1),
                            })
                            .collect();
                        if parts.is_empty() { "*".to_string() } else { parts.join("x") }
                    })
                    .collect()
            })
            .collect();
        let presheaf = Presheaf::new(cat.clone(), cells.iter().map(Vec::len).collect(), action)?.with_labels(labels);
        Ok(Grid { dims: dims.to_vec(), cells, index, presheaf })
    }

    pub fn cell(&self, slots: &[Slot]) -> Option<(usize, usize)> {
        let m = slots.iter().filter(|s| matches!(s, Slot::Interval(_))).count();
        self.index.get(m)?.get(slots).map(|&i| (m, i))
    }

    /// The inclusion of `small` into `self` shifted by `offset`.
    pub fn embed(&self, small: &Grid, offset: &[usize]) -> Option<PresheafMorphism> {
        let comps = small
            .cells
            .iter()
            .map(|v| {
                v.iter()
                    .map(|c| {
                        let shifted: Vec<Slot> = c
                            .iter()
                            .zip(offset)
                            .map(|(s, o)| match s {
                                Slot::Point(j) => Slot::Point(j + o),
                                Slot::Interval(j) => Slot::Interval(j + o),
                            })
                            .collect();
                        self.cell(&shifted).map(|(_, i)| i)
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(PresheafMorphism { comps })
    }
}

/// `grid(k₁,…,k_d)` over `□_δ,≤n`.
pub fn grid(n: usize, dims: &[usize]) -> Result<Presheaf> {
    Ok(Grid::new(&semicube_base(n), dims)?.presheaf)
}

/// `S_n = ℕⁿ` graded by the largest side, `E(k) = grid(k)`, restriction by the
/// fixed coordinates of a face.
pub struct CubicalRep {
    base: Arc<CubeBase>,
    grids: Mutex<HashMap<Vec<usize>, Arc<Grid>>>,
}

fn sides(t: &Op) -> &[usize] {
    match t {
        Op::Nat(v) => v,
        other => panic!("expected grid sides, got {other}"),
    }
}

impl CubicalRep {
    pub fn new(n: usize) -> Self {
        CubicalRep { base: semicube_base(n), grids: Default::default() }
    }

    pub fn grid(&self, dims: &[usize]) -> Arc<Grid> {
        if let Some(g) = self.grids.lock().unwrap().get(dims) {
            return g.clone();
        }
        let g = Arc::new(Grid::new(&self.base, dims).expect("operation dimension within the base"));
        self.grids.lock().unwrap().insert(dims.to_vec(), g.clone());
        g
    }
}

impl Family for CubicalRep {
    fn name(&self) -> String {
        "cubical".into()
    }
    fn source_base(&self) -> &Arc<FinCategory> {
        self.base.cat()
    }
    fn target_base(&self) -> &Arc<FinCategory> {
        self.base.cat()
    }
    fn ops(&self, c: usize, bound: usize) -> Vec<Op> {
        let mut out = vec![Vec::new()];
        for _ in 0..c {
            out = out.into_iter().flat_map(|v: Vec<usize>| (0..=bound).map(move |k| [v.clone(), vec![k]].concat())).collect();
        }
        out.into_iter().map(Op::Nat).collect()
    }
    fn grade(&self, _c: usize, t: &Op) -> usize {
        sides(t).iter().copied().max().unwrap_or(0)
    }
    fn beyond(&self, bound: usize) -> Beyond {
        // an operation beyond the bound restricts to a 1-dimensional one of length bound+1
        Beyond::Probes(vec![(1, Op::Nat(vec![bound + 1]))])
    }
    fn arity(&self, _c: usize, t: &Op) -> Presheaf {
        self.grid(sides(t)).presheaf.clone()
    }
    fn restrict(&self, i: usize, t: &Op) -> Op {
        let k = sides(t);
        Op::Nat(self.base.faces[i].iter().zip(k).filter(|(f, _)| f.is_none()).map(|(_, &x)| x).collect())
    }
    fn arity_map(&self, i: usize, t: &Op) -> PresheafMorphism {
        let k = sides(t);
        let face = &self.base.faces[i];
        let small = self.grid(sides(&self.restrict(i, t)));
        let big = self.grid(k);
        let comps = small
            .cells
            .iter()
            .enumerate()
            .map(|(m, v)| {
                v.iter()
                    .map(|c| {
                        let mut it = c.iter();
                        let s: Vec<Slot> = face
                            .iter()
                            .zip(k)
                            .map(|(f, &kp)| match f {
                                None => *it.next().expect("free coordinate"),
                                Some(false) => Slot::Point(0),
                                Some(true) => Slot::Point(kp),
                            })
                            .collect();
                        big.index[m][&s]
                    })
                    .collect()
            })
            .collect();
        PresheafMorphism { comps }
    }
}

/// `e(∗_n) = (1,…,1)`; `m` sums, per direction, the lengths labelling the edges
/// of that direction along the grid's axis.
pub fn cubical_monad(n_max: usize, grid_bound: usize) -> MonadRep {
    assert!(n_max >= 1, "the cubical monad needs at least one dimension");
    let rep = Arc::new(CubicalRep::new(n_max));
    let r2 = rep.clone();
    MonadRep::new(
        "cubical",
        rep,
        |c| Op::Nat(vec![1; c]),
        move |_c, t, f| {
            let k = sides(t);
            let g = r2.grid(k);
            let sums = (0..k.len())
                .map(|d| {
                    (0..k[d])
                        .map(|j| {
                            let mut s = vec![Slot::Point(0); k.len()];
                            s[d] = Slot::Interval(j);
                            let (m, idx) = g.cell(&s).expect("axis edge");
                            sides(&f[m][idx])[0]
                        })
                        .sum()
                })
                .collect();
            Op::Nat(sums)
        },
        grid_bound,
    )
    .expect("endo-representation")
}

/// A cubical set whose cells of dimension ≤ 2 are the objects, morphisms and
/// commutative squares of `cat`; cells are stored as vertex objects followed by
/// edge morphisms in `(vertex, direction)` order.
pub struct CubicalNerve {
    pub presheaf: Presheaf,
    pub cells: Vec<Vec<Vec<usize>>>,
    pub index: Vec<HashMap<Vec<usize>, usize>>,
}

fn edges_of(d: usize) -> Vec<(usize, usize)> {
    (0..1usize << d).flat_map(|v| (0..d).filter(move |p| v >> p & 1 == 0).map(move |p| (v, p))).collect()
}

/// The cubical nerve of `cat` over `□_δ,≤n`, `n ≤ 2`.
pub fn cubical_nerve(n: usize, cat: &FinCategory) -> Result<CubicalNerve> {
    if n > 2 {
        return Err(FamError::DimensionExceeded { requested: n, max: 2 });
    }
    let base = semicube_base(n);
    let mut cells: Vec<Vec<Vec<usize>>> = vec![(0..cat.n_objects()).map(|o| vec![o]).collect()];
    if n >= 1 {
        cells.push(cat.morphisms().iter().enumerate().map(|(f, m)| vec![m.src, m.dst, f]).collect());
    }
    if n >= 2 {
        let mut sq = Vec::new();
        // edges (0,p0)=a, (0,p1)=l, (1,p1)=r, (2,p0)=b with r∘a = b∘l
        for a in 0..cat.n_morphisms() {
            for l in cat.hom_from(cat.src(a)) {
                for r in cat.hom_from(cat.dst(a)) {
                    for &b in cat.hom(cat.dst(l), cat.dst(r)) {
                        if cat.compose(r, a) == cat.compose(b, l) {
                            sq.push(vec![cat.src(a), cat.dst(a), cat.dst(l), cat.dst(r), a, l, r, b]);
                        }
                    }
                }
            }
        }
        cells.push(sq);
    }
    let index: Vec<HashMap<Vec<usize>, usize>> =
        cells.iter().map(|v| v.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    let bc = base.cat();
    let mut action = Vec::with_capacity(bc.n_morphisms());
    for f in 0..bc.n_morphisms() {
        let (a, b) = (bc.src(f), bc.dst(f));
        let phi = &base.gen.maps[f];
        let (ea, eb) = (edges_of(a), edges_of(b));
        let row = cells[b]
            .iter()
            .map(|c| {
                let mut out: Vec<usize> = (0..1usize << a).map(|v| c[phi[v]]).collect();
                for &(v, p) in &ea {
                    let (w, w2) = (phi[v], phi[v | 1 << p]);
                    let q = (w ^ w2).trailing_zeros() as usize;
                    let k = eb.iter().position(|&e| e == (w, q)).expect("faces send edges to edges");
                    out.push(c[(1 << b) + k]);
                }
                index[a][&out]
            })
            .collect();
        action.push(row);
    }
    let presheaf = Presheaf::new(bc.clone(), cells.iter().map(Vec::len).collect(), action)?;
    Ok(CubicalNerve { presheaf, cells, index })
}

/// The nerve of `cat` as an algebra: a grid of cells is sent to the cell whose
/// edges are the composites along the grid's boundary.
pub fn cubical_nerve_algebra(m: &MonadRep, cat: &FinCategory, bound: usize) -> Result<Algebra> {
    let base = semicube_base(m.base().n_objects() - 1);
    if !Arc::ptr_eq(base.cat(), m.base()) {
        return Err(FamError::BaseMismatch);
    }
    let nerve = cubical_nerve(base.n, cat)?;
    let grids: Mutex<HashMap<Vec<usize>, Arc<Grid>>> = Default::default();
    let carrier = nerve.presheaf.clone();
    Algebra::from_fn(m, carrier, bound, &|d, oc: &OperationCell| {
        let k = sides(&oc.op).to_vec();
        let g = {
            let mut gs = grids.lock().unwrap();
            gs.entry(k.clone()).or_insert_with(|| Arc::new(Grid::new(&base, &k).expect("grid"))).clone()
        };
        let corner = |v: usize| -> Vec<Slot> { (0..d).map(|p| Slot::Point(if v >> p & 1 == 1 { k[p] } else { 0 })).collect() };
        let mut out: Vec<usize> = (0..1usize << d).map(|v| nerve.cells[0][oc.fill.comps[0][g.cell(&corner(v)).unwrap().1]][0]).collect();
        for (v, p) in edges_of(d) {
            let mut acc = cat.id(out[v]);
            for j in 0..k[p] {
                let mut s = corner(v);
                s[p] = Slot::Interval(j);
                let e = oc.fill.comps[1][g.cell(&s).unwrap().1];
                acc = cat.compose(nerve.cells[1][e][2], acc);
            }
            out.push(acc);
        }
        nerve.index[d].get(&out).copied().ok_or_else(|| FamError::InvalidAlgebra(format!("pasted cell {out:?} is not in the nerve")))
    })
}

/// Pairs of distinct operations of dimension `n` with isomorphic arities.
pub fn check_shapely(n_max: usize, n: usize, bound: usize) -> Result<Report> {
    let rep = CubicalRep::new(n_max);
    let mut r = Report::new("shapely");
    let ops = rep.ops(n, bound);
    for (i, s) in ops.iter().enumerate() {
        for t in &ops[i + 1..] {
            let isos = crate::presheaf::find_isos(&rep.arity(n, s), &rep.arity(n, t))?;
            r.check(isos.is_empty(), || format!("arities of {s} and {t}"), || "are isomorphic".into());
        }
    }
    Ok(r)
}

/// Interchange in an algebra: every `(2,2)` cell composed row-first and
/// column-first, compared with the direct `(2,2)` composite.
pub fn check_interchange(m: &MonadRep, a: &Algebra) -> Result<Report> {
    let mut r = Report::new("interchange");
    let n = m.base().n_objects() - 1;
    if n < 2 || a.bound < 2 {
        return Err(FamError::BoundTooSmall("interchange needs dimension 2 and bound 2".into()));
    }
    let base = semicube_base(n);
    let g22 = Grid::new(&base, &[2, 2])?;
    let g21 = Grid::new(&base, &[2, 1])?;
    let g12 = Grid::new(&base, &[1, 2])?;
    let square = |g: &Grid, i: usize, j: usize| g.cell(&[Slot::Interval(i), Slot::Interval(j)]).unwrap().1;
    let apply = |op: &[usize], fill: PresheafMorphism| -> Option<usize> {
        let oc = OperationCell { op: Op::Nat(op.to_vec()), fill };
        a.cells.lookup(2, &oc).map(|k| a.structure.comps[2][k])
    };
    // the map from a two-square grid with the given squares, if their shared edge agrees
    let glue = |g: &Grid, at: [usize; 2]| -> Result<Option<PresheafMorphism>> {
        let want: Vec<(usize, usize)> = if g.dims == [1, 2] {
            vec![(square(g, 0, 0), at[0]), (square(g, 0, 1), at[1])]
        } else {
            vec![(square(g, 0, 0), at[0]), (square(g, 1, 0), at[1])]
        };
        let allowed = |c: usize, x: usize, y: usize| c != 2 || want.iter().all(|&(s, v)| s != x || v == y);
        let mut v = hom_set_filtered(&g.presheaf, &a.carrier, &allowed, false)?;
        Ok(if v.len() == 1 { v.pop() } else { None })
    };
    let big = Op::Nat(vec![2, 2]);
    for (k, oc) in a.cells.cells[2].iter().enumerate() {
        if oc.op != big {
            continue;
        }
        let direct = a.structure.comps[2][k];
        let rows = [0, 1].map(|j| apply(&[2, 1], g22.embed(&g21, &[0, j]).unwrap().then(&oc.fill)));
        let cols = [0, 1].map(|i| apply(&[1, 2], g22.embed(&g12, &[i, 0]).unwrap().then(&oc.fill)));
        let label = a.cells.tx.label(2, k);
        let (Some(r0), Some(r1), Some(c0), Some(c1)) = (rows[0], rows[1], cols[0], cols[1]) else {
            r.fail(format!("interchange at {label}"), "a row or column composite lies beyond the bound");
            continue;
        };
        let row_first = glue(&g12, [r0, r1])?.and_then(|f| apply(&[1, 2], f));
        let col_first = glue(&g21, [c0, c1])?.and_then(|f| apply(&[2, 1], f));
        r.check(row_first == Some(direct) && col_first == Some(direct), || format!("interchange at {label}"), || {
            format!("direct {direct}, rows first {row_first:?}, columns first {col_first:?}")
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monad::{check_algebra, free_algebra, validate_monad_rep};
    use crate::presheaf::find_isos;
    use crate::report::Status;

    #[test]
    fn grid_counts() {
        assert_eq!(grid(2, &[2, 2]).unwrap().sizes, vec![9, 12, 4]);
        assert_eq!(grid(2, &[3]).unwrap().sizes, vec![4, 3, 0]);
        assert!(matches!(grid(2, &[1, 1, 1]), Err(FamError::DimensionExceeded { requested: 3, max: 2 })));
    }

    #[test]
    fn unit_grid_is_representable() {
        let b = semicube_base(2);
        for n in 0..=2 {
            let g = grid(2, &vec![1; n]).unwrap();
            assert_eq!(find_isos(&g, &Presheaf::representable(b.cat(), n)).unwrap().len(), 1);
        }
    }

    #[test]
    fn grid_is_product_of_paths() {
        // vertices, edges and squares of a product of paths of lengths k1, k2
        for (k1, k2) in [(0, 3), (2, 1), (3, 3)] {
            let g = grid(2, &[k1, k2]).unwrap();
            let (v1, v2) = (k1 + 1, k2 + 1);
            assert_eq!(g.sizes, vec![v1 * v2, k1 * v2 + v1 * k2, k1 * k2]);
        }
    }

    #[test]
    fn mult_example() {
        let m = cubical_monad(2, 3);
        let t = Op::Nat(vec![3, 2]);
        let et = m.rep.arity(2, &t);
        let rep = CubicalRep::new(2);
        let g = rep.grid(&[3, 2]);
        let labels: Vec<Vec<Op>> = (0..3)
            .map(|d| {
                g.cells[d]
                    .iter()
                    .map(|c| {
                        let k: Vec<usize> = c
                            .iter()
                            .enumerate()
                            .filter_map(|(p, s)| match s {
                                Slot::Interval(j) => Some(if p == 0 { [2, 1, 3][*j] } else { [1, 2][*j] }),
                                _ => None,
                            })
                            .collect();
                        Op::Nat(k)
                    })
                    .collect()
            })
            .collect();
        assert_eq!(et.sizes, vec![12, 17, 6]);
        assert_eq!(m.m(2, &t, &labels), Op::Nat(vec![6, 3]));
        assert_eq!(m.e(2), Op::Nat(vec![1, 1]));
    }

    #[test]
    fn validates_at_small_bound() {
        let m = cubical_monad(2, 2);
        let r = validate_monad_rep(&m, 2);
        assert_eq!(r.status, Status::Pass, "{:?}", &r.failures[..r.failures.len().min(3)]);
    }

    #[test]
    fn shapely_except_degenerate_grids() {
        assert_eq!(check_shapely(2, 1, 3).unwrap().status, Status::Pass);
        // (k,0) and (0,k) are both paths of length k
        let r = check_shapely(2, 2, 3).unwrap();
        assert_eq!(r.failures.len(), 3);
        assert!(r.failures.iter().all(|f| f.location.contains(",0)") && f.location.contains("(0,")));
    }

    #[test]
    fn interchange_on_free_algebra() {
        let m = cubical_monad(2, 3);
        let x = grid(2, &[1, 1]).unwrap();
        let a = free_algebra(&m, &x, 2).unwrap();
        let r = check_interchange(&m, &a).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.failures);
    }

    fn commuting_square() -> FinCategory {
        use crate::fincat::{build_from_presentation, Generator, Presentation};
        let gen = |n: &str, s, d| Generator { name: n.into(), src: s, dst: d };
        build_from_presentation(&Presentation {
            objects: vec!["00".into(), "10".into(), "01".into(), "11".into()],
            generators: vec![gen("a", 0, 1), gen("l", 0, 2), gen("r", 1, 3), gen("b", 2, 3)],
            relations: vec![(vec![1, 3], vec![0, 2])],
            cap: 100,
        })
        .unwrap()
    }

    #[test]
    fn nerve_of_square_is_an_algebra() {
        let m = cubical_monad(2, 2);
        let sq = commuting_square();
        let nerve = cubical_nerve(2, &sq).unwrap();
        assert_eq!(nerve.presheaf.sizes[0], 4);
        assert_eq!(nerve.presheaf.sizes[1], 9);
        let a = cubical_nerve_algebra(&m, &sq, 2).unwrap();
        assert_eq!(check_algebra(&m, &a).unwrap().status, Status::Pass);
        assert_eq!(check_interchange(&m, &a).unwrap().status, Status::Pass);
    }
}
