//! One line per acceptance criterion. Exits non-zero if a criterion fails
//! that is not listed in `KNOWN_FAILURES`.

mod common;

use std::error::Error;
use std::sync::Arc;
use std::time::Instant;

use common::random;
use famkit::famrep::{check_cartesian, compose, identity_rep, ops_presheaf, FreeCategoryRep};
use famkit::fincat::{g1, semicube};
use famkit::monad::{check_monad_laws_on, free_algebra, naturality_squares, validate_monad_rep};
use famkit::poly::{check_gamma_evaluation, compose_with_data, familial_replacement, find_polynomial_iso, gamma, Polynomial};
use famkit::presheaf::{category_of_elements, coproduct, coyoneda, path, quotient};
use famkit::theory::{adjoin_cell, check_model, nerve, theory_category};
use famkit::zoo::{
    check_crossed_group_axioms, check_factorization_theory, check_interchange, check_theory_is_total, crossed_group_monad, cubical_monad, factorization_monad,
    free_category_monad, grid, reedy_simplex_data, reversal_group, symmetric_cube_group, total_category, CrossedGroup, CubicalRep, Slot,
};
use famkit::{evaluate, FamRep, Op, Presheaf, Report};

/// The symmetric crossed group on cubes with degeneracies is not an action; see the ledger.
const KNOWN_FAILURES: &[usize] = &[9];

type Outcome = Result<(bool, String), Box<dyn Error>>;

fn first_failure(r: &Report) -> String {
    r.failures.first().map(|f| format!("{}: {}", f.location, f.witness)).unwrap_or_default()
}

/// Monotone maps from the (m+1)-chain to the (n+1)-chain, by enumeration.
fn monotone_maps(m: usize, n: usize) -> usize {
    fn go(pos: usize, from: usize, m: usize, n: usize) -> usize {
        if pos > m {
            return 1;
        }
        (from..=n).map(|v| go(pos + 1, v, m, n)).sum()
    }
    go(0, 0, m, n)
}

/// Paths of length ≤ `max_len` in a graph given by its edge list, by depth-first search.
fn paths_by_dfs(n_vertices: usize, edges: &[(usize, usize)], max_len: usize) -> (usize, usize) {
    fn extend(v: usize, left: usize, edges: &[(usize, usize)]) -> usize {
        if left == 0 {
            return 0;
        }
        edges.iter().filter(|e| e.0 == v).map(|e| 1 + extend(e.1, left - 1, edges)).sum()
    }
    let nonempty: usize = (0..n_vertices).map(|v| extend(v, max_len, edges)).sum();
    (n_vertices, n_vertices + nonempty)
}

fn free() -> FamRep {
    Arc::new(FreeCategoryRep::new())
}

fn chains(n_max: usize) -> Vec<(usize, Op)> {
    let mut ops = vec![(0, Op::nat(0))];
    ops.extend((1..=n_max).map(|n| (1, Op::nat(n))));
    ops
}

fn c1_free_category() -> Outcome {
    let start = Instant::now();
    let m = free_category_monad();
    let r = validate_monad_rep(&m, 4);
    let ev = evaluate(m.rep.as_ref(), &path(2), 4)?;
    let oracle = paths_by_dfs(3, &[(0, 1), (1, 2)], 4);
    let secs = start.elapsed().as_secs_f64();
    let counts = (ev.tx.sizes[0], ev.tx.sizes[1]);
    let ok = r.passed() && ev.exact && counts == oracle && counts == (3, 6) && secs < 10.0;
    Ok((ok, format!("validate at 4: {} instances, {} failures; T(path2) = {counts:?}, oracle {oracle:?}, exact {}; {secs:.2}s", r.instances_checked, r.failures.len(), ev.exact)))
}

fn c2_monad_laws() -> Outcome {
    let m = free_category_monad();
    let (mut instances, mut failures, mut first) = (0, 0, String::new());
    for seed in 0..25 {
        let x = random::graph_with(&mut random::rng(2000 + seed), 4, 6);
        let r = check_monad_laws_on(&m, &x, 3)?;
        instances += r.instances_checked;
        failures += r.failures.len();
        if first.is_empty() {
            first = first_failure(&r);
        }
    }
    Ok((failures == 0, format!("25 graphs at bound 3: {instances} elementwise instances, {failures} failures {first}")))
}

fn c3_cartesian() -> Outcome {
    let m = free_category_monad();
    let mut rng = random::rng(3000);
    let mut samples = Vec::new();
    for _ in 0..20 {
        let (x, y, h) = random::graph_morphism(&mut rng);
        samples.extend(naturality_squares(&m, &x, &y, &h, 3)?);
    }
    let r = check_cartesian(&samples);
    Ok((r.passed(), format!("{} eta and mu squares over 20 morphisms: {} instances, {} failures {}", samples.len(), r.instances_checked, r.failures.len(), first_failure(&r))))
}

fn c4_coyoneda() -> Outcome {
    let mut rng = random::rng(4000);
    let (mut checked, mut bad) = (0, Vec::new());
    for base in [g1(), Arc::new(semicube(2))] {
        for k in 0..25 {
            let x = random::presheaf(&mut rng, &base, 30);
            let (col, cmp) = coyoneda(&x)?;
            let natural = cmp.check_natural(&col.apex, &x).passed();
            let bijective = cmp.inverse().is_some() && col.apex.sizes == x.sizes;
            checked += 1;
            if !(natural && bijective && x.n_cells() <= 30) {
                bad.push(format!("{} #{k}", base.objects().join("")));
            }
        }
    }
    Ok((bad.is_empty(), format!("{checked} presheaves over g1 and semicube(2): comparison natural and bijective; failures {bad:?}")))
}

fn c5_reedy() -> Outcome {
    let d = reedy_simplex_data(2);
    let m = factorization_monad(&d)?;
    let ev = evaluate(m.rep.as_ref(), &Presheaf::representable(m.base(), 1), 0)?;
    let oracle: Vec<usize> = (0..3).map(|k| monotone_maps(k, 1)).collect();
    let ops: Vec<(usize, Op)> = (0..3).map(|o| (o, m.e(o))).collect();
    let slice = theory_category(&m, &ops, 0)?;
    let homs: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| slice.cat.hom(a, b).len()).collect()).collect();
    let expected: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| monotone_maps(a, b)).collect()).collect();
    let iso = check_factorization_theory(&d)?;
    let ok = ev.tx.sizes == oracle && oracle == [2, 3, 4] && homs == expected && iso.passed();
    Ok((ok, format!("T(y[1]) = {:?}, oracle {oracle:?}; theory homs {homs:?}, oracle {expected:?}; theory iso to the total category: {:?}", ev.tx.sizes, iso.status)))
}

fn c6_cubical() -> Outcome {
    let m = cubical_monad(2, 3);
    let t = Op::Nat(vec![3, 2]);
    let g = CubicalRep::new(2).grid(&[3, 2]);
    // label each cell of the 3×2 grid by the sides of the intervals it spans
    let labels: Vec<Vec<Op>> = (0..3)
        .map(|d| {
            g.cells[d]
                .iter()
                .map(|c| {
                    Op::Nat(
                        c.iter()
                            .enumerate()
                            .filter_map(|(p, s)| match s {
                                Slot::Interval(j) => Some(if p == 0 { [2, 1, 3][*j] } else { [1, 2][*j] }),
                                _ => None,
                            })
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    let product = m.m(2, &t, &labels);
    let g22 = grid(2, &[2, 2])?.sizes;
    let oracle = vec![3 * 3, 2 * 3 + 3 * 2, 2 * 2];
    // free algebras on presheaves with at most four squares
    let base = m.base().clone();
    let square = Presheaf::representable(&base, 2);
    let two = coproduct(&[square.clone(), square], &base)?.apex;
    let corner = quotient(&two, &[(0, 0, 7)]).0;
    let mut carriers: Vec<(String, Presheaf)> = [[1, 1], [2, 1], [1, 2], [2, 2]].iter().map(|d| Ok((format!("grid{d:?}"), grid(2, d)?))).collect::<famkit::Result<_>>()?;
    carriers.push(("two squares at a corner".into(), corner));
    // staircase paths of length 4 in the 2×2 grid need grid_bound 4 for an exact free algebra
    let m4 = cubical_monad(2, 4);
    let (mut instances, mut failures, mut first) = (0, 0, String::new());
    for (name, x) in &carriers {
        let a = free_algebra(&m4, x, 4)?;
        let r = check_interchange(&m4, &a)?;
        instances += r.instances_checked;
        failures += r.failures.len();
        if first.is_empty() && !r.passed() {
            first = format!("{name}: {}", first_failure(&r));
        }
    }
    let ok = product == Op::Nat(vec![6, 3]) && g22 == oracle && failures == 0 && instances > 0;
    Ok((ok, format!("m((3,2),(2,1,3),(1,2)) = {product}; grid(2,2) = {g22:?}, oracle {oracle:?}; interchange on {} free algebras (grid_bound 4): {instances} squares, {failures} failures {first}", carriers.len())))
}

fn c7_theory() -> Outcome {
    let slice = theory_category(&free_category_monad(), &chains(3), 3)?;
    let mut mismatches = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let (got, want) = (slice.cat.hom(a, b).len(), monotone_maps(a, b));
            if got != want {
                mismatches.push(format!("({a},{b}): {got} vs {want}"));
            }
        }
    }
    let e12 = slice.cat.hom(1, 2).len();
    Ok((mismatches.is_empty() && e12 == 6, format!("16 hom-sets against monotone-map counts, |Θ(TE1,TE2)| = {e12}; mismatches {mismatches:?}")))
}

fn c8_nerve() -> Outcome {
    let m = free_category_monad();
    let slice = theory_category(&m, &chains(3), 3)?;
    let a = free_algebra(&m, &path(2), 3)?;
    let x = nerve(&m, &a, &slice)?;
    let r = check_model(&slice, &x)?;
    let top = (0..slice.n_objects()).max_by_key(|&o| slice.arities[o].n_cells()).unwrap();
    let padded = check_model(&slice, &adjoin_cell(&x, top, 0)?)?;
    let witness = first_failure(&padded);
    let ok = r.passed() && !padded.passed() && !witness.is_empty();
    Ok((ok, format!("nerve sizes {:?} on {} objects: {:?}; padded at TE{top}: {:?}, witness {witness}", x.sizes, slice.n_objects(), r.status, padded.status)))
}

fn crossed_summary(cg: &CrossedGroup) -> Result<(bool, String), Box<dyn Error>> {
    let axioms = check_crossed_group_axioms(cg);
    let mut parts = vec![format!("{}: axioms {} instances, {} failures", cg.name, axioms.instances_checked, axioms.failures.len())];
    if !axioms.passed() {
        parts.push(format!("first {}", first_failure(&axioms)));
        return Ok((false, parts.join(", ")));
    }
    let t = total_category(cg)?;
    let n = t.n_objects();
    let counts_ok = (0..n).all(|a| (0..n).all(|b| t.hom(a, b).len() == cg.base.hom(a, b).len() * cg.groups[a].order()));
    let theory = check_theory_is_total(cg)?;
    parts.push(format!("hom counts multiply: {counts_ok}, theory iso to total: {:?}", theory.status));
    Ok((counts_ok && theory.passed(), parts.join(", ")))
}

fn c9_crossed() -> Outcome {
    let (rev_ok, rev) = crossed_summary(&reversal_group(2))?;
    crossed_group_monad(&reversal_group(2))?;
    let (sigma_ok, sigma) = crossed_summary(&symmetric_cube_group(3, true))?;
    let (_, faces) = crossed_summary(&symmetric_cube_group(3, false))?;
    Ok((rev_ok && sigma_ok, format!("{rev}; {sigma}; faces-only variant (not the criterion) {faces}")))
}

/// Grade of each object of `∫S` for the free category at `bound`.
fn grades(bound: usize) -> famkit::Result<Vec<usize>> {
    let rep = free();
    let ops = ops_presheaf(rep.as_ref(), bound)?;
    Ok(category_of_elements(&ops.ps).element.iter().map(|&(c, k)| rep.grade(c, &ops.ops[c][k])).collect())
}

/// Edge and vertex components of the replacement's fiber over the composite operation
/// `(2, (1, 3))`: an outer path of length 2 whose edges are labelled by paths of lengths 1 and 3.
fn fiber_components() -> Result<(usize, usize), Box<dyn Error>> {
    let (outer, inner): (Polynomial, Polynomial) = (gamma(free().as_ref(), 2)?, gamma(free().as_ref(), 3)?);
    let comp = compose_with_data(&outer, &inner)?;
    let (g2, g3) = (grades(2)?, grades(3)?);
    let edge_op2 = (0..outer.opf.base.n_objects()).find(|&b| outer.p3.obj[b] == 1 && g2[b] == 2).ok_or("no length-2 path")?;
    let ys: Vec<usize> = (0..comp.dp.y.n_objects())
        .filter(|&y| comp.dp.v.obj[y] == edge_op2)
        .filter(|&y| comp.labels(&outer, y, 1).iter().map(|&o| g3[o]).collect::<Vec<_>>() == vec![1, 3])
        .collect();
    let [y] = ys[..] else {
        return Err(format!("{} composite operations over (2,(1,3))", ys.len()).into());
    };
    let (rp, _) = familial_replacement(&comp.poly)?;
    let over = |c: usize| (0..rp.opf.fibers[y].n_objects()).filter(|&e| rp.p1.obj[rp.opf.object(y, e)] == c).count();
    Ok((over(1), over(0)))
}

fn c10_polynomials() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..10 {
        let x = random::graph_with(&mut random::rng(10_000 + seed), 4, 6);
        for (name, rep, bound) in [("free", free(), 2), ("identity", identity_rep(&g1()), 0)] {
            let r = check_gamma_evaluation(rep.as_ref(), bound, &x)?;
            if !r.passed() {
                bad.push(format!("{name} on graph {seed}: {}", first_failure(&r)));
            }
        }
    }
    let g = gamma(free().as_ref(), 2)?;
    let gg = compose_with_data(&g, &g)?.poly;
    let (rp, _) = familial_replacement(&gg)?;
    let target = gamma(compose(free(), free(), 2)?.as_ref(), 2)?;
    let iso = find_polynomial_iso(&rp, &target).is_some();
    let (edges, vertices) = fiber_components()?;
    let ok = bad.is_empty() && iso && edges == 4;
    Ok((ok, format!("pd vs evaluate on 10 graphs: failures {bad:?}; replacement iso to gamma(compose): {iso}; fiber over (2,(1,3)): {edges} edge and {vertices} vertex components")))
}

fn c11_negative_suite() -> Outcome {
    let broken = common::fixture("broken.json");
    let cases: Vec<(&str, &str, Vec<&str>)> = vec![
        ("broken associativity", "associativity", vec!["check-monad", "broken-free-category", "--bound", "3"]),
        ("non-cartesian transformation", "not hit", vec!["check-cartesian", "word-doubling", "--bound", "2"]),
        ("non-unique factorization", "factors twice", vec!["check-monad", "doubled-factorization", "--bound", "2"]),
        ("broken crossed-group action", "crossed_group_axioms", vec!["check-monad", "broken-reversal", "--bound", "2"]),
        ("table: broken associativity", "associativity", vec!["-w", &broken, "check-monad", "broken-paths", "--bound", "2"]),
        ("table: non-unique factorization", "factors twice", vec!["-w", &broken, "check-monad", "idempotent", "--bound", "2"]),
        ("table: broken crossed-group action", "crossed_group_axioms", vec!["-w", &broken, "check-monad", "collapse", "--bound", "2"]),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, kind, args) in &cases {
        let run = common::famkit(args, None);
        let failures: Vec<(String, String)> = serde_json::from_str::<serde_json::Value>(&run.stdout)
            .ok()
            .and_then(|v| v["failures"].as_array().cloned())
            .unwrap_or_default()
            .iter()
            .filter_map(|f| Some((f["location"].as_str()?.to_string(), f["witness"].as_str()?.to_string())))
            .collect();
        let hit = failures.iter().find(|(l, w)| !w.is_empty() && (l.contains(kind) || w.contains(kind)));
        ok &= run.code == 1 && hit.is_some();
        let shown = hit.map(|(l, w)| format!("{l}: {w}")).unwrap_or_else(|| format!("no {kind} witness {}", run.stderr.trim()));
        lines.push(format!("\n    {name}: exit {}, {} failures, {shown}", run.code, failures.len()));
    }
    Ok((ok, format!("{} fixtures{}", cases.len(), lines.concat())))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("free category monad", c1_free_category),
        ("monad laws on random graphs", c2_monad_laws),
        ("cartesian unit and multiplication", c3_cartesian),
        ("co-Yoneda", c4_coyoneda),
        ("Reedy monad on the 2-truncated simplex category", c5_reedy),
        ("cubical monad", c6_cubical),
        ("theory of the free category monad", c7_theory),
        ("nerve and models", c8_nerve),
        ("crossed groups", c9_crossed),
        ("polynomial round trip", c10_polynomials),
        ("negative suite", c11_negative_suite),
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let start = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        let tag = match (ok, KNOWN_FAILURES.contains(&n)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {n:>2} {title} ({:.1}s): {detail}", start.elapsed().as_secs_f64());
        if ok {
            passed += 1;
        } else if !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
