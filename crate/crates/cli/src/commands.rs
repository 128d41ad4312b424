use std::path::PathBuf;

use clap::{Parser, Subcommand};
use famkit::famrep::{check_cartesian, check_rep, compose, evaluate, ops_presheaf};
use famkit::monad::{free_algebra, naturality_squares, validate_monad_rep};
use famkit::poly::{
    check_distributivity, check_gamma_evaluation, check_replacement, compose_with_data, competitors, familial_replacement,
    find_polynomial_iso, strict_pullback,
};
use famkit::presheaf::hom_set;
use famkit::theory::{adjoin_cell, check_theory};
use famkit::zoo::{category_algebra, check_crossed_group_axioms, cubical_nerve_algebra, word_doubling_samples};
use famkit::{check_model, gamma, nerve, theory_category, FamRep, MonadRep, Op, Presheaf, Report};
use serde_json::{json, Value};

use crate::doc::{Builtin, CategoryDoc, CrossedGroupDoc, FactorizationDoc, PresheafDoc, TableCategoryDoc, TableCrossedGroupDoc, TableFactorizationDoc, TablePresheafDoc, WorkspaceDoc};
use crate::workspace::{default_ops, parse_op, show_op, MonadSource, Workspace};

#[derive(Debug, Parser)]
#[command(name = "famkit", version, about = "Check familial representations and monads on presheaf categories")]
pub struct Cli {
    /// Workspace document (JSON); `-` reads standard input. Without this flag,
    /// standard input is read when it is not a terminal.
    #[arg(short, long, global = true)]
    pub workspace: Option<PathBuf>,
    /// Write the output document here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a monad: representation axioms, witnesses, unit, multiplication and laws.
    CheckMonad {
        /// Monad name; may be omitted when the workspace defines exactly one.
        name: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Evaluate a representation on a presheaf.
    Eval {
        rep: String,
        presheaf: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Compose two representations and check the composite.
    Compose {
        outer: String,
        inner: String,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Build a slice of the theory category and check it is a category.
    Theory {
        monad: String,
        /// Operations `object:op`; defaults to one per arity shape within the bound.
        #[arg(long, num_args = 1..)]
        ops: Vec<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Emit the workspace extended by the nerve of an algebra (`free:<presheaf>` or `category:<category>`).
    Nerve {
        monad: String,
        algebra: String,
        #[arg(long, num_args = 1..)]
        ops: Vec<String>,
        #[arg(long)]
        bound: Option<usize>,
        /// Adjoin one cell at the top object of the slice.
        #[arg(long)]
        pad: bool,
    },
    /// Check the limit condition of a presheaf on a theory category.
    CheckModel { presheaf: String },
    /// Check `γ` of one representation, or the composite of two.
    PolyCheck {
        rep: String,
        other: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Pullback test of naturality squares: `word-doubling`, or a monad's `η` and `μ`
    /// along every map `--from X --to Y`.
    CheckCartesian {
        fixture: String,
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Emit the workspace extended by a shipped example.
    Zoo { constructor: String, params: Vec<String> },
}

pub enum Output {
    Report(Report),
    Document(WorkspaceDoc),
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        match self {
            Output::Report(r) if !r.passed() => 1,
            _ => 0,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Output::Report(r) => serde_json::to_string_pretty(r).expect("reports serialize"),
            Output::Document(d) => crate::doc::dump(d),
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn run(ws: &Workspace, command: &Command) -> Result<Output, String> {
    let bound = |b: &Option<usize>| b.unwrap_or(ws.default_bound);
    match command {
        Command::CheckMonad { name, bound: b } => check_monad(ws, name.as_deref(), bound(b)).map(Output::Report),
        Command::Eval { rep, presheaf, bound: b } => eval(ws, rep, presheaf, bound(b)).map(Output::Report),
        Command::Compose { outer, inner, bound: b } => compose_reps(ws, outer, inner, bound(b)).map(Output::Report),
        Command::Theory { monad, ops, bound: b } => theory(ws, monad, ops, bound(b)).map(Output::Report),
        Command::Nerve { monad, algebra, ops, bound: b, pad } => nerve_doc(ws, monad, algebra, ops, bound(b), *pad).map(Output::Document),
        Command::CheckModel { presheaf } => model(ws, presheaf).map(Output::Report),
        Command::PolyCheck { rep, other, bound: b } => poly_check(ws, rep, other.as_deref(), bound(b)).map(Output::Report),
        Command::CheckCartesian { fixture, from, to, bound: b } => {
            cartesian(ws, fixture, from.as_deref(), to.as_deref(), bound(b)).map(Output::Report)
        }
        Command::Zoo { constructor, params } => zoo(ws, constructor, params).map(Output::Document),
    }
}

fn check_monad(ws: &Workspace, name: Option<&str>, bound: usize) -> Result<Report, String> {
    let name = match name {
        Some(n) => n.to_string(),
        None if ws.doc.monads.len() == 1 => ws.doc.monads.keys().next().cloned().unwrap_or_default(),
        None => return Err("name a monad; the workspace does not define exactly one".into()),
    };
    let mut r = Report::new(format!("check-monad {name}"));
    let m = match ws.monad_source(&name)? {
        MonadSource::Direct(m) => m,
        MonadSource::Factorization(d) => match d.factorizations() {
            Ok(_) => famkit::zoo::factorization_monad(&d).map_err(err)?,
            Err(e) => {
                r.instances_checked += 1;
                r.fail(format!("factorization data {}", d.name), e.to_string());
                return Ok(r);
            }
        },
        MonadSource::Crossed(cg) => {
            let axioms = check_crossed_group_axioms(&cg);
            let ok = axioms.passed();
            r.absorb(axioms);
            if !ok {
                return Ok(r);
            }
            famkit::zoo::crossed_group_monad(&cg).map_err(err)?
        }
    };
    r.absorb(validate_monad_rep(&m, bound));
    Ok(r.with_details(json!({ "monad": m.name, "bound": bound })))
}

fn cell_counts(x: &Presheaf) -> Value {
    let base = &x.base;
    Value::Object((0..base.n_objects()).map(|c| (base.object_name(c).to_string(), json!(x.sizes[c]))).collect())
}

fn eval(ws: &Workspace, rep: &str, presheaf: &str, bound: usize) -> Result<Report, String> {
    let (t, x) = (ws.rep(rep)?, ws.presheaf(presheaf)?);
    let ev = evaluate(t.as_ref(), &x, bound).map_err(err)?;
    let mut r = Report::new(format!("eval {rep} {presheaf}"));
    r.absorb(ev.tx.check());
    Ok(r.with_details(json!({ "bound": bound, "cells": cell_counts(&ev.tx), "exact": ev.exact })))
}

fn compose_reps(ws: &Workspace, outer: &str, inner: &str, bound: usize) -> Result<Report, String> {
    let c = compose(ws.rep(outer)?, ws.rep(inner)?, bound).map_err(err)?;
    let mut r = Report::new(format!("compose {outer} {inner}"));
    r.absorb(check_rep(c.as_ref(), bound));
    let ops = ops_presheaf(c.as_ref(), bound).map_err(err)?;
    Ok(r.with_details(json!({ "bound": bound, "operations": cell_counts(&ops.ps) })))
}

fn chosen_ops(m: &MonadRep, ops: &[String], bound: usize) -> Result<Vec<(usize, Op)>, String> {
    if ops.is_empty() {
        default_ops(m, bound)
    } else {
        ops.iter().map(|s| parse_op(m, s)).collect()
    }
}

fn theory(ws: &Workspace, monad: &str, ops: &[String], bound: usize) -> Result<Report, String> {
    let m = ws.monad(monad)?;
    let ops = chosen_ops(&m, ops, bound)?;
    let slice = theory_category(&m, &ops, bound).map_err(err)?;
    let mut r = Report::new(format!("theory {monad}"));
    r.absorb(check_theory(&slice));
    let k = ops.len();
    let homs: Vec<Vec<usize>> = (0..k).map(|a| (0..k).map(|b| slice.cat.hom(a, b).len()).collect()).collect();
    let objects: Vec<String> = ops.iter().map(|o| show_op(&m, o)).collect();
    Ok(r.with_details(json!({ "bound": bound, "objects": objects, "homs": homs })))
}

fn algebra(ws: &Workspace, m: &MonadRep, source: &str, bound: usize) -> Result<famkit::Algebra, String> {
    match source.split_once(':') {
        Some(("free", x)) => free_algebra(m, &ws.presheaf(x)?, bound).map_err(err),
        Some(("category", c)) => {
            let cat = ws.category(c)?;
            if m.name.starts_with("cubical") {
                cubical_nerve_algebra(m, &cat, bound).map_err(err)
            } else {
                category_algebra(m, &cat, bound).map_err(err)
            }
        }
        _ => Err(format!("algebra `{source}` is neither free:<presheaf> nor category:<category>")),
    }
}

fn nerve_doc(ws: &Workspace, monad: &str, source: &str, ops: &[String], bound: usize, pad: bool) -> Result<WorkspaceDoc, String> {
    let m = ws.monad(monad)?;
    let ops = chosen_ops(&m, ops, bound)?;
    let slice = theory_category(&m, &ops, bound).map_err(err)?;
    let a = algebra(ws, &m, source, bound)?;
    let mut x = nerve(&m, &a, &slice).map_err(err)?;
    if pad {
        let top = (0..ops.len()).max_by_key(|&o| slice.arities[o].n_cells()).ok_or("the slice is empty")?;
        x = adjoin_cell(&x, top, 0).map_err(err)?;
    }
    let mut doc = ws.doc.clone();
    let theory = Builtin::new("theory")
        .with("monad", monad)
        .with("bound", bound)
        .with("ops", ops.iter().map(|o| show_op(&m, o)).collect::<Vec<_>>());
    doc.categories.insert("theory".into(), CategoryDoc::Builtin(theory));
    let name = if pad { "padded-nerve" } else { "nerve" };
    doc.presheaves.insert(name.into(), PresheafDoc::Table(TablePresheafDoc::of("theory", &x)));
    Ok(doc)
}

fn model(ws: &Workspace, presheaf: &str) -> Result<Report, String> {
    let cat = ws.presheaf_category(presheaf).ok_or_else(|| format!("presheaf {presheaf} is not defined on a workspace category"))?;
    let slice = ws.slice(&cat)?;
    let x = ws.presheaf(presheaf)?;
    let mut r = Report::new(format!("check-model {presheaf}"));
    r.absorb(check_model(&slice, &x).map_err(err)?);
    Ok(r)
}

/// Workspace presheaves on `base`, then its representables.
fn test_presheaves(ws: &Workspace, rep: &FamRep) -> Result<Vec<(String, Presheaf)>, String> {
    let base = rep.source_base();
    let mut out = Vec::new();
    for name in ws.doc.presheaves.keys() {
        let x = ws.presheaf(name)?;
        if *x.base == **base {
            out.push((name.clone(), Presheaf { base: base.clone(), ..x }));
        }
    }
    for c in 0..base.n_objects() {
        out.push((format!("y({})", base.object_name(c)), Presheaf::representable(base, c)));
    }
    Ok(out)
}

fn poly_check(ws: &Workspace, rep: &str, other: Option<&str>, bound: usize) -> Result<Report, String> {
    let t = ws.rep(rep)?;
    let p = gamma(t.as_ref(), bound).map_err(err)?;
    let Some(other) = other else {
        let mut r = Report::new(format!("poly-check {rep}"));
        r.absorb(p.check());
        for (name, x) in test_presheaves(ws, &t)? {
            let mut e = check_gamma_evaluation(t.as_ref(), bound, &x).map_err(err)?;
            e.check = format!("evaluation on {name}");
            r.absorb(e);
        }
        let details = json!({
            "bound": bound,
            "base_objects": p.opf.base.n_objects(),
            "total_objects": p.opf.total.n_objects(),
            "very_fibrous": p.very_fibrous,
            "familial": p.familial,
        });
        return Ok(r.with_details(details));
    };
    let s = ws.rep(other)?;
    let q = gamma(s.as_ref(), bound).map_err(err)?;
    let mut r = Report::new(format!("poly-check {rep} {other}"));
    let comp = compose_with_data(&p, &q).map_err(err)?;
    r.absorb(comp.poly.check());
    let u = strict_pullback(&p.p1, &q.p3).map_err(err)?.1;
    let exhaustive = u.source.n_objects() <= 50;
    if exhaustive {
        let comps = competitors(&comp.dp, &p.opf).map_err(err)?;
        r.absorb(check_distributivity(&u, &p.opf, &comp.dp, &comps).map_err(err)?);
    }
    let (rp, pi) = familial_replacement(&comp.poly).map_err(err)?;
    r.absorb(rp.check());
    for (name, x) in test_presheaves(ws, &s)? {
        let mut e = check_replacement(&comp.poly, &rp, &pi, &x).map_err(err)?;
        e.check = format!("replacement on {name}");
        r.absorb(e);
    }
    let direct = gamma(compose(t.clone(), s.clone(), bound).map_err(err)?.as_ref(), bound).map_err(err)?;
    r.check(
        find_polynomial_iso(&rp, &direct).is_some(),
        || "familial replacement".into(),
        || "not isomorphic to γ of the composite representation".into(),
    );
    let details = json!({
        "bound": bound,
        "base_objects": comp.poly.opf.base.n_objects(),
        "total_objects": comp.poly.opf.total.n_objects(),
        "replacement_total_objects": rp.opf.total.n_objects(),
        "distributivity_checked": exhaustive,
    });
    Ok(r.with_details(details))
}

fn cartesian(ws: &Workspace, fixture: &str, from: Option<&str>, to: Option<&str>, bound: usize) -> Result<Report, String> {
    let mut r = Report::new(format!("check-cartesian {fixture}"));
    if fixture == "word-doubling" {
        r.absorb(check_cartesian(&word_doubling_samples(bound).map_err(err)?));
        return Ok(r);
    }
    let m = ws.monad(fixture)?;
    let (Some(from), Some(to)) = (from, to) else {
        return Err("a monad needs --from and --to presheaves".into());
    };
    let (x, y) = (ws.presheaf(from)?, ws.presheaf(to)?);
    let mut samples = Vec::new();
    for h in hom_set(&x, &y).map_err(err)? {
        samples.extend(naturality_squares(&m, &x, &y, &h, bound).map_err(err)?);
    }
    r.absorb(check_cartesian(&samples));
    Ok(r)
}

fn zoo(ws: &Workspace, constructor: &str, params: &[String]) -> Result<WorkspaceDoc, String> {
    let num = |k: usize, default: usize| -> Result<usize, String> {
        params.get(k).map_or(Ok(default), |s| s.parse().map_err(|_| format!("parameter `{s}` is not a number")))
    };
    let mut doc = ws.doc.clone();
    match constructor {
        "free-category" | "broken-free-category" | "free-monoid" => {
            doc.monads.insert(constructor.into(), Builtin::new(constructor));
        }
        "cubical" => {
            let b = Builtin::new("cubical").with("n_max", num(0, 2)?).with("grid_bound", num(1, 3)?);
            doc.monads.insert("cubical".into(), b);
        }
        "identity" => {
            let cat = params.first().ok_or("identity needs a category")?;
            ws.category(cat)?;
            doc.monads.insert(format!("identity-{cat}"), Builtin::new("identity").with("category", cat.as_str()));
        }
        "reedy-simplex" | "reflexive-graph" | "doubled-factorization" => {
            let name = if constructor == "reedy-simplex" { format!("reedy-simplex{}", num(0, 2)?) } else { constructor.into() };
            let d = ws.factorization(&name)?;
            let cat = format!("{name}.total");
            doc.categories.insert(cat.clone(), CategoryDoc::Table(TableCategoryDoc::of(&d.total)));
            doc.factorizations.insert(name.clone(), FactorizationDoc::Table(TableFactorizationDoc::of(&cat, &d)));
            doc.monads.insert(name.clone(), Builtin::new("factorization").with("data", name.as_str()));
        }
        "reversal" | "cyclic" | "symmetric" | "symmetric-degenerate" | "broken-reversal" => {
            let name = if constructor == "broken-reversal" { constructor.into() } else { format!("{constructor}{}", num(0, 2)?) };
            let cg = ws.crossed_group(&name)?;
            let cat = format!("{name}.base");
            doc.categories.insert(cat.clone(), CategoryDoc::Table(TableCategoryDoc::of(&cg.base)));
            doc.crossed_groups.insert(name.clone(), CrossedGroupDoc::Table(TableCrossedGroupDoc::of(&cat, &cg)));
            doc.monads.insert(name.clone(), Builtin::new("crossed").with("group", name.as_str()));
        }
        other => return Err(format!("unknown constructor `{other}`")),
    }
    Ok(doc)
}
