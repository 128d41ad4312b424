#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

pub fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

/// Run the binary with `FAMKIT_DEFAULT_BOUND` cleared unless given in `env`.
pub fn famkit_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_famkit"));
    cmd.args(args).env_remove("FAMKIT_DEFAULT_BOUND");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(if stdin.is_some() { Stdio::piped() } else { Stdio::null() }).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn famkit");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn famkit(args: &[&str], stdin: Option<&str>) -> Run {
    famkit_env(args, stdin, &[])
}

/// First failure witness of a report, if any.
pub fn first_witness(report: &Value) -> Option<(String, String)> {
    let f = report["failures"].as_array()?.first()?;
    Some((f["location"].as_str()?.to_string(), f["witness"].as_str()?.to_string()))
}

pub mod random {
    use std::sync::Arc;

    use famkit::fincat::FinCategory;
    use famkit::presheaf::{coproduct, graph, hom_set, quotient};
    use famkit::{Presheaf, PresheafMorphism};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// A graph with 1..=max_v vertices and 0..=max_e edges, loops and parallel edges allowed.
    pub fn graph_with(rng: &mut ChaCha8Rng, max_v: usize, max_e: usize) -> Presheaf {
        let v = rng.gen_range(1..=max_v);
        let e = rng.gen_range(0..=max_e);
        let edges: Vec<(usize, usize)> = (0..e).map(|_| (rng.gen_range(0..v), rng.gen_range(0..v))).collect();
        graph(v, &edges)
    }

    /// A random quotient of a coproduct of representables, with at most `max_cells` cells.
    pub fn presheaf(rng: &mut ChaCha8Rng, base: &Arc<FinCategory>, max_cells: usize) -> Presheaf {
        let mut parts = Vec::new();
        let mut total = 0;
        loop {
            let y = Presheaf::representable(base, rng.gen_range(0..base.n_objects()));
            if total + y.n_cells() > max_cells {
                break;
            }
            total += y.n_cells();
            parts.push(y);
            if rng.gen_bool(0.3) {
                break;
            }
        }
        let sum = coproduct(&parts, base).expect("same base").apex;
        let mut pairs = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let c = rng.gen_range(0..base.n_objects());
            if sum.sizes[c] >= 2 {
                pairs.push((c, rng.gen_range(0..sum.sizes[c]), rng.gen_range(0..sum.sizes[c])));
            }
        }
        quotient(&sum, &pairs).0
    }

    /// A graph morphism between small random graphs; retries until the hom-set is nonempty.
    pub fn graph_morphism(rng: &mut ChaCha8Rng) -> (Presheaf, Presheaf, PresheafMorphism) {
        loop {
            let x = graph_with(rng, 3, 3);
            let y = graph_with(rng, 3, 4);
            if let Some(h) = hom_set(&x, &y).expect("same base").choose(rng) {
                return (x, y, h.clone());
            }
        }
    }
}
