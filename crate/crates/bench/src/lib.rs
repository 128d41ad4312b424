//! Inputs shared by the benchmarks.

use famkit::presheaf::graph;
use famkit::Presheaf;

/// A graph with a loop, a 2-cycle and parallel edges.
pub fn tangled_graph() -> Presheaf {
    graph(4, &[(0, 1), (1, 2), (2, 1), (2, 3), (3, 3), (0, 1)])
}

/// Operations of the free category theory slice: the vertex and the chains `[1]..[n]`.
pub fn chains(n: usize) -> Vec<(usize, famkit::Op)> {
    let mut ops = vec![(0, famkit::Op::nat(0))];
    ops.extend((1..=n).map(|k| (1, famkit::Op::nat(k))));
    ops
}
