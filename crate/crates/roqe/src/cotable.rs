//! Co-occurrence and co-table graphs computed directly from the provenance
//! DAG, without materializing the DNF.
//!
//! A single bottom-up pass maintains per-node variable sets as fixed-size
//! bit vectors. At every binary `·`-node, each variable pair across the two
//! operand sets co-occurs in some prime implicant; in co-table mode the pair
//! is kept only when the two relations are adjacent in the table-adjacency
//! graph. Per-node sets are freed once all predecessors are processed.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::expr::{Idnf, VariableId};
use crate::pdb::Instance;
use crate::provenance::{NodeLabel, ProvenanceDag};
use crate::query::TableAdjacencyGraph;

/// Above this variable count the triangular-bit-table deduplication falls
/// back to a hash set to bound memory at O(m) instead of O(n^2).
pub const DENSE_DEDUP_LIMIT: usize = 4096;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoMode {
    CoTable,
    CoOccurrence,
}

/// Simple undirected graph on tuple variables. k-partite: no edge joins two
/// tuples of the same relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoGraph {
    pub mode: CoMode,
    /// Adjacency lists; isolated vertices present with empty neighbor sets.
    pub adj: BTreeMap<VariableId, BTreeSet<VariableId>>,
}

impl CoGraph {
    pub fn new(mode: CoMode, vertices: impl IntoIterator<Item = VariableId>) -> CoGraph {
        CoGraph {
            mode,
            adj: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    pub fn add_edge(&mut self, x: VariableId, y: VariableId) {
        debug_assert_ne!(x, y);
        self.adj.get_mut(&x).expect("vertex").insert(y);
        self.adj.get_mut(&y).expect("vertex").insert(x);
    }

    pub fn vertices(&self) -> impl Iterator<Item = VariableId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Edge count (m_C or m_co depending on mode).
    pub fn m(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn has_edge(&self, x: VariableId, y: VariableId) -> bool {
        self.adj.get(&x).map(|s| s.contains(&y)).unwrap_or(false)
    }

    /// Sorted unordered pairs (min, max).
    pub fn edges(&self) -> BTreeSet<(VariableId, VariableId)> {
        let mut out = BTreeSet::new();
        for (&x, nbrs) in &self.adj {
            for &y in nbrs {
                if x < y {
                    out.insert((x, y));
                }
            }
        }
        out
    }

    pub fn degree(&self, x: VariableId) -> usize {
        self.adj.get(&x).map(|s| s.len()).unwrap_or(0)
    }

    /// Connected components of the subgraph induced by `within`, each as a
    /// sorted vertex set, ordered by minimum vertex.
    pub fn components_within(&self, within: &BTreeSet<VariableId>) -> Vec<BTreeSet<VariableId>> {
        let mut seen: BTreeSet<VariableId> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in within {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(u) = stack.pop() {
                comp.insert(u);
                if let Some(nbrs) = self.adj.get(&u) {
                    for &v in nbrs {
                        if within.contains(&v) && seen.insert(v) {
                            stack.push(v);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<BTreeSet<VariableId>> {
        let all: BTreeSet<VariableId> = self.vertices().collect();
        self.components_within(&all)
    }
}

/// Pair-level deduplication: dense triangular bit table for small variable
/// spaces, hash set beyond [`DENSE_DEDUP_LIMIT`].
enum PairSet {
    Dense { bits: Vec<u64>, n: usize },
    Sparse(HashSet<(u32, u32)>),
}

impl PairSet {
    fn new(n: usize) -> PairSet {
        if n <= DENSE_DEDUP_LIMIT {
            PairSet::Dense {
                bits: vec![0u64; (n * n).div_ceil(64).max(1)],
                n,
            }
        } else {
            PairSet::Sparse(HashSet::new())
        }
    }

    /// Returns true if the pair was newly inserted.
    fn insert(&mut self, x: u32, y: u32) -> bool {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        match self {
            PairSet::Dense { bits, n } => {
                let idx = lo as usize * *n + hi as usize;
                let fresh = bits[idx / 64] >> (idx % 64) & 1 == 0;
                bits[idx / 64] |= 1 << (idx % 64);
                fresh
            }
            PairSet::Sparse(set) => set.insert((lo, hi)),
        }
    }
}

fn iter_bits(words: &[u64], mut f: impl FnMut(u32)) {
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros();
            f((w * 64) as u32 + b);
            bits &= bits - 1;
        }
    }
}

/// Compute the co-table graph (or, skipping the adjacency check, the
/// co-occurrence graph) of the DAG's expression in one bottom-up pass.
/// Node ids are already a topological order with ties fixed, so the result
/// and the instrumentation trace are reproducible.
pub fn comp_cotable(
    dag: &ProvenanceDag,
    gt: &TableAdjacencyGraph,
    inst: &Instance,
    mode: CoMode,
) -> CoGraph {
    comp_cotable_counting(dag, gt, inst, mode).0
}

/// As [`comp_cotable`], additionally counting how many times each unordered
/// variable pair is examined across the pass (bounded by the DAG width).
pub fn comp_cotable_counting(
    dag: &ProvenanceDag,
    gt: &TableAdjacencyGraph,
    inst: &Instance,
    mode: CoMode,
) -> (CoGraph, HashMap<(VariableId, VariableId), usize>) {
    let n = inst.var_space();
    let words = n.div_ceil(64).max(1);

    // relation index per variable and a relation adjacency matrix for the
    // O(1) co-table check
    let mut var_rel = vec![usize::MAX; n];
    let rel_index: BTreeMap<&str, usize> = gt
        .vertices
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_str(), i))
        .collect();
    for rel in &inst.relations {
        if let Some(&ri) = rel_index.get(rel.name.as_str()) {
            for row in &rel.rows {
                var_rel[row.var.index()] = ri;
            }
        }
    }
    let k = gt.vertices.len();
    let mut rel_adj = vec![false; k * k];
    for (a, b) in gt.edges.keys() {
        let (i, j) = (rel_index[a.as_str()], rel_index[b.as_str()]);
        rel_adj[i * k + j] = true;
        rel_adj[j * k + i] = true;
    }

    let mut graph = CoGraph::new(mode, dag.leaves());
    let mut dedup = PairSet::new(n);
    let mut counts: HashMap<(VariableId, VariableId), usize> = HashMap::new();

    // predecessor counts drive the freeing of per-node variable sets
    let mut pending = vec![0usize; dag.nodes.len()];
    for node in &dag.nodes {
        for &s in &node.successors {
            pending[s] += 1;
        }
    }

    let mut var_sets: Vec<Option<Vec<u64>>> = vec![None; dag.nodes.len()];
    for (id, node) in dag.nodes.iter().enumerate() {
        let set = match node.label {
            NodeLabel::Leaf(v) => {
                let mut set = vec![0u64; words];
                set[v.index() / 64] |= 1 << (v.index() % 64);
                set
            }
            NodeLabel::OrNode => {
                let mut set = vec![0u64; words];
                for &s in &node.successors {
                    let child = var_sets[s].as_ref().expect("successor set live");
                    for w in 0..words {
                        set[w] |= child[w];
                    }
                }
                set
            }
            NodeLabel::AndNode => {
                let a = var_sets[node.successors[0]]
                    .as_ref()
                    .expect("successor set live");
                let b = var_sets[node.successors[1]]
                    .as_ref()
                    .expect("successor set live");
                iter_bits(a, |x| {
                    iter_bits(b, |y| {
                        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                        *counts
                            .entry((VariableId(lo), VariableId(hi)))
                            .or_insert(0) += 1;
                        let keep = match mode {
                            CoMode::CoOccurrence => true,
                            CoMode::CoTable => {
                                let (ri, rj) =
                                    (var_rel[x as usize], var_rel[y as usize]);
                                ri != usize::MAX
                                    && rj != usize::MAX
                                    && rel_adj[ri * k + rj]
                            }
                        };
                        if keep && dedup.insert(x, y) {
                            graph.add_edge(VariableId(lo), VariableId(hi));
                        }
                    });
                });
                let mut set = a.clone();
                for w in 0..words {
                    set[w] |= b[w];
                }
                set
            }
        };
        var_sets[id] = Some(set);
        for &s in &node.successors {
            pending[s] -= 1;
            if pending[s] == 0 {
                var_sets[s] = None;
            }
        }
    }
    (graph, counts)
}

/// Definitional co-occurrence graph: edge iff two variables share a prime
/// implicant. Oracle for the DAG pass.
pub fn cooccurrence_from_idnf(idnf: &Idnf) -> CoGraph {
    let vertices: BTreeSet<VariableId> = idnf
        .implicants
        .iter()
        .flat_map(|imp| imp.iter().copied())
        .collect();
    let mut graph = CoGraph::new(CoMode::CoOccurrence, vertices);
    for imp in &idnf.implicants {
        for i in 0..imp.len() {
            for j in i + 1..imp.len() {
                graph.add_edge(imp[i], imp[j]);
            }
        }
    }
    graph
}

/// Naive induced-P4 oracle: scan all 4-vertex subsets for an induced path.
/// A graph is a cograph iff this returns false.
pub fn has_induced_p4(g: &CoGraph) -> bool {
    find_induced_p4(g).is_some()
}

/// Returns an induced 4-vertex path as (end, mid, mid, end), if any.
pub fn find_induced_p4(g: &CoGraph) -> Option<[VariableId; 4]> {
    let vs: Vec<VariableId> = g.vertices().collect();
    let n = vs.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [vs[a], vs[b], vs[c], vs[d]];
                    if let Some(path) = induced_path_on(g, quad) {
                        return Some(path);
                    }
                }
            }
        }
    }
    None
}

/// Check whether four vertices induce a path; returns it in path order.
fn induced_path_on(g: &CoGraph, quad: [VariableId; 4]) -> Option<[VariableId; 4]> {
    let mut deg = [0usize; 4];
    let mut edges = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if g.has_edge(quad[i], quad[j]) {
                deg[i] += 1;
                deg[j] += 1;
                edges += 1;
            }
        }
    }
    // induced P4: 3 edges, degree sequence {1,1,2,2}, connected (which 3
    // edges with this degree sequence on 4 vertices guarantee)
    if edges != 3 || deg.iter().filter(|&&d| d == 1).count() != 2 {
        return None;
    }
    let ends: Vec<usize> = (0..4).filter(|&i| deg[i] == 1).collect();
    let (e0, e3) = (ends[0], ends[1]);
    let mids: Vec<usize> = (0..4).filter(|&i| deg[i] == 2).collect();
    let (m0, m1) = if g.has_edge(quad[e0], quad[mids[0]]) {
        (mids[0], mids[1])
    } else {
        (mids[1], mids[0])
    };
    Some([quad[e0], quad[m0], quad[m1], quad[e3]])
}
