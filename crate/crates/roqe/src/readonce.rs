//! Read-once decision by alternating row and table decomposition.
//!
//! Row decomposition splits the tuples along connected components of the
//! co-table graph, contributing a Sum. Table decomposition splits the
//! relations along table-adjacency components after discarding edges whose
//! tuple pairs are all co-table edges, contributing a Product; shared query
//! variables crossing such discarded edges are renamed to fresh per-relation
//! variables. The expression is read-once iff the recursion bottoms out at
//! single relations everywhere.

use std::collections::{BTreeMap, BTreeSet};

use crate::cotable::CoGraph;
use crate::expr::{canonicalize, ReadOnceTree, VariableId};
use crate::pdb::Instance;
use crate::query::{Query, Subgoal, TableAdjacencyGraph, Term};

/// One node of the decomposition recursion: the current (possibly
/// variable-renamed) query, the surviving tuples per relation, the inherited
/// table-adjacency edges, and which decomposition to try first.
#[derive(Clone, Debug)]
pub struct DecompositionContext {
    pub query: Query,
    /// Relation name -> surviving tuple variables (induced co-table
    /// subgraph = the shared graph filtered to these sets).
    pub tuples: BTreeMap<String, BTreeSet<VariableId>>,
    /// Table-adjacency edges among this context's relations, as (min, max)
    /// name pairs. Inherited as an induced subgraph, so each context's
    /// relation graph stays connected.
    pub gt_edges: BTreeSet<(String, String)>,
    pub flag_row: bool,
    pub depth: usize,
}

impl DecompositionContext {
    pub fn all_tuples(&self) -> BTreeSet<VariableId> {
        self.tuples.values().flatten().copied().collect()
    }

    pub fn k(&self) -> usize {
        self.query.subgoals.len()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct RoStats {
    /// Maximum recursion depth reached (root context = 1).
    pub depth: usize,
    pub row_decomps: usize,
    pub table_decomps: usize,
}

#[derive(Clone, PartialEq, Debug)]
pub enum RoOutcome {
    Success(ReadOnceTree),
    NotReadOnce,
    EmptyResult,
}

#[derive(Clone, PartialEq, Debug)]
pub struct RoResult {
    pub outcome: RoOutcome,
    pub stats: RoStats,
}

/// Split the context along connected components of the induced co-table
/// subgraph; fails (None) when it is connected.
pub fn row_decomp(ctx: &DecompositionContext, gc: &CoGraph) -> Option<Vec<DecompositionContext>> {
    let all = ctx.all_tuples();
    let comps = gc.components_within(&all);
    if comps.len() <= 1 {
        return None;
    }
    Some(
        comps
            .into_iter()
            .map(|comp| DecompositionContext {
                query: ctx.query.clone(),
                tuples: ctx
                    .tuples
                    .iter()
                    .map(|(r, ts)| (r.clone(), ts & &comp))
                    .collect(),
                gt_edges: ctx.gt_edges.clone(),
                flag_row: false,
                depth: ctx.depth + 1,
            })
            .collect(),
    )
}

fn norm_edge(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn relation_components(rels: &[String], edges: &BTreeSet<(String, String)>) -> Vec<BTreeSet<String>> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for start in rels {
        if seen.contains(start.as_str()) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![start.clone()];
        seen.insert(start);
        while let Some(u) = stack.pop() {
            comp.insert(u.clone());
            for v in rels {
                if !seen.contains(v.as_str())
                    && edges.contains(&norm_edge(&u, v))
                {
                    seen.insert(v);
                    stack.push(v.clone());
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Shared FO variables of two subgoals (the edge annotation C_e), from the
/// current, possibly renamed, terms.
fn shared_vars(a: &Subgoal, b: &Subgoal) -> BTreeSet<String> {
    let av: BTreeSet<&str> = a.fo_vars().into_iter().collect();
    b.fo_vars()
        .into_iter()
        .filter(|v| av.contains(v))
        .map(|v| v.to_string())
        .collect()
}

/// Discard each table-adjacency edge whose relations join completely (every
/// cross tuple pair is a co-table edge), split the relations along the
/// remaining edges, and rename shared variables crossing discarded edges to
/// fresh per-relation names `<var>#<relation-index>#<generation>`. Fails
/// (None) when the relations stay in one component.
pub fn table_decomp(
    ctx: &DecompositionContext,
    gc: &CoGraph,
    generation: usize,
) -> Option<Vec<DecompositionContext>> {
    let k = ctx.k();
    if k < 2 {
        return None;
    }
    let rels: Vec<String> = ctx.query.subgoals.iter().map(|s| s.relation.clone()).collect();
    // edge (Ri,Rj) is complete iff the cross edge count equals |Ti'|*|Tj'|
    let mut complete = BTreeSet::new();
    let mut incomplete = BTreeSet::new();
    for (a, b) in &ctx.gt_edges {
        let ta = &ctx.tuples[a];
        let tb = &ctx.tuples[b];
        let mut cross = 0usize;
        for &x in ta {
            if let Some(nbrs) = gc.adj.get(&x) {
                cross += nbrs.iter().filter(|y| tb.contains(y)).count();
            }
        }
        if cross == ta.len() * tb.len() {
            complete.insert((a.clone(), b.clone()));
        } else {
            incomplete.insert((a.clone(), b.clone()));
        }
    }
    let comps = relation_components(&rels, &incomplete);
    if comps.len() <= 1 {
        return None;
    }
    let comp_of: BTreeMap<&str, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |r| (r.as_str(), i)))
        .collect();
    // variables to rename, per subgoal position: those shared across a
    // complete edge between different components
    let mut rename: Vec<BTreeSet<String>> = vec![BTreeSet::new(); k];
    for (a, b) in &complete {
        if comp_of[a.as_str()] == comp_of[b.as_str()] {
            continue;
        }
        let ia = rels.iter().position(|r| r == a).expect("relation present");
        let ib = rels.iter().position(|r| r == b).expect("relation present");
        let ce = shared_vars(&ctx.query.subgoals[ia], &ctx.query.subgoals[ib]);
        rename[ia].extend(ce.iter().cloned());
        rename[ib].extend(ce);
    }
    Some(
        comps
            .iter()
            .map(|comp| {
                let subgoals: Vec<Subgoal> = ctx
                    .query
                    .subgoals
                    .iter()
                    .enumerate()
                    .filter(|(_, sg)| comp.contains(&sg.relation))
                    .map(|(i, sg)| Subgoal {
                        relation: sg.relation.clone(),
                        terms: sg
                            .terms
                            .iter()
                            .map(|t| match t {
                                Term::FoVariable(v) if rename[i].contains(v) => {
                                    Term::FoVariable(format!("{}#{}#{}", v, i, generation))
                                }
                                other => other.clone(),
                            })
                            .collect(),
                    })
                    .collect();
                DecompositionContext {
                    query: Query { subgoals },
                    tuples: ctx
                        .tuples
                        .iter()
                        .filter(|(r, _)| comp.contains(*r))
                        .map(|(r, ts)| (r.clone(), ts.clone()))
                        .collect(),
                    gt_edges: ctx
                        .gt_edges
                        .iter()
                        .filter(|(a, b)| comp.contains(a) && comp.contains(b))
                        .cloned()
                        .collect(),
                    flag_row: true,
                    depth: ctx.depth + 1,
                }
            })
            .collect(),
    )
}

fn go(
    ctx: DecompositionContext,
    gc: &CoGraph,
    stats: &mut RoStats,
    generation: &mut usize,
) -> Option<ReadOnceTree> {
    stats.depth = stats.depth.max(ctx.depth);
    if ctx.k() == 1 {
        let ts = ctx.tuples.values().next().expect("one relation");
        debug_assert!(!ts.is_empty(), "contexts keep every relation inhabited");
        let mut leaves: Vec<ReadOnceTree> =
            ts.iter().map(|&v| ReadOnceTree::Leaf(v)).collect();
        return Some(if leaves.len() == 1 {
            leaves.pop().unwrap()
        } else {
            ReadOnceTree::Sum(leaves)
        });
    }
    // the two decompositions are mutually exclusive on every context
    debug_assert!(
        !(row_decomp(&ctx, gc).is_some() && table_decomp(&ctx, gc, 0).is_some()),
        "row and table decomposition both apply"
    );
    let attempts: [bool; 2] = if ctx.flag_row {
        [true, false]
    } else {
        [false, true]
    };
    for try_row in attempts {
        if try_row {
            if let Some(children) = row_decomp(&ctx, gc) {
                stats.row_decomps += 1;
                let mut parts = Vec::with_capacity(children.len());
                for ch in children {
                    parts.push(go(ch, gc, stats, generation)?);
                }
                return Some(ReadOnceTree::Sum(parts));
            }
        } else if let Some(children) = table_decomp(&ctx, gc, *generation + 1) {
            *generation += 1;
            stats.table_decomps += 1;
            let mut parts = Vec::with_capacity(children.len());
            for ch in children {
                parts.push(go(ch, gc, stats, generation)?);
            }
            return Some(ReadOnceTree::Product(parts));
        }
    }
    None
}

/// Decide read-once-ness and build the canonical form.
///
/// `gc` must be the co-table graph for (query, inst); tuples not appearing
/// in `gc` are ignored. When the table-adjacency graph is disconnected the
/// components are solved independently and multiplied.
pub fn comp_ro(
    q: &Query,
    inst: &Instance,
    gc: &CoGraph,
    gt: &TableAdjacencyGraph,
) -> RoResult {
    let mut stats = RoStats::default();
    let live: BTreeSet<VariableId> = gc.vertices().collect();
    let mut tuples_all: BTreeMap<String, BTreeSet<VariableId>> = BTreeMap::new();
    for sg in &q.subgoals {
        let ts: BTreeSet<VariableId> = inst
            .relation(&sg.relation)
            .map(|rel| {
                rel.rows
                    .iter()
                    .map(|t| t.var)
                    .filter(|v| live.contains(v))
                    .collect()
            })
            .unwrap_or_default();
        tuples_all.insert(sg.relation.clone(), ts);
    }
    if tuples_all.values().any(|ts| ts.is_empty()) {
        return RoResult {
            outcome: RoOutcome::EmptyResult,
            stats,
        };
    }
    let mut generation = 0usize;
    let mut parts = Vec::new();
    for group in gt.components() {
        let group_set: BTreeSet<&str> = group.iter().map(|s| s.as_str()).collect();
        let subgoals: Vec<Subgoal> = q
            .subgoals
            .iter()
            .filter(|sg| group_set.contains(sg.relation.as_str()))
            .cloned()
            .collect();
        let tuples: BTreeMap<String, BTreeSet<VariableId>> = tuples_all
            .iter()
            .filter(|(r, _)| group_set.contains(r.as_str()))
            .map(|(r, ts)| (r.clone(), ts.clone()))
            .collect();
        let gt_edges: BTreeSet<(String, String)> = gt
            .edges
            .keys()
            .filter(|(a, b)| group_set.contains(a.as_str()) && group_set.contains(b.as_str()))
            .cloned()
            .collect();
        let all: BTreeSet<VariableId> = tuples.values().flatten().copied().collect();
        let flag_row = gc.components_within(&all).len() >= 2;
        let ctx = DecompositionContext {
            query: Query { subgoals },
            tuples,
            gt_edges,
            flag_row,
            depth: 1,
        };
        match go(ctx, gc, &mut stats, &mut generation) {
            Some(tree) => parts.push(tree),
            None => {
                return RoResult {
                    outcome: RoOutcome::NotReadOnce,
                    stats,
                }
            }
        }
    }
    let tree = if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        ReadOnceTree::Product(parts)
    };
    let tree = canonicalize(&tree);
    debug_assert!(tree.check_invariants().is_ok());
    RoResult {
        outcome: RoOutcome::Success(tree),
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cotable::{comp_cotable, CoMode};
    use crate::expr::{
        equivalent_on_all_assignments, expand_to_idnf, DEFAULT_IMPLICANT_CAP,
    };
    use crate::gen::{generate, GenSpec};
    use crate::provenance::{default_plan, eval_plan, read_expression};
    use crate::query::{parse_query, table_adjacency};

    fn example1_setup() -> (Instance, Query, CoGraph, TableAdjacencyGraph) {
        let (inst, q) = generate(&GenSpec::Example1).unwrap();
        let gt = table_adjacency(&q);
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let gc = comp_cotable(&dag.unwrap(), &gt, &inst, CoMode::CoTable);
        (inst, q, gc, gt)
    }

    #[test]
    fn example1_success_canonical() {
        let (inst, q, gc, gt) = example1_setup();
        let res = comp_ro(&q, &inst, &gc, &gt);
        let tree = match res.outcome {
            RoOutcome::Success(t) => t,
            other => panic!("expected success, got {:?}", other),
        };
        assert_eq!(
            tree.render(&inst.var_names()),
            "(w1*v1 + w2*v2)*u1 + w3*(v3*u2 + v4*u3)"
        );
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        assert!(equivalent_on_all_assignments(
            &tree.to_expr(),
            &read_expression(&dag.unwrap()),
            22
        )
        .unwrap());
        assert_eq!(res.stats.depth, 5);
        assert_eq!(res.stats.row_decomps, 3);
        // one split per component plus one per joined leaf pair
        assert_eq!(res.stats.table_decomps, 6);
    }

    #[test]
    fn example1_row_decomp_components() {
        let (_, q, gc, gt) = example1_setup();
        let ctx = DecompositionContext {
            query: q.clone(),
            tuples: [
                ("R".to_string(), [0, 1, 2].map(VariableId).into()),
                ("S".to_string(), [3, 4, 5, 6].map(VariableId).into()),
                ("T".to_string(), [7, 8, 9].map(VariableId).into()),
            ]
            .into(),
            gt_edges: gt.edges.keys().cloned().collect(),
            flag_row: true,
            depth: 1,
        };
        let children = row_decomp(&ctx, &gc).unwrap();
        assert_eq!(children.len(), 2);
        assert_eq!(
            children[0].all_tuples(),
            [0, 1, 3, 4, 7].map(VariableId).into()
        );
        assert_eq!(
            children[1].all_tuples(),
            [2, 5, 6, 8, 9].map(VariableId).into()
        );
        assert!(!children[0].flag_row);
        // the component graph is connected, so the children cannot row-split
        assert!(row_decomp(&children[0], &gc).is_none());
    }

    #[test]
    fn example1_table_decomp_and_renames() {
        let (_, q, gc, gt) = example1_setup();
        // component {w1,w2,v1,v2,u1}
        let ctx = DecompositionContext {
            query: q.clone(),
            tuples: [
                ("R".to_string(), [0, 1].map(VariableId).into()),
                ("S".to_string(), [3, 4].map(VariableId).into()),
                ("T".to_string(), [7].map(VariableId).into()),
            ]
            .into(),
            gt_edges: gt.edges.keys().cloned().collect(),
            flag_row: false,
            depth: 2,
        };
        let children = table_decomp(&ctx, &gc, 1).unwrap();
        assert_eq!(children.len(), 2);
        // components sorted by first relation: {R,S} then {T}
        let rs = &children[0];
        assert_eq!(rs.query.subgoals.len(), 2);
        assert_eq!(rs.query.subgoals[0].relation, "R");
        // S's y is renamed (it crossed the discarded S-T edge); x is kept
        assert_eq!(
            rs.query.subgoals[1].terms,
            vec![
                Term::FoVariable("x".into()),
                Term::FoVariable("y#1#1".into())
            ]
        );
        let t = &children[1];
        assert_eq!(t.query.subgoals[0].relation, "T");
        assert_eq!(
            t.query.subgoals[0].terms,
            vec![Term::FoVariable("y#2#1".into())]
        );
        assert!(rs.flag_row);
    }

    #[test]
    fn table_decomp_all_incomplete_fails() {
        // two relations whose tuples do not join completely stay together
        let (_, q, gc, gt) = example1_setup();
        let ctx = DecompositionContext {
            query: q,
            tuples: [
                ("R".to_string(), [0, 1, 2].map(VariableId).into()),
                ("S".to_string(), [3, 4, 5, 6].map(VariableId).into()),
                ("T".to_string(), [7, 8, 9].map(VariableId).into()),
            ]
            .into(),
            gt_edges: gt.edges.keys().cloned().collect(),
            flag_row: false,
            depth: 1,
        };
        assert!(table_decomp(&ctx, &gc, 1).is_none());
    }

    #[test]
    fn base_case_single_relation() {
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("R", &["a"]).unwrap();
        for i in 0..3 {
            b.row("R", &[&format!("a{}", i)], None, 0.5).unwrap();
        }
        let inst = b.finish();
        let q = parse_query("Q() :- R(x).").unwrap();
        let gt = table_adjacency(&q);
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let gc = comp_cotable(&dag.unwrap(), &gt, &inst, CoMode::CoTable);
        let res = comp_ro(&q, &inst, &gc, &gt);
        match res.outcome {
            RoOutcome::Success(t) => {
                assert_eq!(t.render(&inst.var_names()), "R:0 + R:1 + R:2")
            }
            other => panic!("{:?}", other),
        }
        assert_eq!(res.stats.depth, 1);
    }

    #[test]
    fn chain_not_read_once() {
        for n in [3usize, 4, 5] {
            let (inst, q) = crate::chain::chain_instance(n, &vec![0.5; n + 1]).unwrap();
            let gt = table_adjacency(&q);
            let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
            let gc = comp_cotable(&dag.unwrap(), &gt, &inst, CoMode::CoTable);
            let res = comp_ro(&q, &inst, &gc, &gt);
            assert_eq!(res.outcome, RoOutcome::NotReadOnce, "n={}", n);
        }
        // x1x2 is a single conjunction and x1x2 + x2x3 factors as
        // x2(x1 + x3), so the two shortest chains are read-once
        for n in [1usize, 2] {
            let (inst, q) = crate::chain::chain_instance(n, &vec![0.5; n + 1]).unwrap();
            let gt = table_adjacency(&q);
            let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
            let gc = comp_cotable(&dag.unwrap(), &gt, &inst, CoMode::CoTable);
            assert!(
                matches!(comp_ro(&q, &inst, &gc, &gt).outcome, RoOutcome::Success(_)),
                "n={}",
                n
            );
        }
    }

    #[test]
    fn disconnected_gt_multiplies() {
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("A", &["a"]).unwrap();
        b.relation("B", &["b"]).unwrap();
        b.row("A", &["1"], None, 0.5).unwrap();
        b.row("A", &["2"], None, 0.5).unwrap();
        b.row("B", &["1"], None, 0.5).unwrap();
        let inst = b.finish();
        let q = parse_query("Q() :- A(x), B(y).").unwrap();
        let gt = table_adjacency(&q);
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let gc = comp_cotable(&dag.unwrap(), &gt, &inst, CoMode::CoTable);
        assert_eq!(gc.m(), 0);
        let res = comp_ro(&q, &inst, &gc, &gt);
        match res.outcome {
            RoOutcome::Success(t) => {
                assert_eq!(t.render(&inst.var_names()), "(A:0 + A:1)*B:0")
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn empty_result_when_relation_unpopulated() {
        let (inst, q) = generate(&GenSpec::Example1).unwrap();
        let gt = table_adjacency(&q);
        // empty co-table graph: no tuple participates
        let gc = CoGraph::new(CoMode::CoTable, []);
        let res = comp_ro(&q, &inst, &gc, &gt);
        assert_eq!(res.outcome, RoOutcome::EmptyResult);
    }

    /// Dropping tuples that never reach the query answer changes nothing:
    /// the decomposition gives the same output on the full and the pruned
    /// instance.
    #[test]
    fn pruning_dead_tuples_is_invisible() {
        let (inst, q) = generate(&GenSpec::Example1).unwrap();
        let mut b = crate::pdb::InstanceBuilder::new();
        for rel in &inst.relations {
            let attrs: Vec<&str> = rel.attributes.iter().map(|s| s.as_str()).collect();
            b.relation(&rel.name, &attrs).unwrap();
            for row in &rel.rows {
                let vals: Vec<&str> = row.values.iter().map(|s| s.as_str()).collect();
                b.row(&rel.name, &vals, Some(&row.name), row.prob).unwrap();
            }
        }
        // a9 joins nothing, so w9 never reaches the answer
        b.row("R", &["a9"], Some("w9"), 0.5).unwrap();
        let padded = b.finish();
        let gt = table_adjacency(&q);
        let (_, dag) = eval_plan(&default_plan(&q), &q, &padded).unwrap();
        let dag = dag.unwrap();
        let gc = comp_cotable(&dag, &gt, &padded, CoMode::CoTable);
        let pruned = padded.restrict(&dag.leaves().into_iter().collect());
        assert_eq!(pruned.relation("R").unwrap().rows.len(), 3);
        let full = comp_ro(&q, &padded, &gc, &gt);
        let cut = comp_ro(&q, &pruned, &gc, &gt);
        let render = |r: &RoResult| match &r.outcome {
            RoOutcome::Success(t) => t.render(&padded.var_names()),
            other => panic!("{:?}", other),
        };
        assert_eq!(render(&full), render(&cut));
        assert_eq!(full.stats, cut.stats);
    }

    /// The rewritten conjunction of the table-decomposition children has
    /// the same prime implicants as the original sub-query.
    #[test]
    fn table_decomp_rewrite_preserves_idnf() {
        let (inst, q, gc, gt) = example1_setup();
        let ctx = DecompositionContext {
            query: q.clone(),
            tuples: [
                ("R".to_string(), [0, 1].map(VariableId).into()),
                ("S".to_string(), [3, 4].map(VariableId).into()),
                ("T".to_string(), [7].map(VariableId).into()),
            ]
            .into(),
            gt_edges: gt.edges.keys().cloned().collect(),
            flag_row: false,
            depth: 1,
        };
        let keep = ctx.all_tuples();
        let sub = inst.restrict(&keep);
        let (_, dag) = eval_plan(&default_plan(&q), &q, &sub).unwrap();
        let original =
            expand_to_idnf(&read_expression(&dag.unwrap()), DEFAULT_IMPLICANT_CAP).unwrap();
        let children = table_decomp(&ctx, &gc, 1).unwrap();
        let mut conj = Vec::new();
        for ch in children {
            let ch_inst = sub.restrict(&ch.all_tuples());
            let (_, dag) =
                eval_plan(&default_plan(&ch.query), &ch.query, &ch_inst).unwrap();
            conj.push(read_expression(&dag.unwrap()));
        }
        let combined = crate::expr::MonotoneExpr::And(conj);
        let rewritten = expand_to_idnf(&combined, DEFAULT_IMPLICANT_CAP).unwrap();
        assert_eq!(original, rewritten);
    }
}
