//! SPJ plans over event tables and the provenance DAG they build.
//!
//! Plan evaluation annotates every intermediate row with a DAG node: scans
//! introduce tuple-variable leaves, each joined row pair adds a binary
//! `·`-node over the operand roots, each projection group adds a `+`-node.
//! Nodes unreachable from the final root (dangling former roots) are pruned.
//! The DAG is layered by the plan operator that created each node.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::expr::{MonotoneExpr, VariableId};
use crate::pdb::Instance;
use crate::query::{Query, Term};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Plan {
    Scan { relation: String },
    Join { left: Box<Plan>, right: Box<Plan> },
    /// Project onto the named FO variables; the root projects onto `[]`.
    Project { keep: Vec<String>, child: Box<Plan> },
}

impl Plan {
    fn relations(&self, out: &mut Vec<String>) {
        match self {
            Plan::Scan { relation } => out.push(relation.clone()),
            Plan::Join { left, right } => {
                left.relations(out);
                right.relations(out);
            }
            Plan::Project { child, .. } => child.relations(out),
        }
    }
}

/// Left-deep join in subgoal order, with constant and repeated-variable
/// selections applied at scan time and a final empty projection.
pub fn default_plan(q: &Query) -> Plan {
    let mut plan = Plan::Scan {
        relation: q.subgoals[0].relation.clone(),
    };
    for sg in &q.subgoals[1..] {
        plan = Plan::Join {
            left: Box::new(plan),
            right: Box::new(Plan::Scan {
                relation: sg.relation.clone(),
            }),
        };
    }
    Plan::Project {
        keep: Vec::new(),
        child: Box::new(plan),
    }
}

/// Right-deep variant, used to test plan invariance.
pub fn right_deep_plan(q: &Query) -> Plan {
    let last = q.subgoals.len() - 1;
    let mut plan = Plan::Scan {
        relation: q.subgoals[last].relation.clone(),
    };
    for sg in q.subgoals[..last].iter().rev() {
        plan = Plan::Join {
            left: Box::new(Plan::Scan {
                relation: sg.relation.clone(),
            }),
            right: Box::new(plan),
        };
    }
    Plan::Project {
        keep: Vec::new(),
        child: Box::new(plan),
    }
}

/// Parse the s-expression plan syntax, e.g.
/// `(project () (join (scan R) (scan S)))`.
pub fn parse_plan(text: &str) -> Result<Plan, Error> {
    #[derive(Debug)]
    enum Sexp {
        Atom(String),
        List(Vec<Sexp>),
    }
    fn tokenize(text: &str) -> Vec<String> {
        text.replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(|s| s.to_string())
            .collect()
    }
    fn parse(tokens: &[String], i: &mut usize) -> Result<Sexp, Error> {
        match tokens.get(*i).map(|s| s.as_str()) {
            Some("(") => {
                *i += 1;
                let mut items = Vec::new();
                while tokens.get(*i).map(|s| s.as_str()) != Some(")") {
                    if *i >= tokens.len() {
                        return Err(Error::Syntax("unbalanced '(' in plan".into()));
                    }
                    items.push(parse(tokens, i)?);
                }
                *i += 1;
                Ok(Sexp::List(items))
            }
            Some(")") => Err(Error::Syntax("unexpected ')' in plan".into())),
            Some(atom) => {
                let a = atom.to_string();
                *i += 1;
                Ok(Sexp::Atom(a))
            }
            None => Err(Error::Syntax("empty plan".into())),
        }
    }
    fn build(s: &Sexp) -> Result<Plan, Error> {
        let items = match s {
            Sexp::List(items) => items,
            Sexp::Atom(a) => return Err(Error::Syntax(format!("bare atom {:?} in plan", a))),
        };
        let head = match items.first() {
            Some(Sexp::Atom(a)) => a.as_str(),
            _ => return Err(Error::Syntax("plan form must start with an operator".into())),
        };
        match head {
            "scan" => match items.get(1) {
                Some(Sexp::Atom(rel)) if items.len() == 2 => Ok(Plan::Scan {
                    relation: rel.clone(),
                }),
                _ => Err(Error::Syntax("scan takes one relation name".into())),
            },
            "join" => {
                if items.len() != 3 {
                    return Err(Error::Syntax("join takes two subplans".into()));
                }
                Ok(Plan::Join {
                    left: Box::new(build(&items[1])?),
                    right: Box::new(build(&items[2])?),
                })
            }
            "project" => {
                if items.len() != 3 {
                    return Err(Error::Syntax(
                        "project takes a variable list and a subplan".into(),
                    ));
                }
                let keep = match &items[1] {
                    Sexp::List(vars) => vars
                        .iter()
                        .map(|v| match v {
                            Sexp::Atom(a) => Ok(a.clone()),
                            _ => Err(Error::Syntax("projection list must hold names".into())),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    Sexp::Atom(_) => {
                        return Err(Error::Syntax("projection list must be a list".into()))
                    }
                };
                Ok(Plan::Project {
                    keep,
                    child: Box::new(build(&items[2])?),
                })
            }
            other => Err(Error::Syntax(format!("unknown plan operator {:?}", other))),
        }
    }
    let tokens = tokenize(text);
    let mut i = 0;
    let sexp = parse(&tokens, &mut i)?;
    if i != tokens.len() {
        return Err(Error::Syntax("trailing input after plan".into()));
    }
    build(&sexp)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeLabel {
    Leaf(VariableId),
    AndNode,
    OrNode,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub label: NodeLabel,
    pub successors: Vec<usize>,
    /// Index of the plan operator that created the node.
    pub layer: usize,
}

/// Provenance DAG with a single root. Node ids are a topological order:
/// every successor id is smaller than its predecessor's id.
#[derive(Clone, Debug)]
pub struct ProvenanceDag {
    pub nodes: Vec<Node>,
    pub root: usize,
    pub layer_count: usize,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct DagStats {
    pub n_h: usize,
    pub m_h: usize,
    /// Width: maximum node count of any operator layer.
    pub beta_h: usize,
    /// Leaf count.
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct EventRow {
    pub values: Vec<String>,
    pub node: usize,
}

#[derive(Clone, Debug)]
pub struct EventTable {
    pub attributes: Vec<String>,
    pub rows: Vec<EventRow>,
}

impl ProvenanceDag {
    pub fn leaves(&self) -> Vec<VariableId> {
        self.nodes
            .iter()
            .filter_map(|n| match n.label {
                NodeLabel::Leaf(v) => Some(v),
                _ => None,
            })
            .collect()
    }

    pub fn stats(&self) -> DagStats {
        let mut per_layer = vec![0usize; self.layer_count];
        let mut m_h = 0;
        let mut n = 0;
        for node in &self.nodes {
            per_layer[node.layer] += 1;
            m_h += node.successors.len();
            if matches!(node.label, NodeLabel::Leaf(_)) {
                n += 1;
            }
        }
        DagStats {
            n_h: self.nodes.len(),
            m_h,
            beta_h: per_layer.iter().copied().max().unwrap_or(0),
            n,
        }
    }

    /// Structural invariants: acyclicity via the id order, binary `·`-nodes
    /// with variable-disjoint operands (each leaf below a `·`-node is
    /// reachable through exactly one successor), full reachability from the
    /// root.
    pub fn validate(&self) -> Result<(), Error> {
        let n_vars = self
            .leaves()
            .iter()
            .map(|v| v.index() + 1)
            .max()
            .unwrap_or(0);
        let words = n_vars.div_ceil(64);
        let mut var_sets: Vec<Vec<u64>> = Vec::with_capacity(self.nodes.len());
        for (id, node) in self.nodes.iter().enumerate() {
            let mut set = vec![0u64; words];
            match node.label {
                NodeLabel::Leaf(v) => {
                    if !node.successors.is_empty() {
                        return Err(Error::Domain("leaf with successors".into()));
                    }
                    set[v.index() / 64] |= 1 << (v.index() % 64);
                }
                NodeLabel::AndNode | NodeLabel::OrNode => {
                    if matches!(node.label, NodeLabel::AndNode) && node.successors.len() != 2 {
                        return Err(Error::Domain("non-binary product node".into()));
                    }
                    if node.successors.is_empty() {
                        return Err(Error::Domain("internal node without successors".into()));
                    }
                    for &s in &node.successors {
                        if s >= id {
                            return Err(Error::Domain("successor id not smaller".into()));
                        }
                    }
                    if matches!(node.label, NodeLabel::AndNode) {
                        let (a, b) = (node.successors[0], node.successors[1]);
                        for w in 0..words {
                            if var_sets[a][w] & var_sets[b][w] != 0 {
                                return Err(Error::Domain(
                                    "product operands share a variable".into(),
                                ));
                            }
                        }
                    }
                    for &s in &node.successors {
                        for w in 0..words {
                            set[w] |= var_sets[s][w];
                        }
                    }
                }
            }
            var_sets.push(set);
        }
        // reachability from the root
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(u) = stack.pop() {
            for &s in &self.nodes[u].successors {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("node unreachable from root".into()));
        }
        Ok(())
    }
}

/// Read the event expression off the DAG, duplicating shared subDAGs as
/// subtrees.
pub fn read_expression(dag: &ProvenanceDag) -> MonotoneExpr {
    let mut memo: Vec<Option<MonotoneExpr>> = vec![None; dag.nodes.len()];
    for id in 0..dag.nodes.len() {
        let node = &dag.nodes[id];
        let e = match node.label {
            NodeLabel::Leaf(v) => MonotoneExpr::Var(v),
            NodeLabel::AndNode => MonotoneExpr::And(
                node.successors
                    .iter()
                    .map(|&s| memo[s].clone().expect("successors precede"))
                    .collect(),
            ),
            NodeLabel::OrNode => {
                let children: Vec<MonotoneExpr> = node
                    .successors
                    .iter()
                    .map(|&s| memo[s].clone().expect("successors precede"))
                    .collect();
                if children.len() == 1 {
                    children.into_iter().next().unwrap()
                } else {
                    MonotoneExpr::Or(children)
                }
            }
        };
        memo[id] = Some(e);
    }
    memo[dag.root].take().expect("root computed")
}

struct DagBuilder {
    nodes: Vec<Node>,
    layer_count: usize,
}

impl DagBuilder {
    fn push(&mut self, label: NodeLabel, successors: Vec<usize>, layer: usize) -> usize {
        self.nodes.push(Node {
            label,
            successors,
            layer,
        });
        self.nodes.len() - 1
    }
}

/// Evaluate a plan over an instance. Returns the final event table and the
/// pruned provenance DAG, or `None` for the DAG when the result is empty
/// (probability 0).
pub fn eval_plan(
    plan: &Plan,
    q: &Query,
    inst: &Instance,
) -> Result<(EventTable, Option<ProvenanceDag>), Error> {
    // plan relations must realize the query subgoals exactly once
    let mut plan_rels = Vec::new();
    plan.relations(&mut plan_rels);
    let mut sorted = plan_rels.clone();
    sorted.sort();
    let mut query_rels: Vec<String> =
        q.subgoals.iter().map(|s| s.relation.clone()).collect();
    query_rels.sort();
    if sorted != query_rels {
        return Err(Error::Parse(format!(
            "plan relations {:?} do not match query subgoals {:?}",
            plan_rels, query_rels
        )));
    }
    match plan {
        Plan::Project { keep, .. } if keep.is_empty() => {}
        _ => {
            return Err(Error::Parse(
                "plan root must project onto the empty list".into(),
            ))
        }
    }

    let mut builder = DagBuilder {
        nodes: Vec::new(),
        layer_count: 0,
    };
    let table = eval_node(plan, q, inst, &mut builder)?;
    let layer_count = builder.layer_count;

    if table.rows.is_empty() {
        return Ok((table, None));
    }
    debug_assert_eq!(table.rows.len(), 1, "boolean root yields one row");
    let root = table.rows[0].node;

    // prune unreachable nodes, keeping ascending id order
    let mut keep = vec![false; builder.nodes.len()];
    let mut stack = vec![root];
    keep[root] = true;
    while let Some(u) = stack.pop() {
        for &s in &builder.nodes[u].successors {
            if !keep[s] {
                keep[s] = true;
                stack.push(s);
            }
        }
    }
    let mut remap = vec![usize::MAX; builder.nodes.len()];
    let mut nodes = Vec::new();
    for (id, node) in builder.nodes.into_iter().enumerate() {
        if keep[id] {
            remap[id] = nodes.len();
            nodes.push(Node {
                label: node.label,
                successors: node.successors.iter().map(|&s| remap[s]).collect(),
                layer: node.layer,
            });
        }
    }
    let dag = ProvenanceDag {
        nodes,
        root: remap[root],
        layer_count,
    };
    dag.validate()?;
    let table = EventTable {
        attributes: table.attributes,
        rows: table
            .rows
            .into_iter()
            .map(|r| EventRow {
                values: r.values,
                node: remap[r.node],
            })
            .collect(),
    };
    Ok((table, Some(dag)))
}

fn eval_node(
    plan: &Plan,
    q: &Query,
    inst: &Instance,
    builder: &mut DagBuilder,
) -> Result<EventTable, Error> {
    match plan {
        Plan::Scan { relation } => {
            let layer = builder.layer_count;
            builder.layer_count += 1;
            let rel = inst
                .relation(relation)
                .ok_or_else(|| Error::Parse(format!("unknown relation {}", relation)))?;
            let sg = q
                .subgoal(relation)
                .ok_or_else(|| Error::Parse(format!("no subgoal for relation {}", relation)))?;
            if sg.terms.len() != rel.arity() {
                return Err(Error::Parse(format!(
                    "subgoal {} arity {} does not match relation arity {}",
                    relation,
                    sg.terms.len(),
                    rel.arity()
                )));
            }
            // output attributes: distinct FO variables in term order
            let mut attributes: Vec<String> = Vec::new();
            let mut positions: Vec<usize> = Vec::new();
            for (i, t) in sg.terms.iter().enumerate() {
                if let Term::FoVariable(v) = t {
                    if !attributes.contains(v) {
                        attributes.push(v.clone());
                        positions.push(i);
                    }
                }
            }
            let mut rows = Vec::new();
            'row: for row in &rel.rows {
                // constant and repeated-variable selections
                let mut binding: BTreeMap<&str, &str> = BTreeMap::new();
                for (i, t) in sg.terms.iter().enumerate() {
                    match t {
                        Term::Constant(c) => {
                            if row.values[i] != *c {
                                continue 'row;
                            }
                        }
                        Term::FoVariable(v) => {
                            if let Some(&prev) = binding.get(v.as_str()) {
                                if prev != row.values[i] {
                                    continue 'row;
                                }
                            } else {
                                binding.insert(v, &row.values[i]);
                            }
                        }
                    }
                }
                let node = builder.push(NodeLabel::Leaf(row.var), Vec::new(), layer);
                rows.push(EventRow {
                    values: positions.iter().map(|&i| row.values[i].clone()).collect(),
                    node,
                });
            }
            Ok(EventTable { attributes, rows })
        }
        Plan::Join { left, right } => {
            let l = eval_node(left, q, inst, builder)?;
            let r = eval_node(right, q, inst, builder)?;
            let layer = builder.layer_count;
            builder.layer_count += 1;
            let shared: Vec<(usize, usize)> = l
                .attributes
                .iter()
                .enumerate()
                .filter_map(|(i, a)| {
                    r.attributes.iter().position(|b| b == a).map(|j| (i, j))
                })
                .collect();
            let r_extra: Vec<usize> = (0..r.attributes.len())
                .filter(|j| !shared.iter().any(|&(_, sj)| sj == *j))
                .collect();
            let mut attributes = l.attributes.clone();
            attributes.extend(r_extra.iter().map(|&j| r.attributes[j].clone()));
            // hash the right side on the shared columns
            let mut index: HashMap<Vec<&str>, Vec<&EventRow>> = HashMap::new();
            for row in &r.rows {
                let key: Vec<&str> = shared
                    .iter()
                    .map(|&(_, j)| row.values[j].as_str())
                    .collect();
                index.entry(key).or_default().push(row);
            }
            let mut rows = Vec::new();
            for lrow in &l.rows {
                let key: Vec<&str> = shared
                    .iter()
                    .map(|&(i, _)| lrow.values[i].as_str())
                    .collect();
                if let Some(matches) = index.get(&key) {
                    for rrow in matches {
                        let node = builder.push(
                            NodeLabel::AndNode,
                            vec![lrow.node, rrow.node],
                            layer,
                        );
                        let mut values = lrow.values.clone();
                        values.extend(r_extra.iter().map(|&j| rrow.values[j].clone()));
                        rows.push(EventRow { values, node });
                    }
                }
            }
            Ok(EventTable { attributes, rows })
        }
        Plan::Project { keep, child } => {
            let c = eval_node(child, q, inst, builder)?;
            let layer = builder.layer_count;
            builder.layer_count += 1;
            let positions: Vec<usize> = keep
                .iter()
                .map(|a| {
                    c.attributes.iter().position(|b| b == a).ok_or_else(|| {
                        Error::Parse(format!("projection variable {} not in input", a))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            // group rows by kept values; duplicates merge (set semantics)
            let mut groups: BTreeMap<Vec<String>, BTreeSet<usize>> = BTreeMap::new();
            for row in &c.rows {
                let key: Vec<String> =
                    positions.iter().map(|&i| row.values[i].clone()).collect();
                groups.entry(key).or_default().insert(row.node);
            }
            let mut rows = Vec::new();
            for (values, nodes) in groups {
                // unary groups still get a +-node
                let node =
                    builder.push(NodeLabel::OrNode, nodes.into_iter().collect(), layer);
                rows.push(EventRow { values, node });
            }
            Ok(EventTable {
                attributes: keep.clone(),
                rows,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{expand_to_idnf, Implicant, DEFAULT_IMPLICANT_CAP};
    use crate::gen::{generate, GenSpec};
    use crate::query::parse_query;
    use std::collections::BTreeSet;

    fn example1() -> (Instance, Query) {
        generate(&GenSpec::Example1).unwrap()
    }

    fn imp(ids: &[u32]) -> Implicant {
        ids.iter().map(|&i| VariableId(i)).collect()
    }

    #[test]
    fn default_plan_shape() {
        let q = parse_query("Q() :- R(x), S(x,y), T(y).").unwrap();
        let plan = default_plan(&q);
        let expected = parse_plan("(project () (join (join (scan R) (scan S)) (scan T)))")
            .unwrap();
        assert_eq!(plan, expected);
        let q1 = parse_query("Q() :- R(x).").unwrap();
        assert_eq!(
            default_plan(&q1),
            parse_plan("(project () (scan R))").unwrap()
        );
    }

    #[test]
    fn eval_example1_stats_and_idnf() {
        let (inst, q) = example1();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let dag = dag.unwrap();
        let stats = dag.stats();
        assert_eq!(stats.n, 10);
        assert_eq!(stats.n_h, 19);
        assert_eq!(stats.m_h, 20);
        assert_eq!(stats.beta_h, 4);
        let idnf = expand_to_idnf(&read_expression(&dag), DEFAULT_IMPLICANT_CAP).unwrap();
        // ids: w1..w3 = 0..2, v1..v4 = 3..6, u1..u3 = 7..9
        let expected: BTreeSet<Implicant> = [
            imp(&[0, 3, 7]),
            imp(&[1, 4, 7]),
            imp(&[2, 5, 8]),
            imp(&[2, 6, 9]),
        ]
        .into_iter()
        .collect();
        assert_eq!(idnf.implicants, expected);
    }

    #[test]
    fn eval_join_only_fig2() {
        // R join S: 4 product nodes over leaf pairs {w1v1, w2v2, w3v3, w3v4}
        let (inst, _) = example1();
        let q = parse_query("Q() :- R(x), S(x,y).").unwrap();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let dag = dag.unwrap();
        let idnf = expand_to_idnf(&read_expression(&dag), DEFAULT_IMPLICANT_CAP).unwrap();
        let expected: BTreeSet<Implicant> =
            [imp(&[0, 3]), imp(&[1, 4]), imp(&[2, 5]), imp(&[2, 6])]
                .into_iter()
                .collect();
        assert_eq!(idnf.implicants, expected);
        assert_eq!(
            dag.nodes
                .iter()
                .filter(|n| n.label == NodeLabel::AndNode)
                .count(),
            4
        );
    }

    #[test]
    fn eval_empty_result() {
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("R", &["a"]).unwrap();
        b.relation("S", &["a"]).unwrap();
        b.row("R", &["a1"], None, 0.5).unwrap();
        b.row("S", &["a2"], None, 0.5).unwrap();
        let inst = b.finish();
        let q = parse_query("Q() :- R(x), S(x).").unwrap();
        let (table, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        assert!(dag.is_none());
        assert!(table.rows.is_empty());
    }

    #[test]
    fn scan_constant_selection() {
        let (inst, _) = example1();
        let q = parse_query("Q() :- S(x,'c1').").unwrap();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let dag = dag.unwrap();
        // S rows (a1,c1) and (b1,c1): ids 3 and 4
        let mut leaves = dag.leaves();
        leaves.sort();
        assert_eq!(leaves, vec![VariableId(3), VariableId(4)]);
        let idnf = expand_to_idnf(&read_expression(&dag), DEFAULT_IMPLICANT_CAP).unwrap();
        assert_eq!(
            idnf.implicants,
            [imp(&[3]), imp(&[4])].into_iter().collect()
        );
    }

    #[test]
    fn repeated_variable_selection() {
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("R", &["a", "b"]).unwrap();
        b.row("R", &["1", "1"], None, 0.5).unwrap();
        b.row("R", &["1", "2"], None, 0.5).unwrap();
        let inst = b.finish();
        let q = parse_query("Q() :- R(x,x).").unwrap();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        assert_eq!(dag.unwrap().leaves(), vec![VariableId(0)]);
    }

    #[test]
    fn plan_invariance_idnf() {
        let (inst, q) = example1();
        let (_, d1) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let (_, d2) = eval_plan(&right_deep_plan(&q), &q, &inst).unwrap();
        let i1 = expand_to_idnf(&read_expression(&d1.unwrap()), DEFAULT_IMPLICANT_CAP).unwrap();
        let i2 = expand_to_idnf(&read_expression(&d2.unwrap()), DEFAULT_IMPLICANT_CAP).unwrap();
        assert_eq!(i1, i2);
    }

    #[test]
    fn pruning_drops_dangling_roots() {
        // second R row never joins; its leaf must be pruned
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("R", &["a"]).unwrap();
        b.relation("S", &["a"]).unwrap();
        b.row("R", &["1"], None, 0.5).unwrap();
        b.row("R", &["2"], None, 0.5).unwrap();
        b.row("S", &["1"], None, 0.5).unwrap();
        let inst = b.finish();
        let q = parse_query("Q() :- R(x), S(x).").unwrap();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let dag = dag.unwrap();
        assert_eq!(dag.leaves(), vec![VariableId(0), VariableId(2)]);
        dag.validate().unwrap();
    }

    #[test]
    fn single_leaf_stats() {
        let mut b = crate::pdb::InstanceBuilder::new();
        b.relation("R", &["a"]).unwrap();
        b.row("R", &["1"], None, 0.5).unwrap();
        let inst = b.finish();
        let q = parse_query("Q() :- R(x).").unwrap();
        let (_, dag) = eval_plan(&default_plan(&q), &q, &inst).unwrap();
        let stats = dag.unwrap().stats();
        assert_eq!(stats.n, 1);
        assert_eq!((stats.n_h, stats.m_h), (2, 1)); // leaf + unary +-node
    }

    #[test]
    fn parse_plan_roundtrip_errors() {
        assert!(parse_plan("(project () (join (scan R)))").is_err());
        assert!(parse_plan("(scan R) extra").is_err());
        assert!(parse_plan("(shuffle R)").is_err());
    }
}
