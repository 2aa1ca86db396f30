//! End-to-end evaluation: parse, plan, provenance, co-table graph,
//! decomposition, probability. Produces a stable report for the CLI.

use std::path::Path;

use crate::cotable::{comp_cotable, find_induced_p4, CoGraph, CoMode};
use crate::expr::readonce_probability;
use crate::pdb::{load_instance, Instance};
use crate::provenance::{default_plan, eval_plan, parse_plan, Plan};
use crate::query::{parse_query, table_adjacency, Query};
use crate::readonce::{comp_ro, RoOutcome};
use crate::Error;

/// Above this vertex count the quartic induced-path scan for the failure
/// witness is skipped.
pub const P4_WITNESS_CAP: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Success,
    NotReadOnce,
    Empty,
}

#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct Stats {
    pub n: usize,
    pub k: usize,
    pub m_h: usize,
    pub beta_h: usize,
    pub m_co: usize,
    pub m_c: usize,
    pub m_t: usize,
    pub depth: usize,
    pub row_decomps: usize,
    pub table_decomps: usize,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Report {
    pub outcome: Outcome,
    /// Canonical read-once rendering, on success.
    pub expression: Option<String>,
    /// Exact probability; 0 for an empty result, absent when not read-once.
    pub probability: Option<f64>,
    /// Induced-path witness in the co-occurrence graph, on failure.
    pub p4_witness: Option<[String; 4]>,
    pub stats: Stats,
}

impl Report {
    pub fn read_once(&self) -> bool {
        self.outcome != Outcome::NotReadOnce
    }

    /// Key-sorted, schema-stable JSON; identical inputs give identical
    /// bytes.
    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "read_once": self.read_once(),
            "expression": self.expression,
            "probability": self.probability,
            "p4_witness": self.p4_witness.as_ref().map(|w| w.to_vec()),
            "stats": {
                "n": self.stats.n,
                "k": self.stats.k,
                "m_H": self.stats.m_h,
                "beta_H": self.stats.beta_h,
                "m_co": self.stats.m_co,
                "m_C": self.stats.m_c,
                "m_T": self.stats.m_t,
                "depth": self.stats.depth,
                "row_decomps": self.stats.row_decomps,
                "table_decomps": self.stats.table_decomps,
            },
        });
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Intermediate products of an evaluation, for callers that inspect the
/// graphs directly.
pub struct Evaluation {
    pub report: Report,
    pub gc: Option<CoGraph>,
    pub gco: Option<CoGraph>,
}

pub fn evaluate(
    query_text: &str,
    instance_dir: &Path,
    plan_text: Option<&str>,
) -> Result<Report, Error> {
    let q = parse_query(query_text)?;
    let inst = load_instance(instance_dir)?;
    let plan = plan_text.map(parse_plan).transpose()?;
    Ok(evaluate_instance(&q, &inst, plan)?.report)
}

pub fn evaluate_instance(
    q: &Query,
    inst: &Instance,
    plan: Option<Plan>,
) -> Result<Evaluation, Error> {
    let gt = table_adjacency(q);
    let plan = plan.unwrap_or_else(|| default_plan(q));
    let (_, dag) = eval_plan(&plan, q, inst)?;
    let mut stats = Stats {
        k: q.k(),
        m_t: gt.m_t(),
        ..Stats::default()
    };
    let dag = match dag {
        Some(d) => d,
        None => {
            return Ok(Evaluation {
                report: Report {
                    outcome: Outcome::Empty,
                    expression: None,
                    probability: Some(0.0),
                    p4_witness: None,
                    stats,
                },
                gc: None,
                gco: None,
            })
        }
    };
    let dstats = dag.stats();
    stats.n = dstats.n;
    stats.m_h = dstats.m_h;
    stats.beta_h = dstats.beta_h;
    let gc = comp_cotable(&dag, &gt, inst, CoMode::CoTable);
    let gco = comp_cotable(&dag, &gt, inst, CoMode::CoOccurrence);
    stats.m_c = gc.m();
    stats.m_co = gco.m();
    // drop tuples without a provenance leaf before decomposing
    let live = dag.leaves().into_iter().collect();
    let pruned = inst.restrict(&live);
    let ro = comp_ro(q, &pruned, &gc, &gt);
    stats.depth = ro.stats.depth;
    stats.row_decomps = ro.stats.row_decomps;
    stats.table_decomps = ro.stats.table_decomps;
    let report = match ro.outcome {
        RoOutcome::Success(tree) => {
            let prob = readonce_probability(&tree, &inst.prob_map())?;
            Report {
                outcome: Outcome::Success,
                expression: Some(tree.render(&inst.var_names())),
                probability: Some(prob),
                p4_witness: None,
                stats,
            }
        }
        RoOutcome::NotReadOnce => {
            let names = inst.var_names();
            let witness = if gco.vertex_count() <= P4_WITNESS_CAP {
                find_induced_p4(&gco)
                    .map(|w| w.map(|v| names[v.index()].clone()))
            } else {
                None
            };
            Report {
                outcome: Outcome::NotReadOnce,
                expression: None,
                probability: None,
                p4_witness: witness,
                stats,
            }
        }
        RoOutcome::EmptyResult => Report {
            outcome: Outcome::Empty,
            expression: None,
            probability: Some(0.0),
            p4_witness: None,
            stats,
        },
    };
    Ok(Evaluation {
        report,
        gc: Some(gc),
        gco: Some(gco),
    })
}
