//! roqe: read-once query evaluation for tuple-independent probabilistic
//! databases.
//!
//! Pipeline: parse a self-join-free boolean conjunctive query, evaluate an
//! SPJ plan over a probabilistic instance to build the provenance DAG, derive
//! the co-table graph directly from the DAG, decide whether the answer's
//! event expression is read-once by alternating row and table decomposition,
//! and on success emit the unique read-once form and its exact probability.

pub mod chain;
pub mod cotable;
pub mod expr;
pub mod gen;
pub mod pdb;
pub mod pipeline;
pub mod provenance;
pub mod query;
pub mod readonce;

mod book;

pub use expr::{
    canonicalize, equivalent_on_all_assignments, exact_probability, expand_to_idnf,
    readonce_probability, Idnf, Implicant, MonotoneExpr, ProbMap, ReadOnceTree, VariableId,
};
pub use pdb::{Instance, Relation, TupleRow};
pub use provenance::{DagStats, EventTable, Plan, ProvenanceDag};
pub use query::{Query, TableAdjacencyGraph, Term};

/// Errors for parsing, loading, and resource caps. Algorithmic outcomes
/// (not read-once, empty result) are values, not errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("duplicate tuple: {0}")]
    DuplicateTuple(String),
    #[error("self-join: relation {0} appears in more than one subgoal")]
    SelfJoin(String),
    #[error("head of a boolean query must be empty, found {0}")]
    HeadVariable(String),
    #[error("enumeration cap exceeded: {vars} variables, cap {cap}")]
    EnumerationCap { vars: usize, cap: usize },
    #[error("implicant cap exceeded: more than {cap} implicants")]
    ImplicantCap { cap: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
