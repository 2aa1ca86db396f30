//! The chain family E_n = x1x2 + x2x3 + ... + xn x(n+1): not read-once for
//! n >= 2, yet its probability has a linear-time dynamic program. The
//! instance construction realizes E_n as the lineage of a three-relation
//! join with a deterministic middle relation.

use crate::pdb::{Instance, InstanceBuilder};
use crate::query::{parse_query, Query};
use crate::Error;

/// Exact P(E_n) for `p = [p1, ..., p(n+1)]`.
///
/// Recurrence: P_i = P_(i-1) + p_i p_(i+1) (1 - p_(i-1)) (1 - P_(i-3)),
/// seeded P_(-1) = P_0 = 0 and P_1 = p1 p2. The new term x_i x_(i+1) adds
/// probability mass only in worlds where x_(i-1) is out (else x_(i-1) x_i
/// already fired) and none of the first i-3 implicants holds; those two
/// events are independent.
pub fn chain_probability(p: &[f64]) -> Result<f64, Error> {
    if p.len() < 2 {
        return Err(Error::Domain(
            "chain needs at least two probabilities".into(),
        ));
    }
    for &x in p {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!(
                "chain probability {} outside (0,1]",
                x
            )));
        }
    }
    let n = p.len() - 1;
    // memo[i + 1] = P_i, with memo[0] = P_(-1)
    let mut memo = vec![0.0f64; n + 2];
    memo[2] = p[0] * p[1];
    for i in 2..=n {
        let p_prev = p[i - 2];
        memo[i + 1] = memo[i] + p[i - 1] * p[i] * (1.0 - p_prev) * (1.0 - memo[i - 2]);
    }
    Ok(memo[n + 1])
}

/// Build the instance and query whose lineage is E_n: R holds a_j with
/// variable x(2j-1), T holds b_j with x(2j), and the deterministic S pairs
/// (a_j, b_j) and a(j+1), b_j) walk the chain.
pub fn chain_instance(n: usize, p: &[f64]) -> Result<(Instance, Query), Error> {
    if n < 1 {
        return Err(Error::Domain("chain length must be at least 1".into()));
    }
    if p.len() != n + 1 {
        return Err(Error::Domain(format!(
            "chain of length {} needs {} probabilities, got {}",
            n,
            n + 1,
            p.len()
        )));
    }
    let mut b = InstanceBuilder::new();
    b.relation("R", &["a"])?;
    b.relation("S", &["a", "b"])?;
    b.relation("T", &["b"])?;
    // x(2j-1) lives in R, x(2j) in T
    for m in (1..=n + 1).step_by(2) {
        let j = (m + 1) / 2;
        b.row("R", &[&format!("a{}", j)], Some(&format!("x{}", m)), p[m - 1])?;
    }
    for i in 1..=n {
        // implicant i joins x_i and x(i+1)
        let (aj, bj) = if i % 2 == 1 {
            ((i + 1) / 2, (i + 1) / 2)
        } else {
            (i / 2 + 1, i / 2)
        };
        b.row(
            "S",
            &[&format!("a{}", aj), &format!("b{}", bj)],
            Some(&format!("s{}", i)),
            1.0,
        )?;
    }
    for m in (2..=n + 1).step_by(2) {
        let j = m / 2;
        b.row("T", &[&format!("b{}", j)], Some(&format!("x{}", m)), p[m - 1])?;
    }
    let q = parse_query("Q() :- R(a), S(a,b), T(b).")?;
    Ok((b.finish(), q))
}
