//! Deterministic instance generators for tests and benchmarks: the worked
//! three-table example, its n-fold replication, cross-product and star
//! shapes, the chain family, and seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pdb::{Instance, InstanceBuilder};
use crate::query::{parse_query, Query};
use crate::Error;

#[derive(Clone, PartialEq, Debug)]
pub enum GenSpec {
    /// The fixed R/S/T example with its original probabilities.
    Example1,
    /// n disjoint copies of the example pattern: |R| = |T| = 3n, |S| = 4n,
    /// read-once with 2n summand blocks.
    AppendixA { n: usize, prob: f64 },
    /// Two unconnected unary relations with n rows each: the co-occurrence
    /// graph gets n^2 edges, the co-table graph none.
    CrossProduct(usize),
    /// k binary relations sharing one join variable: complete
    /// table-adjacency graph.
    Star { k: usize, rows: usize },
    /// Chain family of length n, uniform probability 0.5.
    Chain(usize),
    /// Seeded random self-join-free query and instance.
    Random {
        k: usize,
        arity: usize,
        rows: usize,
        domain: usize,
        seed: u64,
    },
}

pub fn generate(spec: &GenSpec) -> Result<(Instance, Query), Error> {
    match spec {
        GenSpec::Example1 => example1(),
        GenSpec::AppendixA { n, prob } => appendix_a(*n, *prob),
        GenSpec::CrossProduct(n) => cross_product(*n),
        GenSpec::Star { k, rows } => star(*k, *rows),
        GenSpec::Chain(n) => crate::chain::chain_instance(*n, &vec![0.5; *n + 1]),
        GenSpec::Random {
            k,
            arity,
            rows,
            domain,
            seed,
        } => random(*k, *arity, *rows, *domain, *seed),
    }
}

fn example1() -> Result<(Instance, Query), Error> {
    let mut b = InstanceBuilder::new();
    b.relation("R", &["A"])?;
    b.relation("S", &["A", "C"])?;
    b.relation("T", &["C"])?;
    b.row("R", &["a1"], Some("w1"), 0.3)?;
    b.row("R", &["b1"], Some("w2"), 0.4)?;
    b.row("R", &["a2"], Some("w3"), 0.6)?;
    b.row("S", &["a1", "c1"], Some("v1"), 0.1)?;
    b.row("S", &["b1", "c1"], Some("v2"), 0.5)?;
    b.row("S", &["a2", "c2"], Some("v3"), 0.2)?;
    b.row("S", &["a2", "d2"], Some("v4"), 0.1)?;
    b.row("T", &["c1"], Some("u1"), 0.7)?;
    b.row("T", &["c2"], Some("u2"), 0.8)?;
    b.row("T", &["d2"], Some("u3"), 0.4)?;
    Ok((b.finish(), parse_query("Q() :- R(x), S(x,y), T(y).")?))
}

fn appendix_a(n: usize, prob: f64) -> Result<(Instance, Query), Error> {
    if n < 1 {
        return Err(Error::Domain("replication count must be at least 1".into()));
    }
    let mut b = InstanceBuilder::new();
    b.relation("R", &["A"])?;
    b.relation("S", &["A", "C"])?;
    b.relation("T", &["C"])?;
    for i in 1..=n {
        let (o, e) = (2 * i - 1, 2 * i);
        b.row("R", &[&format!("a{}", o)], Some(&format!("x{}", o)), prob)?;
        b.row("R", &[&format!("b{}", o)], Some(&format!("y{}", o)), prob)?;
        b.row("R", &[&format!("a{}", e)], Some(&format!("x{}", e)), prob)?;
        b.row(
            "S",
            &[&format!("a{}", o), &format!("c{}", o)],
            Some(&format!("z{}", 4 * i - 3)),
            prob,
        )?;
        b.row(
            "S",
            &[&format!("b{}", o), &format!("c{}", o)],
            Some(&format!("z{}", 4 * i - 2)),
            prob,
        )?;
        b.row(
            "S",
            &[&format!("a{}", e), &format!("c{}", e)],
            Some(&format!("z{}", 4 * i - 1)),
            prob,
        )?;
        b.row(
            "S",
            &[&format!("a{}", e), &format!("d{}", e)],
            Some(&format!("z{}", 4 * i)),
            prob,
        )?;
        b.row("T", &[&format!("c{}", o)], Some(&format!("u{}", o)), prob)?;
        b.row("T", &[&format!("c{}", e)], Some(&format!("u{}", e)), prob)?;
        b.row("T", &[&format!("d{}", e)], Some(&format!("v{}", e)), prob)?;
    }
    Ok((b.finish(), parse_query("Q() :- R(x), S(x,y), T(y).")?))
}

fn cross_product(n: usize) -> Result<(Instance, Query), Error> {
    if n < 1 {
        return Err(Error::Domain("row count must be at least 1".into()));
    }
    let mut b = InstanceBuilder::new();
    b.relation("R1", &["A"])?;
    b.relation("R2", &["B"])?;
    for i in 0..n {
        b.row("R1", &[&format!("a{}", i)], None, 0.5)?;
    }
    for i in 0..n {
        b.row("R2", &[&format!("b{}", i)], None, 0.5)?;
    }
    Ok((b.finish(), parse_query("Q() :- R1(x1), R2(x2).")?))
}

fn star(k: usize, rows: usize) -> Result<(Instance, Query), Error> {
    if k < 2 || rows < 1 {
        return Err(Error::Domain(
            "star needs at least 2 relations and 1 row".into(),
        ));
    }
    let mut b = InstanceBuilder::new();
    for i in 1..=k {
        b.relation(&format!("R{}", i), &["A", "B"])?;
    }
    for i in 1..=k {
        for j in 0..rows {
            b.row(
                &format!("R{}", i),
                &[&format!("a{}_{}", i, j), &format!("c{}", j)],
                None,
                0.5,
            )?;
        }
    }
    let body: Vec<String> = (1..=k).map(|i| format!("R{}(x{},y)", i, i)).collect();
    Ok((b.finish(), parse_query(&format!("Q() :- {}.", body.join(", ")))?))
}

fn random(
    k: usize,
    arity: usize,
    rows: usize,
    domain: usize,
    seed: u64,
) -> Result<(Instance, Query), Error> {
    if k < 1 || arity < 1 || rows < 1 || domain < 1 {
        return Err(Error::Domain("random generator parameters must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // shared FO-variable pool, slightly larger than the arity so that
    // subgoals overlap often but not always
    let pool: Vec<String> = (0..arity + 1).map(|i| format!("v{}", i)).collect();
    let mut atoms = Vec::new();
    let mut b = InstanceBuilder::new();
    for i in 1..=k {
        let a = rng.gen_range(1..=arity);
        let terms: Vec<String> = (0..a)
            .map(|_| pool[rng.gen_range(0..pool.len())].clone())
            .collect();
        atoms.push(format!("R{}({})", i, terms.join(",")));
        let attrs: Vec<String> = (0..a).map(|c| format!("A{}", c)).collect();
        b.relation(
            &format!("R{}", i),
            &attrs.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        )?;
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..rows {
            let values: Vec<String> = (0..a)
                .map(|_| format!("d{}", rng.gen_range(0..domain)))
                .collect();
            if !seen.insert(values.clone()) {
                continue; // duplicate rows merge under set semantics
            }
            let prob = 0.05 + 0.9 * rng.gen::<f64>();
            b.row(
                &format!("R{}", i),
                &values.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                None,
                prob,
            )?;
        }
    }
    let q = parse_query(&format!("Q() :- {}.", atoms.join(", ")))?;
    Ok((b.finish(), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_shape() {
        let (inst, q) = generate(&GenSpec::Example1).unwrap();
        assert_eq!(inst.n(), 10);
        assert_eq!(q.k(), 3);
        let names = inst.var_names();
        assert_eq!(
            names,
            vec!["w1", "w2", "w3", "v1", "v2", "v3", "v4", "u1", "u2", "u3"]
        );
        let probs = inst.prob_map();
        assert!((probs.get(crate::expr::VariableId(0)) - 0.3).abs() < 1e-12);
        assert!((probs.get(crate::expr::VariableId(9)) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn appendix_a_counts() {
        for n in [1usize, 2, 5] {
            let (inst, _) = generate(&GenSpec::AppendixA { n, prob: 0.5 }).unwrap();
            assert_eq!(inst.relation("R").unwrap().rows.len(), 3 * n);
            assert_eq!(inst.relation("S").unwrap().rows.len(), 4 * n);
            assert_eq!(inst.relation("T").unwrap().rows.len(), 3 * n);
        }
    }

    #[test]
    fn cross_product_counts() {
        let (inst, q) = generate(&GenSpec::CrossProduct(50)).unwrap();
        assert_eq!(inst.n(), 100);
        assert_eq!(crate::query::table_adjacency(&q).m_t(), 0);
    }

    #[test]
    fn star_complete_adjacency() {
        let (_, q) = generate(&GenSpec::Star { k: 4, rows: 2 }).unwrap();
        let gt = crate::query::table_adjacency(&q);
        assert_eq!(gt.m_t(), 6);
    }

    #[test]
    fn random_is_deterministic() {
        let spec = GenSpec::Random {
            k: 3,
            arity: 2,
            rows: 5,
            domain: 4,
            seed: 42,
        };
        let (i1, q1) = generate(&spec).unwrap();
        let (i2, q2) = generate(&spec).unwrap();
        assert_eq!(i1, i2);
        assert_eq!(q1, q2);
        let (i3, _) = generate(&GenSpec::Random {
            k: 3,
            arity: 2,
            rows: 5,
            domain: 4,
            seed: 43,
        })
        .unwrap();
        assert_ne!(i1, i3);
    }

    #[test]
    fn random_probabilities_in_range() {
        let (inst, _) = generate(&GenSpec::Random {
            k: 4,
            arity: 3,
            rows: 7,
            domain: 5,
            seed: 7,
        })
        .unwrap();
        for rel in &inst.relations {
            for row in &rel.rows {
                assert!(row.prob > 0.05 && row.prob < 0.95);
            }
        }
    }
}
