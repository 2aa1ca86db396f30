//! Monotone boolean event expressions, their irredundant DNF, read-once
//! trees, and the exhaustive oracles the rest of the engine is tested
//! against.
//!
//! Tuple variables are boolean-valued random variables; an event expression
//! is a monotone formula over them (no negation, only `+` and `*`). A
//! formula is *read-once* when it is equivalent to a form in which every
//! variable occurs exactly once; that form is unique modulo associativity
//! and commutativity, and its probability is computable in linear time.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::Error;

/// Default variable-count cap for the possible-worlds enumeration oracle.
pub const DEFAULT_ENUM_CAP: usize = 22;
/// Default implicant-count cap for DNF expansion.
pub const DEFAULT_IMPLICANT_CAP: usize = 2_000_000;

/// Dense tuple-variable identifier, unique across a whole instance.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VariableId(pub u32);

impl VariableId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Per-variable probabilities, each in `(0, 1]`, indexed by dense id.
#[derive(Clone, Debug)]
pub struct ProbMap {
    probs: Vec<f64>,
}

impl ProbMap {
    pub fn new(probs: Vec<f64>) -> Result<Self, Error> {
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Domain(format!(
                    "probability {} for variable {} outside (0,1]",
                    p, i
                )));
            }
        }
        Ok(ProbMap { probs })
    }

    pub fn get(&self, v: VariableId) -> f64 {
        self.probs[v.index()]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn check_covers<'a>(&self, vars: impl IntoIterator<Item = &'a VariableId>) -> Result<(), Error> {
        for v in vars {
            if v.index() >= self.probs.len() {
                return Err(Error::Domain(format!(
                    "probability map does not cover variable id {}",
                    v.0
                )));
            }
        }
        Ok(())
    }
}

/// A monotone boolean expression over tuple variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MonotoneExpr {
    Var(VariableId),
    And(Vec<MonotoneExpr>),
    Or(Vec<MonotoneExpr>),
}

impl MonotoneExpr {
    pub fn var(id: u32) -> Self {
        MonotoneExpr::Var(VariableId(id))
    }

    /// All variables of the expression, deduplicated.
    pub fn variables(&self) -> BTreeSet<VariableId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<VariableId>) {
        match self {
            MonotoneExpr::Var(v) => {
                out.insert(*v);
            }
            MonotoneExpr::And(cs) | MonotoneExpr::Or(cs) => {
                for c in cs {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Evaluate under a truth assignment.
    pub fn eval(&self, assign: &impl Fn(VariableId) -> bool) -> bool {
        match self {
            MonotoneExpr::Var(v) => assign(*v),
            MonotoneExpr::And(cs) => cs.iter().all(|c| c.eval(assign)),
            MonotoneExpr::Or(cs) => cs.iter().any(|c| c.eval(assign)),
        }
    }

    /// Text rendering: `+` for Or, `*` for And, parentheses for grouping,
    /// variable display names verbatim.
    pub fn render(&self, names: &[String]) -> String {
        match self {
            MonotoneExpr::Var(v) => names[v.index()].clone(),
            MonotoneExpr::Or(cs) => cs
                .iter()
                .map(|c| c.render(names))
                .collect::<Vec<_>>()
                .join(" + "),
            MonotoneExpr::And(cs) => cs
                .iter()
                .map(|c| match c {
                    MonotoneExpr::Or(inner) if inner.len() > 1 => {
                        format!("({})", c.render(names))
                    }
                    _ => c.render(names),
                })
                .collect::<Vec<_>>()
                .join("*"),
        }
    }
}

/// An implicant: a conjunction of distinct variables, stored sorted.
pub type Implicant = Vec<VariableId>;

/// Irredundant DNF: the set of prime implicants of a monotone formula.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Idnf {
    pub implicants: BTreeSet<Implicant>,
}

impl Idnf {
    /// Absorption: drop every implicant whose variable set is a strict
    /// superset of another's.
    pub fn from_implicants(implicants: BTreeSet<Implicant>) -> Idnf {
        let keep: BTreeSet<Implicant> = implicants
            .iter()
            .filter(|imp| {
                !implicants
                    .iter()
                    .any(|other| other.len() < imp.len() && is_subset(other, imp))
            })
            .cloned()
            .collect();
        Idnf { implicants: keep }
    }

    pub fn to_expr(&self) -> MonotoneExpr {
        let terms: Vec<MonotoneExpr> = self
            .implicants
            .iter()
            .map(|imp| {
                if imp.len() == 1 {
                    MonotoneExpr::Var(imp[0])
                } else {
                    MonotoneExpr::And(imp.iter().map(|v| MonotoneExpr::Var(*v)).collect())
                }
            })
            .collect();
        match terms.len() {
            1 => terms.into_iter().next().unwrap(),
            _ => MonotoneExpr::Or(terms),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        self.implicants
            .iter()
            .map(|imp| {
                imp.iter()
                    .map(|v| names[v.index()].as_str())
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Both inputs sorted.
fn is_subset(a: &[VariableId], b: &[VariableId]) -> bool {
    let mut bi = b.iter();
    'outer: for x in a {
        for y in bi.by_ref() {
            match y.cmp(x) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Merge two sorted implicants, deduplicating repeated variables
/// (idempotence).
fn merge_implicants(a: &[VariableId], b: &[VariableId]) -> Implicant {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// DNF expansion by distributivity and idempotence only (no absorption).
///
/// For event expressions of self-join-free conjunctive queries this is
/// already the IDNF; the absorption pass in [`expand_to_idnf`] is a no-op
/// there, which tests assert.
pub fn expand_distributive(expr: &MonotoneExpr, cap: usize) -> Result<BTreeSet<Implicant>, Error> {
    fn go(expr: &MonotoneExpr, cap: usize) -> Result<BTreeSet<Implicant>, Error> {
        let out = match expr {
            MonotoneExpr::Var(v) => {
                let mut s = BTreeSet::new();
                s.insert(vec![*v]);
                s
            }
            MonotoneExpr::Or(cs) => {
                let mut s = BTreeSet::new();
                for c in cs {
                    s.extend(go(c, cap)?);
                    if s.len() > cap {
                        return Err(Error::ImplicantCap { cap });
                    }
                }
                s
            }
            MonotoneExpr::And(cs) => {
                let mut acc: BTreeSet<Implicant> = BTreeSet::new();
                acc.insert(Vec::new());
                for c in cs {
                    let rhs = go(c, cap)?;
                    let mut next = BTreeSet::new();
                    for a in &acc {
                        for b in &rhs {
                            next.insert(merge_implicants(a, b));
                            if next.len() > cap {
                                return Err(Error::ImplicantCap { cap });
                            }
                        }
                    }
                    acc = next;
                }
                acc
            }
        };
        Ok(out)
    }
    go(expr, cap)
}

/// Expand a monotone expression to its irredundant DNF.
pub fn expand_to_idnf(expr: &MonotoneExpr, cap: usize) -> Result<Idnf, Error> {
    Ok(Idnf::from_implicants(expand_distributive(expr, cap)?))
}

enum Cofactor {
    Const(bool),
    Expr(MonotoneExpr),
}

/// Substitute `x := val` and simplify.
fn cofactor(expr: &MonotoneExpr, x: VariableId, val: bool) -> Cofactor {
    match expr {
        MonotoneExpr::Var(v) => {
            if *v == x {
                Cofactor::Const(val)
            } else {
                Cofactor::Expr(MonotoneExpr::Var(*v))
            }
        }
        MonotoneExpr::And(cs) => {
            let mut kept = Vec::new();
            for c in cs {
                match cofactor(c, x, val) {
                    Cofactor::Const(false) => return Cofactor::Const(false),
                    Cofactor::Const(true) => {}
                    Cofactor::Expr(e) => kept.push(e),
                }
            }
            match kept.len() {
                0 => Cofactor::Const(true),
                1 => Cofactor::Expr(kept.into_iter().next().unwrap()),
                _ => Cofactor::Expr(MonotoneExpr::And(kept)),
            }
        }
        MonotoneExpr::Or(cs) => {
            let mut kept = Vec::new();
            for c in cs {
                match cofactor(c, x, val) {
                    Cofactor::Const(true) => return Cofactor::Const(true),
                    Cofactor::Const(false) => {}
                    Cofactor::Expr(e) => kept.push(e),
                }
            }
            match kept.len() {
                0 => Cofactor::Const(false),
                1 => Cofactor::Expr(kept.into_iter().next().unwrap()),
                _ => Cofactor::Expr(MonotoneExpr::Or(kept)),
            }
        }
    }
}

fn most_frequent_var(expr: &MonotoneExpr) -> VariableId {
    fn count(expr: &MonotoneExpr, counts: &mut HashMap<VariableId, usize>) {
        match expr {
            MonotoneExpr::Var(v) => *counts.entry(*v).or_insert(0) += 1,
            MonotoneExpr::And(cs) | MonotoneExpr::Or(cs) => {
                for c in cs {
                    count(c, counts);
                }
            }
        }
    }
    let mut counts = HashMap::new();
    count(expr, &mut counts);
    counts
        .into_iter()
        .max_by_key(|&(v, c)| (c, std::cmp::Reverse(v)))
        .map(|(v, _)| v)
        .expect("expression has at least one variable")
}

fn shannon(expr: &MonotoneExpr, p: &ProbMap) -> f64 {
    let x = most_frequent_var(expr);
    let px = p.get(x);
    let hi = match cofactor(expr, x, true) {
        Cofactor::Const(b) => b as u8 as f64,
        Cofactor::Expr(e) => shannon(&e, p),
    };
    let lo = match cofactor(expr, x, false) {
        Cofactor::Const(b) => b as u8 as f64,
        Cofactor::Expr(e) => shannon(&e, p),
    };
    px * hi + (1.0 - px) * lo
}

/// Exact probability of a monotone expression by Shannon expansion over
/// possible worlds. Exponential; this is the desk-scale oracle.
pub fn exact_probability(expr: &MonotoneExpr, p: &ProbMap, cap: usize) -> Result<f64, Error> {
    let vars = expr.variables();
    if vars.len() > cap {
        return Err(Error::EnumerationCap {
            vars: vars.len(),
            cap,
        });
    }
    p.check_covers(&vars)?;
    Ok(shannon(expr, p))
}

/// True iff `a` and `b` agree on every assignment over the union of their
/// variables. Oracle for soundness tests.
pub fn equivalent_on_all_assignments(
    a: &MonotoneExpr,
    b: &MonotoneExpr,
    cap: usize,
) -> Result<bool, Error> {
    let mut vars = a.variables();
    vars.extend(b.variables());
    let vars: Vec<VariableId> = vars.into_iter().collect();
    if vars.len() > cap {
        return Err(Error::EnumerationCap {
            vars: vars.len(),
            cap,
        });
    }
    let bit: BTreeMap<VariableId, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    for mask in 0u64..(1u64 << vars.len()) {
        let assign = |v: VariableId| mask >> bit[&v] & 1 == 1;
        if a.eval(&assign) != b.eval(&assign) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical read-once form: every variable occurs exactly once, Sum and
/// Product alternate along every root-to-leaf path, children sorted by
/// their minimum variable id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ReadOnceTree {
    Leaf(VariableId),
    Sum(Vec<ReadOnceTree>),
    Product(Vec<ReadOnceTree>),
}

impl ReadOnceTree {
    pub fn min_var(&self) -> VariableId {
        match self {
            ReadOnceTree::Leaf(v) => *v,
            ReadOnceTree::Sum(cs) | ReadOnceTree::Product(cs) => {
                cs.iter().map(|c| c.min_var()).min().expect("non-empty")
            }
        }
    }

    pub fn variables(&self) -> Vec<VariableId> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<VariableId>) {
        match self {
            ReadOnceTree::Leaf(v) => out.push(*v),
            ReadOnceTree::Sum(cs) | ReadOnceTree::Product(cs) => {
                for c in cs {
                    c.collect(out);
                }
            }
        }
    }

    /// Flatten into a plain monotone expression (for the oracles).
    pub fn to_expr(&self) -> MonotoneExpr {
        match self {
            ReadOnceTree::Leaf(v) => MonotoneExpr::Var(*v),
            ReadOnceTree::Sum(cs) => MonotoneExpr::Or(cs.iter().map(|c| c.to_expr()).collect()),
            ReadOnceTree::Product(cs) => {
                MonotoneExpr::And(cs.iter().map(|c| c.to_expr()).collect())
            }
        }
    }

    /// Verify all canonical-form invariants; returns a description of the
    /// first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let vars = self.variables();
        let set: BTreeSet<_> = vars.iter().collect();
        if set.len() != vars.len() {
            return Err("a variable occurs more than once".into());
        }
        fn walk(t: &ReadOnceTree) -> Result<(), String> {
            let cs = match t {
                ReadOnceTree::Leaf(_) => return Ok(()),
                ReadOnceTree::Sum(cs) | ReadOnceTree::Product(cs) => cs,
            };
            if cs.len() < 2 {
                return Err("internal node with fewer than 2 children".into());
            }
            for w in cs.windows(2) {
                if w[0].min_var() > w[1].min_var() {
                    return Err("children not sorted by minimum variable id".into());
                }
            }
            for c in cs {
                match (t, c) {
                    (ReadOnceTree::Sum(_), ReadOnceTree::Sum(_))
                    | (ReadOnceTree::Product(_), ReadOnceTree::Product(_)) => {
                        return Err("Sum/Product do not alternate".into());
                    }
                    _ => {}
                }
                walk(c)?;
            }
            Ok(())
        }
        walk(self)
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            ReadOnceTree::Leaf(v) => names[v.index()].clone(),
            ReadOnceTree::Sum(cs) => cs
                .iter()
                .map(|c| c.render(names))
                .collect::<Vec<_>>()
                .join(" + "),
            ReadOnceTree::Product(cs) => cs
                .iter()
                .map(|c| match c {
                    ReadOnceTree::Sum(inner) if inner.len() > 1 => {
                        format!("({})", c.render(names))
                    }
                    _ => c.render(names),
                })
                .collect::<Vec<_>>()
                .join("*"),
        }
    }
}

/// Flatten Sum/Sum and Product/Product nesting, collapse single-child
/// internal nodes, and sort children by minimum variable id. Idempotent.
pub fn canonicalize(tree: &ReadOnceTree) -> ReadOnceTree {
    fn canon(t: &ReadOnceTree) -> ReadOnceTree {
        match t {
            ReadOnceTree::Leaf(v) => ReadOnceTree::Leaf(*v),
            ReadOnceTree::Sum(cs) => rebuild(cs, true),
            ReadOnceTree::Product(cs) => rebuild(cs, false),
        }
    }
    fn rebuild(cs: &[ReadOnceTree], sum: bool) -> ReadOnceTree {
        let mut out: Vec<ReadOnceTree> = Vec::new();
        for c in cs {
            let c = canon(c);
            match (&c, sum) {
                (ReadOnceTree::Sum(gc), true) | (ReadOnceTree::Product(gc), false) => {
                    out.extend(gc.iter().cloned())
                }
                _ => out.push(c),
            }
        }
        if out.len() == 1 {
            return out.into_iter().next().unwrap();
        }
        out.sort_by_key(|c| c.min_var());
        if sum {
            ReadOnceTree::Sum(out)
        } else {
            ReadOnceTree::Product(out)
        }
    }
    canon(tree)
}

/// Probability of a read-once tree under independent variables: products
/// multiply, sums complement-multiply. Linear time.
pub fn readonce_probability(tree: &ReadOnceTree, p: &ProbMap) -> Result<f64, Error> {
    p.check_covers(tree.variables().iter())?;
    fn go(t: &ReadOnceTree, p: &ProbMap) -> f64 {
        match t {
            ReadOnceTree::Leaf(v) => p.get(*v),
            ReadOnceTree::Product(cs) => cs.iter().map(|c| go(c, p)).product(),
            ReadOnceTree::Sum(cs) => {
                1.0 - cs.iter().map(|c| 1.0 - go(c, p)).product::<f64>()
            }
        }
    }
    Ok(go(tree, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(i: u32) -> MonotoneExpr {
        MonotoneExpr::var(i)
    }

    fn imp(ids: &[u32]) -> Implicant {
        ids.iter().map(|&i| VariableId(i)).collect()
    }

    /// Example 1's expression: w1v1u1 + w2v2u1 + w3v3u2 + w3v4u3 with
    /// ids w1..w3 = 0..2, v1..v4 = 3..6, u1..u3 = 7..9.
    fn example1_expr() -> MonotoneExpr {
        MonotoneExpr::Or(vec![
            MonotoneExpr::And(vec![v(0), v(3), v(7)]),
            MonotoneExpr::And(vec![v(1), v(4), v(7)]),
            MonotoneExpr::And(vec![v(2), v(5), v(8)]),
            MonotoneExpr::And(vec![v(2), v(6), v(9)]),
        ])
    }

    fn example1_probs() -> ProbMap {
        ProbMap::new(vec![0.3, 0.4, 0.6, 0.1, 0.5, 0.2, 0.1, 0.7, 0.8, 0.4]).unwrap()
    }

    /// The equivalent read-once form (w1v1 + w2v2)u1 + w3(v3u2 + v4u3).
    fn example1_tree() -> ReadOnceTree {
        use ReadOnceTree::*;
        Sum(vec![
            Product(vec![
                Sum(vec![
                    Product(vec![Leaf(VariableId(0)), Leaf(VariableId(3))]),
                    Product(vec![Leaf(VariableId(1)), Leaf(VariableId(4))]),
                ]),
                Leaf(VariableId(7)),
            ]),
            Product(vec![
                Leaf(VariableId(2)),
                Sum(vec![
                    Product(vec![Leaf(VariableId(5)), Leaf(VariableId(8))]),
                    Product(vec![Leaf(VariableId(6)), Leaf(VariableId(9))]),
                ]),
            ]),
        ])
    }

    #[test]
    fn idnf_example1() {
        let idnf = expand_to_idnf(&example1_expr(), DEFAULT_IMPLICANT_CAP).unwrap();
        let expected: BTreeSet<Implicant> = [
            imp(&[0, 3, 7]),
            imp(&[1, 4, 7]),
            imp(&[2, 5, 8]),
            imp(&[2, 6, 9]),
        ]
        .into_iter()
        .collect();
        assert_eq!(idnf.implicants, expected);
        // Absorption is a no-op for provenance expressions of self-join-free
        // queries.
        let raw = expand_distributive(&example1_expr(), DEFAULT_IMPLICANT_CAP).unwrap();
        assert_eq!(raw, expected);
    }

    #[test]
    fn idnf_single_var() {
        let idnf = expand_to_idnf(&v(5), 10).unwrap();
        assert_eq!(idnf.implicants, [imp(&[5])].into_iter().collect());
    }

    #[test]
    fn idnf_absorption() {
        // (x+y)(x+z) = x + yz
        let e = MonotoneExpr::And(vec![
            MonotoneExpr::Or(vec![v(0), v(1)]),
            MonotoneExpr::Or(vec![v(0), v(2)]),
        ]);
        let idnf = expand_to_idnf(&e, 10).unwrap();
        let expected: BTreeSet<Implicant> = [imp(&[0]), imp(&[1, 2])].into_iter().collect();
        assert_eq!(idnf.implicants, expected);
        assert!(equivalent_on_all_assignments(&e, &idnf.to_expr(), 22).unwrap());
    }

    #[test]
    fn idnf_cap_exceeded() {
        // (x0+x1)(x2+x3)...: 2^12 implicants, cap at 100.
        let e = MonotoneExpr::And(
            (0..12)
                .map(|i| MonotoneExpr::Or(vec![v(2 * i), v(2 * i + 1)]))
                .collect(),
        );
        assert!(matches!(
            expand_to_idnf(&e, 100),
            Err(Error::ImplicantCap { .. })
        ));
    }

    #[test]
    fn exact_probability_example1() {
        let p = exact_probability(&example1_expr(), &example1_probs(), DEFAULT_ENUM_CAP).unwrap();
        assert!((p - 0.254746112).abs() < 1e-9, "got {}", p);
    }

    #[test]
    fn exact_probability_trivial() {
        let p = ProbMap::new(vec![0.3]).unwrap();
        assert_eq!(exact_probability(&v(0), &p, 22).unwrap(), 0.3);
        let p = ProbMap::new(vec![0.5, 0.5]).unwrap();
        let e = MonotoneExpr::And(vec![v(0), v(1)]);
        assert!((exact_probability(&e, &p, 22).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn exact_probability_cap() {
        let e = MonotoneExpr::Or((0..30).map(v).collect());
        let p = ProbMap::new(vec![0.5; 30]).unwrap();
        assert!(matches!(
            exact_probability(&e, &p, 22),
            Err(Error::EnumerationCap { vars: 30, cap: 22 })
        ));
    }

    #[test]
    fn readonce_probability_example1() {
        let p = example1_probs();
        let ro = readonce_probability(&example1_tree(), &p).unwrap();
        let exact = exact_probability(&example1_expr(), &p, 22).unwrap();
        assert!((ro - exact).abs() < 1e-9);
        assert!((ro - 0.254746112).abs() < 1e-9);
    }

    #[test]
    fn readonce_probability_trivial() {
        let p = ProbMap::new(vec![0.7, 0.5]).unwrap();
        assert_eq!(
            readonce_probability(&ReadOnceTree::Leaf(VariableId(0)), &p).unwrap(),
            0.7
        );
        let p = ProbMap::new(vec![0.5, 0.5]).unwrap();
        let t = ReadOnceTree::Sum(vec![
            ReadOnceTree::Leaf(VariableId(0)),
            ReadOnceTree::Leaf(VariableId(1)),
        ]);
        assert!((readonce_probability(&t, &p).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn equivalence_oracle() {
        assert!(equivalent_on_all_assignments(
            &example1_expr(),
            &example1_tree().to_expr(),
            22
        )
        .unwrap());
        // idempotence: x == x*x
        let xx = MonotoneExpr::And(vec![v(0), v(0)]);
        assert!(equivalent_on_all_assignments(&v(0), &xx, 22).unwrap());
        let and = MonotoneExpr::And(vec![v(0), v(1)]);
        let or = MonotoneExpr::Or(vec![v(0), v(1)]);
        assert!(!equivalent_on_all_assignments(&and, &or, 22).unwrap());
    }

    #[test]
    fn canonicalize_flattens_and_sorts() {
        use ReadOnceTree::*;
        let t = Sum(vec![
            Sum(vec![Leaf(VariableId(0)), Leaf(VariableId(1))]),
            Leaf(VariableId(2)),
        ]);
        assert_eq!(
            canonicalize(&t),
            Sum(vec![
                Leaf(VariableId(0)),
                Leaf(VariableId(1)),
                Leaf(VariableId(2))
            ])
        );
        let t = Product(vec![Leaf(VariableId(1)), Leaf(VariableId(0))]);
        assert_eq!(
            canonicalize(&t),
            Product(vec![Leaf(VariableId(0)), Leaf(VariableId(1))])
        );
        let e1 = example1_tree();
        assert_eq!(canonicalize(&e1), e1);
        assert!(e1.check_invariants().is_ok());
    }

    #[test]
    fn render_example1() {
        let names: Vec<String> = ["w1", "w2", "w3", "v1", "v2", "v3", "v4", "u1", "u2", "u3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            example1_tree().render(&names),
            "(w1*v1 + w2*v2)*u1 + w3*(v3*u2 + v4*u3)"
        );
    }

    // Random tree / expression generators for property tests.
    fn arb_tree(vars: Vec<u32>) -> ReadOnceTree {
        // deterministic balanced splitter, alternating Sum/Product
        fn build(vars: &[u32], sum: bool) -> ReadOnceTree {
            if vars.len() == 1 {
                return ReadOnceTree::Leaf(VariableId(vars[0]));
            }
            let mid = vars.len() / 2;
            let l = build(&vars[..mid], !sum);
            let r = build(&vars[mid..], !sum);
            if sum {
                ReadOnceTree::Sum(vec![l, r])
            } else {
                ReadOnceTree::Product(vec![l, r])
            }
        }
        build(&vars, true)
    }

    proptest! {
        #[test]
        fn prop_readonce_matches_enumeration(
            n in 1usize..12,
            probs in proptest::collection::vec(0.05f64..0.95, 20),
            sum_root in any::<bool>(),
        ) {
            let vars: Vec<u32> = (0..n as u32).collect();
            let tree = if sum_root {
                arb_tree(vars)
            } else {
                match arb_tree(vars) {
                    ReadOnceTree::Sum(cs) if cs.len() >= 2 => ReadOnceTree::Product(cs),
                    t => t,
                }
            };
            let tree = canonicalize(&tree);
            let p = ProbMap::new(probs[..n].to_vec()).unwrap();
            let ro = readonce_probability(&tree, &p).unwrap();
            let exact = exact_probability(&tree.to_expr(), &p, 22).unwrap();
            prop_assert!((ro - exact).abs() < 1e-9);
        }

        #[test]
        fn prop_canonicalize_idempotent_and_equivalent(n in 1usize..10, seed in any::<u64>()) {
            // pseudo-shuffled variable order to vary child ordering
            let mut vars: Vec<u32> = (0..n as u32).collect();
            let mut s = seed;
            for i in (1..vars.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                vars.swap(i, (s >> 33) as usize % (i + 1));
            }
            let tree = arb_tree(vars);
            let c1 = canonicalize(&tree);
            prop_assert_eq!(&canonicalize(&c1), &c1);
            prop_assert!(c1.check_invariants().is_ok());
            prop_assert!(
                equivalent_on_all_assignments(&tree.to_expr(), &c1.to_expr(), 22).unwrap()
            );
        }

        #[test]
        fn prop_idnf_irredundant(n in 1usize..8, seed in any::<u64>()) {
            // random monotone expression over n vars
            fn gen(s: &mut u64, depth: usize, n: u32) -> MonotoneExpr {
                *s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                let r = (*s >> 33) as u32;
                if depth == 0 || r % 3 == 0 {
                    MonotoneExpr::var(r % n)
                } else {
                    let arity = 2 + (r % 2) as usize;
                    let children = (0..arity).map(|_| gen(s, depth - 1, n)).collect();
                    if r % 2 == 0 {
                        MonotoneExpr::And(children)
                    } else {
                        MonotoneExpr::Or(children)
                    }
                }
            }
            let mut s = seed | 1;
            let e = gen(&mut s, 3, n as u32);
            let idnf = expand_to_idnf(&e, DEFAULT_IMPLICANT_CAP).unwrap();
            // no implicant strictly contained in another, no duplicates (by set)
            for a in &idnf.implicants {
                for b in &idnf.implicants {
                    if a != b {
                        prop_assert!(!is_subset(a, b));
                    }
                }
            }
            prop_assert!(
                equivalent_on_all_assignments(&e, &idnf.to_expr(), 22).unwrap()
            );
        }
    }
}
