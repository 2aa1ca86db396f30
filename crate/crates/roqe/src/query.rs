//! Rule-form boolean conjunctive queries and the table-adjacency graph.
//!
//! Grammar: `Q() :- Atom ("," Atom)* "."` with `Atom := Ident "(" Term
//! ("," Term)* ")"`. Unquoted identifiers are first-order variables;
//! single-quoted strings and bare numerals are constants. Relation names
//! must be pairwise distinct (no self-joins).

use std::collections::{BTreeMap, BTreeSet};

use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Term {
    FoVariable(String),
    Constant(String),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgoal {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Subgoal {
    /// Distinct FO variables of the subgoal, sorted.
    pub fn fo_vars(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = self
            .terms
            .iter()
            .filter_map(|t| match t {
                Term::FoVariable(v) => Some(v.as_str()),
                Term::Constant(_) => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Query {
    pub subgoals: Vec<Subgoal>,
}

impl Query {
    /// Subgoal count.
    pub fn k(&self) -> usize {
        self.subgoals.len()
    }

    /// Maximum subgoal arity.
    pub fn max_arity(&self) -> usize {
        self.subgoals.iter().map(|s| s.terms.len()).max().unwrap_or(0)
    }

    pub fn subgoal(&self, relation: &str) -> Option<&Subgoal> {
        self.subgoals.iter().find(|s| s.relation == relation)
    }
}

impl std::fmt::Display for Query {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Q() :- ")?;
        for (i, sg) in self.subgoals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}(", sg.relation)?;
            for (j, t) in sg.terms.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                match t {
                    Term::FoVariable(v) => write!(f, "{}", v)?,
                    Term::Constant(c) => write!(f, "'{}'", c)?,
                }
            }
            write!(f, ")")?;
        }
        write!(f, ".")
    }
}

/// Graph on relation names: edge iff two subgoals share an FO variable,
/// annotated with the exact shared set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TableAdjacencyGraph {
    pub vertices: Vec<String>,
    /// Keyed by (min, max) relation-name pair; value = shared FO variables.
    pub edges: BTreeMap<(String, String), BTreeSet<String>>,
}

impl TableAdjacencyGraph {
    pub fn m_t(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacent(&self, a: &str, b: &str) -> bool {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        self.edges.contains_key(&key)
    }

    /// Connected components over a chosen edge subset, as sorted vertex
    /// groups in first-vertex order.
    pub fn components_with(
        &self,
        use_edge: impl Fn(&str, &str) -> bool,
    ) -> Vec<Vec<String>> {
        components(&self.vertices, |a, b| {
            self.adjacent(a, b) && use_edge(a, b)
        })
    }

    pub fn components(&self) -> Vec<Vec<String>> {
        self.components_with(|_, _| true)
    }
}

fn components(vertices: &[String], adj: impl Fn(&str, &str) -> bool) -> Vec<Vec<String>> {
    let mut comp: Vec<Option<usize>> = vec![None; vertices.len()];
    let mut out: Vec<Vec<String>> = Vec::new();
    for start in 0..vertices.len() {
        if comp[start].is_some() {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start];
        comp[start] = Some(id);
        let mut group = Vec::new();
        while let Some(u) = stack.pop() {
            group.push(vertices[u].clone());
            for v in 0..vertices.len() {
                if comp[v].is_none() && adj(&vertices[u], &vertices[v]) {
                    comp[v] = Some(id);
                    stack.push(v);
                }
            }
        }
        group.sort();
        out.push(group);
    }
    out
}

struct Lexer<'a> {
    input: &'a str,
    pos: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Token {
    Ident(String),
    Number(String),
    Quoted(String),
    Punct(char),
    End,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer { input, pos: 0 }
    }

    fn next_token(&mut self) -> Result<Token, Error> {
        let bytes = self.input.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(Token::End);
        }
        let c = bytes[self.pos] as char;
        match c {
            '(' | ')' | ',' | '.' => {
                self.pos += 1;
                Ok(Token::Punct(c))
            }
            ':' => {
                if self.input[self.pos..].starts_with(":-") {
                    self.pos += 2;
                    Ok(Token::Punct('D')) // the ":-" definition arrow
                } else {
                    Err(Error::Syntax(format!("stray ':' at byte {}", self.pos)))
                }
            }
            '\'' => {
                let start = self.pos + 1;
                let rest = &self.input[start..];
                let end = rest
                    .find('\'')
                    .ok_or_else(|| Error::Syntax("unterminated quoted constant".into()))?;
                self.pos = start + end + 1;
                Ok(Token::Quoted(rest[..end].to_string()))
            }
            _ if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                Ok(Token::Number(self.input[start..self.pos].to_string()))
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < bytes.len() {
                    let ch = bytes[self.pos] as char;
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Ok(Token::Ident(self.input[start..self.pos].to_string()))
            }
            _ => Err(Error::Syntax(format!(
                "unexpected character {:?} at byte {}",
                c, self.pos
            ))),
        }
    }
}

/// Parse a single boolean rule. The head must be `Q()` (empty); repeated
/// relation names are rejected.
pub fn parse_query(text: &str) -> Result<Query, Error> {
    let mut lx = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let t = lx.next_token()?;
        let end = t == Token::End;
        tokens.push(t);
        if end {
            break;
        }
    }
    let mut i = 0;
    let expect = |tokens: &[Token], i: &mut usize, want: Token| -> Result<(), Error> {
        if tokens.get(*i) == Some(&want) {
            *i += 1;
            Ok(())
        } else {
            Err(Error::Syntax(format!(
                "expected {:?}, found {:?}",
                want,
                tokens.get(*i)
            )))
        }
    };
    // head
    match tokens.get(i) {
        Some(Token::Ident(_)) => i += 1,
        other => return Err(Error::Syntax(format!("expected head name, found {:?}", other))),
    }
    expect(&tokens, &mut i, Token::Punct('('))?;
    if let Some(Token::Ident(v)) = tokens.get(i) {
        return Err(Error::HeadVariable(v.clone()));
    }
    expect(&tokens, &mut i, Token::Punct(')'))?;
    expect(&tokens, &mut i, Token::Punct('D'))?;
    // body
    let mut subgoals = Vec::new();
    loop {
        let relation = match tokens.get(i) {
            Some(Token::Ident(name)) => name.clone(),
            other => {
                return Err(Error::Syntax(format!(
                    "expected relation name, found {:?}",
                    other
                )))
            }
        };
        i += 1;
        expect(&tokens, &mut i, Token::Punct('('))?;
        let mut terms = Vec::new();
        loop {
            let term = match tokens.get(i) {
                Some(Token::Ident(v)) => Term::FoVariable(v.clone()),
                Some(Token::Quoted(c)) => Term::Constant(c.clone()),
                Some(Token::Number(c)) => Term::Constant(c.clone()),
                other => {
                    return Err(Error::Syntax(format!("expected term, found {:?}", other)))
                }
            };
            terms.push(term);
            i += 1;
            match tokens.get(i) {
                Some(Token::Punct(',')) => i += 1,
                Some(Token::Punct(')')) => {
                    i += 1;
                    break;
                }
                other => {
                    return Err(Error::Syntax(format!(
                        "expected ',' or ')', found {:?}",
                        other
                    )))
                }
            }
        }
        subgoals.push(Subgoal { relation, terms });
        match tokens.get(i) {
            Some(Token::Punct(',')) => i += 1,
            Some(Token::Punct('.')) => {
                i += 1;
                break;
            }
            other => {
                return Err(Error::Syntax(format!(
                    "expected ',' or '.', found {:?}",
                    other
                )))
            }
        }
    }
    if tokens.get(i) != Some(&Token::End) {
        return Err(Error::Syntax(format!(
            "trailing input after '.': {:?}",
            tokens.get(i)
        )));
    }
    let mut seen = BTreeSet::new();
    for sg in &subgoals {
        if !seen.insert(sg.relation.clone()) {
            return Err(Error::SelfJoin(sg.relation.clone()));
        }
    }
    Ok(Query { subgoals })
}

/// Compute the table-adjacency graph by sort-and-merge of each subgoal's
/// variable list over all subgoal pairs.
pub fn table_adjacency(q: &Query) -> TableAdjacencyGraph {
    let vertices: Vec<String> = q.subgoals.iter().map(|s| s.relation.clone()).collect();
    let var_lists: Vec<Vec<&str>> = q.subgoals.iter().map(|s| s.fo_vars()).collect();
    let mut edges = BTreeMap::new();
    for i in 0..q.subgoals.len() {
        for j in i + 1..q.subgoals.len() {
            let mut shared = BTreeSet::new();
            let (mut a, mut b) = (0, 0);
            while a < var_lists[i].len() && b < var_lists[j].len() {
                match var_lists[i][a].cmp(var_lists[j][b]) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        shared.insert(var_lists[i][a].to_string());
                        a += 1;
                        b += 1;
                    }
                }
            }
            if !shared.is_empty() {
                let (u, v) = if vertices[i] <= vertices[j] {
                    (vertices[i].clone(), vertices[j].clone())
                } else {
                    (vertices[j].clone(), vertices[i].clone())
                };
                edges.insert((u, v), shared);
            }
        }
    }
    TableAdjacencyGraph { vertices, edges }
}
