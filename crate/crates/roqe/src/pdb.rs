//! Tuple-independent probabilistic instances and TSV ingestion.
//!
//! Each tuple carries a boolean tuple variable and a probability in `(0, 1]`.
//! Variable ids are dense in `[0, n)` across the whole instance, assigned in
//! load order.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::expr::{ProbMap, VariableId};
use crate::Error;

#[derive(Clone, PartialEq, Debug)]
pub struct TupleRow {
    pub values: Vec<String>,
    pub var: VariableId,
    /// Display name of the tuple variable, e.g. `w1` or `S:3`.
    pub name: String,
    pub prob: f64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Relation {
    pub name: String,
    pub attributes: Vec<String>,
    pub rows: Vec<TupleRow>,
}

impl Relation {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }
}

/// An instance owns the variable id space: ids in `[0, var_space)` were
/// allocated at construction. `restrict` drops rows but keeps ids stable.
#[derive(Clone, PartialEq, Debug)]
pub struct Instance {
    pub relations: Vec<Relation>,
    var_space: u32,
}

impl Instance {
    /// Total tuple count over all relations.
    pub fn n(&self) -> usize {
        self.relations.iter().map(|r| r.rows.len()).sum()
    }

    /// Size of the variable id space allocated at construction.
    pub fn var_space(&self) -> usize {
        self.var_space as usize
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Display names indexed by variable id. Ids dropped by `restrict`
    /// keep their original names.
    pub fn var_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.var_space as usize];
        for rel in &self.relations {
            for row in &rel.rows {
                names[row.var.index()] = row.name.clone();
            }
        }
        names
    }

    /// Probabilities indexed by variable id; ids without a surviving row
    /// get 1.0 (they are never evaluated).
    pub fn prob_map(&self) -> ProbMap {
        let mut probs = vec![1.0; self.var_space as usize];
        for rel in &self.relations {
            for row in &rel.rows {
                probs[row.var.index()] = row.prob;
            }
        }
        ProbMap::new(probs).expect("row probabilities validated at construction")
    }

    pub fn all_vars(&self) -> BTreeSet<VariableId> {
        self.relations
            .iter()
            .flat_map(|r| r.rows.iter().map(|t| t.var))
            .collect()
    }

    /// Keep only rows whose variable is in `keep`. Empty relations are
    /// preserved; variable ids are unchanged.
    pub fn restrict(&self, keep: &BTreeSet<VariableId>) -> Instance {
        Instance {
            relations: self
                .relations
                .iter()
                .map(|rel| Relation {
                    name: rel.name.clone(),
                    attributes: rel.attributes.clone(),
                    rows: rel
                        .rows
                        .iter()
                        .filter(|row| keep.contains(&row.var))
                        .cloned()
                        .collect(),
                })
                .collect(),
            var_space: self.var_space,
        }
    }
}

/// Incremental construction with id assignment and invariant checks.
pub struct InstanceBuilder {
    relations: Vec<Relation>,
    next_var: u32,
}

impl InstanceBuilder {
    pub fn new() -> Self {
        InstanceBuilder {
            relations: Vec::new(),
            next_var: 0,
        }
    }

    pub fn relation(&mut self, name: &str, attributes: &[&str]) -> Result<(), Error> {
        if self.relations.iter().any(|r| r.name == name) {
            return Err(Error::Parse(format!("duplicate relation name {}", name)));
        }
        let mut seen = BTreeSet::new();
        for a in attributes {
            if !seen.insert(*a) {
                return Err(Error::Parse(format!(
                    "duplicate attribute {} in relation {}",
                    a, name
                )));
            }
        }
        self.relations.push(Relation {
            name: name.to_string(),
            attributes: attributes.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        });
        Ok(())
    }

    /// Add a row; `name` defaults to `<relation>:<row-index>`. Duplicate
    /// value vectors within a relation are rejected (set semantics).
    pub fn row(
        &mut self,
        relation: &str,
        values: &[&str],
        name: Option<&str>,
        prob: f64,
    ) -> Result<VariableId, Error> {
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(Error::Domain(format!(
                "probability {} outside (0,1] in relation {}",
                prob, relation
            )));
        }
        let rel = self
            .relations
            .iter_mut()
            .find(|r| r.name == relation)
            .ok_or_else(|| Error::Parse(format!("unknown relation {}", relation)))?;
        if values.len() != rel.attributes.len() {
            return Err(Error::Parse(format!(
                "row arity {} does not match relation {} arity {}",
                values.len(),
                relation,
                rel.attributes.len()
            )));
        }
        if rel.rows.iter().any(|r| r.values == values) {
            return Err(Error::DuplicateTuple(format!(
                "{}({})",
                relation,
                values.join(", ")
            )));
        }
        let var = VariableId(self.next_var);
        self.next_var += 1;
        let name = name
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("{}:{}", relation, rel.rows.len()));
        rel.rows.push(TupleRow {
            values: values.iter().map(|s| s.to_string()).collect(),
            var,
            name,
            prob,
        });
        Ok(var)
    }

    pub fn finish(self) -> Instance {
        Instance {
            relations: self.relations,
            var_space: self.next_var,
        }
    }
}

impl Default for InstanceBuilder {
    fn default() -> Self {
        Self::new()
    }
}

/// Load an instance from a directory of `<relation>.tsv` files, one per
/// relation, in sorted filename order.
///
/// Header line: tab-separated attribute names, optionally ending `_var`,
/// mandatorily ending `_p`. Data lines: values, optional variable name,
/// probability as a decimal literal. UTF-8, LF line endings.
pub fn load_instance(dir: &Path) -> Result<Instance, Error> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "tsv").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Parse(format!(
            "no .tsv relation files in {}",
            dir.display()
        )));
    }
    let mut builder = InstanceBuilder::new();
    for path in files {
        let rel_name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Parse(format!("bad file name {}", path.display())))?
            .to_string();
        let text = fs::read_to_string(&path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("{}: empty file", rel_name)))?;
        let cols: Vec<&str> = header.split('\t').collect();
        if cols.last() != Some(&"_p") {
            return Err(Error::Parse(format!(
                "{}: header must end with _p",
                rel_name
            )));
        }
        let has_var = cols.len() >= 2 && cols[cols.len() - 2] == "_var";
        let attr_count = cols.len() - 1 - has_var as usize;
        builder.relation(&rel_name, &cols[..attr_count])?;
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse(format!(
                    "{} line {}: expected {} fields, found {}",
                    rel_name,
                    lineno + 2,
                    cols.len(),
                    fields.len()
                )));
            }
            let prob: f64 = fields[fields.len() - 1].parse().map_err(|_| {
                Error::Parse(format!(
                    "{} line {}: bad probability {:?}",
                    rel_name,
                    lineno + 2,
                    fields[fields.len() - 1]
                ))
            })?;
            let name = if has_var {
                Some(fields[fields.len() - 2])
            } else {
                None
            };
            builder.row(&rel_name, &fields[..attr_count], name, prob)?;
        }
    }
    Ok(builder.finish())
}

/// Write an instance as one `<relation>.tsv` per relation, with explicit
/// `_var` names so a reload reproduces the same display names.
pub fn save_instance(inst: &Instance, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir)?;
    for rel in &inst.relations {
        let mut out = String::new();
        for a in &rel.attributes {
            out.push_str(a);
            out.push('\t');
        }
        out.push_str("_var\t_p\n");
        for row in &rel.rows {
            for v in &row.values {
                out.push_str(v);
                out.push('\t');
            }
            out.push_str(&row.name);
            out.push('\t');
            out.push_str(&format!("{}", row.prob));
            out.push('\n');
        }
        fs::write(dir.join(format!("{}.tsv", rel.name)), out)?;
    }
    Ok(())
}
