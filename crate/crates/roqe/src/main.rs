use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roqe::cotable::{comp_cotable, cooccurrence_from_idnf, has_induced_p4, CoMode};
use roqe::expr::{
    equivalent_on_all_assignments, exact_probability, expand_to_idnf, DEFAULT_ENUM_CAP,
    DEFAULT_IMPLICANT_CAP,
};
use roqe::gen::{generate, GenSpec};
use roqe::pdb::{load_instance, save_instance};
use roqe::pipeline::{evaluate_instance, Outcome};
use roqe::provenance::{default_plan, eval_plan, parse_plan, read_expression};
use roqe::query::{parse_query, table_adjacency};
use roqe::readonce::{comp_ro, RoOutcome};
use roqe::Error;

#[derive(Parser)]
#[command(
    name = "roqe",
    about = "Read-once query evaluation for tuple-independent probabilistic databases",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Directory of <relation>.tsv files.
    #[arg(long)]
    instance: PathBuf,
    /// File holding one rule, e.g. "Q() :- R(x), S(x,y), T(y)."
    #[arg(long)]
    query: PathBuf,
    /// Optional plan file in s-expression syntax.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphMode {
    Cotable,
    Cooccurrence,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query: read-once form and exact probability.
    /// Exits 0 on success or an empty result, 2 when not read-once.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emit the co-table or co-occurrence graph.
    Cotable {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "cotable")]
        mode: GraphMode,
        #[arg(long, value_enum, default_value = "edges")]
        format: GraphFormat,
    },
    /// Cross-check the fast paths against the definitional oracles;
    /// exits nonzero on any mismatch.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Variable-count cap for the enumeration checks.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Write a generated instance directory plus query.txt.
    Gen {
        /// Family: example1 | appendixa:N | crossproduct:N | star:K,ROWS
        /// | chain:N | random:K,ARITY,ROWS,DOMAIN,SEED
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: PathBuf,
        /// Uniform probability override where the family defaults to 0.5.
        #[arg(long)]
        prob: Option<f64>,
    },
    /// Exact probability of the chain formula x1x2 + ... + xn x(n+1).
    Chain {
        #[arg(long)]
        n: usize,
        /// Comma-separated list of n+1 probabilities, or uniform:<v>.
        #[arg(long, default_value = "uniform:0.5")]
        p: String,
    },
    /// Print the size statistics of an evaluation as JSON.
    Stats {
        #[command(flatten)]
        input: InputArgs,
    },
}

fn enum_cap(cli_cap: Option<usize>) -> usize {
    cli_cap
        .or_else(|| {
            std::env::var("ROQE_ENUM_CAP")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_ENUM_CAP)
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Syntax(_) => "syntax",
        Error::Parse(_) => "parse",
        Error::Domain(_) => "domain",
        Error::DuplicateTuple(_) => "duplicate-tuple",
        Error::SelfJoin(_) => "self-join",
        Error::HeadVariable(_) => "head-variable",
        Error::EnumerationCap { .. } => "enumeration-cap",
        Error::ImplicantCap { .. } => "implicant-cap",
        Error::Io(_) => "io",
    }
}

fn load_inputs(
    input: &InputArgs,
) -> Result<
    (
        roqe::query::Query,
        roqe::pdb::Instance,
        Option<roqe::provenance::Plan>,
    ),
    Error,
> {
    let query_text = std::fs::read_to_string(&input.query)?;
    let q = parse_query(query_text.trim())?;
    let inst = load_instance(&input.instance)?;
    let plan = match &input.plan {
        Some(path) => Some(parse_plan(&std::fs::read_to_string(path)?)?),
        None => None,
    };
    Ok((q, inst, plan))
}

fn run() -> Result<ExitCode, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval { input, format } => {
            let (q, inst, plan) = load_inputs(&input)?;
            let report = evaluate_instance(&q, &inst, plan)?.report;
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => {
                    println!("read_once: {}", report.read_once());
                    if let Some(e) = &report.expression {
                        println!("expression: {}", e);
                    }
                    if let Some(p) = report.probability {
                        println!("probability: {}", p);
                    }
                    if let Some(w) = &report.p4_witness {
                        println!("p4_witness: {} {} {} {}", w[0], w[1], w[2], w[3]);
                    }
                }
            }
            Ok(if report.outcome == Outcome::NotReadOnce {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Cotable {
            input,
            mode,
            format,
        } => {
            let (q, inst, plan) = load_inputs(&input)?;
            let gt = table_adjacency(&q);
            let plan = plan.unwrap_or_else(|| default_plan(&q));
            let (_, dag) = eval_plan(&plan, &q, &inst)?;
            let dag = match dag {
                Some(d) => d,
                None => return Ok(ExitCode::SUCCESS), // empty result: no graph
            };
            let mode = match mode {
                GraphMode::Cotable => CoMode::CoTable,
                GraphMode::Cooccurrence => CoMode::CoOccurrence,
            };
            let g = comp_cotable(&dag, &gt, &inst, mode);
            let names = inst.var_names();
            match format {
                GraphFormat::Edges => {
                    for (x, y) in g.edges() {
                        println!("{}\t{}", names[x.index()], names[y.index()]);
                    }
                }
                GraphFormat::Json => {
                    let adj: std::collections::BTreeMap<String, Vec<String>> = g
                        .adj
                        .iter()
                        .map(|(v, nbrs)| {
                            (
                                names[v.index()].clone(),
                                nbrs.iter().map(|n| names[n.index()].clone()).collect(),
                            )
                        })
                        .collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!(adj))
                            .expect("graph serializes")
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { input, cap } => {
            let cap = enum_cap(cap);
            let (q, inst, plan) = load_inputs(&input)?;
            Ok(run_oracle(&q, &inst, plan, cap)?)
        }
        Command::Gen { family, out, prob } => {
            let spec = parse_family(&family, prob)?;
            let (inst, q) = generate(&spec)?;
            save_instance(&inst, &out)?;
            std::fs::write(out.join("query.txt"), format!("{}\n", q))?;
            println!("wrote {} tuples to {}", inst.n(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Chain { n, p } => {
            let probs = parse_chain_probs(n, &p)?;
            println!("{}", roqe::chain::chain_probability(&probs)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { input } => {
            let (q, inst, plan) = load_inputs(&input)?;
            let report = evaluate_instance(&q, &inst, plan)?.report;
            let s = report.stats;
            let v = serde_json::json!({
                "n": s.n,
                "k": s.k,
                "m_H": s.m_h,
                "beta_H": s.beta_h,
                "m_co": s.m_co,
                "m_C": s.m_c,
                "m_T": s.m_t,
                "depth": s.depth,
                "row_decomps": s.row_decomps,
                "table_decomps": s.table_decomps,
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_family(family: &str, prob: Option<f64>) -> Result<GenSpec, Error> {
    let (name, args) = match family.split_once(':') {
        Some((n, a)) => (n, a),
        None => (family, ""),
    };
    let nums = || -> Result<Vec<u64>, Error> {
        args.split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad family parameter {:?}", s)))
            })
            .collect()
    };
    match name {
        "example1" => Ok(GenSpec::Example1),
        "appendixa" => {
            let v = nums()?;
            if v.len() != 1 {
                return Err(Error::Parse("appendixa takes one parameter".into()));
            }
            Ok(GenSpec::AppendixA {
                n: v[0] as usize,
                prob: prob.unwrap_or(0.5),
            })
        }
        "crossproduct" => {
            let v = nums()?;
            if v.len() != 1 {
                return Err(Error::Parse("crossproduct takes one parameter".into()));
            }
            Ok(GenSpec::CrossProduct(v[0] as usize))
        }
        "star" => {
            let v = nums()?;
            if v.len() != 2 {
                return Err(Error::Parse("star takes K,ROWS".into()));
            }
            Ok(GenSpec::Star {
                k: v[0] as usize,
                rows: v[1] as usize,
            })
        }
        "chain" => {
            let v = nums()?;
            if v.len() != 1 {
                return Err(Error::Parse("chain takes one parameter".into()));
            }
            Ok(GenSpec::Chain(v[0] as usize))
        }
        "random" => {
            let v = nums()?;
            if v.len() != 5 {
                return Err(Error::Parse(
                    "random takes K,ARITY,ROWS,DOMAIN,SEED".into(),
                ));
            }
            Ok(GenSpec::Random {
                k: v[0] as usize,
                arity: v[1] as usize,
                rows: v[2] as usize,
                domain: v[3] as usize,
                seed: v[4],
            })
        }
        other => Err(Error::Parse(format!("unknown family {:?}", other))),
    }
}

fn parse_chain_probs(n: usize, p: &str) -> Result<Vec<f64>, Error> {
    if let Some(v) = p.strip_prefix("uniform:") {
        let x: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("bad probability {:?}", v)))?;
        Ok(vec![x; n + 1])
    } else {
        let probs: Vec<f64> = p
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad probability {:?}", s)))
            })
            .collect::<Result<_, _>>()?;
        if probs.len() != n + 1 {
            return Err(Error::Parse(format!(
                "chain of length {} needs {} probabilities, got {}",
                n,
                n + 1,
                probs.len()
            )));
        }
        Ok(probs)
    }
}

/// Run the definitional cross-checks; print one line per check.
fn run_oracle(
    q: &roqe::query::Query,
    inst: &roqe::pdb::Instance,
    plan: Option<roqe::provenance::Plan>,
    cap: usize,
) -> Result<ExitCode, Error> {
    let gt = table_adjacency(q);
    let plan = plan.unwrap_or_else(|| default_plan(q));
    let (_, dag) = eval_plan(&plan, q, inst)?;
    let dag = match dag {
        Some(d) => d,
        None => {
            println!("ok: empty result, nothing to cross-check");
            return Ok(ExitCode::SUCCESS);
        }
    };
    let expr = read_expression(&dag);
    let mut failed = false;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", if ok { "ok" } else { "MISMATCH" }, name);
        failed |= !ok;
    };

    let idnf = expand_to_idnf(&expr, DEFAULT_IMPLICANT_CAP)?;
    let gco = comp_cotable(&dag, &gt, inst, CoMode::CoOccurrence);
    let oracle_gco = cooccurrence_from_idnf(&idnf);
    check(
        "co-occurrence graph equals prime-implicant definition",
        gco.edges() == oracle_gco.edges(),
    );

    let gc = comp_cotable(&dag, &gt, inst, CoMode::CoTable);
    let mut rel_of = std::collections::BTreeMap::new();
    for rel in &inst.relations {
        for row in &rel.rows {
            rel_of.insert(row.var, rel.name.clone());
        }
    }
    let filtered: BTreeSet<_> = gco
        .edges()
        .into_iter()
        .filter(|(x, y)| gt.adjacent(&rel_of[x], &rel_of[y]))
        .collect();
    check(
        "co-table graph is the adjacency-filtered co-occurrence graph",
        gc.edges() == filtered,
    );

    let live = dag.leaves().into_iter().collect();
    let pruned = inst.restrict(&live);
    let ro = comp_ro(q, &pruned, &gc, &gt);
    let p4 = has_induced_p4(&gco);
    check(
        "read-once decision agrees with the induced-path oracle",
        matches!(ro.outcome, RoOutcome::Success(_)) == !p4,
    );

    if let RoOutcome::Success(tree) = &ro.outcome {
        let vars = tree.variables();
        let distinct: BTreeSet<_> = vars.iter().collect();
        check("every variable occurs exactly once", distinct.len() == vars.len());
        if vars.len() <= cap {
            check(
                "read-once form is assignment-equivalent to the lineage",
                equivalent_on_all_assignments(&tree.to_expr(), &expr, cap)?,
            );
            let probs = inst.prob_map();
            let fast = roqe::expr::readonce_probability(tree, &probs)?;
            let exact = exact_probability(&expr, &probs, cap)?;
            check(
                "factorized probability matches enumeration",
                (fast - exact).abs() < 1e-9,
            );
        } else {
            println!("skip: enumeration checks ({} variables over cap {})", vars.len(), cap);
        }
    }

    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {}", error_code(&e), e);
            ExitCode::from(1)
        }
    }
}
