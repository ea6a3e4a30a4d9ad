//! `tautring`: batch front end for the strata calculus.
//!
//! Exit status: 0 on success, 1 on user error, 2 on an internal failure.

use std::io::Write;
use std::panic;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use tautring::boundary::{kunneth_report, xi_pullback};
use tautring::covers::{diagonal_witness, enumerate_covers, stabilize_source, validate_cover};
use tautring::expr::{evaluate, resolve_graph, GraphRef, Value};
use tautring::json::{
    class_to_json, covers_to_json, factorwise_to_json, graph_to_json, parse_class, parse_cover,
    parse_graph, GraphJson,
};
use tautring::odd::{self, OddTensor};
use tautring::structures::enumerate_generic_overlaps;
use tautring::{canon, Ambient, Error, StableGraph};

#[derive(Parser)]
#[command(
    name = "tautring",
    version,
    about = "Exact calculus of boundary strata classes on moduli spaces of stable curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Products, pullbacks and pushforwards of tautological classes.
    #[command(subcommand)]
    Strata(StrataCommand),
    /// Stable graph utilities.
    #[command(subcommand)]
    Graphs(GraphsCommand),
    /// The formal odd cohomology computation on M̄_{1,12} × M̄_{1,12}.
    #[command(subcommand)]
    Odd(OddCommand),
    /// Admissible double covers.
    #[command(subcommand)]
    Covers(CoversCommand),
}

#[derive(Args)]
struct ExprArgs {
    /// Ambient space as `g,n`.
    #[arg(long, value_parser = parse_ambient)]
    ambient: Ambient,
    /// Class expression.
    #[arg(long)]
    expr: String,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum StrataCommand {
    /// Evaluates an expression whose value is a class (typically a product).
    Mul(ExprArgs),
    /// Pulls a class back along a gluing map, given either by `--target` or
    /// by a `pullback(graph, expr)` expression.
    Pullback {
        #[command(flatten)]
        args: ExprArgs,
        /// Graph alias, inline JSON or path.
        #[arg(long)]
        target: Option<String>,
    },
    /// Pushes a ψ/κ polynomial on `M̄_{g,n}` forward along the map forgetting
    /// marking `n`.
    PushforwardForget(ExprArgs),
    /// Evaluates an expression, or normalizes a class JSON file given with
    /// `--expr @path`.
    Normalize(ExprArgs),
}

#[derive(Subcommand)]
enum GraphsCommand {
    /// Generic (A,B)-graphs.
    Overlaps {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Ambient,
        a: String,
        b: String,
        #[arg(long)]
        json: bool,
    },
    /// Canonical form and automorphism count.
    Canonical {
        #[arg(long, value_parser = parse_ambient)]
        ambient: Option<Ambient>,
        graph: String,
        #[arg(long)]
        json: bool,
    },
    /// Checks the stable graph conditions.
    Validate {
        graph: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum OddCommand {
    /// Odd⊗odd part of the diagonal.
    Diagonal {
        #[arg(long)]
        json: bool,
    },
    /// Its product with `−ψ_p − ψ_p̃`.
    #[command(alias = "finny")]
    SelfIntersection {
        #[arg(long)]
        json: bool,
    },
    /// Verdict on the odd⊗odd component of the self-intersection.
    Report {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CoversCommand {
    /// All admissible double covers of a target graph.
    Enumerate {
        /// Target graph JSON (inline or path).
        #[arg(long)]
        target: String,
        #[arg(long)]
        b: u32,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Checks a cover JSON file.
    Validate {
        cover: String,
        #[arg(long)]
        json: bool,
    },
    /// The cover joining two genus-h curves through a rational bridge.
    Witness {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        json: bool,
    },
}

fn parse_ambient(s: &str) -> Result<Ambient, String> {
    let (g, n) = s.split_once(',').ok_or("expected g,n")?;
    let g = g.trim().parse().map_err(|_| format!("bad genus {g:?}"))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| format!("bad number of markings {n:?}"))?;
    Ok(Ambient::new(g, n))
}

fn read_source(s: &str) -> Result<String, Error> {
    let t = s.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(s.to_string())
    } else {
        std::fs::read_to_string(s).map_err(|e| Error::Input(format!("cannot read '{s}': {e}")))
    }
}

fn graph_arg(s: &str, ambient: Option<Ambient>) -> Result<StableGraph, Error> {
    match ambient {
        Some(a) => resolve_graph(
            &GraphRef {
                text: s.to_string(),
                pos: 0,
            },
            a,
        ),
        None => {
            let g = parse_graph(&read_source(s)?)?;
            g.genus()?;
            Ok(g)
        }
    }
}

fn pretty(v: &Json) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn odd_json(t: &OddTensor) -> Json {
    let terms: Vec<Json> = t
        .terms()
        .iter()
        .map(|((x, y), c)| json!({"coefficient": c.to_string(), "first": x.to_string(), "second": y.to_string()}))
        .collect();
    json!({ "terms": terms })
}

fn class_value(v: Value, ambient: Ambient) -> Result<tautring::TautClass, Error> {
    v.into_class(ambient)
}

fn run(cli: Cli) -> Result<String, Error> {
    Ok(match cli.command {
        Command::Strata(cmd) => match cmd {
            StrataCommand::Mul(a) => {
                let t = class_value(evaluate(&a.expr, a.ambient)?, a.ambient)?;
                if a.json {
                    class_to_json(&t)
                } else {
                    t.to_string()
                }
            }
            StrataCommand::Pullback { args, target } => {
                let f = match (target, evaluate(&args.expr, args.ambient)?) {
                    (Some(g), v) => {
                        let graph = graph_arg(&g, Some(args.ambient))?;
                        xi_pullback(&graph, &v.into_class(args.ambient)?)?
                    }
                    (None, Value::Factorwise(f)) => f,
                    (None, _) => {
                        return Err(Error::Input(
                            "give --target or an expression of the form pullback(graph, expr)"
                                .to_string(),
                        ))
                    }
                };
                if args.json {
                    factorwise_to_json(&f)
                } else {
                    kunneth_report(&f)
                }
            }
            StrataCommand::PushforwardForget(a) => {
                let t = class_value(evaluate(&a.expr, a.ambient)?, a.ambient)?;
                let p = tautring::boundary::forgetful_pushforward(&t)?;
                if a.json {
                    class_to_json(&p)
                } else {
                    p.to_string()
                }
            }
            StrataCommand::Normalize(a) => {
                let t = match a.expr.strip_prefix('@') {
                    Some(path) => {
                        let t = parse_class(&read_source(path)?)?;
                        if t.ambient() != a.ambient {
                            return Err(Error::AmbientMismatch {
                                expected: a.ambient,
                                found: t.ambient(),
                            });
                        }
                        t
                    }
                    None => class_value(evaluate(&a.expr, a.ambient)?, a.ambient)?,
                };
                if a.json {
                    class_to_json(&t)
                } else {
                    t.to_string()
                }
            }
        },
        Command::Graphs(cmd) => match cmd {
            GraphsCommand::Overlaps {
                ambient,
                a,
                b,
                json,
            } => {
                let ga = graph_arg(&a, Some(ambient))?;
                let gb = graph_arg(&b, Some(ambient))?;
                let overlaps = enumerate_generic_overlaps(&ga, &gb)?;
                if json {
                    let list: Vec<Json> = overlaps
                        .iter()
                        .map(|o| {
                            json!({
                                "graph": GraphJson::from_graph(&o.graph),
                                "a_contracted": o.a_structure.contracted_edges,
                                "b_contracted": o.b_structure.contracted_edges,
                                "shared": o.shared_edges,
                            })
                        })
                        .collect();
                    pretty(&Json::Array(list))
                } else {
                    let mut lines = vec![format!("{} generic overlaps", overlaps.len())];
                    for o in &overlaps {
                        lines.push(format!(
                            "{} | A contracts {:?} | B contracts {:?} | shared {:?}",
                            o.graph,
                            o.a_structure.contracted_edges,
                            o.b_structure.contracted_edges,
                            o.shared_edges
                        ));
                    }
                    lines.join("\n")
                }
            }
            GraphsCommand::Canonical {
                ambient,
                graph,
                json,
            } => {
                let g = graph_arg(&graph, ambient)?;
                let c = canon::canonize(&g, &canon::Colors::blank(&g));
                if json {
                    pretty(
                        &json!({"graph": GraphJson::from_graph(&c.graph), "automorphisms": c.automorphisms}),
                    )
                } else {
                    format!("{}\nautomorphisms: {}", c.graph, c.automorphisms)
                }
            }
            GraphsCommand::Validate { graph, json } => {
                let g = parse_graph(&read_source(&graph)?)?;
                let report = g.validate();
                if json {
                    let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
                    pretty(&json!({"valid": report.is_valid(), "violations": v}))
                } else {
                    report.to_string()
                }
            }
        },
        Command::Odd(cmd) => match cmd {
            OddCommand::Diagonal { json } => {
                let t = odd::diagonal_odd_part();
                if json {
                    pretty(&odd_json(&t))
                } else {
                    t.to_string()
                }
            }
            OddCommand::SelfIntersection { json } => {
                let t = odd::self_intersection_odd();
                if json {
                    pretty(&odd_json(&t))
                } else {
                    t.to_string()
                }
            }
            OddCommand::Report { json } => {
                let r = odd::nontautological_report(&odd::self_intersection_odd());
                if json {
                    let witness = r.witness.as_ref().map(|(c, x, y)| {
                        json!({"coefficient": c.to_string(), "first": x.to_string(), "second": y.to_string()})
                    });
                    pretty(&json!({
                        "verdict": r.verdict.to_string(),
                        "witness": witness,
                        "tensor": odd_json(&r.tensor),
                    }))
                } else {
                    r.to_string()
                }
            }
        },
        Command::Covers(cmd) => match cmd {
            CoversCommand::Enumerate { target, b, k, json } => {
                let t = parse_graph(&read_source(&target)?)?;
                let covers = enumerate_covers(&t, b, k)?;
                if json {
                    covers_to_json(&covers)
                } else {
                    let mut lines = vec![format!("{} covers", covers.len())];
                    for c in &covers {
                        let stable = stabilize_source(c)
                            .map(|g| canon::canonical_graph(&g).to_string())
                            .unwrap_or_else(|e| e.to_string());
                        lines.push(format!(
                            "source {} (genus {}) | vertex map {:?} | edges {:?} | legs {:?} | stabilized {}",
                            c.source,
                            c.source_genus(),
                            c.vertex_map,
                            c.edge_fibers,
                            c.leg_fibers,
                            stable
                        ));
                    }
                    lines.join("\n")
                }
            }
            CoversCommand::Validate { cover, json } => {
                let c = parse_cover(&read_source(&cover)?)?;
                let report = validate_cover(&c);
                if json {
                    let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
                    pretty(&json!({"valid": report.is_valid(), "violations": v}))
                } else {
                    report.to_string()
                }
            }
            CoversCommand::Witness { h, json } => {
                let w = diagonal_witness(h)?;
                if json {
                    covers_to_json(std::slice::from_ref(&w))
                } else {
                    let st = stabilize_source(&w)?;
                    format!(
                        "target {}\nsource {}\nvalidation: {}\nstabilized {}",
                        w.target,
                        w.source,
                        validate_cover(&w),
                        graph_to_json(&canon::canonical_graph(&st))
                    )
                }
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(out)) => {
            // A closed pipe downstream is not a failure of ours.
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => ExitCode::from(2),
    }
}
