//! Command-line front end.
//!
//! Exit codes: 0 sat, 1 unsat, 2 unknown, 3 out of fragment; 64 usage or
//! parse error, 65 malformed witness, 66 I/O error, 69 resource limit.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sltl::automaton::{Automaton, AutomatonError, DEFAULT_MAX_STATES};
use sltl::semantics::{SearchBounds, DEFAULT_NODE_LIMIT};
use sltl::solver::{check_witness_json, solve, SolveOptions, Verdict, WitnessError};
use sltl::syntax::{classify, parse, Formula, Fragment};
use sltl::translate::{
    build_phi_d, gen_counter, gen_phi_c, psl_to_s5, sltl_to_ptls5, t1, until_to_strict, Partition,
};

const USAGE: u8 = 64;
const DATA: u8 = 65;
const IO: u8 = 66;
const RESOURCE: u8 = 69;

#[derive(Parser)]
#[command(name = "sltl", version, about = "Standpoint LTL satisfiability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability and optionally emit a witness.
    Solve {
        /// Formula text, or `-` for stdin.
        formula: Option<String>,
        #[arg(long, conflicts_with = "formula")]
        file: Option<String>,
        /// Exit 3 on full SLTL inputs instead of running the bounded oracle.
        #[arg(long)]
        fragment_strict: bool,
        /// Oracle bounds: traces,prefix,period.
        #[arg(long, value_parser = parse_bounds, default_value = "3,2,3")]
        bounds: (usize, usize, usize),
        #[arg(long)]
        json: bool,
        #[arg(long)]
        witness_out: Option<String>,
        /// Write the explored automaton graph of each tried partition.
        #[arg(long)]
        dump_automaton: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, env = "SLTL_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        #[arg(long, env = "SLTL_NODE_LIMIT", default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
    },
    /// Print the image of a formula under a reduction.
    Translate {
        #[arg(long)]
        to: Target,
        formula: String,
    },
    /// Print a generated formula.
    Gen { kind: GenKind, n: usize },
    /// Check a witness file against a formula at its designated trace.
    Check { formula: String, witness: String },
    /// Print the fragment of a formula.
    Classify { formula: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Ptls5,
    Sltl,
    S5,
    StrictUntil,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Counter,
    PhiC,
}

fn parse_bounds(text: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [k, p, q] = parts.as_slice() else {
        return Err("expected K,P,Q".into());
    };
    let num = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"));
    Ok((num(k)?, num(p)?, num(q)?))
}

fn read_source(arg: &str) -> Result<String, ExitCode> {
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| {
            eprintln!("error: reading stdin: {e}");
            ExitCode::from(IO)
        })?;
        Ok(text)
    } else {
        Ok(arg.to_string())
    }
}

fn read_file(path: &str) -> Result<String, ExitCode> {
    if path == "-" {
        return read_source(path);
    }
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {path}: {e}");
        ExitCode::from(IO)
    })
}

fn formula(text: &str) -> Result<Formula, ExitCode> {
    parse(text).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(USAGE)
    })
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Solve {
            formula: text,
            file,
            fragment_strict,
            bounds,
            json,
            witness_out,
            dump_automaton,
            jobs,
            max_states,
            node_limit,
        } => {
            let source = match (text, file) {
                (Some(t), None) => read_source(&t)?,
                (None, Some(path)) => read_file(&path)?,
                _ => {
                    eprintln!("error: give a formula or --file");
                    return Err(ExitCode::from(USAGE));
                }
            };
            let f = formula(&source)?;
            let opts = SolveOptions {
                bounds: SearchBounds::new(bounds.0, bounds.1, bounds.2).with_node_limit(node_limit),
                fragment_strict,
                jobs: jobs.max(1),
                max_states,
            };
            let verdict = solve(&f, &opts).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(if e.is_resource_limit() {
                    RESOURCE
                } else {
                    DATA
                })
            })?;
            if json {
                println!("{}", verdict.to_json());
            } else {
                print_human(&verdict);
            }
            if let (
                Some(path),
                Verdict::Sat {
                    model, designated, ..
                },
            ) = (witness_out, &verdict)
            {
                let text = serde_json::to_string_pretty(&model.to_witness(designated))
                    .expect("witness serializes");
                std::fs::write(&path, text + "\n").map_err(|e| {
                    eprintln!("error: {path}: {e}");
                    ExitCode::from(IO)
                })?;
            }
            if let Some(path) = dump_automaton {
                let text = automaton_dump(&f, max_states).map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(RESOURCE)
                })?;
                std::fs::write(&path, text).map_err(|e| {
                    eprintln!("error: {path}: {e}");
                    ExitCode::from(IO)
                })?;
            }
            Ok(ExitCode::from(match verdict {
                Verdict::Sat { .. } => 0,
                Verdict::Unsat(_) => 1,
                Verdict::Unknown { .. } => 2,
                Verdict::OutOfFragment(_) => 3,
            }))
        }
        Command::Translate { to, formula: text } => {
            let f = formula(&read_source(&text)?)?;
            let out = match to {
                Target::Ptls5 => Ok(sltl_to_ptls5(&f)),
                Target::Sltl => t1(&f),
                Target::S5 => psl_to_s5(&f),
                Target::StrictUntil => Ok(until_to_strict(&f)),
            };
            match out {
                Ok(g) => {
                    println!("{g}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Err(ExitCode::from(3))
                }
            }
        }
        Command::Gen { kind, n } => {
            let out = match kind {
                GenKind::Counter => gen_counter(n),
                GenKind::PhiC => gen_phi_c(n),
            };
            match out {
                Ok(g) => {
                    println!("{g}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Err(ExitCode::from(USAGE))
                }
            }
        }
        Command::Check {
            formula: text,
            witness,
        } => {
            let f = formula(&read_source(&text)?)?;
            let body = read_file(&witness)?;
            match check_witness_json(&f, &body) {
                Ok(true) => {
                    println!("ok");
                    Ok(ExitCode::SUCCESS)
                }
                Ok(false) => {
                    println!("fails");
                    Ok(ExitCode::from(1))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    if matches!(e, WitnessError::Json(_)) {
                        eprintln!(
                            "expected {{\"prefix_len\",\"period_len\",\"traces\",\"lambda\",\"designated\"}}"
                        );
                    }
                    Err(ExitCode::from(DATA))
                }
            }
        }
        Command::Classify { formula: text } => {
            let f = formula(&read_source(&text)?)?;
            println!("{}", classify(&f));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Explored state graphs, one section per partition, up to the first
/// non-empty automaton. Empty for inputs outside the automaton fragments.
fn automaton_dump(f: &Formula, max_states: usize) -> Result<String, AutomatonError> {
    let mut out = String::new();
    if !matches!(classify(f), Fragment::PureLtl | Fragment::LtlPsl) {
        return Ok(out);
    }
    for d in Partition::all(f) {
        let phi_d = build_phi_d(f, &d).expect("partition of the formula's own atoms");
        let (found, dump) = Automaton::new(&phi_d).find_accepting_lasso_with_dump(max_states)?;
        out.push_str(&format!("# partition {d}\n{dump}"));
        if found.is_some() {
            break;
        }
    }
    Ok(out)
}

fn print_human(v: &Verdict) {
    match v {
        Verdict::Sat {
            model,
            designated,
            engine,
            partition,
        } => {
            println!("sat ({})", engine.as_str());
            if let Some(d) = partition {
                println!("partition {d}");
            }
            let shape = model.shape();
            println!(
                "witness: {} traces, prefix {}, period {}, designated {designated}",
                model.traces().len(),
                shape.prefix_len,
                shape.period_len
            );
        }
        Verdict::Unsat(engine) => println!("unsat ({})", engine.as_str()),
        Verdict::Unknown {
            bounds,
            translation,
        } => {
            println!(
                "unknown: no model within {} traces, prefix {}, period {}",
                bounds.max_traces, bounds.max_prefix, bounds.max_period
            );
            println!("ptls5: {translation}");
        }
        Verdict::OutOfFragment(details) => println!("out of fragment: {details}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    run(cli).unwrap_or_else(|code| code)
}
