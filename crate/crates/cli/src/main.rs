//! `doxa`: parse, check, solve and convert belief models from the command line.
//!
//! Exit codes: 0 true/SAT/success, 1 false/UNSAT, 2 error, 3 resource limit
//! or inconclusive answer.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use doxa::awareness::{
    awareness_to_quasi_ndm, parse_lga, quasi_ndm_to_awareness, translate, LgaFormula,
};
use doxa::io::{self as dio, AnyModel};
use doxa::mab::{eval_mab, is_cmab};
use doxa::ndm::{cmab_to_ndm, filtrate, ndm_to_cmab, quasi_to_ndm, DoxasticModel, QuasiNdm};
use doxa::solver::axioms::check_axiom_schemas;
use doxa::solver::backend::{BackendRegistry, DEFAULT_BACKEND};
use doxa::solver::{SolverConfig, SolverError, DEFAULT_MAX_WORLDS, DEFAULT_NODE_BUDGET};
use doxa::syntax::{parse_formula_with, subformulas, Formula, ParseOptions};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "doxa",
    version,
    about = "Explicit and implicit belief reasoning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a formula.
    Parse {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Read the awareness language (B, A, X) instead.
        #[arg(long)]
        lga: bool,
    },
    /// Evaluate a formula on a model file.
    Mc {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        formula: FormulaArgs,
        /// World or state to evaluate at (default: the first one).
        #[arg(long)]
        world: Option<String>,
    },
    /// Decide satisfiability and print a result document.
    Sat {
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Decide validity; the model in the result document is a countermodel.
    Valid {
        #[command(flatten)]
        formula: FormulaArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the translation into the awareness language.
    Translate {
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Filtrate a quasi-NDM through the subformulas of a formula.
    Filtrate {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Convert a model file to another format.
    Convert {
        #[command(flatten)]
        model: ModelArg,
        /// Target format.
        #[arg(long, value_enum)]
        to: Target,
        /// World to root the belief-base view at (NDM input only).
        #[arg(long)]
        world: Option<String>,
        /// Add fresh atoms so the resulting NDM satisfies C1 exactly
        /// (awareness input only).
        #[arg(long)]
        exact: bool,
    },
    /// Check the axiom schemas on random instances.
    Axioms {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula text.
    #[arg(short = 'f', long = "formula", conflicts_with = "input")]
    formula: Option<String>,
    /// File holding the formula (`-` for stdin).
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
    /// Number of agents (default: highest agent index in the formula).
    #[arg(long)]
    agents: Option<u32>,
    /// Output file (`-` or absent for stdout).
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArg {
    /// Model file in JSON (`-` for stdin).
    #[arg(short = 'm', long = "model")]
    model: PathBuf,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = DEFAULT_BACKEND)]
    backend: String,
    /// Tableau node budget.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: usize,
    /// World bound for the bounded backend.
    #[arg(long, default_value_t = DEFAULT_MAX_WORLDS)]
    max_worlds: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Ndm,
    Mab,
    Awareness,
}

fn read_source(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_out(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        _ => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").context("writing stdout")
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

impl FormulaArgs {
    fn text(&self) -> Result<String> {
        match (&self.formula, &self.input) {
            (Some(f), _) => Ok(f.clone()),
            (None, Some(p)) => Ok(read_source(p)?.trim().to_string()),
            (None, None) => bail!("give a formula with -f or a file with -i"),
        }
    }

    /// Parses with `--agents` if given, else with as many agents as the
    /// formula mentions.
    fn formula(&self, fallback_agents: Option<u32>) -> Result<(Formula, u32)> {
        let text = self.text()?;
        let n = self.agents.or(fallback_agents);
        let f = parse_formula_with(&text, ParseOptions::user(n.unwrap_or(u32::MAX)))?;
        let n = n.unwrap_or(f.max_agent()).max(1);
        Ok((f, n))
    }

    fn lga(&self, fallback_agents: Option<u32>) -> Result<(LgaFormula, u32)> {
        let text = self.text()?;
        let n = self.agents.or(fallback_agents);
        let g = parse_lga(&text, ParseOptions::user(n.unwrap_or(u32::MAX)))?;
        let n = n.unwrap_or(g.max_agent()).max(1);
        Ok((g, n))
    }
}

fn load_model(arg: &ModelArg) -> Result<AnyModel> {
    Ok(dio::model_from_str(&read_source(&arg.model)?)?)
}

fn world_index(m: &DoxasticModel, world: Option<&str>) -> Result<usize> {
    world.map_or(Ok(0), |w| Ok(m.world_index(w)?))
}

fn truth(b: bool) -> u8 {
    if b {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse { formula, lga } => {
            let text = if lga {
                formula.lga(None)?.0.to_string()
            } else {
                formula.formula(None)?.0.to_string()
            };
            write_out(formula.output.as_ref(), &text)?;
            Ok(EXIT_TRUE)
        }
        Command::Mc {
            model,
            formula,
            world,
        } => {
            let model = load_model(&model)?;
            let n = model.n_agents();
            let value = match &model {
                AnyModel::Mab(m) => {
                    if world.is_some() {
                        bail!("--world applies to NDM and awareness models only");
                    }
                    eval_mab(m, &formula.formula(Some(n))?.0)
                }
                AnyModel::Ndm(m) => m.eval(
                    world_index(m, world.as_deref())?,
                    &formula.formula(Some(n))?.0,
                ),
                AnyModel::Awareness(m) => {
                    let s = world.as_deref().map_or(Ok(0), |s| m.state_index(s))?;
                    m.eval(s, &formula.lga(Some(n))?.0)
                }
            };
            write_out(formula.output.as_ref(), &value.to_string())?;
            Ok(truth(value))
        }
        Command::Sat { formula, solver } => solve(&formula, &solver, false),
        Command::Valid { formula, solver } => solve(&formula, &solver, true),
        Command::Translate { formula } => {
            let (f, _) = formula.formula(None)?;
            write_out(formula.output.as_ref(), &translate(&f).to_string())?;
            Ok(EXIT_TRUE)
        }
        Command::Filtrate { model, formula } => {
            let AnyModel::Ndm(m) = load_model(&model)? else {
                bail!("filtrate needs an NDM model file");
            };
            let (f, _) = formula.formula(Some(m.n_agents()))?;
            let quasi = QuasiNdm::new(m.clone())?;
            let r = filtrate(&quasi, &subformulas(&f))?;
            write_out(
                formula.output.as_ref(),
                &pretty(&dio::filtration_to_value(&m, &r)),
            )?;
            Ok(EXIT_TRUE)
        }
        Command::Convert {
            model,
            to,
            world,
            exact,
        } => {
            let out = match (load_model(&model)?, to) {
                (AnyModel::Mab(m), Target::Ndm) => {
                    if !is_cmab(&m) {
                        bail!("model is not a consistent belief-base model");
                    }
                    let (ndm, root) = cmab_to_ndm(&m)?;
                    json!({"model": dio::ndm_to_value(&ndm), "root": ndm.world_name(root)})
                }
                (AnyModel::Ndm(m), Target::Mab) => {
                    dio::mab_to_value(&ndm_to_cmab(&m, world_index(&m, world.as_deref())?)?)
                }
                (AnyModel::Ndm(m), Target::Awareness) => {
                    dio::awareness_to_value(&quasi_ndm_to_awareness(&m)?)
                }
                (AnyModel::Awareness(m), Target::Ndm) => {
                    let q = awareness_to_quasi_ndm(&m)?;
                    if exact {
                        dio::ndm_to_value(&quasi_to_ndm(&q, &Formula::top()))
                    } else {
                        dio::ndm_to_value(&q)
                    }
                }
                (m, _) => bail!(
                    "unsupported conversion from {}; supported: mab to ndm, ndm to mab, \
                     ndm to awareness, awareness to ndm",
                    m.kind()
                ),
            };
            write_out(None, &pretty(&out))?;
            Ok(EXIT_TRUE)
        }
        Command::Axioms {
            depth,
            trials,
            seed,
            budget,
        } => {
            if depth == 0 || trials == 0 {
                bail!("--depth and --trials must be positive");
            }
            let cfg = SolverConfig {
                node_budget: budget,
                ..SolverConfig::default()
            };
            let report = check_axiom_schemas(depth, trials, seed, &cfg);
            for (schema, n) in &report.checked {
                println!("{schema}: {n} instances");
            }
            for fail in &report.failures {
                let detail = match (&fail.countermodel, &fail.error) {
                    (Some(v), _) => pretty(&dio::views_to_value(v)),
                    (None, Some(e)) => e.to_string(),
                    (None, None) => String::new(),
                };
                println!("FAILED {} {}\n{detail}", fail.schema, fail.instance);
            }
            println!(
                "{} of {} instances valid",
                report.total() - report.failures.len().min(report.total()),
                report.total()
            );
            Ok(truth(report.passed()))
        }
    }
}

fn solve(formula: &FormulaArgs, args: &SolverArgs, validity: bool) -> Result<u8> {
    let registry = BackendRegistry::default();
    let backend = registry.get(&args.backend).ok_or_else(|| {
        anyhow!(
            "unknown backend `{}`; available: {}",
            args.backend,
            registry.names().join(", ")
        )
    })?;
    let (f, n) = formula.formula(None)?;
    let cfg = SolverConfig {
        node_budget: args.budget,
        max_worlds: args.max_worlds.max(1),
        n_agents: n,
    };
    let query = if validity { Formula::not(f) } else { f };
    let res = backend.check(&query, &cfg);
    if let Err(SolverError::SelfCheck(msg)) = &res {
        bail!("internal error: {msg}");
    }
    let mut doc = dio::result_to_value(&res);
    doc["backend"] = json!(backend.name());
    let code = match &res {
        Ok(r) if validity => {
            doc["valid"] = json!(!r.is_sat());
            truth(!r.is_sat())
        }
        Ok(r) => truth(r.is_sat()),
        Err(_) => EXIT_LIMIT,
    };
    write_out(formula.output.as_ref(), &pretty(&doc))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_TRUE
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
