//! `dioq`: decide Diophantine equations over Robinson arithmetic.
//!
//! Exit status: 0 for SAT or success, 1 for UNSAT or a negative answer
//! (unequal descriptors, no oracle solution, invalid witness), 2 for errors
//! including exhausted budgets.

mod commands;
mod text;

use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dioq::models::Variant;
use dioq::Budget;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::Value;

use commands::{CliError, Context, Record, Status};

#[derive(Parser)]
#[command(name = "dioq", version)]
#[command(about = "Certifying decision procedures for Diophantine equations over Robinson arithmetic")]
struct Cli {
    /// Theory whose models are searched
    #[arg(long, global = true, value_enum, default_value_t = Theory::Q)]
    theory: Theory,

    /// Output format; batch mode always writes JSON lines
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Read one input per line (plain text or {"input": ...}) and write one
    /// JSON record per line, in order; `-` reads standard input
    #[arg(long, global = true, value_name = "FILE")]
    batch: Option<PathBuf>,

    #[command(flatten)]
    budgets: BudgetArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theory {
    Q,
    Qplus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Args)]
struct BudgetArgs {
    /// Rewrite steps per normalization
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_rewrite: Option<u64>,

    /// Nodes in a materialized term
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_terms: Option<u64>,

    /// Nodes when expanding a descriptor
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_expand: Option<u64>,

    /// Witness-search nodes
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_search: Option<u64>,

    /// Conjuncts in a disjunctive normal form
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_dnf: Option<u64>,

    /// Assignments tried by the brute-force oracle
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_oracle: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let d = Budget::default();
        Budget {
            rewrite_steps: self.budget_rewrite.unwrap_or(d.rewrite_steps),
            term_nodes: self.budget_terms.unwrap_or(d.term_nodes),
            expand_nodes: self.budget_expand.unwrap_or(d.expand_nodes),
            search_nodes: self.budget_search.unwrap_or(d.search_nodes),
            dnf_conjuncts: self.budget_dnf.map_or(d.dnf_conjuncts, |n| usize::try_from(n).unwrap_or(usize::MAX)),
            oracle_assignments: self.budget_oracle.unwrap_or(d.oracle_assignments),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide an equation `t = u` or a positive formula of atoms `t = #n`
    /// joined by `&` and `|`
    Decide {
        input: Option<String>,
        /// Read the equation or formula from a file
        #[arg(long, conflicts_with = "input")]
        file: Option<PathBuf>,
    },
    /// Print the reduced form of a term and its minimal descriptor
    Normalize { term: Option<String> },
    /// Descriptor operations
    #[command(subcommand)]
    Descriptor(DescriptorCommand),
    /// Brute-force oracles
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Instance generators
    #[command(subcommand)]
    Gen(GenCommand),
    /// Witness files
    #[command(subcommand)]
    Witness(WitnessCommand),
}

#[derive(Subcommand)]
enum DescriptorCommand {
    /// Minimize a descriptor
    Min { descriptor: Option<String> },
    /// Whether two descriptors denote the same term
    Eq { first: String, second: String },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Search for a solution over the naturals with every variable at most BOUND
    Nat {
        input: Option<String>,
        #[arg(long, default_value_t = 10)]
        bound: u64,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// The equation x*x + A*y = B
    Ma {
        #[arg(value_parser = parse_nat)]
        a: BigUint,
        #[arg(value_parser = parse_nat)]
        b: BigUint,
        /// Also report whether the equation has a solution over the naturals
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Check a witness file and print what it certifies
    Check { file: PathBuf },
}

fn parse_nat(s: &str) -> Result<BigUint, String> {
    s.parse().map_err(|_| format!("not a natural number: {s}"))
}

/// Runs `command` on one input; `input` overrides the positional argument
/// (batch mode).
fn run(command: &Command, ctx: &Context, input: Option<&str>) -> Result<Record, CliError> {
    let need = |given: &Option<String>| -> Result<String, CliError> {
        input
            .map(str::to_string)
            .or_else(|| given.clone())
            .ok_or_else(|| CliError::Usage("missing input".into()))
    };
    let no_batch = |what: &str| match input {
        Some(_) => Err(CliError::Usage(format!("{what} does not take batch input"))),
        None => Ok(()),
    };
    match command {
        Command::Decide { input: given, file } => {
            let text = match (input, file) {
                (None, Some(path)) => commands::read_file(path)?,
                _ => need(given)?,
            };
            commands::decide(ctx, text.trim())
        }
        Command::Normalize { term } => commands::normalize(ctx, need(term)?.trim()),
        Command::Descriptor(DescriptorCommand::Min { descriptor }) => commands::descriptor_min(need(descriptor)?.trim()),
        Command::Descriptor(DescriptorCommand::Eq { first, second }) => {
            no_batch("descriptor eq")?;
            commands::descriptor_eq(first, second)
        }
        Command::Oracle(OracleCommand::Nat { input: given, bound }) => {
            commands::oracle_nat(ctx, need(given)?.trim(), *bound)
        }
        Command::Gen(GenCommand::Ma { a, b, check }) => {
            no_batch("gen ma")?;
            commands::gen_ma(a, b, *check)
        }
        Command::Witness(WitnessCommand::Check { file }) => {
            no_batch("witness check")?;
            commands::witness_check(file)
        }
    }
}

/// A batch line: the input itself, or a JSON object with an `input` string.
fn batch_input(line: &str) -> Result<String, CliError> {
    let line = line.trim();
    if !line.starts_with('{') {
        return Ok(line.to_string());
    }
    let value: Value = serde_json::from_str(line).map_err(|e| CliError::Usage(format!("batch record: {e}")))?;
    value
        .get("input")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| CliError::Usage("batch record has no string field \"input\"".into()))
}

fn run_batch(cli: &Cli, ctx: &Context, source: &PathBuf) -> Result<Status, CliError> {
    let text = if source.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
        s
    } else {
        commands::read_file(source)?
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let records: Vec<Record> = lines
        .par_iter()
        .map(|line| {
            batch_input(line)
                .and_then(|input| run(&cli.command, ctx, Some(&input)))
                .unwrap_or_else(|e| Record::error(&e))
        })
        .collect();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut worst = Status::Success;
    for r in &records {
        worst = worst.max(r.status);
        writeln!(out, "{}", r.json).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    }
    out.flush().map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(worst)
}

fn emit(record: &Record, output: Output) {
    match output {
        Output::Json => println!("{}", record.json),
        Output::Text if record.status == Status::Error => eprintln!("{}", record.text),
        Output::Text => println!("{}", record.text),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let theory = match cli.theory {
        Theory::Q => Variant::Q,
        Theory::Qplus => Variant::QPlus,
    };
    let ctx = Context { theory, budget: cli.budgets.budget() };
    let status = match &cli.batch {
        Some(source) => run_batch(&cli, &ctx, source).unwrap_or_else(|e| {
            emit(&Record::error(&e), cli.output);
            Status::Error
        }),
        None => {
            let record = run(&cli.command, &ctx, None).unwrap_or_else(|e| Record::error(&e));
            emit(&record, cli.output);
            record.status
        }
    };
    ExitCode::from(status as u8)
}
