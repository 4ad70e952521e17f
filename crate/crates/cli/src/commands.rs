//! One function per command. Each produces a [`Record`]: the JSON value, the
//! text form and the exit status.

use std::fs;
use std::path::Path;

use dioq::decide::{
    check_witness, decide_equation, decide_positive_existential, gen_manders_adleman, ma_nat_solvable, nat_oracle,
    nat_oracle_formula, DecideError, PositiveFormula, WitnessCertificate,
};
use dioq::descriptor::{desc_equal, desc_of_reduced, expanded_size, minimize, parse_descriptor_with};
use dioq::interchange::{assignment_json, error_to_json, nat_to_json, verdict_to_json, witness_from_json, InterchangeError};
use dioq::models::Variant;
use dioq::parse::{parse_equation_with, parse_formula_with, parse_term_with};
use dioq::rewrite::{rtn_normalize_within, ReducedSystem, RewriteError};
use dioq::{Budget, Equation, ParseError, VarTable};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::text;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("witness file: {0}")]
    Interchange(#[from] InterchangeError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Exit status classes: success, a negative answer, or an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Success = 0,
    Negative = 1,
    Error = 2,
}

pub struct Record {
    pub json: Value,
    pub text: String,
    pub status: Status,
}

impl Record {
    fn new(json: Value, text: String, positive: bool) -> Record {
        let status = if positive { Status::Success } else { Status::Negative };
        Record { json, text, status }
    }

    pub fn error(e: &CliError) -> Record {
        let message = e.to_string();
        Record { json: error_to_json(&message), text: format!("error: {message}"), status: Status::Error }
    }
}

pub struct Context {
    pub theory: Variant,
    pub budget: Budget,
}

pub enum Problem {
    Equation(Equation),
    Formula(PositiveFormula),
}

/// An equation `t = u`, or a formula if the text uses `&` or `|`.
pub fn parse_problem(text: &str, names: &mut VarTable) -> Result<Problem, ParseError> {
    if text.contains(['&', '|']) {
        parse_formula_with(text, names).map(Problem::Formula)
    } else {
        parse_equation_with(text, names).map(Problem::Equation)
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn decide(ctx: &Context, input: &str) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let verdict = match parse_problem(input, &mut names)? {
        Problem::Equation(eq) => decide_equation(&eq, ctx.theory, &ctx.budget)?,
        Problem::Formula(f) => decide_positive_existential(&f, ctx.theory, &ctx.budget)?,
    };
    let json = verdict_to_json(&verdict, &names, &ctx.budget);
    let text = text::verdict(&verdict, &names, &ctx.budget);
    Ok(Record::new(json, text, verdict.is_sat()))
}

pub fn normalize(ctx: &Context, input: &str) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let t = parse_term_with(input, &mut names)?;
    let d = desc_of_reduced(&t);
    let size = expanded_size(&d);
    let term = if size <= BigUint::from(ctx.budget.expand_nodes) {
        match rtn_normalize_within(&t, &ReducedSystem::empty(), &ctx.budget) {
            Ok(nf) => Some(nf),
            Err(RewriteError::StepBudget { .. } | RewriteError::NodeBudget { .. }) => None,
        }
    } else {
        None
    };
    let term_text = term.as_ref().map(|nf| nf.render(&names).to_string());
    let descriptor = d.render(&names).to_string();
    let json = json!({
        "command": "normalize",
        "input": input,
        "term": term_text,
        "descriptor": descriptor,
        "term_size": nat_to_json(&size),
    });
    let term_line = match &term_text {
        Some(s) => format!("term: {s}"),
        None => format!("term: not written out ({size} nodes, over the budget)"),
    };
    Ok(Record::new(json, format!("{term_line}\ndescriptor: {descriptor}"), true))
}

pub fn descriptor_min(input: &str) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let d = parse_descriptor_with(input, &mut names)?;
    let minimal = minimize(&d).render(&names).to_string();
    let json = json!({ "command": "descriptor-min", "input": input, "minimal": minimal });
    Ok(Record::new(json, minimal, true))
}

pub fn descriptor_eq(first: &str, second: &str) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let a = parse_descriptor_with(first, &mut names)?;
    let b = parse_descriptor_with(second, &mut names)?;
    let equal = desc_equal(&a, &b);
    let json = json!({ "command": "descriptor-eq", "inputs": [first, second], "equal": equal });
    let text = if equal { "equal" } else { "not equal" };
    Ok(Record::new(json, text.to_string(), equal))
}

pub fn oracle_nat(ctx: &Context, input: &str, bound: u64) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let solution = match parse_problem(input, &mut names)? {
        Problem::Equation(eq) => nat_oracle(&eq, bound, &ctx.budget)?,
        Problem::Formula(f) => nat_oracle_formula(&f, bound, &ctx.budget)?,
    };
    let json = json!({
        "command": "oracle-nat",
        "bound": bound,
        "solution": solution.as_ref().map(|a| assignment_json(a, &names)),
    });
    let text = match &solution {
        Some(a) => format!("solution: {}", text::assignment(a, &names)),
        None => format!("no solution with every variable at most {bound}"),
    };
    Ok(Record::new(json, text, solution.is_some()))
}

pub fn gen_ma(a: &BigUint, b: &BigUint, check: bool) -> Result<Record, CliError> {
    let eq = gen_manders_adleman(a, b)?;
    let equation = eq.render(&VarTable::conventional()).to_string();
    let mut json = json!({ "command": "gen-ma", "equation": equation });
    let mut text = equation;
    if check {
        let solvable = ma_nat_solvable(a, b)?;
        json["nat_solvable"] = Value::from(solvable);
        text.push_str(if solvable { "\nsolvable over N: yes" } else { "\nsolvable over N: no" });
    }
    Ok(Record::new(json, text, true))
}

pub fn witness_check(path: &Path) -> Result<Record, CliError> {
    let mut names = VarTable::new();
    let w = witness_from_json(&read_file(path)?, &mut names)?;
    let report = check_witness(&w);
    let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    let mut json = json!({ "command": "witness-check", "valid": report.is_valid(), "violations": violations });
    let text = if report.is_valid() {
        let cert = WitnessCertificate::new(w)?;
        let system: Vec<Value> = cert
            .reduced_system
            .iter()
            .map(|(c, k)| json!({ "descriptor": c.render(&names).to_string(), "value": nat_to_json(k) }))
            .collect();
        json["assignment"] = assignment_json(&cert.assignment, &names);
        json["reduced_system"] = Value::Array(system);
        format!("valid witness\n{}", text::certificate_details(&cert, &names))
    } else {
        let mut out = String::from("not a witness:");
        for v in &violations {
            out.push_str("\n  ");
            out.push_str(v);
        }
        out
    };
    Ok(Record::new(json, text, report.is_valid()))
}
