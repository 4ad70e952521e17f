//! Deciding satisfiability of equations, systems and positive existential
//! formulas over `Q` and `Q+`.

pub mod formula;
pub mod oracle;
pub mod qplus;
pub mod search;
pub mod verdict;
pub mod witness;

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::models::{eval_at_infinity, ExtNat, Variant};
use crate::term::{Equation, Term};
use crate::Budget;

pub use formula::{Conjunct, PositiveFormula};
pub use oracle::{gen_manders_adleman, ma_nat_solvable, nat_oracle, nat_oracle_formula};
pub use qplus::{sol_qplus, SolStats};
pub use search::{enumerate_witnesses, search_witness, search_witness_with, SearchMode, SearchOutcome, SearchStats};
pub use verdict::{verify_certificate, Certificate, Exhaustion, Instance, Stats, Status, Verdict, WitnessCertificate};
pub use witness::{
    build_model_valuation, check_witness, extract_reduced_descs, extract_reduced_system, label_image,
    labelled_variables, Site, Witness, WitnessError, WitnessReport, WitnessViolation,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("search exceeded the budget of {limit} nodes")]
    SearchBudget { limit: u64 },
    #[error("disjunctive normal form exceeds {limit} conjuncts")]
    DnfBudget { limit: usize },
    #[error("brute-force search exceeds {limit} assignments")]
    OracleBudget { limit: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    /// A certificate failed its own re-check. This indicates a bug.
    #[error("internal error: certificate failed verification")]
    Unverified,
}

/// Outcome of evaluating both sides of an equation with every variable `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    /// Both sides are `∞`, so the black-hole model satisfies the equation.
    TriviallySat,
    /// Both sides are numerals; the theory proves them equal or distinct.
    Decided(bool),
    /// One side is `∞` and the other the numeral `n`: satisfiability of the
    /// equation is that of `t = n`, with `t` the infinite side.
    Reduced(Term, BigUint),
}

pub fn blackhole_reduce(eq: &Equation, variant: Variant) -> Reduction {
    match (eval_at_infinity(&eq.lhs, variant), eval_at_infinity(&eq.rhs, variant)) {
        (ExtNat::Infinity, ExtNat::Infinity) => Reduction::TriviallySat,
        (ExtNat::Fin(a), ExtNat::Fin(b)) => Reduction::Decided(a == b),
        (ExtNat::Infinity, ExtNat::Fin(n)) => Reduction::Reduced(eq.lhs.clone(), n),
        (ExtNat::Fin(n), ExtNat::Infinity) => Reduction::Reduced(eq.rhs.clone(), n),
    }
}

enum ConjunctResult {
    Sat(verdict::Certificate, Stats),
    Unsat { refuted: bool, stats: Stats, space: Option<BigUint> },
}

/// Drops atoms that hold in every model and reports `None` if some atom is
/// refuted outright. Both are read off the all-`∞` valuation: an atom whose
/// left side is finite there is decided by the theory.
fn prepare(atoms: &[(Term, BigUint)], variant: Variant) -> Option<Vec<(Term, BigUint)>> {
    let mut out = Vec::new();
    for (t, n) in atoms {
        match eval_at_infinity(t, variant) {
            ExtNat::Fin(m) if &m == n => {}
            ExtNat::Fin(_) => return None,
            ExtNat::Infinity => out.push((t.clone(), n.clone())),
        }
    }
    Some(out)
}

fn decide_conjunct(atoms: &[(Term, BigUint)], theory: Variant, budget: &Budget) -> Result<ConjunctResult, DecideError> {
    let Some(system) = prepare(atoms, theory) else {
        let stats = Stats { conjuncts: 1, ..Stats::default() };
        return Ok(ConjunctResult::Unsat { refuted: true, stats, space: None });
    };
    match theory {
        Variant::Q => {
            let outcome = search_witness(&system, budget)?;
            let stats =
                Stats { search_nodes: outcome.stats.nodes, conjuncts: 1, occurrences: outcome.stats.occurrences };
            Ok(match outcome.witness {
                Some(w) => ConjunctResult::Sat(Certificate::Witness(WitnessCertificate::new(w)?), stats),
                None => {
                    let space = (outcome.stats.label_bound + 2u32).pow(outcome.stats.occurrences as u32);
                    ConjunctResult::Unsat { refuted: false, stats, space: Some(space) }
                }
            })
        }
        Variant::QPlus => {
            let (assignment, sol) = sol_qplus(&system, budget)?;
            let occurrences = system.iter().map(|(t, _)| t.size()).sum();
            let stats = Stats { search_nodes: sol.nodes, conjuncts: 1, occurrences };
            Ok(match assignment {
                Some(a) => ConjunctResult::Sat(Certificate::Nat(a), stats),
                None => ConjunctResult::Unsat { refuted: false, stats, space: None },
            })
        }
    }
}

fn checked(verdict: Verdict, instance: Instance<'_>, budget: &Budget) -> Result<Verdict, DecideError> {
    if verdict.is_sat() && !verify_certificate(&verdict, instance, budget) {
        return Err(DecideError::Unverified);
    }
    Ok(verdict)
}

/// Decides whether `eq` is satisfiable in some model of the theory.
pub fn decide_equation(eq: &Equation, theory: Variant, budget: &Budget) -> Result<Verdict, DecideError> {
    let sat = |certificate, stats| Verdict { status: Status::Sat, theory, certificate, stats };
    let verdict = match blackhole_reduce(eq, theory) {
        Reduction::TriviallySat => sat(Certificate::Infinity, Stats::default()),
        Reduction::Decided(true) => {
            let zeros: BTreeMap<_, _> = eq.vars().into_iter().map(|v| (v, BigUint::default())).collect();
            sat(Certificate::Nat(zeros), Stats::default())
        }
        Reduction::Decided(false) => Verdict {
            status: Status::Unsat,
            theory,
            certificate: Certificate::Exhaustion(Exhaustion {
                conjuncts: 1,
                refuted_by_constants: 1,
                ..Exhaustion::default()
            }),
            stats: Stats { conjuncts: 1, ..Stats::default() },
        },
        Reduction::Reduced(t, n) => match decide_conjunct(&[(t, n)], theory, budget)? {
            ConjunctResult::Sat(certificate, stats) => sat(certificate, stats),
            ConjunctResult::Unsat { refuted, stats, space } => Verdict {
                status: Status::Unsat,
                theory,
                certificate: Certificate::Exhaustion(Exhaustion {
                    conjuncts: 1,
                    refuted_by_constants: refuted as usize,
                    search_nodes: stats.search_nodes,
                    labelling_space: space,
                }),
                stats,
            },
        },
    };
    checked(verdict, Instance::Equation(eq), budget)
}

/// [`decide_equation`] over `Q` with the default budget.
pub fn decide_q(eq: &Equation) -> Result<Verdict, DecideError> {
    decide_equation(eq, Variant::Q, &Budget::default())
}

/// [`decide_equation`] over `Q+` with the default budget.
pub fn decide_qplus(eq: &Equation) -> Result<Verdict, DecideError> {
    decide_equation(eq, Variant::QPlus, &Budget::default())
}

/// Decides a system of equations `t_j = n_j` (a conjunction).
pub fn decide_system(system: &[(Term, BigUint)], theory: Variant, budget: &Budget) -> Result<Verdict, DecideError> {
    let formula = PositiveFormula::And(system.iter().map(|(t, n)| PositiveFormula::Atom(t.clone(), n.clone())).collect());
    let verdict = decide_formula_inner(&formula, theory, budget)?;
    checked(verdict, Instance::System(system), budget)
}

/// Decides a positive existential formula: true at the all-`∞` valuation,
/// or else some conjunct of its disjunctive normal form is satisfiable.
pub fn decide_positive_existential(
    f: &PositiveFormula,
    theory: Variant,
    budget: &Budget,
) -> Result<Verdict, DecideError> {
    let verdict = decide_formula_inner(f, theory, budget)?;
    checked(verdict, Instance::Formula(f), budget)
}

fn decide_formula_inner(f: &PositiveFormula, theory: Variant, budget: &Budget) -> Result<Verdict, DecideError> {
    if f.eval_at_infinity(theory) {
        return Ok(Verdict { status: Status::Sat, theory, certificate: Certificate::Infinity, stats: Stats::default() });
    }
    let conjuncts = f.dnf(budget.dnf_conjuncts)?;
    let mut total = Stats::default();
    let mut exhaustion = Exhaustion::default();
    for c in &conjuncts {
        match decide_conjunct(c, theory, budget)? {
            ConjunctResult::Sat(certificate, stats) => {
                total.search_nodes += stats.search_nodes;
                total.conjuncts += 1;
                total.occurrences += stats.occurrences;
                return Ok(Verdict { status: Status::Sat, theory, certificate, stats: total });
            }
            ConjunctResult::Unsat { refuted, stats, space } => {
                total.search_nodes += stats.search_nodes;
                total.conjuncts += 1;
                total.occurrences += stats.occurrences;
                exhaustion.conjuncts += 1;
                exhaustion.refuted_by_constants += refuted as usize;
                exhaustion.search_nodes += stats.search_nodes;
                if let Some(space) = space {
                    *exhaustion.labelling_space.get_or_insert_with(BigUint::default) += space;
                }
            }
        }
    }
    Ok(Verdict { status: Status::Unsat, theory, certificate: Certificate::Exhaustion(exhaustion), stats: total })
}
