//! Verdicts, certificates and their independent re-checking.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::Serialize;

use crate::descriptor::{expand_within, reduced_pair_in, Descriptor};
use crate::rewrite::ReducedSystem;
use crate::models::{eval_at_infinity, standard_eval, ExtNat, ModelError, ReducedModel, Variant};
use crate::term::{unum_within, Equation, Term, VarId};
use crate::Budget;

use super::formula::PositiveFormula;
use super::witness::{check_witness, extract_reduced_descs, labelled_variables, Witness};
use super::{blackhole_reduce, Reduction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
        })
    }
}

/// A witness together with what it determines: the reduced system of the
/// products it labels despite a 0 factor, and the labels of its variables.
/// Unlabelled variables denote themselves in the reduced-term model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCertificate {
    pub witness: Witness,
    /// Equations `0 * c = k`, with `c` as a minimal descriptor.
    pub reduced_system: Vec<(Descriptor, BigUint)>,
    pub assignment: BTreeMap<VarId, BigUint>,
}

impl WitnessCertificate {
    pub fn new(witness: Witness) -> Result<WitnessCertificate, super::DecideError> {
        let reduced_system = extract_reduced_descs(&witness)?;
        let assignment = labelled_variables(&witness);
        Ok(WitnessCertificate { witness, reduced_system, assignment })
    }
}

/// Record of an exhausted search, attached to UNSAT verdicts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exhaustion {
    /// Conjuncts examined (1 for a single equation).
    pub conjuncts: usize,
    /// Conjuncts refuted outright because an atom evaluates to a different
    /// numeral when every variable is `∞`.
    pub refuted_by_constants: usize,
    /// Search nodes spent on the remaining conjuncts.
    pub search_nodes: u64,
    /// Number of partial labellings with labels `0..=N` of the conjuncts
    /// searched for witnesses (`(N + 2)^occurrences` each); not set for `Q+`.
    pub labelling_space: Option<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// An assignment over `N`; variables not listed are 0.
    Nat(BTreeMap<VarId, BigUint>),
    /// Every variable `∞` in the black-hole model of the verdict's theory.
    Infinity,
    Witness(WitnessCertificate),
    Exhaustion(Exhaustion),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Nat(_) => "nat",
            Certificate::Infinity => "infinity",
            Certificate::Witness(_) => "witness",
            Certificate::Exhaustion(_) => "exhaustion",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub search_nodes: u64,
    pub conjuncts: usize,
    pub occurrences: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub theory: Variant,
    pub certificate: Certificate,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        self.status == Status::Sat
    }
}

/// What a verdict is about.
#[derive(Clone, Copy, Debug)]
pub enum Instance<'a> {
    Equation(&'a Equation),
    System(&'a [(Term, BigUint)]),
    Formula(&'a PositiveFormula),
}

impl Instance<'_> {
    fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = match self {
            Instance::Equation(eq) => eq.vars(),
            Instance::System(s) => s.iter().flat_map(|(t, _)| t.vars()).collect(),
            Instance::Formula(f) => f.vars(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Truth given the truth of each atom `t = n`; an equation `t = u` is
    /// handed to `equation`.
    fn holds(
        &self,
        mut atom: impl FnMut(&Term, &BigUint) -> bool,
        equation: impl FnOnce(&Equation) -> bool,
    ) -> bool {
        match self {
            Instance::Equation(eq) => equation(eq),
            Instance::System(s) => s.iter().all(|(t, n)| atom(t, n)),
            Instance::Formula(f) => f.eval_with(&mut atom),
        }
    }
}

/// Re-checks a SAT certificate against `instance`, independently of how it
/// was found. UNSAT verdicts carry no checkable certificate and yield
/// `false`.
pub fn verify_certificate(verdict: &Verdict, instance: Instance<'_>, budget: &Budget) -> bool {
    if verdict.status != Status::Sat {
        return false;
    }
    let variant = verdict.theory;
    match &verdict.certificate {
        Certificate::Exhaustion(_) => false,
        Certificate::Nat(assignment) => {
            let mut full = assignment.clone();
            for v in instance.vars() {
                full.entry(v).or_default();
            }
            let eval = |t: &Term| standard_eval(t, &full).ok();
            instance.holds(
                |t, n| eval(t).as_ref() == Some(n),
                |eq| {
                    let l = eval(&eq.lhs);
                    l.is_some() && l == eval(&eq.rhs)
                },
            )
        }
        Certificate::Infinity => instance.holds(
            |t, n| eval_at_infinity(t, variant) == ExtNat::Fin(n.clone()),
            |eq| eval_at_infinity(&eq.lhs, variant) == eval_at_infinity(&eq.rhs, variant),
        ),
        Certificate::Witness(cert) => variant == Variant::Q && verify_witness_certificate(cert, instance, budget),
    }
}

fn verify_witness_certificate(cert: &WitnessCertificate, instance: Instance<'_>, budget: &Budget) -> bool {
    let w = &cert.witness;
    // The witness must be about this instance: its equations are atoms of
    // the instance, and every atom it omits must hold in every model.
    let provable = |t: &Term, n: &BigUint| eval_at_infinity(t, Variant::Q) == ExtNat::Fin(n.clone());
    let covered = |t: &Term, n: &BigUint| w.system.iter().any(|(u, k)| u == t && k == n) || provable(t, n);
    let relevant = match instance {
        Instance::Equation(eq) => match blackhole_reduce(eq, Variant::Q) {
            Reduction::Reduced(t, n) => w.system == [(t, n)],
            _ => false,
        },
        Instance::System(s) => {
            w.system.iter().all(|a| s.contains(a)) && instance.holds(covered, |_| false)
        }
        Instance::Formula(f) => {
            let atoms = f.atoms();
            w.system.iter().all(|(t, n)| atoms.contains(&(t, n))) && instance.holds(covered, |_| false)
        }
    };
    if !relevant || !check_witness(w).is_valid() {
        return false;
    }
    if extract_reduced_descs(w).ok().as_ref() != Some(&cert.reduced_system) || labelled_variables(w) != cert.assignment {
        return false;
    }

    // Evaluate the equations in the reduced-term model, succinctly.
    let sys: HashMap<Descriptor, BigUint> = cert.reduced_system.iter().cloned().collect();
    for (t, n) in &w.system {
        if reduced_pair_in(t, &cert.assignment, &sys).numeral_value() != Some(n) {
            return false;
        }
    }

    // And with terms written out, when they fit in the budget.
    materialized_check(cert, budget).unwrap_or(true)
}

/// `None` when some term does not fit in the budget.
fn materialized_check(cert: &WitnessCertificate, budget: &Budget) -> Option<bool> {
    let mut entries = Vec::new();
    for (c, k) in &cert.reduced_system {
        entries.push((expand_within(c, budget).ok()?, k.clone()));
    }
    let Ok(sys) = ReducedSystem::new(entries) else { return Some(false) };
    let mut valuation = BTreeMap::new();
    for (v, k) in &cert.assignment {
        valuation.insert(*v, unum_within(k.clone(), budget.term_nodes).ok()?);
    }
    for (t, n) in &cert.witness.system {
        let expected = unum_within(n.clone(), budget.term_nodes).ok()?;
        let mut model = ReducedModel::with_limit(&sys, budget.term_nodes);
        match model.eval(t, &valuation) {
            Ok(value) if value == expected => {}
            Ok(_) => return Some(false),
            Err(ModelError::Budget { .. }) => return None,
            Err(_) => return Some(false),
        }
    }
    Some(true)
}
