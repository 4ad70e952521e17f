//! Positive existential formulas: `∧`/`∨` combinations of atoms `t = n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::models::{eval_at_infinity, standard_eval, ExtNat, Variant};
use crate::term::{bnum, Term, VarId, VarTable};

use super::DecideError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositiveFormula {
    /// `t = n` for a numeral `n`.
    Atom(Term, BigUint),
    And(Vec<PositiveFormula>),
    Or(Vec<PositiveFormula>),
}

/// A conjunction of atoms.
pub type Conjunct = Vec<(Term, BigUint)>;

impl PositiveFormula {
    pub fn atom(t: Term, n: impl Into<BigUint>) -> PositiveFormula {
        PositiveFormula::Atom(t, n.into())
    }

    /// Atoms in left-to-right order, with repetitions.
    pub fn atoms(&self) -> Vec<(&Term, &BigUint)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                PositiveFormula::Atom(t, n) => out.push((t, n)),
                PositiveFormula::And(parts) | PositiveFormula::Or(parts) => stack.extend(parts.iter().rev()),
            }
        }
        out
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.atoms().iter().flat_map(|(t, _)| t.vars()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Truth of the formula when each atom's truth is given by `atom`.
    pub fn eval_with(&self, atom: &mut impl FnMut(&Term, &BigUint) -> bool) -> bool {
        match self {
            PositiveFormula::Atom(t, n) => atom(t, n),
            PositiveFormula::And(parts) => parts.iter().all(|p| p.eval_with(atom)),
            PositiveFormula::Or(parts) => parts.iter().any(|p| p.eval_with(atom)),
        }
    }

    /// Truth in the standard model; unassigned variables are 0.
    pub fn eval_nat(&self, assignment: &BTreeMap<VarId, BigUint>) -> bool {
        let mut full = assignment.clone();
        for v in self.vars() {
            full.entry(v).or_default();
        }
        self.eval_with(&mut |t, n| standard_eval(t, &full).map(|v| &v == n).unwrap_or(false))
    }

    /// Truth in the black-hole model with every variable set to `∞`.
    pub fn eval_at_infinity(&self, variant: Variant) -> bool {
        self.eval_with(&mut |t, n| eval_at_infinity(t, variant) == ExtNat::Fin(n.clone()))
    }

    /// Disjunctive normal form. Conjuncts are listed in the order obtained by
    /// distributing left to right; repeated atoms inside a conjunct are
    /// dropped.
    pub fn dnf(&self, max_conjuncts: usize) -> Result<Vec<Conjunct>, DecideError> {
        let over = || DecideError::DnfBudget { limit: max_conjuncts };
        let out = match self {
            PositiveFormula::Atom(t, n) => vec![vec![(t.clone(), n.clone())]],
            PositiveFormula::Or(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.dnf(max_conjuncts)?);
                    if out.len() > max_conjuncts {
                        return Err(over());
                    }
                }
                out
            }
            PositiveFormula::And(parts) => {
                let mut acc: Vec<Conjunct> = vec![Vec::new()];
                for p in parts {
                    let rhs = p.dnf(max_conjuncts)?;
                    if acc.len().saturating_mul(rhs.len()) > max_conjuncts {
                        return Err(over());
                    }
                    let mut next = Vec::with_capacity(acc.len() * rhs.len());
                    for a in &acc {
                        for b in &rhs {
                            let mut c = a.clone();
                            for atom in b {
                                if !c.contains(atom) {
                                    c.push(atom.clone());
                                }
                            }
                            next.push(c);
                        }
                    }
                    acc = next;
                }
                acc
            }
        };
        if out.len() > max_conjuncts {
            return Err(over());
        }
        Ok(out)
    }

    pub fn render<'a>(&'a self, names: &'a VarTable) -> impl fmt::Display + 'a {
        FormulaRender { f: self, names }
    }
}

struct FormulaRender<'a> {
    f: &'a PositiveFormula,
    names: &'a VarTable,
}

impl fmt::Display for FormulaRender<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |out: &mut fmt::Formatter<'_>, parts: &[PositiveFormula], sep: &str| {
            out.write_str("(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.write_str(sep)?;
                }
                write!(out, "{}", p.render(self.names))?;
            }
            out.write_str(")")
        };
        match self.f {
            PositiveFormula::Atom(t, n) => {
                write!(out, "{} = {}", t.render(self.names), bnum(n.clone()).render(self.names))
            }
            PositiveFormula::And(parts) => join(out, parts, " & "),
            PositiveFormula::Or(parts) => join(out, parts, " | "),
        }
    }
}
