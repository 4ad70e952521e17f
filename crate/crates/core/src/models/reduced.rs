//! The model `M` of `T`-reduced terms.
//!
//! Elements are `T`-reduced terms; `S` is syntactic, and `+`, `*` are given
//! by the clauses below (`t`, `u` irreducible):
//!
//! ```text
//! t + S^n 0          = S^n t
//! t + S^n u          = S^n (t + u)
//! S^n t * S^m 0      = S^n(...S^n(S^n(0 + t) + t)...) + t      (m times)
//! S^n t * S^m u      = S^n(...S^n(S^n(S^n t * u + t) + t)...) (m times)
//! S^n 0 * S^m 0      = S^{nm} 0
//! S^n 0 * S^m u      = S^{nm} (S^n 0 * u)                      (n > 0)
//! 0 * S^m u          = S^{n_i} 0 if u = t_i, else 0 * u
//! ```
//!
//! Under the identity valuation every term evaluates to its normal form with
//! respect to the rewriting system extended by the system's rules.

use std::collections::BTreeMap;
use std::fmt;


use super::{to_usize, ModelError};
use crate::rewrite::{is_t_reduced, ReducedSystem};
use crate::term::{Folded, Term, VarId};
use crate::Budget;

/// Operations of `M` for a fixed system, with a cap on the number of term
/// nodes created.
pub struct ReducedModel<'s> {
    sys: &'s ReducedSystem,
    limit: u64,
    used: u64,
}

impl<'s> ReducedModel<'s> {
    pub fn new(sys: &'s ReducedSystem) -> Self {
        ReducedModel::with_limit(sys, Budget::default().term_nodes)
    }

    pub fn with_limit(sys: &'s ReducedSystem, limit: u64) -> Self {
        ReducedModel { sys, limit, used: 0 }
    }

    pub fn system(&self) -> &'s ReducedSystem {
        self.sys
    }

    fn charge(&mut self, nodes: u64) -> Result<(), ModelError> {
        self.used = self.used.saturating_add(nodes);
        if self.used > self.limit {
            return Err(ModelError::Budget { limit: self.limit });
        }
        Ok(())
    }

    fn numeral(&mut self, n: usize) -> Result<Term, ModelError> {
        self.charge(n as u64)?;
        Ok(Term::succs(n, Term::zero()))
    }

    pub fn is_element(&self, t: &Term) -> bool {
        is_t_reduced(t, self.sys)
    }

    pub fn succ(&mut self, x: &Term) -> Result<Term, ModelError> {
        self.charge(1)?;
        Ok(Term::succ(x.clone()))
    }

    pub fn add(&mut self, x: &Term, y: &Term) -> Result<Term, ModelError> {
        let (j, core) = y.peel_succ();
        let inner = if core.is_zero() {
            x.clone()
        } else {
            self.charge(1)?;
            Term::add(x.clone(), core.clone())
        };
        self.charge(j as u64)?;
        Ok(Term::succs(j, inner))
    }

    pub fn mul(&mut self, x: &Term, y: &Term) -> Result<Term, ModelError> {
        let (n, t) = x.peel_succ();
        let (m, u) = y.peel_succ();
        if t.is_zero() {
            let nm = n.checked_mul(m).ok_or(ModelError::Budget { limit: self.limit })?;
            if u.is_zero() {
                return self.numeral(nm);
            }
            if n > 0 {
                self.charge(nm as u64 + 1)?;
                return Ok(Term::succs(nm, Term::mul(x.clone(), u.clone())));
            }
            return match self.sys.lookup(u) {
                Some(value) => {
                    let k = to_usize(value, self.limit)?;
                    self.numeral(k)
                }
                None => {
                    self.charge(1)?;
                    Ok(Term::mul(Term::zero(), u.clone()))
                }
            };
        }
        let mut acc = if u.is_zero() {
            Term::zero()
        } else {
            self.charge(1)?;
            Term::mul(x.clone(), u.clone())
        };
        for _ in 0..m {
            self.charge(n as u64 + 1)?;
            acc = Term::succs(n, Term::add(acc, t.clone()));
        }
        Ok(acc)
    }

    /// Value of `t` under `valuation`; variables without a value denote
    /// themselves.
    pub fn eval(&mut self, t: &Term, valuation: &BTreeMap<VarId, Term>) -> Result<Term, ModelError> {
        t.fold(|node| match node {
            Folded::Zero => Ok(Term::zero()),
            Folded::Var(v) => Ok(valuation.get(&v).cloned().unwrap_or_else(|| Term::var(v))),
            Folded::Succ(a) => self.succ(&a),
            Folded::Add(a, b) => self.add(&a, &b),
            Folded::Mul(a, b) => self.mul(&a, &b),
        })
    }
}

/// Value of `t` in `M` under `valuation` (missing variables map to
/// themselves). With the identity valuation this is the reduced form of `t`
/// relative to `sys`.
pub fn reduced_model_eval(
    t: &Term,
    valuation: &BTreeMap<VarId, Term>,
    sys: &ReducedSystem,
) -> Result<Term, ModelError> {
    ReducedModel::new(sys).eval(t, valuation)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    /// Not an axiom: the sample is not an element of the model.
    Domain,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
    /// `x + y = n -> y = 0 | ... | y = n`
    Q8(u32),
    /// `x * y = n -> x = 0 | y = 0 | ... | y = n`
    Q9(u32),
    /// `x + y = n -> x = k & y = m` for some `k + m = n`
    SumDecomposition(u32),
    /// `x * y = n -> x = 0 | (x = k & y = m)` for some `k * m = n`, `n > 0`
    ProductDecomposition(u32),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Q8(n) => write!(f, "Q8[{n}]"),
            Axiom::Q9(n) => write!(f, "Q9[{n}]"),
            Axiom::SumDecomposition(n) => write!(f, "sum-decomposition[{n}]"),
            Axiom::ProductDecomposition(n) => write!(f, "product-decomposition[{n}]"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub instance: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub instances: u64,
    pub violations: Vec<Violation>,
    /// Instances skipped because a value exceeded the node budget.
    pub skipped: u64,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn record(&mut self, axiom: Axiom, holds: bool, instance: impl FnOnce() -> String) {
        self.instances += 1;
        if !holds {
            self.violations.push(Violation { axiom, instance: instance() });
        }
    }
}

/// Checks `Q1`, `Q2`, `Q4`-`Q7` and the instances `Q8_n`, `Q9_n` for
/// `n <= n_max` (together with the stronger decompositions they imply) in `M`,
/// over all elements and pairs of elements of `samples`.
pub fn check_qforall_axioms(sys: &ReducedSystem, samples: &[Term], n_max: u32) -> AxiomReport {
    let mut report = AxiomReport::default();
    let mut model = ReducedModel::new(sys);
    let zero = Term::zero();
    for x in samples {
        if !model.is_element(x) {
            report.record(Axiom::Domain, false, || format!("sample {x} is not T-reduced"));
        }
    }
    for x in samples {
        model.used = 0;
        let Ok(sx) = model.succ(x) else {
            report.skipped += 1;
            continue;
        };
        report.record(Axiom::Q1, sx != zero, || format!("S({x}) = 0"));
        match model.add(x, &zero) {
            Ok(v) => report.record(Axiom::Q4, &v == x, || format!("{x} + 0 = {v}")),
            Err(_) => report.skipped += 1,
        }
        match model.mul(x, &zero) {
            Ok(v) => report.record(Axiom::Q6, v == zero, || format!("{x} * 0 = {v}")),
            Err(_) => report.skipped += 1,
        }
    }
    for x in samples {
        for y in samples {
            model.used = 0;
            if check_pair(&mut model, x, y, n_max, &mut report).is_err() {
                report.skipped += 1;
            }
        }
    }
    report
}

fn check_pair(
    model: &mut ReducedModel<'_>,
    x: &Term,
    y: &Term,
    n_max: u32,
    report: &mut AxiomReport,
) -> Result<(), ModelError> {
    let sx = model.succ(x)?;
    let sy = model.succ(y)?;
    report.record(Axiom::Q2, sx != sy || x == y, || format!("S({x}) = S({y})"));

    let x_plus_sy = model.add(x, &sy)?;
    let x_plus_y = model.add(x, y)?;
    let s_sum = model.succ(&x_plus_y)?;
    report.record(Axiom::Q5, x_plus_sy == s_sum, || {
        format!("{x} + S({y}) = {x_plus_sy} but S({x} + {y}) = {s_sum}")
    });

    let x_times_sy = model.mul(x, &sy)?;
    let x_times_y = model.mul(x, y)?;
    let rhs = model.add(&x_times_y, x)?;
    report.record(Axiom::Q7, x_times_sy == rhs, || {
        format!("{x} * S({y}) = {x_times_sy} but {x}*{y} + {x} = {rhs}")
    });

    let xn = x.as_unary_numeral();
    let yn = y.as_unary_numeral();
    if let Some(k) = x_plus_y.as_unary_numeral() {
        for n in 0..=n_max {
            if k != n as usize {
                continue;
            }
            report.record(Axiom::Q8(n), yn.is_some_and(|m| m <= k), || format!("{x} + {y} = {k}"));
            let decomposed = matches!((xn, yn), (Some(a), Some(b)) if a + b == k);
            report.record(Axiom::SumDecomposition(n), decomposed, || format!("{x} + {y} = {k}"));
        }
    }
    if let Some(k) = x_times_y.as_unary_numeral() {
        for n in 0..=n_max {
            if k != n as usize {
                continue;
            }
            let holds = xn == Some(0) || yn.is_some_and(|m| m <= k);
            report.record(Axiom::Q9(n), holds, || format!("{x} * {y} = {k}"));
            if n > 0 {
                let holds = xn == Some(0) || matches!((xn, yn), (Some(a), Some(b)) if a * b == k);
                report.record(Axiom::ProductDecomposition(n), holds, || format!("{x} * {y} = {k}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use crate::parse::parse_term;
    use crate::rewrite::rtn_normalize;
    use crate::term::unum;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn sys_y4() -> ReducedSystem {
        // `y` is the second variable in the parsed terms below.
        ReducedSystem::new(vec![(Term::var(1), BigUint::from(4u32))]).unwrap()
    }

    #[test]
    fn zero_times_system_term() {
        let t = Term::mul(Term::zero(), Term::var(1));
        assert_eq!(reduced_model_eval(&t, &BTreeMap::new(), &sys_y4()).unwrap(), unum(4u32).unwrap());
    }

    #[test]
    fn product_with_numeral() {
        let t = p("x*S(S(0))");
        let empty = ReducedSystem::empty();
        assert_eq!(reduced_model_eval(&t, &BTreeMap::new(), &empty).unwrap(), p("(0 + x) + x"));
    }

    #[test]
    fn table_row_under_valuation() {
        let t = p("x*y");
        let val: BTreeMap<_, _> = [(0, Term::zero())].into();
        assert_eq!(reduced_model_eval(&t, &val, &sys_y4()).unwrap(), unum(4u32).unwrap());
        let t = p("x*y + x*S(S(S(y)))");
        assert_eq!(reduced_model_eval(&t, &val, &sys_y4()).unwrap(), unum(8u32).unwrap());
    }

    #[test]
    fn reduced_terms_are_fixed_points() {
        let empty = ReducedSystem::empty();
        for s in ["0", "S(x)", "x + y", "0*x", "S(S(0))*y", "S((x*y) + z)", "(0 + x) + x"] {
            let t = p(s);
            assert_eq!(reduced_model_eval(&t, &BTreeMap::new(), &empty).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn agrees_with_rewriting() {
        let sys = sys_y4();
        for s in ["x*y + x*S(S(S(y)))", "0*S(S(y))", "#6*(x + #3)", "(0*y)*S(x)", "S(x)*S(S(y))"] {
            let t = p(s);
            assert_eq!(
                reduced_model_eval(&t, &BTreeMap::new(), &sys).unwrap(),
                rtn_normalize(&t, &sys).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let empty = ReducedSystem::empty();
        let mut m = ReducedModel::with_limit(&empty, 50);
        assert_eq!(m.eval(&crate::term::bnum(1000u32), &BTreeMap::new()), Err(ModelError::Budget { limit: 50 }));
    }

    #[test]
    fn small_axiom_check() {
        let samples = vec![Term::zero(), Term::succ(Term::zero()), Term::var(0)];
        let report = check_qforall_axioms(&ReducedSystem::empty(), &samples, 3);
        assert!(report.is_clean(), "{:?}", report.violations);
        assert!(report.instances > 0);
    }

    #[test]
    fn axiom_check_detects_non_elements() {
        let samples = vec![p("x + 0")];
        let report = check_qforall_axioms(&ReducedSystem::empty(), &samples, 1);
        assert_eq!(report.violations[0].axiom, Axiom::Domain);
    }
}
