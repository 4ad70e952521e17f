//! Extension of the reduced-term model `M` to a model of `Q`.
//!
//! `M` satisfies everything in `Q` except the predecessor axiom: irreducible
//! elements (the set `A`) have no predecessor. The extension adds `∞`,
//! formal predecessors `<a,k>` (read `a - k`) and scaled predecessors
//! `<a,k,x>` (read `x * (a - k)`) for `a ∈ A`, `k > 0` and nonstandard
//! `x ∈ M`, with operations chosen so that `Q1`-`Q7` hold.
//!
//! This is test infrastructure: the decision procedures only ever evaluate in
//! `M`, and the checks here confirm on samples that such an `M` extends.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero as _};

use super::reduced::{Axiom, AxiomReport, ReducedModel};
use super::ModelError;
use crate::rewrite::{is_irreducible, ReducedSystem};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtElem {
    /// An element of `M`.
    Base(Term),
    Inf,
    /// `<a,k>`: `a` irreducible, `k >= 1`.
    Pred(Term, BigUint),
    /// `<a,k,x>`: `a` irreducible, `k >= 1`, `x` a non-numeral element of `M`.
    Scaled(Term, BigUint, Term),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtOp {
    Succ,
    Add,
    Mul,
}

impl ExtElem {
    pub fn zero() -> ExtElem {
        ExtElem::Base(Term::zero())
    }

    /// The value if this is a standard element.
    pub fn standard_value(&self) -> Option<usize> {
        match self {
            ExtElem::Base(t) => t.as_unary_numeral(),
            _ => None,
        }
    }

    /// `(a, z)` such that the element is `S^z a` with `a` irreducible and `z`
    /// an integer. Numerals, `∞` and scaled elements have no such form.
    fn offset_form(&self) -> Option<(Term, BigInt)> {
        match self {
            ExtElem::Base(t) => {
                let (j, core) = t.peel_succ();
                (!core.is_zero()).then(|| (core.clone(), BigInt::from(j)))
            }
            ExtElem::Pred(a, k) => Some((a.clone(), -BigInt::from(k.clone()))),
            _ => None,
        }
    }
}

fn shifted(core: Term, z: BigInt) -> Result<ExtElem, ModelError> {
    match z.sign() {
        Sign::Minus => Ok(ExtElem::Pred(core, z.abs().to_biguint().expect("positive"))),
        _ => {
            let j = z.to_usize().ok_or(ModelError::Budget { limit: usize::MAX as u64 })?;
            Ok(ExtElem::Base(Term::succs(j, core)))
        }
    }
}

/// `S^z e` for a nonstandard `M` element (or predecessor) `e`.
fn shift(e: &ExtElem, z: BigInt) -> Result<ExtElem, ModelError> {
    let (core, off) = e
        .offset_form()
        .ok_or_else(|| ModelError::Malformed("shift of an element without offset form".into()))?;
    shifted(core, off + z)
}

pub fn validate(e: &ExtElem, sys: &ReducedSystem) -> Result<(), ModelError> {
    let model = ReducedModel::new(sys);
    let bad = |what: &str| Err(ModelError::Malformed(what.into()));
    match e {
        ExtElem::Base(t) if !model.is_element(t) => bad("base element is not T-reduced"),
        ExtElem::Pred(_, k) | ExtElem::Scaled(_, k, _) if k.is_zero() => bad("offset must be positive"),
        ExtElem::Pred(a, _) | ExtElem::Scaled(a, _, _) if !(is_irreducible(a) && model.is_element(a)) => {
            bad("base of a predecessor must be irreducible and T-reduced")
        }
        ExtElem::Scaled(_, _, x) if !model.is_element(x) || x.as_unary_numeral().is_some() => {
            bad("scale must be a nonstandard element of M")
        }
        _ => Ok(()),
    }
}

pub struct ExtModel<'s> {
    m: ReducedModel<'s>,
}

impl<'s> ExtModel<'s> {
    pub fn new(sys: &'s ReducedSystem) -> Self {
        ExtModel { m: ReducedModel::new(sys) }
    }

    pub fn succ(&mut self, e: &ExtElem) -> Result<ExtElem, ModelError> {
        Ok(match e {
            ExtElem::Base(t) => ExtElem::Base(self.m.succ(t)?),
            ExtElem::Inf | ExtElem::Scaled(..) => e.clone(),
            ExtElem::Pred(..) => shift(e, BigInt::from(1))?,
        })
    }

    /// A predecessor of a nonzero element; `None` for zero.
    pub fn pred(&mut self, e: &ExtElem) -> Result<Option<ExtElem>, ModelError> {
        Ok(match e {
            ExtElem::Base(t) => match &**t {
                crate::term::Node::Zero => None,
                crate::term::Node::Succ(inner) => Some(ExtElem::Base(inner.clone())),
                _ => Some(ExtElem::Pred(t.clone(), BigUint::from(1u32))),
            },
            ExtElem::Inf | ExtElem::Scaled(..) => Some(e.clone()),
            ExtElem::Pred(..) => Some(shift(e, BigInt::from(-1))?),
        })
    }

    pub fn add(&mut self, x: &ExtElem, y: &ExtElem) -> Result<ExtElem, ModelError> {
        use ExtElem::*;
        Ok(match (x, y) {
            (Inf, _) => Inf,
            (Pred(..), _) => match y.standard_value() {
                Some(n) => shift(x, BigInt::from(n))?,
                None => Inf,
            },
            (Base(_), Inf) | (Base(_), Scaled(..)) => Inf,
            (Base(a), Pred(b, k)) => {
                let sum = ExtElem::Base(self.m.add(a, b)?);
                shift(&sum, -BigInt::from(k.clone()))?
            }
            (Base(a), Base(b)) => Base(self.m.add(a, b)?),
            (Scaled(a, k, s), _) => {
                if y.standard_value().is_some() {
                    return Ok(x.clone());
                }
                let (Some((s_core, s_off)), Some((y_core, y_off))) =
                    (Base(s.clone()).offset_form(), y.offset_form())
                else {
                    return Ok(Inf);
                };
                if s_core != y_core {
                    return Ok(Inf);
                }
                if *k > BigUint::from(1u32) {
                    Scaled(a.clone(), k - 1u32, s.clone())
                } else {
                    let prod = Base(self.m.mul(s, a)?);
                    shift(&prod, y_off - s_off)?
                }
            }
        })
    }

    pub fn mul(&mut self, x: &ExtElem, y: &ExtElem) -> Result<ExtElem, ModelError> {
        use ExtElem::*;
        Ok(match (x, y) {
            (Inf | Pred(..) | Scaled(..), _) => match y.standard_value() {
                Some(n) => {
                    let mut acc = ExtElem::zero();
                    for _ in 0..n {
                        acc = self.add(&acc, x)?;
                    }
                    acc
                }
                None => Inf,
            },
            (Base(_), Inf) | (Base(_), Scaled(..)) => Inf,
            (Base(s), Pred(a, k)) => match s.as_unary_numeral() {
                Some(0) => Base(self.m.mul(s, a)?),
                Some(n) => {
                    let prod = Base(self.m.mul(s, a)?);
                    shift(&prod, -BigInt::from(k.clone()) * BigInt::from(n))?
                }
                None => Scaled(a.clone(), k.clone(), s.clone()),
            },
            (Base(a), Base(b)) => Base(self.m.mul(a, b)?),
        })
    }
}

/// One operation of the extended model.
pub fn ext_model_ops(
    e1: &ExtElem,
    e2: &ExtElem,
    op: ExtOp,
    sys: &ReducedSystem,
) -> Result<ExtElem, ModelError> {
    validate(e1, sys)?;
    validate(e2, sys)?;
    let mut model = ExtModel::new(sys);
    match op {
        ExtOp::Succ => model.succ(e1),
        ExtOp::Add => model.add(e1, e2),
        ExtOp::Mul => model.mul(e1, e2),
    }
}

/// Checks `Q1`-`Q7` in the extended model on every given pair, in both
/// orders. `Q3` is checked constructively: each nonzero element must have a
/// computed predecessor whose successor is the element.
pub fn check_q_axioms_ext(sys: &ReducedSystem, pairs: &[(ExtElem, ExtElem)]) -> AxiomReport {
    let mut report = AxiomReport::default();
    for (a, b) in pairs {
        for (x, y) in [(a, b), (b, a)] {
            let mut model = ExtModel::new(sys);
            let valid = validate(x, sys).and(validate(y, sys));
            if let Err(e) = valid {
                report.record(Axiom::Domain, false, || e.to_string());
                continue;
            }
            if check_ext_pair(&mut model, x, y, &mut report).is_err() {
                report.skipped += 1;
            }
        }
    }
    report
}

fn check_ext_pair(
    model: &mut ExtModel<'_>,
    x: &ExtElem,
    y: &ExtElem,
    report: &mut AxiomReport,
) -> Result<(), ModelError> {
    let zero = ExtElem::zero();
    let sx = model.succ(x)?;
    let sy = model.succ(y)?;
    report.record(Axiom::Q1, sx != zero, || format!("S({x:?}) = 0"));
    report.record(Axiom::Q2, sx != sy || x == y, || format!("S({x:?}) = S({y:?})"));
    match model.pred(x)? {
        None => report.record(Axiom::Q3, *x == zero, || format!("{x:?} has no predecessor")),
        Some(p) => {
            let back = model.succ(&p)?;
            report.record(Axiom::Q3, back == *x && *x != zero, || {
                format!("predecessor {p:?} of {x:?} has successor {back:?}")
            });
        }
    }
    let x0 = model.add(x, &zero)?;
    report.record(Axiom::Q4, x0 == *x, || format!("{x:?} + 0 = {x0:?}"));
    let lhs = model.add(x, &sy)?;
    let sum = model.add(x, y)?;
    let rhs = model.succ(&sum)?;
    report.record(Axiom::Q5, lhs == rhs, || format!("{x:?} + S({y:?}): {lhs:?} vs {rhs:?}"));
    let p0 = model.mul(x, &zero)?;
    report.record(Axiom::Q6, p0 == zero, || format!("{x:?} * 0 = {p0:?}"));
    let lhs = model.mul(x, &sy)?;
    let prod = model.mul(x, y)?;
    let rhs = model.add(&prod, x)?;
    report.record(Axiom::Q7, lhs == rhs, || format!("{x:?} * S({y:?}): {lhs:?} vs {rhs:?}"));
    Ok(())
}
