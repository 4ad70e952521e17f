//! Brute-force search over the naturals and the quadratic family
//! `x*x + a*y = b`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero as _};

use crate::models::standard_eval;
use crate::term::{bnum, Equation, Term, VarId};
use crate::Budget;

use super::formula::PositiveFormula;
use super::DecideError;

/// Assignments of `vars` to `0..=bound` in lexicographic order (the first
/// variable varies slowest); returns the first accepted by `holds`.
fn lexicographic(
    vars: &[VarId],
    bound: u64,
    budget: &Budget,
    mut holds: impl FnMut(&BTreeMap<VarId, BigUint>) -> bool,
) -> Result<Option<BTreeMap<VarId, BigUint>>, DecideError> {
    let count = (bound as u128 + 1).checked_pow(vars.len() as u32);
    if count.is_none_or(|c| c > budget.oracle_assignments as u128) {
        return Err(DecideError::OracleBudget { limit: budget.oracle_assignments });
    }
    let mut digits = vec![0u64; vars.len()];
    loop {
        let assignment: BTreeMap<VarId, BigUint> =
            vars.iter().zip(&digits).map(|(&v, &d)| (v, BigUint::from(d))).collect();
        if holds(&assignment) {
            return Ok(Some(assignment));
        }
        let mut i = vars.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if digits[i] < bound {
                digits[i] += 1;
                break;
            }
            digits[i] = 0;
        }
    }
}

/// The lexicographically least solution of `eq` in `N` with every variable
/// at most `bound`.
pub fn nat_oracle(eq: &Equation, bound: u64, budget: &Budget) -> Result<Option<BTreeMap<VarId, BigUint>>, DecideError> {
    lexicographic(&eq.vars(), bound, budget, |a| {
        standard_eval(&eq.lhs, a).expect("bound") == standard_eval(&eq.rhs, a).expect("bound")
    })
}

/// As [`nat_oracle`], for a positive formula.
pub fn nat_oracle_formula(
    f: &PositiveFormula,
    bound: u64,
    budget: &Budget,
) -> Result<Option<BTreeMap<VarId, BigUint>>, DecideError> {
    lexicographic(&f.vars(), bound, budget, |a| f.eval_nat(a))
}

/// `x*x + a*y = b` with `x` and `y` the variables 0 and 1, numerals in
/// binary. Requires `a >= 1`.
pub fn gen_manders_adleman(a: &BigUint, b: &BigUint) -> Result<Equation, DecideError> {
    if a.is_zero() {
        return Err(DecideError::InvalidArgument("the coefficient a must be at least 1".into()));
    }
    let (x, y) = (Term::var(0), Term::var(1));
    let lhs = Term::add(Term::mul(x.clone(), x), Term::mul(bnum(a.clone()), y));
    Ok(Equation::new(lhs, bnum(b.clone())))
}

/// Whether `x*x + a*y = b` has a solution in `N`, i.e. whether `b` is a
/// square modulo `a` via some `x*x <= b`. Requires `a >= 1`.
pub fn ma_nat_solvable(a: &BigUint, b: &BigUint) -> Result<bool, DecideError> {
    if a.is_zero() {
        return Err(DecideError::InvalidArgument("the coefficient a must be at least 1".into()));
    }
    let r = b % a;
    let root = b.sqrt();
    // x and x + a give the same residue, so only x < a matters (and x*x <= b).
    let limit = match a.to_u64() {
        Some(a) => root.clone().min(BigUint::from(a - 1)),
        None => root.clone(),
    };
    let mut x = BigUint::zero();
    while x <= limit {
        if (&x * &x) % a == r {
            return Ok(true);
        }
        x += 1u32;
    }
    Ok(false)
}
