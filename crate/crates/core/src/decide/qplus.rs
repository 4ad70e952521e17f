//! Satisfiability over `Q+` by top-down decomposition.
//!
//! An equation `t = n` with `t` not a variable is replaced by equations on
//! the immediate subterms: `S(t) = n` by `t = n - 1` (failing at 0),
//! `t + u = n` by `t = k, u = m` for some `k + m = n`, and `t * u = n` by
//! `t = 0` or `u = 0` when `n = 0` (`Q+` proves `0 * u = 0` for every `u`)
//! and otherwise by `t = k, u = m` for a factorization `k * m = n`. What remains are
//! equations `x = k`; the system is satisfiable iff some branch leaves them
//! consistent. Each branch is also true in `N`, so an accepting branch is an
//! assignment over the naturals.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero as _;

use crate::models::{decompose_prod, standard_eval, ProductBranch};
use crate::term::{Node, Term, VarId};
use crate::Budget;

use super::DecideError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolStats {
    /// Branches explored.
    pub nodes: u64,
}

struct State {
    pending: Vec<(Term, BigUint)>,
    assignment: BTreeMap<VarId, BigUint>,
}

/// Smallest value of `t` over the naturals, reached with all variables 0.
fn least_value(t: &Term) -> BigUint {
    let zeros: BTreeMap<VarId, BigUint> = t.vars().into_iter().map(|v| (v, BigUint::zero())).collect();
    standard_eval(t, &zeros).expect("all variables bound")
}

/// Runs the decomposition. Returns an assignment of the variables that the
/// accepting branch constrains; other variables may take any value (0 works).
pub fn sol_qplus(
    system: &[(Term, BigUint)],
    budget: &Budget,
) -> Result<(Option<BTreeMap<VarId, BigUint>>, SolStats), DecideError> {
    let mut stats = SolStats::default();
    let mut stack = vec![State { pending: system.iter().rev().cloned().collect(), assignment: BTreeMap::new() }];
    let over = |stats: &mut SolStats| {
        stats.nodes += 1;
        if stats.nodes > budget.search_nodes {
            Err(DecideError::SearchBudget { limit: budget.search_nodes })
        } else {
            Ok(())
        }
    };
    'states: while let Some(mut state) = stack.pop() {
        over(&mut stats)?;
        while let Some((t, n)) = state.pending.pop() {
            if t.is_ground() {
                if least_value(&t) != n {
                    continue 'states;
                }
                continue;
            }
            match &*t {
                Node::Zero => unreachable!("ground"),
                Node::Var(v) => match state.assignment.get(v) {
                    Some(k) if *k != n => continue 'states,
                    Some(_) => {}
                    None => {
                        state.assignment.insert(*v, n);
                    }
                },
                Node::Succ(a) => {
                    if n.is_zero() {
                        continue 'states;
                    }
                    state.pending.push((a.clone(), n - 1u32));
                }
                Node::Add(a, b) => {
                    let (la, lb) = (least_value(a), least_value(b));
                    if &la + &lb > n {
                        continue 'states;
                    }
                    // Branches k = la..=n-lb; push in reverse so the smallest
                    // left value is explored first.
                    let mut k = &n - &lb;
                    loop {
                        over(&mut stats)?;
                        let mut pending = state.pending.clone();
                        pending.push((b.clone(), &n - &k));
                        pending.push((a.clone(), k.clone()));
                        stack.push(State { pending, assignment: state.assignment.clone() });
                        if k == la {
                            break;
                        }
                        k -= 1u32;
                    }
                    continue 'states;
                }
                Node::Mul(a, b) => {
                    if n.is_zero() {
                        // Left factor 0 first, then right factor 0.
                        let mut right = state.pending.clone();
                        right.push((b.clone(), BigUint::zero()));
                        stack.push(State { pending: right, assignment: state.assignment.clone() });
                        state.pending.push((a.clone(), BigUint::zero()));
                        stack.push(state);
                        continue 'states;
                    }
                    let branches = decompose_prod(&n);
                    for branch in branches.into_iter().rev() {
                        over(&mut stats)?;
                        if let ProductBranch::Factors(k, m) = branch {
                            let mut pending = state.pending.clone();
                            pending.push((b.clone(), m));
                            pending.push((a.clone(), k));
                            stack.push(State { pending, assignment: state.assignment.clone() });
                        }
                    }
                    continue 'states;
                }
            }
        }
        return Ok((Some(state.assignment), stats));
    }
    Ok((None, stats))
}
