//! Generators and independent evaluators shared by the integration tests.
//!
//! Nothing here calls into the decision procedures: the evaluators work on
//! machine integers with their own recursion so they can serve as oracles.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dioq::descriptor::{Descriptor, DNode};
use dioq::rewrite::{is_irreducible, rtn_normalize, ReducedSystem};
use dioq::term::{Node, Term, VarId};
use num_bigint::BigUint;
use rand::Rng;

/// A random term with at most `max_size` nodes over the variables
/// `0..vars` (no variables when `vars == 0`).
pub fn random_term(rng: &mut impl Rng, max_size: usize, vars: u32) -> Term {
    let size = rng.gen_range(1..=max_size);
    term_of_size(rng, size, vars)
}

fn leaf(rng: &mut impl Rng, vars: u32) -> Term {
    if vars == 0 || rng.gen_bool(0.35) {
        Term::zero()
    } else {
        Term::var(rng.gen_range(0..vars))
    }
}

/// A random term with exactly `size` nodes.
pub fn term_of_size(rng: &mut impl Rng, size: usize, vars: u32) -> Term {
    match size {
        0 | 1 => leaf(rng, vars),
        2 => Term::succ(leaf(rng, vars)),
        _ => match rng.gen_range(0..5) {
            0 | 1 => Term::succ(term_of_size(rng, size - 1, vars)),
            k => {
                let left = rng.gen_range(1..size - 1);
                let a = term_of_size(rng, left, vars);
                let b = term_of_size(rng, size - 1 - left, vars);
                if k == 2 {
                    Term::mul(a, b)
                } else {
                    Term::add(a, b)
                }
            }
        },
    }
}

/// A random valid system with at most `max_len` entries and values at most
/// `max_value`. Entries are normal forms of small random terms, so some of
/// them occur as `0 * t_i` in random terms.
pub fn random_system(rng: &mut impl Rng, max_len: usize, max_value: u32, vars: u32) -> ReducedSystem {
    let len = rng.gen_range(0..=max_len);
    let mut entries: Vec<(Term, BigUint)> = Vec::new();
    let mut attempts = 0;
    while entries.len() < len && attempts < 100 {
        attempts += 1;
        let raw = random_term(rng, 4, vars);
        let Ok(t) = rtn_normalize(&raw, &ReducedSystem::empty()) else { continue };
        if !is_irreducible(&t) {
            continue;
        }
        let mut candidate = entries.clone();
        candidate.push((t, BigUint::from(rng.gen_range(0..=max_value))));
        if ReducedSystem::new(candidate.clone()).is_ok() {
            entries = candidate;
        }
    }
    ReducedSystem::new(entries).expect("checked on insertion")
}

/// A random descriptor with at most `max_size` nodes and indices at most
/// `max_index`.
pub fn random_descriptor(rng: &mut impl Rng, max_size: usize, max_index: u32, vars: u32) -> Descriptor {
    let size = rng.gen_range(1..=max_size);
    descriptor_of_size(rng, size, max_index, vars)
}

fn descriptor_of_size(rng: &mut impl Rng, size: usize, max_index: u32, vars: u32) -> Descriptor {
    let big = |k: u32| BigUint::from(k);
    if size <= 1 {
        return if vars == 0 || rng.gen_bool(0.3) {
            Descriptor::zero()
        } else {
            Descriptor::var(rng.gen_range(0..vars))
        };
    }
    let unary = size == 2 || rng.gen_bool(0.4);
    if unary {
        let d = descriptor_of_size(rng, size - 1, max_index, vars);
        match rng.gen_range(0..2) {
            0 => Descriptor::s(big(rng.gen_range(1..=max_index.max(1))), d).expect("n >= 1"),
            _ => Descriptor::a(big(rng.gen_range(0..=max_index)), big(rng.gen_range(2..=max_index.max(2))), d)
                .expect("m >= 2"),
        }
    } else {
        let left = rng.gen_range(1..size - 1);
        let a = descriptor_of_size(rng, left, max_index, vars);
        let b = descriptor_of_size(rng, size - 1 - left, max_index, vars);
        match rng.gen_range(0..3) {
            0 => Descriptor::add(a, b),
            1 => Descriptor::mul(a, b),
            _ => Descriptor::b(big(rng.gen_range(0..=max_index)), big(rng.gen_range(1..=max_index.max(1))), a, b)
                .expect("m >= 1"),
        }
    }
}

/// Every term with exactly `size` nodes over `0` and the variables
/// `0..vars`, for each size up to `max_size`. `out[s]` holds the terms of
/// size `s`.
pub fn all_terms(max_size: usize, vars: u32) -> Vec<Vec<Term>> {
    let mut out: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return out;
    }
    out[1].push(Term::zero());
    for v in 0..vars {
        out[1].push(Term::var(v));
    }
    for s in 2..=max_size {
        let mut level = Vec::new();
        for t in &out[s - 1] {
            level.push(Term::succ(t.clone()));
        }
        for left in 1..s - 1 {
            let right = s - 1 - left;
            for a in &out[left] {
                for b in &out[right] {
                    level.push(Term::add(a.clone(), b.clone()));
                    level.push(Term::mul(a.clone(), b.clone()));
                }
            }
        }
        out[s] = level;
    }
    out
}

/// `t` over the naturals with `u64` arithmetic; `None` on overflow.
pub fn eval_u64(t: &Term, values: &[u64]) -> Option<u64> {
    match &**t {
        Node::Zero => Some(0),
        Node::Var(v) => Some(values.get(*v as usize).copied().unwrap_or(0)),
        Node::Succ(a) => eval_u64(a, values)?.checked_add(1),
        Node::Add(a, b) => eval_u64(a, values)?.checked_add(eval_u64(b, values)?),
        Node::Mul(a, b) => eval_u64(a, values)?.checked_mul(eval_u64(b, values)?),
    }
}

/// A value in the naturals extended by an absorbing `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ext {
    Fin(u64),
    Inf,
}

/// `t` with every variable `∞`, where `0 * ∞ = ∞ * 0 = 0` if `zero_absorbs`
/// and otherwise `0 * ∞ = ∞` and `∞ * 0 = 0`.
pub fn eval_all_infinite(t: &Term, zero_absorbs: bool) -> Ext {
    match &**t {
        Node::Zero => Ext::Fin(0),
        Node::Var(_) => Ext::Inf,
        Node::Succ(a) => match eval_all_infinite(a, zero_absorbs) {
            Ext::Fin(k) => Ext::Fin(k + 1),
            Ext::Inf => Ext::Inf,
        },
        Node::Add(a, b) => match (eval_all_infinite(a, zero_absorbs), eval_all_infinite(b, zero_absorbs)) {
            (Ext::Fin(x), Ext::Fin(y)) => Ext::Fin(x + y),
            _ => Ext::Inf,
        },
        Node::Mul(a, b) => match (eval_all_infinite(a, zero_absorbs), eval_all_infinite(b, zero_absorbs)) {
            (Ext::Fin(x), Ext::Fin(y)) => Ext::Fin(x * y),
            (_, Ext::Fin(0)) => Ext::Fin(0),
            (Ext::Fin(0), Ext::Inf) if zero_absorbs => Ext::Fin(0),
            _ => Ext::Inf,
        },
    }
}

/// Some assignment of `vars` variables to `0..=bound` with `t = n`.
pub fn brute_force_solution(t: &Term, n: u64, vars: usize, bound: u64) -> Option<Vec<u64>> {
    let mut values = vec![0u64; vars];
    loop {
        if eval_u64(t, &values) == Some(n) {
            return Some(values);
        }
        let mut i = 0;
        loop {
            if i == vars {
                return None;
            }
            if values[i] < bound {
                values[i] += 1;
                break;
            }
            values[i] = 0;
            i += 1;
        }
    }
}

pub fn to_valuation(values: &[u64]) -> BTreeMap<VarId, BigUint> {
    values.iter().enumerate().map(|(i, &k)| (i as VarId, BigUint::from(k))).collect()
}

/// Counts the nodes of a descriptor's structure by kind, for diagnostics.
pub fn descriptor_kinds(d: &Descriptor) -> [usize; 7] {
    let mut counts = [0usize; 7];
    let mut stack = vec![d];
    while let Some(d) = stack.pop() {
        let i = match &**d {
            DNode::Zero => 0,
            DNode::Var(_) => 1,
            DNode::Add(a, b) | DNode::Mul(a, b) => {
                stack.push(a);
                stack.push(b);
                if matches!(&**d, DNode::Add(..)) { 2 } else { 3 }
            }
            DNode::S(_, a) => {
                stack.push(a);
                4
            }
            DNode::A(_, _, a) => {
                stack.push(a);
                5
            }
            DNode::B(_, _, a, b) => {
                stack.push(a);
                stack.push(b);
                6
            }
        };
        counts[i] += 1;
    }
    counts
}
