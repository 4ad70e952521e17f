//! The rewriting system `R_Q`
//!
//! ```text
//! t + 0  ~> t          t * 0  ~> 0
//! t + Su ~> S(t + u)   t * Su ~> t*u + t
//! ```
//!
//! optionally extended by closed rules `0 * t_i ~> S^{n_i} 0` for the entries
//! of a [`ReducedSystem`]. The extended system is terminating (see
//! [`norm_measure`]) and confluent, so every term has a unique normal form.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::term::{unum_within, Folded, Node, Path, Step, Term, TermError};
use crate::Budget;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("normalization exceeded {limit} rewrite steps")]
    StepBudget { limit: u64 },
    #[error("normalization exceeded {limit} term nodes")]
    NodeBudget { limit: u64 },
}

impl From<TermError> for RewriteError {
    fn from(e: TermError) -> Self {
        match e {
            TermError::NumeralTooLarge { limit, .. } => RewriteError::NodeBudget { limit },
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("entry {0} is not irreducible")]
    NotIrreducible(usize),
    #[error("entry {outer} contains 0*t where t is entry {inner}")]
    Interference { outer: usize, inner: usize },
    #[error("entries {0} and {1} coincide")]
    Duplicate(usize, usize),
}

/// A system `{0 * t_i = n_i}` whose left sides do not interact: each `t_i` is
/// irreducible, the `t_i` are distinct, and no `0 * t_i` occurs inside any
/// `t_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReducedSystem {
    entries: Vec<(Term, BigUint)>,
    index: HashMap<Term, usize>,
}

impl ReducedSystem {
    pub fn empty() -> ReducedSystem {
        ReducedSystem::default()
    }

    pub fn new(entries: Vec<(Term, BigUint)>) -> Result<ReducedSystem, SystemError> {
        let mut index = HashMap::new();
        for (i, (t, _)) in entries.iter().enumerate() {
            if !is_irreducible(t) {
                return Err(SystemError::NotIrreducible(i));
            }
            if let Some(j) = index.insert(t.clone(), i) {
                return Err(SystemError::Duplicate(j, i));
            }
        }
        let sys = ReducedSystem { entries, index };
        for (outer, (t, _)) in sys.entries.iter().enumerate() {
            if let Some(inner) = sys.find_zero_product(t) {
                return Err(SystemError::Interference { outer, inner });
            }
        }
        Ok(sys)
    }

    pub fn entries(&self) -> &[(Term, BigUint)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `n_i` for `t == t_i`.
    pub fn lookup(&self, t: &Term) -> Option<&BigUint> {
        self.index.get(t).map(|&i| &self.entries[i].1)
    }

    /// The norm constant `2 + max n_i` (2 for the empty system).
    pub fn norm_constant(&self) -> BigUint {
        self.entries.iter().map(|(_, n)| n.clone()).max().unwrap_or_default() + 2u32
    }

    fn find_zero_product(&self, t: &Term) -> Option<usize> {
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            match &**u {
                Node::Zero | Node::Var(_) => {}
                Node::Succ(a) => stack.push(a),
                Node::Add(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                Node::Mul(a, b) => {
                    if a.is_zero() {
                        if let Some(&i) = self.index.get(b) {
                            return Some(i);
                        }
                    }
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        None
    }
}

/// No subterm of the form `t+0`, `t+Su`, `t*0` or `t*Su`.
pub fn is_normal(t: &Term) -> bool {
    let mut stack = vec![t];
    while let Some(u) = stack.pop() {
        match &**u {
            Node::Zero | Node::Var(_) => {}
            Node::Succ(a) => stack.push(a),
            Node::Add(a, b) | Node::Mul(a, b) => {
                if b.is_zero() || b.is_succ() {
                    return false;
                }
                stack.push(a);
                stack.push(b);
            }
        }
    }
    true
}

/// Normal, and neither `0` nor a successor.
pub fn is_irreducible(t: &Term) -> bool {
    !t.is_zero() && !t.is_succ() && is_normal(t)
}

/// Normal, with no subterm `0 * t_i` for an entry `t_i` of `sys`.
pub fn is_t_reduced(t: &Term, sys: &ReducedSystem) -> bool {
    is_normal(t) && sys.find_zero_product(t).is_none()
}

/// The result of rewriting the root of `t`, if the root is a redex.
fn root_reduct(t: &Term, sys: &ReducedSystem) -> Option<Term> {
    match &**t {
        Node::Add(a, b) => match &**b {
            Node::Zero => Some(a.clone()),
            Node::Succ(u) => Some(Term::succ(Term::add(a.clone(), u.clone()))),
            _ => None,
        },
        Node::Mul(a, b) => match &**b {
            Node::Zero => Some(Term::zero()),
            Node::Succ(u) => Some(Term::add(Term::mul(a.clone(), u.clone()), a.clone())),
            _ if a.is_zero() => sys
                .lookup(b)
                .map(|n| unum_within(n.clone(), u64::MAX).expect("system values fit in memory")),
            _ => None,
        },
        _ => None,
    }
}

/// Paths of all redex occurrences, in pre-order.
pub fn redex_paths(t: &Term, sys: &ReducedSystem) -> Vec<Path> {
    let mut out = Vec::new();
    let mut stack = vec![(Path::root(), t)];
    while let Some((p, u)) = stack.pop() {
        if root_reduct(u, sys).is_some() {
            out.push(p.clone());
        }
        match &**u {
            Node::Zero | Node::Var(_) => {}
            Node::Succ(a) => stack.push((p.child(Step::Succ), a)),
            Node::Add(a, b) => {
                stack.push((p.child(Step::AddRight), b));
                stack.push((p.child(Step::AddLeft), a));
            }
            Node::Mul(a, b) => {
                stack.push((p.child(Step::MulRight), b));
                stack.push((p.child(Step::MulLeft), a));
            }
        }
    }
    out
}

/// Rewrites the redex at `path`; `None` if there is no redex there.
pub fn rewrite_at(t: &Term, path: &Path, sys: &ReducedSystem) -> Option<Term> {
    let reduct = root_reduct(t.at(path)?, sys)?;
    t.replace_at(path, reduct)
}

/// All terms reachable in exactly one step, without duplicates, ordered by
/// the path of the contracted redex.
pub fn one_step_reducts(t: &Term, sys: &ReducedSystem) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for p in redex_paths(t, sys) {
        let r = rewrite_at(t, &p, sys).expect("redex path is valid");
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Reduces `t` to normal form by repeatedly contracting the redex picked by
/// `choose` (given the number of redexes, returns an index into the
/// pre-order list of redex paths).
pub fn reduce_with_strategy(
    t: &Term,
    sys: &ReducedSystem,
    max_steps: u64,
    mut choose: impl FnMut(usize) -> usize,
) -> Result<Term, RewriteError> {
    let mut cur = t.clone();
    for _ in 0..max_steps {
        let paths = redex_paths(&cur, sys);
        if paths.is_empty() {
            return Ok(cur);
        }
        let i = choose(paths.len()) % paths.len();
        cur = rewrite_at(&cur, &paths[i], sys).expect("redex path is valid");
    }
    if redex_paths(&cur, sys).is_empty() {
        Ok(cur)
    } else {
        Err(RewriteError::StepBudget { limit: max_steps })
    }
}

/// The normal form of `t` with respect to `R_Q` extended by `sys`.
///
/// Uses an innermost strategy. Normal forms can be exponentially larger than
/// `t` (binary numerals unfold to unary ones), so the default [`Budget`]
/// applies; see [`crate::descriptor::desc_of_reduced`] for the succinct route.
pub fn rtn_normalize(t: &Term, sys: &ReducedSystem) -> Result<Term, RewriteError> {
    rtn_normalize_within(t, sys, &Budget::default())
}

pub fn rtn_normalize_within(
    t: &Term,
    sys: &ReducedSystem,
    budget: &Budget,
) -> Result<Term, RewriteError> {
    let mut n = Normalizer {
        sys,
        steps: 0,
        max_steps: budget.rewrite_steps,
        nodes: 0,
        max_nodes: budget.term_nodes,
    };
    n.normalize(t)
}

/// `red(t)`: the normal form under plain `R_Q`.
pub fn red(t: &Term) -> Result<Term, RewriteError> {
    rtn_normalize(t, &ReducedSystem::empty())
}

struct Normalizer<'a> {
    sys: &'a ReducedSystem,
    steps: u64,
    max_steps: u64,
    nodes: u64,
    max_nodes: u64,
}

impl Normalizer<'_> {
    fn step(&mut self, k: u64) -> Result<(), RewriteError> {
        self.steps += k;
        if self.steps > self.max_steps {
            return Err(RewriteError::StepBudget { limit: self.max_steps });
        }
        Ok(())
    }

    fn alloc(&mut self, k: u64) -> Result<(), RewriteError> {
        self.nodes += k;
        if self.nodes > self.max_nodes {
            return Err(RewriteError::NodeBudget { limit: self.max_nodes });
        }
        Ok(())
    }

    fn normalize(&mut self, t: &Term) -> Result<Term, RewriteError> {
        t.fold(|node| match node {
            Folded::Zero => Ok(Term::zero()),
            Folded::Var(v) => Ok(Term::var(v)),
            Folded::Succ(a) => {
                self.alloc(1)?;
                Ok(Term::succ(a))
            }
            Folded::Add(a, b) => self.add(a, &b),
            Folded::Mul(a, b) => self.mul(&a, &b),
        })
    }

    /// Normal form of `x + y` for normal `x`, `y`.
    fn add(&mut self, x: Term, y: &Term) -> Result<Term, RewriteError> {
        let (j, core) = y.peel_succ();
        // j applications of t+Su ~> S(t+u)
        self.step(j as u64)?;
        let inner = if core.is_zero() {
            self.step(1)?;
            x
        } else {
            self.alloc(1)?;
            Term::add(x, core.clone())
        };
        self.alloc(j as u64)?;
        Ok(Term::succs(j, inner))
    }

    /// Normal form of `x * y` for normal `x`, `y`.
    fn mul(&mut self, x: &Term, y: &Term) -> Result<Term, RewriteError> {
        let (k, core) = y.peel_succ();
        let mut acc = if core.is_zero() {
            self.step(1)?;
            Term::zero()
        } else if let Some(n) = x.is_zero().then(|| self.sys.lookup(core)).flatten() {
            self.step(1)?;
            let n = n.clone();
            let limit = self.max_nodes.saturating_sub(self.nodes);
            let t = unum_within(n.clone(), limit.saturating_add(1))?;
            self.alloc(t.size() as u64)?;
            t
        } else {
            self.alloc(1)?;
            Term::mul(x.clone(), core.clone())
        };
        for _ in 0..k {
            // x * S(u) ~> x*u + x
            self.step(1)?;
            acc = self.add(acc, x)?;
        }
        Ok(acc)
    }
}

/// The termination norm with base constant `c`:
/// `|x| = |0| = c`, `|St| = |t| + 3`, `|t+u| = |t| + 2|u|`, `|t*u| = |t| * |u|`.
///
/// Every rewrite step of `R_Q` extended by a system with `max n_i <= c - 2`
/// strictly decreases it.
pub fn norm_measure(t: &Term, c: &BigUint) -> BigUint {
    let three = BigUint::from(3u32);
    let r: Result<BigUint, std::convert::Infallible> = t.fold(|node| {
        Ok(match node {
            Folded::Zero | Folded::Var(_) => c.clone(),
            Folded::Succ(a) => a + &three,
            Folded::Add(a, b) => a + (b << 1),
            Folded::Mul(a, b) => a * b,
        })
    });
    match r {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// The unique decomposition of a normal term as `S^n 0` or `S^n t` with `t`
/// irreducible. Returns `None` for terms that are not normal.
pub fn normal_decomposition(t: &Term) -> Option<(usize, Option<&Term>)> {
    if !is_normal(t) {
        return None;
    }
    let (n, core) = t.peel_succ();
    Some((n, (!core.is_zero()).then_some(core)))
}
