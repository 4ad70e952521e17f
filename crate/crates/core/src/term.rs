//! Terms of the language `{0, S, +, *}` over indexed variables.
//!
//! A [`Term`] is an immutable, reference-counted tree. Subterms may be shared
//! between terms; equality is always structural. Successor chains can be very
//! long (unary numerals), so equality, hashing, size and drop are implemented
//! without recursion.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

use crate::Budget;

pub type VarId = u32;

/// Default cap on variable indices.
pub const DEFAULT_MAX_VARS: u32 = 1 << 16;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("unary numeral {value} exceeds the node budget of {limit}")]
    NumeralTooLarge { value: BigUint, limit: u64 },
}

#[derive(Clone)]
pub struct Term(Arc<Node>);

#[derive(Clone)]
pub enum Node {
    Zero,
    Var(VarId),
    Succ(Term),
    Add(Term, Term),
    Mul(Term, Term),
}

impl Deref for Term {
    type Target = Node;

    fn deref(&self) -> &Node {
        &self.0
    }
}

impl Term {
    pub fn zero() -> Term {
        Term(Arc::new(Node::Zero))
    }

    pub fn var(id: VarId) -> Term {
        Term(Arc::new(Node::Var(id)))
    }

    pub fn succ(t: Term) -> Term {
        Term(Arc::new(Node::Succ(t)))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term(Arc::new(Node::Add(a, b)))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term(Arc::new(Node::Mul(a, b)))
    }

    /// `S^n(t)`.
    pub fn succs(n: usize, t: Term) -> Term {
        (0..n).fold(t, |acc, _| Term::succ(acc))
    }

    pub fn is_zero(&self) -> bool {
        matches!(**self, Node::Zero)
    }

    pub fn is_succ(&self) -> bool {
        matches!(**self, Node::Succ(_))
    }

    pub fn ptr_eq(a: &Term, b: &Term) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    /// Splits `S^n(core)` into `n` and `core`, where `core` is not a successor.
    pub fn peel_succ(&self) -> (usize, &Term) {
        let mut n = 0;
        let mut cur = self;
        while let Node::Succ(inner) = &**cur {
            n += 1;
            cur = inner;
        }
        (n, cur)
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Children<'_> {
        match &**self {
            Node::Zero | Node::Var(_) => Children::None,
            Node::Succ(a) => Children::One(a),
            Node::Add(a, b) | Node::Mul(a, b) => Children::Two(a, b),
        }
    }

    /// Number of nodes of the tree (shared subterms counted once per occurrence).
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            count += 1;
            match &**t {
                Node::Zero | Node::Var(_) => {}
                Node::Succ(a) => stack.push(a),
                Node::Add(a, b) | Node::Mul(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        count
    }

    /// Number of distinct allocated nodes, i.e. the size of the term as a DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !seen.insert(Arc::as_ptr(&t.0)) {
                continue;
            }
            match &**t {
                Node::Zero | Node::Var(_) => {}
                Node::Succ(a) => stack.push(a),
                Node::Add(a, b) | Node::Mul(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        seen.len()
    }

    /// Variables in order of first occurrence (pre-order), without duplicates.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match &**t {
                Node::Zero => {}
                Node::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v);
                    }
                }
                Node::Succ(a) => stack.push(a),
                Node::Add(a, b) | Node::Mul(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Bottom-up evaluation without recursion. `f` receives each node with
    /// the results for its children already computed.
    pub fn fold<T, E>(&self, mut f: impl FnMut(Folded<T>) -> Result<T, E>) -> Result<T, E> {
        enum Frame<'a> {
            Enter(&'a Term),
            Exit(&'a Term),
        }
        let mut work = vec![Frame::Enter(self)];
        let mut vals: Vec<T> = Vec::new();
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(t) => match &**t {
                    Node::Zero => vals.push(f(Folded::Zero)?),
                    Node::Var(v) => vals.push(f(Folded::Var(*v))?),
                    Node::Succ(a) => {
                        work.push(Frame::Exit(t));
                        work.push(Frame::Enter(a));
                    }
                    Node::Add(a, b) | Node::Mul(a, b) => {
                        work.push(Frame::Exit(t));
                        work.push(Frame::Enter(b));
                        work.push(Frame::Enter(a));
                    }
                },
                Frame::Exit(t) => {
                    let v = match &**t {
                        Node::Succ(_) => {
                            let a = vals.pop().expect("child value");
                            f(Folded::Succ(a))?
                        }
                        Node::Add(..) | Node::Mul(..) => {
                            let b = vals.pop().expect("right value");
                            let a = vals.pop().expect("left value");
                            if matches!(&**t, Node::Add(..)) {
                                f(Folded::Add(a, b))?
                            } else {
                                f(Folded::Mul(a, b))?
                            }
                        }
                        Node::Zero | Node::Var(_) => unreachable!("leaves are never exited"),
                    };
                    vals.push(v);
                }
            }
        }
        Ok(vals.pop().expect("root value"))
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// Resolves a path to the subterm occurrence it names.
    pub fn at(&self, path: &Path) -> Option<&Term> {
        let mut cur = self;
        for step in path.steps() {
            cur = match (step, &**cur) {
                (Step::Succ, Node::Succ(a)) => a,
                (Step::AddLeft, Node::Add(a, _)) | (Step::MulLeft, Node::Mul(a, _)) => a,
                (Step::AddRight, Node::Add(_, b)) | (Step::MulRight, Node::Mul(_, b)) => b,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Rebuilds the term with the occurrence at `path` replaced by `with`.
    pub fn replace_at(&self, path: &Path, with: Term) -> Option<Term> {
        fn go(t: &Term, steps: &[Step], with: Term) -> Option<Term> {
            let Some((first, rest)) = steps.split_first() else {
                return Some(with);
            };
            Some(match (first, &**t) {
                (Step::Succ, Node::Succ(a)) => Term::succ(go(a, rest, with)?),
                (Step::AddLeft, Node::Add(a, b)) => Term::add(go(a, rest, with)?, b.clone()),
                (Step::AddRight, Node::Add(a, b)) => Term::add(a.clone(), go(b, rest, with)?),
                (Step::MulLeft, Node::Mul(a, b)) => Term::mul(go(a, rest, with)?, b.clone()),
                (Step::MulRight, Node::Mul(a, b)) => Term::mul(a.clone(), go(b, rest, with)?),
                _ => return None,
            })
        }
        go(self, path.steps(), with)
    }

    /// Recognizes terms of the exact shape produced by [`bnum`].
    pub fn as_binary_numeral(&self) -> Option<BigUint> {
        match &**self {
            Node::Zero => Some(BigUint::zero()),
            Node::Succ(inner) => match &**inner {
                Node::Zero => Some(BigUint::one()),
                Node::Mul(..) => inner.as_binary_numeral().map(|v| v + 1u32),
                _ => None,
            },
            Node::Mul(two, rest) => {
                if !is_unary_two(two) {
                    return None;
                }
                let v = rest.as_binary_numeral()?;
                if v.is_zero() {
                    None
                } else {
                    Some(v << 1)
                }
            }
            _ => None,
        }
    }

    /// Value of `S^n 0`, if the term is a unary numeral.
    pub fn as_unary_numeral(&self) -> Option<usize> {
        let (n, core) = self.peel_succ();
        core.is_zero().then_some(n)
    }

    pub fn render<'a>(&'a self, names: &'a VarTable) -> Render<'a> {
        Render { term: self, names: Some(names), display: false }
    }

    /// Human-oriented rendering: successor chains are shown as `S^k(..)`.
    /// Not accepted by the parser.
    pub fn display<'a>(&'a self, names: &'a VarTable) -> Render<'a> {
        Render { term: self, names: Some(names), display: true }
    }
}

fn is_unary_two(t: &Term) -> bool {
    t.as_unary_numeral() == Some(2)
}

/// A node whose children have been replaced by folded values.
pub enum Folded<T> {
    Zero,
    Var(VarId),
    Succ(T),
    Add(T, T),
    Mul(T, T),
}

pub enum Children<'a> {
    None,
    One(&'a Term),
    Two(&'a Term, &'a Term),
}

// Dropping a deep term recursively would overflow the stack, so children
// are detached onto an explicit stack first.
impl Drop for Term {
    fn drop(&mut self) {
        let Some(node) = Arc::get_mut(&mut self.0) else { return };
        let mut stack: Vec<Term> = Vec::new();
        take_children(node, &mut stack);
        while let Some(mut t) = stack.pop() {
            if let Some(node) = Arc::get_mut(&mut t.0) {
                take_children(node, &mut stack);
            }
        }
    }
}

fn take_children(node: &mut Node, out: &mut Vec<Term>) {
    match std::mem::replace(node, Node::Zero) {
        Node::Zero | Node::Var(_) => {}
        Node::Succ(a) => out.push(a),
        Node::Add(a, b) | Node::Mul(a, b) => {
            out.push(a);
            out.push(b);
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if Term::ptr_eq(a, b) {
                continue;
            }
            match (&**a, &**b) {
                (Node::Zero, Node::Zero) => {}
                (Node::Var(x), Node::Var(y)) if x == y => {}
                (Node::Succ(x), Node::Succ(y)) => stack.push((x, y)),
                (Node::Add(x0, x1), Node::Add(y0, y1)) | (Node::Mul(x0, x1), Node::Mul(y0, y1)) => {
                    stack.push((x1, y1));
                    stack.push((x0, y0));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match &**t {
                Node::Zero => state.write_u8(0),
                Node::Var(v) => {
                    state.write_u8(1);
                    state.write_u32(*v);
                }
                Node::Succ(a) => {
                    state.write_u8(2);
                    stack.push(a);
                }
                Node::Add(a, b) => {
                    state.write_u8(3);
                    stack.push(b);
                    stack.push(a);
                }
                Node::Mul(a, b) => {
                    state.write_u8(4);
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, None, true)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, None, false)
    }
}

// --- numerals -------------------------------------------------------------

/// Binary numeral: `bnum(0) = 0`, `bnum(2n) = SS0 * bnum(n)`, `bnum(2n+1) = S(bnum(2n))`.
///
/// The `SS0` factor is shared between all levels, so the DAG size is
/// `O(log n)`.
pub fn bnum<N: Into<BigUint>>(n: N) -> Term {
    let n: BigUint = n.into();
    let two = Term::succs(2, Term::zero());
    let mut acc = Term::zero();
    let mut nonzero = false;
    for i in (0..n.bits()).rev() {
        if nonzero {
            acc = Term::mul(two.clone(), acc);
        }
        if n.bit(i) {
            acc = Term::succ(acc);
            nonzero = true;
        }
    }
    acc
}

/// Unary numeral `S^n 0`, refusing to build more than [`Budget::term_nodes`] nodes.
pub fn unum<N: Into<BigUint>>(n: N) -> Result<Term, TermError> {
    unum_within(n, Budget::default().term_nodes)
}

pub fn unum_within<N: Into<BigUint>>(n: N, limit: u64) -> Result<Term, TermError> {
    let n: BigUint = n.into();
    match n.to_u64() {
        Some(k) if k < limit => Ok(Term::succs(k as usize, Term::zero())),
        _ => Err(TermError::NumeralTooLarge { value: n, limit }),
    }
}

// --- paths ----------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    Succ,
    AddLeft,
    AddRight,
    MulLeft,
    MulRight,
}

/// A sequence of child selectors from the root of a term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<Step>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn child(&self, step: Step) -> Path {
        let mut v = self.0.clone();
        v.push(step);
        Path(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<Step>> for Path {
    fn from(v: Vec<Step>) -> Path {
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(match s {
                Step::Succ => "s",
                Step::AddLeft | Step::MulLeft => "l",
                Step::AddRight | Step::MulRight => "r",
            })?;
        }
        Ok(())
    }
}

/// Pre-order enumeration of all subterm occurrences.
pub fn subterm_occurrences(t: &Term) -> Vec<(Path, Term)> {
    let mut out = Vec::new();
    let mut stack = vec![(Path::root(), t.clone())];
    while let Some((p, u)) = stack.pop() {
        match &*u {
            Node::Zero | Node::Var(_) => {}
            Node::Succ(a) => stack.push((p.child(Step::Succ), a.clone())),
            Node::Add(a, b) => {
                stack.push((p.child(Step::AddRight), b.clone()));
                stack.push((p.child(Step::AddLeft), a.clone()));
            }
            Node::Mul(a, b) => {
                stack.push((p.child(Step::MulRight), b.clone()));
                stack.push((p.child(Step::MulLeft), a.clone()));
            }
        }
        out.push((p, u));
    }
    out
}

// --- equations ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v = self.lhs.vars();
        for x in self.rhs.vars() {
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    }

    pub fn render<'a>(&'a self, names: &'a VarTable) -> impl fmt::Display + 'a {
        struct R<'a>(&'a Equation, &'a VarTable);
        impl fmt::Display for R<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} = {}", self.0.lhs.render(self.1), self.0.rhs.render(self.1))
            }
        }
        R(self, names)
    }
}

// --- variable names -------------------------------------------------------

/// Maps source-level variable names to indices, in order of first occurrence.
#[derive(Clone, Debug)]
pub struct VarTable {
    names: Vec<String>,
    max_vars: u32,
}

impl Default for VarTable {
    fn default() -> Self {
        VarTable { names: Vec::new(), max_vars: DEFAULT_MAX_VARS }
    }
}

impl VarTable {
    pub fn new() -> VarTable {
        VarTable::default()
    }

    pub fn with_max_vars(max_vars: u32) -> VarTable {
        VarTable { names: Vec::new(), max_vars }
    }

    /// A table naming the first variables `x, y, z, u, v, w`.
    pub fn conventional() -> VarTable {
        let mut t = VarTable::new();
        for n in ["x", "y", "z", "u", "v", "w"] {
            t.names.push(n.to_string());
        }
        t
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name).map(|i| i as VarId)
    }

    pub fn intern(&mut self, name: &str) -> Option<VarId> {
        if let Some(id) = self.lookup(name) {
            return Some(id);
        }
        if self.names.len() as u64 >= self.max_vars as u64 {
            return None;
        }
        self.names.push(name.to_string());
        Some((self.names.len() - 1) as VarId)
    }

    pub fn name(&self, id: VarId) -> String {
        match self.names.get(id as usize) {
            Some(n) => n.clone(),
            None => format!("x{id}"),
        }
    }
}

// --- rendering ------------------------------------------------------------

pub struct Render<'a> {
    term: &'a Term,
    names: Option<&'a VarTable>,
    display: bool,
}

impl fmt::Display for Render<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self.term, self.names, self.display)
    }
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    t: &Term,
    names: Option<&VarTable>,
    display: bool,
) -> fmt::Result {
    if let Some(v) = t.as_binary_numeral() {
        if v > BigUint::one() {
            return write!(f, "#{v}");
        }
    }
    match &**t {
        Node::Zero => f.write_str("0"),
        Node::Var(v) => match names {
            Some(n) => f.write_str(&n.name(*v)),
            None => write!(f, "x{v}"),
        },
        Node::Succ(_) => {
            let (n, core) = t.peel_succ();
            if display && n > 1 {
                write!(f, "S^{n}(")?;
                write_term(f, core, names, display)?;
                return f.write_str(")");
            }
            for _ in 0..n {
                f.write_str("S(")?;
            }
            write_term(f, core, names, display)?;
            for _ in 0..n {
                f.write_str(")")?;
            }
            Ok(())
        }
        Node::Add(a, b) => {
            f.write_str("(")?;
            write_term(f, a, names, display)?;
            f.write_str(" + ")?;
            write_term(f, b, names, display)?;
            f.write_str(")")
        }
        Node::Mul(a, b) => {
            f.write_str("(")?;
            write_term(f, a, names, display)?;
            f.write_str("*")?;
            write_term(f, b, names, display)?;
            f.write_str(")")
        }
    }
}
