//! Succinct descriptions of terms.
//!
//! Besides `0`, variables, `+` and `*`, a descriptor may use
//!
//! ```text
//! S_n(d)        S^n d                                     (n >= 1)
//! A_{n,m}(u)    S^n(...S^n(S^n(0 + u) + u)...) + u          (m >= 2 copies of u)
//! B_{n,m}(t,u)  S^n(...S^n(S^n(u)*t + u)...) + u            (m >= 1 copies of the
//!                                                           trailing + u)
//! ```
//!
//! with indices written in binary, so a descriptor can be exponentially
//! smaller than the term it denotes. Reduced forms have small descriptors
//! ([`desc_of_reduced`]), and minimal descriptors are canonical: two minimal
//! descriptors denote the same term iff they are identical. Together this
//! gives polynomial-time equality of reduced forms.
//!
//! Minimization uses the rules
//!
//! ```text
//! S_n(S_m(t))            ~> S_{n+m}(t)
//! S_n(0 + u) + u         ~> A_{n,2}(u)
//! S_n(u)*t + u           ~> B_{n,1}(t,u)
//! S_n(A_{n,m}(u)) + u    ~> A_{n,m+1}(u)
//! S_n(B_{n,m}(t,u)) + u  ~> B_{n,m+1}(t,u)
//! ```
//!
//! where `S_0(t)` is `t`. The third rule is matched up to merging of
//! successor stacks: `S_j(v)*t + S_k(v)` with `j >= k` is `B_{j-k,1}(t, S_k(v))`,
//! since `S_{j-k}(S_k(v))` is not itself minimal.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero as _};

use crate::parse::{Cursor, ParseError};
use crate::term::{Folded, Term, VarId, VarTable};
use crate::Budget;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DescriptorError {
    #[error("index out of range: {0}")]
    IndexRange(&'static str),
    #[error("expansion has {size} nodes, over the budget of {limit}")]
    Budget { size: BigUint, limit: u64 },
}

#[derive(Clone)]
pub struct Descriptor(Arc<DNode>);

#[derive(Clone)]
pub enum DNode {
    Zero,
    Var(VarId),
    Add(Descriptor, Descriptor),
    Mul(Descriptor, Descriptor),
    S(BigUint, Descriptor),
    A(BigUint, BigUint, Descriptor),
    B(BigUint, BigUint, Descriptor, Descriptor),
}

impl Deref for Descriptor {
    type Target = DNode;

    fn deref(&self) -> &DNode {
        &self.0
    }
}

/// A node whose children have been replaced by folded values.
pub enum DFolded<'a, T> {
    Zero,
    Var(VarId),
    Add(T, T),
    Mul(T, T),
    S(&'a BigUint, T),
    A(&'a BigUint, &'a BigUint, T),
    B(&'a BigUint, &'a BigUint, T, T),
}

impl Descriptor {
    fn node(n: DNode) -> Descriptor {
        Descriptor(Arc::new(n))
    }

    pub fn zero() -> Descriptor {
        Descriptor::node(DNode::Zero)
    }

    pub fn var(v: VarId) -> Descriptor {
        Descriptor::node(DNode::Var(v))
    }

    pub fn add(a: Descriptor, b: Descriptor) -> Descriptor {
        Descriptor::node(DNode::Add(a, b))
    }

    pub fn mul(a: Descriptor, b: Descriptor) -> Descriptor {
        Descriptor::node(DNode::Mul(a, b))
    }

    pub fn s(n: BigUint, d: Descriptor) -> Result<Descriptor, DescriptorError> {
        if n.is_zero() {
            return Err(DescriptorError::IndexRange("S_n needs n >= 1"));
        }
        Ok(Descriptor::node(DNode::S(n, d)))
    }

    pub fn a(n: BigUint, m: BigUint, u: Descriptor) -> Result<Descriptor, DescriptorError> {
        if m < BigUint::from(2u32) {
            return Err(DescriptorError::IndexRange("A_{n,m} needs m >= 2"));
        }
        Ok(Descriptor::node(DNode::A(n, m, u)))
    }

    pub fn b(n: BigUint, m: BigUint, t: Descriptor, u: Descriptor) -> Result<Descriptor, DescriptorError> {
        if m.is_zero() {
            return Err(DescriptorError::IndexRange("B_{n,m} needs m >= 1"));
        }
        Ok(Descriptor::node(DNode::B(n, m, t, u)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(**self, DNode::Zero)
    }

    /// Splits `S_n(core)` into `n` and `core` (`n = 0` if not `S`-rooted).
    pub fn peel(&self) -> (BigUint, &Descriptor) {
        let mut total = BigUint::zero();
        let mut cur = self;
        while let DNode::S(n, d) = &**cur {
            total += n;
            cur = d;
        }
        (total, cur)
    }

    /// Bottom-up evaluation without recursion.
    pub fn fold<'d, T>(&'d self, mut f: impl FnMut(DFolded<'d, T>) -> T) -> T {
        enum Frame<'a> {
            Enter(&'a Descriptor),
            Exit(&'a Descriptor),
        }
        let mut work = vec![Frame::Enter(self)];
        let mut vals: Vec<T> = Vec::new();
        while let Some(frame) = work.pop() {
            match frame {
                Frame::Enter(d) => match &**d {
                    DNode::Zero => vals.push(f(DFolded::Zero)),
                    DNode::Var(v) => vals.push(f(DFolded::Var(*v))),
                    DNode::S(_, a) | DNode::A(_, _, a) => {
                        work.push(Frame::Exit(d));
                        work.push(Frame::Enter(a));
                    }
                    DNode::Add(a, b) | DNode::Mul(a, b) | DNode::B(_, _, a, b) => {
                        work.push(Frame::Exit(d));
                        work.push(Frame::Enter(b));
                        work.push(Frame::Enter(a));
                    }
                },
                Frame::Exit(d) => {
                    let v = match &**d {
                        DNode::S(n, _) => {
                            let a = vals.pop().expect("child");
                            f(DFolded::S(n, a))
                        }
                        DNode::A(n, m, _) => {
                            let a = vals.pop().expect("child");
                            f(DFolded::A(n, m, a))
                        }
                        DNode::Add(..) | DNode::Mul(..) | DNode::B(..) => {
                            let b = vals.pop().expect("right child");
                            let a = vals.pop().expect("left child");
                            match &**d {
                                DNode::Add(..) => f(DFolded::Add(a, b)),
                                DNode::Mul(..) => f(DFolded::Mul(a, b)),
                                DNode::B(n, m, _, _) => f(DFolded::B(n, m, a, b)),
                                _ => unreachable!(),
                            }
                        }
                        DNode::Zero | DNode::Var(_) => unreachable!("leaves are never exited"),
                    };
                    vals.push(v);
                }
            }
        }
        vals.pop().expect("root value")
    }

    /// Number of nodes, each `S_n`, `A_{n,m}`, `B_{n,m}` counting as one.
    pub fn size(&self) -> usize {
        self.fold(|node| match node {
            DFolded::Zero | DFolded::Var(_) => 1,
            DFolded::S(_, a) | DFolded::A(_, _, a) => 1 + a,
            DFolded::Add(a, b) | DFolded::Mul(a, b) | DFolded::B(_, _, a, b) => 1 + a + b,
        })
    }

    /// Total bit length of all indices.
    pub fn index_bits(&self) -> u64 {
        self.fold(|node| match node {
            DFolded::Zero | DFolded::Var(_) => 0,
            DFolded::S(n, a) => n.bits() + a,
            DFolded::A(n, m, a) => n.bits() + m.bits() + a,
            DFolded::Add(a, b) | DFolded::Mul(a, b) => a + b,
            DFolded::B(n, m, a, b) => n.bits() + m.bits() + a + b,
        })
    }

    pub fn render<'a>(&'a self, names: &'a VarTable) -> impl fmt::Display + 'a {
        struct R<'a>(&'a Descriptor, &'a VarTable);
        impl fmt::Display for R<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&render_with(self.0, Some(self.1)))
            }
        }
        R(self, names)
    }
}

fn render_with(d: &Descriptor, names: Option<&VarTable>) -> String {
    d.fold(|node| match node {
        DFolded::Zero => "0".to_string(),
        DFolded::Var(v) => match names {
            Some(n) => n.name(v),
            None => format!("x{v}"),
        },
        DFolded::Add(a, b) => format!("({a} + {b})"),
        DFolded::Mul(a, b) => format!("({a}*{b})"),
        DFolded::S(n, a) => format!("S[{n}]({a})"),
        DFolded::A(n, m, a) => format!("A[{n},{m}]({a})"),
        DFolded::B(n, m, a, b) => format!("B[{n},{m}]({a},{b})"),
    })
}

// Dropping a deep term recursively would overflow the stack, so children
// are detached onto an explicit stack first.
impl Drop for Descriptor {
    fn drop(&mut self) {
        let Some(node) = Arc::get_mut(&mut self.0) else { return };
        let mut stack: Vec<Descriptor> = Vec::new();
        take_children(node, &mut stack);
        while let Some(mut t) = stack.pop() {
            if let Some(node) = Arc::get_mut(&mut t.0) {
                take_children(node, &mut stack);
            }
        }
    }
}

fn take_children(node: &mut DNode, out: &mut Vec<Descriptor>) {
    match std::mem::replace(node, DNode::Zero) {
        DNode::Zero | DNode::Var(_) => {}
        DNode::S(_, a) | DNode::A(_, _, a) => out.push(a),
        DNode::Add(a, b) | DNode::Mul(a, b) | DNode::B(_, _, a, b) => {
            out.push(a);
            out.push(b);
        }
    }
}

impl PartialEq for Descriptor {
    fn eq(&self, other: &Descriptor) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            if Arc::ptr_eq(&a.0, &b.0) {
                continue;
            }
            match (&**a, &**b) {
                (DNode::Zero, DNode::Zero) => {}
                (DNode::Var(x), DNode::Var(y)) if x == y => {}
                (DNode::Add(a0, a1), DNode::Add(b0, b1)) | (DNode::Mul(a0, a1), DNode::Mul(b0, b1)) => {
                    stack.push((a1, b1));
                    stack.push((a0, b0));
                }
                (DNode::S(n, a0), DNode::S(m, b0)) if n == m => stack.push((a0, b0)),
                (DNode::A(n, m, a0), DNode::A(k, l, b0)) if n == k && m == l => stack.push((a0, b0)),
                (DNode::B(n, m, a0, a1), DNode::B(k, l, b0, b1)) if n == k && m == l => {
                    stack.push((a1, b1));
                    stack.push((a0, b0));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Descriptor {}

impl Hash for Descriptor {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            match &**d {
                DNode::Zero => state.write_u8(0),
                DNode::Var(v) => {
                    state.write_u8(1);
                    state.write_u32(*v);
                }
                DNode::Add(a, b) => {
                    state.write_u8(2);
                    stack.push(b);
                    stack.push(a);
                }
                DNode::Mul(a, b) => {
                    state.write_u8(3);
                    stack.push(b);
                    stack.push(a);
                }
                DNode::S(n, a) => {
                    state.write_u8(4);
                    n.hash(state);
                    stack.push(a);
                }
                DNode::A(n, m, a) => {
                    state.write_u8(5);
                    n.hash(state);
                    m.hash(state);
                    stack.push(a);
                }
                DNode::B(n, m, a, b) => {
                    state.write_u8(6);
                    n.hash(state);
                    m.hash(state);
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
    }
}

impl fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_with(self, None))
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_with(self, None))
    }
}

// --- minimization -----------------------------------------------------------

/// `S_n(d)` for minimal `d`, merging successor stacks.
pub fn mk_s(n: &BigUint, d: Descriptor) -> Descriptor {
    if n.is_zero() {
        return d;
    }
    match &*d {
        DNode::S(k, inner) => Descriptor::node(DNode::S(n + k, inner.clone())),
        _ => Descriptor::node(DNode::S(n.clone(), d)),
    }
}

/// The contraction of `a + b` at the root, if one of the addition rules
/// applies. `a` and `b` must be minimal.
fn add_rule(a: &Descriptor, b: &Descriptor) -> Option<Descriptor> {
    let (n, core) = a.peel();
    match &**core {
        DNode::Add(z, u) if z.is_zero() && u == b => Some(Descriptor::node(DNode::A(n, BigUint::from(2u32), b.clone()))),
        DNode::A(k, m, u) if *k == n && u == b => Some(Descriptor::node(DNode::A(n, m + 1u32, u.clone()))),
        DNode::B(k, m, t, u) if *k == n && u == b => {
            Some(Descriptor::node(DNode::B(n, m + 1u32, t.clone(), u.clone())))
        }
        DNode::Mul(x, t) if n.is_zero() => {
            let (j, w) = x.peel();
            let (k, v) = b.peel();
            (w == v && j >= k).then(|| Descriptor::node(DNode::B(j - k, BigUint::one(), t.clone(), b.clone())))
        }
        _ => None,
    }
}

/// `a + b` for minimal `a`, `b`; the result is minimal.
pub fn mk_add(a: Descriptor, b: Descriptor) -> Descriptor {
    add_rule(&a, &b).unwrap_or_else(|| Descriptor::add(a, b))
}

/// Applies the minimization rules until none applies. Innermost first, so
/// each node is contracted at most once after its children are minimal.
pub fn minimize(d: &Descriptor) -> Descriptor {
    d.fold(|node| match node {
        DFolded::Zero => Descriptor::zero(),
        DFolded::Var(v) => Descriptor::var(v),
        DFolded::Add(a, b) => mk_add(a, b),
        DFolded::Mul(a, b) => Descriptor::mul(a, b),
        DFolded::S(n, a) => mk_s(n, a),
        DFolded::A(n, m, a) => Descriptor::node(DNode::A(n.clone(), m.clone(), a)),
        DFolded::B(n, m, a, b) => Descriptor::node(DNode::B(n.clone(), m.clone(), a, b)),
    })
}

/// No minimization rule applies anywhere in `d`.
pub fn is_minimal(d: &Descriptor) -> bool {
    let mut stack = vec![d];
    while let Some(d) = stack.pop() {
        match &**d {
            DNode::Zero | DNode::Var(_) => {}
            DNode::S(_, a) => {
                if matches!(**a, DNode::S(..)) {
                    return false;
                }
                stack.push(a);
            }
            DNode::A(_, _, a) => stack.push(a),
            DNode::Add(a, b) => {
                if add_rule(a, b).is_some() {
                    return false;
                }
                stack.push(a);
                stack.push(b);
            }
            DNode::Mul(a, b) | DNode::B(_, _, a, b) => {
                stack.push(a);
                stack.push(b);
            }
        }
    }
    true
}

/// Structural identity of the denoted terms.
pub fn desc_equal(d1: &Descriptor, d2: &Descriptor) -> bool {
    minimize(d1) == minimize(d2)
}

/// `k` if `d` denotes the numeral `S^k 0`.
pub fn numeral_value(d: &Descriptor) -> Option<BigUint> {
    let m = minimize(d);
    match &*m {
        DNode::Zero => Some(BigUint::zero()),
        DNode::S(k, inner) if inner.is_zero() => Some(k.clone()),
        _ => None,
    }
}

// --- expansion --------------------------------------------------------------

/// Number of nodes of the denoted term.
pub fn expanded_size(d: &Descriptor) -> BigUint {
    d.fold(|node| match node {
        DFolded::Zero | DFolded::Var(_) => BigUint::one(),
        DFolded::Add(a, b) | DFolded::Mul(a, b) => a + b + 1u32,
        DFolded::S(n, a) => a + n,
        // 0 + u, then m - 1 times S^n(_) + u
        DFolded::A(n, m, u) => {
            let step = n + 1u32 + &u;
            u + 2u32 + (m - 1u32) * step
        }
        // S^n(u)*t + u, then m - 1 times S^n(_) + u
        DFolded::B(n, m, t, u) => {
            let step = n + 1u32 + &u;
            BigUint::from(2u32) + n + (&u << 1) + t + (m - 1u32) * step
        }
    })
}

/// The term denoted by `d`, refusing expansions over `budget.expand_nodes`.
pub fn expand(d: &Descriptor) -> Result<Term, DescriptorError> {
    expand_within(d, &Budget::default())
}

pub fn expand_within(d: &Descriptor, budget: &Budget) -> Result<Term, DescriptorError> {
    let size = expanded_size(d);
    if size > BigUint::from(budget.expand_nodes) {
        return Err(DescriptorError::Budget { size, limit: budget.expand_nodes });
    }
    let small = |n: &BigUint| n.to_usize().expect("bounded by the size check");
    Ok(d.fold(|node| match node {
        DFolded::Zero => Term::zero(),
        DFolded::Var(v) => Term::var(v),
        DFolded::Add(a, b) => Term::add(a, b),
        DFolded::Mul(a, b) => Term::mul(a, b),
        DFolded::S(n, a) => Term::succs(small(n), a),
        DFolded::A(n, m, u) => {
            let n = small(n);
            let mut acc = Term::add(Term::zero(), u.clone());
            for _ in 1..small(m) {
                acc = Term::add(Term::succs(n, acc), u.clone());
            }
            acc
        }
        DFolded::B(n, m, t, u) => {
            let n = small(n);
            let mut acc = Term::add(Term::mul(Term::succs(n, u.clone()), t), u.clone());
            for _ in 1..small(m) {
                acc = Term::add(Term::succs(n, acc), u.clone());
            }
            acc
        }
    }))
}

// --- reduced forms ----------------------------------------------------------

/// A reduced term `S^succs(core)` where `core` is `0` or denotes an
/// irreducible term, and is minimal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedDesc {
    pub succs: BigUint,
    pub core: Descriptor,
}

impl ReducedDesc {
    pub fn zero() -> ReducedDesc {
        ReducedDesc::numeral(BigUint::zero())
    }

    pub fn numeral(n: BigUint) -> ReducedDesc {
        ReducedDesc { succs: n, core: Descriptor::zero() }
    }

    pub fn var(v: VarId) -> ReducedDesc {
        ReducedDesc { succs: BigUint::zero(), core: Descriptor::var(v) }
    }

    pub fn numeral_value(&self) -> Option<&BigUint> {
        self.core.is_zero().then_some(&self.succs)
    }

    /// The minimal descriptor of the whole term.
    pub fn to_descriptor(&self) -> Descriptor {
        mk_s(&self.succs, self.core.clone())
    }

    pub fn succ(self) -> ReducedDesc {
        ReducedDesc { succs: self.succs + 1u32, core: self.core }
    }

    /// Reduced form of `x + y`.
    pub fn add(&self, y: &ReducedDesc) -> ReducedDesc {
        if y.core.is_zero() {
            return ReducedDesc { succs: &self.succs + &y.succs, core: self.core.clone() };
        }
        ReducedDesc { succs: y.succs.clone(), core: mk_add(self.to_descriptor(), y.core.clone()) }
    }

    /// Reduced form of `x * y` (with respect to the empty system).
    pub fn mul(&self, y: &ReducedDesc) -> ReducedDesc {
        self.mul_in(y, &HashMap::new())
    }

    /// Reduced form of `x * y` relative to a system `{0 * c = n}`, given as
    /// a map from minimal descriptors of the irreducible terms `c` to `n`.
    pub fn mul_in(&self, y: &ReducedDesc, sys: &HashMap<Descriptor, BigUint>) -> ReducedDesc {
        let (n, t) = (&self.succs, &self.core);
        let (m, u) = (&y.succs, &y.core);
        match (t.is_zero(), u.is_zero()) {
            (true, true) => ReducedDesc::numeral(n * m),
            (true, false) if n.is_zero() => match sys.get(u) {
                Some(value) => ReducedDesc::numeral(value.clone()),
                None => ReducedDesc { succs: BigUint::zero(), core: Descriptor::mul(Descriptor::zero(), u.clone()) },
            },
            (true, false) => {
                let left = mk_s(n, Descriptor::zero());
                ReducedDesc { succs: n * m, core: Descriptor::mul(left, u.clone()) }
            }
            (false, true) => {
                if m.is_zero() {
                    ReducedDesc::zero()
                } else if m.is_one() {
                    ReducedDesc { succs: n.clone(), core: Descriptor::add(Descriptor::zero(), t.clone()) }
                } else {
                    ReducedDesc { succs: n.clone(), core: Descriptor::node(DNode::A(n.clone(), m.clone(), t.clone())) }
                }
            }
            (false, false) => {
                if m.is_zero() {
                    ReducedDesc { succs: BigUint::zero(), core: Descriptor::mul(self.to_descriptor(), u.clone()) }
                } else {
                    ReducedDesc {
                        succs: n.clone(),
                        core: Descriptor::node(DNode::B(n.clone(), m.clone(), u.clone(), t.clone())),
                    }
                }
            }
        }
    }
}

/// The reduced form of `t` (empty system) as a successor count and core.
pub fn reduced_pair(t: &Term) -> ReducedDesc {
    reduced_pair_in(t, &BTreeMap::new(), &HashMap::new())
}

/// The value of `t` in the reduced-term model of the system `sys` (see
/// [`ReducedDesc::mul_in`]), with the variables in `valuation` set to
/// numerals and all others denoting themselves.
pub fn reduced_pair_in(
    t: &Term,
    valuation: &BTreeMap<VarId, BigUint>,
    sys: &HashMap<Descriptor, BigUint>,
) -> ReducedDesc {
    let r: Result<ReducedDesc, std::convert::Infallible> = t.fold(|node: Folded<ReducedDesc>| {
        Ok(match node {
            Folded::Zero => ReducedDesc::zero(),
            Folded::Var(v) => match valuation.get(&v) {
                Some(k) => ReducedDesc::numeral(k.clone()),
                None => ReducedDesc::var(v),
            },
            Folded::Succ(a) => a.succ(),
            Folded::Add(a, b) => a.add(&b),
            Folded::Mul(a, b) => a.mul_in(&b, sys),
        })
    });
    match r {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// A minimal descriptor of `red(t)`, computed in polynomial time.
pub fn desc_of_reduced(t: &Term) -> Descriptor {
    reduced_pair(t).to_descriptor()
}

// --- text form --------------------------------------------------------------

impl Cursor<'_, '_> {
    fn desc_sum(&mut self) -> Result<Descriptor, ParseError> {
        let mut acc = self.desc_product()?;
        while self.eat(b'+') {
            let rhs = self.desc_product()?;
            acc = Descriptor::add(acc, rhs);
        }
        Ok(acc)
    }

    fn desc_product(&mut self) -> Result<Descriptor, ParseError> {
        let mut acc = self.desc_atom()?;
        while self.eat(b'*') {
            let rhs = self.desc_atom()?;
            acc = Descriptor::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn desc_indices(&mut self, count: usize) -> Result<Vec<BigUint>, ParseError> {
        let mut out = Vec::new();
        for i in 0..count {
            if i > 0 {
                self.expect(b',')?;
            }
            out.push(self.digits()?);
        }
        self.expect(b']')?;
        Ok(out)
    }

    fn desc_args(&mut self, count: usize) -> Result<Vec<Descriptor>, ParseError> {
        self.expect(b'(')?;
        let mut out = Vec::new();
        for i in 0..count {
            if i > 0 {
                self.expect(b',')?;
            }
            out.push(self.desc_sum()?);
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn desc_atom(&mut self) -> Result<Descriptor, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let d = self.desc_sum()?;
                self.expect(b')')?;
                Ok(d)
            }
            Some(b'0') => {
                let at = self.pos;
                if !self.digits()?.is_zero() {
                    return Err(ParseError { pos: at, message: "numerals other than 0 need S[n](0)".into() });
                }
                Ok(Descriptor::zero())
            }
            Some(_) => {
                let at = self.pos;
                let Some(name) = self.ident() else {
                    return self.error("expected a descriptor");
                };
                let range = |r: Result<Descriptor, DescriptorError>| {
                    r.map_err(|e| ParseError { pos: at, message: e.to_string() })
                };
                match (name, self.peek()) {
                    ("S", Some(b'(')) => {
                        let mut args = self.desc_args(1)?;
                        range(Descriptor::s(BigUint::one(), args.remove(0)))
                    }
                    ("S", Some(b'[')) => {
                        self.pos += 1;
                        let ix = self.desc_indices(1)?;
                        let mut args = self.desc_args(1)?;
                        range(Descriptor::s(ix[0].clone(), args.remove(0)))
                    }
                    ("A", Some(b'[')) => {
                        self.pos += 1;
                        let ix = self.desc_indices(2)?;
                        let mut args = self.desc_args(1)?;
                        range(Descriptor::a(ix[0].clone(), ix[1].clone(), args.remove(0)))
                    }
                    ("B", Some(b'[')) => {
                        self.pos += 1;
                        let ix = self.desc_indices(2)?;
                        let mut args = self.desc_args(2)?;
                        let u = args.pop().expect("two arguments");
                        let t = args.pop().expect("two arguments");
                        range(Descriptor::b(ix[0].clone(), ix[1].clone(), t, u))
                    }
                    ("S", _) => self.error("expected '(' or '[' after S"),
                    _ => Ok(Descriptor::var(self.variable(name, at)?)),
                }
            }
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses the text form: `0`, variables, `+`, `*`, `S[n](d)`, `S(d)`,
/// `A[n,m](d)`, `B[n,m](t,u)`.
pub fn parse_descriptor(text: &str) -> Result<Descriptor, ParseError> {
    parse_descriptor_with(text, &mut VarTable::new())
}

pub fn parse_descriptor_with(text: &str, vars: &mut VarTable) -> Result<Descriptor, ParseError> {
    let mut c = Cursor::new(text, vars);
    let d = c.desc_sum()?;
    c.finish()?;
    Ok(d)
}
