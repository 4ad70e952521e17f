//! Witnesses for `Q`-satisfiability of systems `t_1 = n_1, ..., t_k = n_k`.
//!
//! A witness labels some subterm occurrences with numbers `0..=N`, where `N`
//! is the largest right-hand side. Writing `u_l` for `u` with its maximal
//! proper labelled subterms replaced by their labels (as numerals), a
//! labelling is a witness when
//!
//! 1. each `t_j` is labelled `n_j`;
//! 2. occurrences with the same `red(u_l)` carry the same label (or none);
//! 3. a labelled occurrence whose `red(u_l)` is a numeral is labelled with it;
//! 4. the children of a labelled occurrence are labelled, except that a
//!    product may have an unlabelled factor when the other factor is
//!    labelled 0.
//!
//! Conditions 2 and 3 only need `red(u_l)` up to identity, which the
//! descriptor pair algebra provides in polynomial time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero as _;

use crate::descriptor::{expand_within, Descriptor, DescriptorError, ReducedDesc};
use crate::rewrite::ReducedSystem;
use crate::term::{bnum, unum_within, Node, Path, Step, Term, VarId};
use crate::Budget;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("equation {equation} has no subterm at {path}")]
    InvalidPath { equation: usize, path: Path },
    #[error("labelling is not a witness: {0}")]
    NotAWitness(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error("unary numeral for {0} exceeds the term budget")]
    Budget(BigUint),
}

/// A system together with a partial labelling of each equation's
/// occurrences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub system: Vec<(Term, BigUint)>,
    /// One map per equation, from occurrence path to label.
    pub labels: Vec<BTreeMap<Path, BigUint>>,
}

impl Witness {
    /// The label bound `N`: the largest right-hand side.
    pub fn bound(&self) -> BigUint {
        label_bound(&self.system)
    }
}

pub(crate) fn label_bound(system: &[(Term, BigUint)]) -> BigUint {
    system.iter().map(|(_, n)| n).max().cloned().unwrap_or_default()
}

/// Where a violation happened: equation index and occurrence path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Site {
    pub equation: usize,
    pub path: Path,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "equation {} at {}", self.equation, self.path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessViolation {
    /// The labels do not match the system's shape.
    Shape(String),
    InvalidPath(Site),
    LabelTooLarge { site: Site, label: BigUint },
    RootLabel { equation: usize, expected: BigUint, found: Option<BigUint> },
    Inconsistent { first: Site, second: Site },
    NumeralMismatch { site: Site, label: BigUint, reduced: BigUint },
    UnlabelledChild { site: Site },
}

impl fmt::Display for WitnessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessViolation::Shape(s) => f.write_str(s),
            WitnessViolation::InvalidPath(s) => write!(f, "no occurrence at {s}"),
            WitnessViolation::LabelTooLarge { site, label } => write!(f, "label {label} at {site} exceeds the bound"),
            WitnessViolation::RootLabel { equation, expected, found } => match found {
                Some(k) => write!(f, "equation {equation} is labelled {k}, expected {expected}"),
                None => write!(f, "equation {equation} is unlabelled, expected {expected}"),
            },
            WitnessViolation::Inconsistent { first, second } => {
                write!(f, "{first} and {second} have the same reduced form but different labels")
            }
            WitnessViolation::NumeralMismatch { site, label, reduced } => {
                write!(f, "{site} is labelled {label} but reduces to {reduced}")
            }
            WitnessViolation::UnlabelledChild { site } => write!(f, "{site} is labelled but has an unlabelled child"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessReport {
    pub violations: Vec<WitnessViolation>,
}

impl WitnessReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

// --- occurrence forest ------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Zero,
    Var(VarId),
    Succ,
    Add,
    Mul,
}

#[derive(Clone, Debug)]
pub(crate) struct Occ {
    pub eq: usize,
    pub path: Path,
    pub kind: Kind,
    /// Child indices; for `Succ` only the first is set.
    pub children: [usize; 2],
    pub parent: Option<usize>,
    /// Index of the first occurrence of this subtree in post-order.
    pub first: usize,
}

/// All occurrences of a system, in post-order, equation by equation.
pub(crate) struct Forest {
    pub occs: Vec<Occ>,
    pub roots: Vec<usize>,
}

impl Forest {
    pub fn new(system: &[(Term, BigUint)]) -> Forest {
        let mut occs: Vec<Occ> = Vec::new();
        let mut roots = Vec::new();
        for (eq, (t, _)) in system.iter().enumerate() {
            // (term, path, expanded?)
            let mut stack: Vec<(Term, Path, bool)> = vec![(t.clone(), Path::root(), false)];
            // Indices of finished children waiting for their parent.
            let mut done: Vec<usize> = Vec::new();
            let mut firsts: Vec<usize> = Vec::new();
            while let Some((u, path, expanded)) = stack.pop() {
                let kind = match &*u {
                    Node::Zero => Kind::Zero,
                    Node::Var(v) => Kind::Var(*v),
                    Node::Succ(_) => Kind::Succ,
                    Node::Add(..) => Kind::Add,
                    Node::Mul(..) => Kind::Mul,
                };
                if !expanded {
                    firsts.push(occs.len());
                    match &*u {
                        Node::Zero | Node::Var(_) => {}
                        Node::Succ(a) => {
                            stack.push((u.clone(), path.clone(), true));
                            stack.push((a.clone(), path.child(Step::Succ), false));
                            continue;
                        }
                        Node::Add(a, b) | Node::Mul(a, b) => {
                            let (l, r) =
                                if kind == Kind::Add { (Step::AddLeft, Step::AddRight) } else { (Step::MulLeft, Step::MulRight) };
                            stack.push((u.clone(), path.clone(), true));
                            stack.push((b.clone(), path.child(r), false));
                            stack.push((a.clone(), path.child(l), false));
                            continue;
                        }
                    }
                }
                let first = firsts.pop().expect("balanced traversal");
                let mut children = [usize::MAX; 2];
                match kind {
                    Kind::Succ => children[0] = done.pop().expect("child"),
                    Kind::Add | Kind::Mul => {
                        children[1] = done.pop().expect("right child");
                        children[0] = done.pop().expect("left child");
                    }
                    _ => {}
                }
                let idx = occs.len();
                for &c in children.iter().filter(|&&c| c != usize::MAX) {
                    occs[c].parent = Some(idx);
                }
                occs.push(Occ { eq, path, kind, children, parent: None, first });
                done.push(idx);
            }
            roots.push(done.pop().expect("root"));
        }
        Forest { occs, roots }
    }

    pub fn len(&self) -> usize {
        self.occs.len()
    }

    /// The reduced form of `u_l` from the visible values of the children.
    pub fn reduced_at(&self, i: usize, visible: impl Fn(usize) -> ReducedDesc) -> ReducedDesc {
        let o = &self.occs[i];
        match o.kind {
            Kind::Zero => ReducedDesc::zero(),
            Kind::Var(v) => ReducedDesc::var(v),
            Kind::Succ => visible(o.children[0]).succ(),
            Kind::Add => visible(o.children[0]).add(&visible(o.children[1])),
            Kind::Mul => visible(o.children[0]).mul(&visible(o.children[1])),
        }
    }

    /// Condition 4 for a labelled occurrence.
    pub fn children_ok(&self, i: usize, label: impl Fn(usize) -> Option<BigUint>) -> bool {
        let o = &self.occs[i];
        match o.kind {
            Kind::Zero | Kind::Var(_) => true,
            Kind::Succ => label(o.children[0]).is_some(),
            Kind::Add => label(o.children[0]).is_some() && label(o.children[1]).is_some(),
            Kind::Mul => {
                let l = label(o.children[0]);
                let r = label(o.children[1]);
                let is_zero = |x: &Option<BigUint>| x.as_ref().is_some_and(|k| k.is_zero());
                (l.is_some() && r.is_some()) || is_zero(&l) || is_zero(&r)
            }
        }
    }
}

/// Reduced forms of `u_l` for every occurrence, in forest order.
fn reduced_forms(forest: &Forest, labels: &[Option<BigUint>]) -> Vec<ReducedDesc> {
    let mut reds: Vec<ReducedDesc> = Vec::with_capacity(forest.len());
    for i in 0..forest.len() {
        let r = forest.reduced_at(i, |c| match &labels[c] {
            Some(k) => ReducedDesc::numeral(k.clone()),
            None => reds[c].clone(),
        });
        reds.push(r);
    }
    reds
}

fn site(forest: &Forest, i: usize) -> Site {
    Site { equation: forest.occs[i].eq, path: forest.occs[i].path.clone() }
}

/// Per-occurrence labels, or the violations found while aligning the label
/// maps with the system.
fn align(w: &Witness, forest: &Forest) -> Result<Vec<Option<BigUint>>, Vec<WitnessViolation>> {
    if w.labels.len() != w.system.len() {
        return Err(vec![WitnessViolation::Shape(format!(
            "{} label maps for {} equations",
            w.labels.len(),
            w.system.len()
        ))]);
    }
    let index: HashMap<(usize, &Path), usize> =
        forest.occs.iter().enumerate().map(|(i, o)| ((o.eq, &o.path), i)).collect();
    let mut labels = vec![None; forest.len()];
    let mut bad = Vec::new();
    for (eq, map) in w.labels.iter().enumerate() {
        for (path, k) in map {
            match index.get(&(eq, path)) {
                Some(&i) => labels[i] = Some(k.clone()),
                None => bad.push(WitnessViolation::InvalidPath(Site { equation: eq, path: path.clone() })),
            }
        }
    }
    if bad.is_empty() {
        Ok(labels)
    } else {
        Err(bad)
    }
}

/// Checks the four witness conditions and the label bound, reporting every
/// violation found.
pub fn check_witness(w: &Witness) -> WitnessReport {
    let forest = Forest::new(&w.system);
    let labels = match align(w, &forest) {
        Ok(l) => l,
        Err(violations) => return WitnessReport { violations },
    };
    let bound = w.bound();
    let reds = reduced_forms(&forest, &labels);
    let mut violations = Vec::new();

    for (j, &root) in forest.roots.iter().enumerate() {
        let expected = &w.system[j].1;
        if labels[root].as_ref() != Some(expected) {
            violations.push(WitnessViolation::RootLabel {
                equation: j,
                expected: expected.clone(),
                found: labels[root].clone(),
            });
        }
    }
    let mut seen: HashMap<&ReducedDesc, usize> = HashMap::new();
    for i in 0..forest.len() {
        if let Some(k) = &labels[i] {
            if k > &bound {
                violations.push(WitnessViolation::LabelTooLarge { site: site(&forest, i), label: k.clone() });
            }
            if let Some(v) = reds[i].numeral_value() {
                if v != k {
                    violations.push(WitnessViolation::NumeralMismatch {
                        site: site(&forest, i),
                        label: k.clone(),
                        reduced: v.clone(),
                    });
                }
            }
            if !forest.children_ok(i, |c| labels[c].clone()) {
                violations.push(WitnessViolation::UnlabelledChild { site: site(&forest, i) });
            }
        }
        match seen.get(&reds[i]) {
            Some(&first) if labels[first] != labels[i] => violations.push(WitnessViolation::Inconsistent {
                first: site(&forest, first),
                second: site(&forest, i),
            }),
            Some(_) => {}
            None => {
                seen.insert(&reds[i], i);
            }
        }
    }
    WitnessReport { violations }
}

/// `u_l` for the occurrence at `path` in equation `equation`: maximal
/// proper labelled subterms are replaced by binary numerals.
pub fn label_image(w: &Witness, equation: usize, path: &Path) -> Result<Term, WitnessError> {
    let invalid = || WitnessError::InvalidPath { equation, path: path.clone() };
    let (t, _) = w.system.get(equation).ok_or_else(invalid)?;
    let labels = w.labels.get(equation).ok_or_else(invalid)?;
    let u = t.at(path).ok_or_else(invalid)?;
    Ok(image(u, path, labels, true))
}

fn image(t: &Term, path: &Path, labels: &BTreeMap<Path, BigUint>, top: bool) -> Term {
    if !top {
        if let Some(k) = labels.get(path) {
            return bnum(k.clone());
        }
    }
    match &**t {
        Node::Zero | Node::Var(_) => t.clone(),
        Node::Succ(a) => Term::succ(image(a, &path.child(Step::Succ), labels, false)),
        Node::Add(a, b) => Term::add(
            image(a, &path.child(Step::AddLeft), labels, false),
            image(b, &path.child(Step::AddRight), labels, false),
        ),
        Node::Mul(a, b) => Term::mul(
            image(a, &path.child(Step::MulLeft), labels, false),
            image(b, &path.child(Step::MulRight), labels, false),
        ),
    }
}

/// The equations `0 * c = k` of the reduced system determined by a witness,
/// with `c` given by minimal descriptors, in order of first occurrence.
///
/// They come from products `v * w` labelled `k` with `v` labelled 0 whose
/// `red(u_l)` is not a numeral, i.e. is `0 * c` for an irreducible `c`.
pub fn extract_reduced_descs(w: &Witness) -> Result<Vec<(Descriptor, BigUint)>, WitnessError> {
    let report = check_witness(w);
    if let Some(v) = report.violations.first() {
        return Err(WitnessError::NotAWitness(v.to_string()));
    }
    let forest = Forest::new(&w.system);
    let labels = align(w, &forest).expect("checked above");
    let reds = reduced_forms(&forest, &labels);
    Ok(zero_products(&forest, &labels, &reds))
}

pub(crate) fn zero_products(
    forest: &Forest,
    labels: &[Option<BigUint>],
    reds: &[ReducedDesc],
) -> Vec<(Descriptor, BigUint)> {
    let mut out: Vec<(Descriptor, BigUint)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, o) in forest.occs.iter().enumerate() {
        if o.kind != Kind::Mul {
            continue;
        }
        let (Some(k), Some(left)) = (&labels[i], &labels[o.children[0]]) else { continue };
        if !left.is_zero() || reds[i].numeral_value().is_some() {
            continue;
        }
        let crate::descriptor::DNode::Mul(_, c) = &*reds[i].core else {
            unreachable!("a non-numeral 0-product reduces to 0 * c")
        };
        if seen.insert(c.clone()) {
            out.push((c.clone(), k.clone()));
        }
    }
    out
}

/// The reduced system of a witness, with its terms written out. Fails when
/// a term exceeds the expansion budget.
///
/// # Panics
///
/// If the extracted equations do not form a reduced system. That cannot
/// happen for a valid witness.
pub fn extract_reduced_system(w: &Witness, budget: &Budget) -> Result<ReducedSystem, WitnessError> {
    let mut entries = Vec::new();
    for (c, k) in extract_reduced_descs(w)? {
        entries.push((expand_within(&c, budget)?, k));
    }
    Ok(ReducedSystem::new(entries).expect("a witness determines a reduced system"))
}

/// Labels of the variables: every labelled variable occurrence, which by
/// condition 2 agree per variable.
pub fn labelled_variables(w: &Witness) -> BTreeMap<VarId, BigUint> {
    let forest = Forest::new(&w.system);
    let mut out = BTreeMap::new();
    let Ok(labels) = align(w, &forest) else { return out };
    for (i, o) in forest.occs.iter().enumerate() {
        if let (Kind::Var(v), Some(k)) = (o.kind, &labels[i]) {
            out.entry(v).or_insert_with(|| k.clone());
        }
    }
    out
}

/// The valuation in the reduced-term model: labelled variables go to their
/// labels as unary numerals, the rest to themselves.
pub fn build_model_valuation(w: &Witness, budget: &Budget) -> Result<BTreeMap<VarId, Term>, WitnessError> {
    let mut out = BTreeMap::new();
    for v in w.system.iter().flat_map(|(t, _)| t.vars()) {
        out.insert(v, Term::var(v));
    }
    for (v, k) in labelled_variables(w) {
        let t = unum_within(k.clone(), budget.term_nodes).map_err(|_| WitnessError::Budget(k))?;
        out.insert(v, t);
    }
    Ok(out)
}
