//! Backtracking search for witnesses.
//!
//! Occurrences are decided in post-order, so when an occurrence is reached
//! the labels of its children, and with them `red(u_l)`, are known. Only two
//! kinds of occurrence have a real choice:
//!
//! * variables, and
//! * products whose left factor is labelled 0 and whose reduced form is not
//!   a numeral (`0 * c`, which `Q` leaves unconstrained).
//!
//! Everything else is either forced unlabelled or, when `red(u_l)` is a
//! numeral `k`, labelled `k`. In [`SearchMode::Saturated`] every numeral
//! occurrence with `k <= N` is labelled. This loses nothing: adding such
//! labels to a witness leaves every reduced form unchanged and keeps all four
//! conditions, so a witness exists iff a saturated one does.
//! [`SearchMode::Complete`] also tries leaving those occurrences unlabelled
//! and so visits every witness.
//!
//! Labels of parents constrain their children (a sum labelled `T` needs both
//! summands labelled, the left one at most `T`, and so on). These demands
//! are propagated top-down as occurrences are entered and prune the search
//! without excluding any witness.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero as _};

use crate::descriptor::ReducedDesc;
use crate::term::{Path, Term};
use crate::Budget;

use super::witness::{label_bound, Forest, Kind, Witness};
use super::DecideError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Label every occurrence whose reduced form is a numeral within the
    /// bound. Finds a witness iff one exists.
    #[default]
    Saturated,
    /// Enumerate all witnesses.
    Complete,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate labels tried.
    pub nodes: u64,
    pub occurrences: usize,
    pub label_bound: BigUint,
    pub witnesses: u64,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

/// What the parent's label requires of an occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Demand {
    Free,
    Exact(BigUint),
    /// Labelled with a value at most the bound.
    AtMost(BigUint),
    /// Labelled 0 or with a divisor of the (non-zero) target.
    ZeroOrDivisor(BigUint),
    Dead,
}

impl Demand {
    fn allows(&self, label: &Option<BigUint>) -> bool {
        match (self, label) {
            (Demand::Free, _) => true,
            (Demand::Dead, _) | (_, None) => false,
            (Demand::Exact(t), Some(k)) => k == t,
            (Demand::AtMost(b), Some(k)) => k <= b,
            (Demand::ZeroOrDivisor(t), Some(k)) => k.is_zero() || (t % k).is_zero(),
        }
    }

    fn requires_label(&self) -> bool {
        !matches!(self, Demand::Free)
    }
}

struct Frame {
    cands: std::vec::IntoIter<Option<BigUint>>,
    /// Remaining ascending range `next..=last` tried after `cands`.
    range: Option<(BigUint, BigUint)>,
    trail: usize,
}

impl Frame {
    fn next(&mut self) -> Option<Option<BigUint>> {
        if let Some(c) = self.cands.next() {
            return Some(c);
        }
        let (next, last) = self.range.as_mut()?;
        if *next > *last {
            self.range = None;
            return None;
        }
        let k = next.clone();
        *next += 1u32;
        Some(Some(k))
    }
}

struct Search<'a> {
    system: &'a [(Term, BigUint)],
    forest: Forest,
    mode: SearchMode,
    bound: BigUint,
    labels: Vec<Option<BigUint>>,
    reds: Vec<ReducedDesc>,
    demands: Vec<Demand>,
    /// For each position, the occurrences whose subtree starts there,
    /// outermost first.
    starts: Vec<Vec<usize>>,
    table: HashMap<ReducedDesc, Option<BigUint>>,
    trail: Vec<ReducedDesc>,
    stats: SearchStats,
    limit: u64,
}

impl<'a> Search<'a> {
    fn new(system: &'a [(Term, BigUint)], mode: SearchMode, limit: u64) -> Self {
        let forest = Forest::new(system);
        let n = forest.len();
        let mut starts = vec![Vec::new(); n];
        for i in (0..n).rev() {
            starts[forest.occs[i].first].push(i);
        }
        let bound = label_bound(system);
        let stats = SearchStats { occurrences: n, label_bound: bound.clone(), ..SearchStats::default() };
        Search {
            system,
            forest,
            mode,
            bound,
            labels: vec![None; n],
            reds: vec![ReducedDesc::zero(); n],
            demands: vec![Demand::Free; n],
            starts,
            table: HashMap::new(),
            trail: Vec::new(),
            stats,
            limit,
        }
    }

    fn visible(&self, i: usize) -> ReducedDesc {
        match &self.labels[i] {
            Some(k) => ReducedDesc::numeral(k.clone()),
            None => self.reds[i].clone(),
        }
    }

    fn demand_of(&self, i: usize) -> Demand {
        let o = &self.forest.occs[i];
        let Some(parent) = o.parent else {
            return Demand::Exact(self.system[o.eq].1.clone());
        };
        let p = &self.forest.occs[parent];
        let pd = &self.demands[parent];
        if *pd == Demand::Dead {
            return Demand::Dead;
        }
        if *pd == Demand::Free {
            return Demand::Free;
        }
        let slot = if p.children[0] == i { 0 } else { 1 };
        let left = || self.labels[p.children[0]].as_ref();
        match (p.kind, slot, pd) {
            (Kind::Succ, _, Demand::Exact(t)) => {
                if t.is_zero() {
                    Demand::Dead
                } else {
                    Demand::Exact(t - 1u32)
                }
            }
            (Kind::Succ, _, Demand::AtMost(t) | Demand::ZeroOrDivisor(t)) => {
                if t.is_zero() {
                    Demand::Dead
                } else {
                    Demand::AtMost(t - 1u32)
                }
            }
            (Kind::Add, 0, Demand::Exact(t) | Demand::AtMost(t) | Demand::ZeroOrDivisor(t)) => Demand::AtMost(t.clone()),
            (Kind::Add, _, d) => match (left(), d) {
                (None, _) => Demand::Dead,
                (Some(a), Demand::Exact(t)) if a <= t => Demand::Exact(t - a),
                (Some(a), Demand::AtMost(t) | Demand::ZeroOrDivisor(t)) if a <= t => Demand::AtMost(t - a),
                _ => Demand::Dead,
            },
            (Kind::Mul, 0, Demand::Exact(t)) if !t.is_zero() => Demand::ZeroOrDivisor(t.clone()),
            (Kind::Mul, 0, _) => Demand::Free,
            (Kind::Mul, _, d) => match (left(), d) {
                (None, Demand::Exact(t)) if !t.is_zero() => Demand::Dead,
                (None, _) => Demand::Exact(BigUint::zero()),
                (Some(a), _) if a.is_zero() => Demand::Free,
                (Some(a), Demand::Exact(t)) => {
                    let (q, r) = t.div_rem(a);
                    if r.is_zero() {
                        Demand::Exact(q)
                    } else {
                        Demand::Dead
                    }
                }
                (Some(a), Demand::AtMost(t) | Demand::ZeroOrDivisor(t)) => Demand::AtMost(t / a),
                _ => Demand::Dead,
            },
            _ => Demand::Dead,
        }
    }

    fn charge(&mut self, steps: u64) -> Result<(), DecideError> {
        self.stats.nodes += steps;
        if self.stats.nodes > self.limit {
            return Err(DecideError::SearchBudget { limit: self.limit });
        }
        Ok(())
    }

    /// Prepares position `p`: demands of the subtrees starting here, then the
    /// reduced form and the candidate labels.
    fn enter(&mut self, p: usize) -> Result<Frame, DecideError> {
        for idx in 0..self.starts[p].len() {
            let a = self.starts[p][idx];
            self.demands[a] = self.demand_of(a);
        }
        let red = self.forest.reduced_at(p, |c| self.visible(c));
        self.reds[p] = red;
        let mut cands = Vec::new();
        let mut range = None;
        let red = &self.reds[p];
        let demand = &self.demands[p];
        if *demand == Demand::Dead {
            // No candidates.
        } else if let Some(k) = red.numeral_value() {
            let fits = k <= &self.bound;
            if self.mode == SearchMode::Complete || !fits {
                cands.push(None);
            }
            if fits {
                cands.push(Some(k.clone()));
            }
        } else if self.is_free(p) {
            if let Some(l) = self.table.get(red) {
                cands.push(l.clone());
            } else {
                match demand.clone() {
                    Demand::Exact(t) => {
                        if t <= self.bound {
                            cands.push(Some(t));
                        }
                    }
                    Demand::AtMost(b) => range = Some((BigUint::zero(), b.min(self.bound.clone()))),
                    Demand::ZeroOrDivisor(t) => {
                        cands.push(Some(BigUint::zero()));
                        let divisors = self.divisors(&t)?;
                        cands.extend(divisors.into_iter().filter(|d| d <= &self.bound).map(Some));
                    }
                    Demand::Free => {
                        cands.push(None);
                        range = Some((BigUint::zero(), self.bound.clone()));
                    }
                    Demand::Dead => {}
                }
            }
        } else {
            cands.push(None);
        }
        Ok(Frame { cands: cands.into_iter(), range, trail: self.trail.len() })
    }

    /// Divisors of `t > 0` in ascending order, charged to the budget.
    fn divisors(&mut self, t: &BigUint) -> Result<Vec<BigUint>, DecideError> {
        let root = t.sqrt();
        let mut small = Vec::new();
        let mut k = BigUint::one();
        while k <= root {
            self.charge(1)?;
            if (t % &k).is_zero() {
                small.push(k.clone());
            }
            k += 1u32;
        }
        let mut out = small.clone();
        for d in small.iter().rev() {
            let q = t / d;
            if &q != d {
                out.push(q);
            }
        }
        Ok(out)
    }

    fn is_free(&self, p: usize) -> bool {
        let o = &self.forest.occs[p];
        match o.kind {
            Kind::Var(_) => true,
            Kind::Mul => self.labels[o.children[0]].as_ref().is_some_and(|k| k.is_zero()),
            _ => false,
        }
    }

    /// Tries `label` at position `p`; on success records it.
    fn accept(&mut self, p: usize, label: Option<BigUint>) -> bool {
        if !self.demands[p].allows(&label) {
            return false;
        }
        if label.is_none() && self.demands[p].requires_label() {
            return false;
        }
        if label.is_some() && !self.forest.children_ok(p, |c| self.labels[c].clone()) {
            return false;
        }
        match self.table.get(&self.reds[p]) {
            Some(existing) => {
                if *existing != label {
                    return false;
                }
            }
            None => {
                self.table.insert(self.reds[p].clone(), label.clone());
                self.trail.push(self.reds[p].clone());
            }
        }
        self.labels[p] = label;
        true
    }

    fn undo(&mut self, to: usize) {
        while self.trail.len() > to {
            let key = self.trail.pop().expect("non-empty trail");
            self.table.remove(&key);
        }
    }

    fn witness(&self) -> Witness {
        let mut labels = vec![BTreeMap::<Path, BigUint>::new(); self.system.len()];
        for (i, o) in self.forest.occs.iter().enumerate() {
            if let Some(k) = &self.labels[i] {
                labels[o.eq].insert(o.path.clone(), k.clone());
            }
        }
        Witness { system: self.system.to_vec(), labels }
    }

    /// Depth-first search; `found` is called on each witness and returns
    /// whether to keep going.
    fn run(&mut self, mut found: impl FnMut(Witness) -> bool) -> Result<(), DecideError> {
        let n = self.forest.len();
        let mut frames: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                let p = frames.len();
                if p == n {
                    self.stats.witnesses += 1;
                    if !found(self.witness()) {
                        return Ok(());
                    }
                } else {
                    let frame = self.enter(p)?;
                    frames.push(frame);
                }
            }
            let p = match frames.len() {
                0 => return Ok(()),
                len => len - 1,
            };
            let frame = &mut frames[p];
            let trail = frame.trail;
            let next = frame.next();
            self.undo(trail);
            self.labels[p] = None;
            match next {
                Some(label) => {
                    self.charge(1)?;
                    descend = self.accept(p, label);
                }
                None => {
                    frames.pop();
                    descend = false;
                }
            }
        }
    }
}

/// Searches for a witness of `system` (saturated mode).
pub fn search_witness(system: &[(Term, BigUint)], budget: &Budget) -> Result<SearchOutcome, DecideError> {
    search_witness_with(system, budget, SearchMode::Saturated)
}

/// The first witness in search order, if any.
pub fn search_witness_with(
    system: &[(Term, BigUint)],
    budget: &Budget,
    mode: SearchMode,
) -> Result<SearchOutcome, DecideError> {
    let mut search = Search::new(system, mode, budget.search_nodes);
    let mut witness = None;
    search.run(|w| {
        witness = Some(w);
        false
    })?;
    Ok(SearchOutcome { witness, stats: search.stats })
}

/// All witnesses of `system` in search order, up to `max` of them.
pub fn enumerate_witnesses(
    system: &[(Term, BigUint)],
    budget: &Budget,
    max: usize,
) -> Result<(Vec<Witness>, SearchStats), DecideError> {
    let mut search = Search::new(system, SearchMode::Complete, budget.search_nodes);
    let mut out = Vec::new();
    search.run(|w| {
        out.push(w);
        out.len() < max
    })?;
    Ok((out, search.stats))
}
