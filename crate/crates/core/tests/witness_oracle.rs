//! Witness checking and search against a brute-force enumeration of all
//! partial labellings, with the witness conditions evaluated directly on
//! terms.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use dioq::decide::{check_witness, enumerate_witnesses, search_witness, Witness};
use dioq::rewrite::{rtn_normalize, ReducedSystem};
use dioq::term::{Node, Path, Step, Term};
use dioq::Budget;
use num_bigint::BigUint;

use common::all_terms;

type Labelling = Vec<BTreeMap<Path, BigUint>>;

struct Occurrence {
    equation: usize,
    path: Path,
    term: Term,
    children: Vec<usize>,
}

fn occurrences(system: &[(Term, u64)]) -> Vec<Occurrence> {
    fn walk(out: &mut Vec<Occurrence>, equation: usize, path: Path, t: &Term) -> usize {
        let i = out.len();
        out.push(Occurrence { equation, path: path.clone(), term: t.clone(), children: Vec::new() });
        let kids: Vec<(Step, &Term)> = match &**t {
            Node::Zero | Node::Var(_) => vec![],
            Node::Succ(a) => vec![(Step::Succ, a)],
            Node::Add(a, b) => vec![(Step::AddLeft, a), (Step::AddRight, b)],
            Node::Mul(a, b) => vec![(Step::MulLeft, a), (Step::MulRight, b)],
        };
        for (step, child) in kids {
            let c = walk(out, equation, path.child(step), child);
            out[i].children.push(c);
        }
        i
    }
    let mut out = Vec::new();
    for (j, (t, _)) in system.iter().enumerate() {
        walk(&mut out, j, Path::root(), t);
    }
    out
}

/// `u_l`: the occurrence with its maximal proper labelled subterms replaced
/// by numerals.
fn image(occ: &[Occurrence], labels: &[Option<u64>], i: usize, root: bool) -> Term {
    if let (false, Some(k)) = (root, labels[i]) {
        return Term::succs(k as usize, Term::zero());
    }
    let kids: Vec<Term> = occ[i].children.iter().map(|&c| image(occ, labels, c, false)).collect();
    match &*occ[i].term {
        Node::Zero | Node::Var(_) => occ[i].term.clone(),
        Node::Succ(_) => Term::succ(kids[0].clone()),
        Node::Add(..) => Term::add(kids[0].clone(), kids[1].clone()),
        Node::Mul(..) => Term::mul(kids[0].clone(), kids[1].clone()),
    }
}

fn is_witness(system: &[(Term, u64)], occ: &[Occurrence], labels: &[Option<u64>]) -> bool {
    let empty = ReducedSystem::empty();
    let reds: Vec<Term> =
        (0..occ.len()).map(|i| rtn_normalize(&image(occ, labels, i, true), &empty).expect("small")).collect();
    for (i, o) in occ.iter().enumerate() {
        if o.path.is_empty() && labels[i] != Some(system[o.equation].1) {
            return false;
        }
        let Some(k) = labels[i] else { continue };
        if let Some(value) = reds[i].as_unary_numeral() {
            if value as u64 != k {
                return false;
            }
        }
        let zero_factor = matches!(&*o.term, Node::Mul(..)) && o.children.iter().any(|&c| labels[c] == Some(0));
        if !zero_factor && o.children.iter().any(|&c| labels[c].is_none()) {
            return false;
        }
    }
    for i in 0..occ.len() {
        for j in i + 1..occ.len() {
            if reds[i] == reds[j] && labels[i] != labels[j] {
                return false;
            }
        }
    }
    true
}

fn to_witness(system: &[(Term, u64)], occ: &[Occurrence], labels: &[Option<u64>]) -> Witness {
    let mut maps: Labelling = vec![BTreeMap::new(); system.len()];
    for (o, l) in occ.iter().zip(labels) {
        if let Some(k) = l {
            maps[o.equation].insert(o.path.clone(), BigUint::from(*k));
        }
    }
    Witness { system: system.iter().map(|(t, n)| (t.clone(), BigUint::from(*n))).collect(), labels: maps }
}

/// Every witness of `system`, by enumerating all labellings with values up
/// to the largest right-hand side. With `check_all`, also compares the
/// library's checker on every labelling.
fn brute_force(system: &[(Term, u64)], check_all: bool) -> BTreeSet<Labelling> {
    let occ = occurrences(system);
    let bound = system.iter().map(|(_, n)| *n).max().unwrap_or(0);
    let mut digits = vec![0u64; occ.len()];
    let mut found = BTreeSet::new();
    loop {
        // Digit `bound + 1` stands for "unlabelled".
        let labels: Vec<Option<u64>> = digits.iter().map(|&d| (d <= bound).then_some(d)).collect();
        let valid = is_witness(system, &occ, &labels);
        if valid || check_all {
            let w = to_witness(system, &occ, &labels);
            if check_all {
                assert_eq!(check_witness(&w).is_valid(), valid, "checker disagrees on {w:?}");
            }
            if valid {
                found.insert(w.labels);
            }
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return found;
            }
            if digits[i] <= bound {
                digits[i] += 1;
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn library_witnesses(system: &[(Term, u64)]) -> BTreeSet<Labelling> {
    let sys: Vec<(Term, BigUint)> = system.iter().map(|(t, n)| (t.clone(), BigUint::from(*n))).collect();
    let (all, _) = enumerate_witnesses(&sys, &Budget::default(), usize::MAX).unwrap();
    let first = search_witness(&sys, &Budget::default()).unwrap().witness;
    assert_eq!(first.is_some(), !all.is_empty(), "search and enumeration disagree on {system:?}");
    for w in &all {
        assert!(check_witness(w).is_valid());
    }
    let set: BTreeSet<Labelling> = all.into_iter().map(|w| w.labels).collect();
    if let Some(w) = first {
        assert!(set.contains(&w.labels), "saturated witness not among all witnesses for {system:?}");
    }
    set
}

#[test]
fn checker_agrees_on_every_labelling_of_small_terms() {
    let terms = all_terms(4, 2);
    for t in terms.iter().flatten() {
        for n in 0..=2 {
            brute_force(&[(t.clone(), n)], true);
        }
    }
}

#[test]
fn enumeration_finds_exactly_the_witnesses() {
    let terms = all_terms(5, 2);
    let mut sat = 0;
    let mut total = 0;
    for t in terms.iter().flatten() {
        for n in 0..=3 {
            let system = [(t.clone(), n)];
            let expected = brute_force(&system, false);
            assert_eq!(library_witnesses(&system), expected, "{t:?} = {n}");
            total += 1;
            sat += !expected.is_empty() as usize;
        }
    }
    assert!(sat > 0 && sat < total);
}

#[test]
fn systems_of_two_equations() {
    let terms = all_terms(3, 2);
    let small: Vec<&Term> = terms.iter().flatten().collect();
    for a in &small {
        for b in &small {
            for (n, m) in [(1, 2), (2, 2), (0, 3)] {
                let system = [((*a).clone(), n), ((*b).clone(), m)];
                assert_eq!(library_witnesses(&system), brute_force(&system, false), "{system:?}");
            }
        }
    }
}

#[test]
fn witnesses_of_zero_products() {
    let zx = Term::mul(Term::zero(), Term::var(0));
    let all = brute_force(&[(zx.clone(), 5)], false);
    assert_eq!(all.len(), 1);
    assert_eq!(library_witnesses(&[(zx, 5)]), all);
}
