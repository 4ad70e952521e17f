//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails. Run with `cargo test -p dioq-core --test acceptance`.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dioq::decide::{
    decide_positive_existential, decide_q, decide_qplus, enumerate_witnesses, extract_reduced_system,
    gen_manders_adleman, ma_nat_solvable, verify_certificate, Certificate, Instance, PositiveFormula, Status,
};
use dioq::descriptor::{desc_of_reduced, expand, expanded_size, is_minimal, minimize, Descriptor, DNode};
use dioq::models::{check_q_axioms_ext, check_qforall_axioms, ExtElem, Variant};
use dioq::models::ext::ExtModel;
use dioq::rewrite::{
    is_irreducible, is_t_reduced, norm_measure, one_step_reducts, redex_paths, reduce_with_strategy, rewrite_at,
    rtn_normalize, ReducedSystem,
};
use dioq::term::{bnum, Node, Path, Step, Term};
use dioq::{parse_equation, parse_formula, Budget, Equation};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    all_terms, brute_force_solution, descriptor_kinds, eval_all_infinite, random_descriptor, random_system,
    random_term, Ext,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))
}

fn nat(k: u64) -> BigUint {
    BigUint::from(k)
}

fn path(steps: &[Step]) -> Path {
    steps.iter().fold(Path::root(), |p, &s| p.child(s))
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let (eq, _) = parse_equation("x*y + x*S(S(S(y))) = #8").map_err(|e| e.to_string())?;
    let verdict = decide_q(&eq).map_err(|e| e.to_string())?;
    ensure(verdict.is_sat(), || format!("expected SAT, got {verdict:?}"))?;
    let Certificate::Witness(cert) = &verdict.certificate else {
        return Err(format!("expected a witness certificate, got {}", verdict.certificate.kind()));
    };
    use Step::*;
    let expected: BTreeMap<Path, BigUint> = [
        (Path::root(), nat(8)),
        (path(&[AddLeft]), nat(4)),
        (path(&[AddRight]), nat(4)),
        (path(&[AddLeft, MulLeft]), nat(0)),
        (path(&[AddRight, MulLeft]), nat(0)),
    ]
    .into();
    ensure(cert.witness.labels == [expected], || format!("labels differ: {:?}", cert.witness.labels))?;
    ensure(verify_certificate(&verdict, Instance::Equation(&eq), &budget), || "certificate rejected".into())?;

    let (all, stats) = enumerate_witnesses(&cert.witness.system, &budget, 64).map_err(|e| e.to_string())?;
    ensure(all.len() == 1 && all[0] == cert.witness, || format!("enumeration found {} witnesses", all.len()))?;

    let e = extract_reduced_system(&cert.witness, &budget).map_err(|e| e.to_string())?;
    let y = Term::var(1);
    ensure(e.entries() == [(y, nat(4))], || format!("E = {:?}", e.entries()))?;
    within(start, Duration::from_secs(1), "worked example")?;
    Ok(format!("1 witness in {} search nodes, E = {{0*y = 4}}, {:?}", stats.nodes, start.elapsed()))
}

fn three_products() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let (f, _) = parse_formula("0*(x + S(S(0))) = #5 & 0*(y + 0*x) = #7 & 0*S(y) = #4").map_err(|e| e.to_string())?;
    let verdict = decide_positive_existential(&f, Variant::Q, &budget).map_err(|e| e.to_string())?;
    ensure(verdict.status == Status::Unsat, || format!("conjunction: {verdict:?}"))?;
    for (t, n) in f.atoms() {
        let atom = PositiveFormula::Atom(t.clone(), n.clone());
        let v = decide_positive_existential(&atom, Variant::Q, &budget).map_err(|e| e.to_string())?;
        ensure(v.is_sat(), || format!("atom {t:?} = {n} is not SAT"))?;
        ensure(verify_certificate(&v, Instance::Formula(&atom), &budget), || format!("atom {t:?}: bad certificate"))?;
    }
    within(start, Duration::from_secs(5), "three-product system")?;
    Ok(format!("conjunction UNSAT, 3 atoms SAT, {:?}", start.elapsed()))
}

fn separation() -> Outcome {
    let budget = Budget::default();
    for n in 1u64..=8 {
        let eq = Equation::new(Term::mul(Term::zero(), Term::var(0)), bnum(n));
        let q = decide_q(&eq).map_err(|e| e.to_string())?;
        ensure(q.is_sat() && verify_certificate(&q, Instance::Equation(&eq), &budget), || {
            format!("0*x = {n}: Q verdict {q:?}")
        })?;
        let qplus = decide_qplus(&eq).map_err(|e| e.to_string())?;
        ensure(qplus.status == Status::Unsat, || format!("0*x = {n}: Q+ verdict {qplus:?}"))?;
    }
    Ok("n = 1..8: Q SAT (verified), Q+ UNSAT".into())
}

fn quadratic_bridge() -> Outcome {
    let start = Instant::now();
    let mut solvable = 0;
    for a in 1u64..=50 {
        for b in 1u64..=50 {
            let eq = gen_manders_adleman(&nat(a), &nat(b)).map_err(|e| e.to_string())?;
            let v = decide_q(&eq).map_err(|e| format!("a={a} b={b}: {e}"))?;
            let expected = ma_nat_solvable(&nat(a), &nat(b)).map_err(|e| e.to_string())?;
            ensure(v.is_sat() == expected, || format!("a={a} b={b}: decided {}, expected {expected}", v.status))?;
            solvable += expected as usize;
        }
    }
    within(start, Duration::from_secs(60), "2500 instances")?;
    Ok(format!("2500 instances agree ({solvable} solvable), {:?}", start.elapsed()))
}

fn rewriting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut steps_checked = 0u64;
    let mut nonempty = 0;
    let mut system_rule_used = 0;
    for i in 0..1000 {
        let sys = random_system(&mut rng, 3, 6, 2);
        let t = random_term(&mut rng, 25, 2);
        ensure(t.size() <= 25, || "generator exceeded the size".into())?;
        let max_value = sys.entries().iter().map(|(_, n)| n.clone()).max().unwrap_or_default();
        let c = max_value + 2u32;
        nonempty += !sys.is_empty() as usize;

        // Strategy A: random redex, checking every one-step reduct on the way.
        let mut cur = t.clone();
        loop {
            let m = norm_measure(&cur, &c);
            for r in one_step_reducts(&cur, &sys) {
                steps_checked += 1;
                ensure(norm_measure(&r, &c) < m, || format!("term {i}: a reduct does not decrease the norm"))?;
            }
            let paths = redex_paths(&cur, &sys);
            if paths.is_empty() {
                break;
            }
            let p = &paths[rng.gen_range(0..paths.len())];
            cur = rewrite_at(&cur, p, &sys).ok_or_else(|| format!("term {i}: redex path vanished"))?;
        }
        // Strategy B: an independently seeded random choice.
        let mut other = ChaCha8Rng::seed_from_u64(i as u64);
        let b = reduce_with_strategy(&t, &sys, 1_000_000, |k| other.gen_range(0..k)).map_err(|e| e.to_string())?;
        ensure(cur == b, || format!("term {i}: strategies disagree"))?;
        let nf = rtn_normalize(&t, &sys).map_err(|e| e.to_string())?;
        ensure(nf == cur, || format!("term {i}: rtn_normalize differs from step-wise reduction"))?;
        ensure(is_t_reduced(&nf, &sys), || format!("term {i}: normal form is not T-reduced"))?;
        if nf != rtn_normalize(&t, &ReducedSystem::empty()).map_err(|e| e.to_string())? {
            system_rule_used += 1;
        }
    }
    ensure(system_rule_used > 0, || "no term exercised a system rule".into())?;
    Ok(format!(
        "1000 terms, {steps_checked} reducts checked, {nonempty} nonempty systems, {system_rule_used} using system rules"
    ))
}

// Structural hash of the term a descriptor denotes, computed without
// expanding it; must agree with `term_hash` on the expansion.
fn mix(kind: u64, a: u64, b: u64) -> u64 {
    let mut z = kind.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ a.rotate_left(17) ^ b.rotate_left(41).wrapping_mul(3);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const H_ZERO: u64 = 0x51_7cc1_b727_220a;

fn h_var(v: u32) -> u64 {
    mix(1, v as u64, 0)
}
fn h_succ(a: u64) -> u64 {
    mix(2, a, 0)
}
fn h_add(a: u64, b: u64) -> u64 {
    mix(3, a, b)
}
fn h_mul(a: u64, b: u64) -> u64 {
    mix(4, a, b)
}

fn term_hash(t: &Term) -> u64 {
    match &**t {
        Node::Zero => H_ZERO,
        Node::Var(v) => h_var(*v),
        Node::Succ(a) => h_succ(term_hash(a)),
        Node::Add(a, b) => h_add(term_hash(a), term_hash(b)),
        Node::Mul(a, b) => h_mul(term_hash(a), term_hash(b)),
    }
}

fn small(n: &BigUint) -> u64 {
    u64::try_from(n).expect("small index")
}

fn desc_hash(d: &Descriptor) -> u64 {
    let succs = |n: u64, mut h: u64| {
        for _ in 0..n {
            h = h_succ(h);
        }
        h
    };
    match &**d {
        DNode::Zero => H_ZERO,
        DNode::Var(v) => h_var(*v),
        DNode::Add(a, b) => h_add(desc_hash(a), desc_hash(b)),
        DNode::Mul(a, b) => h_mul(desc_hash(a), desc_hash(b)),
        DNode::S(n, a) => succs(small(n), desc_hash(a)),
        DNode::A(n, m, u) => {
            let hu = desc_hash(u);
            let mut h = h_add(H_ZERO, hu);
            for _ in 1..small(m) {
                h = h_add(succs(small(n), h), hu);
            }
            h
        }
        DNode::B(n, m, t, u) => {
            let (ht, hu) = (desc_hash(t), desc_hash(u));
            let mut h = h_add(h_mul(succs(small(n), hu), ht), hu);
            for _ in 1..small(m) {
                h = h_add(succs(small(n), h), hu);
            }
            h
        }
    }
}

/// All minimal descriptors with at most `max_size` nodes over two variables
/// and indices at most `max_index`. Children of minimal descriptors are
/// minimal, so each level is built from the minimal descriptors below it.
fn minimal_descriptors(max_size: usize, max_index: u64) -> Vec<Vec<Descriptor>> {
    let mut levels: Vec<Vec<Descriptor>> = vec![Vec::new(); max_size + 1];
    levels[1] = vec![Descriptor::zero(), Descriptor::var(0), Descriptor::var(1)];
    for s in 2..=max_size {
        let mut level = Vec::new();
        for d in &levels[s - 1] {
            if !matches!(**d, DNode::S(..)) {
                for n in 1..=max_index {
                    level.push(Descriptor::s(nat(n), d.clone()).expect("n >= 1"));
                }
            }
            for n in 0..=max_index {
                for m in 2..=max_index {
                    level.push(Descriptor::a(nat(n), nat(m), d.clone()).expect("m >= 2"));
                }
            }
        }
        for left in 1..s - 1 {
            let right = s - 1 - left;
            for a in &levels[left] {
                for b in &levels[right] {
                    let sum = Descriptor::add(a.clone(), b.clone());
                    if is_minimal(&sum) {
                        level.push(sum);
                    }
                    level.push(Descriptor::mul(a.clone(), b.clone()));
                    for n in 0..=max_index {
                        for m in 1..=max_index {
                            level.push(Descriptor::b(nat(n), nat(m), a.clone(), b.clone()).expect("m >= 1"));
                        }
                    }
                }
            }
        }
        levels[s] = level;
    }
    levels
}

fn descriptors() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);

    // Minimization preserves denotation.
    let mut checked = 0;
    let mut kinds = [0usize; 7];
    while checked < 1000 {
        let d = random_descriptor(&mut rng, 8, 3, 2);
        let Ok(t) = expand(&d) else { continue };
        let m = minimize(&d);
        ensure(is_minimal(&m), || format!("minimize left a non-minimal descriptor for {d:?}"))?;
        ensure(expand(&m).ok().as_ref() == Some(&t), || format!("minimize changed the denotation of {d:?}"))?;
        ensure(desc_hash(&d) == term_hash(&t), || format!("hash mismatch on {d:?}"))?;
        for (k, c) in kinds.iter_mut().zip(descriptor_kinds(&d)) {
            *k += c;
        }
        checked += 1;
    }
    ensure(kinds.iter().all(|&k| k > 0), || format!("generator missed a node kind: {kinds:?}"))?;

    // Canonicity: distinct minimal descriptors denote distinct terms.
    let levels = minimal_descriptors(6, 3);
    let all: Vec<&Descriptor> = levels.iter().flatten().collect();
    for d in &all {
        ensure(is_minimal(d), || format!("enumerated {d:?} is not minimal"))?;
    }
    let mut seen: HashMap<u64, usize> = HashMap::with_capacity(all.len());
    let mut collisions = 0;
    for (i, d) in all.iter().enumerate() {
        if let Some(&j) = seen.get(&desc_hash(d)) {
            collisions += 1;
            let (a, b) = (expand(d).map_err(|e| e.to_string())?, expand(all[j]).map_err(|e| e.to_string())?);
            ensure(a != b, || format!("{:?} and {:?} are minimal and denote the same term", d, all[j]))?;
        } else {
            seen.insert(desc_hash(d), i);
        }
    }

    // Succinct reduced forms agree with rewriting.
    for i in 0..500 {
        let t = random_term(&mut rng, 25, 2);
        let nf = rtn_normalize(&t, &ReducedSystem::empty()).map_err(|e| e.to_string())?;
        let d = desc_of_reduced(&t);
        ensure(is_minimal(&d), || format!("term {i}: descriptor not minimal"))?;
        ensure(expand(&d).ok().as_ref() == Some(&nf), || format!("term {i}: expansion differs from the normal form"))?;
    }

    // Binary numerals of powers of two.
    let mut slowest = Duration::ZERO;
    for k in 0..=64u32 {
        let input = bnum(BigUint::from(1u32) << k);
        let start = Instant::now();
        let d = desc_of_reduced(&input);
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(took < Duration::from_millis(10), || format!("2^{k}: {took:?}"))?;
        ensure(d.size() <= 8 * input.size(), || format!("2^{k}: descriptor size {} vs input {}", d.size(), input.size()))?;
        ensure(expanded_size(&d) == (BigUint::from(1u32) << k) + 1u32, || format!("2^{k}: wrong value"))?;
    }
    Ok(format!(
        "1000 random descriptors, {} minimal descriptors pairwise distinct ({collisions} hash collisions), \
         500 terms, powers of two in at most {slowest:?}",
        all.len()
    ))
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let budget = Budget::default();
    let terms = all_terms(9, 2);
    let (mut total, mut sat, mut beyond_naturals) = (0u64, 0u64, 0u64);
    for t in terms.iter().flatten() {
        let at_infinity = eval_all_infinite(t, false);
        for n in 0u64..=5 {
            let eq = Equation::new(t.clone(), Term::succs(n as usize, Term::zero()));
            let verdict = decide_q(&eq).map_err(|e| format!("{eq:?}: {e}"))?;
            let solution = brute_force_solution(t, n, 2, 10);
            let infinite = at_infinity == Ext::Fin(n);
            total += 1;
            if verdict.is_sat() {
                sat += 1;
                ensure(verify_certificate(&verdict, Instance::Equation(&eq), &budget), || {
                    format!("{eq:?}: certificate rejected")
                })?;
                beyond_naturals += (solution.is_none() && !infinite) as u64;
            } else {
                ensure(solution.is_none(), || format!("{eq:?}: UNSAT but solved by {solution:?}"))?;
                ensure(!infinite, || format!("{eq:?}: UNSAT but true with every variable infinite"))?;
            }
        }
    }
    Ok(format!(
        "{total} equations, {sat} SAT ({beyond_naturals} with no small natural or all-infinite solution), {:?}",
        start.elapsed()
    ))
}

/// Elements of `M` for `sys`: normal forms of random terms, plus numerals.
fn model_samples(rng: &mut ChaCha8Rng, sys: &ReducedSystem, count: usize) -> Result<Vec<Term>, String> {
    let mut out: Vec<Term> = (0..4).map(|k| Term::succs(k, Term::zero())).collect();
    while out.len() < count {
        let t = rtn_normalize(&random_term(rng, 7, 2), sys).map_err(|e| e.to_string())?;
        if t.size() <= 40 && !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn random_ext(rng: &mut ChaCha8Rng, sys: &ReducedSystem) -> Result<ExtElem, String> {
    loop {
        let t = rtn_normalize(&random_term(rng, 6, 2), sys).map_err(|e| e.to_string())?;
        let core = t.peel_succ().1.clone();
        let k = nat(rng.gen_range(1..=4));
        return Ok(match rng.gen_range(0..5) {
            0 | 1 => ExtElem::Base(t),
            2 => ExtElem::Inf,
            3 if is_irreducible(&core) => ExtElem::Pred(core, k),
            4 if is_irreducible(&core) => {
                let scale = rtn_normalize(&random_term(rng, 5, 2), sys).map_err(|e| e.to_string())?;
                if scale.as_unary_numeral().is_some() {
                    continue;
                }
                ExtElem::Scaled(core, k, scale)
            }
            _ => continue,
        });
    }
}

fn models() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let (x, y) = (Term::var(0), Term::var(1));
    let mut systems = vec![
        ReducedSystem::empty(),
        ReducedSystem::new(vec![(x.clone(), nat(3))]).map_err(|e| e.to_string())?,
        ReducedSystem::new(vec![(Term::mul(x.clone(), y.clone()), nat(2)), (y.clone(), nat(5))])
            .map_err(|e| e.to_string())?,
    ];
    while systems.len() < 5 {
        let s = random_system(&mut rng, 3, 6, 2);
        if !s.is_empty() {
            systems.push(s);
        }
    }
    let (mut instances, mut skipped, mut pairs_checked, mut preds) = (0u64, 0u64, 0usize, 0usize);
    for (i, sys) in systems.iter().enumerate() {
        let samples = model_samples(&mut rng, sys, 50)?;
        let report = check_qforall_axioms(sys, &samples, 8);
        ensure(report.is_clean(), || format!("system {i}: {:?}", &report.violations[..report.violations.len().min(3)]))?;
        instances += report.instances;
        skipped += report.skipped;

        let mut pairs = Vec::new();
        for _ in 0..200 {
            pairs.push((random_ext(&mut rng, sys)?, random_ext(&mut rng, sys)?));
        }
        let report = check_q_axioms_ext(sys, &pairs);
        ensure(report.is_clean(), || format!("system {i}, extended model: {:?}", report.violations.first()))?;
        instances += report.instances;
        skipped += report.skipped;
        pairs_checked += pairs.len();

        let mut model = ExtModel::new(sys);
        for e in pairs.iter().flat_map(|(a, b)| [a, b]) {
            if *e == ExtElem::zero() {
                continue;
            }
            let p = model.pred(e).map_err(|e| e.to_string())?;
            let back = match &p {
                Some(p) => Some(model.succ(p).map_err(|e| e.to_string())?),
                None => None,
            };
            ensure(back.as_ref() == Some(e), || format!("no predecessor for {e:?}: {p:?}"))?;
            preds += 1;
        }
    }
    ensure(skipped == 0, || format!("{skipped} instances skipped over the node budget"))?;
    Ok(format!(
        "{} systems, {instances} axiom instances, {pairs_checked} extended pairs, {preds} predecessors",
        systems.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("worked example", worked_example),
        ("three-product system", three_products),
        ("Q / Q+ separation", separation),
        ("quadratic bridge", quadratic_bridge),
        ("rewriting properties", rewriting),
        ("descriptor properties", descriptors),
        ("oracle agreement", oracle_agreement),
        ("model sanity", models),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} [{took:.2?}]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} [{took:.2?}]: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
