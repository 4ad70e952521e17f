//! Property tests for the decision procedures, parsing and descriptors.

mod common;

use dioq::decide::{
    decide_equation, decide_positive_existential, gen_manders_adleman, ma_nat_solvable, verify_certificate, Instance,
    PositiveFormula,
};
use dioq::descriptor::{desc_equal, desc_of_reduced, expand, minimize, parse_descriptor_with};
use dioq::models::Variant;
use dioq::parse::{parse_equation_with, parse_formula_with, parse_term_with};
use dioq::term::{Term, VarTable};
use dioq::{Budget, Equation};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_solution, random_descriptor, random_term};

fn arb_term(max_size: usize) -> impl Strategy<Value = Term> {
    any::<u64>().prop_map(move |seed| random_term(&mut ChaCha8Rng::seed_from_u64(seed), max_size, 2))
}

fn equation(t: &Term, n: u64) -> Equation {
    Equation::new(t.clone(), Term::succs(n as usize, Term::zero()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn qplus_is_satisfiability_over_the_naturals(t in arb_term(9), n in 0u64..=6) {
        let eq = equation(&t, n);
        let v = decide_equation(&eq, Variant::QPlus, &Budget::default()).unwrap();
        // Every decomposition branch assigns values at most n.
        let solvable = brute_force_solution(&t, n, 2, n).is_some();
        prop_assert_eq!(v.is_sat(), solvable);
        if v.is_sat() {
            prop_assert!(verify_certificate(&v, Instance::Equation(&eq), &Budget::default()));
        }
    }

    #[test]
    fn q_verdicts_are_sound_and_deterministic(t in arb_term(12), n in 0u64..=6) {
        let eq = equation(&t, n);
        let budget = Budget::default();
        let v = decide_equation(&eq, Variant::Q, &budget).unwrap();
        prop_assert_eq!(&decide_equation(&eq, Variant::Q, &budget).unwrap(), &v);
        if v.is_sat() {
            prop_assert!(verify_certificate(&v, Instance::Equation(&eq), &budget));
        } else {
            prop_assert!(brute_force_solution(&t, n, 2, 8).is_none());
        }
        // Models of Q+ are models of Q.
        let plus = decide_equation(&eq, Variant::QPlus, &budget).unwrap();
        prop_assert!(!plus.is_sat() || v.is_sat());
    }

    #[test]
    fn equations_between_terms(t in arb_term(7), u in arb_term(7)) {
        let eq = Equation::new(t.clone(), u.clone());
        let budget = Budget::default();
        for variant in [Variant::Q, Variant::QPlus] {
            let v = decide_equation(&eq, variant, &budget).unwrap();
            if v.is_sat() {
                prop_assert!(verify_certificate(&v, Instance::Equation(&eq), &budget));
            }
        }
        let swapped = Equation::new(u, t);
        prop_assert_eq!(
            decide_equation(&eq, Variant::Q, &budget).unwrap().status,
            decide_equation(&swapped, Variant::Q, &budget).unwrap().status
        );
    }

    #[test]
    fn disjunction_is_satisfiable_iff_a_disjunct_is(a in arb_term(7), b in arb_term(7), n in 0u64..=4, m in 0u64..=4) {
        let budget = Budget::default();
        let fa = PositiveFormula::atom(a, n);
        let fb = PositiveFormula::atom(b, m);
        let sat = |f: &PositiveFormula| {
            let v = decide_positive_existential(f, Variant::Q, &budget).unwrap();
            if v.is_sat() {
                assert!(verify_certificate(&v, Instance::Formula(f), &budget));
            }
            v.is_sat()
        };
        let or = PositiveFormula::Or(vec![fa.clone(), fb.clone()]);
        prop_assert_eq!(sat(&or), sat(&fa) || sat(&fb));
        let and = PositiveFormula::And(vec![fa.clone(), fb.clone()]);
        // A conjunction implies each conjunct.
        prop_assert!(!sat(&and) || (sat(&fa) && sat(&fb)));
        let single = PositiveFormula::And(vec![fa.clone()]);
        prop_assert_eq!(sat(&single), sat(&fa));
    }

    #[test]
    fn quadratic_family(a in 1u64..2000, b in 0u64..5000) {
        let eq = gen_manders_adleman(&BigUint::from(a), &BigUint::from(b)).unwrap();
        let v = decide_equation(&eq, Variant::Q, &Budget::default()).unwrap();
        prop_assert_eq!(v.is_sat(), ma_nat_solvable(&BigUint::from(a), &BigUint::from(b)).unwrap());
    }

    #[test]
    fn terms_render_and_parse_back(t in arb_term(30)) {
        let mut names = VarTable::conventional();
        let text = t.render(&names).to_string();
        prop_assert_eq!(parse_term_with(&text, &mut names).unwrap(), t.clone());
        let eq = equation(&t, 3);
        let text = eq.render(&names).to_string();
        prop_assert_eq!(parse_equation_with(&text, &mut names).unwrap(), eq);
    }

    #[test]
    fn formulas_render_and_parse_back(a in arb_term(8), b in arb_term(8), c in arb_term(8)) {
        let f = PositiveFormula::Or(vec![
            PositiveFormula::And(vec![PositiveFormula::atom(a, 1u32), PositiveFormula::atom(b, 2u32)]),
            PositiveFormula::atom(c, 0u32),
        ]);
        let mut names = VarTable::conventional();
        let text = f.render(&names).to_string();
        let back = parse_formula_with(&text, &mut names).unwrap();
        prop_assert_eq!(back.atoms(), f.atoms());
        prop_assert_eq!(back.dnf(16).unwrap(), f.dnf(16).unwrap());
    }

    #[test]
    fn descriptors_render_and_parse_back(seed in any::<u64>()) {
        let d = random_descriptor(&mut ChaCha8Rng::seed_from_u64(seed), 10, 5, 2);
        let mut names = VarTable::conventional();
        let text = d.render(&names).to_string();
        let back = parse_descriptor_with(&text, &mut names).unwrap();
        prop_assert_eq!(&back, &d);
        prop_assert!(desc_equal(&back, &minimize(&d)));
    }

    #[test]
    fn reduced_descriptors_are_canonical(t in arb_term(14), u in arb_term(14)) {
        let (dt, du) = (desc_of_reduced(&t), desc_of_reduced(&u));
        let (et, eu) = (expand(&dt).unwrap(), expand(&du).unwrap());
        prop_assert_eq!(dt == du, et == eu);
    }
}
