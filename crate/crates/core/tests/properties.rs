use proptest::prelude::*;

use doxa::awareness::{awareness_to_quasi_ndm, quasi_ndm_to_awareness, translate};
use doxa::gen::{self, FormulaShape, ModelShape};
use doxa::mab::{eval_mab, is_cmab};
use doxa::ndm::{check_conditions, cmab_to_ndm, filtrate, ndm_to_cmab, quasi_to_ndm};
use doxa::solver::bounded::satisfiable_by_types;
use doxa::solver::{sat_lda, verify_views, SolverConfig};
use doxa::syntax::{parse_formula, subformulas, AgentId, Atom, Formula, ParseError};

fn arb_l0(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r", "x_1", "longName"]).prop_map(Formula::var),
        1 => Just(Formula::top()),
        1 => Just(Formula::bot()),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (1u32..=3, inner).prop_map(|(i, a)| Formula::exp(AgentId::new(i), a).unwrap()),
        ]
    })
}

fn arb_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::var),
        1 => Just(Formula::top()),
        1 => Just(Formula::bot()),
        1 => arb_l0(2).prop_map(|a| Formula::exp(AgentId::new(1), a).unwrap()),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (1u32..=3, inner.clone()).prop_map(|(i, a)| Formula::boxed(AgentId::new(i), a)),
            (1u32..=3, inner).prop_map(|(i, a)| Formula::poss(AgentId::new(i), a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(f in arb_formula(6)) {
        let text = f.to_string();
        let back = parse_formula(&text, 3).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn box_under_exp_is_rejected(f in arb_formula(3), i in 1u32..=3) {
        let text = format!("Exp[{i}] (q & Box[1] {f})");
        let is_stratification = matches!(
            parse_formula(&text, 3),
            Err(ParseError::Stratification { .. })
        );
        prop_assert!(is_stratification);
    }

    #[test]
    fn subformulas_are_closed(f in arb_formula(5)) {
        let sub = subformulas(&f);
        prop_assert!(sub.contains(&f));
        for g in &sub {
            for c in g.children() {
                prop_assert!(sub.contains(c));
            }
        }
    }

    #[test]
    fn filtration_preserves_sigma(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let m = gen::quasi_ndm(&mut rng, &ModelShape::new(2, 6, 3));
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 3));
        let sigma = subformulas(&f);
        let r = filtrate(&m, &sigma).unwrap();
        let report = check_conditions(&r.model);
        prop_assert!(report.c1_star && report.c2);
        prop_assert!(r.model.world_count() <= m.world_count());
        for w in 0..m.world_count() {
            for g in &sigma {
                prop_assert_eq!(m.eval(w, g), r.model.eval(r.class_of[w], g), "{} at {}", g, w);
            }
        }
    }

    #[test]
    fn quasi_to_ndm_preserves_designated(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let q = gen::quasi_ndm(&mut rng, &ModelShape::new(2, 5, 2));
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 2));
        let n = quasi_to_ndm(&q, &f);
        prop_assert!(check_conditions(&n).c1_exact);
        for w in 0..q.world_count() {
            prop_assert_eq!(q.eval(w, &f), n.eval(w, &f));
        }
    }

    #[test]
    fn awareness_round_trip_preserves_truth(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let q = gen::quasi_ndm(&mut rng, &ModelShape::new(2, 4, 2));
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 2));
        let a = quasi_ndm_to_awareness(&q).unwrap();
        prop_assert!(a.is_serial());
        let back = awareness_to_quasi_ndm(&a).unwrap();
        for w in 0..q.world_count() {
            let truth = q.eval(w, &f);
            prop_assert_eq!(truth, a.eval(w, &translate(&f)));
            prop_assert_eq!(truth, back.eval(w, &f));
        }
    }

    #[test]
    fn cmab_round_trip_preserves_truth(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let m = gen::cmab(&mut rng, &ModelShape::new(2, 4, 2));
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 2));
        let (ndm, root) = cmab_to_ndm(&m).unwrap();
        let truth = eval_mab(&m, &f);
        prop_assert_eq!(truth, ndm.eval(root, &f));
        let back = ndm_to_cmab(&ndm, root).unwrap();
        prop_assert!(is_cmab(&back));
        prop_assert_eq!(truth, eval_mab(&back, &f));
    }

    #[test]
    fn solver_matches_type_elimination(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let f = gen::formula(&mut rng, &FormulaShape::new(3, 2, 2));
        let res = sat_lda(&f, &SolverConfig::default()).unwrap();
        prop_assert_eq!(Some(res.is_sat()), satisfiable_by_types(&f, 2), "{}", f);
        if let Some(v) = &res.model {
            verify_views(&f, v).unwrap();
        }
    }
}

#[test]
fn reserved_atoms_stay_out_of_user_input() {
    assert!(parse_formula("_f_1_w0", 1).is_err());
    assert!(Atom::new("_x").is_err());
}
