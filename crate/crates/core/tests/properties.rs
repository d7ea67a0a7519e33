//! Property tests over generated programs and expressions.

use proptest::prelude::*;

use founded_rules::completion::dual;
use founded_rules::constraint::{constraint_models, satisfies_rules, EnumerationLimit};
use founded_rules::founded::{eval3, founded_model, linear_lfp, FiringOrder, Interpretation, TruthValue};
use founded_rules::fuzz::generate;
use founded_rules::grounder::{GroundExpr, GroundLiteral};
use founded_rules::language::GroundAtom;
use founded_rules::parser::{canonical, parse_program, render_program};
use founded_rules::pipeline::{all_uncertain, Prepared};

fn expr() -> impl Strategy<Value = GroundExpr> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(GroundExpr::Const),
        (0..3usize, any::<bool>()).prop_map(|(i, positive)| GroundExpr::Lit(GroundLiteral {
            atom: GroundAtom::new(["p", "q", "r"][i], vec![]),
            positive,
        })),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(GroundExpr::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(GroundExpr::Or),
            inner.prop_map(|e| GroundExpr::Not(Box::new(e))),
        ]
    })
}

fn value() -> impl Strategy<Value = TruthValue> {
    prop_oneof![Just(TruthValue::False), Just(TruthValue::Undefined), Just(TruthValue::True)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_is_an_involution(e in expr()) {
        prop_assert_eq!(dual(&dual(&e)), e);
    }

    #[test]
    fn dual_negates_the_kleene_value(e in expr(), vs in prop::collection::vec(value(), 3)) {
        let values = ["p", "q", "r"].iter().zip(vs).map(|(p, v)| (GroundAtom::new(*p, vec![]), v)).collect();
        let itp = Interpretation { values, conflicts: vec![] };
        prop_assert_eq!(eval3(&dual(&e), &itp), eval3(&e, &itp).not());
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>(), stratified in any::<bool>()) {
        let program = generate(seed, stratified);
        let text = render_program(&program);
        let reparsed = parse_program(&text).unwrap();
        prop_assert_eq!(canonical(&reparsed), canonical(&program), "{}", text);
    }

    #[test]
    fn evaluation_is_confluent(seed in any::<u64>(), order in any::<u64>()) {
        let program = all_uncertain(&generate(seed, false));
        let p = Prepared::new(&program).unwrap();
        let naive = founded_model(&p.completed, &p.sccs);
        let fifo = p.founded();
        let random = linear_lfp(&p.completed, &p.sccs, FiringOrder::Random(order));
        prop_assert_eq!(&fifo.interpretation, &naive);
        prop_assert_eq!(&random.interpretation, &naive);
        prop_assert!(naive.is_consistent());
        prop_assert_eq!(fifo.trace.steps, random.trace.steps);
    }

    #[test]
    fn constraint_models_extend_founded(seed in any::<u64>()) {
        let program = all_uncertain(&generate(seed, false));
        let p = Prepared::new(&program).unwrap();
        let founded = p.founded().interpretation;
        let models = constraint_models(&p.completed, &p.ground, &founded, EnumerationLimit::default());
        for m in &models.models {
            prop_assert!(m.extends(&founded));
            prop_assert!(satisfies_rules(&p.ground, m));
        }
    }
}
