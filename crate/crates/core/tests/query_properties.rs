//! Property tests over the query model: parser/printer round trip,
//! canonical-string injectivity, evaluator equivalence, and purity.

use std::collections::HashMap;

use proptest::prelude::*;

use stickyq_core::query::{
    evaluate, parse_query, Comparator, Condition, DatasetIndex, Query,
};
use stickyq_core::tabular::{generate_complete_k, load_csv_str, Value};

fn arb_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-10_000i64..10_000).prop_map(Value::Int),
        (-1000i64..1000, 1u32..100).prop_map(|(n, d)| Value::real(n as f64 / d as f64)),
        "[a-z][a-z0-9_ -]{0,11}".prop_map(Value::text),
    ]
}

fn arb_scalar_op() -> impl Strategy<Value = Comparator> {
    prop_oneof![
        Just(Comparator::Eq),
        Just(Comparator::Neq),
        Just(Comparator::Le),
        Just(Comparator::Lt),
        Just(Comparator::Ge),
        Just(Comparator::Gt),
    ]
}

fn arb_condition() -> impl Strategy<Value = Condition> {
    let attr = "[a-z][a-z0-9_]{0,9}";
    prop_oneof![
        (attr, arb_scalar_op(), arb_value())
            .prop_map(|(a, op, v)| Condition::scalar(a, op, v).unwrap()),
        (attr, prop::collection::vec(arb_value(), 1..4), any::<bool>()).prop_map(
            |(a, vs, neg)| {
                let op = if neg { Comparator::NotIn } else { Comparator::In };
                Condition::new(a, op, vs).unwrap()
            }
        ),
    ]
}

fn arb_query() -> impl Strategy<Value = Query> {
    prop::collection::vec(arb_condition(), 1..6).prop_filter_map("duplicate conditions", |cs| {
        Query::new(cs).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_render_round_trip(query in arb_query()) {
        let rendered = query.render();
        let reparsed = parse_query(&rendered).unwrap();
        prop_assert_eq!(query, reparsed);
    }

    #[test]
    fn canonical_injective_within_structure(a in arb_condition(), b in arb_condition()) {
        // over this generator's value space, equal canonicals mean equal
        // conditions (text values never look numeric here)
        if a.canonical_string() == b.canonical_string() {
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn canonical_injectivity_over_large_corpus() {
    // 10^5 generated conditions: canonical collisions only for equal conditions
    use proptest::strategy::ValueTree;
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = arb_condition();
    let mut seen: HashMap<String, Condition> = HashMap::new();
    for _ in 0..100_000 {
        let cond = strategy
            .new_tree(&mut runner)
            .expect("tree generation")
            .current();
        if let Some(prior) = seen.insert(cond.canonical_string(), cond.clone()) {
            assert_eq!(prior, cond, "canonical collision across distinct conditions");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indexed_evaluation_matches_reference(
        b in 2u32..5,
        k in 1u32..4,
        conds in prop::collection::vec(
            ("a[1-3]|s", arb_scalar_op(), -2i64..8),
            1..4
        ),
    ) {
        let dataset = generate_complete_k(b, k, 7).unwrap();
        let index = DatasetIndex::build(&dataset);
        let conditions: Vec<Condition> = conds
            .into_iter()
            .map(|(a, op, v)| Condition::scalar(a, op, Value::Int(v)).unwrap())
            .collect();
        let Ok(query) = Query::new(conditions) else { return Ok(()) };
        let reference = evaluate(&dataset, &query);
        let fast = index.evaluate(&query);
        match (reference, fast) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "divergence: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn evaluation_is_pure() {
    let dataset = load_csv_str(
        "uid,age,zip,s\nu1,37,10,0\nu2,37,11,1\nu3,40,10,1\n",
        "uid",
        "s",
    )
    .unwrap();
    let query = parse_query("SELECT count(*) FROM t WHERE age = 37 AND zip <= 10").unwrap();
    let first = evaluate(&dataset, &query).unwrap();
    for _ in 0..50 {
        assert_eq!(evaluate(&dataset, &query).unwrap(), first);
    }
}
