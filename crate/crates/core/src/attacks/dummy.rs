//! Dummy conditions: inequalities that add independent noise layers without
//! changing the query set.

use crate::attacks::{AttackError, ValueDomains};
use crate::prng::Stream;
use crate::query::Condition;
use crate::tabular::Value;

/// A set of distinct dummy conditions `a <> b_j` on one pinned attribute,
/// with every `b_j` different from the victim's value so that, given the
/// pinned equality `a = x^(a)`, none of them restricts the query set.
#[derive(Debug, Clone)]
pub struct DummyConditionSet {
    conditions: Vec<Condition>,
}

impl DummyConditionSet {
    fn build(attribute: &str, values: Vec<Value>) -> DummyConditionSet {
        let conditions = values
            .into_iter()
            .map(|v| Condition::neq(attribute, v))
            .collect();
        DummyConditionSet { conditions }
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    /// The conjunction with dummy `j` left out, as used by the amplified
    /// cloning queries.
    pub fn all_but(&self, j: usize) -> impl Iterator<Item = &Condition> {
        self.conditions
            .iter()
            .enumerate()
            .filter(move |(l, _)| *l != j)
            .map(|(_, c)| c)
    }
}

/// Builds `count` dummy conditions on `pinned_attr`, drawing values from the
/// observed domain minus the victim's value and synthesizing adjacent
/// out-of-domain values when the domain runs short. Deterministic for a
/// fixed seed (the seed rotates the domain draw).
pub fn generate_dummy_conditions(
    domains: &ValueDomains,
    pinned_attr: &str,
    victim_value: &Value,
    count: usize,
    seed: u64,
) -> Result<DummyConditionSet, AttackError> {
    if count < 2 {
        return Err(AttackError::Dummy {
            detail: format!("need at least 2 dummy conditions, got {count}"),
        });
    }
    if !domains.contains(pinned_attr) {
        return Err(AttackError::Dummy {
            detail: format!("pinned attribute {pinned_attr:?} is not in the schema"),
        });
    }
    let candidates: Vec<&Value> = domains
        .values(pinned_attr)
        .iter()
        .filter(|v| *v != victim_value)
        .collect();

    let mut chosen: Vec<Value> = Vec::with_capacity(count);
    if !candidates.is_empty() {
        let offset = Stream::new(seed).next_below(candidates.len() as u64) as usize;
        for i in 0..candidates.len().min(count) {
            chosen.push(candidates[(offset + i) % candidates.len()].clone());
        }
    }
    if chosen.len() < count {
        let missing = count - chosen.len();
        let taken: Vec<Value> = chosen.clone();
        chosen.extend(synthesize_values(
            domains.values(pinned_attr),
            &taken,
            Some(victim_value),
            missing,
        ));
    }
    Ok(DummyConditionSet::build(pinned_attr, chosen))
}

/// Builds `count` dummy conditions on `attr` whose values all lie outside
/// the observed domain, so each `attr <> b_j` matches every record
/// unconditionally. Used when no pinned equality is available (empty A′).
pub fn generate_out_of_domain_dummies(
    domains: &ValueDomains,
    attr: &str,
    count: usize,
) -> Result<DummyConditionSet, AttackError> {
    if count < 2 {
        return Err(AttackError::Dummy {
            detail: format!("need at least 2 dummy conditions, got {count}"),
        });
    }
    if !domains.contains(attr) {
        return Err(AttackError::Dummy {
            detail: format!("attribute {attr:?} is not in the schema"),
        });
    }
    let values = synthesize_values(domains.values(attr), &[], None, count);
    Ok(DummyConditionSet::build(attr, values))
}

/// Deterministic out-of-domain value synthesis: numeric attributes count up
/// from the domain maximum, text attributes suffix a counter.
fn synthesize_values(
    domain: &[Value],
    taken: &[Value],
    also_avoid: Option<&Value>,
    count: usize,
) -> Vec<Value> {
    let numeric = domain.iter().all(Value::is_numeric) && !domain.is_empty();
    let mut out = Vec::with_capacity(count);
    let mut i: i64 = 0;
    while out.len() < count {
        i += 1;
        let candidate = if numeric {
            let max = domain
                .iter()
                .filter_map(|v| match v {
                    Value::Int(n) => Some(*n as f64),
                    Value::Real(x) => Some(*x),
                    Value::Text(_) => None,
                })
                .fold(f64::NEG_INFINITY, f64::max);
            Value::real(max.ceil() + i as f64)
        } else {
            Value::text(format!("__none_{i}"))
        };
        let clashes = domain.contains(&candidate)
            || taken.contains(&candidate)
            || out.contains(&candidate)
            || also_avoid == Some(&candidate);
        if !clashes {
            out.push(candidate);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn domains() -> ValueDomains {
        let mut map = BTreeMap::new();
        map.insert(
            "age".to_string(),
            vec![Value::Int(36), Value::Int(37), Value::Int(38), Value::Int(39)],
        );
        map.insert(
            "color".to_string(),
            vec![Value::text("red"), Value::text("blue")],
        );
        ValueDomains::new(map)
    }

    fn canonicals(set: &DummyConditionSet) -> Vec<String> {
        set.conditions()
            .iter()
            .map(|c| c.canonical_string())
            .collect()
    }

    #[test]
    fn draws_distinct_non_victim_values() {
        let set =
            generate_dummy_conditions(&domains(), "age", &Value::Int(37), 3, 0).unwrap();
        let cs = canonicals(&set);
        assert_eq!(cs.len(), 3);
        for (i, c) in cs.iter().enumerate() {
            assert!(!c.contains("= 37") && !c.ends_with(" 37"), "{c}");
            assert!(!cs[..i].contains(c), "duplicate {c}");
        }
    }

    #[test]
    fn synthesizes_when_domain_is_short() {
        let set =
            generate_dummy_conditions(&domains(), "color", &Value::text("red"), 4, 1).unwrap();
        let cs = canonicals(&set);
        assert_eq!(cs.len(), 4);
        assert!(cs.iter().all(|c| c != "color <> red"));
        // one in-domain value plus three synthesized
        assert!(cs.contains(&"color <> blue".to_string()));
    }

    #[test]
    fn out_of_domain_values_never_collide_with_the_domain() {
        let set = generate_out_of_domain_dummies(&domains(), "age", 5).unwrap();
        for c in set.conditions() {
            assert!(!domains().values("age").contains(c.value()), "{c}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_dummy_conditions(&domains(), "age", &Value::Int(37), 3, 7).unwrap();
        let b = generate_dummy_conditions(&domains(), "age", &Value::Int(37), 3, 7).unwrap();
        assert_eq!(canonicals(&a), canonicals(&b));
    }

    #[test]
    fn rejects_missing_attribute_and_tiny_counts() {
        assert!(generate_dummy_conditions(&domains(), "nope", &Value::Int(1), 3, 0).is_err());
        assert!(generate_dummy_conditions(&domains(), "age", &Value::Int(37), 1, 0).is_err());
    }
}
