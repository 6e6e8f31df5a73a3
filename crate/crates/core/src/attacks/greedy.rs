//! Greedy single-shot subset selection: replaces the iterative exploration
//! with one deterministic choice, capping the attack at
//! `|A*| + 2|Δ| + 2` queries per victim.

use crate::attacks::cloning::{pinned_dummies, value_unique_test, CloningProbe, CloningTarget};
use crate::attacks::{
    AttackEnv, AttackError, AttackOutcome, AttackParams, AttackStrategy, BackgroundKnowledge,
    SubsetUsed, Verdict,
};
use crate::engine::{Answerer, CountingAnswerer};
use crate::query::{Comparator, Condition, Query};
use crate::tabular::Value;

/// The greedy split selection: estimate the population `N` and, per
/// attribute, the fraction `ρ_a` of users sharing the victim's value (with
/// `s <> v`); pick the most discriminative attribute as `u` and the
/// shortest descending-ρ prefix `A′` with `ρ_u · Π ρ < 1/N`, so the full
/// split is expected to single the victim out while `A′` alone keeps a
/// healthy crowd. Issues exactly `|A*| + 1` queries.
///
/// Ties sort by attribute name; a tie on the minimum picks the last name.
pub fn greedy_select_subset(
    answerer: &dyn Answerer,
    knowledge: &BackgroundKnowledge,
    v: i64,
) -> Result<(Vec<usize>, usize), AttackError> {
    if knowledge.len() < 2 {
        return Err(AttackError::BadParams {
            detail: "greedy selection needs at least 2 known attributes".into(),
        });
    }
    // a bare count() is not expressible in the grammar; a tautological
    // range condition on the binary secret stands in, at ±~1.4 noise
    let population_query = Query::new(vec![Condition::scalar(
        knowledge.secret(),
        Comparator::Ge,
        Value::Int(0),
    )?])?;
    let n_est = answerer.answer(&population_query)?;
    if n_est < 1.0 {
        return Err(AttackError::Selection {
            detail: format!("population estimate {n_est} is not positive"),
        });
    }

    let mut rho = Vec::with_capacity(knowledge.len());
    for (attr, value) in knowledge.attrs().iter().zip(knowledge.values()) {
        let q = Query::new(vec![
            Condition::eq(attr, value.clone()),
            Condition::neq(knowledge.secret(), Value::Int(v)),
        ])?;
        rho.push(answerer.answer(&q)? / n_est);
    }
    if rho.iter().all(|&r| r == 0.0) {
        return Err(AttackError::Selection {
            detail: "victim invisible: every per-attribute count is zero".into(),
        });
    }

    // descending ρ, name-ascending on ties; u is the tail (minimum ρ)
    let mut order: Vec<usize> = (0..knowledge.len()).collect();
    order.sort_by(|&a, &b| {
        rho[b]
            .partial_cmp(&rho[a])
            .unwrap()
            .then_with(|| knowledge.attrs()[a].cmp(&knowledge.attrs()[b]))
    });
    let u = *order.last().unwrap();
    let candidates = &order[..order.len() - 1];

    let bound = 1.0 / n_est;
    let mut aprime = Vec::new();
    let mut product = rho[u];
    for &i in candidates {
        if product < bound {
            break;
        }
        aprime.push(i);
        product *= rho[i];
    }
    aprime.sort_unstable();
    Ok((aprime, u))
}

/// The greedy attack: one split selection, then one validated cloning attempt.
/// NonAttackable on any failure — selection included — and never more than
/// `|A*| + 2|Δ| + 2` queries.
pub fn greedy_full_cloning_attack(
    env: &AttackEnv<'_>,
    knowledge: &BackgroundKnowledge,
    params: &AttackParams,
) -> Result<AttackOutcome, AttackError> {
    let counting = CountingAnswerer::new(env.answerer);
    let non_attackable = |queries_issued: u64| AttackOutcome {
        verdict: Verdict::NonAttackable,
        queries_issued,
        subset_used: None,
    };

    let (aprime_idx, u_idx) =
        match greedy_select_subset(&counting, knowledge, params.target_value) {
            Ok(split) => split,
            Err(AttackError::Selection { .. }) => return Ok(non_attackable(counting.issued())),
            Err(other) => return Err(other),
        };
    let target = CloningTarget::from_knowledge(knowledge, &aprime_idx, u_idx);
    let dummies = pinned_dummies(env.domains, &target, params.delta_count, params.seed)?;

    let probe = CloningProbe::collect(&counting, &target, &dummies, params.target_value)?;
    if !probe.passes_no_bucket_suppression() {
        return Ok(non_attackable(counting.issued()));
    }
    if !value_unique_test(&counting, &target)? {
        return Ok(non_attackable(counting.issued()));
    }
    let matches = probe.secret_matches(params.sigma_star);
    Ok(AttackOutcome {
        verdict: Verdict::from_match(matches, params.target_value),
        queries_issued: counting.issued(),
        subset_used: Some(SubsetUsed {
            attrs: target.aprime.iter().map(|(a, _)| a.clone()).collect(),
            distinguisher: Some(target.u_attr.clone()),
        }),
    })
}

/// Registry entry for the greedy cloning attack.
pub struct GreedyCloning;

impl AttackStrategy for GreedyCloning {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn describe(&self) -> &'static str {
        "single-shot cloning on a greedily selected split, at most |A*| + 2|Δ| + 2 queries"
    }

    fn run(
        &self,
        env: &AttackEnv<'_>,
        knowledge: &BackgroundKnowledge,
        params: &AttackParams,
    ) -> Result<AttackOutcome, AttackError> {
        greedy_full_cloning_attack(env, knowledge, params)
    }
}
