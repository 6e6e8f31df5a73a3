//! The firewalled attack execution path.
//!
//! This module is the only place the harness hands control to an attack
//! strategy, and it sees nothing but the attacker-visible surface: an
//! answerer, the public value domains, the background knowledge, and (for
//! the differential attack) the uniqueness oracle its threat model grants. Ground
//! truth — secret values, value-uniqueness flags — is joined onto outcomes
//! elsewhere, after the verdicts exist. An audit test pins this boundary at
//! the source level.

use stickyq_core::attacks::{
    AttackEnv, AttackError, AttackOutcome, AttackParams, AttackStrategy, BackgroundKnowledge,
    UniqueOracle, ValueDomains,
};
use stickyq_core::engine::Answerer;

/// Runs one strategy against one victim's knowledge, through the
/// attacker-visible interface only.
pub fn attack_one(
    strategy: &dyn AttackStrategy,
    answerer: &dyn Answerer,
    domains: &ValueDomains,
    oracle: Option<&dyn UniqueOracle>,
    knowledge: &BackgroundKnowledge,
    params: &AttackParams,
) -> Result<AttackOutcome, AttackError> {
    let env = AttackEnv {
        answerer,
        domains,
        oracle,
    };
    strategy.run(&env, knowledge, params)
}
