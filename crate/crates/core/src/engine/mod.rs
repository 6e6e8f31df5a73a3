//! The anonymizing answer pipeline: seed derivation, sticky Gaussian noise
//! layers, noisy-threshold bucket suppression, optional rounding.
//!
//! For a query `count(C_1 ∧ … ∧ C_h)` with true count `n` and query set `S`,
//! the unsuppressed answer is
//!
//! ```text
//! n + Σ_i static[C_i] + Σ_i dynamic[C_i]
//! ```
//!
//! where each layer is a unit Gaussian drawn from a seed that is sticky:
//! `static_seed = hash64(canonical(C_i)) XOR salt`, and the dynamic seed
//! additionally XORs the hash of every uid in `S`. Suppression first
//! hard-suppresses `n <= hard_floor`, then compares `n` against a noisy
//! threshold `T ~ N(4, 1/2)` seeded by `salt XOR hash(uid_1) XOR …`.
//! Suppressed answers are returned as plain zero, indistinguishable from a
//! rounded noisy zero.

mod hash;

pub use hash::hash64;

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::prng::standard_normal;
use crate::query::{evaluate, Condition, Query, QueryError, QuerySet};
use crate::tabular::Dataset;

/// Rounding applied to unsuppressed answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rounding {
    /// Raw noisy value, negative outputs included.
    None,
    /// Round to the nearest integer, clamped at zero (ties away from zero).
    NearestNonnegative,
}

/// Engine configuration. The salt is the 64-bit secret that makes noise
/// unpredictable to the analyst; everything else is mechanism policy.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EngineConfig {
    pub salt: u64,
    pub rounding: Rounding,
    pub suppression: bool,
    /// True counts at or below this are suppressed outright (default 2).
    pub hard_floor: u64,
    pub threshold_mean: f64,
    pub threshold_sd: f64,
}

impl EngineConfig {
    pub fn new(salt: u64) -> EngineConfig {
        EngineConfig {
            salt,
            rounding: Rounding::NearestNonnegative,
            suppression: true,
            hard_floor: 2,
            threshold_mean: 4.0,
            threshold_sd: (0.5f64).sqrt(),
        }
    }

    pub fn unrounded(mut self) -> EngineConfig {
        self.rounding = Rounding::None;
        self
    }

    pub fn without_suppression(mut self) -> EngineConfig {
        self.suppression = false;
        self
    }
}

/// Per-condition noise breakdown, exposed by [`answer_debug`] only.
#[derive(Debug, Clone, Serialize)]
pub struct Layer {
    pub condition: String,
    pub static_noise: f64,
    pub dynamic_noise: f64,
}

/// One anonymized answer. `suppressed` and `layers` are harness-side
/// introspection; the attacker-visible interface carries `value` alone.
#[derive(Debug, Clone, Serialize)]
pub struct NoisyAnswer {
    pub value: f64,
    pub suppressed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Layer>>,
}

/// A deterministic Gaussian deviate: same seed, same value. `sd = 0` yields
/// the mean exactly.
pub fn gaussian(seed: u64, mean: f64, sd: f64) -> f64 {
    debug_assert!(sd >= 0.0);
    mean + sd * standard_normal(seed)
}

/// Seed of the static noise layer for one condition.
pub fn static_seed(cond: &Condition, config: &EngineConfig) -> u64 {
    hash64(&cond.canonical_string()) ^ config.salt
}

/// Seed of the dynamic noise layer: the static seed XORed with the hash of
/// every uid in the query set. Order-independent; empty set gives back the
/// static seed.
pub fn dynamic_seed(
    cond: &Condition,
    qset: &QuerySet,
    dataset: &Dataset,
    config: &EngineConfig,
) -> u64 {
    static_seed(cond, config) ^ uid_xor(qset, dataset)
}

fn uid_xor(qset: &QuerySet, dataset: &Dataset) -> u64 {
    qset.rows()
        .iter()
        .fold(0u64, |acc, &row| acc ^ hash64(dataset.uid(row as usize)))
}

/// Seed of the suppression threshold draw for a query set.
pub fn threshold_seed(qset: &QuerySet, dataset: &Dataset, config: &EngineConfig) -> u64 {
    config.salt ^ uid_xor(qset, dataset)
}

/// Anonymized answer for `query` on `dataset`.
pub fn answer(
    dataset: &Dataset,
    query: &Query,
    config: &EngineConfig,
) -> Result<NoisyAnswer, EngineError> {
    answer_impl(dataset, query, config, false)
}

/// As [`answer`], with the per-condition layer breakdown attached. Harness
/// introspection only — never exposed through the attacker-facing interface.
pub fn answer_debug(
    dataset: &Dataset,
    query: &Query,
    config: &EngineConfig,
) -> Result<NoisyAnswer, EngineError> {
    answer_impl(dataset, query, config, true)
}

fn answer_impl(
    dataset: &Dataset,
    query: &Query,
    config: &EngineConfig,
    debug: bool,
) -> Result<NoisyAnswer, EngineError> {
    let (n, qset) = evaluate(dataset, query)?;
    Ok(finish_answer(n, uid_xor(&qset, dataset), query, config, debug))
}

/// The noise pipeline after evaluation: suppression decisions, layer draws,
/// rounding. `set_hash` is the XOR of the query set's uid hashes.
fn finish_answer(
    n: u64,
    set_hash: u64,
    query: &Query,
    config: &EngineConfig,
    debug: bool,
) -> NoisyAnswer {
    if config.suppression {
        if n <= config.hard_floor {
            return suppressed(debug);
        }
        let t = gaussian(
            config.salt ^ set_hash,
            config.threshold_mean,
            config.threshold_sd,
        );
        if (n as f64) < t {
            return suppressed(debug);
        }
    }

    let mut value = n as f64;
    let mut layers = debug.then(Vec::new);
    for cond in query.conditions() {
        let s_seed = static_seed(cond, config);
        let static_noise = gaussian(s_seed, 0.0, 1.0);
        let dynamic_noise = gaussian(s_seed ^ set_hash, 0.0, 1.0);
        value += static_noise + dynamic_noise;
        if let Some(layers) = layers.as_mut() {
            layers.push(Layer {
                condition: cond.canonical_string(),
                static_noise,
                dynamic_noise,
            });
        }
    }
    if config.rounding == Rounding::NearestNonnegative {
        value = value.round().max(0.0);
    }
    NoisyAnswer {
        value,
        suppressed: false,
        layers,
    }
}

fn suppressed(debug: bool) -> NoisyAnswer {
    NoisyAnswer {
        value: 0.0,
        suppressed: true,
        layers: debug.then(Vec::new),
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// The attacker-visible interface: queries in, bare noisy values out.
///
/// Implementations must be pure functions of the query (stickiness), safe
/// for unrestricted concurrent use.
pub trait Answerer: Sync {
    fn answer(&self, query: &Query) -> Result<f64, EngineError>;
}

/// The engine bound to one dataset and configuration.
///
/// Construction indexes the dataset (dictionary codes, posting lists,
/// per-row uid hashes) so the answer path stays cheap under the attack
/// workloads' millions of queries. Answers are bit-identical to the plain
/// [`answer`] function.
pub struct EngineAnswerer<'a> {
    index: crate::query::DatasetIndex<'a>,
    uid_hashes: Vec<u64>,
    config: EngineConfig,
}

impl<'a> EngineAnswerer<'a> {
    pub fn new(dataset: &'a Dataset, config: EngineConfig) -> Self {
        let uid_hashes = (0..dataset.len()).map(|r| hash64(dataset.uid(r))).collect();
        EngineAnswerer {
            index: crate::query::DatasetIndex::build(dataset),
            uid_hashes,
            config,
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.index.dataset()
    }
}

impl Answerer for EngineAnswerer<'_> {
    fn answer(&self, query: &Query) -> Result<f64, EngineError> {
        let (n, qset) = self.index.evaluate(query)?;
        let set_hash = qset
            .rows()
            .iter()
            .fold(0u64, |acc, &row| acc ^ self.uid_hashes[row as usize]);
        Ok(finish_answer(n, set_hash, query, &self.config, false).value)
    }
}

/// Decorator that counts every `answer` call, for exact query accounting.
pub struct CountingAnswerer<'a> {
    inner: &'a dyn Answerer,
    issued: AtomicU64,
}

impl<'a> CountingAnswerer<'a> {
    pub fn new(inner: &'a dyn Answerer) -> Self {
        CountingAnswerer {
            inner,
            issued: AtomicU64::new(0),
        }
    }

    pub fn issued(&self) -> u64 {
        self.issued.load(Ordering::Relaxed)
    }
}

impl Answerer for CountingAnswerer<'_> {
    fn answer(&self, query: &Query) -> Result<f64, EngineError> {
        self.issued.fetch_add(1, Ordering::Relaxed);
        self.inner.answer(query)
    }
}
